#include <doctest.h>

#include "../common/process.hpp"
#include "cooc/pairstore.hpp"
#include "test_util.hpp"

using namespace cooc;
using cooc::test::TempDir;

namespace {

cooc::test::ProcessResult cooc_cli(std::vector<std::string> args) {
  args.insert(args.begin(), COOC_EXE);
  return cooc::test::run_process(args);
}

// Writes the toy corpus as tab-separated lines and ingests it.
std::filesystem::path ingest_toy(const TempDir& tmp) {
  std::string lines;
  for (const auto& d : cooc::test::toy_documents()) lines += d.external_id + "\t" + d.text + "\n";
  cooc::test::spit(tmp / "toy.tsv", lines);
  const auto r = cooc_cli({"--quiet", "ingest", "--input", (tmp / "toy.tsv").string(), "--out",
                           (tmp / "toy").string()});
  REQUIRE_MESSAGE(r.code == 0, r.out);
  return tmp / "toy";
}

}  // namespace

TEST_CASE("version and usage errors") {
  auto v = cooc_cli({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find("cooc") != std::string::npos);

  auto bogus = cooc_cli({"count", "--method", "naive", "--collection", "x", "--out", "y.run",
                         "--no-such-flag"});
  CHECK(bogus.code == 2);
  CHECK(bogus.out.find("--no-such-flag") != std::string::npos);
  CHECK(bogus.out.find("Usage") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists("y.run"));

  CHECK(cooc_cli({"frobnicate"}).code == 2);
  CHECK(cooc_cli({}).code == 2);
}

TEST_CASE("count writes a run; bad parameters are usage errors") {
  TempDir tmp;
  const auto prefix = ingest_toy(tmp);
  const auto run = (tmp / "ls.run").string();
  auto r = cooc_cli({"--quiet", "count", "--method", "list-scan", "--collection", prefix.string(),
                     "--out", run});
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(run));
  CHECK(read_run(run).size() == 14);

  CHECK(cooc_cli({"count", "--method", "magic", "--collection", prefix.string(), "--out",
                  (tmp / "m.run").string()})
            .code == 2);
  CHECK(cooc_cli({"count", "--method", "multi-scan", "--accumulators", "0", "--collection",
                  prefix.string(), "--out", (tmp / "z.run").string()})
            .code == 2);
  CHECK_FALSE(std::filesystem::exists(tmp / "z.run"));
  // missing collection is a runtime failure
  CHECK(cooc_cli({"--quiet", "count", "--method", "naive", "--collection",
                  (tmp / "nope").string(), "--out", (tmp / "n.run").string()})
            .code == 3);
}

TEST_CASE("count is idempotent") {
  TempDir tmp;
  const auto prefix = ingest_toy(tmp);
  const auto run = (tmp / "a.run").string();
  for (int i = 0; i < 2; ++i) {
    REQUIRE(cooc_cli({"--quiet", "count", "--method", "naive", "--collection", prefix.string(),
                      "--out", run})
                .code == 0);
    if (i == 0) std::filesystem::copy_file(run, tmp / "first.run");
  }
  CHECK(cooc::test::slurp(run) == cooc::test::slurp(tmp / "first.run"));
}

TEST_CASE("verify on a corrupted run exits 1 with a diff") {
  TempDir tmp;
  const auto prefix = ingest_toy(tmp);
  const auto run = tmp / "ok.run";
  REQUIRE(cooc_cli({"--quiet", "count", "--method", "list-scan", "--collection", prefix.string(),
                    "--out", run.string()})
              .code == 0);
  CHECK(cooc_cli({"verify", "--collection", prefix.string(), "--run", run.string()}).code == 0);

  // bump the first count (bytes 28..31: first tuple's count)
  auto bytes = cooc::test::slurp(run);
  bytes[28] = static_cast<char>(bytes[28] + 1);
  cooc::test::spit(tmp / "bad.run", bytes);
  auto bad = cooc_cli({"verify", "--collection", prefix.string(), "--run",
                       (tmp / "bad.run").string()});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("expected 1 got 2") != std::string::npos);

  cooc::test::spit(tmp / "cut.run", bytes.substr(0, 30));
  CHECK(cooc_cli({"verify", "--collection", prefix.string(), "--run", (tmp / "cut.run").string()})
            .code == 1);
}

TEST_CASE("export, stats and merge subcommands") {
  TempDir tmp;
  const auto prefix = ingest_toy(tmp);
  const auto run = (tmp / "r.run").string();
  REQUIRE(cooc_cli({"--quiet", "count", "--method", "naive", "--collection", prefix.string(),
                    "--out", run})
              .code == 0);

  auto top = cooc_cli({"export", "--run", run, "--collection", prefix.string(), "--top"});
  CHECK(top.code == 0);
  CHECK(top.out == "cat\ta\t3\n");

  auto all = cooc_cli({"export", "--run", run, "--collection", prefix.string()});
  CHECK(std::count(all.out.begin(), all.out.end(), '\n') == 14);

  auto stats = cooc_cli({"stats", "--collection", prefix.string(), "--run", run});
  CHECK(stats.code == 0);
  CHECK(stats.out.find("Number of distinct co-oc pairs") != std::string::npos);

  auto merged = cooc_cli({"--quiet", "merge", run, run, "--out", (tmp / "m.run").string()});
  CHECK(merged.code == 0);
  const auto recs = read_run(tmp / "m.run");
  REQUIRE(recs.size() == 14);
  CHECK(recs[1].count == 6);
}

TEST_CASE("bench through child processes") {
  TempDir tmp;
  const auto prefix = ingest_toy(tmp);
  const auto csv = tmp / "b.csv";
  auto r = cooc_cli({"--quiet", "--temp-dir", (tmp / "w").string(), "bench", "--methods",
                     "naive,list-scan", "--sizes", "2,3", "--corpus", prefix.string(), "--out",
                     csv.string()});
  REQUIRE_MESSAGE(r.code == 0, r.out);
  const auto text = cooc::test::slurp(csv);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  CHECK(text.find("list-scan,3,") != std::string::npos);
  CHECK(text.find(",14,") != std::string::npos);
  CHECK(text.find("unavailable") == std::string::npos);
}
