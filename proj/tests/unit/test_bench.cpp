#include <doctest.h>

#include <cstring>
#include <sstream>

#include "cooc/bench.hpp"
#include "cooc/error.hpp"
#include "cooc/stats.hpp"
#include "test_util.hpp"

using namespace cooc;
using cooc::test::TempDir;

// First in the file: the high-water mark must not already sit above the
// allocation below.
TEST_CASE("peak memory probe") {
  const auto before = peak_memory_probe();
  REQUIRE(before.has_value());
  CHECK(*before > 0);
  constexpr std::size_t kBytes = 100u << 20;
  std::vector<char> block(kBytes);
  std::memset(block.data(), 1, block.size());
  const auto after = peak_memory_probe();
  REQUIRE(after.has_value());
  CHECK(*after >= *before + kBytes);
  CHECK(block[kBytes / 2] == 1);
}

TEST_CASE("generator: empty spec") {
  SyntheticCorpusSpec spec;
  spec.doc_count = 0;
  const auto g = generate_corpus(spec);
  CHECK(g.collection.empty());
  CHECK(g.dictionary.size() == 0);
}

TEST_CASE("generator: deterministic under a fixed seed") {
  TempDir tmp;
  SyntheticCorpusSpec spec;
  spec.doc_count = 300;
  spec.seed = 17;
  write_forward(generate_corpus(spec).collection, tmp / "a.fwd");
  write_forward(generate_corpus(spec).collection, tmp / "b.fwd");
  CHECK(cooc::test::slurp(tmp / "a.fwd") == cooc::test::slurp(tmp / "b.fwd"));
  spec.seed = 18;
  write_forward(generate_corpus(spec).collection, tmp / "c.fwd");
  CHECK(cooc::test::slurp(tmp / "a.fwd") != cooc::test::slurp(tmp / "c.fwd"));
}

TEST_CASE("generator: documents are valid and dictionary matches") {
  SyntheticCorpusSpec spec;
  spec.doc_count = 200;
  spec.min_len = 3;
  spec.max_len = 900;
  const auto g = generate_corpus(spec);
  CHECK(g.dictionary.size() == g.collection.term_bound());
  CHECK(g.dictionary.lookup(0) == "w0");
  for (DocId d = 0; d < g.collection.size(); ++d) {
    CHECK(g.collection.doc(d).size() >= 3);
    CHECK(g.collection.doc(d).size() <= 900);
  }
}

TEST_CASE("generator: average length near 227 over 10000 documents") {
  SyntheticCorpusSpec spec;
  spec.doc_count = 10000;
  spec.max_len = 8570;
  const auto s = compute_stats(generate_corpus(spec).collection);
  CHECK(s.avg_len > 227.0 * 0.9);
  CHECK(s.avg_len < 227.0 * 1.1);
  MESSAGE("avg " << s.avg_len << " stddev " << s.stddev_len << " vocab " << s.vocab);
}

TEST_CASE("generator: rejects nonsense specs") {
  SyntheticCorpusSpec spec;
  spec.min_len = 10;
  spec.max_len = 5;
  CHECK_THROWS_AS(generate_corpus(spec), ConfigError);
  spec = {};
  spec.heaps_beta = 1.5;
  CHECK_THROWS_AS(generate_corpus(spec), ConfigError);
}

TEST_CASE("spec json round trip") {
  SyntheticCorpusSpec spec;
  spec.doc_count = 5;
  spec.seed = 99;
  const nlohmann::json j = spec;
  const auto back = j.get<SyntheticCorpusSpec>();
  CHECK(back.doc_count == 5);
  CHECK(back.seed == 99);
  CHECK(back.heaps_k == spec.heaps_k);
  // missing keys keep defaults
  const auto partial = nlohmann::json::parse(R"({"doc_count": 3})").get<SyntheticCorpusSpec>();
  CHECK(partial.doc_count == 3);
  CHECK(partial.mean_len == SyntheticCorpusSpec{}.mean_len);
}

TEST_CASE("report json round trip") {
  BenchReport r;
  r.method = "naive";
  r.doc_count = 10;
  r.wall_time_seconds = 1.5;
  r.peak_memory_bytes = 1234;
  r.param_flush = 7;
  r.pairs_emitted = 99;
  const nlohmann::json j = r;
  CHECK(j.at("wall_time_s") == 1.5);
  const auto back = j.get<BenchReport>();
  CHECK(back.method == "naive");
  CHECK(back.peak_memory_bytes == 1234u);
  CHECK(back.param_flush == 7u);
  CHECK_FALSE(back.param_block_width.has_value());
  CHECK(back.pairs_emitted == 99);
}

TEST_CASE("in-process bench sweep") {
  TempDir tmp;
  SyntheticCorpusSpec spec;
  spec.doc_count = 100;
  const auto g = generate_corpus(spec);
  write_forward(g.collection, forward_path(tmp / "c"));

  BenchOptions opts;
  opts.work_dir = tmp / "work";

  SUBCASE("list-scan over two sizes") {
    const std::vector<Method> methods = {Method::list_scan};
    const std::vector<std::size_t> sizes = {10, 100};
    const auto rows = bench_sweep(methods, sizes, tmp / "c", opts);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].status == "ok");
    CHECK(rows[1].wall_time_seconds > rows[0].wall_time_seconds);
    CHECK(rows[1].pairs_emitted > rows[0].pairs_emitted);
  }
  SUBCASE("all methods agree at size 100") {
    const std::vector<std::size_t> sizes = {100};
    opts.accumulators_a = 1000;
    const auto rows = bench_sweep(kAllMethods, sizes, tmp / "c", opts);
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) {
      CAPTURE(r.method);
      CHECK(r.status == "ok");
      CHECK(r.pairs_emitted == rows[0].pairs_emitted);
      CHECK(r.wall_time_seconds > 0);
    }
    CHECK(std::filesystem::is_empty(opts.work_dir));
  }
  SUBCASE("guards") {
    opts.naive_max_docs = 50;
    opts.work_limit = 100;
    const std::vector<Method> methods = {Method::naive, Method::list_pairs};
    const std::vector<std::size_t> sizes = {100};
    const auto rows = bench_sweep(methods, sizes, tmp / "c", opts);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].status == "skipped: guard");
    CHECK(rows[1].status == "skipped: guard");

    std::ostringstream csv;
    write_bench_csv(rows, csv);
    CHECK(csv.str().find("naive,100,,,,") != std::string::npos);
  }
}

TEST_CASE("bench csv columns") {
  BenchReport r;
  r.method = "list-blocks";
  r.doc_count = 3;
  r.wall_time_seconds = 0.25;
  r.pairs_emitted = 14;
  r.param_block_width = 3;
  std::ostringstream csv;
  const std::vector<BenchReport> rows = {r};
  write_bench_csv(rows, csv);
  CHECK(csv.str() ==
        "method,doc_count,wall_time_s,peak_mem_bytes,pairs_emitted,param_flush,"
        "param_block_width,param_accumulators,status\n"
        "list-blocks,3,0.250000,unavailable,14,,3,,ok\n");
}

TEST_CASE("repeated cells keep one row") {
  TempDir tmp;
  SyntheticCorpusSpec spec;
  spec.doc_count = 30;
  write_forward(generate_corpus(spec).collection, forward_path(tmp / "c"));
  BenchOptions opts;
  opts.work_dir = tmp / "work";
  opts.repeats = 3;
  const std::vector<Method> methods = {Method::list_scan};
  const std::vector<std::size_t> sizes = {30};
  const auto rows = bench_sweep(methods, sizes, tmp / "c", opts);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "ok");
  CHECK(rows[0].wall_time_seconds > 0);
}
