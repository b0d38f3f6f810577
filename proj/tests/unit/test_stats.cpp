#include <doctest.h>

#include <sstream>

#include "cooc/bench.hpp"
#include "cooc/counters.hpp"
#include "cooc/error.hpp"
#include "cooc/pairstore.hpp"
#include "cooc/stats.hpp"
#include "counter_harness.hpp"

using namespace cooc;
using cooc::test::TempDir;

TEST_CASE("single document of 182 terms") {
  const auto s = compute_stats(cooc::test::single_doc(182));
  CHECK(s.doc_count == 1);
  CHECK(s.avg_len == doctest::Approx(182.0));
  CHECK(s.stddev_len == doctest::Approx(0.0));
  CHECK(s.postings == 182);
  CHECK(s.vocab == 182);
  CHECK(s.min_len == 182);
  CHECK(s.max_len == 182);
}

TEST_CASE("empty collection") {
  const auto s = compute_stats(ForwardCollection{});
  CHECK(s.doc_count == 0);
  CHECK_FALSE(s.avg_defined);
  CHECK(s.avg_len == 0.0);
  CHECK(s.postings == 0);
  CHECK(s.vocab == 0);
  CHECK(s.min_len == 0);
}

TEST_CASE("toy corpus with a run") {
  TempDir tmp;
  const auto toy = cooc::test::toy_collection();
  cooc::test::run_method(toy, Method::list_scan, tmp);
  const auto s = compute_stats(toy, tmp / "list-scan.run");
  CHECK(s.postings == 12);
  CHECK(s.vocab == 7);
  CHECK(s.distinct_pairs == 14u);
  CHECK(s.output_bytes == std::filesystem::file_size(tmp / "list-scan.run"));
  CHECK(s.avg_len == doctest::Approx(4.0));
}

TEST_CASE("run naming foreign terms is a consistency error") {
  TempDir tmp;
  write_run(std::vector<PairRecord>{{0, 99, 1}}, tmp / "x.run");
  CHECK_THROWS_AS(compute_stats(cooc::test::toy_collection(), tmp / "x.run"), ConsistencyError);
}

TEST_CASE("stats invariants on random collections") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto c = cooc::test::random_collection(seed, 1 + seed * 3, 50, 200);
    const auto s = compute_stats(c);
    CHECK(static_cast<double>(s.min_len) <= s.avg_len + 1e-9);
    CHECK(s.avg_len <= static_cast<double>(s.max_len) + 1e-9);
    CHECK(s.vocab <= s.postings);
    CHECK(s.postings == c.postings());
  }
}

TEST_CASE("stats sweep") {
  SyntheticCorpusSpec spec;
  spec.doc_count = 200;
  const auto g = generate_corpus(spec);
  const std::vector<std::size_t> sizes = {1, 10, 100};
  const auto rows = stats_sweep(g.collection, sizes);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].postings >= rows[i - 1].postings);
    CHECK(rows[i].vocab >= rows[i - 1].vocab);
    CHECK(rows[i].max_len >= rows[i - 1].max_len);
    CHECK(rows[i].min_len <= rows[i - 1].min_len);
  }

  const std::vector<std::size_t> same = {50, 50};
  const auto twin = stats_sweep(g.collection, same);
  CHECK(twin[0].postings == twin[1].postings);
  CHECK(twin[0].stddev_len == twin[1].stddev_len);

  const std::vector<std::size_t> too_big = {201};
  CHECK_THROWS_AS(stats_sweep(g.collection, too_big), RangeError);
  const std::vector<std::size_t> descending = {10, 5};
  CHECK_THROWS_AS(stats_sweep(g.collection, descending), RangeError);
}

TEST_CASE("sweep with pair counting") {
  TempDir tmp;
  SyntheticCorpusSpec spec;
  spec.doc_count = 20;
  spec.mean_len = 30;
  spec.stddev_len = 10;
  const auto g = generate_corpus(spec);
  const std::vector<std::size_t> sizes = {1, 20};
  SweepOptions opts;
  opts.count_pairs = true;
  opts.temp_dir = tmp.path();
  const auto rows = stats_sweep(g.collection, sizes, opts);
  const auto n0 = g.collection.doc(0).size();
  CHECK(rows[0].distinct_pairs == n0 * (n0 - 1) / 2);
  CHECK(*rows[1].distinct_pairs >= *rows[0].distinct_pairs);
  CHECK(std::filesystem::is_empty(tmp.path()));
}

TEST_CASE("human-readable numbers") {
  CHECK(human_count(182) == "182");
  CHECK(human_count(16471) == "16.5K");
  CHECK(human_count(1160) == "1.16K");
  CHECK(human_count(694000) == "694K");
  CHECK(human_count(3830000) == "3.83M");
  CHECK(human_bytes(999) == "999B");
  CHECK(human_bytes(1500000) == "1.50MB");
}

TEST_CASE("csv and table output") {
  const auto rows = std::vector<CollectionStats>{compute_stats(cooc::test::toy_collection())};
  std::ostringstream csv;
  write_stats_csv(rows, csv);
  CHECK(csv.str() ==
        "doc_count,avg_len,min_len,max_len,stddev_len,postings,vocab,distinct_pairs,output_bytes\n"
        "3,4.000000,4,4,0.000000,12,7,,\n");
  const auto table = format_stats_table(rows);
  CHECK(table.find("Vocabulary size") != std::string::npos);
  CHECK(table.find("Average document length") != std::string::npos);
}
