#include <doctest.h>

#include <cmath>

#include "cooc/error.hpp"
#include "cooc/oracle.hpp"
#include "cooc/pairstore.hpp"
#include "counter_harness.hpp"

using namespace cooc;
using cooc::test::run_method;
using cooc::test::TempDir;

namespace {

std::string oracle_bytes(const ForwardCollection& c, const TempDir& tmp) {
  std::vector<PairRecord> recs;
  for (const auto& [k, n] : brute_force_count(c)) recs.push_back({k.first, k.second, n});
  write_run(recs, tmp / "oracle.run");
  return cooc::test::slurp(tmp / "oracle.run");
}

std::string label(Method m) { return std::string(to_string(m)); }

}  // namespace

TEST_CASE("method names round trip") {
  for (Method m : kAllMethods) CHECK(parse_method(to_string(m)) == m);
  CHECK(to_string(Method::list_scan) == "list-scan");
  CHECK_THROWS_AS(parse_method("bogus"), ConfigError);
}

TEST_CASE("toy corpus: 14 pairs for every method") {
  TempDir tmp;
  const auto c = cooc::test::toy_collection();
  for (Method m : kAllMethods) {
    CAPTURE(label(m));
    const auto r = run_method(c, m, tmp);
    CHECK(r.stats.pairs_emitted == 14);
    const auto recs = read_run(tmp / (label(m) + ".run"));
    REQUIRE(recs.size() == 14);
    auto count_of = [&](TermId a, TermId b) {
      for (const auto& x : recs) {
        if (x.primary == a && x.secondary == b) return x.count;
      }
      return PairCount{0};
    };
    CHECK(count_of(0, 2) == 3);  // a, cat
    CHECK(count_of(2, 3) == 2);  // a, rug
    CHECK(count_of(0, 3) == 2);  // cat, rug
    CHECK(count_of(0, 4) == 1);  // cat, dog
    CHECK(r.bytes == oracle_bytes(c, tmp));
  }
}

TEST_CASE("one document of 182 terms gives 16471 pairs of count 1") {
  TempDir tmp;
  const auto c = cooc::test::single_doc(182);
  for (Method m : kAllMethods) {
    CAPTURE(label(m));
    const auto r = run_method(c, m, tmp);
    CHECK(r.stats.pairs_emitted == 16471);
    const auto recs = read_run(tmp / (label(m) + ".run"));
    CHECK(recs.size() == 16471);
    CHECK(std::all_of(recs.begin(), recs.end(), [](const PairRecord& x) { return x.count == 1; }));
  }
}

TEST_CASE("degenerate collections") {
  TempDir tmp;
  SUBCASE("empty collection") {
    for (Method m : kAllMethods) {
      const auto r = run_method(ForwardCollection{}, m, tmp);
      CHECK(r.stats.pairs_emitted == 0);
      CHECK(r.bytes.size() == 16);
    }
  }
  SUBCASE("vocabulary of one term") {
    ForwardCollection c;
    const std::vector<TermId> t = {0};
    c.append(t);
    c.append(t);
    for (Method m : kAllMethods) CHECK(run_method(c, m, tmp).stats.pairs_emitted == 0);
  }
  SUBCASE("disjoint postings emit nothing for the pair") {
    ForwardCollection c;
    const std::vector<TermId> a = {0, 1}, b = {2, 3};
    c.append(a);
    c.append(b);
    for (Method m : kAllMethods) {
      run_method(c, m, tmp);
      CHECK(read_run(tmp / (label(m) + ".run")) ==
            std::vector<PairRecord>{{0, 1, 1}, {2, 3, 1}});
    }
  }
  SUBCASE("empty and single-term documents mixed in") {
    ForwardCollection c;
    const std::vector<TermId> e, one = {5}, many = {1, 5, 9};
    c.append(e);
    c.append(one);
    c.append(many);
    c.append(e);
    for (Method m : kAllMethods) {
      CHECK(run_method(c, m, tmp).bytes == oracle_bytes(c, tmp));
    }
  }
}

TEST_CASE("all methods agree with the oracle on random collections") {
  TempDir tmp;
  for (std::uint64_t seed = 100; seed < 125; ++seed) {
    CAPTURE(seed);
    const auto c = cooc::test::random_collection(seed, 1 + seed % 40, 30, 20 + seed % 60);
    const auto expected = oracle_bytes(c, tmp);
    for (Method m : kAllMethods) {
      CAPTURE(label(m));
      CounterConfig cfg;
      cfg.flush_threshold_pairs = 1 + seed % 13;
      cfg.block_width_k = 1 + seed % 9;
      cfg.accumulators_a = 1 + seed % 5;
      REQUIRE(run_method(c, m, tmp, cfg).bytes == expected);
    }
  }
}

TEST_CASE("count bounds and ordering") {
  TempDir tmp;
  const auto c = cooc::test::random_collection(7, 80, 40, 60);
  const auto idx = build_index(c);
  run_method(c, Method::list_scan, tmp);
  const auto recs = read_run(tmp / "list-scan.run");
  REQUIRE_FALSE(recs.empty());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    REQUIRE(r.primary < r.secondary);
    REQUIRE(r.count >= 1);
    REQUIRE(r.count <= std::min(idx.df(r.primary), idx.df(r.secondary)));
    if (i > 0) REQUIRE(recs[i - 1] < r);
  }
}

TEST_CASE("disjoint vocabularies: pairs are the sum of n(n-1)/2") {
  TempDir tmp;
  ForwardCollection c;
  std::uint64_t expected = 0;
  TermId next = 0;
  for (std::size_t n : {0, 1, 2, 5, 17, 40}) {
    std::vector<TermId> terms;
    for (std::size_t i = 0; i < n; ++i) terms.push_back(next++);
    c.append(terms);
    expected += n * (n - 1) / 2;
  }
  for (Method m : kAllMethods) CHECK(run_method(c, m, tmp).stats.pairs_emitted == expected);
}

TEST_CASE("naive output is invariant under the flush threshold") {
  TempDir tmp;
  const auto toy = cooc::test::toy_collection();
  CounterConfig five;
  five.flush_threshold_pairs = 5;
  const auto r5 = run_method(toy, Method::naive, tmp, five);
  CHECK(r5.stats.flushes > 1);
  CHECK(r5.bytes == run_method(toy, Method::naive, tmp).bytes);

  const auto c = cooc::test::random_collection(3, 50, 25, 40);
  const auto ref = run_method(c, Method::naive, tmp).bytes;
  for (std::uint64_t f : {1, 2, 7, 100, 1000}) {
    CounterConfig cfg;
    cfg.flush_threshold_pairs = f;
    CHECK(run_method(c, Method::naive, tmp, cfg).bytes == ref);
  }
  // spill files are cleaned up
  for (const auto& e : std::filesystem::directory_iterator(tmp.path())) {
    CHECK(e.path().string().find(".spill") == std::string::npos);
  }
}

TEST_CASE("list-blocks: invariance and b(b+1)/2 pairings") {
  TempDir tmp;
  const auto toy = cooc::test::toy_collection();
  const auto ref = run_method(toy, Method::naive, tmp).bytes;
  for (std::size_t k : {1, 2, 3, 7, 50}) {
    CounterConfig cfg;
    cfg.block_width_k = k;
    const auto r = run_method(toy, Method::list_blocks, tmp, cfg);
    CHECK(r.bytes == ref);
    const std::uint64_t b = (7 + k - 1) / k;
    CHECK(r.stats.blocks == b);
    CHECK(r.stats.block_pairings == b * (b + 1) / 2);
  }
  CounterConfig zero;
  zero.block_width_k = 0;
  CHECK_THROWS_AS(run_method(toy, Method::list_blocks, tmp, zero), ConfigError);
}

TEST_CASE("list-blocks rejects non-contiguous blocks") {
  TempDir tmp;
  const auto idx = build_index(cooc::test::toy_collection());
  auto blocks = build_blocks(idx, 2);
  blocks.erase(blocks.begin() + 1);
  CounterConfig cfg;
  cfg.output_path = tmp / "x.run";
  CHECK_THROWS_AS(count_list_blocks(blocks, cfg), ContractError);
}

TEST_CASE("multi-scan: invariance and pass counts") {
  TempDir tmp;
  const auto toy = cooc::test::toy_collection();
  const auto ref = run_method(toy, Method::naive, tmp).bytes;
  for (std::size_t a : {1, 2, 3, 7, 100}) {
    CounterConfig cfg;
    cfg.accumulators_a = a;
    const auto r = run_method(toy, Method::multi_scan, tmp, cfg);
    CHECK(r.bytes == ref);
    CHECK(r.stats.passes == (7 + a - 1) / a);
  }
  CounterConfig two;
  two.accumulators_a = 2;
  CHECK(run_method(toy, Method::multi_scan, tmp, two).stats.passes == 4);
  CounterConfig zero;
  zero.accumulators_a = 0;
  CHECK_THROWS_AS(run_method(toy, Method::multi_scan, tmp, zero), ConfigError);
}

TEST_CASE("list-scan: single-posting terms have count 1, last term emits nothing") {
  TempDir tmp;
  const auto c = cooc::test::random_collection(21, 40, 20, 50);
  const auto idx = build_index(c);
  run_method(c, Method::list_scan, tmp);
  const auto recs = read_run(tmp / "list-scan.run");
  const TermId last = static_cast<TermId>(idx.vocab_size() - 1);
  for (const auto& r : recs) {
    if (idx.df(r.primary) == 1) CHECK(r.count == 1);
    CHECK(r.primary != last);
  }
}

TEST_CASE("list-scan rejects a mismatched index") {
  TempDir tmp;
  const auto a = cooc::test::toy_collection();
  const auto b = cooc::test::random_collection(1, 3, 5, 7);
  const auto idx = build_index(b);
  CounterConfig cfg;
  cfg.output_path = tmp / "x.run";
  CHECK_THROWS_AS(count_list_scan(idx, a, cfg), ConsistencyError);
}

TEST_CASE("list-pairs work guard") {
  TempDir tmp;
  const auto c = cooc::test::single_doc(200);
  const auto idx = build_index(c);
  CounterConfig cfg;
  cfg.method = Method::list_pairs;
  cfg.output_path = tmp / "lp.run";
  cfg.work_limit = 1000;
  CHECK_THROWS_AS(run_counter(cfg, {&c, &idx}), ConfigError);
  cfg.allow_quadratic = true;
  CHECK(run_counter(cfg, {&c, &idx}).stats.pairs_emitted == 200 * 199 / 2);
}

TEST_CASE("run_counter reports and validates inputs") {
  TempDir tmp;
  const auto toy = cooc::test::toy_collection();
  const auto idx = build_index(toy);
  CounterConfig cfg;
  cfg.method = Method::list_scan;
  cfg.output_path = tmp / "ls.run";
  const auto res = run_counter(cfg, {&toy, &idx});
  CHECK(res.report.pairs_emitted == 14);
  CHECK(res.report.method == "list-scan");
  CHECK(res.report.doc_count == 3);
  CHECK(res.report.status == "ok");
  CHECK(res.report.output_bytes == std::filesystem::file_size(cfg.output_path));

  try {
    run_counter(cfg, {&toy, nullptr});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("index") != std::string::npos);
  }
  try {
    run_counter(cfg, {nullptr, &idx});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("forward collection") != std::string::npos);
  }
  cfg.output_path.clear();
  CHECK_THROWS_AS(run_counter(cfg, {&toy, &idx}), ConfigError);

  CounterConfig naive;
  naive.method = Method::naive;
  naive.output_path = tmp / "n.run";
  const ForwardCollection empty;
  const auto r = run_counter(naive, {&empty, nullptr});
  CHECK(r.report.pairs_emitted == 0);
  CHECK(read_run(naive.output_path).empty());

  naive.flush_threshold_pairs = 0;
  CHECK_THROWS_AS(run_counter(naive, {&toy, nullptr}), ConfigError);
}

TEST_CASE("max_doc_terms caps every method identically") {
  TempDir tmp;
  const auto c = cooc::test::random_collection(5, 30, 40, 60);
  const auto capped = cap_doc_terms(c, 10);
  for (DocId d = 0; d < capped.size(); ++d) CHECK(capped.doc(d).size() <= 10);
  const auto expected = oracle_bytes(capped, tmp);
  for (Method m : kAllMethods) {
    CounterConfig cfg;
    cfg.max_doc_terms = 10;
    CHECK(run_method(c, m, tmp, cfg).bytes == expected);
  }
}
