#include "cooc/bench.hpp"

#include <spawn.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "cooc/error.hpp"
#include "cooc/index.hpp"
#include "cooc/pairstore.hpp"

extern char** environ;

namespace cooc {

void to_json(nlohmann::json& j, const SyntheticCorpusSpec& s) {
  j = nlohmann::json{{"doc_count", s.doc_count},       {"mean_len", s.mean_len},
                     {"stddev_len", s.stddev_len},     {"min_len", s.min_len},
                     {"max_len", s.max_len},           {"heaps_k", s.heaps_k},
                     {"heaps_beta", s.heaps_beta},     {"zipf_exponent", s.zipf_exponent},
                     {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, SyntheticCorpusSpec& s) {
  s.doc_count = j.value("doc_count", s.doc_count);
  s.mean_len = j.value("mean_len", s.mean_len);
  s.stddev_len = j.value("stddev_len", s.stddev_len);
  s.min_len = j.value("min_len", s.min_len);
  s.max_len = j.value("max_len", s.max_len);
  s.heaps_k = j.value("heaps_k", s.heaps_k);
  s.heaps_beta = j.value("heaps_beta", s.heaps_beta);
  s.zipf_exponent = j.value("zipf_exponent", s.zipf_exponent);
  s.seed = j.value("seed", s.seed);
}

namespace {

// Inverse-CDF draw of a rank in [0, n) from a continuous Zipf approximation.
TermId zipf_rank(double u, std::size_t n, double s) {
  const double top = static_cast<double>(n) + 1.0;
  double x;
  if (std::abs(s - 1.0) < 1e-9) {
    x = std::exp(u * std::log(top));
  } else {
    const double e = 1.0 - s;
    x = std::pow((std::pow(top, e) - 1.0) * u + 1.0, 1.0 / e);
  }
  const auto r = static_cast<std::size_t>(x) - 1;
  return static_cast<TermId>(std::min(r, n - 1));
}

}  // namespace

GeneratedCorpus generate_corpus(const SyntheticCorpusSpec& spec) {
  if (spec.min_len > spec.max_len) throw ConfigError("min_len exceeds max_len");
  if (spec.heaps_beta <= 0.0 || spec.heaps_beta > 1.0 || spec.heaps_k <= 0.0) {
    throw ConfigError("heaps_k must be positive and heaps_beta in (0, 1]");
  }
  GeneratedCorpus out;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::optional<std::lognormal_distribution<double>> lengths;
  if (spec.mean_len > 0.0) {
    const double cv = spec.stddev_len / spec.mean_len;
    const double sigma2 = std::log1p(cv * cv);
    lengths.emplace(std::log(spec.mean_len) - sigma2 / 2.0, std::sqrt(sigma2));
  }

  std::vector<std::uint32_t> last_doc;  // per term: 1 + index of the last document using it
  std::vector<TermId> terms;
  std::uint64_t postings = 0;
  std::size_t vocab = 0;
  for (std::size_t d = 0; d < spec.doc_count; ++d) {
    const double raw = lengths ? (*lengths)(rng) : 0.0;
    const auto len = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(raw)),
                                             spec.min_len, spec.max_len);
    const auto mark = static_cast<std::uint32_t>(d + 1);
    terms.clear();
    int misses = 0;
    while (terms.size() < len) {
      const double p_new =
          std::min(1.0, spec.heaps_k * spec.heaps_beta *
                            std::pow(static_cast<double>(postings + 1), spec.heaps_beta - 1.0));
      TermId t;
      if (vocab == 0 || misses >= 16 || unit(rng) < p_new) {
        t = static_cast<TermId>(vocab++);
        last_doc.push_back(0);
      } else {
        t = zipf_rank(unit(rng), vocab, spec.zipf_exponent);
        if (last_doc[t] == mark) {
          ++misses;
          continue;
        }
      }
      last_doc[t] = mark;
      terms.push_back(t);
      ++postings;
      misses = 0;
    }
    std::sort(terms.begin(), terms.end());
    out.collection.append(terms);
  }
  for (std::size_t t = 0; t < vocab; ++t) out.dictionary.assign(fmt::format("w{}", t));
  return out;
}

namespace {

std::vector<std::string> count_args(const std::filesystem::path& exe, Method method,
                                    const std::filesystem::path& prefix, std::size_t size,
                                    const std::filesystem::path& run,
                                    const std::filesystem::path& report,
                                    const BenchOptions& o) {
  std::vector<std::string> args = {exe.string(),
                                   "--quiet",
                                   "--temp-dir",
                                   o.work_dir.string(),
                                   "--work-limit",
                                   std::to_string(o.work_limit),
                                   "count",
                                   "--method",
                                   std::string(to_string(method)),
                                   "--collection",
                                   prefix.string(),
                                   "--limit",
                                   std::to_string(size),
                                   "--out",
                                   run.string(),
                                   "--report",
                                   report.string(),
                                   "--flush-pairs",
                                   std::to_string(o.flush_threshold_pairs),
                                   "--accumulators",
                                   std::to_string(o.accumulators_a),
                                   "--block-width",
                                   o.block_width_k ? std::to_string(*o.block_width_k) : "auto"};
  if (o.max_doc_terms) {
    args.push_back("--max-doc-terms");
    args.push_back(std::to_string(*o.max_doc_terms));
  }
  return args;
}

// Runs a child to completion; returns its exit status and peak RSS.
std::pair<int, std::optional<std::uint64_t>> run_child(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  pid_t pid = 0;
  if (int rc = posix_spawn(&pid, argv[0], nullptr, nullptr, argv.data(), environ); rc != 0) {
    throw IoError(fmt::format("cannot spawn {}: {}", args[0], std::strerror(rc)));
  }
  int status = 0;
  rusage usage{};
  if (wait4(pid, &status, 0, &usage) < 0) {
    throw IoError(fmt::format("waiting for {} failed", args[0]));
  }
  std::optional<std::uint64_t> peak;
  if (usage.ru_maxrss > 0) peak = static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return {code, peak};
}

void remove_run(const std::filesystem::path& run) {
  std::error_code ec;
  std::filesystem::remove(run, ec);
  std::filesystem::remove(sidecar_path(run), ec);
}

}  // namespace

std::vector<BenchReport> bench_sweep(std::span<const Method> methods,
                                     std::span<const std::size_t> sizes,
                                     const std::filesystem::path& collection_prefix,
                                     const BenchOptions& options) {
  std::filesystem::create_directories(options.work_dir);
  std::vector<BenchReport> reports;
  for (std::size_t size : sizes) {
    const ForwardCollection prefix = read_forward(forward_path(collection_prefix), size);
    const std::uint64_t vocab = prefix.term_bound();
    for (Method method : methods) {
      BenchReport r;
      r.method = std::string(to_string(method));
      r.doc_count = size;
      r.timestamp = utc_timestamp();
      r.host = host_descriptor();
      if (method == Method::naive) r.param_flush = options.flush_threshold_pairs;
      if (method == Method::multi_scan) r.param_accumulators = options.accumulators_a;
      if (method == Method::list_blocks) {
        r.param_block_width = options.block_width_k.value_or(default_block_width(vocab));
      }
      r.param_max_doc_terms = options.max_doc_terms;

      if (prefix.size() < size) {
        r.status = fmt::format("error: collection has only {} documents", prefix.size());
        reports.push_back(r);
        continue;
      }
      if ((method == Method::naive && size > options.naive_max_docs) ||
          (method == Method::list_pairs && vocab * vocab > options.work_limit)) {
        r.status = "skipped: guard";
        reports.push_back(r);
        continue;
      }

      const auto stem = options.work_dir / fmt::format("bench-{}-{}-{}", getpid(), r.method, size);
      const auto run = std::filesystem::path(stem.string() + ".run");
      const BenchReport params = r;
      for (std::size_t rep = 0; rep < std::max<std::size_t>(1, options.repeats); ++rep) {
        BenchReport attempt = params;
        if (!options.executable.empty()) {
          const auto report_path = std::filesystem::path(stem.string() + ".json");
          const auto [code, peak] = run_child(
              count_args(options.executable, method, collection_prefix, size, run, report_path,
                         options));
          if (code == 0) {
            std::ifstream in(report_path);
            attempt = nlohmann::json::parse(in).get<BenchReport>();
            attempt.peak_memory_bytes = peak;
          } else {
            attempt.status = fmt::format("error: exit {}", code);
          }
          std::error_code ec;
          std::filesystem::remove(report_path, ec);
        } else {
          try {
            CounterConfig config;
            config.method = method;
            config.output_path = run;
            config.temp_dir = options.work_dir;
            config.flush_threshold_pairs = options.flush_threshold_pairs;
            config.block_width_k = options.block_width_k;
            config.accumulators_a = options.accumulators_a;
            config.max_doc_terms = options.max_doc_terms;
            config.work_limit = options.work_limit;
            std::optional<InvertedIndex> index;
            if (method == Method::list_pairs || method == Method::list_blocks ||
                method == Method::list_scan) {
              index = build_index(prefix);
            }
            attempt = run_counter(config, {&prefix, index ? &*index : nullptr}).report;
          } catch (const Error& e) {
            attempt.status = fmt::format("error: {}", e.what());
          }
        }
        if (rep == 0 || attempt.status != "ok") {
          r = attempt;
        } else {
          r.wall_time_seconds = std::min(r.wall_time_seconds, attempt.wall_time_seconds);
          if (attempt.peak_memory_bytes) {
            r.peak_memory_bytes =
                std::max(r.peak_memory_bytes.value_or(0), *attempt.peak_memory_bytes);
          }
        }
        if (r.status != "ok") break;
      }
      if (!options.keep_runs) remove_run(run);
      reports.push_back(r);
    }
  }
  return reports;
}

void write_bench_csv(std::span<const BenchReport> reports, std::ostream& out) {
  out << "method,doc_count,wall_time_s,peak_mem_bytes,pairs_emitted,param_flush,"
         "param_block_width,param_accumulators,status\n";
  auto opt = [](const std::optional<std::uint64_t>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  for (const auto& r : reports) {
    const bool ran = r.status == "ok";
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.method, r.doc_count,
                       ran ? fmt::format("{:.6f}", r.wall_time_seconds) : "",
                       ran ? (r.peak_memory_bytes ? std::to_string(*r.peak_memory_bytes)
                                                  : "unavailable")
                           : "",
                       ran ? std::to_string(r.pairs_emitted) : "", opt(r.param_flush),
                       opt(r.param_block_width), opt(r.param_accumulators), status);
  }
}

}  // namespace cooc
