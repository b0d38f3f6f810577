#include "cooc/report.hpp"

#include <sys/resource.h>
#include <sys/utsname.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace cooc {

namespace {

template <class T>
void put_optional(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
void get_optional(const nlohmann::json& j, const char* key, std::optional<T>& v) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) {
    v = it->get<T>();
  } else {
    v.reset();
  }
}

}  // namespace

void to_json(nlohmann::json& j, const BenchReport& r) {
  j = nlohmann::json{{"method", r.method},
                     {"doc_count", r.doc_count},
                     {"wall_time_s", r.wall_time_seconds},
                     {"pairs_emitted", r.pairs_emitted},
                     {"flushes", r.flushes},
                     {"blocks", r.blocks},
                     {"block_pairings", r.block_pairings},
                     {"passes", r.passes},
                     {"output_bytes", r.output_bytes},
                     {"status", r.status},
                     {"timestamp", r.timestamp},
                     {"host", r.host}};
  put_optional(j, "peak_mem_bytes", r.peak_memory_bytes);
  put_optional(j, "param_flush", r.param_flush);
  put_optional(j, "param_block_width", r.param_block_width);
  put_optional(j, "param_accumulators", r.param_accumulators);
  put_optional(j, "param_max_doc_terms", r.param_max_doc_terms);
}

void from_json(const nlohmann::json& j, BenchReport& r) {
  j.at("method").get_to(r.method);
  j.at("doc_count").get_to(r.doc_count);
  j.at("wall_time_s").get_to(r.wall_time_seconds);
  j.at("pairs_emitted").get_to(r.pairs_emitted);
  r.flushes = j.value("flushes", std::uint64_t{0});
  r.blocks = j.value("blocks", std::uint64_t{0});
  r.block_pairings = j.value("block_pairings", std::uint64_t{0});
  r.passes = j.value("passes", std::uint64_t{0});
  r.output_bytes = j.value("output_bytes", std::uint64_t{0});
  r.status = j.value("status", std::string("ok"));
  r.timestamp = j.value("timestamp", std::string());
  r.host = j.value("host", std::string());
  get_optional(j, "peak_mem_bytes", r.peak_memory_bytes);
  get_optional(j, "param_flush", r.param_flush);
  get_optional(j, "param_block_width", r.param_block_width);
  get_optional(j, "param_accumulators", r.param_accumulators);
  get_optional(j, "param_max_doc_terms", r.param_max_doc_terms);
}

std::optional<std::uint64_t> peak_memory_probe() {
  // VmHWM is the kernel's own resident high-water mark, so no sampling is needed.
  std::ifstream status("/proc/self/status");
  std::string line;
  while (std::getline(status, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream fields(line.substr(6));
      std::uint64_t kib = 0;
      if (fields >> kib) return kib * 1024;
    }
  }
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) == 0 && usage.ru_maxrss > 0) {
    return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;
  }
  return std::nullopt;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string host_descriptor() {
  utsname u{};
  if (uname(&u) != 0) return "unknown";
  return fmt::format("{} {} {}", u.sysname, u.release, u.machine);
}

}  // namespace cooc
