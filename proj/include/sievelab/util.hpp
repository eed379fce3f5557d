#pragma once

#include <atomic>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sievelab {

struct GeometryError : std::runtime_error {
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};
struct MeshError : std::runtime_error {
  explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};
struct SolveError : std::runtime_error {
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline std::string strfmt(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  char buf[1024];
  vsnprintf(buf, sizeof(buf), fmt, ap);
  va_end(ap);
  return std::string(buf);
}

// 17 significant digits: shortest decimal that round-trips a double exactly.
inline std::string fmt_g17(double v) { return strfmt("%.17g", v); }

// Runs fn(i) for i in [0,n). Each task writes only its own slot of any shared
// output, so results do not depend on the schedule.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  if (jobs == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace sievelab
