#ifndef MSGFEM_CORE_HPP
#define MSGFEM_CORE_HPP

#include <chrono>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace msgfem {

using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Invalid user-facing input (bad config, malformed file, inconsistent sizes).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (singular factorization, incompatible data, residual blowup).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ConfigError(what);
}

inline void require_numeric(bool cond, const std::string& what) {
  if (!cond) throw NumericalError(what);
}

/// Wall-clock stopwatch for the per-phase timings reported in result rows.
class Stopwatch {
 public:
  Stopwatch() : start_(clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_;
};

/// Runs fn(i) for i in [0, count) on up to hardware_concurrency threads.
/// Each index writes only its own output slot, so results are deterministic
/// regardless of scheduling.
inline void parallel_for(int count, const std::function<void(int)>& fn) {
  int n_threads = static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  n_threads = std::min(n_threads, count);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&, t]() {
      for (int i = t; i < count; i += n_threads) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace msgfem

#endif  // MSGFEM_CORE_HPP
