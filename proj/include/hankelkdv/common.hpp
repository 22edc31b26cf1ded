#pragma once

#include <atomic>
#include <complex>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hankelkdv {

using cxd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Thrown when a numerical procedure fails to meet its own certificate
// (non-convergence, overflow, spectral radius >= 1, ...). The CLI maps
// this to exit code 1.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration or precondition violation; CLI exit code 2.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Process-wide default worker count, settable from the CLI (--workers).
// 0 means hardware concurrency.
int default_workers();
void set_default_workers(int n);

// Index-parallel loop. Results must be written to preallocated slots so the
// output is independent of scheduling. The first exception wins and is
// rethrown on the calling thread.
template <class F>
void parallel_for(int n, F&& body, int workers = 0) {
  if (n <= 0) return;
  int k = workers > 0 ? workers : default_workers();
  if (k <= 0) k = static_cast<int>(std::thread::hardware_concurrency());
  if (k <= 0) k = 1;
  if (k > n) k = n;
  if (k == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::atomic_flag err_lock = ATOMIC_FLAG_INIT;
  std::vector<std::thread> pool;
  pool.reserve(k);
  for (int w = 0; w < k; ++w) {
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
          body(i);
        } catch (...) {
          while (err_lock.test_and_set(std::memory_order_acquire)) {}
          if (!first_error) first_error = std::current_exception();
          err_lock.clear(std::memory_order_release);
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace hankelkdv
