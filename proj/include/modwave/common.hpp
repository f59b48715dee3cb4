#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace modwave {

inline constexpr const char* version_string = "0.1.0";

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

using Complex = std::complex<double>;

/// Invalid input or a request outside the model's domain of validity
/// (sonic crossing, non-physical spec, dimension mismatch). CLI exit code 4.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: non-convergent iteration, eigensolver breakdown,
/// instability overflow. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Worker count for grid sweeps: hardware concurrency, capped by the
/// MODWAVE_THREADS environment variable when set.
inline unsigned worker_count() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("MODWAVE_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
  }
  return n;
}

/// Runs fn(i) for i in [0, count). Work items must be independent; each
/// writes only its own output slot, so results are order-deterministic.
/// Exceptions from workers are captured and the first one rethrown.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  unsigned workers = worker_count();
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  workers = std::min<std::size_t>(workers, count);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Fold an angle-like quantity into [-pi, pi).
inline double fold_to_pi(double x) {
  double y = x - two_pi * std::floor((x + pi) / two_pi);
  if (y >= pi) y -= two_pi;  // guards the floor roundoff edge
  return y;
}

}  // namespace modwave
