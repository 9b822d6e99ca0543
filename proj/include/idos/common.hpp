// Copyright 2026 The idos Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IDOS_COMMON_HPP
#define IDOS_COMMON_HPP

#include <Eigen/Dense>

#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace idos {

inline constexpr const char* kVersion = "0.1.0";

using Vec = Eigen::VectorXd;
using Cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

// Coordinate quantum used to deduplicate frequencies.  Inputs are
// user-specified decimals and k-fold sums accumulate only a few ulps,
// so an absolute grid of 1e-9 is safe.
inline constexpr double kFreqTol = 1e-9;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Quantized key for hashing d-vectors (d <= 3).
struct VecKey {
  std::array<std::int64_t, 3> q{0, 0, 0};
  int dim = 0;

  bool operator==(const VecKey& o) const { return dim == o.dim && q == o.q; }
  bool operator<(const VecKey& o) const {
    if (dim != o.dim) return dim < o.dim;
    return q < o.q;
  }
};

inline VecKey vec_key(const Vec& v) {
  VecKey k;
  k.dim = static_cast<int>(v.size());
  for (int i = 0; i < k.dim; ++i) {
    double scaled = v[i] / kFreqTol;
    if (!std::isfinite(scaled) || std::abs(scaled) > 9.0e18)
      throw Error("vec_key: coordinate out of range");
    k.q[static_cast<size_t>(i)] = static_cast<std::int64_t>(std::llround(scaled));
  }
  return k;
}

struct VecKeyHash {
  size_t operator()(const VecKey& k) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint64_t x) {
      h ^= x;
      h *= 0x100000001b3ull;
    };
    mix(static_cast<std::uint64_t>(k.dim));
    for (auto v : k.q) mix(static_cast<std::uint64_t>(v));
    return static_cast<size_t>(h);
  }
};

inline bool nearly_equal(const Vec& a, const Vec& b, double tol = kFreqTol) {
  return a.size() == b.size() && (a - b).lpNorm<Eigen::Infinity>() <= tol;
}

// ---------------------------------------------------------------------------
// Counter-based RNG.  Every draw is a pure function of (seed, stream, counter),
// so parallel sampling is reproducible independently of scheduling.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const {
    std::uint64_t x = mix64(seed_ ^ mix64(stream_));
    return mix64(x ^ (counter * 0xda942042e4dd58b5ull));
  }

  // Uniform in [0, 1).
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; consumes counters 2c and 2c+1.
  double normal(std::uint64_t counter) const {
    double u1 = uniform(2 * counter);
    double u2 = uniform(2 * counter + 1);
    u1 = std::max(u1, 0x1.0p-60);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  // Uniform direction on the unit sphere in R^dim; consumes a counter block.
  Vec direction(std::uint64_t counter, int dim) const {
    Vec v(dim);
    while (true) {
      for (int i = 0; i < dim; ++i) v[i] = normal(counter * 8 + static_cast<std::uint64_t>(i));
      double n = v.norm();
      if (n > 1e-12) return v / n;
      counter += 1000003;  // essentially unreachable
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

// ---------------------------------------------------------------------------
// Chunked parallel execution.  Work is split into a fixed number of chunks;
// per-chunk results are combined in chunk order, so the result does not
// depend on the worker count.

inline unsigned default_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

template <class Fn>
void parallel_chunks(int n_chunks, unsigned workers, Fn&& fn) {
  if (workers <= 1 || n_chunks <= 1) {
    for (int c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  auto run = [&] {
    while (true) {
      int c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        fn(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(n_chunks));
  pool.reserve(n);
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

// Fixed-order pairwise summation; reproducible and accurate.
inline double pairwise_sum(const std::vector<double>& xs, size_t lo, size_t hi) {
  if (hi - lo == 0) return 0.0;
  if (hi - lo == 1) return xs[lo];
  size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(xs, lo, mid) + pairwise_sum(xs, mid, hi);
}

inline double pairwise_sum(const std::vector<double>& xs) {
  return pairwise_sum(xs, 0, xs.size());
}

// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(M_PI, 0.5 * d) / std::tgamma(1.0 + 0.5 * d);
}

inline double two_pi_pow(int d) { return std::pow(2.0 * M_PI, d); }

}  // namespace idos

#endif  // IDOS_COMMON_HPP
