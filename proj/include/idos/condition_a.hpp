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
//
// Discreteness check for integer spans of frequency tuples: every linearly
// dependent d-tuple must admit a nonzero integer relation.  The search is
// bounded, so a failure is reported one-sided as LIKELY-VIOLATED.

#ifndef IDOS_CONDITION_A_HPP
#define IDOS_CONDITION_A_HPP

#include <optional>
#include <string>
#include <vector>

#include "idos/potential.hpp"

namespace idos {

enum class ConditionAVerdict { kPass, kLikelyViolated, kIncomplete };

struct ConditionAReport {
  ConditionAVerdict verdict = ConditionAVerdict::kPass;
  std::uint64_t tuples_checked = 0;
  std::uint64_t dependent_tuples = 0;
  int relation_bound = 0;
  std::vector<Vec> violating_tuple;  // set when LIKELY-VIOLATED
  std::string note;
};

namespace detail {

// Tries to scale a real null vector into integers bounded by n_max.
inline std::optional<std::vector<long>> rationalize_null(const Vec& v, int n_max,
                                                         double tol) {
  int jmax = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[jmax])) jmax = i;
  if (std::abs(v[jmax]) < 1e-14) return std::nullopt;
  for (int q = 1; q <= n_max; ++q) {
    double scale = q / v[jmax];
    std::vector<long> n(static_cast<size_t>(v.size()));
    bool ok = true, nonzero = false;
    for (int i = 0; i < v.size(); ++i) {
      double x = v[i] * scale;
      long r = std::lround(x);
      if (std::abs(x - r) > tol || std::abs(r) > n_max) {
        ok = false;
        break;
      }
      n[static_cast<size_t>(i)] = r;
      nonzero = nonzero || r != 0;
    }
    if (ok && nonzero) return n;
  }
  return std::nullopt;
}

// Searches a minimal dependent subset (circuit) of the tuple and tries to
// rationalize its one-dimensional null space.  A circuit always has a
// nullity-one relation supported exactly on it.
inline bool has_integer_relation(const std::vector<Vec>& tuple, int n_max,
                                 double rank_tol = 1e-9) {
  int d = static_cast<int>(tuple[0].size());
  int m = static_cast<int>(tuple.size());
  for (int size = 1; size <= m; ++size) {
    std::vector<int> idx(static_cast<size_t>(size));
    std::function<bool(int, int)> rec = [&](int start, int depth) -> bool {
      if (depth == size) {
        MatrixXd a(d, size);
        for (int i = 0; i < size; ++i) a.col(i) = tuple[static_cast<size_t>(idx[static_cast<size_t>(i)])];
        Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullV);
        double smin = svd.singularValues()[std::min<Eigen::Index>(d, size) - 1];
        int rank = 0;
        double smax = svd.singularValues()[0];
        for (int i = 0; i < svd.singularValues().size(); ++i)
          if (svd.singularValues()[i] > rank_tol * std::max(1.0, smax)) ++rank;
        if (size <= d && rank == size) return false;  // independent subset
        (void)smin;
        Vec null = svd.matrixV().col(size - 1);
        auto rel = rationalize_null(null, n_max, 1e-6);
        if (!rel) return false;
        // Verify the relation numerically.
        Vec s = Vec::Zero(d);
        for (int i = 0; i < size; ++i)
          s += static_cast<double>((*rel)[static_cast<size_t>(i)]) *
               tuple[static_cast<size_t>(idx[static_cast<size_t>(i)])];
        double scale = 0;
        for (int i = 0; i < size; ++i)
          scale = std::max(scale, tuple[static_cast<size_t>(idx[static_cast<size_t>(i)])].norm());
        return s.norm() <= 1e-6 * std::max(1.0, scale) * n_max;
      }
      for (int i = start; i < m; ++i) {
        idx[static_cast<size_t>(depth)] = i;
        if (rec(i + 1, depth + 1)) return true;
      }
      return false;
    };
    if (rec(0, 0)) return true;
  }
  return false;
}

}  // namespace detail

// Scans all d-element combinations (with repetition) of Theta_k.  Tuples with
// repeated or zero entries are trivially satisfied and skipped.
inline ConditionAReport check_condition_a(const FrequencySet& theta, int k,
                                          int n_max = 50,
                                          std::uint64_t tuple_cap = 2000000,
                                          size_t sum_cap = 20000) {
  FrequencySet tk = theta_sum(theta, k, sum_cap);
  auto elems = tk.nonzero();
  int d = tk.dim();
  int m = static_cast<int>(elems.size());

  ConditionAReport rep;
  rep.relation_bound = n_max;

  std::vector<int> idx(static_cast<size_t>(d));
  std::function<bool(int, int)> scan = [&](int start, int depth) -> bool {
    if (rep.tuples_checked >= tuple_cap) {
      rep.verdict = ConditionAVerdict::kIncomplete;
      rep.note = "tuple cap reached at " + std::to_string(tuple_cap);
      return true;
    }
    if (depth == d) {
      ++rep.tuples_checked;
      std::vector<Vec> tuple;
      tuple.reserve(static_cast<size_t>(d));
      for (int i = 0; i < d; ++i) tuple.push_back(elems[static_cast<size_t>(idx[static_cast<size_t>(i)])]);
      MatrixXd a(d, d);
      for (int i = 0; i < d; ++i) a.col(i) = tuple[static_cast<size_t>(i)];
      Eigen::JacobiSVD<MatrixXd> svd(a);
      double smax = svd.singularValues()[0];
      int rank = 0;
      for (int i = 0; i < d; ++i)
        if (svd.singularValues()[i] > 1e-9 * std::max(1.0, smax)) ++rank;
      if (rank < d) {
        ++rep.dependent_tuples;
        if (!detail::has_integer_relation(tuple, n_max)) {
          rep.verdict = ConditionAVerdict::kLikelyViolated;
          rep.violating_tuple = tuple;
          rep.note = "dependent tuple admits no integer relation with |n_j| <= " +
                     std::to_string(n_max);
          return true;
        }
      }
      return false;
    }
    for (int i = start; i < m; ++i) {
      idx[static_cast<size_t>(depth)] = i;
      if (scan(i, depth + 1)) return true;  // combinations with repetition
    }
    return false;
  };
  scan(0, 0);
  return rep;
}

}  // namespace idos

#endif  // IDOS_CONDITION_A_HPP
