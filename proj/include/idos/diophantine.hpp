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
// Scalar quality measures of the k-tilde-fold frequency set: the extreme
// frequency norms, the smallest sine of an angle between strongly distinct
// quasi-lattice subspaces, and the smallest covolume of the lattice a proper
// subspace induces.

#ifndef IDOS_DIOPHANTINE_HPP
#define IDOS_DIOPHANTINE_HPP

#include <numeric>
#include <vector>

#include "idos/geometry.hpp"

namespace idos {

struct DiophantineQuantities {
  double r = 0;             // min |theta| over nonzero theta-tilde
  double big_r = 0;         // max |theta|
  double s = 1.0;           // min sine of angle between strongly distinct subspaces
  double min_covolume = 0;  // min over proper subspaces of vol(V / Z(theta cap V))
};

namespace detail {

// Continued-fraction rationalization p/q with q <= qmax.
inline bool rationalize(double x, long qmax, long* p, long* q, double tol = 1e-9) {
  long p0 = 1, q0 = 0, p1 = static_cast<long>(std::floor(x)), q1 = 1;
  double frac = x - std::floor(x);
  for (int it = 0; it < 64; ++it) {
    if (std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) < tol) {
      *p = p1;
      *q = q1;
      return true;
    }
    if (frac < 1e-15) break;
    double inv = 1.0 / frac;
    long a = static_cast<long>(std::floor(inv));
    frac = inv - std::floor(inv);
    long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > qmax || q2 <= 0) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  if (std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) < tol && q1 <= qmax) {
    *p = p1;
    *q = q1;
    return true;
  }
  return false;
}

// |det| of the Hermite-style triangularization of an integer row lattice.
// Rows generate the lattice; returns the covolume in lattice units.
inline double integer_lattice_det(std::vector<std::vector<long long>> rows, int m) {
  double det = 1.0;
  int row_count = static_cast<int>(rows.size());
  int r = 0;
  for (int col = 0; col < m && r < row_count; ++col) {
    // gcd-reduce the column below r via Euclidean row operations
    while (true) {
      int piv = -1;
      long long best = 0;
      for (int i = r; i < row_count; ++i) {
        long long v = rows[static_cast<size_t>(i)][static_cast<size_t>(col)];
        if (v != 0 && (piv < 0 || std::llabs(v) < std::llabs(best))) {
          piv = i;
          best = v;
        }
      }
      if (piv < 0) break;
      std::swap(rows[static_cast<size_t>(r)], rows[static_cast<size_t>(piv)]);
      bool clean = true;
      for (int i = r + 1; i < row_count; ++i) {
        long long v = rows[static_cast<size_t>(i)][static_cast<size_t>(col)];
        if (v == 0) continue;
        long long f = v / rows[static_cast<size_t>(r)][static_cast<size_t>(col)];
        for (int j = col; j < m; ++j)
          rows[static_cast<size_t>(i)][static_cast<size_t>(j)] -=
              f * rows[static_cast<size_t>(r)][static_cast<size_t>(j)];
        if (rows[static_cast<size_t>(i)][static_cast<size_t>(col)] != 0) clean = false;
      }
      if (clean) break;
    }
    if (rows[static_cast<size_t>(r)][static_cast<size_t>(col)] == 0) continue;
    det *= static_cast<double>(std::llabs(rows[static_cast<size_t>(r)][static_cast<size_t>(col)]));
    ++r;
  }
  if (r < m) return 0.0;  // rows do not span
  return det;
}

}  // namespace detail

// Covolume of Z(S) inside the m-dimensional space it spans, where S is the
// finite set of frequencies lying in a subspace.  Throws when a coordinate
// fails bounded rationalization, which signals a discreteness violation.
inline double lattice_covolume(const std::vector<Vec>& s_in, int m, long qmax = 10000) {
  std::vector<Vec> s;
  for (const auto& v : s_in)
    if (v.norm() > kFreqTol) s.push_back(v);
  if (static_cast<int>(s.size()) < m) throw Error("lattice_covolume: too few vectors");

  // greedy max-volume basis
  std::vector<int> pick;
  MatrixXd u(s[0].size(), m);
  for (int j = 0; j < m; ++j) {
    int best = -1;
    double best_vol = -1;
    for (int i = 0; i < static_cast<int>(s.size()); ++i) {
      u.col(j) = s[static_cast<size_t>(i)];
      MatrixXd g = u.leftCols(j + 1).transpose() * u.leftCols(j + 1);
      double vol = g.determinant();
      if (vol > best_vol) {
        best_vol = vol;
        best = i;
      }
    }
    if (best < 0 || best_vol <= 1e-18) throw Error("lattice_covolume: degenerate set");
    u.col(j) = s[static_cast<size_t>(best)];
    pick.push_back(best);
  }

  Eigen::FullPivLU<MatrixXd> gram_lu(u.transpose() * u);
  long lcm = 1;
  std::vector<std::vector<double>> coords;
  for (const auto& v : s) {
    Vec c = gram_lu.solve(u.transpose() * v);
    std::vector<double> row;
    for (int j = 0; j < m; ++j) {
      long p = 0, q = 1;
      if (!detail::rationalize(c[j], qmax, &p, &q))
        throw Error("lattice_covolume: non-rational coordinate (discreteness violated)");
      row.push_back(c[j]);
      long g = std::gcd(lcm, q);
      if (lcm / g > 1000000 / q) throw Error("lattice_covolume: denominator blow-up");
      lcm = lcm / g * q;
    }
    coords.push_back(row);
  }

  std::vector<std::vector<long long>> rows;
  for (const auto& c : coords) {
    std::vector<long long> r(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j)
      r[static_cast<size_t>(j)] = std::llround(c[static_cast<size_t>(j)] * static_cast<double>(lcm));
    rows.push_back(std::move(r));
  }
  double det = detail::integer_lattice_det(std::move(rows), m);
  if (det == 0.0) throw Error("lattice_covolume: rows do not span");
  double base = std::sqrt(std::max(0.0, (u.transpose() * u).determinant()));
  return base * det / std::pow(static_cast<double>(lcm), m);
}

inline DiophantineQuantities diophantine_quantities(const SubspaceTable& table) {
  DiophantineQuantities out;
  const FrequencySet& theta = table.theta();
  out.r = theta.min_norm_nonzero();
  out.big_r = theta.max_norm();
  out.s = table.min_pair_sine();
  out.min_covolume = std::numeric_limits<double>::infinity();
  int d = table.dim();
  // Proper subspaces always count; the full space only when Z(theta-tilde)
  // is an actual lattice (periodic case), otherwise it is skipped.
  for (int m = 1; m <= d; ++m) {
    for (int idx : table.by_dim(m)) {
      const Subspace& sub = table.at(idx);
      std::vector<Vec> in_v;
      for (const auto& th : theta.nonzero()) {
        Vec res = th - sub.project(th);
        if (res.norm() <= 1e-9 * std::max(1.0, th.norm())) in_v.push_back(th);
      }
      if (static_cast<int>(in_v.size()) < m) continue;
      if (m == d) {
        try {
          out.min_covolume = std::min(out.min_covolume, lattice_covolume(in_v, m));
        } catch (const Error&) {
          // non-discrete full span; fine for quasi-periodic sets
        }
      } else {
        out.min_covolume = std::min(out.min_covolume, lattice_covolume(in_v, m));
      }
    }
  }
  if (!std::isfinite(out.min_covolume)) out.min_covolume = 0.0;
  return out;
}

// Convenience: builds the table for Theta_k-tilde and evaluates.
inline DiophantineQuantities diophantine_quantities(const FrequencySet& theta,
                                                    const ScaleParameters& p,
                                                    size_t sum_cap = 20000) {
  SubspaceTable table(theta_sum(theta, p.k_tilde, sum_cap), p);
  return diophantine_quantities(table);
}

}  // namespace idos

#endif  // IDOS_DIOPHANTINE_HPP
