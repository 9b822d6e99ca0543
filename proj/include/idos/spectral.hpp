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
// Finite cluster operators and their spectra.  A cluster spans the
// exponentials of its points; the gauged operator restricted to it is the
// Hermitian matrix |eta|^2 delta + w^(eta' - eta, eta).  The g-map sends a
// point to the eigenvalue whose rank matches the point's rank in the cluster
// ordering (ascending |eta|, lexicographic ties).
//
// Two independent routes to sum powers of the radii where eigenvalues cross
// rho^2: per-branch root solves, and a contour integral of the logarithmic
// derivative of det(S(z) + z^2 - rho^2).

#ifndef IDOS_SPECTRAL_HPP
#define IDOS_SPECTRAL_HPP

#include <algorithm>
#include <functional>
#include <vector>

#include "idos/geometry.hpp"
#include "idos/symbol.hpp"

namespace idos {

// Cluster ordering: ascending |eta|, ties by lexicographic coordinates.
inline bool cluster_point_less(const Vec& a, const Vec& b) {
  double na = a.norm(), nb = b.norm();
  if (std::abs(na - nb) > 1e-12 * std::max(1.0, std::max(na, nb))) return na < nb;
  for (int i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12 * std::max(1.0, std::abs(a[i]))) return a[i] < b[i];
  }
  return false;
}

struct ClusterOperator {
  std::vector<Vec> points;  // sorted
  MatrixXcd matrix;
  int seed_rank = -1;       // position of the cluster seed in `points`
};

inline ClusterOperator assemble(const Symbol& w, const Cluster& cl,
                                double herm_tol = 1e-8) {
  ClusterOperator op;
  op.points = cl.points;
  std::sort(op.points.begin(), op.points.end(), cluster_point_less);
  Eigen::Index n = static_cast<Eigen::Index>(op.points.size());
  op.matrix = MatrixXcd::Zero(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    const Vec& eta = op.points[static_cast<size_t>(col)];
    for (Eigen::Index row = 0; row < n; ++row) {
      const Vec& etap = op.points[static_cast<size_t>(row)];
      Cplx v = row == col ? Cplx(eta.squaredNorm(), 0) : Cplx(0, 0);
      v += w.eval(Vec(etap - eta), eta);
      op.matrix(row, col) = v;
    }
  }
  double herm = (op.matrix - op.matrix.adjoint()).cwiseAbs().maxCoeff();
  if (herm > herm_tol * std::max(1.0, op.matrix.norm()))
    throw Error("assemble: cluster matrix is not Hermitian (symbol symmetry broken)");
  for (Eigen::Index i = 0; i < n; ++i) {
    VecKey sk = vec_key(cl.seed);
    if (vec_key(op.points[static_cast<size_t>(i)]) == sk) op.seed_rank = static_cast<int>(i);
  }
  if (op.seed_rank < 0) throw Error("assemble: seed not among cluster points");
  return op;
}

// g(xi): the t(xi)-th ascending eigenvalue of the cluster operator.
inline double g_map(const Symbol& w, const Vec& xi, const SubspaceTable& table,
                    size_t cluster_cap = 10000) {
  Cluster cl = cluster(xi, table, cluster_cap, /*verify=*/false);
  if (cl.points.size() == 1) {
    // singleton: pure diagonal value, no eigensolve
    return xi.squaredNorm() + w.eval(Vec::Zero(xi.size()), xi).real();
  }
  ClusterOperator op = assemble(w, cl);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(op.matrix, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[op.seed_rank];
}

// ---------------------------------------------------------------------------
// Residue sums.  The family supplies S(z) analytic near the real interval
// of interest and must be Hermitian for real z.

struct MatrixFamily {
  int n = 0;
  std::function<MatrixXcd(Cplx)> s;       // S(z)
  std::function<MatrixXcd(Cplx)> sprime;  // S'(z)
};

// Sum of tau_j^{K+1} over the branch crossings lambda_j(r^2 I + S(r)) = rho^2,
// solved per eigenbranch on [rho/2, 2 rho].  Requires each sorted branch to be
// increasing on the bracket.
inline double residue_sum_direct(const MatrixFamily& fam, double rho, int big_k,
                                 double tol = 1e-13) {
  auto eigs = [&](double r) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(
        fam.s(Cplx(r, 0)) + MatrixXcd::Identity(fam.n, fam.n) * (r * r),
        Eigen::EigenvaluesOnly);
    return Vec(es.eigenvalues());
  };
  double lo = 0.5 * rho, hi = 2.0 * rho;
  // monotonicity scan of the sorted branches
  const int scan = 17;
  Vec prev = eigs(lo);
  for (int t = 1; t < scan; ++t) {
    double r = lo + (hi - lo) * t / (scan - 1);
    Vec cur = eigs(r);
    for (int j = 0; j < fam.n; ++j)
      if (cur[j] <= prev[j])
        throw Error("residue_sum_direct: eigenbranch not increasing on the bracket");
    prev = cur;
  }
  double target = rho * rho;
  Vec at_lo = eigs(lo), at_hi = eigs(hi);
  double sum = 0;
  for (int j = 0; j < fam.n; ++j) {
    if (at_lo[j] > target || at_hi[j] < target)
      throw Error("residue_sum_direct: branch does not cross rho^2 inside the bracket");
    double a = lo, b = hi;
    while (b - a > tol * rho) {
      double mid = 0.5 * (a + b);
      if (eigs(mid)[j] < target)
        a = mid;
      else
        b = mid;
    }
    sum += std::pow(0.5 * (a + b), big_k + 1);
  }
  return sum;
}

struct ContourResult {
  double power_sum = 0;   // sum tau_j^{K+1}
  double zero_count = 0;  // argument-principle count; must be an integer
  int nodes = 0;
};

// Trapezoid rule on the circle |z - rho| = radius, doubling the node count
// until two successive results agree.
inline ContourResult residue_sum_contour(const MatrixFamily& fam, double rho, int big_k,
                                         double radius = -1.0, double tol = 1e-9,
                                         int max_nodes = 1 << 16) {
  if (radius <= 0) radius = rho / 8.0;
  auto integrand = [&](Cplx z, Cplx* count_term) {
    MatrixXcd f = fam.s(z) + MatrixXcd::Identity(fam.n, fam.n) * (z * z - rho * rho);
    Eigen::PartialPivLU<MatrixXcd> lu(f);
    double rcond_proxy = f.cwiseAbs().maxCoeff();
    MatrixXcd num = MatrixXcd::Identity(fam.n, fam.n) * (2.0 * z) + fam.sprime(z);
    MatrixXcd sol = lu.solve(num);
    // residual check guards against a contour running through a zero
    double resid = (f * sol - num).cwiseAbs().maxCoeff();
    if (!(resid < 1e-6 * std::max(1.0, rcond_proxy)))
      throw Error("residue_sum_contour: near-singular point on the contour; perturb it");
    Cplx tr = sol.trace();
    *count_term = tr;
    return std::pow(z, big_k + 1) * tr;
  };
  int n = 512;
  Cplx prev_val(0, 0), prev_cnt(0, 0);
  bool have_prev = false;
  while (n <= max_nodes) {
    Cplx acc(0, 0), acc_cnt(0, 0);
    for (int t = 0; t < n; ++t) {
      double ang = 2.0 * M_PI * t / n;
      Cplx off = radius * Cplx(std::cos(ang), std::sin(ang));
      Cplx z = rho + off;
      Cplx cnt;
      Cplx val = integrand(z, &cnt);
      acc += val * off;
      acc_cnt += cnt * off;
    }
    acc /= static_cast<double>(n);
    acc_cnt /= static_cast<double>(n);
    if (have_prev && std::abs(acc - prev_val) <= tol * std::max(1.0, std::abs(acc)) &&
        std::abs(acc_cnt - prev_cnt) <= tol * std::max(1.0, std::abs(acc_cnt))) {
      ContourResult out;
      out.power_sum = acc.real();
      out.zero_count = acc_cnt.real();
      out.nodes = n;
      double nearest = std::round(out.zero_count);
      if (std::abs(out.zero_count - nearest) > 1e-6)
        throw Error("residue_sum_contour: zero count is not an integer");
      return out;
    }
    prev_val = acc;
    prev_cnt = acc_cnt;
    have_prev = true;
    n *= 2;
  }
  throw Error("residue_sum_contour: trapezoid rule failed to converge");
}

}  // namespace idos

#endif  // IDOS_SPECTRAL_HPP
