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
// Periodic reference pipeline: plane-wave fibre matrices over the dual
// lattice, eigenvalue counting, and the integrated density of states as a
// cell average of the counting function.
//
// The cell average uses a tensor midpoint rule with local refinement where
// the integer-valued counting field jumps.  The overall constant is
// calibrated against the free counting field evaluated on the same nodes,
// which reproduces the free density of states exactly and cancels the
// lattice-convention factors.

#ifndef IDOS_FLOQUET_HPP
#define IDOS_FLOQUET_HPP

#include <atomic>
#include <optional>
#include <vector>

#include "idos/potential.hpp"

namespace idos {

struct DualLattice {
  MatrixXd basis;  // columns generate the dual lattice

  int dim() const { return static_cast<int>(basis.rows()); }
  double det() const { return std::abs(basis.determinant()); }
};

inline std::optional<Eigen::VectorXi> lattice_coords(const Vec& theta,
                                                     const DualLattice& lat,
                                                     double tol = 1e-9) {
  Vec c = lat.basis.fullPivLu().solve(theta);
  Eigen::VectorXi n(c.size());
  for (int i = 0; i < c.size(); ++i) {
    double r = std::round(c[i]);
    if (std::abs(c[i] - r) > tol) return std::nullopt;
    n[i] = static_cast<int>(r);
  }
  return n;
}

inline void require_lattice_potential(const Potential& b, const DualLattice& lat) {
  for (const auto& th : b.freqs().elements()) {
    if (b.coeff(th) == Cplx(0, 0)) continue;
    if (!lattice_coords(th, lat))
      throw Error("floquet: potential frequency is not on the declared lattice");
  }
}

// Plane-wave set {k + gamma : |k + gamma| <= cutoff}.
inline std::vector<Vec> plane_waves(const DualLattice& lat, const Vec& k, double cutoff) {
  int d = lat.dim();
  double bmin = 1.0 / lat.basis.inverse().cwiseAbs().rowwise().sum().maxCoeff();
  int bound = static_cast<int>(std::ceil((cutoff + k.norm()) / bmin)) + 1;
  std::vector<Vec> out;
  std::vector<int> cur(static_cast<size_t>(d), -bound);
  while (true) {
    Vec n(d);
    for (int i = 0; i < d; ++i) n[i] = cur[static_cast<size_t>(i)];
    Vec p = k + lat.basis * n;
    if (p.norm() <= cutoff) out.push_back(p);
    int i = d - 1;
    while (i >= 0 && cur[static_cast<size_t>(i)] == bound) {
      cur[static_cast<size_t>(i)] = -bound;
      --i;
    }
    if (i < 0) break;
    ++cur[static_cast<size_t>(i)];
  }
  return out;
}

// All fibre eigenvalues at quasi-momentum k, ascending.
inline Vec floquet_spectrum(const Potential& b, const DualLattice& lat, const Vec& k,
                            double cutoff) {
  require_lattice_potential(b, lat);
  auto pw = plane_waves(lat, k, cutoff);
  Eigen::Index n = static_cast<Eigen::Index>(pw.size());
  if (n == 0) throw Error("floquet_spectrum: empty plane-wave set; raise the cutoff");

  bool diagonal_only = true;
  bool all_real = true;
  for (const auto& th : b.freqs().elements()) {
    Cplx a = b.coeff(th);
    if (a == Cplx(0, 0)) continue;
    if (th.norm() > kFreqTol) diagonal_only = false;
    if (a.imag() != 0.0) all_real = false;
  }
  double a0 = b.coeff(Vec::Zero(b.dim())).real();

  if (diagonal_only) {
    Vec ev(n);
    for (Eigen::Index i = 0; i < n; ++i) ev[i] = pw[static_cast<size_t>(i)].squaredNorm() + a0;
    std::sort(ev.data(), ev.data() + n);
    return ev;
  }

  if (all_real) {
    MatrixXd h = MatrixXd::Zero(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
      h(col, col) = pw[static_cast<size_t>(col)].squaredNorm();
      for (Eigen::Index row = 0; row < n; ++row) {
        Cplx a = b.coeff(Vec(pw[static_cast<size_t>(row)] - pw[static_cast<size_t>(col)]));
        if (a != Cplx(0, 0)) h(row, col) += a.real();
      }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }

  MatrixXcd h = MatrixXcd::Zero(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    h(col, col) = pw[static_cast<size_t>(col)].squaredNorm();
    for (Eigen::Index row = 0; row < n; ++row) {
      Cplx a = b.coeff(Vec(pw[static_cast<size_t>(row)] - pw[static_cast<size_t>(col)]));
      if (a != Cplx(0, 0)) h(row, col) += a;
    }
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline int count_leq(const Vec& sorted_ev, double lambda) {
  return static_cast<int>(std::upper_bound(sorted_ev.data(), sorted_ev.data() + sorted_ev.size(),
                                           lambda) -
                          sorted_ev.data());
}

inline int floquet_count(const Potential& b, const DualLattice& lat, const Vec& k,
                         double lambda, double cutoff) {
  if (cutoff * cutoff <= lambda)
    throw Error("floquet_count: cutoff must exceed sqrt(lambda) plus a margin");
  return count_leq(floquet_spectrum(b, lat, k, cutoff), lambda);
}

// Free counting field #{gamma : |k+gamma|^2 <= lambda}; no matrix involved.
inline int free_count(const DualLattice& lat, const Vec& k, double lambda) {
  int c = 0;
  for (const auto& p : plane_waves(lat, k, std::sqrt(lambda)))
    if (p.squaredNorm() <= lambda) ++c;
  return c;
}

// ---------------------------------------------------------------------------

struct DOSPoint {
  double lambda = 0;
  double value = 0;
  double stderr_ = 0;
};

struct BZQuadratureOptions {
  int base_cells = 32;       // per axis at level 0
  int max_level = 12;        // extra halvings on cells near a band edge
  double cutoff = -1;        // plane-wave radius; default from lambda_max
  unsigned workers = 0;      // 0: hardware
  std::uint64_t eval_cap = 400000;
};

// N(lambda) at each requested lambda, with a bound on the quadrature error.
//
// Midpoint rule over the dual cell.  On a cell of k-radius r the fibre
// matrix moves by at most 2 cutoff r + r^2 in norm, so only midpoint
// eigenvalues within that window of lambda can cross it inside the cell;
// their number bounds the count variation and hence the cell error.  Cells
// with a nonzero bound are halved until the bound vanishes or the depth or
// evaluation budget runs out; the leftover bound is reported as stderr.
// The result is calibrated against the free counting field on the same
// nodes, so the free potential returns exactly C_d lambda^{d/2}.
inline std::vector<DOSPoint> periodic_dos(const Potential& b, const DualLattice& lat,
                                          const std::vector<double>& lambdas,
                                          BZQuadratureOptions opts = {}) {
  require_lattice_potential(b, lat);
  for (size_t i = 1; i < lambdas.size(); ++i)
    if (lambdas[i] <= lambdas[i - 1]) throw Error("periodic_dos: lambdas must increase");
  int d = lat.dim();
  double lmax = lambdas.back();
  double cutoff = opts.cutoff > 0
                      ? opts.cutoff
                      : std::sqrt(lmax) + 3.0 + b.freqs().max_norm();
  if (cutoff * cutoff <= lmax) throw Error("periodic_dos: cutoff too small");
  unsigned workers = opts.workers ? opts.workers : default_workers();
  size_t nl = lambdas.size();
  double bnorm = lat.basis.operatorNorm();
  bool is_free = true;
  for (const auto& th : b.freqs().elements())
    if (b.coeff(th) != Cplx(0, 0)) is_free = false;
  if (is_free) {
    // the calibrated estimator returns the free value for every grid
    std::vector<DOSPoint> points;
    double cd0 = unit_ball_volume(d) / two_pi_pow(d);
    for (double l : lambdas) points.push_back({l, cd0 * std::pow(l, 0.5 * d), 0.0});
    return points;
  }

  struct CellOut {
    std::vector<double> qb, q0, err;
    std::uint64_t evals = 0;
  };

  std::atomic<std::uint64_t> eval_budget{opts.eval_cap};

  struct EvalData {
    Vec ev;        // fibre eigenvalues, ascending
    Vec free_ev;   // free fibre values |k+gamma|^2, ascending
  };

  auto eval_at = [&](const Vec& u) {
    EvalData ed;
    Vec k = lat.basis * (u.array() - 0.5).matrix();
    ed.ev = floquet_spectrum(b, lat, k, cutoff);
    auto pw = plane_waves(lat, k, cutoff);
    ed.free_ev.resize(static_cast<Eigen::Index>(pw.size()));
    for (size_t i = 0; i < pw.size(); ++i)
      ed.free_ev[static_cast<Eigen::Index>(i)] = pw[i].squaredNorm();
    std::sort(ed.free_ev.data(), ed.free_ev.data() + ed.free_ev.size());
    return ed;
  };

  // number of values within `window` of lambda: bound on the crossing count
  auto nearby = [](const Vec& sorted, double lambda, double window) {
    return static_cast<int>(
        (std::upper_bound(sorted.data(), sorted.data() + sorted.size(), lambda + window) -
         std::lower_bound(sorted.data(), sorted.data() + sorted.size(), lambda - window)));
  };

  std::function<void(const Vec&, double, int, const EvalData&, CellOut&)> refine =
      [&](const Vec& center, double half, int level, const EvalData& ed, CellOut& out) {
        double vol = std::pow(2.0 * half, d);
        double rk = bnorm * half * std::sqrt(static_cast<double>(d));
        double window = 2.0 * cutoff * rk + rk * rk;
        int worst = 0;
        std::vector<int> nb_b(nl), nb_0(nl);
        for (size_t t = 0; t < nl; ++t) {
          nb_b[t] = nearby(ed.ev, lambdas[t], window);
          nb_0[t] = nearby(ed.free_ev, lambdas[t], window);
          worst = std::max(worst, nb_b[t] + nb_0[t]);
        }
        bool can_descend = worst > 0 && level < opts.max_level;
        if (can_descend) {
          std::uint64_t need = 1ull << d;
          std::uint64_t cur = eval_budget.load();
          while (cur >= need && !eval_budget.compare_exchange_weak(cur, cur - need)) {
          }
          if (cur < need) can_descend = false;
        }
        if (!can_descend) {
          for (size_t t = 0; t < nl; ++t) {
            out.qb[t] += vol * count_leq(ed.ev, lambdas[t]);
            out.q0[t] += vol * count_leq(ed.free_ev, lambdas[t]);
            out.err[t] += vol * (nb_b[t] + nb_0[t]);
          }
          return;
        }
        int nchild = 1 << d;
        for (int c = 0; c < nchild; ++c) {
          Vec ctr = center;
          for (int i = 0; i < d; ++i) ctr[i] += ((c >> i) & 1 ? 0.5 : -0.5) * half;
          EvalData child = eval_at(ctr);
          ++out.evals;
          refine(ctr, 0.5 * half, level + 1, child, out);
        }
      };

  int nb = opts.base_cells;
  int total_base = 1;
  for (int i = 0; i < d; ++i) total_base *= nb;
  std::vector<CellOut> results(static_cast<size_t>(total_base));

  parallel_chunks(total_base, workers, [&](int cell) {
    CellOut out;
    out.qb.assign(nl, 0.0);
    out.q0.assign(nl, 0.0);
    out.err.assign(nl, 0.0);
    Vec center(d);
    int rest = cell;
    for (int i = 0; i < d; ++i) {
      int ci = rest % nb;
      rest /= nb;
      center[i] = (ci + 0.5) / nb;
    }
    EvalData ed = eval_at(center);
    ++out.evals;
    refine(center, 0.5 / nb, 0, ed, out);
    results[static_cast<size_t>(cell)] = std::move(out);
  });

  std::vector<DOSPoint> points(nl);
  double cd = unit_ball_volume(d) / two_pi_pow(d);
  for (size_t t = 0; t < nl; ++t) {
    std::vector<double> qb, q0, er;
    for (const auto& r : results) {
      qb.push_back(r.qb[t]);
      q0.push_back(r.q0[t]);
      er.push_back(r.err[t]);
    }
    double total_b = pairwise_sum(qb);
    double total_0 = pairwise_sum(q0);
    double total_er = pairwise_sum(er);
    double free_exact = cd * std::pow(lambdas[t], 0.5 * d);
    if (total_0 <= 0) throw Error("periodic_dos: empty free count; lambda too small");
    DOSPoint pt;
    pt.lambda = lambdas[t];
    pt.value = free_exact * total_b / total_0;
    pt.stderr_ = free_exact * (total_er / total_0 +
                               total_b * total_er / (total_0 * total_0));
    if (is_free) {
      // the calibrated estimator is grid-independent here
      if (total_b != total_0) throw Error("periodic_dos: free counts disagree");
      pt.value = free_exact;
      pt.stderr_ = 0.0;
    }
    points[t] = pt;
  }
  return points;
}

}  // namespace idos

#endif  // IDOS_FLOQUET_HPP
