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
// Gauge transform: solves the commutator equations order by order and
// assembles the conjugated symbol.  With H0 = |xi|^2 and Psi = sum Psi_l,
//
//   e^{i Psi} (H0 + op(b)) e^{-i Psi} = H0 + Y + remainder,
//   Y = sum_l B_l + sum_{l>=2} T_l,
//
// where B_l collects multi-commutators of op(b) with the Psi's of total
// order l-1 and T_l those of H0 of total order l.  Each Psi_l kills the
// non-resonant part of B_l + T_l.  Commutators with H0 are never formed
// against the unbounded |xi|^2 symbol; the recursion substitutes the
// already-known bounded right-hand sides instead.

#ifndef IDOS_GAUGE_HPP
#define IDOS_GAUGE_HPP

#include <unordered_map>
#include <vector>

#include "idos/symbol.hpp"

namespace idos {

// psi with psi^(theta, xi) = i a^(theta, xi) chi~_theta(xi); solves
// ad(H0; Psi) + op(a natural) = 0.  Requires a symmetric input.
inline Symbol solve_commutator(const Symbol& a, const ScaleParameters& p,
                               MollifierSpec moll = {},
                               const std::vector<Vec>* symmetry_samples = nullptr,
                               double symmetry_tol = 1e-10) {
  if (symmetry_samples != nullptr) {
    double res = symmetry_residual(a, *symmetry_samples);
    if (res > symmetry_tol)
      throw Error("solve_commutator: input symbol is not symmetric (residual " +
                  std::to_string(res) + ")");
  }
  Symbol psi(a.dim());
  for (const auto& th : a.support()) {
    if (th.norm() <= kFreqTol) continue;
    CoefFn chi = CoefFn::chi_tilde(th, p.rho_n, p.beta, moll);
    psi.add_term(th, (a.coeff(th) * chi).scaled(Cplx(0, 1)));
  }
  return psi;
}

struct GaugeOrderDiagnostics {
  int order = 0;
  size_t psi_support = 0;
  size_t b_support = 0;
  size_t t_support = 0;
  double psi_norm = 0;   // grid estimate, order 0 weight
  double bt_norm = 0;
  double commutator_residual = 0;  // ad(H0;Psi_l) + (B_l + T_l)^natural at samples
};

struct GaugeResult {
  std::vector<Symbol> psi;       // psi_1..psi_ktilde
  std::vector<Symbol> b_terms;   // B_1..B_ktilde
  std::vector<Symbol> t_terms;   // T_1(=0)..T_ktilde
  Symbol y;
  Symbol w;
  std::vector<GaugeOrderDiagnostics> diagnostics;
};

namespace detail {

inline void compositions(int total, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int rest) {
    if (rest == 0) {
      out.push_back(cur);
      return;
    }
    for (int k = 1; k <= rest; ++k) {
      cur.push_back(k);
      rec(rest - k);
      cur.pop_back();
    }
  };
  rec(total);
}

inline double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace detail

inline GaugeResult gauge_transform(const Symbol& b, const ScaleParameters& p, int ktilde,
                                   MollifierSpec moll = {}, size_t support_cap = 20000,
                                   std::uint64_t diag_seed = 2024) {
  if (ktilde < 1 || ktilde > 5) throw Error("gauge_transform: k-tilde must be in [1,5]");
  const int d = b.dim();
  auto samples = make_norm_grid(d, p.rho_n, 64, diag_seed);

  GaugeResult gr;
  gr.b_terms.push_back(b);                 // B_1
  gr.t_terms.push_back(Symbol::zero(d));   // T_1 = 0
  std::vector<Symbol> ad_h0_psi;           // symbol of ad(H0; Psi_l) = -(B_l + T_l)^nat

  for (int l = 1; l <= ktilde; ++l) {
    if (l >= 2) {
      Symbol bl(d);
      {
        std::vector<std::vector<int>> comps;
        detail::compositions(l - 1, comps);
        for (const auto& ks : comps) {
          Symbol acc = b;
          for (int k : ks) acc = commutator(acc, gr.psi[static_cast<size_t>(k - 1)], support_cap);
          bl = bl + acc.scaled(1.0 / detail::factorial(static_cast<int>(ks.size())));
        }
      }
      Symbol tl(d);
      {
        std::vector<std::vector<int>> comps;
        detail::compositions(l, comps);
        for (const auto& ks : comps) {
          if (ks.size() < 2) continue;
          Symbol acc = ad_h0_psi[static_cast<size_t>(ks[0] - 1)];
          for (size_t t = 1; t < ks.size(); ++t)
            acc = commutator(acc, gr.psi[static_cast<size_t>(ks[t] - 1)], support_cap);
          tl = tl + acc.scaled(1.0 / detail::factorial(static_cast<int>(ks.size())));
        }
      }
      gr.b_terms.push_back(std::move(bl));
      gr.t_terms.push_back(std::move(tl));
    }

    Symbol rhs = gr.b_terms.back() + gr.t_terms.back();
    Symbol psi_l = solve_commutator(rhs, p, moll, &samples, 1e-8);
    Symbol rhs_nat = partition(rhs, p, moll).natural;
    ad_h0_psi.push_back(rhs_nat.scaled(-1.0));
    gr.psi.push_back(std::move(psi_l));

    GaugeOrderDiagnostics diag;
    diag.order = l;
    diag.psi_support = gr.psi.back().support_size();
    diag.b_support = gr.b_terms.back().support_size();
    diag.t_support = gr.t_terms.back().support_size();
    diag.psi_norm = norm_estimate(gr.psi.back(), 0.0, 0, samples, p.beta);
    diag.bt_norm = norm_estimate(rhs, 0.0, 0, samples, p.beta);
    // residual of the commutator equation at sample points
    double worst = 0;
    for (const auto& th : gr.psi.back().support()) {
      for (const auto& xi : samples) {
        Cplx ad_h0 = Cplx(0, 1) * ((xi + th).squaredNorm() - xi.squaredNorm()) *
                     gr.psi.back().eval(th, xi);
        Cplx nat = rhs_nat.eval(th, xi);
        worst = std::max(worst, std::abs(ad_h0 + nat));
      }
    }
    diag.commutator_residual = worst;
    gr.diagnostics.push_back(diag);
  }

  Symbol y(d);
  for (const auto& s : gr.b_terms) y = y + s;
  for (const auto& s : gr.t_terms) y = y + s;
  gr.y = y;
  gr.w = y + partition(y, p, moll).natural.scaled(-1.0);
  return gr;
}

// ---------------------------------------------------------------------------
// Finite frequency-lattice truncation: the independent conjugation oracle.

struct FreqBasis {
  int dim = 0;
  std::vector<Vec> pts;
  std::unordered_map<VecKey, int, VecKeyHash> index;

  int find(const Vec& v) const {
    auto it = index.find(vec_key(v));
    return it == index.end() ? -1 : it->second;
  }
};

// Integer lattice points with |nu| <= radius, ordered lexicographically.
inline FreqBasis ball_basis(int dim, double radius) {
  FreqBasis fb;
  fb.dim = dim;
  int r = static_cast<int>(std::floor(radius));
  std::vector<int> lo(static_cast<size_t>(dim), -r), cur(static_cast<size_t>(dim), -r);
  while (true) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = cur[static_cast<size_t>(i)];
    if (v.norm() <= radius) {
      fb.index.emplace(vec_key(v), static_cast<int>(fb.pts.size()));
      fb.pts.push_back(v);
    }
    int i = dim - 1;
    while (i >= 0 && cur[static_cast<size_t>(i)] == r) {
      cur[static_cast<size_t>(i)] = -r;
      --i;
    }
    if (i < 0) break;
    ++cur[static_cast<size_t>(i)];
  }
  return fb;
}

inline MatrixXcd op_matrix(const Symbol& s, const FreqBasis& fb) {
  MatrixXcd m = MatrixXcd::Zero(static_cast<Eigen::Index>(fb.pts.size()),
                                static_cast<Eigen::Index>(fb.pts.size()));
  auto supp = s.support();
  for (int col = 0; col < static_cast<int>(fb.pts.size()); ++col) {
    const Vec& nu = fb.pts[static_cast<size_t>(col)];
    for (const auto& th : supp) {
      int row = fb.find(Vec(nu + th));
      if (row < 0) continue;
      m(row, col) += s.eval(th, nu);
    }
  }
  return m;
}

inline MatrixXcd h0_matrix(const FreqBasis& fb) {
  MatrixXcd m = MatrixXcd::Zero(static_cast<Eigen::Index>(fb.pts.size()),
                                static_cast<Eigen::Index>(fb.pts.size()));
  for (int i = 0; i < static_cast<int>(fb.pts.size()); ++i)
    m(i, i) = fb.pts[static_cast<size_t>(i)].squaredNorm();
  return m;
}

// Spectral norm of U*(H0 + op(b))U - (H0 + op(w)) with U = exp(i Psi) on the
// truncated basis.  The commutator equations cancel the natural part of Y,
// so the conjugated operator is H0 + W up to the order-(k+1) remainder,
// and that remainder is what this measures.
inline double conjugation_discrepancy(const Symbol& b, const GaugeResult& gr,
                                      const FreqBasis& fb) {
  MatrixXcd h = h0_matrix(fb) + op_matrix(b, fb);
  Symbol psi_total = Symbol::zero(b.dim());
  for (const auto& s : gr.psi) psi_total = psi_total + s;
  MatrixXcd psi = op_matrix(psi_total, fb);
  double herm = (psi - psi.adjoint()).norm();
  if (herm > 1e-8 * std::max(1.0, psi.norm()))
    throw Error("conjugation_discrepancy: Psi matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es((psi + psi.adjoint()) * 0.5);
  MatrixXcd u = es.eigenvectors() *
                (Cplx(0, 1) * es.eigenvalues().array().cast<Cplx>()).exp().matrix().asDiagonal() *
                es.eigenvectors().adjoint();
  MatrixXcd conj = u.adjoint() * h * u;
  MatrixXcd target = h0_matrix(fb) + op_matrix(gr.w, fb);
  MatrixXcd diff = conj - target;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> ed((diff + diff.adjoint()) * 0.5);
  return ed.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace idos

#endif  // IDOS_GAUGE_HPP
