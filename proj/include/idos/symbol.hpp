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
// Quasi-periodic symbols: a finite frequency support with one coefficient
// function of xi per frequency.  Coefficient functions are immutable
// expression trees, so compositions coming out of the gauge iteration
// evaluate in closed form at arbitrary points.
//
// Conventions used throughout:
//   product   (b o g)^(chi, xi) = sum_{theta+phi=chi} b^(theta, xi+phi) g^(phi, xi)
//   commutator ad(b,g)^(chi, xi) = i sum [b^(theta, xi+phi) g^(phi, xi)
//                                          - b^(theta, xi) g^(phi, xi+theta)]
//   symmetric  b^(theta, xi) = conj(b^(-theta, xi+theta))
// The operator acts on exponentials as op(b) e_nu = sum_theta b^(theta, nu) e_{nu+theta}.

#ifndef IDOS_SYMBOL_HPP
#define IDOS_SYMBOL_HPP

#include <map>
#include <memory>
#include <vector>

#include "idos/mollifier.hpp"
#include "idos/potential.hpp"

namespace idos {

enum class CutKind { kE, kLGt, kLLt, kZeta, kPhi };

class CoefFn {
 public:
  CoefFn() : node_(nullptr) {}  // structural zero

  static CoefFn zero() { return CoefFn(); }

  static CoefFn constant(Cplx c) {
    if (c == Cplx(0, 0)) return zero();
    auto n = std::make_shared<Node>();
    n->op = Op::kConst;
    n->c = c;
    return CoefFn(std::move(n));
  }

  // <v, xi> + c
  static CoefFn affine(Vec v, Cplx c) {
    auto n = std::make_shared<Node>();
    n->op = Op::kAffine;
    n->v = std::move(v);
    n->c = c;
    return CoefFn(std::move(n));
  }

  // |xi + shift|^2
  static CoefFn norm_sq(Vec shift) {
    auto n = std::make_shared<Node>();
    n->op = Op::kNormSq;
    n->v = std::move(shift);
    return CoefFn(std::move(n));
  }

  static CoefFn cutoff(CutKind kind, Vec theta, double rho_n, double beta,
                       MollifierSpec moll = {}) {
    if (theta.norm() <= kFreqTol) throw Error("CoefFn::cutoff: theta must be nonzero");
    auto n = std::make_shared<Node>();
    n->op = Op::kCutoff;
    n->kind = kind;
    n->v = std::move(theta);
    n->rho_n = rho_n;
    n->beta = beta;
    n->moll = moll;
    return CoefFn(std::move(n));
  }

  // e_theta(xi) phi_theta(xi) / (2 <theta, xi + theta/2>), with 0/0 = 0.
  // The phi cutoff vanishes wherever the denominator is below
  // rho_n^beta |theta| / 2, so the reciprocal never blows up.
  static CoefFn chi_tilde(Vec theta, double rho_n, double beta, MollifierSpec moll = {}) {
    if (theta.norm() <= kFreqTol) throw Error("CoefFn::chi_tilde: theta must be nonzero");
    auto n = std::make_shared<Node>();
    n->op = Op::kChi;
    n->v = std::move(theta);
    n->rho_n = rho_n;
    n->beta = beta;
    n->moll = moll;
    return CoefFn(std::move(n));
  }

  bool is_zero() const { return node_ == nullptr; }

  CoefFn shifted(const Vec& phi) const {
    if (is_zero()) return zero();
    if (phi.lpNorm<Eigen::Infinity>() == 0.0) return *this;
    if (node_->op == Op::kShift) {  // collapse nested shifts
      auto n = std::make_shared<Node>();
      n->op = Op::kShift;
      n->v = node_->v + phi;
      n->kids = node_->kids;
      return CoefFn(std::move(n));
    }
    auto n = std::make_shared<Node>();
    n->op = Op::kShift;
    n->v = phi;
    n->kids = {node_};
    return CoefFn(std::move(n));
  }

  CoefFn scaled(Cplx c) const {
    if (is_zero() || c == Cplx(0, 0)) return zero();
    if (c == Cplx(1, 0)) return *this;
    if (node_->op == Op::kConst) return constant(node_->c * c);
    auto n = std::make_shared<Node>();
    n->op = Op::kScale;
    n->c = c;
    n->kids = {node_};
    return CoefFn(std::move(n));
  }

  friend CoefFn operator+(const CoefFn& a, const CoefFn& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    auto n = std::make_shared<Node>();
    n->op = Op::kSum;
    // flatten one level to keep trees shallow
    if (a.node_->op == Op::kSum)
      n->kids = a.node_->kids;
    else
      n->kids = {a.node_};
    if (b.node_->op == Op::kSum)
      n->kids.insert(n->kids.end(), b.node_->kids.begin(), b.node_->kids.end());
    else
      n->kids.push_back(b.node_);
    return CoefFn(std::move(n));
  }

  friend CoefFn operator*(const CoefFn& a, const CoefFn& b) {
    if (a.is_zero() || b.is_zero()) return zero();
    auto n = std::make_shared<Node>();
    n->op = Op::kProd;
    n->kids = {a.node_, b.node_};
    return CoefFn(std::move(n));
  }

  Cplx eval(const Vec& xi) const {
    if (is_zero()) return {0, 0};
    return eval_node(*node_, xi);
  }

  size_t node_count() const { return node_ ? count_nodes(*node_) : 0; }

 private:
  enum class Op { kConst, kAffine, kNormSq, kCutoff, kChi, kSum, kProd, kShift, kScale };

  struct Node {
    Op op;
    Cplx c{0, 0};
    Vec v;
    CutKind kind = CutKind::kE;
    double rho_n = 0, beta = 0;
    MollifierSpec moll;
    std::vector<std::shared_ptr<const Node>> kids;
  };

  explicit CoefFn(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static double eval_cutoff(const Node& n, const Vec& xi) {
    const Vec& th = n.v;
    switch (n.kind) {
      case CutKind::kE:
      case CutKind::kLGt:
      case CutKind::kLLt: {
        double u = ((xi + 0.5 * th).norm() - 3.0 * n.rho_n) / (10.0 * n.rho_n);
        if (n.kind == CutKind::kE) return mollifier(std::abs(u), n.moll);
        if (n.kind == CutKind::kLGt) return 1.0 - mollifier(u, n.moll);
        return 1.0 - mollifier(-u, n.moll);
      }
      case CutKind::kZeta:
      case CutKind::kPhi: {
        double ip = std::abs(th.dot(xi + 0.5 * th));
        double z = ip / (std::pow(n.rho_n, n.beta) * th.norm());
        double zeta = mollifier(z, n.moll);
        return n.kind == CutKind::kZeta ? zeta : 1.0 - zeta;
      }
    }
    return 0.0;
  }

  static Cplx eval_node(const Node& n, const Vec& xi) {
    switch (n.op) {
      case Op::kConst:
        return n.c;
      case Op::kAffine:
        return Cplx(n.v.dot(xi), 0) + n.c;
      case Op::kNormSq:
        return Cplx((xi + n.v).squaredNorm(), 0);
      case Op::kCutoff:
        return Cplx(eval_cutoff(n, xi), 0);
      case Op::kChi: {
        Node e = n;
        e.kind = CutKind::kE;
        double num = eval_cutoff(e, xi);
        if (num == 0.0) return {0, 0};
        e.kind = CutKind::kPhi;
        num *= eval_cutoff(e, xi);
        if (num == 0.0) return {0, 0};
        double den = 2.0 * n.v.dot(xi + 0.5 * n.v);
        return Cplx(num / den, 0);
      }
      case Op::kSum: {
        Cplx s{0, 0};
        for (const auto& k : n.kids) s += eval_node(*k, xi);
        return s;
      }
      case Op::kProd: {
        Cplx p{1, 0};
        for (const auto& k : n.kids) {
          p *= eval_node(*k, xi);
          if (p == Cplx(0, 0)) return p;
        }
        return p;
      }
      case Op::kShift:
        return eval_node(*n.kids[0], Vec(xi + n.v));
      case Op::kScale:
        return n.c * eval_node(*n.kids[0], xi);
    }
    return {0, 0};
  }

  static size_t count_nodes(const Node& n) {
    size_t c = 1;
    for (const auto& k : n.kids) c += count_nodes(*k);
    return c;
  }

  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------

class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(int dim) : dim_(dim) {}

  static Symbol zero(int dim) { return Symbol(dim); }

  static Symbol constant(int dim, Cplx c) {
    Symbol s(dim);
    s.add_term(Vec::Zero(dim), CoefFn::constant(c));
    return s;
  }

  // Multiplication operator by the potential: coefficient functions constant.
  static Symbol from_potential(const Potential& b) {
    Symbol s(b.dim());
    for (const auto& th : b.freqs().elements()) {
      Cplx a = b.coeff(th);
      if (a != Cplx(0, 0)) s.add_term(th, CoefFn::constant(a));
    }
    return s;
  }

  int dim() const { return dim_; }
  size_t support_size() const { return terms_.size(); }

  void add_term(const Vec& theta, const CoefFn& f, size_t cap = 0) {
    if (f.is_zero()) return;
    if (theta.size() != dim_) throw Error("Symbol::add_term: dimension mismatch");
    VecKey k = vec_key(theta);
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      if (cap && terms_.size() >= cap)
        throw Error("Symbol: support cap of " + std::to_string(cap) + " exceeded");
      terms_.emplace(k, Entry{theta, f});
    } else {
      it->second.f = it->second.f + f;
    }
  }

  CoefFn coeff(const Vec& theta) const {
    auto it = terms_.find(vec_key(theta));
    return it == terms_.end() ? CoefFn::zero() : it->second.f;
  }

  Cplx eval(const Vec& theta, const Vec& xi) const { return coeff(theta).eval(xi); }

  std::vector<Vec> support() const {
    std::vector<Vec> out;
    out.reserve(terms_.size());
    for (const auto& [k, e] : terms_) out.push_back(e.theta);
    return out;
  }

  Symbol operator+(const Symbol& o) const {
    if (dim_ != o.dim_) throw Error("Symbol+: dimension mismatch");
    Symbol out = *this;
    for (const auto& [k, e] : o.terms_) out.add_term(e.theta, e.f);
    return out;
  }

  Symbol scaled(Cplx c) const {
    Symbol out(dim_);
    for (const auto& [k, e] : terms_) out.add_term(e.theta, e.f.scaled(c));
    return out;
  }

  size_t total_nodes() const {
    size_t c = 0;
    for (const auto& [k, e] : terms_) c += e.f.node_count();
    return c;
  }

 private:
  struct Entry {
    Vec theta;
    CoefFn f;
  };
  int dim_ = 0;
  std::map<VecKey, Entry> terms_;  // ordered: deterministic iteration
};

// ---------------------------------------------------------------------------
// Cutoff bundle at one (theta, xi), mostly for reports and tests.

struct CutoffValues {
  double e, l_gt, l_lt, zeta, phi;
};

inline CutoffValues cutoffs(const Vec& theta, const Vec& xi, const ScaleParameters& p,
                            MollifierSpec moll = {}) {
  if (theta.norm() <= kFreqTol) throw Error("cutoffs: theta must be nonzero");
  CutoffValues cv{};
  double u = ((xi + 0.5 * theta).norm() - 3.0 * p.rho_n) / (10.0 * p.rho_n);
  cv.e = mollifier(std::abs(u), moll);
  cv.l_gt = 1.0 - mollifier(u, moll);
  cv.l_lt = 1.0 - mollifier(-u, moll);
  double z = std::abs(theta.dot(xi + 0.5 * theta)) / (p.rho_beta() * theta.norm());
  cv.zeta = mollifier(z, moll);
  cv.phi = 1.0 - cv.zeta;
  return cv;
}

// Five-way cutoff partition of a symbol; parts sum back to the original at
// every evaluation point.
struct SymbolPartition {
  Symbol sharp, natural, flat, down, o;

  Symbol reassemble() const { return o + down + flat + natural + sharp; }
};

inline SymbolPartition partition(const Symbol& b, const ScaleParameters& p,
                                 MollifierSpec moll = {}) {
  int d = b.dim();
  SymbolPartition out{Symbol(d), Symbol(d), Symbol(d), Symbol(d), Symbol(d)};
  for (const auto& th : b.support()) {
    CoefFn f = b.coeff(th);
    if (th.norm() <= kFreqTol) {
      out.o.add_term(th, f);
      continue;
    }
    CoefFn e = CoefFn::cutoff(CutKind::kE, th, p.rho_n, p.beta, moll);
    CoefFn lgt = CoefFn::cutoff(CutKind::kLGt, th, p.rho_n, p.beta, moll);
    CoefFn llt = CoefFn::cutoff(CutKind::kLLt, th, p.rho_n, p.beta, moll);
    CoefFn zeta = CoefFn::cutoff(CutKind::kZeta, th, p.rho_n, p.beta, moll);
    CoefFn phi = CoefFn::cutoff(CutKind::kPhi, th, p.rho_n, p.beta, moll);
    out.sharp.add_term(th, f * lgt);
    out.natural.add_term(th, f * phi * e);
    out.flat.add_term(th, f * zeta * e);
    out.down.add_term(th, f * llt);
  }
  return out;
}

inline Symbol multiply(const Symbol& b, const Symbol& g, size_t cap = 20000) {
  if (b.dim() != g.dim()) throw Error("multiply: dimension mismatch");
  Symbol out(b.dim());
  for (const auto& th : b.support()) {
    CoefFn fb = b.coeff(th);
    for (const auto& ph : g.support()) {
      CoefFn term = fb.shifted(ph) * g.coeff(ph);
      out.add_term(Vec(th + ph), term, cap);
    }
  }
  return out;
}

inline Symbol commutator(const Symbol& b, const Symbol& g, size_t cap = 20000) {
  if (b.dim() != g.dim()) throw Error("commutator: dimension mismatch");
  const Cplx i_unit(0, 1);
  Symbol out(b.dim());
  for (const auto& th : b.support()) {
    CoefFn fb = b.coeff(th);
    for (const auto& ph : g.support()) {
      CoefFn fg = g.coeff(ph);
      CoefFn term = (fb.shifted(ph) * fg + (fb * fg.shifted(th)).scaled(-1.0)).scaled(i_unit);
      out.add_term(Vec(th + ph), term, cap);
    }
  }
  return out;
}

// Largest violation of the symmetry relation on the given sample points.
inline double symmetry_residual(const Symbol& b, const std::vector<Vec>& samples) {
  double worst = 0;
  for (const auto& th : b.support()) {
    for (const auto& xi : samples) {
      Cplx lhs = b.eval(th, xi);
      Cplx rhs = std::conj(b.eval(Vec(-th), Vec(xi + th)));
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

// Grid lower bound for the weighted symbol norm with zero derivatives:
// sum_theta <theta>^l max_grid <xi>^{-alpha beta} |b^(theta, xi)|.
inline double norm_estimate(const Symbol& b, double alpha, int l,
                            const std::vector<Vec>& grid, double beta) {
  if (grid.empty()) throw Error("norm_estimate: empty grid");
  double total = 0;
  for (const auto& th : b.support()) {
    CoefFn f = b.coeff(th);
    double best = 0;
    for (const auto& xi : grid) {
      double w = std::pow(1.0 + xi.squaredNorm(), -0.5 * alpha * beta);
      best = std::max(best, w * std::abs(f.eval(xi)));
    }
    total += std::pow(1.0 + th.squaredNorm(), 0.5 * l) * best;
  }
  return total;
}

// Log-spaced radii times quasi-random directions; the standard norm grid.
inline std::vector<Vec> make_norm_grid(int dim, double rho_n, int count = 2000,
                                       std::uint64_t seed = 12345) {
  CounterRng rng(seed, 7);
  std::vector<Vec> grid;
  grid.reserve(static_cast<size_t>(count));
  double lo = std::log(0.05 * rho_n + 1.0);
  double hi = std::log(30.0 * rho_n);
  for (int i = 0; i < count; ++i) {
    double t = count == 1 ? 0.5 : static_cast<double>(i) / (count - 1);
    double r = std::exp(lo + (hi - lo) * t);
    grid.push_back(r * rng.direction(static_cast<std::uint64_t>(i), dim));
  }
  return grid;
}

}  // namespace idos

#endif  // IDOS_SYMBOL_HPP
