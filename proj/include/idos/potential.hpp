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
// Trigonometric-polynomial potentials: finite symmetric frequency sets with
// complex Fourier coefficients, k-fold algebraic sums of frequency sets, and
// the scale parameters used by the resonance machinery.

#ifndef IDOS_POTENTIAL_HPP
#define IDOS_POTENTIAL_HPP

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "idos/common.hpp"

namespace idos {

class FrequencySet {
 public:
  FrequencySet() = default;
  explicit FrequencySet(int dim) : dim_(dim) {
    if (dim < 1 || dim > 3) throw Error("FrequencySet: dim must be 1, 2 or 3");
  }

  int dim() const { return dim_; }
  size_t size() const { return elems_.size(); }
  const std::vector<Vec>& elements() const { return elems_; }
  const Vec& operator[](size_t i) const { return elems_[i]; }

  // Inserts with tolerance-deduplication; returns index of the element.
  int add(const Vec& v) {
    if (v.size() != dim_) throw Error("FrequencySet::add: wrong dimension");
    if (!v.allFinite()) throw Error("FrequencySet::add: non-finite entry");
    VecKey k = vec_key(v);
    auto it = index_.find(k);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(elems_.size());
    elems_.push_back(v);
    index_.emplace(k, id);
    return id;
  }

  bool contains(const Vec& v) const { return index_.count(vec_key(v)) > 0; }
  int find(const Vec& v) const {
    auto it = index_.find(vec_key(v));
    return it == index_.end() ? -1 : it->second;
  }

  bool contains_zero() const { return contains(Vec::Zero(dim_)); }

  bool is_symmetric() const {
    for (const auto& v : elems_)
      if (!contains(Vec(-v))) return false;
    return true;
  }

  // Rank of the span, with singular values below tol treated as zero.
  int rank(double tol = 1e-9) const {
    if (elems_.empty()) return 0;
    MatrixXd m(dim_, static_cast<Eigen::Index>(elems_.size()));
    for (size_t i = 0; i < elems_.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = elems_[i];
    Eigen::JacobiSVD<MatrixXd> svd(m);
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > tol) ++r;
    return r;
  }

  bool spans() const { return rank() == dim_; }

  std::vector<Vec> nonzero() const {
    std::vector<Vec> out;
    for (const auto& v : elems_)
      if (v.lpNorm<Eigen::Infinity>() > kFreqTol) out.push_back(v);
    return out;
  }

  double min_norm_nonzero() const {
    double r = -1;
    for (const auto& v : nonzero()) {
      double n = v.norm();
      if (r < 0 || n < r) r = n;
    }
    return r;
  }

  double max_norm() const {
    double r = 0;
    for (const auto& v : elems_) r = std::max(r, v.norm());
    return r;
  }

 private:
  int dim_ = 0;
  std::vector<Vec> elems_;
  std::unordered_map<VecKey, int, VecKeyHash> index_;
};

// k-fold algebraic sum of a frequency set, deduplicated.  Throws once the
// running set exceeds `cap` elements.
inline FrequencySet theta_sum(const FrequencySet& theta, int k, size_t cap = 20000) {
  if (k < 1) throw Error("theta_sum: k must be >= 1");
  FrequencySet acc(theta.dim());
  for (const auto& v : theta.elements()) acc.add(v);
  for (int step = 1; step < k; ++step) {
    FrequencySet next(theta.dim());
    for (const auto& a : acc.elements())
      for (const auto& b : theta.elements()) {
        next.add(Vec(a + b));
        if (next.size() > cap)
          throw Error("theta_sum: set size exceeded cap of " + std::to_string(cap));
      }
    acc = std::move(next);
  }
  return acc;
}

// Real-valued trigonometric polynomial: coefficient map over a symmetric
// frequency set.  Frequencies without an explicit coefficient carry zero,
// so a free potential is representable with a spanning frequency set.
class Potential {
 public:
  Potential() = default;
  explicit Potential(FrequencySet freqs) : freqs_(std::move(freqs)) {}

  int dim() const { return freqs_.dim(); }
  const FrequencySet& freqs() const { return freqs_; }

  void set_coeff(const Vec& theta, Cplx a) {
    if (freqs_.find(theta) < 0) freqs_.add(theta);
    coeffs_[vec_key(theta)] = a;
  }

  Cplx coeff(const Vec& theta) const {
    auto it = coeffs_.find(vec_key(theta));
    return it == coeffs_.end() ? Cplx(0, 0) : it->second;
  }

  // Checks symmetry of the set, presence of 0 and conjugate symmetry of the
  // coefficients (real-valued potential).  The span check is reported
  // separately since the zero potential legitimately fails it.
  void validate(double tol = 1e-12) const {
    if (!freqs_.contains_zero()) throw Error("Potential: frequency set must contain 0");
    if (!freqs_.is_symmetric()) throw Error("Potential: frequency set must be symmetric");
    for (const auto& v : freqs_.elements()) {
      Cplx a = coeff(v);
      Cplx b = coeff(Vec(-v));
      if (std::abs(a - std::conj(b)) > tol * std::max(1.0, std::abs(a)))
        throw Error("Potential: coefficients violate a(-theta) = conj(a(theta))");
    }
  }

  double sup_norm_bound() const {  // sum of |a_theta|
    double s = 0;
    for (const auto& [k, a] : coeffs_) s += std::abs(a);
    return s;
  }

  // Pointwise product as a new trigonometric polynomial.
  Potential product(const Potential& other, size_t cap = 20000) const {
    if (dim() != other.dim()) throw Error("Potential::product: dim mismatch");
    FrequencySet fs(dim());
    std::unordered_map<VecKey, Cplx, VecKeyHash> acc;
    for (const auto& a : freqs_.elements())
      for (const auto& b : other.freqs().elements()) {
        Cplx c = coeff(a) * other.coeff(b);
        if (c == Cplx(0, 0)) continue;
        Vec s = a + b;
        fs.add(s);
        if (fs.size() > cap) throw Error("Potential::product: support cap exceeded");
        acc[vec_key(s)] += c;
      }
    fs.add(Vec::Zero(dim()));
    Potential out(fs);
    for (const auto& v : fs.elements()) {
      auto it = acc.find(vec_key(v));
      if (it != acc.end()) out.set_coeff(v, it->second);
    }
    return out;
  }

  Potential squared(size_t cap = 20000) const { return product(*this, cap); }

 private:
  FrequencySet freqs_;
  std::unordered_map<VecKey, Cplx, VecKeyHash> coeffs_;
};

// Almost-periodic mean M(b): the zero-frequency coefficient.
inline Cplx mean(const Potential& b) { return b.coeff(Vec::Zero(b.dim())); }

// Scale parameters: rho_n, the sum depth k_tilde, the slab exponents
// alpha_1 < ... < alpha_d < 1/(2d) and the cutoff exponent 0 < beta < alpha_1.
struct ScaleParameters {
  double rho_n = 10.0;
  int k_tilde = 3;
  std::vector<double> alphas;  // size d
  double beta = 0.0;

  static ScaleParameters defaults(int d, double rho_n = 10.0, int k_tilde = 3) {
    ScaleParameters p;
    p.rho_n = rho_n;
    p.k_tilde = k_tilde;
    // Evenly spread below the 1/(2d) ceiling.
    double top = 1.0 / (2.0 * d) * 0.9;
    for (int j = 1; j <= d; ++j) p.alphas.push_back(top * (0.5 + 0.5 * j / d));
    p.beta = 0.85 * p.alphas[0];
    p.validate(d);
    return p;
  }

  void validate(int d) const {
    if (rho_n <= 1.0) throw Error("ScaleParameters: rho_n must exceed 1");
    if (k_tilde < 1 || k_tilde > 5) throw Error("ScaleParameters: k_tilde must be in [1,5]");
    if (static_cast<int>(alphas.size()) != d) throw Error("ScaleParameters: need d alphas");
    for (size_t i = 0; i + 1 < alphas.size(); ++i)
      if (alphas[i] >= alphas[i + 1]) throw Error("ScaleParameters: alphas must increase");
    if (alphas.front() <= 0) throw Error("ScaleParameters: alphas must be positive");
    if (alphas.back() >= 1.0 / (2.0 * d)) throw Error("ScaleParameters: alpha_d must be < 1/(2d)");
    if (beta <= 0 || beta >= alphas.front()) throw Error("ScaleParameters: need 0 < beta < alpha_1");
  }

  // L_j = rho_n^{alpha_j}, 1-based.
  double L(int j) const {
    if (j < 1 || j > static_cast<int>(alphas.size()))
      throw Error("ScaleParameters::L: index out of range");
    return std::pow(rho_n, alphas[static_cast<size_t>(j - 1)]);
  }

  double rho_beta() const { return std::pow(rho_n, beta); }
};

}  // namespace idos

#endif  // IDOS_POTENTIAL_HPP
