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
// Weighted least squares on power/log bases, and the closed-form expansion
// coefficients the fits are compared against.

#ifndef IDOS_FITTING_HPP
#define IDOS_FITTING_HPP

#include <string>
#include <vector>

#include "idos/potential.hpp"

namespace idos {

struct FitTerm {
  double power = 0;  // exponent of lambda
  int log_pow = 0;   // power of ln(lambda)

  std::string name() const {
    std::string s = "lambda^" + std::to_string(power);
    if (log_pow > 0) s += " ln^" + std::to_string(log_pow);
    return s;
  }
};

struct FitResult {
  std::vector<FitTerm> terms;
  Vec coefficients;
  Vec stderrs;
  double residual_norm = 0;      // weighted
  double residual_rel = 0;       // unweighted, relative to |y|
  double condition_number = 0;
  std::vector<std::string> warnings;
};

// Weighted least squares of y on the basis {x^p (ln x)^q}; weights 1/sigma^2.
// With allow_truncation the solve drops singular directions below the rank
// threshold (minimum-norm solution) instead of failing; used by residual
// checks where individual coefficients need not be identifiable.
inline FitResult wls_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                         const std::vector<double>& sigmas,
                         const std::vector<FitTerm>& terms, bool allow_truncation = false) {
  size_t n = xs.size();
  size_t m = terms.size();
  if (ys.size() != n || (!sigmas.empty() && sigmas.size() != n))
    throw Error("wls_fit: size mismatch");
  if (n < m) throw Error("wls_fit: more terms than points");

  MatrixXd x(n, m);
  Vec y(n), w(n);
  for (size_t i = 0; i < n; ++i) {
    if (xs[i] <= 0) throw Error("wls_fit: abscissas must be positive");
    double sigma = sigmas.empty() ? 1.0 : std::max(sigmas[i], 1e-300);
    w[static_cast<Eigen::Index>(i)] = 1.0 / sigma;
    y[static_cast<Eigen::Index>(i)] = ys[i];
    for (size_t j = 0; j < m; ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::pow(xs[i], terms[j].power) * std::pow(std::log(xs[i]), terms[j].log_pow);
  }
  MatrixXd xw = w.asDiagonal() * x;
  Vec yw = w.asDiagonal() * y;

  // column equilibration: power/log bases span many orders of magnitude
  Vec scale(m);
  for (size_t j = 0; j < m; ++j) {
    double s = xw.col(static_cast<Eigen::Index>(j)).norm();
    scale[static_cast<Eigen::Index>(j)] = s > 0 ? s : 1.0;
  }
  MatrixXd xeq = xw * scale.cwiseInverse().asDiagonal();

  Eigen::JacobiSVD<MatrixXd> svd(xeq, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double smax = svd.singularValues()[0];
  double smin = svd.singularValues()[static_cast<Eigen::Index>(m) - 1];
  FitResult out;
  out.terms = terms;
  out.condition_number = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (smin <= 1e-14 * smax && !allow_truncation)
    throw Error("wls_fit: rank-deficient design; drop basis terms");
  if (out.condition_number > 1e10)
    out.warnings.push_back("ill-conditioned design (cond " +
                           std::to_string(out.condition_number) + ")");

  Vec coef_scaled;
  if (allow_truncation) {
    Vec sv_inv = svd.singularValues();
    int dropped = 0;
    for (Eigen::Index j = 0; j < sv_inv.size(); ++j) {
      if (svd.singularValues()[j] <= 1e-13 * smax) {
        sv_inv[j] = 0.0;
        ++dropped;
      } else {
        sv_inv[j] = 1.0 / sv_inv[j];
      }
    }
    if (dropped > 0)
      out.warnings.push_back("dropped " + std::to_string(dropped) + " singular directions");
    coef_scaled = svd.matrixV() * sv_inv.asDiagonal() * (svd.matrixU().transpose() * yw);
  } else {
    coef_scaled = svd.solve(yw);
  }
  out.coefficients = scale.cwiseInverse().asDiagonal() * coef_scaled;
  Vec resid = yw - xw * out.coefficients;
  out.residual_norm = resid.norm();
  Vec resid_plain = y - x * out.coefficients;
  out.residual_rel = resid_plain.norm() / std::max(1e-300, y.norm());

  // covariance of the coefficients: (X' W^2 X)^{-1} via the SVD factors
  MatrixXd vsi = svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal();
  Vec stderr_scaled = Vec((vsi * vsi.transpose()).diagonal().cwiseSqrt());
  out.stderrs = scale.cwiseInverse().asDiagonal() * stderr_scaled;
  return out;
}

// Closed-form leading coefficients of the high-energy expansion.
struct PaperCoefficients {
  double c_d = 0;
  double e1 = 0;
  double e2 = 0;
};

inline PaperCoefficients paper_coefficients(const Potential& b, int d) {
  PaperCoefficients out;
  double wd = unit_ball_volume(d);
  double tp = two_pi_pow(d);
  out.c_d = wd / tp;
  double mb = mean(b).real();
  double mb2 = mean(b.squared()).real();
  out.e1 = -d * wd / (2.0 * tp) * mb;
  out.e2 = d * (d - 2.0) * wd / (8.0 * tp) * mb2;
  return out;
}

}  // namespace idos

#endif  // IDOS_FITTING_HPP
