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
// The model integral: an iterated integral over ordered angle variables
// 0 <= t_1 <= ... <= t_K <= gamma of
//
//   prod_j t_j^{n_j} / prod_t (l_t + rho sum_j b_j^t t_j)^{k_t}
//                             (c_t + sum_j bt_j^t t_j)^{k'_t},
//
// together with a fit of its large-rho behaviour on the power/log basis
// {rho^{-p} (ln rho)^q, q <= K}.

#ifndef IDOS_MODEL_INTEGRAL_HPP
#define IDOS_MODEL_INTEGRAL_HPP

#include <vector>

#include "idos/fitting.hpp"

namespace idos {

struct ModelIntegralSpec {
  int big_k = 1;                 // number of angle variables, 0..2
  std::vector<int> n_exp;        // size K: exponents n_j
  struct Factor {
    double l = 1;                // rho-coupled offset
    int k = 0;                   // its power
    std::vector<double> b;       // size K: rho-coupled slopes
    double c = 1;                // rho-free offset
    int kp = 0;                  // its power
    std::vector<double> bt;      // size K: rho-free slopes
  };
  std::vector<Factor> factors;
  double gamma = 1.0;
  double rho = 100.0;

  void validate() const {
    if (big_k < 0 || big_k > 2) throw Error("ModelIntegralSpec: K must be 0, 1 or 2");
    if (static_cast<int>(n_exp.size()) != big_k) throw Error("ModelIntegralSpec: need K exponents");
    if (gamma <= 0 || gamma > 1) throw Error("ModelIntegralSpec: need 0 < gamma <= 1");
    if (rho <= 0) throw Error("ModelIntegralSpec: rho must be positive");
    for (const auto& f : factors) {
      if (static_cast<int>(f.b.size()) != big_k || static_cast<int>(f.bt.size()) != big_k)
        throw Error("ModelIntegralSpec: slope arrays must have K entries");
      if (f.k > 0 && f.l <= 0) throw Error("ModelIntegralSpec: l must be positive");
      if (f.kp > 0 && f.c <= 0) throw Error("ModelIntegralSpec: c must be positive");
    }
  }
};

namespace detail {

inline double model_integrand(const ModelIntegralSpec& s, const double* t) {
  double val = 1.0;
  for (int j = 0; j < s.big_k; ++j)
    for (int e = 0; e < s.n_exp[static_cast<size_t>(j)]; ++e) val *= t[j];
  for (const auto& f : s.factors) {
    if (f.k > 0) {
      double den = f.l;
      for (int j = 0; j < s.big_k; ++j) den += s.rho * f.b[static_cast<size_t>(j)] * t[j];
      if (den <= 0) throw Error("model_integral: non-positive denominator");
      for (int e = 0; e < f.k; ++e) val /= den;
    }
    if (f.kp > 0) {
      double den = f.c;
      for (int j = 0; j < s.big_k; ++j) den += f.bt[static_cast<size_t>(j)] * t[j];
      if (den <= 0) throw Error("model_integral: non-positive denominator");
      for (int e = 0; e < f.kp; ++e) val /= den;
    }
  }
  return val;
}

// Adaptive Simpson in 1-D.  `noise_rel` is the relative level below which
// refinement cannot be trusted (integrand evaluation noise, e.g. an inner
// adaptive integral); intervals whose correction falls under it are accepted.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol, double noise_rel,
                        int depth, double fa, double fm, double fb, double whole) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
  double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol ||
      std::abs(delta) <= noise_rel * (std::abs(left) + std::abs(right)) || depth <= 0)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, 0.5 * tol, noise_rel, depth - 1, fa, flm, fm, left) +
         adaptive_simpson(f, m, b, 0.5 * tol, noise_rel, depth - 1, fm, frm, fb, right);
}

template <class F>
double integrate_1d(const F& f, double a, double b, double tol, double noise_rel = 1e-14) {
  if (b <= a) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  double scale = std::max(std::abs(whole), 1e-300);
  return adaptive_simpson(f, a, b, tol * scale, noise_rel, 44, fa, fm, fb, whole);
}

}  // namespace detail

// Nested adaptive quadrature of the model integral to a relative tolerance.
inline double model_integral_quadrature(const ModelIntegralSpec& spec,
                                        double rel_tol = 1e-8) {
  spec.validate();
  if (spec.big_k == 0) {
    double tepmty = 0;
    return detail::model_integrand(spec, &tepmty);  // empty product of integrals
  }
  if (spec.big_k == 1) {
    auto f = [&](double t1) {
      double t[1] = {t1};
      return detail::model_integrand(spec, t);
    };
    return detail::integrate_1d(f, 0.0, spec.gamma, rel_tol);
  }
  auto outer = [&](double t2) {
    auto inner = [&](double t1) {
      double t[2] = {t1, t2};
      return detail::model_integrand(spec, t);
    };
    return detail::integrate_1d(inner, 0.0, t2, 0.2 * rel_tol);
  };
  // the outer refinement cannot resolve below the inner quadrature noise
  return detail::integrate_1d(outer, 0.0, spec.gamma, rel_tol, rel_tol);
}

struct SeriesCheck {
  FitResult fit;
  std::vector<double> rho_list;
  std::vector<double> values;
  bool pass = false;
};

// Samples J_K over rho_list and fits {rho^{-p} ln^q rho : p <= p_max, q <= K}.
inline SeriesCheck model_integral_series(ModelIntegralSpec spec,
                                         const std::vector<double>& rho_list,
                                         int p_max = 6, double pass_tol = 1e-4,
                                         double quad_tol = 1e-10) {
  SeriesCheck out;
  out.rho_list = rho_list;
  for (double r : rho_list) {
    spec.rho = r;
    out.values.push_back(model_integral_quadrature(spec, quad_tol));
  }
  std::vector<FitTerm> terms;
  for (int p = 0; p <= p_max; ++p)
    for (int q = 0; q <= spec.big_k; ++q) terms.push_back({-static_cast<double>(p), q});
  std::vector<double> sg(rho_list.size(), 1.0);
  // weight by |J| so the fit controls relative error
  for (size_t i = 0; i < out.values.size(); ++i)
    sg[i] = std::max(std::abs(out.values[i]), 1e-300);
  out.fit = wls_fit(out.rho_list, out.values, sg, terms, /*allow_truncation=*/true);
  double worst = 0;
  for (size_t i = 0; i < out.values.size(); ++i) {
    double pred = 0;
    for (size_t j = 0; j < terms.size(); ++j)
      pred += out.fit.coefficients[static_cast<Eigen::Index>(j)] *
              std::pow(rho_list[i], terms[j].power) *
              std::pow(std::log(rho_list[i]), terms[j].log_pow);
    worst = std::max(worst, std::abs(pred - out.values[i]) / std::abs(out.values[i]));
  }
  out.pass = worst < pass_tol;
  return out;
}

}  // namespace idos

#endif  // IDOS_MODEL_INTEGRAL_HPP
