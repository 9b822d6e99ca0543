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

#include <catch2/catch_amalgamated.hpp>

#include "idos/model_integral.hpp"

using namespace idos;

namespace {

// K=1, single factor (l + rho b t)^{-1}: closed form log expression
double closed_form_k1(double rho, double gamma, double b, double l) {
  return std::log(1.0 + rho * gamma * b / l) / (rho * b);
}

ModelIntegralSpec spec_k1(double rho, double gamma, double b, double l) {
  ModelIntegralSpec s;
  s.big_k = 1;
  s.n_exp = {0};
  ModelIntegralSpec::Factor f;
  f.l = l;
  f.k = 1;
  f.b = {b};
  f.c = 1.0;
  f.kp = 0;
  f.bt = {0.0};
  s.factors = {f};
  s.gamma = gamma;
  s.rho = rho;
  return s;
}

}  // namespace

TEST_CASE("quadrature matches the K=1 closed form") {
  for (double rho : {50.0, 400.0, 3000.0}) {
    ModelIntegralSpec s = spec_k1(rho, 0.8, 1.3, 6.0);
    double got = model_integral_quadrature(s, 1e-10);
    double expect = closed_form_k1(rho, 0.8, 1.3, 6.0);
    CHECK(got == Catch::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("no denominators: the integral is the volume of the simplex") {
  ModelIntegralSpec s;
  s.big_k = 1;
  s.n_exp = {0};
  ModelIntegralSpec::Factor f;
  f.k = 0;
  f.kp = 0;
  f.b = {0.0};
  f.bt = {0.0};
  s.factors = {f};
  s.gamma = 0.7;
  s.rho = 100.0;
  CHECK(model_integral_quadrature(s) == Catch::Approx(0.7).epsilon(1e-10));

  // K = 0: empty product of integrals, pure factor evaluation
  ModelIntegralSpec s0;
  s0.big_k = 0;
  ModelIntegralSpec::Factor f0;
  f0.l = 4.0;
  f0.k = 2;
  f0.c = 5.0;
  f0.kp = 1;
  s0.factors = {f0};
  s0.gamma = 1.0;
  s0.rho = 10.0;
  CHECK(model_integral_quadrature(s0) == Catch::Approx(1.0 / 16.0 / 5.0).epsilon(1e-12));
}

TEST_CASE("separable K=2 integrand factorizes") {
  // 1/((l1 + rho b1 t1)(c2 + bt2 t2)) over 0 <= t1 <= t2 <= gamma is not a
  // pure product, so compare against direct 2-D Simpson on a fine grid.
  ModelIntegralSpec s;
  s.big_k = 2;
  s.n_exp = {0, 1};
  ModelIntegralSpec::Factor f1;
  f1.l = 5.0;
  f1.k = 1;
  f1.b = {1.2, 0.0};
  f1.c = 1.0;
  f1.kp = 0;
  f1.bt = {0.0, 0.0};
  ModelIntegralSpec::Factor f2;
  f2.l = 1.0;
  f2.k = 0;
  f2.b = {0.0, 0.0};
  f2.c = 2.0;
  f2.kp = 1;
  f2.bt = {0.0, 0.7};
  s.factors = {f1, f2};
  s.gamma = 0.9;
  s.rho = 150.0;

  double got = model_integral_quadrature(s, 1e-10);

  // brute-force tensor midpoint
  int n = 2000;
  double h = s.gamma / n;
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    double t2 = (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      double t1 = (j + 0.5) * h;
      if (t1 > t2) continue;
      double val = t2 / ((5.0 + s.rho * 1.2 * t1) * (2.0 + 0.7 * t2));
      acc += val * h * h;
    }
  }
  CHECK(got == Catch::Approx(acc).epsilon(2e-3));
}

TEST_CASE("series fit recovers the K=1 log coefficients") {
  double gamma = 0.8, b = 1.3, l = 6.0;
  ModelIntegralSpec s = spec_k1(100.0, gamma, b, l);
  std::vector<double> rhos;
  for (int i = 0; i < 30; ++i) rhos.push_back(60.0 * std::pow(1.18, i));
  SeriesCheck sc = model_integral_series(s, rhos, 5);
  CHECK(sc.pass);
  // J = (1/(b rho)) [ln rho + ln(gamma b / l)] + O(rho^{-2})
  double got_log = 0, got_pow = 0;
  for (size_t j = 0; j < sc.fit.terms.size(); ++j) {
    if (sc.fit.terms[j].power == -1.0 && sc.fit.terms[j].log_pow == 1)
      got_log = sc.fit.coefficients[static_cast<Eigen::Index>(j)];
    if (sc.fit.terms[j].power == -1.0 && sc.fit.terms[j].log_pow == 0)
      got_pow = sc.fit.coefficients[static_cast<Eigen::Index>(j)];
  }
  CHECK(got_log == Catch::Approx(1.0 / b).epsilon(1e-6));
  CHECK(got_pow == Catch::Approx(std::log(gamma * b / l) / b).epsilon(1e-6));
}

TEST_CASE("K=0 series is a pure constant") {
  ModelIntegralSpec s0;
  s0.big_k = 0;
  ModelIntegralSpec::Factor f0;
  f0.c = 3.0;
  f0.kp = 2;
  f0.l = 1.0;
  f0.k = 0;
  s0.factors = {f0};
  s0.gamma = 1.0;
  std::vector<double> rhos;
  for (int i = 0; i < 12; ++i) rhos.push_back(50.0 * std::pow(1.5, i));
  SeriesCheck sc = model_integral_series(s0, rhos, 2);
  CHECK(sc.pass);
}

TEST_CASE("random in-range K=2 specs fit the log-power basis") {
  CounterRng rng(314, 0);
  double rho_n = 1e4;
  double beta = 0.1;
  int passed = 0;
  for (int trial = 0; trial < 5; ++trial) {
    ModelIntegralSpec s;
    s.big_k = 2;
    s.n_exp = {static_cast<int>(rng.uniform(90 * trial) * 2),
               static_cast<int>(rng.uniform(90 * trial + 1) * 2)};
    int tfac = 1 + static_cast<int>(rng.uniform(90 * trial + 2) * 2);
    for (int t = 0; t < tfac; ++t) {
      ModelIntegralSpec::Factor f;
      double lo = std::pow(rho_n, beta);
      f.l = lo * (2.0 + 3.0 * rng.uniform(90 * trial + 3 + 7 * t));
      f.k = 1 + static_cast<int>(rng.uniform(90 * trial + 4 + 7 * t) * 2);
      f.b = {0.5 + rng.uniform(90 * trial + 5 + 7 * t),
             0.5 + rng.uniform(90 * trial + 6 + 7 * t)};
      f.c = 0.5 + rng.uniform(90 * trial + 7 + 7 * t);
      f.kp = static_cast<int>(rng.uniform(90 * trial + 8 + 7 * t) * 2);
      f.bt = {0.5 + rng.uniform(90 * trial + 9 + 7 * t),
              0.5 + rng.uniform(90 * trial + 10 + 7 * t)};
      s.factors.push_back(f);
    }
    s.gamma = 0.4 + 0.6 * rng.uniform(90 * trial + 20);
    s.rho = 1000.0;
    std::vector<double> rhos;
    for (int i = 0; i < 36; ++i) rhos.push_back(400.0 * std::pow(1.16, i));
    SeriesCheck sc = model_integral_series(s, rhos, 6, 1e-4, 1e-9);
    INFO("trial " << trial);
    CHECK(sc.pass);
    if (sc.pass) ++passed;
  }
  CHECK(passed == 5);
}
