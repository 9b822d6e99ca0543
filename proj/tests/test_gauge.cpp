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

#include "idos/gauge.hpp"

using namespace idos;

namespace {

Vec v1(double x) {
  Vec v(1);
  v << x;
  return v;
}

Potential two_cos() {
  FrequencySet fs(1);
  fs.add(v1(0));
  fs.add(v1(1));
  fs.add(v1(-1));
  Potential b(fs);
  b.set_coeff(v1(1), 1.0);
  b.set_coeff(v1(-1), 1.0);
  return b;
}

ScaleParameters scales_1d(double rho_n = 10.0) {
  ScaleParameters p;
  p.rho_n = rho_n;
  p.k_tilde = 3;
  p.alphas = {0.45};
  p.beta = 0.40;
  return p;
}

double chi_closed(double theta, double xi) {  // plain 1/(2<theta, xi+theta/2>)
  return 1.0 / (2.0 * theta * (xi + 0.5 * theta));
}

}  // namespace

TEST_CASE("solve_commutator produces i a chi and kills the natural part") {
  ScaleParameters p = scales_1d();
  Symbol b = Symbol::from_potential(two_cos());
  auto samples = make_norm_grid(1, p.rho_n, 128);
  Symbol psi = solve_commutator(b, p, {}, &samples);

  // at a point with e = phi = 1 and <theta, xi+theta/2> = c: psi = i/(2c)
  Vec th = v1(1);
  Vec xi = v1(3.0 * p.rho_n);
  CutoffValues cv = cutoffs(th, xi, p);
  REQUIRE(cv.e == 1.0);
  REQUIRE(cv.phi == 1.0);
  double c = th.dot(xi + 0.5 * th);
  Cplx val = psi.eval(th, xi);
  CHECK(std::abs(val - Cplx(0, 1) / (2.0 * c)) < 1e-15);

  // in the zeta region the solution vanishes
  Vec xi0 = v1(-0.5);
  REQUIRE(cutoffs(th, xi0, p).phi == 0.0);
  CHECK(std::abs(psi.eval(th, xi0)) == 0.0);

  // residual of ad(H0;Psi) + b-natural over samples
  Symbol bnat = partition(b, p).natural;
  double worst = 0;
  for (const auto& theta : psi.support())
    for (const auto& s : samples) {
      Cplx lhs = Cplx(0, 1) * ((s + theta).squaredNorm() - s.squaredNorm()) * psi.eval(theta, s);
      worst = std::max(worst, std::abs(lhs + bnat.eval(theta, s)));
    }
  CHECK(worst < 1e-12);

  // non-symmetric input is rejected
  Symbol bad(1);
  bad.add_term(v1(1), CoefFn::constant(1.0));
  bad.add_term(v1(-1), CoefFn::constant(0.2));
  CHECK_THROWS_AS(solve_commutator(bad, p, {}, &samples), Error);
}

TEST_CASE("gauge transform of a constant potential is trivial") {
  ScaleParameters p = scales_1d();
  Symbol c = Symbol::constant(1, 2.0);
  GaugeResult gr = gauge_transform(c, p, 3);
  for (const auto& psi : gr.psi) CHECK(psi.support_size() == 0);
  CounterRng rng(3, 0);
  for (int i = 0; i < 50; ++i) {
    Vec xi = v1(100.0 * (rng.uniform(i) - 0.5));
    CHECK(std::abs(gr.y.eval(v1(0), xi) - Cplx(2, 0)) < 1e-15);
    CHECK(std::abs(gr.w.eval(v1(0), xi) - Cplx(2, 0)) < 1e-15);
  }
}

TEST_CASE("k-tilde = 1 gives Y = b and W = b minus natural") {
  ScaleParameters p = scales_1d();
  Symbol b = Symbol::from_potential(two_cos());
  GaugeResult gr = gauge_transform(b, p, 1);
  Symbol expect_w = b + partition(b, p).natural.scaled(-1.0);
  CounterRng rng(4, 0);
  for (int i = 0; i < 200; ++i) {
    Vec xi = v1(120.0 * (rng.uniform(i) - 0.5));
    for (const auto& th : b.support()) {
      CHECK(std::abs(gr.y.eval(th, xi) - b.eval(th, xi)) < 1e-15);
      CHECK(std::abs(gr.w.eval(th, xi) - expect_w.eval(th, xi)) < 1e-14);
    }
  }
}

TEST_CASE("second-order mean coefficient matches the closed form") {
  ScaleParameters p = scales_1d();
  Symbol b = Symbol::from_potential(two_cos());
  GaugeResult gr = gauge_transform(b, p, 2);
  // away from all cutoffs: y(0, xi) = chi(-1, xi+1) + chi(1, xi-1)
  //                                  - chi(-1, xi) - chi(1, xi), halved,
  // which collapses to 2 / (4 xi^2 - 1)
  for (double x : {28.0, 30.0, 35.0, -32.0}) {
    Vec xi = v1(x);
    double structural = 0.5 * (chi_closed(-1, x + 1) + chi_closed(1, x - 1) -
                               chi_closed(-1, x) - chi_closed(1, x));
    double closed = 2.0 / (4.0 * x * x - 1.0);
    CHECK(structural == Catch::Approx(closed).epsilon(1e-12));
    Cplx got = gr.y.eval(v1(0), xi);
    CHECK(std::abs(got.imag()) < 1e-14);
    CHECK(got.real() == Catch::Approx(closed).epsilon(1e-10));
  }
}

TEST_CASE("gauge outputs stay symmetric with bounded support") {
  ScaleParameters p = scales_1d();
  Symbol b = Symbol::from_potential(two_cos());
  GaugeResult gr = gauge_transform(b, p, 3);
  auto samples = make_norm_grid(1, p.rho_n, 96, 7);
  CHECK(symmetry_residual(gr.y, samples) < 1e-12);
  CHECK(symmetry_residual(gr.w, samples) < 1e-12);
  for (const auto& psi : gr.psi) CHECK(symmetry_residual(psi, samples) < 1e-12);

  // support of y lies inside Theta_{k-tilde}
  FrequencySet base(1);
  base.add(v1(0));
  base.add(v1(1));
  base.add(v1(-1));
  FrequencySet tk = theta_sum(base, 3);
  for (const auto& th : gr.y.support()) CHECK(tk.contains(th));
  for (const auto& th : gr.w.support()) CHECK(tk.contains(th));

  // commutator-equation residual recorded per order
  for (const auto& diag : gr.diagnostics) CHECK(diag.commutator_residual < 1e-10);
}

TEST_CASE("w vanishes where a zone endpoint escapes") {
  // w^(theta, xi) = y^(theta, xi) (1 - e phi): on the annulus where e = 1,
  // nonzero w needs the zeta factor, which forces both xi and xi+theta into
  // the slab of theta.
  ScaleParameters p = scales_1d();
  Symbol b = Symbol::from_potential(two_cos());
  GaugeResult gr = gauge_transform(b, p, 3);
  double l1 = p.L(1);
  CounterRng rng(6, 0);
  int checked = 0;
  for (int i = 0; i < 4000; ++i) {
    double r = p.rho_n * (0.85 + 3.2 * rng.uniform(2 * i));
    Vec xi = v1((rng.uniform(2 * i + 1) < 0.5 ? -1 : 1) * r);
    for (const auto& th : gr.w.support()) {
      if (th.norm() <= kFreqTol) continue;
      bool xi_in = std::abs(xi.dot(th) / th.norm()) <= l1;
      bool xith_in = std::abs((xi + th).dot(th) / th.norm()) <= l1;
      if (!xi_in || !xith_in) {
        CHECK(std::abs(gr.w.eval(th, xi)) == 0.0);
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("matrix oracle: conjugation discrepancy shrinks with order") {
  ScaleParameters p = scales_1d(10.0);
  Symbol b = Symbol::from_potential(two_cos());
  FreqBasis fb = ball_basis(1, 60.0);
  REQUIRE(fb.pts.size() == 121);

  double d1 = conjugation_discrepancy(b, gauge_transform(b, p, 1), fb);
  double d2 = conjugation_discrepancy(b, gauge_transform(b, p, 2), fb);
  double d3 = conjugation_discrepancy(b, gauge_transform(b, p, 3), fb);
  INFO("discrepancies " << d1 << " " << d2 << " " << d3);
  CHECK(d1 > d2);
  CHECK(d2 > d3);
}

TEST_CASE("matrix oracle pins the transformed diagonal") {
  // Far from the resonance zones and cutoff fringes the conjugated diagonal
  // equals nu^2 + y(0, nu) up to the order-(k+1) remainder.
  ScaleParameters p = scales_1d(10.0);
  Symbol b = Symbol::from_potential(two_cos());
  GaugeResult gr = gauge_transform(b, p, 3);
  FreqBasis fb = ball_basis(1, 60.0);
  MatrixXcd h = h0_matrix(fb) + op_matrix(b, fb);
  Symbol psi_total = Symbol::zero(1);
  for (const auto& s : gr.psi) psi_total = psi_total + s;
  MatrixXcd psi = op_matrix(psi_total, fb);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es((psi + psi.adjoint()) * 0.5);
  MatrixXcd u = es.eigenvectors() *
                (Cplx(0, 1) * es.eigenvalues().array().cast<Cplx>()).exp().matrix().asDiagonal() *
                es.eigenvectors().adjoint();
  MatrixXcd conj = u.adjoint() * h * u;
  for (double nu : {40.0, 45.0, 50.0, -45.0}) {
    int idx = fb.find(v1(nu));
    REQUIRE(idx >= 0);
    Cplx diag = conj(idx, idx);
    Cplx expect = Cplx(nu * nu, 0) + gr.y.eval(v1(0), v1(nu));
    CHECK(std::abs(diag - expect) < 2e-7);
  }
}
