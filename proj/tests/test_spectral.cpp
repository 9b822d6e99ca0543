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
#include "idos/spectral.hpp"

using namespace idos;

namespace {

Vec v1(double x) {
  Vec v(1);
  v << x;
  return v;
}

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Cluster make_cluster(std::vector<Vec> pts, const Vec& seed) {
  Cluster c;
  c.seed = seed;
  c.points = std::move(pts);
  return c;
}

MatrixFamily const_family(const MatrixXcd& s0) {
  MatrixFamily f;
  f.n = static_cast<int>(s0.rows());
  f.s = [s0](Cplx) { return s0; };
  f.sprime = [n = f.n](Cplx) { return MatrixXcd::Zero(n, n); };
  return f;
}

}  // namespace

TEST_CASE("assemble: singleton, ladder, and constant shift") {
  Symbol w0 = Symbol::zero(1);
  Cluster single = make_cluster({v1(4.0)}, v1(4.0));
  single.subspace = 0;
  ClusterOperator op = assemble(w0, single);
  CHECK(op.matrix(0, 0).real() == Catch::Approx(16.0));
  CHECK(op.seed_rank == 0);

  // raw 2cos x on a two-point cluster {nu, nu+1}
  Symbol b(1);
  b.add_term(v1(1), CoefFn::constant(1.0));
  b.add_term(v1(-1), CoefFn::constant(1.0));
  double nu = 3.0;
  Cluster pair = make_cluster({v1(nu), v1(nu + 1)}, v1(nu));
  ClusterOperator op2 = assemble(b, pair);
  CHECK(op2.matrix(0, 0).real() == Catch::Approx(nu * nu));
  CHECK(op2.matrix(1, 1).real() == Catch::Approx((nu + 1) * (nu + 1)));
  CHECK(op2.matrix(0, 1).real() == Catch::Approx(1.0));
  CHECK(op2.matrix(1, 0).real() == Catch::Approx(1.0));

  // constant symbol shifts the diagonal
  Symbol c = Symbol::constant(1, 0.7);
  ClusterOperator op3 = assemble(c, pair);
  CHECK(op3.matrix(0, 0).real() == Catch::Approx(nu * nu + 0.7));
  CHECK(op3.matrix(0, 1).real() == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("assemble rejects asymmetric symbols") {
  Symbol bad(1);
  bad.add_term(v1(1), CoefFn::constant(1.0));
  bad.add_term(v1(-1), CoefFn::constant(0.2));
  Cluster pair = make_cluster({v1(2.0), v1(3.0)}, v1(2.0));
  CHECK_THROWS_AS(assemble(bad, pair), Error);
}

TEST_CASE("trace equals eigenvalue sum") {
  Symbol b(1);
  b.add_term(v1(1), CoefFn::constant(Cplx(0.4, 0.1)));
  b.add_term(v1(-1), CoefFn::constant(Cplx(0.4, -0.1)));
  b.add_term(v1(0), CoefFn::constant(0.3));
  std::vector<Vec> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(v1(2.0 + i));
  Cluster cl = make_cluster(pts, pts[0]);
  ClusterOperator op = assemble(b, cl);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(op.matrix, Eigen::EigenvaluesOnly);
  double tr = op.matrix.trace().real();
  double sum = es.eigenvalues().sum();
  CHECK(tr == Catch::Approx(sum).epsilon(1e-9));
}

TEST_CASE("g_map on free and shifted symbols") {
  FrequencySet fs(2);
  fs.add(v2(0, 0));
  fs.add(v2(1, 0));
  fs.add(v2(-1, 0));
  fs.add(v2(0, 1));
  fs.add(v2(0, -1));
  ScaleParameters p;
  p.rho_n = 2e4;
  p.k_tilde = 2;
  p.alphas = {0.05, 0.22};
  p.beta = 0.04;
  SubspaceTable t(theta_sum(fs, 2), p);

  Symbol w0 = Symbol::zero(2);
  CounterRng rng(21, 0);
  for (int i = 0; i < 50; ++i) {
    Vec xi = (30.0 + 50.0 * rng.uniform(2 * i)) * rng.direction(2 * i + 1, 2);
    CHECK(g_map(w0, xi, t) == Catch::Approx(xi.squaredNorm()).epsilon(1e-12));
  }

  Symbol c = Symbol::constant(2, 1.3);
  Vec far = v2(61.0, 37.5);
  CHECK(g_map(c, far, t) == Catch::Approx(far.squaredNorm() + 1.3));
}

TEST_CASE("g_map two-point closed form") {
  // cluster {nu, nu+theta} with symmetric off-diagonal t: the smaller-|.|
  // point maps to the smaller eigenvalue
  Symbol b(1);
  b.add_term(v1(1), CoefFn::constant(0.8));
  b.add_term(v1(-1), CoefFn::constant(0.8));
  double nu = 2.0;
  Cluster pair = make_cluster({v1(nu), v1(nu + 1)}, v1(nu));
  ClusterOperator op = assemble(b, pair);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(op.matrix, Eigen::EigenvaluesOnly);
  double a = nu * nu, d = (nu + 1) * (nu + 1), t = 0.8;
  double lo = 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + t * t);
  CHECK(es.eigenvalues()[op.seed_rank] == Catch::Approx(lo));
}

TEST_CASE("g is monotone along the radial coordinate") {
  Symbol b(1);
  b.add_term(v1(1), CoefFn::constant(0.9));
  b.add_term(v1(-1), CoefFn::constant(0.9));
  auto g_at = [&](double r) {
    Cluster pair = make_cluster({v1(r), v1(r + 1)}, v1(r));
    ClusterOperator op = assemble(b, pair);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(op.matrix, Eigen::EigenvaluesOnly);
    return es.eigenvalues()[op.seed_rank];
  };
  double prev = g_at(2.0);
  for (double r = 2.1; r < 8.0; r += 0.1) {
    double cur = g_at(r);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("residue sums for constant families") {
  double rho = 10.0;
  // S = 0, n x n, K+1 = 2 -> n rho^2
  MatrixXcd z3 = MatrixXcd::Zero(3, 3);
  CHECK(residue_sum_direct(const_family(z3), rho, 1) == Catch::Approx(3.0 * rho * rho).epsilon(1e-10));

  // S = diag(0, c), K+1 = 2 -> rho^2 + (rho^2 - c)
  double c = 5.0;
  MatrixXcd dc = MatrixXcd::Zero(2, 2);
  dc(1, 1) = c;
  CHECK(residue_sum_direct(const_family(dc), rho, 1) ==
        Catch::Approx(2.0 * rho * rho - c).epsilon(1e-10));

  // contour route: S = 0, 1 x 1, K+1 = 1 -> rho
  MatrixXcd z1 = MatrixXcd::Zero(1, 1);
  ContourResult cr = residue_sum_contour(const_family(z1), rho, 0);
  CHECK(cr.power_sum == Catch::Approx(rho).epsilon(1e-9));
  CHECK(cr.zero_count == Catch::Approx(1.0).margin(1e-6));

  ContourResult cr2 = residue_sum_contour(const_family(dc), rho, 1);
  CHECK(cr2.power_sum == Catch::Approx(2.0 * rho * rho - c).epsilon(1e-8));
  CHECK(cr2.zero_count == Catch::Approx(2.0).margin(1e-6));
}

TEST_CASE("residue identity on randomized analytic families") {
  CounterRng rng(1234, 0);
  double rho = 10.0;
  int done = 0;
  for (int trial = 0; trial < 30; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform(9000 + trial) * 6) % 6;
    int big_k = trial % 3;
    MatrixXcd a(n, n), bm(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        a(i, j) = Cplx(rng.normal(100 * static_cast<std::uint64_t>(trial * 97 + i * 13 + j)),
                       rng.normal(100 * static_cast<std::uint64_t>(trial * 89 + i * 17 + j) + 1));
        bm(i, j) = Cplx(rng.normal(100 * static_cast<std::uint64_t>(trial * 71 + i * 19 + j) + 2),
                        rng.normal(100 * static_cast<std::uint64_t>(trial * 61 + i * 23 + j) + 3));
      }
    MatrixXcd ah = (a + a.adjoint()) * (rho * rho / 40.0 / std::max(1.0, a.norm()));
    MatrixXcd bh = (bm + bm.adjoint()) * (0.02 * rho / std::max(1.0, bm.norm()));
    MatrixFamily fam;
    fam.n = n;
    fam.s = [ah, bh](Cplx zz) { return MatrixXcd(ah + zz * bh); };
    fam.sprime = [bh](Cplx) { return bh; };
    double direct = residue_sum_direct(fam, rho, big_k);
    ContourResult cr = residue_sum_contour(fam, rho, big_k);
    CHECK(std::abs(direct - cr.power_sum) <= 1e-8 * std::max(1.0, std::abs(direct)));
    CHECK(cr.zero_count == Catch::Approx(static_cast<double>(n)).margin(1e-6));
    ++done;
  }
  CHECK(done == 30);
}

TEST_CASE("residue direct detects a non-monotone family") {
  // S(r) = -r^2 diag(...) makes an eigenbranch flat
  MatrixFamily fam;
  fam.n = 1;
  fam.s = [](Cplx z) {
    MatrixXcd m(1, 1);
    m(0, 0) = -z * z;
    return m;
  };
  fam.sprime = [](Cplx z) {
    MatrixXcd m(1, 1);
    m(0, 0) = -2.0 * z;
    return m;
  };
  CHECK_THROWS_AS(residue_sum_direct(fam, 10.0, 0), Error);
}

TEST_CASE("gauge pipeline feeds Hermitian cluster operators") {
  // end-to-end: w from the gauge transform assembles to Hermitian matrices
  FrequencySet fs(1);
  fs.add(v1(0));
  fs.add(v1(1));
  fs.add(v1(-1));
  Potential pot(fs);
  pot.set_coeff(v1(1), 1.0);
  pot.set_coeff(v1(-1), 1.0);
  ScaleParameters p;
  p.rho_n = 10.0;
  p.k_tilde = 3;
  p.alphas = {0.45};
  p.beta = 0.40;
  GaugeResult gr = gauge_transform(Symbol::from_potential(pot), p, 3);
  SubspaceTable t(theta_sum(fs, 3), p);
  CounterRng rng(55, 0);
  for (int i = 0; i < 40; ++i) {
    double x = 8.0 + 30.0 * rng.uniform(2 * i);
    double g = g_map(gr.w, v1(x), t);
    CHECK(g == Catch::Approx(x * x).margin(1.0));
  }
}
