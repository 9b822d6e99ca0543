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
// Self-contained verification suites shared by the `verify` command and the
// acceptance runner: residue identity on random analytic families, cutoff
// partition reassembly, commutator-equation residuals with the matrix
// conjugation oracle, model-integral expansion checks, and the geometry
// suite (classification, clusters, patch tiling).

#ifndef IDOS_SUITES_HPP
#define IDOS_SUITES_HPP

#include <string>
#include <vector>

#include "idos/chambers.hpp"
#include "idos/gauge.hpp"
#include "idos/model_integral.hpp"
#include "idos/spectral.hpp"

namespace idos {

struct SuiteCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<SuiteCheck> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace suites {

inline Potential mathieu_potential() {
  FrequencySet fs(1);
  Vec z = Vec::Zero(1), o(1);
  o << 1;
  fs.add(z);
  fs.add(o);
  fs.add(Vec(-o));
  Potential b(fs);
  b.set_coeff(o, 1.0);
  b.set_coeff(Vec(-o), 1.0);
  return b;
}

inline ScaleParameters mathieu_scales(double rho_n = 10.0) {
  ScaleParameters p;
  p.rho_n = rho_n;
  p.k_tilde = 3;
  p.alphas = {0.45};
  p.beta = 0.40;
  return p;
}

// --- residue identity ------------------------------------------------------

struct ResidueSuiteRow {
  int id = 0, size = 0, big_k = 0;
  double direct = 0, contour = 0, rel_err = 0, zero_count = 0;
};

inline SuiteReport residue_suite(int families = 100, std::uint64_t seed = 424242,
                                 double rho = 10.0, double rel_tol = 1e-8,
                                 std::vector<ResidueSuiteRow>* rows = nullptr) {
  SuiteReport rep;
  rep.suite = "residue-identity";
  CounterRng rng(seed, 0);
  double worst_rel = 0, worst_count = 0;
  for (int trial = 0; trial < families; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform(1000 + 31 * static_cast<std::uint64_t>(trial)) * 6) % 6;
    int big_k = trial % 3;
    MatrixXcd a(n, n), bm(n, n), cm(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto draw = [&](int tag) {
          std::uint64_t c = 8000 + static_cast<std::uint64_t>(trial) * 1009 +
                            static_cast<std::uint64_t>(i) * 37 +
                            static_cast<std::uint64_t>(j) * 11 + static_cast<std::uint64_t>(tag);
          return Cplx(rng.normal(2 * c), rng.normal(2 * c + 1));
        };
        a(i, j) = draw(0);
        bm(i, j) = draw(1);
        cm(i, j) = draw(2);
      }
    // affine plus smooth, Hermitian on the real axis, |S| <= rho^2 / 10
    MatrixXcd ah = (a + a.adjoint()) * (rho * rho / 30.0 / std::max(1.0, a.norm()));
    MatrixXcd bh = (bm + bm.adjoint()) * (0.015 * rho / std::max(1.0, bm.norm()));
    MatrixXcd ch = (cm + cm.adjoint()) * (rho * rho / 200.0 / std::max(1.0, cm.norm()));
    MatrixFamily fam;
    fam.n = n;
    fam.s = [ah, bh, ch, rho](Cplx z) {
      return MatrixXcd(ah + z * bh + std::cos(z / rho) * ch);
    };
    fam.sprime = [bh, ch, rho](Cplx z) {
      return MatrixXcd(bh - std::sin(z / rho) / rho * ch);
    };
    double direct = residue_sum_direct(fam, rho, big_k);
    ContourResult cr = residue_sum_contour(fam, rho, big_k);
    double rel = std::abs(direct - cr.power_sum) / std::max(1.0, std::abs(direct));
    worst_rel = std::max(worst_rel, rel);
    worst_count = std::max(worst_count, std::abs(cr.zero_count - std::round(cr.zero_count)));
    if (rows)
      rows->push_back({trial, n, big_k, direct, cr.power_sum, rel, cr.zero_count});
  }
  rep.checks.push_back({"direct vs contour rel err <= " + std::to_string(rel_tol),
                        worst_rel <= rel_tol, "worst " + std::to_string(worst_rel)});
  rep.checks.push_back({"zero count integer to 1e-6", worst_count <= 1e-6,
                        "worst " + std::to_string(worst_count)});
  return rep;
}

// --- gauge-transform structural suite ---------------------------------------

inline SuiteReport gauge_suite(double rho_n = 10.0, int oracle_radius = 60,
                               std::uint64_t seed = 31415) {
  SuiteReport rep;
  rep.suite = "gauge-structure";
  Potential pot = mathieu_potential();
  ScaleParameters p = mathieu_scales(rho_n);
  Symbol b = Symbol::from_potential(pot);

  // partition reassembly at 1000 samples
  {
    SymbolPartition parts = partition(b, p);
    Symbol sum = parts.reassemble();
    CounterRng rng(seed, 1);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      Vec xi(1);
      xi << 40.0 * p.rho_n * (rng.uniform(static_cast<std::uint64_t>(i)) - 0.5);
      for (const auto& th : b.support())
        worst = std::max(worst, std::abs(b.eval(th, xi) - sum.eval(th, xi)));
    }
    rep.checks.push_back({"partition reassembly < 1e-14", worst < 1e-14,
                          "worst " + std::to_string(worst)});
  }

  GaugeResult gr = gauge_transform(b, p, 3);
  auto samples = make_norm_grid(1, p.rho_n, 256, seed);

  {
    double worst = 0;
    for (const auto& diag : gr.diagnostics)
      worst = std::max(worst, diag.commutator_residual);
    rep.checks.push_back({"commutator-equation residuals < 1e-10", worst < 1e-10,
                          "worst " + std::to_string(worst)});
  }
  {
    double worst = std::max(symmetry_residual(gr.y, samples), symmetry_residual(gr.w, samples));
    for (const auto& psi : gr.psi) worst = std::max(worst, symmetry_residual(psi, samples));
    rep.checks.push_back({"symbol symmetry < 1e-12", worst < 1e-12,
                          "worst " + std::to_string(worst)});
  }
  {
    FrequencySet tk = theta_sum(pot.freqs(), p.k_tilde);
    bool ok = true;
    for (const auto& th : gr.y.support())
      if (!tk.contains(th)) ok = false;
    for (const auto& th : gr.w.support())
      if (!tk.contains(th)) ok = false;
    rep.checks.push_back({"y support inside Theta_k", ok, ""});
  }
  {
    // w vanishes on the shell when either zone endpoint escapes the slab
    double l1 = p.L(1);
    CounterRng rng(seed, 2);
    bool ok = true;
    int checked = 0;
    for (int i = 0; i < 4000; ++i) {
      double r =
          p.rho_n * std::sqrt(0.7 + (17.5 - 0.7) * rng.uniform(2 * static_cast<std::uint64_t>(i)));
      Vec xi(1);
      xi << (rng.uniform(2 * static_cast<std::uint64_t>(i) + 1) < 0.5 ? -r : r);
      for (const auto& th : gr.w.support()) {
        if (th.norm() <= kFreqTol) continue;
        bool xi_in = std::abs(xi.dot(th) / th.norm()) <= l1;
        bool xith_in = std::abs((xi + th).dot(th) / th.norm()) <= l1;
        if (!xi_in || !xith_in) {
          ++checked;
          if (std::abs(gr.w.eval(th, xi)) != 0.0) ok = false;
        }
      }
    }
    rep.checks.push_back({"w support law on the shell", ok && checked > 100,
                          std::to_string(checked) + " points checked"});
  }
  {
    FreqBasis fb = ball_basis(1, oracle_radius);
    double d1 = conjugation_discrepancy(b, gauge_transform(b, p, 1), fb);
    double d2 = conjugation_discrepancy(b, gauge_transform(b, p, 2), fb);
    double d3 = conjugation_discrepancy(b, gr, fb);
    rep.checks.push_back({"conjugation discrepancy decreases 1 -> 2 -> 3",
                          d1 > d2 && d2 > d3,
                          "d1 " + std::to_string(d1) + " d2 " + std::to_string(d2) + " d3 " +
                              std::to_string(d3)});
  }
  return rep;
}

// --- model integral ----------------------------------------------------------

inline SuiteReport model_integral_suite(int random_specs = 20, std::uint64_t seed = 2022) {
  SuiteReport rep;
  rep.suite = "model-integral";
  {
    double gamma = 0.8, bcoef = 1.3, l = 6.0;
    ModelIntegralSpec s;
    s.big_k = 1;
    s.n_exp = {0};
    ModelIntegralSpec::Factor f;
    f.l = l;
    f.k = 1;
    f.b = {bcoef};
    f.c = 1.0;
    f.kp = 0;
    f.bt = {0.0};
    s.factors = {f};
    s.gamma = gamma;
    std::vector<double> rhos;
    for (int i = 0; i < 30; ++i) rhos.push_back(60.0 * std::pow(1.18, i));
    SeriesCheck sc = model_integral_series(s, rhos, 5);
    double got_log = 0, got_pow = 0;
    for (size_t j = 0; j < sc.fit.terms.size(); ++j) {
      if (sc.fit.terms[j].power == -1.0 && sc.fit.terms[j].log_pow == 1)
        got_log = sc.fit.coefficients[static_cast<Eigen::Index>(j)];
      if (sc.fit.terms[j].power == -1.0 && sc.fit.terms[j].log_pow == 0)
        got_pow = sc.fit.coefficients[static_cast<Eigen::Index>(j)];
    }
    double expect_log = 1.0 / bcoef;
    double expect_pow = std::log(gamma * bcoef / l) / bcoef;
    double err = std::max(std::abs(got_log / expect_log - 1.0),
                          std::abs(got_pow / expect_pow - 1.0));
    rep.checks.push_back({"K=1 log and power coefficients to 1e-6", err < 1e-6,
                          "rel err " + std::to_string(err)});
  }
  {
    CounterRng rng(seed, 0);
    int passed = 0;
    double worst = 0;
    for (int trial = 0; trial < random_specs; ++trial) {
      ModelIntegralSpec s;
      s.big_k = 2;
      auto u = [&](int t) {
        return rng.uniform(static_cast<std::uint64_t>(trial) * 977 + static_cast<std::uint64_t>(t));
      };
      s.n_exp = {static_cast<int>(u(0) * 2), static_cast<int>(u(1) * 2)};
      int tfac = 1 + static_cast<int>(u(2) * 2);
      for (int t = 0; t < tfac; ++t) {
        ModelIntegralSpec::Factor f;
        f.l = 2.5 * (2.0 + 3.0 * u(3 + 9 * t));
        f.k = 1 + static_cast<int>(u(4 + 9 * t) * 2);
        f.b = {0.5 + u(5 + 9 * t), 0.5 + u(6 + 9 * t)};
        f.c = 0.5 + u(7 + 9 * t);
        f.kp = static_cast<int>(u(8 + 9 * t) * 2);
        f.bt = {0.5 + u(9 + 9 * t), 0.5 + u(10 + 9 * t)};
        s.factors.push_back(f);
      }
      s.gamma = 0.4 + 0.6 * u(40);
      std::vector<double> rhos;
      for (int i = 0; i < 36; ++i) rhos.push_back(400.0 * std::pow(1.16, i));
      SeriesCheck sc = model_integral_series(s, rhos, 6, 1e-4, 1e-9);
      if (sc.pass) ++passed;
      worst = std::max(worst, sc.fit.residual_rel);
    }
    rep.checks.push_back({"random K=2 specs fit residual < 1e-4 (" +
                              std::to_string(random_specs) + " specs)",
                          passed == random_specs,
                          std::to_string(passed) + "/" + std::to_string(random_specs)});
  }
  return rep;
}

// --- geometry ---------------------------------------------------------------

inline SuiteReport geometry_suite(int classify_samples = 10000, int tile_samples = 100000,
                                  std::uint64_t seed = 7777) {
  SuiteReport rep;
  rep.suite = "geometry";

  // d = 2 square-lattice table in the valid separation regime
  FrequencySet fs(2);
  fs.add(Vec::Zero(2));
  Vec e1(2), e2(2);
  e1 << 1, 0;
  e2 << 0, 1;
  fs.add(e1);
  fs.add(Vec(-e1));
  fs.add(e2);
  fs.add(Vec(-e2));
  ScaleParameters p;
  p.rho_n = 2e4;
  p.k_tilde = 2;
  p.alphas = {0.05, 0.22};
  p.beta = 0.04;
  SubspaceTable table(theta_sum(fs, 2), p);
  rep.checks.push_back({"separation margin >= 1", separation_margin(table) >= 1.0,
                        "margin " + std::to_string(separation_margin(table))});

  CounterRng rng(seed, 0);
  {
    bool unique = true;
    for (int i = 0; i < classify_samples; ++i) {
      double r = 3.0 + 120.0 * rng.uniform(3 * static_cast<std::uint64_t>(i));
      Vec xi = r * rng.direction(3 * static_cast<std::uint64_t>(i) + 1, 2);
      SubspaceTable::Scratch sc;
      sc.memo.assign(table.all().size(), -1);
      int hits = 0;
      for (int idx = 0; idx < static_cast<int>(table.all().size()); ++idx) {
        if (!table.in_xi1(xi, idx, sc)) continue;
        bool covered = false;
        for (int par : table.at(idx).parents)
          if (table.in_xi1(xi, par, sc)) covered = true;
        if (!covered) ++hits;
      }
      if (hits != 1) unique = false;
    }
    rep.checks.push_back({"classify total and single-valued", unique,
                          std::to_string(classify_samples) + " points"});
  }
  {
    bool closure_ok = true, diam_ok = true, member_ok = true;
    int nontrivial = 0;
    for (int i = 0; i < 2000; ++i) {
      double r = 10.0 + 100.0 * rng.uniform(91000 + 3 * static_cast<std::uint64_t>(i));
      Vec xi = r * rng.direction(91000 + 3 * static_cast<std::uint64_t>(i) + 1, 2);
      if (table.classify(xi) == table.full_subspace()) continue;
      Cluster c;
      try {
        c = cluster(xi, table, 10000, /*verify=*/false);
      } catch (const Error&) {
        member_ok = false;
        continue;
      }
      int m = table.at(c.subspace).m;
      double bound = m == 0 ? 0.0 : 2.0 * std::sqrt(m) * p.L(std::max(m, 1));
      for (const auto& a : c.points) {
        if (table.classify(a) != c.subspace) member_ok = false;
        for (const auto& b2 : c.points)
          if ((a - b2).norm() > bound + 1e-9) diam_ok = false;
      }
      if (c.points.size() > 1) {
        ++nontrivial;
        Cluster c2 = cluster(c.points.back(), table, 10000, false);
        if (c2.points.size() != c.points.size()) closure_ok = false;
      }
    }
    rep.checks.push_back({"cluster closure is an equivalence class", closure_ok,
                          std::to_string(nontrivial) + " nontrivial clusters"});
    rep.checks.push_back({"cluster diameter <= 2 sqrt(m) L_m", diam_ok, ""});
    rep.checks.push_back({"cluster points stay in their region", member_ok, ""});
  }

  // d = 3 patch tiling on the doubled cubic set
  {
    FrequencySet fc(3);
    fc.add(Vec::Zero(3));
    for (int i = 0; i < 3; ++i) {
      Vec e = Vec::Zero(3);
      e[i] = 1;
      fc.add(e);
      fc.add(Vec(-e));
    }
    ScaleParameters pc;
    pc.rho_n = 1e5;
    pc.k_tilde = 2;
    pc.alphas = {0.03, 0.09, 0.16};
    pc.beta = 0.02;
    SubspaceTable tc(theta_sum(fc, 2), pc);
    RegionDecomposition rd = decompose_region(tc, tc.zero_subspace());
    bool tile_ok = true, cert_ok = true;
    int tested = 0, double_hits = 0;
    for (int i = 0; i < tile_samples && tested < tile_samples; ++i) {
      Vec u = rng.direction(500000 + static_cast<std::uint64_t>(i), 3);
      int chamber = -1;
      for (size_t c = 0; c < rd.chambers.size(); ++c) {
        bool inside = true;
        for (Eigen::Index k = 0; k < rd.directions.cols(); ++k) {
          if (u.dot(rd.directions.col(k)) * rd.chambers[c].sign[static_cast<size_t>(k)] < 1e-7) {
            inside = false;
            break;
          }
        }
        if (inside) {
          chamber = static_cast<int>(c);
          break;
        }
      }
      if (chamber < 0 || rd.chambers[static_cast<size_t>(chamber)].kind == ChamberKind::kGeneral)
        continue;
      ++tested;
      int hits = 0;
      bool on_wall = false;
      for (int pid : rd.chambers[static_cast<size_t>(chamber)].patches) {
        const auto& patch = rd.patches[static_cast<size_t>(pid)];
        if (patch.contains_dir(u, 1e-9)) {
          ++hits;
          if ((patch.mu.transpose() * u).cwiseAbs().minCoeff() < 1e-7) on_wall = true;
        }
      }
      if (hits < 1) tile_ok = false;
      if (hits > 1) {
        ++double_hits;
        if (!on_wall) tile_ok = false;
      }
    }
    for (const auto& patch : rd.patches) {
      if (patch.n >= 2 && patch.min_side < rd.floor) cert_ok = false;
      if (patch.n >= 3 && patch.min_angle < rd.floor) cert_ok = false;
    }
    rep.checks.push_back({"patches tile their chambers", tile_ok && tested > tile_samples / 5,
                          std::to_string(tested) + " samples, " + std::to_string(double_hits) +
                              " wall hits"});
    rep.checks.push_back({"angles-and-sides certificates >= floor", cert_ok,
                          "floor " + std::to_string(rd.floor)});
  }
  return rep;
}

}  // namespace suites

}  // namespace idos

#endif  // IDOS_SUITES_HPP
