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
// Integrated density of states from the eigenvalue map g: the level volume
// vol{g <= lambda} equals the free ball volume corrected by the volumes of
// the two thin shells where g and |xi|^2 fall on opposite sides of lambda.
// Those corrections live inside |xi|^2 in [lambda - D, lambda + D] with D a
// bound on |g - |xi|^2|, and are estimated by uniform sampling of the shell.

#ifndef IDOS_DOS_HPP
#define IDOS_DOS_HPP

#include <vector>

#include "idos/fitting.hpp"
#include "idos/floquet.hpp"
#include "idos/spectral.hpp"

namespace idos {

struct DOSCurve {
  std::vector<DOSPoint> points;
  std::string method;  // "gauge-volume" or "floquet"

  void validate() const {
    for (size_t i = 1; i < points.size(); ++i) {
      if (points[i].lambda <= points[i - 1].lambda)
        throw Error("DOSCurve: lambdas must be strictly ascending");
      double slack = 2.0 * (points[i].stderr_ + points[i - 1].stderr_);
      if (points[i].value + slack < points[i - 1].value)
        throw Error("DOSCurve: values decrease beyond the error bars");
    }
  }
};

struct VolumeDosOptions {
  std::uint64_t samples = 1000000;
  int chunks = 1024;
  std::uint64_t seed = 1;
  unsigned workers = 0;          // 0: hardware
  double extra_margin = 1.0;     // shell half-width is w-sup bound + this
  size_t cluster_cap = 10000;
  double max_failure_fraction = 1e-3;
  double window_lo = 0.0;        // optional [lo, hi] validity window for lambda
  double window_hi = 0.0;
};

// Shell half-width: grid bound for sup |w| plus a safety margin.
inline double shell_margin(const Symbol& w, const ScaleParameters& p,
                           double extra = 1.0) {
  auto grid = make_norm_grid(w.dim(), p.rho_n, 512, 99);
  return norm_estimate(w, 0.0, 0, grid, p.beta) + extra;
}

inline DOSPoint volume_dos(const Symbol& w, const SubspaceTable& table, double lambda,
                           const VolumeDosOptions& opts = {}) {
  const ScaleParameters& p = table.scales();
  int d = table.dim();
  if (lambda <= 0) throw Error("volume_dos: lambda must be positive");
  if (opts.window_hi > 0 && (lambda < opts.window_lo || lambda > opts.window_hi))
    throw Error("volume_dos: lambda outside the validated window");

  double delta = shell_margin(w, p, opts.extra_margin);
  if (delta >= lambda) throw Error("volume_dos: shell covers the origin; lambda too small");
  double r_lo = std::sqrt(lambda - delta), r_hi = std::sqrt(lambda + delta);
  double wd = unit_ball_volume(d);
  double shell_vol = wd * (std::pow(r_hi, d) - std::pow(r_lo, d));

  unsigned workers = opts.workers ? opts.workers : default_workers();
  int chunks = std::max(1, opts.chunks);
  std::uint64_t per_chunk = opts.samples / static_cast<std::uint64_t>(chunks);
  std::uint64_t remainder = opts.samples % static_cast<std::uint64_t>(chunks);

  std::vector<double> sum_s(static_cast<size_t>(chunks), 0.0);
  std::vector<double> sum_s2(static_cast<size_t>(chunks), 0.0);
  std::vector<std::uint64_t> failures(static_cast<size_t>(chunks), 0);

  parallel_chunks(chunks, workers, [&](int c) {
    CounterRng rng(opts.seed, static_cast<std::uint64_t>(c));
    std::uint64_t n = per_chunk + (static_cast<std::uint64_t>(c) < remainder ? 1 : 0);
    double acc = 0, acc2 = 0;
    std::uint64_t fail = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      // uniform in the shell: radius by inverse cdf of r^{d-1} dr
      double u = rng.uniform(16 * i);
      double r = std::pow(std::pow(r_lo, d) + u * (std::pow(r_hi, d) - std::pow(r_lo, d)),
                          1.0 / d);
      Vec xi = r * rng.direction(16 * i + 2, d);
      double s = 0;
      try {
        double g = g_map(w, xi, table, opts.cluster_cap);
        double q = xi.squaredNorm();
        if (g < lambda && lambda < q) s = 1.0;
        else if (q < lambda && lambda < g) s = -1.0;
      } catch (const Error&) {
        ++fail;
        continue;
      }
      acc += s;
      acc2 += s * s;
    }
    sum_s[static_cast<size_t>(c)] = acc;
    sum_s2[static_cast<size_t>(c)] = acc2;
    failures[static_cast<size_t>(c)] = fail;
  });

  std::uint64_t total_fail = 0;
  for (auto f : failures) total_fail += f;
  if (static_cast<double>(total_fail) >
      opts.max_failure_fraction * static_cast<double>(opts.samples))
    throw Error("volume_dos: cluster solves failed on " + std::to_string(total_fail) +
                " samples");

  double n_eff = static_cast<double>(opts.samples - total_fail);
  double mean_s = pairwise_sum(sum_s) / n_eff;
  double mean_s2 = pairwise_sum(sum_s2) / n_eff;
  double var = std::max(0.0, mean_s2 - mean_s * mean_s);

  double inv = 1.0 / two_pi_pow(d);
  DOSPoint out;
  out.lambda = lambda;
  out.value = inv * (wd * std::pow(lambda, 0.5 * d) + shell_vol * mean_s);
  out.stderr_ = inv * shell_vol * std::sqrt(var / n_eff);
  return out;
}

inline DOSCurve volume_dos_curve(const Symbol& w, const SubspaceTable& table,
                                 const std::vector<double>& lambdas,
                                 const VolumeDosOptions& opts = {}) {
  DOSCurve curve;
  curve.method = "gauge-volume";
  for (double l : lambdas) curve.points.push_back(volume_dos(w, table, l, opts));
  curve.validate();
  return curve;
}

inline DOSCurve floquet_dos_curve(const Potential& b, const DualLattice& lat,
                                  const std::vector<double>& lambdas,
                                  BZQuadratureOptions opts = {}) {
  DOSCurve curve;
  curve.method = "floquet";
  curve.points = periodic_dos(b, lat, lambdas, opts);
  curve.validate();
  return curve;
}

// Weighted fit of a DOS curve on the half-power basis
// {lambda^{d/2}, lambda^{d/2-1}, ..., lambda^{d/2-J}}, with optional log
// multipliers for diagnostic fits.
inline FitResult fit_expansion(const DOSCurve& curve, int d, int j_max,
                               bool include_logs = false) {
  std::vector<FitTerm> terms;
  for (int j = 0; j <= j_max; ++j) {
    terms.push_back({0.5 * d - j, 0});
    if (include_logs && j >= 1) terms.push_back({0.5 * d - j, 1});
  }
  std::vector<double> xs, ys, sg;
  for (const auto& pt : curve.points) {
    xs.push_back(pt.lambda);
    ys.push_back(pt.value);
    sg.push_back(std::max(pt.stderr_, 1e-12));
  }
  if (xs.size() < 3 * terms.size())
    throw Error("fit_expansion: need at least 3 points per basis term");
  FitResult fr = wls_fit(xs, ys, sg, terms);
  if (xs.back() < 10.0 * xs.front())
    fr.warnings.push_back("lambda range spans less than one decade");
  return fr;
}

}  // namespace idos

#endif  // IDOS_DOS_HPP
