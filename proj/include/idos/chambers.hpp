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
// Connected components of a resonance region, shifted cylindrical
// coordinates, and the simplex decomposition of a region's spherical
// cross-section.
//
// Inside the orthogonal complement of the generating subspace V, the region
// splits into chambers indexed by the sign pattern of <eta, mu_i> over the
// projected directions mu_i = n(theta_{V-perp}).  Each chamber is convex; its
// spherical cross-section is a point (K=0), an arc (K=1) or a convex
// spherical polygon (K=2), which is cut into simplex patches.

#ifndef IDOS_CHAMBERS_HPP
#define IDOS_CHAMBERS_HPP

#include <limits>
#include <optional>
#include <vector>

#include "idos/geometry.hpp"

namespace idos {

enum class ChamberKind { kSimplex, kCone, kGeneral };

struct SimplexPatch {
  int subspace = -1;
  int chamber = -1;
  int m = 0;           // dim V
  int n = 0;           // dim V-perp = K+1
  MatrixXd vframe;     // d x m
  MatrixXd pframe;     // d x n
  Vec apex;            // in V-perp coordinates
  MatrixXd mu;         // n x n inward unit face normals (columns)
  MatrixXd verts;      // n x n unit vertex directions (columns)
  MatrixXd amat;       // constraint matrix: ||amat * sin(Phi)|| == 1 on the patch
  double min_side = std::numeric_limits<double>::infinity();
  double min_angle = std::numeric_limits<double>::infinity();
  double diameter = 0.0;

  bool contains_dir(const Vec& u, double tol = 1e-9) const {
    return ((mu.transpose() * u).array() >= -tol).all();
  }
};

struct Chamber {
  ChamberKind kind = ChamberKind::kGeneral;
  std::vector<int> sign;          // +-1 per direction
  MatrixXd tight;                 // n x J inward unit normals of tight faces
  std::vector<int> tight_dirs;    // direction index per tight face
  Vec apex;                       // valid unless kGeneral
  double apex_residual = 0.0;
  Vec witness;                    // interior unit direction
  std::vector<Vec> poly;          // K=2: vertex cycle of the cross-section
  std::vector<int> patches;       // indices into RegionDecomposition::patches
};

struct RegionDecomposition {
  int subspace = -1;
  int m = 0;
  int n = 0;
  MatrixXd vframe;
  MatrixXd pframe;
  MatrixXd directions;  // n x D distinct projected direction lines
  std::vector<Chamber> chambers;
  std::vector<SimplexPatch> patches;
  int general_chambers = 0;
  double floor = 0.0;   // angles-and-sides floor the patches were checked against
  bool lemma_pc_certified = true;
};

struct DecomposeOptions {
  double max_diameter = 0.5;  // radians; wider patches are bisected
  double apex_tol = 1e-9;
  double floor = -1.0;        // < 0: use s(rho)/4 from the table
};

namespace detail {

// min ||G b - t||  s.t.  b >= 0, by projected gradient.  Sizes here are tiny.
inline double nnls_residual(const MatrixXd& g, const Vec& t, Vec* sol = nullptr) {
  Eigen::Index n = g.cols();
  Vec b = Vec::Zero(n);
  MatrixXd gtg = g.transpose() * g;
  Vec gtt = g.transpose() * t;
  double lip = gtg.trace();
  if (lip <= 0) return t.norm();
  double step = 1.0 / lip;
  for (int it = 0; it < 5000; ++it) {
    Vec grad = gtg * b - gtt;
    Vec nb = (b - step * grad).cwiseMax(0.0);
    if ((nb - b).lpNorm<Eigen::Infinity>() < 1e-15 * (1.0 + b.lpNorm<Eigen::Infinity>())) {
      b = nb;
      break;
    }
    b = nb;
  }
  if (sol) *sol = b;
  return (g * b - t).norm();
}

inline Vec rot90(const Vec& v) {
  Vec w(2);
  w << -v[1], v[0];
  return w;
}

struct SphPoly {
  std::vector<Vec> v;  // unit 3-vectors, oriented cycle
};

// Splits a convex spherical polygon by the great circle with normal mu.
// Returns the parts with <x, mu> >= 0 and <= 0; either may be empty.
inline std::pair<SphPoly, SphPoly> split_poly(const SphPoly& p, const Vec& mu,
                                              double tol = 1e-12) {
  SphPoly plus, minus;
  size_t n = p.v.size();
  std::vector<double> s(n);
  for (size_t i = 0; i < n; ++i) s[i] = p.v[i].dot(mu);
  bool has_plus = false, has_minus = false;
  for (double x : s) {
    has_plus = has_plus || x > tol;
    has_minus = has_minus || x < -tol;
  }
  if (!has_minus) return {p, SphPoly{}};
  if (!has_plus) return {SphPoly{}, p};
  auto push = [](SphPoly& poly, const Vec& x) {
    if (poly.v.empty() || (poly.v.back() - x).norm() > 1e-12) poly.v.push_back(x);
  };
  for (size_t i = 0; i < n; ++i) {
    size_t j = (i + 1) % n;
    if (s[i] >= -tol) push(plus, p.v[i]);
    if (s[i] <= tol) push(minus, p.v[i]);
    bool crosses = (s[i] > tol && s[j] < -tol) || (s[i] < -tol && s[j] > tol);
    if (crosses) {
      // zero of <x, mu> on the arc, as an explicitly positive combination
      Vec x = std::abs(s[j]) * p.v[i] + std::abs(s[i]) * p.v[j];
      x.normalize();
      push(plus, x);
      push(minus, x);
    }
  }
  auto dedup_closure = [](SphPoly& poly) {
    if (poly.v.size() >= 2 && (poly.v.front() - poly.v.back()).norm() < 1e-12)
      poly.v.pop_back();
    if (poly.v.size() < 3) poly.v.clear();
  };
  dedup_closure(plus);
  dedup_closure(minus);
  return {plus, minus};
}

inline Vec poly_center(const SphPoly& p) {
  Vec c = Vec::Zero(3);
  for (const auto& x : p.v) c += x;
  double n = c.norm();
  if (n < 1e-12) throw Error("poly_center: degenerate polygon");
  return c / n;
}

inline double geodesic(const Vec& a, const Vec& b) {
  return std::atan2((a - b * (a.dot(b))).norm(), a.dot(b));
}

// Interior spherical angle of triangle (a; b, c) at vertex a.
inline double sph_angle(const Vec& a, const Vec& b, const Vec& c) {
  Vec tb = b - a * a.dot(b);
  Vec tc = c - a * a.dot(c);
  double nb = tb.norm(), nc = tc.norm();
  if (nb < 1e-14 || nc < 1e-14) return 0.0;
  double cosang = tb.dot(tc) / (nb * nc);
  return std::acos(std::clamp(cosang, -1.0, 1.0));
}

}  // namespace detail

// Distinct projected direction lines n(theta_{V-perp}) for theta outside V,
// expressed in V-perp coordinates.  Lines are deduplicated up to sign.
inline MatrixXd region_directions(const SubspaceTable& table, int vidx,
                                  const MatrixXd& pframe) {
  const Subspace& v = table.at(vidx);
  int n = static_cast<int>(pframe.cols());
  std::vector<Vec> dirs;
  for (const auto& th : table.theta().nonzero()) {
    Vec perp = pframe.transpose() * th;
    double norm = perp.norm();
    if (norm <= 1e-9 * th.norm()) continue;  // theta in V
    Vec u = perp / norm;
    // canonical sign: first coordinate of significant size positive
    for (int i = 0; i < n; ++i) {
      if (std::abs(u[i]) > 1e-9) {
        if (u[i] < 0) u = -u;
        break;
      }
    }
    bool dup = false;
    for (const auto& w : dirs)
      if ((w - u).lpNorm<Eigen::Infinity>() < 1e-9) {
        dup = true;
        break;
      }
    if (!dup) dirs.push_back(u);
  }
  (void)v;
  if (dirs.empty()) throw Error("region_directions: no directions outside subspace");
  MatrixXd out(n, static_cast<Eigen::Index>(dirs.size()));
  for (size_t i = 0; i < dirs.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = dirs[i];
  return out;
}

namespace detail {

// Builds one simplex patch from vertex directions (columns of w).
inline SimplexPatch make_patch(const RegionDecomposition& rd, int chamber_id,
                               const Vec& apex, const MatrixXd& w) {
  SimplexPatch p;
  p.subspace = rd.subspace;
  p.chamber = chamber_id;
  p.m = rd.m;
  p.n = rd.n;
  p.vframe = rd.vframe;
  p.pframe = rd.pframe;
  p.apex = apex;
  p.verts = w;
  int n = p.n;
  p.mu.resize(n, n);
  if (n == 1) {
    p.mu(0, 0) = w(0, 0);
  } else if (n == 2) {
    for (int q = 0; q < 2; ++q) {
      Vec other = w.col(1 - q);
      Vec nu = rot90(other);
      if (nu.dot(w.col(q)) < 0) nu = -nu;
      p.mu.col(q) = nu;
    }
  } else {
    for (int q = 0; q < 3; ++q) {
      Eigen::Vector3d a = w.col((q + 1) % 3), b = w.col((q + 2) % 3);
      Vec nu = Vec(a.cross(b));
      double norm = nu.norm();
      if (norm < 1e-14) throw Error("make_patch: degenerate triangle");
      nu /= norm;
      if (nu.dot(w.col(q)) < 0) nu = -nu;
      p.mu.col(q) = nu;
    }
  }
  // Certificates.
  if (n >= 2) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        p.min_side = std::min(p.min_side, geodesic(w.col(i), w.col(j)));
    p.diameter = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) p.diameter = std::max(p.diameter, geodesic(w.col(i), w.col(j)));
  }
  if (n == 3) {
    for (int i = 0; i < 3; ++i)
      p.min_angle = std::min(p.min_angle, sph_angle(w.col(i), w.col((i + 1) % 3), w.col((i + 2) % 3)));
  }
  // Constraint matrix: orthonormal basis with last axis through the patch.
  Vec center = w.rowwise().sum();
  center.normalize();
  MatrixXd e(n, n);
  if (n == 1) {
    e(0, 0) = center[0];
  } else {
    // Householder completion of `center` into an orthonormal basis.
    Eigen::HouseholderQR<MatrixXd> qr(center);
    MatrixXd q = qr.householderQ();
    e.col(n - 1) = q.col(0).dot(center) > 0 ? q.col(0) : Vec(-q.col(0));
    for (int i = 1; i < n; ++i) e.col(i - 1) = q.col(i);
  }
  p.amat = (p.mu.fullPivLu().solve(e)).transpose();
  return p;
}

inline void subdivide_and_store(RegionDecomposition& rd, Chamber& ch, const Vec& apex,
                                MatrixXd w, double max_diam, int depth = 0) {
  SimplexPatch p = make_patch(rd, static_cast<int>(&ch - rd.chambers.data()), apex, w);
  if (p.diameter > max_diam && depth < 12 && rd.n >= 2) {
    // bisect the longest edge at its geodesic midpoint
    int bi = 0, bj = 1;
    double best = -1;
    for (int i = 0; i < rd.n; ++i)
      for (int j = i + 1; j < rd.n; ++j) {
        double g = geodesic(w.col(i), w.col(j));
        if (g > best) {
          best = g;
          bi = i;
          bj = j;
        }
      }
    Vec mid = (w.col(bi) + w.col(bj)).normalized();
    MatrixXd w1 = w, w2 = w;
    w1.col(bj) = mid;
    w2.col(bi) = mid;
    subdivide_and_store(rd, ch, apex, w1, max_diam, depth + 1);
    subdivide_and_store(rd, ch, apex, w2, max_diam, depth + 1);
    return;
  }
  ch.patches.push_back(static_cast<int>(rd.patches.size()));
  rd.patches.push_back(std::move(p));
}

}  // namespace detail

// Decomposes the resonance region of a proper subspace into chambers and
// simplex patches.  Chambers without a common apex are reported kGeneral and
// carry no patches.
inline RegionDecomposition decompose_region(const SubspaceTable& table, int vidx,
                                            DecomposeOptions opts = {}) {
  const Subspace& v = table.at(vidx);
  int d = table.dim();
  if (v.m >= d) throw Error("decompose_region: subspace must be proper");

  RegionDecomposition rd;
  rd.subspace = vidx;
  rd.m = v.m;
  rd.n = d - v.m;
  rd.vframe = v.frame;
  if (v.m == 0) {
    rd.pframe = MatrixXd::Identity(d, d);
  } else {
    Eigen::HouseholderQR<MatrixXd> qr(v.frame);
    MatrixXd q = qr.householderQ();
    rd.pframe = q.rightCols(rd.n);
  }
  rd.directions = region_directions(table, vidx, rd.pframe);
  rd.floor = opts.floor >= 0 ? opts.floor : table.min_pair_sine() / 4.0;
  const double big_l = table.scales().L(v.m + 1);
  int n = rd.n;
  Eigen::Index ndirs = rd.directions.cols();

  struct RawChamber {
    Vec witness;
    std::vector<Vec> poly;  // n == 3 only
  };
  std::vector<RawChamber> raw;

  if (n == 1) {
    for (int s : {+1, -1}) {
      RawChamber rc;
      rc.witness = Vec::Constant(1, static_cast<double>(s));
      raw.push_back(rc);
    }
  } else if (n == 2) {
    // boundary ray angles of all lines W(mu_i)
    std::vector<double> angs;
    for (Eigen::Index i = 0; i < ndirs; ++i) {
      Vec w = detail::rot90(rd.directions.col(i));
      double a = std::atan2(w[1], w[0]);
      angs.push_back(a);
      angs.push_back(a > 0 ? a - M_PI : a + M_PI);
    }
    std::sort(angs.begin(), angs.end());
    angs.erase(std::unique(angs.begin(), angs.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               angs.end());
    size_t ns = angs.size();
    for (size_t i = 0; i < ns; ++i) {
      double a0 = angs[i];
      double a1 = i + 1 < ns ? angs[i + 1] : angs[0] + 2 * M_PI;
      double mid = 0.5 * (a0 + a1);
      RawChamber rc;
      rc.witness = Vec(2);
      rc.witness << std::cos(mid), std::sin(mid);
      raw.push_back(rc);
    }
  } else {
    // pick three well-spread independent normals to seed the octants
    std::vector<Eigen::Index> seed{0};
    {
      double best = -1;
      Eigen::Index pick = 1;
      for (Eigen::Index i = 1; i < ndirs; ++i) {
        double score = 1 - std::abs(rd.directions.col(0).dot(rd.directions.col(i)));
        if (score > best) {
          best = score;
          pick = i;
        }
      }
      seed.push_back(pick);
      best = -1;
      Eigen::Index pick2 = -1;
      for (Eigen::Index i = 0; i < ndirs; ++i) {
        if (i == seed[0] || i == seed[1]) continue;
        MatrixXd m3(3, 3);
        m3.col(0) = rd.directions.col(seed[0]);
        m3.col(1) = rd.directions.col(seed[1]);
        m3.col(2) = rd.directions.col(i);
        double det = std::abs(m3.determinant());
        if (det > best) {
          best = det;
          pick2 = i;
        }
      }
      if (pick2 < 0 || best < 1e-9)
        throw Error("decompose_region: directions do not span the complement");
      seed.push_back(pick2);
    }
    Vec m1 = rd.directions.col(seed[0]), m2 = rd.directions.col(seed[1]),
        m3 = rd.directions.col(seed[2]);
    auto cr = [](const Vec& a, const Vec& b) {
      Eigen::Vector3d x = Eigen::Vector3d(a[0], a[1], a[2]).cross(Eigen::Vector3d(b[0], b[1], b[2]));
      Vec y(3);
      y << x[0], x[1], x[2];
      return y;
    };
    std::vector<detail::SphPoly> polys;
    for (int s1 : {+1, -1})
      for (int s2 : {+1, -1})
        for (int s3 : {+1, -1}) {
          Vec w12 = cr(m1, m2).normalized();
          if (w12.dot(m3) * s3 < 0) w12 = -w12;
          Vec w13 = cr(m1, m3).normalized();
          if (w13.dot(m2) * s2 < 0) w13 = -w13;
          Vec w23 = cr(m2, m3).normalized();
          if (w23.dot(m1) * s1 < 0) w23 = -w23;
          detail::SphPoly p;
          p.v = {w23, w13, w12};
          // orient the cycle so edge normals point inward
          Vec c = detail::poly_center(p);
          if (c.dot(cr(p.v[0], p.v[1])) < 0) std::swap(p.v[0], p.v[1]);
          polys.push_back(p);
        }
    for (Eigen::Index i = 0; i < ndirs; ++i) {
      if (i == seed[0] || i == seed[1] || i == seed[2]) continue;
      std::vector<detail::SphPoly> next;
      for (const auto& p : polys) {
        auto [plus, minus] = detail::split_poly(p, rd.directions.col(i));
        if (plus.v.size() >= 3) next.push_back(plus);
        if (minus.v.size() >= 3) next.push_back(minus);
      }
      polys = std::move(next);
    }
    for (auto& p : polys) {
      RawChamber rc;
      rc.witness = detail::poly_center(p);
      rc.poly = p.v;
      raw.push_back(rc);
    }
  }

  // Classify chambers, find tight faces and apexes, emit patches.
  for (const auto& rc : raw) {
    Chamber ch;
    ch.witness = rc.witness;
    ch.poly = rc.poly;
    for (Eigen::Index i = 0; i < ndirs; ++i)
      ch.sign.push_back(rc.witness.dot(rd.directions.col(i)) >= 0 ? +1 : -1);

    // tight faces
    std::vector<Vec> tight;
    if (n == 1) {
      tight.push_back(rc.witness);
      ch.tight_dirs = {0};
    } else if (n == 2) {
      for (Eigen::Index i = 0; i < ndirs; ++i) {
        Vec mu = rd.directions.col(i);
        Vec ray1 = detail::rot90(mu), ray2 = -ray1;
        // the line W(mu) supports this sector iff one of its rays borders it
        for (const Vec& ray : {ray1, ray2}) {
          // border ray: rotating the witness slightly across it leaves the sector;
          // equivalently the ray satisfies all other sign constraints
          bool on_boundary = true;
          for (Eigen::Index j = 0; j < ndirs; ++j) {
            if (j == i) continue;
            double sgn = ray.dot(rd.directions.col(j)) * ch.sign[static_cast<size_t>(j)];
            if (sgn < -1e-9) {
              on_boundary = false;
              break;
            }
          }
          if (on_boundary) {
            Vec t = ch.sign[static_cast<size_t>(i)] > 0 ? mu : Vec(-mu);
            bool dup = false;
            for (const auto& x : tight)
              if ((x - t).lpNorm<Eigen::Infinity>() < 1e-9) dup = true;
            if (!dup) {
              tight.push_back(t);
              ch.tight_dirs.push_back(static_cast<int>(i));
            }
          }
        }
      }
    } else {
      size_t nv = rc.poly.size();
      for (size_t e = 0; e < nv; ++e) {
        const Vec& a = rc.poly[e];
        const Vec& b = rc.poly[(e + 1) % nv];
        for (Eigen::Index i = 0; i < ndirs; ++i) {
          Vec mu = rd.directions.col(i);
          if (std::abs(a.dot(mu)) < 1e-9 && std::abs(b.dot(mu)) < 1e-9) {
            Vec t = ch.sign[static_cast<size_t>(i)] > 0 ? mu : Vec(-mu);
            bool dup = false;
            for (const auto& x : tight)
              if ((x - t).lpNorm<Eigen::Infinity>() < 1e-9) dup = true;
            if (!dup) {
              tight.push_back(t);
              ch.tight_dirs.push_back(static_cast<int>(i));
            }
            break;
          }
        }
      }
    }
    ch.tight.resize(n, static_cast<Eigen::Index>(tight.size()));
    for (size_t i = 0; i < tight.size(); ++i) ch.tight.col(static_cast<Eigen::Index>(i)) = tight[i];

    Eigen::Index jp = ch.tight.cols();
    if (jp < n) throw Error("decompose_region: chamber with too few tight faces");
    if (jp == n) {
      ch.kind = ChamberKind::kSimplex;
      ch.apex = ch.tight.transpose().fullPivLu().solve(Vec::Constant(n, big_l));
      ch.apex_residual = (ch.tight.transpose() * ch.apex - Vec::Constant(jp, big_l)).norm();
    } else {
      Vec a = (ch.tight * ch.tight.transpose())
                  .ldlt()
                  .solve(ch.tight * Vec::Constant(jp, big_l));
      ch.apex_residual = (ch.tight.transpose() * a - Vec::Constant(jp, big_l)).norm();
      if (ch.apex_residual <= opts.apex_tol * big_l) {
        ch.kind = ChamberKind::kCone;
        ch.apex = a;
      } else {
        ch.kind = ChamberKind::kGeneral;
        ++rd.general_chambers;
      }
    }

    // lemma-pc certificate: every direction has a one-signed representation
    // in the chamber's tight normals
    if (ch.kind != ChamberKind::kGeneral) {
      for (Eigen::Index i = 0; i < ndirs; ++i) {
        Vec t = rd.directions.col(i);
        double rp = detail::nnls_residual(ch.tight, t);
        double rm = detail::nnls_residual(ch.tight, Vec(-t));
        if (std::min(rp, rm) > 1e-9) rd.lemma_pc_certified = false;
      }
    }

    rd.chambers.push_back(ch);
    Chamber& stored = rd.chambers.back();
    if (stored.kind == ChamberKind::kGeneral) continue;

    // patches
    if (n == 1) {
      MatrixXd w(1, 1);
      w(0, 0) = stored.witness[0];
      detail::subdivide_and_store(rd, stored, stored.apex, w, opts.max_diameter);
    } else if (n == 2) {
      // boundary rays from tight faces: ray_q orthogonal to some tight normal
      MatrixXd w(2, 2);
      int found = 0;
      for (Eigen::Index q = 0; q < stored.tight.cols() && found < 2; ++q) {
        Vec ray = detail::rot90(stored.tight.col(q));
        if (ray.dot(stored.witness) < 0) ray = -ray;
        // keep rays satisfying the other face constraint
        bool inside = true;
        for (Eigen::Index r = 0; r < stored.tight.cols(); ++r)
          if (r != q && ray.dot(stored.tight.col(r)) < -1e-9) inside = false;
        if (inside) w.col(found++) = ray;
      }
      if (found != 2) throw Error("decompose_region: sector rays not found");
      detail::subdivide_and_store(rd, stored, stored.apex, w, opts.max_diameter);
    } else {
      const auto& poly = stored.poly;
      if (poly.size() == 3) {
        MatrixXd w(3, 3);
        for (int i = 0; i < 3; ++i) w.col(i) = poly[static_cast<size_t>(i)];
        detail::subdivide_and_store(rd, stored, stored.apex, w, opts.max_diameter);
      } else {
        // gravity-center fan: the facets of a polygon are its edges, already
        // simplexes, so the fan hulls the center with each edge
        Vec c = Vec::Zero(3);
        for (const auto& x : poly) c += x;
        c.normalize();
        for (size_t e = 0; e < poly.size(); ++e) {
          MatrixXd w(3, 3);
          w.col(0) = c;
          w.col(1) = poly[e];
          w.col(2) = poly[(e + 1) % poly.size()];
          detail::subdivide_and_store(rd, stored, stored.apex, w, opts.max_diameter);
        }
      }
    }
  }
  return rd;
}

struct ShiftedCoords {
  Vec x;       // coordinates of xi_V in the subspace frame
  double r;    // |xi_perp - apex|
  Vec phi;     // K+1 angles
  double constraint_residual;  // | ||amat sin(phi)||^2 - 1 |
};

inline ShiftedCoords shifted_coords(const SimplexPatch& patch, const Vec& xi) {
  ShiftedCoords sc;
  sc.x = patch.vframe.transpose() * xi;
  Vec xp = patch.pframe.transpose() * xi;
  Vec eta = xp - patch.apex;
  sc.r = eta.norm();
  sc.phi = Vec::Zero(patch.n);
  sc.constraint_residual = 0.0;
  if (sc.r < 1e-12) return sc;  // at the apex all angles are immaterial
  Vec u = eta / sc.r;
  if (!patch.contains_dir(u))
    throw Error("shifted_coords: point lies outside the patch cone");
  Vec s = patch.mu.transpose() * u;
  for (int q = 0; q < patch.n; ++q) sc.phi[q] = std::asin(std::clamp(s[q], -1.0, 1.0));
  sc.constraint_residual = std::abs((patch.amat * s).squaredNorm() - 1.0);
  return sc;
}

struct InnerProductStructure {
  Vec theta_v;      // component in V (dot with X reproduces the X-part)
  double constant;  // <apex, theta_perp>
  Vec b;            // coefficients of theta_perp over the patch face normals
  bool r_independent = false;
  bool one_signed = true;
};

// <xi, theta> = <X, theta_V> + constant + r * sum_q b_q sin(phi_q) on the patch.
inline InnerProductStructure inner_product_structure(const SimplexPatch& patch,
                                                     const Vec& theta,
                                                     double sign_tol = 1e-9) {
  InnerProductStructure out;
  out.theta_v = patch.vframe.transpose() * theta;
  Vec tp = patch.pframe.transpose() * theta;
  out.constant = patch.apex.dot(tp);
  if (tp.norm() <= 1e-9 * std::max(1.0, theta.norm())) {
    out.b = Vec::Zero(patch.n);
    out.r_independent = true;
    return out;
  }
  out.b = patch.mu.fullPivLu().solve(tp);
  double scale = std::max(1.0, out.b.lpNorm<Eigen::Infinity>());
  bool has_pos = (out.b.array() > sign_tol * scale).any();
  bool has_neg = (out.b.array() < -sign_tol * scale).any();
  out.one_signed = !(has_pos && has_neg);
  if (!out.one_signed)
    throw Error("inner_product_structure: mixed-sign representation (chamber misconstruction)");
  return out;
}

}  // namespace idos

#endif  // IDOS_CHAMBERS_HPP
