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
// Quasi-lattice subspaces, resonance zones and regions, and resonant
// congruence clusters.
//
// A point xi belongs to the first-kind region Xi1(V) of an m-dimensional
// subspace V when some chain X = V_0 < V_1 < ... < V_m = V of quasi-lattice
// subspaces satisfies |<xi, nu_j>| <= L_j for the unit normals nu_j of each
// step.  Membership is evaluated by that recursion over the subspace lattice.
// The region Xi(V) removes the union of Xi1 over one-dimension-up parents;
// the resulting regions partition R^d.

#ifndef IDOS_GEOMETRY_HPP
#define IDOS_GEOMETRY_HPP

#include <deque>
#include <limits>
#include <unordered_map>
#include <vector>

#include "idos/potential.hpp"

namespace idos {

// Resonance zone of a single nonzero frequency: |<xi, theta/|theta|>| <= L_1.
inline bool in_lambda(const Vec& theta, const Vec& xi, const ScaleParameters& p) {
  double n = theta.norm();
  if (n <= kFreqTol) throw Error("in_lambda: theta must be nonzero");
  return std::abs(xi.dot(theta) / n) <= p.L(1);
}

struct Subspace {
  int m = 0;                 // dimension
  MatrixXd frame;            // d x m, orthonormal columns
  std::vector<int> basis;    // indices into Theta-tilde of a spanning subset
  std::vector<int> parents;  // dim m+1 subspaces containing this one
  struct Edge {
    int child;  // dim m-1 subspace contained in this one
    Vec normal; // unit vector in (this) minus (child)
  };
  std::vector<Edge> children;

  Vec project(const Vec& xi) const {
    if (m == 0) return Vec::Zero(xi.size());
    return frame * (frame.transpose() * xi);
  }
};

class SubspaceTable {
 public:
  SubspaceTable() = default;

  // theta_tilde: the k-tilde-fold sum set (must be symmetric, contain 0).
  SubspaceTable(FrequencySet theta_tilde, ScaleParameters scales, size_t subset_cap = 200000)
      : theta_(std::move(theta_tilde)), scales_(std::move(scales)) {
    build(subset_cap);
  }

  int dim() const { return theta_.dim(); }
  const FrequencySet& theta() const { return theta_; }
  const ScaleParameters& scales() const { return scales_; }
  const std::vector<Subspace>& all() const { return subs_; }
  const Subspace& at(int i) const { return subs_[static_cast<size_t>(i)]; }
  const std::vector<int>& by_dim(int m) const { return by_dim_[static_cast<size_t>(m)]; }
  int zero_subspace() const { return x_index_; }
  int full_subspace() const { return rd_index_; }

  // Smallest sine of an angle between strongly distinct subspaces; 1 when no
  // such pair exists.  Used as the default geometric quality floor.
  double min_pair_sine() const { return s_min_; }

  // Lazy per-point Xi1 membership over the whole table.
  struct Scratch {
    std::vector<signed char> memo;  // -1 unknown, 0 no, 1 yes
  };

  bool in_xi1(const Vec& xi, int idx, Scratch& sc) const {
    if (sc.memo.empty()) sc.memo.assign(subs_.size(), -1);
    signed char& st = sc.memo[static_cast<size_t>(idx)];
    if (st >= 0) return st != 0;
    const Subspace& s = subs_[static_cast<size_t>(idx)];
    bool ok = false;
    if (s.m == 0) {
      ok = true;
    } else {
      for (const auto& e : s.children) {
        if (std::abs(xi.dot(e.normal)) > scales_.L(s.m)) continue;
        if (in_xi1(xi, e.child, sc)) {
          ok = true;
          break;
        }
      }
    }
    st = ok ? 1 : 0;
    return ok;
  }

  // The unique subspace V with xi in Xi(V).  Total on R^d.
  int classify(const Vec& xi) const {
    Scratch sc;
    return classify(xi, sc);
  }

  int classify(const Vec& xi, Scratch& sc) const {
    sc.memo.assign(subs_.size(), -1);
    // Ascend: members of Xi1 with no one-up member are exactly Xi.
    // Walk dimensions from the top so the first hit is the answer.
    for (int m = dim(); m >= 0; --m) {
      for (int idx : by_dim_[static_cast<size_t>(m)]) {
        if (!in_xi1(xi, idx, sc)) continue;
        bool covered = false;
        for (int par : subs_[static_cast<size_t>(idx)].parents) {
          if (in_xi1(xi, par, sc)) {
            covered = true;
            break;
          }
        }
        if (!covered) return idx;
      }
    }
    throw Error("classify: unreachable (Xi1(X) is all of R^d)");
  }

 private:
  void build(size_t subset_cap) {
    scales_.validate(theta_.dim());
    if (!theta_.contains_zero() || !theta_.is_symmetric())
      throw Error("SubspaceTable: theta-tilde must be symmetric and contain 0");
    int d = theta_.dim();
    by_dim_.assign(static_cast<size_t>(d) + 1, {});

    Subspace x;
    x.m = 0;
    x.frame = MatrixXd::Zero(d, 0);
    x_index_ = add_subspace(std::move(x));

    auto nz = theta_.nonzero();
    std::vector<int> nz_idx;
    for (const auto& v : nz) nz_idx.push_back(theta_.find(v));

    // Spans of m-subsets, deduplicated by mutual projection residual.
    std::vector<int> pick;
    size_t visited = 0;
    std::function<void(int, int)> rec = [&](int start, int m) {
      if (m >= 1) {
        if (++visited > subset_cap) throw Error("SubspaceTable: subset cap exceeded");
        MatrixXd b(d, m);
        for (int i = 0; i < m; ++i) b.col(i) = nz[static_cast<size_t>(pick[static_cast<size_t>(i)])];
        Eigen::ColPivHouseholderQR<MatrixXd> qr(b);
        qr.setThreshold(1e-9);
        if (qr.rank() == m) {
          MatrixXd q = qr.householderQ() * MatrixXd::Identity(d, m);
          maybe_add(q, pick, nz_idx, m);
        }
      }
      if (m == d) return;
      for (int i = start; i < static_cast<int>(nz.size()); ++i) {
        pick.push_back(i);
        rec(i + 1, m + 1);
        pick.pop_back();
      }
    };
    rec(0, 0);

    if (by_dim_[static_cast<size_t>(d)].empty()) {
      // Theta-tilde does not span; still provide R^d so the partition closes.
      Subspace full;
      full.m = d;
      full.frame = MatrixXd::Identity(d, d);
      rd_index_ = add_subspace(std::move(full));
    } else {
      rd_index_ = by_dim_[static_cast<size_t>(d)][0];
    }

    link();
    s_min_ = compute_min_sine();
  }

  int add_subspace(Subspace s) {
    int id = static_cast<int>(subs_.size());
    by_dim_[static_cast<size_t>(s.m)].push_back(id);
    subs_.push_back(std::move(s));
    return id;
  }

  void maybe_add(const MatrixXd& frame, const std::vector<int>& pick,
                 const std::vector<int>& nz_idx, int m) {
    for (int idx : by_dim_[static_cast<size_t>(m)]) {
      const Subspace& s = subs_[static_cast<size_t>(idx)];
      // Same span iff projecting one frame onto the other leaves no residual.
      double res = (frame - s.frame * (s.frame.transpose() * frame)).norm();
      if (res < 1e-9) return;
    }
    Subspace s;
    s.m = m;
    s.frame = frame;
    for (int i : pick) s.basis.push_back(nz_idx[static_cast<size_t>(i)]);
    add_subspace(std::move(s));
  }

  void link() {
    for (size_t i = 0; i < subs_.size(); ++i) {
      for (size_t j = 0; j < subs_.size(); ++j) {
        Subspace& lo = subs_[i];
        Subspace& hi = subs_[j];
        if (hi.m != lo.m + 1) continue;
        double res = lo.m == 0
                         ? 0.0
                         : (lo.frame - hi.frame * (hi.frame.transpose() * lo.frame)).norm();
        if (res > 1e-9) continue;
        lo.parents.push_back(static_cast<int>(j));
        // Unit normal spanning hi minus lo.
        Vec nu;
        for (int c = 0; c < hi.frame.cols(); ++c) {
          Vec cand = hi.frame.col(c) - lo.project(hi.frame.col(c));
          if (cand.norm() > 1e-6) {
            nu = cand / cand.norm();
            break;
          }
        }
        if (nu.size() == 0) throw Error("SubspaceTable: degenerate inclusion");
        hi.children.push_back({static_cast<int>(i), nu});
      }
    }
  }

  double compute_min_sine() const {
    double best = 1.0;
    for (size_t i = 0; i < subs_.size(); ++i) {
      for (size_t j = i + 1; j < subs_.size(); ++j) {
        const Subspace& a = subs_[i];
        const Subspace& b = subs_[j];
        if (a.m == 0 || b.m == 0) continue;
        // Principal angles via singular values of Fa' * Fb.
        Eigen::JacobiSVD<MatrixXd> svd(a.frame.transpose() * b.frame);
        auto sv = svd.singularValues();
        int inter = 0;
        for (int t = 0; t < sv.size(); ++t)
          if (sv[t] > 1.0 - 1e-12) ++inter;
        // Strongly distinct: intersection strictly below both dimensions.
        if (inter == std::min(a.m, b.m)) continue;
        double c = sv[inter];  // largest cosine below 1
        double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        best = std::min(best, s);
      }
    }
    return best;
  }

  FrequencySet theta_;
  ScaleParameters scales_;
  std::vector<Subspace> subs_;
  std::vector<std::vector<int>> by_dim_;
  int x_index_ = -1;
  int rd_index_ = -1;
  double s_min_ = 1.0;
};

struct Cluster {
  Vec seed;
  int subspace = -1;          // index into the table
  std::vector<Vec> points;    // closure under resonant congruence
};

// Sufficient separation between consecutive slab widths for the region
// lemmas (disjointness of regions, cluster closure) to hold at finite scale:
// the chain arguments need 2 m L_m / s + R <= L_{m+1} for every m < d.
// Returns the smallest ratio L_{m+1} / (2 m L_m / s + R); at least 1 means
// the lemmas apply verbatim.
inline double separation_margin(const SubspaceTable& t) {
  double worst = std::numeric_limits<double>::infinity();
  int d = t.dim();
  double s = t.min_pair_sine();
  double big_r = t.theta().max_norm();
  for (int m = 1; m < d; ++m) {
    double need = 2.0 * m * t.scales().L(m) / s + big_r;
    worst = std::min(worst, t.scales().L(m + 1) / need);
  }
  return worst;
}

// Breadth-first closure of xi under theta-steps inside shared zones: from a
// reached eta, every eta + l*theta with both endpoints in Lambda(theta) is
// added.  Requires classify(xi) != R^d.
inline Cluster cluster(const Vec& xi, const SubspaceTable& table, size_t cap = 10000,
                       bool verify = true) {
  const ScaleParameters& p = table.scales();
  Cluster out;
  out.seed = xi;
  out.subspace = table.classify(xi);
  if (out.subspace == table.full_subspace())
    throw Error("cluster: point lies in the bounded region of R^d");

  std::unordered_map<VecKey, int, VecKeyHash> seen;
  std::deque<Vec> frontier;
  auto push = [&](const Vec& v) {
    VecKey k = vec_key(v);
    if (seen.emplace(k, static_cast<int>(out.points.size())).second) {
      out.points.push_back(v);
      frontier.push_back(v);
      if (out.points.size() > cap)
        throw Error("cluster: closure cap exceeded at seed norm " +
                    std::to_string(xi.norm()));
    }
  };
  push(xi);
  const auto nz = table.theta().nonzero();
  while (!frontier.empty()) {
    Vec eta = frontier.front();
    frontier.pop_front();
    for (const auto& th : nz) {
      double n = th.norm();
      double c = eta.dot(th) / n;
      if (std::abs(c) > p.L(1)) continue;  // eta outside Lambda(theta)
      long lo = static_cast<long>(std::ceil((-p.L(1) - c) / n - 1e-12));
      long hi = static_cast<long>(std::floor((p.L(1) - c) / n + 1e-12));
      for (long l = lo; l <= hi; ++l) {
        if (l == 0) continue;
        push(Vec(eta + static_cast<double>(l) * th));
      }
    }
  }

  if (verify) {
    const int m = table.at(out.subspace).m;
    // Steps stay inside V, and the V-projections of the region lie in a ball
    // of radius sqrt(m) L_m (orthonormal flag normals), so the diameter is
    // at most 2 sqrt(m) L_m.
    const double diam_bound = m == 0 ? 0.0 : 2.0 * std::sqrt(m) * p.L(m);
    for (const auto& pt : out.points) {
      if (table.classify(pt) != out.subspace)
        throw Error("cluster: closure left the resonance region");
      if ((pt - xi).norm() > diam_bound + 1e-9)
        throw Error("cluster: diameter bound violated");
    }
  }
  return out;
}

}  // namespace idos

#endif  // IDOS_GEOMETRY_HPP
