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
// Configuration ingestion and result persistence.  Primary result files are
// deterministic functions of (config, seed): no timestamps, sorted keys,
// fixed float formatting, so identical runs are byte-identical.

#ifndef IDOS_IO_HPP
#define IDOS_IO_HPP

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "idos/dos.hpp"
#include "idos/floquet.hpp"
#include "idos/potential.hpp"

namespace idos {

using nlohmann::json;

inline std::string format_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Loads { "dim": d, "terms": [ { "freq": [...], "re": x, "im": y }, ... ] },
// adds conjugate mirror terms, and validates realness.
inline Potential load_potential(const json& j) {
  if (!j.contains("dim") || !j.contains("terms"))
    throw Error("potential: need 'dim' and 'terms'");
  int d = j.at("dim").get<int>();
  FrequencySet fs(d);
  fs.add(Vec::Zero(d));
  struct Term {
    Vec freq;
    Cplx a;
  };
  std::vector<Term> terms;
  for (const auto& t : j.at("terms")) {
    auto coords = t.at("freq").get<std::vector<double>>();
    if (static_cast<int>(coords.size()) != d)
      throw Error("potential: frequency has wrong dimension");
    Vec f(d);
    for (int i = 0; i < d; ++i) f[i] = coords[static_cast<size_t>(i)];
    double re = t.value("re", 0.0);
    double im = t.value("im", 0.0);
    terms.push_back({f, Cplx(re, im)});
  }
  Potential b(fs);
  for (const auto& t : terms) {
    Cplx existing = b.coeff(t.freq);
    if (existing != Cplx(0, 0) && std::abs(existing - t.a) > 1e-12)
      throw Error("potential: conflicting duplicate coefficients");
    b.set_coeff(t.freq, t.a);
    // conjugate mirror for realness
    Cplx mirror = b.coeff(Vec(-t.freq));
    if (mirror == Cplx(0, 0)) {
      b.set_coeff(Vec(-t.freq), std::conj(t.a));
    } else if (std::abs(mirror - std::conj(t.a)) > 1e-12) {
      throw Error("potential: terms violate realness");
    }
  }
  b.validate();
  return b;
}

inline Potential load_potential_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open potential file " + path);
  json j;
  in >> j;
  return load_potential(j);
}

inline json potential_to_json(const Potential& b) {
  json terms = json::array();
  for (const auto& th : b.freqs().elements()) {
    Cplx a = b.coeff(th);
    if (a == Cplx(0, 0) && th.norm() > kFreqTol) continue;
    json t;
    t["freq"] = std::vector<double>(th.data(), th.data() + th.size());
    t["re"] = a.real();
    t["im"] = a.imag();
    terms.push_back(t);
  }
  return json{{"dim", b.dim()}, {"terms", terms}};
}

// ---------------------------------------------------------------------------

struct RunConfig {
  int dim = 1;
  Potential potential;
  DualLattice lattice;
  ScaleParameters scales;
  json raw;                       // full effective config (defaults applied)
  std::vector<std::string> defaulted;
  std::string out_dir = "results";
  std::uint64_t seed = 1;
  unsigned workers = 0;
  bool cache = true;
};

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string config_hash(const json& j) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

// Parses the config with documented precedence config < env < flag.
inline RunConfig parse_config(json j, const std::optional<std::string>& out_flag,
                              const std::optional<std::uint64_t>& seed_flag,
                              const std::optional<unsigned>& workers_flag,
                              bool no_cache_flag) {
  RunConfig rc;
  auto note_default = [&rc](const std::string& key) { rc.defaulted.push_back(key); };

  if (!j.contains("dim")) throw Error("config: 'dim' is required");
  rc.dim = j.at("dim").get<int>();

  if (j.contains("potential")) {
    if (j.at("potential").is_string())
      rc.potential = load_potential_file(j.at("potential").get<std::string>());
    else
      rc.potential = load_potential(j.at("potential"));
  } else {
    // free potential on the coordinate frequencies
    FrequencySet fs(rc.dim);
    fs.add(Vec::Zero(rc.dim));
    for (int i = 0; i < rc.dim; ++i) {
      Vec e = Vec::Zero(rc.dim);
      e[i] = 1;
      fs.add(e);
      fs.add(Vec(-e));
    }
    rc.potential = Potential(fs);
    note_default("potential (free)");
  }
  if (rc.potential.dim() != rc.dim) throw Error("config: potential dimension mismatch");

  rc.lattice.basis = MatrixXd::Identity(rc.dim, rc.dim);
  if (j.contains("lattice")) {
    auto rows = j.at("lattice").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != rc.dim) throw Error("config: lattice shape");
    for (int r = 0; r < rc.dim; ++r)
      for (int c = 0; c < rc.dim; ++c) rc.lattice.basis(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
  } else {
    note_default("lattice (identity)");
  }

  if (j.contains("scales")) {
    const json& s = j.at("scales");
    rc.scales.rho_n = s.value("rho_n", 10.0);
    rc.scales.k_tilde = s.value("k_tilde", 3);
    if (s.contains("alphas"))
      rc.scales.alphas = s.at("alphas").get<std::vector<double>>();
    else
      rc.scales = ScaleParameters::defaults(rc.dim, rc.scales.rho_n, rc.scales.k_tilde);
    if (s.contains("beta")) rc.scales.beta = s.at("beta").get<double>();
    rc.scales.validate(rc.dim);
  } else {
    rc.scales = ScaleParameters::defaults(rc.dim);
    note_default("scales");
  }

  rc.out_dir = j.value("out", std::string("results"));
  if (!j.contains("out")) note_default("out");
  rc.seed = j.value("seed", 1ull);
  if (!j.contains("seed")) note_default("seed");
  rc.workers = j.value("workers", 0u);
  rc.cache = j.value("cache", true);

  // environment overrides
  if (const char* e = std::getenv("IDOS_OUT")) rc.out_dir = e;
  if (const char* e = std::getenv("IDOS_SEED")) rc.seed = std::strtoull(e, nullptr, 10);
  if (const char* e = std::getenv("IDOS_WORKERS"))
    rc.workers = static_cast<unsigned>(std::strtoul(e, nullptr, 10));
  if (const char* e = std::getenv("IDOS_NO_CACHE")) {
    (void)e;
    rc.cache = false;
  }

  // flag overrides
  if (out_flag) rc.out_dir = *out_flag;
  if (seed_flag) rc.seed = *seed_flag;
  if (workers_flag) rc.workers = *workers_flag;
  if (no_cache_flag) rc.cache = false;

  // effective config for hashing/provenance
  j["out"] = rc.out_dir;
  j["seed"] = rc.seed;
  j["workers"] = rc.workers;
  j["cache"] = rc.cache;
  rc.raw = std::move(j);
  return rc;
}

inline json provenance(const RunConfig& rc) {
  return json{{"config_hash", config_hash(rc.raw)},
              {"seed", rc.seed},
              {"version", kVersion},
              {"defaulted", rc.defaulted}};
}

inline void write_text(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

inline std::string dos_curve_csv(const DOSCurve& curve) {
  std::string s = "lambda,N,stderr,method\n";
  for (const auto& pt : curve.points) {
    s += format_g(pt.lambda);
    s += ",";
    s += format_g(pt.value);
    s += ",";
    s += format_g(pt.stderr_);
    s += ",";
    s += curve.method;
    s += "\n";
  }
  return s;
}

inline DOSCurve dos_curve_from_csv(const std::string& text) {
  DOSCurve curve;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("empty csv");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    DOSPoint pt;
    char method[64] = {0};
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%63s", &pt.lambda, &pt.value, &pt.stderr_,
                    method) != 4)
      throw Error("bad csv line: " + line);
    curve.method = method;
    curve.points.push_back(pt);
  }
  return curve;
}

}  // namespace idos

#endif  // IDOS_IO_HPP
