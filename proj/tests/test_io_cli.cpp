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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "idos/io.hpp"

using namespace idos;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(IDOS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("idos-test-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("potential loader symmetrizes and validates") {
  json j = {{"dim", 1}, {"terms", json::array({{{"freq", {1.0}}, {"re", 0.5}, {"im", 0.25}}})}};
  Potential b = load_potential(j);
  Vec one(1);
  one << 1;
  CHECK(b.coeff(one) == Cplx(0.5, 0.25));
  CHECK(b.coeff(Vec(-one)) == Cplx(0.5, -0.25));
  CHECK(b.freqs().contains_zero());

  // conflicting mirror coefficients are rejected
  json bad = {{"dim", 1},
              {"terms", json::array({{{"freq", {1.0}}, {"re", 0.5}, {"im", 0.25}},
                                     {{"freq", {-1.0}}, {"re", 0.5}, {"im", 0.25}}})}};
  CHECK_THROWS_AS(load_potential(bad), Error);
}

TEST_CASE("config hash is stable and sensitive") {
  json a = {{"dim", 1}, {"seed", 1}};
  json b = {{"seed", 1}, {"dim", 1}};
  CHECK(config_hash(a) == config_hash(b));  // key order does not matter
  json c = {{"dim", 1}, {"seed", 2}};
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("csv round trip") {
  DOSCurve curve;
  curve.method = "floquet";
  curve.points = {{100.0, 3.18309886183, 1e-6}, {200.0, 4.5, 2e-6}};
  std::string csv = dos_curve_csv(curve);
  DOSCurve back = dos_curve_from_csv(csv);
  REQUIRE(back.points.size() == 2);
  CHECK(back.points[0].value == Catch::Approx(curve.points[0].value).epsilon(1e-11));
  CHECK(back.method == "floquet");
}

TEST_CASE("cli check reports the square-lattice quantities") {
  TempDir tmp;
  std::string out = (tmp.path / "out").string();
  std::string fixture = std::string(IDOS_FIXTURES) + "/square_check_2d.json";
  int rc = run_cli("--config " + fixture + " --out " + out + " check");
  REQUIRE(rc == 0);
  json j;
  for (const auto& entry : fs::directory_iterator(out)) {
    if (entry.path().extension() == ".json") {
      std::ifstream in(entry.path());
      in >> j;
    }
  }
  REQUIRE(j.contains("conditions_c_d"));
  CHECK(j["condition_a"]["verdict"] == "PASS");
  CHECK(j["conditions_c_d"]["s"].get<double>() ==
        Catch::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-9));
  CHECK(j["conditions_c_d"]["s_pass"].get<bool>());
}

TEST_CASE("cli dos on the free potential is exact and deterministic") {
  TempDir tmp;
  std::string out1 = (tmp.path / "a").string();
  std::string out2 = (tmp.path / "b").string();
  std::string fixture = std::string(IDOS_FIXTURES) + "/free_1d.json";
  REQUIRE(run_cli("--config " + fixture + " --out " + out1 + " --seed 5 dos") == 0);
  REQUIRE(run_cli("--config " + fixture + " --out " + out2 + " --seed 5 dos") == 0);

  std::string csv1, csv2;
  for (const auto& entry : fs::directory_iterator(out1))
    if (entry.path().extension() == ".csv") csv1 = slurp(entry.path().string());
  for (const auto& entry : fs::directory_iterator(out2))
    if (entry.path().extension() == ".csv") csv2 = slurp(entry.path().string());
  REQUIRE(!csv1.empty());
  CHECK(csv1 == csv2);  // byte-identical rerun

  DOSCurve curve = dos_curve_from_csv(csv1);
  for (const auto& pt : curve.points)
    CHECK(pt.value == Catch::Approx(std::sqrt(pt.lambda) / M_PI).epsilon(1e-12));
}

TEST_CASE("cli verify runs the fast suites") {
  TempDir tmp;
  std::string out = (tmp.path / "out").string();
  // trim the suite sizes through the config to keep the test quick
  json cfg = {{"dim", 1}, {"verify", {{"families", 10}, {"model_specs", 3}}}};
  std::string cfg_path = (tmp.path / "cfg.json").string();
  write_text(cfg_path, cfg.dump());
  CHECK(run_cli("--config " + cfg_path + " --out " + out + " verify") == 0);
  bool found = false;
  for (const auto& entry : fs::directory_iterator(out))
    if (entry.path().string().find("verify") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("cli reports errors as json on stderr") {
  TempDir tmp;
  json cfg = {{"dim", 1},
              {"potential",
               {{"dim", 1}, {"terms", json::array({{{"freq", {0.5}}, {"re", 1.0}}})}}},
              {"dos", {{"method", "floquet"}, {"lambdas", {10.0, 20.0}}}}};
  std::string cfg_path = (tmp.path / "cfg.json").string();
  write_text(cfg_path, cfg.dump());
  std::string err_path = (tmp.path / "err.txt").string();
  std::string cmd = std::string(IDOS_CLI_PATH) + " --config " + cfg_path + " --out " +
                    (tmp.path / "out").string() + " dos > /dev/null 2> " + err_path;
  int rc = std::system(cmd.c_str());
  CHECK(rc != 0);
  std::string err = slurp(err_path);
  json je = json::parse(err);
  CHECK(je.contains("error"));
}

TEST_CASE("env overrides sit between config and flags") {
  TempDir tmp;
  json cfg = {{"dim", 1}, {"seed", 1}};
  ::setenv("IDOS_SEED", "2", 1);
  RunConfig rc1 = parse_config(cfg, std::nullopt, std::nullopt, std::nullopt, false);
  CHECK(rc1.seed == 2);  // env beats config
  RunConfig rc2 =
      parse_config(cfg, std::nullopt, std::optional<std::uint64_t>(3), std::nullopt, false);
  CHECK(rc2.seed == 3);  // flag beats env
  ::unsetenv("IDOS_SEED");
}
