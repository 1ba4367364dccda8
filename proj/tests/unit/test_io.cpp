#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "nlac/error.hpp"
#include "nlac/io.hpp"

using namespace nlac;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nlac_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("minimal manifest gets defaults") {
  const StudyManifest m = parse_manifest(R"({"study": "simulate"})");
  CHECK(m.grid.dim == 2);
  CHECK(m.kernel.beta == 1.5);
  CHECK(m.solver.stabilizer == 2.0);
  REQUIRE(m.geometry.delta0.has_value());
  CHECK_THAT(*m.geometry.delta0, WithinRel(default_delta0(1.0), 1e-15));

  const StudyManifest m3 = parse_manifest(R"({"grid": {"dim": 3, "n": 16}})");
  CHECK(m3.kernel.beta == 0.5);
  CHECK(parse_manifest("{}") == parse_manifest(R"({"study": "simulate"})"));
}

TEST_CASE("manifest validation errors name the key") {
  CHECK_THROWS_WITH(parse_manifest(R"({"kernel": {"beta": 2.5}})"), ContainsSubstring("kernel") && ContainsSubstring("beta"));
  CHECK_THROWS_AS(parse_manifest(R"({"kernel": {"beta": 2.5}})"), InvalidArgument);
  CHECK_THROWS_WITH(parse_manifest(R"({"solver": {"epsilon": -1}})"), ContainsSubstring("solver.epsilon"));
  CHECK_THROWS_WITH(parse_manifest(R"({"solver": {"stabilizer": 0, "dt": 1}})"), ContainsSubstring("solver.dt"));
  CHECK_THROWS_WITH(parse_manifest(R"({"grid": {"n": 48}})"), ContainsSubstring("grid"));
  CHECK_THROWS_WITH(parse_manifest(R"({"study": "nope"})"), ContainsSubstring("study"));
  CHECK_THROWS_WITH(parse_manifest(R"({"geometry": {"radius0": 1.0, "delta0": 0.9}})"), ContainsSubstring("geometry"));
  CHECK_THROWS_WITH(parse_manifest(R"({"potential": {"coefficients": [1, 0, 1]}})"), ContainsSubstring("potential"));
  CHECK_THROWS_WITH(parse_manifest(R"({"seed": -3})"), ContainsSubstring("seed"));
  CHECK_THROWS_WITH(parse_manifest(R"({"grid": {"dim": "two"}})"), ContainsSubstring("grid.dim"));
}

TEST_CASE("unknown and duplicate keys are rejected") {
  CHECK_THROWS_WITH(parse_manifest(R"({"solver": {"epsilom": 0.1}})"), ContainsSubstring("solver.epsilom"));
  CHECK_THROWS_AS(parse_manifest(R"({"extra": 1})"), InvalidArgument);
  CHECK_THROWS_AS(parse_manifest(R"({"seed": 1, "seed": 2})"), FormatError);
  CHECK_THROWS_WITH(parse_manifest(R"({"solver": {"dt": 1e-4, "dt": 2e-4}})"), ContainsSubstring("solver.dt"));
}

TEST_CASE("parse errors report the line") {
  CHECK_THROWS_AS(parse_manifest("{\n  \"seed\": 1,\n  \"grid\": {\"n\": }\n}"), FormatError);
  CHECK_THROWS_WITH(parse_manifest("{\n  \"seed\": 1,\n  \"grid\": {\"n\": }\n}"), ContainsSubstring("line 3"));
}

TEST_CASE("manifest round trip") {
  StudyManifest m = parse_manifest(R"({
    "study": "mcf", "seed": 18446744073709551615, "output_dir": "runs/a",
    "grid": {"dim": 2, "n": 128},
    "kernel": {"beta": 1.25, "bump_radius": 1.1, "bump_amplitude": 0.3},
    "potential": {"coefficients": [0.25, 0, -0.25, 0, -0.25, 0, 0.25]},
    "solver": {"epsilon": 0.07, "dt": 0.1, "t_end": 0.2, "stabilizer": 4.0, "diagnostic_stride": 3,
               "dealias": true, "eta": 1.7e-5, "track_interface": true},
    "geometry": {"radius0": 0.9, "center": [0.1, -0.2]},
    "initial": {"kind": "random", "value": 0.5},
    "params": {"etas": [0.1, 0.05], "fields": 4, "r_values": [1, 2], "trials": 7, "epsilons": [0.08, 0.04],
               "eta_rule": "custom", "eta_constant": 0.5, "eta_exponent": 5.5, "dt_factor": 0.3, "tol": 1e-7}
  })");
  const std::string text = manifest_json(m);
  const StudyManifest back = parse_manifest(text);
  CHECK(back == m);
  CHECK(manifest_json(back) == text);
  CHECK(back.seed == 18446744073709551615ULL);
  CHECK(back.params.eta_rule == EtaRule::custom);

  const fs::path p = scratch("manifest.json");
  save_manifest(m, p);
  CHECK(load_manifest(p) == m);
  CHECK_THROWS_AS(load_manifest(scratch("missing.json")), InvalidArgument);
}

TEST_CASE("manifest builders") {
  const StudyManifest m = parse_manifest(R"({"grid": {"n": 32}, "solver": {"epsilon": 0.1, "eta": 0.1}})");
  const SolverConfig c = solver_config(m);
  REQUIRE(std::holds_alternative<NonlocalOperator>(c.op));
  CHECK(std::get<NonlocalOperator>(c.op).table->eta() == 0.1);
  const Field init = initial_field(m, c);
  CHECK(init.sup_norm() <= 1.0);
  StudyManifest k = m;
  k.initial.kind = InitialKind::constant;
  k.initial.value = -1.0;
  CHECK(initial_field(k, c).values()[4] == -1.0);
}

TEST_CASE("snapshot round trip is bit exact") {
  const TorusGrid g = make_grid(2, 16);
  Field f = Field::from_function(g, [](const Point& x) { return std::sin(x[0]) * std::exp(x[1]); });
  f[0] = -0.0;
  f[1] = std::numeric_limits<double>::denorm_min();
  f[2] = std::numeric_limits<double>::infinity();
  const std::string bytes = encode_snapshot(f);
  CHECK(bytes.size() == 10 + 8 * g.size());
  CHECK(bytes.substr(0, 4) == "NLAC");
  CHECK(bytes[4] == 2);
  CHECK(static_cast<unsigned char>(bytes[5]) == 16);
  CHECK(bytes[9] == 0);
  const Field back = decode_snapshot(bytes);
  CHECK(back.grid() == g);
  CHECK(std::memcmp(back.values().data(), f.values().data(), 8 * g.size()) == 0);

  const fs::path p = scratch("field.nlac");
  write_snapshot(f, p);
  const Field disk = read_snapshot(p);
  CHECK(std::memcmp(disk.values().data(), f.values().data(), 8 * g.size()) == 0);
}

TEST_CASE("corrupt snapshots are rejected") {
  const Field f(make_grid(1, 8));
  std::string bytes = encode_snapshot(f);
  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_WITH(decode_snapshot(bad), ContainsSubstring("magic"));
  CHECK_THROWS_AS(decode_snapshot(bytes.substr(0, bytes.size() - 3)), FormatError);
  CHECK_THROWS_AS(decode_snapshot(bytes.substr(0, 7)), FormatError);
  std::string dim = bytes;
  dim[4] = 2;  // header says 8x8, payload holds 8 values
  CHECK_THROWS_AS(decode_snapshot(dim), FormatError);
  std::string flag = bytes;
  flag[9] = 1;
  CHECK_THROWS_AS(decode_snapshot(flag), FormatError);
  std::string n = bytes;
  n[5] = 6;
  CHECK_THROWS_AS(decode_snapshot(n), FormatError);
}

TEST_CASE("CSV outputs") {
  RunRecord r;
  r.times = {0.0, 0.1};
  r.energy = {1.0, 0.1};
  r.sup_norm = {1.0, 0.5};
  r.sobolev = {{1, 2, 3, 4}, {5, 6, 7, 8}};
  std::string csv = run_csv(r);
  CHECK(csv.rfind("t,energy,sup_norm,h0,h1,h2,h3\n", 0) == 0);
  CHECK_THAT(csv, ContainsSubstring("0.10000000000000001,0.10000000000000001,0.5,5,6,7,8\n"));
  r.interface_radius = {1.0, 0.9};
  CHECK(run_csv(r).rfind("t,energy,sup_norm,h0,h1,h2,h3,radius\n", 0) == 0);

  const SymbolTable t = symbol_table(default_mollifier(2), 0.1, make_grid(2, 4));
  const std::string sym = symbol_csv(t);
  CHECK(sym.rfind("k_abs,m_eta\n0,0\n1,", 0) == 0);
  CHECK(std::count(sym.begin(), sym.end(), '\n') == 7);

  const std::string prof = profile_csv(PotentialSpec::quartic(), -1, 1, 3);
  CHECK(prof == "rho,theta\n-1,-0.6088593650139138\n0,0\n1,0.6088593650139138\n");
}

TEST_CASE("report JSON schema") {
  StudyReport r;
  r.study = "x";
  r.params = {{"n", 64}};
  r.table = {{0.5, 0.25}, {0.25, 0.0625}};
  r.metrics = {{"K", 1.5}};
  auto j = nlohmann::json::parse(report_json(r));
  for (const char* key : {"study", "params", "table", "slope", "intercept", "r_squared", "passed", "metrics"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["slope"].is_null());
  CHECK(j["table"][1][1] == 0.0625);
  r.fit = fit_rate({{1, 1}, {2, 2}, {4, 4}});
  r.passed = true;
  j = nlohmann::json::parse(report_json(r));
  CHECK(j["slope"].get<double>() == 1.0);
  CHECK(j["passed"] == true);
}
