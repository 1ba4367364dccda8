#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlac/geometry.hpp"
#include "nlac/grid.hpp"
#include "nlac/kernel.hpp"
#include "nlac/potential.hpp"
#include "nlac/solver.hpp"
#include "nlac/verify.hpp"

namespace nlac {

// Study manifest. The JSON schema is documented in docs/manifest.md; every
// section is optional and unknown or duplicate keys are rejected.

struct GridParams {
  int dim = 2;
  int n = 64;

  friend bool operator==(const GridParams&, const GridParams&) = default;
};

struct KernelParams {
  /// Missing means the per-dimension default.
  std::optional<double> beta;
  double bump_radius = std::numbers::pi / 2;
  double bump_amplitude = 1.0;

  friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

struct PotentialParams {
  /// Empty means the quartic; otherwise ascending polynomial coefficients.
  std::vector<double> coefficients;

  friend bool operator==(const PotentialParams&, const PotentialParams&) = default;
};

struct SolverParams {
  double epsilon = 0.1;
  double dt = 1e-4;
  double t_end = 0.1;
  double stabilizer = 2.0;
  int diagnostic_stride = 1;
  bool dealias = false;
  /// Missing means the local operator.
  std::optional<double> eta;
  bool track_interface = false;

  friend bool operator==(const SolverParams&, const SolverParams&) = default;
};

struct GeometryParams {
  double radius0 = 1.0;
  /// Missing means default_delta0(radius0).
  std::optional<double> delta0;
  std::vector<double> center;

  friend bool operator==(const GeometryParams&, const GeometryParams&) = default;
};

enum class InitialKind { circle, constant, random };

struct InitialParams {
  InitialKind kind = InitialKind::circle;
  double value = 0.0;

  friend bool operator==(const InitialParams&, const InitialParams&) = default;
};

struct StudyParams {
  std::vector<double> etas;
  int fields = 10;
  std::vector<double> r_values;
  int trials = 100;
  std::vector<double> epsilons;
  EtaRule eta_rule = EtaRule::zero;
  double eta_constant = 1.0;
  double eta_exponent = 4.0;
  double dt_factor = 0.005;
  double tol = 1e-6;

  friend bool operator==(const StudyParams&, const StudyParams&) = default;
};

struct StudyManifest {
  std::string study = "simulate";
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  GridParams grid;
  KernelParams kernel;
  PotentialParams potential;
  SolverParams solver;
  GeometryParams geometry;
  InitialParams initial;
  StudyParams params;

  friend bool operator==(const StudyManifest&, const StudyManifest&) = default;
};

/// Study names accepted in the `study` field.
const std::vector<std::string>& study_kinds();

/// Parses and validates manifest text. Parse errors (malformed JSON,
/// duplicate keys) throw FormatError with line context; unknown keys and
/// violated invariants throw InvalidArgument naming the key. Defaults are
/// filled in, so the result has a concrete beta and delta0.
StudyManifest parse_manifest(std::string_view text);
StudyManifest load_manifest(const std::filesystem::path& path);
/// Serializes every field; parse_manifest(manifest_json(m)) == m.
std::string manifest_json(const StudyManifest& manifest);
void save_manifest(const StudyManifest& manifest, const std::filesystem::path& path);

/// Domain objects described by a validated manifest.
MollifierSpec mollifier_spec(const StudyManifest& manifest);
PotentialSpec potential_spec(const StudyManifest& manifest);
InterfaceSpec interface_spec(const StudyManifest& manifest);
/// Builds the symbol table when solver.eta is set.
SolverConfig solver_config(const StudyManifest& manifest, std::size_t workers = 1);
Field initial_field(const StudyManifest& manifest, const SolverConfig& config);

// Field snapshots: "NLAC", u8 dim, u32 LE N, u8 flag (0 = physical values),
// then N^dim float64 LE values, row-major.

std::string encode_snapshot(const Field& field);
/// Throws FormatError on a bad magic, unknown flag, invalid header or a
/// payload whose length disagrees with the header.
Field decode_snapshot(std::string_view bytes);
void write_snapshot(const Field& field, const std::filesystem::path& path);
Field read_snapshot(const std::filesystem::path& path);

// Text outputs. Floats use 17 significant digits.

/// Header `t,energy,sup_norm,h0,h1,h2,h3`, plus `,radius` when recorded.
std::string run_csv(const RunRecord& record);
/// Header `k_abs,m_eta`, one row per distinct |k|.
std::string symbol_csv(const SymbolTable& table);
/// Header `rho,theta`, `count` evenly spaced points on [rho_min, rho_max].
std::string profile_csv(const PotentialSpec& potential, double rho_min, double rho_max, int count);
/// Keys study, params, table, slope, intercept, r_squared, passed, metrics;
/// the fit keys are null when no fit exists.
std::string report_json(const StudyReport& report);

/// Writes `contents` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, std::string_view contents);

}  // namespace nlac
