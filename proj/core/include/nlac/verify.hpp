#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlac/geometry.hpp"
#include "nlac/grid.hpp"
#include "nlac/kernel.hpp"
#include "nlac/potential.hpp"
#include "nlac/solver.hpp"

namespace nlac {

using RatePair = std::pair<double, double>;

/// Least-squares line through (log parameter, log error).
struct RateReport {
  std::vector<RatePair> pairs;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Throws InvalidArgument for fewer than 3 pairs or any nonpositive entry.
RateReport fit_rate(std::vector<RatePair> pairs);

/// Common shape of every study result, as serialized by io.
struct StudyReport {
  std::string study;
  std::vector<std::pair<std::string, double>> params;
  std::vector<RatePair> table;
  std::optional<RateReport> fit;
  /// Derived quantities (measured constants, counts, ...).
  std::vector<std::pair<std::string, double>> metrics;
  bool passed = false;
};

/// Real field with independent standard-normal real and imaginary parts on
/// every |k| <= N/4 (zero elsewhere), symmetrized by a real round trip.
Field random_band_limited(const TorusGrid& grid, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Consistency of L_eta with -Laplacian.

/// ||(L_eta + Laplacian) u||_{H^0} / ||u||_{H^3}; both norms in the Bessel
/// convention, so a pure mode k gives |m_eta(k) - |k|^2| (1 + |k|^2)^(-3/2).
double consistency_error(const Spectrum& spectrum, const SymbolTable& table);

struct ConsistencyReport : StudyReport {
  /// error / eta per eta, in input order.
  std::vector<double> constants;
  /// |K_a - K_b| / max(K_a, K_b) over the two finest eta.
  double constant_spread = 0.0;
};

/// Error per eta is the max of consistency_error over `fields`. Passes when
/// the slope lies in [0.9, 1.1] and constant_spread <= 0.1. A field set
/// whose errors are all zero leaves `fit` empty and fails.
ConsistencyReport consistency_study(const MollifierSpec& spec, const TorusGrid& grid,
                                    std::span<const double> etas, std::span<const Field> fields,
                                    std::size_t workers = 1);

// ---------------------------------------------------------------------------
// Nonlocal Ehrling inequality ||u||^2 <= (C/R^2) E_eta(u) + C R^2 ||u||_{H^-1}^2.

/// Smallest C for one field, all three quantities on the L2 scale:
/// ||u||^2 / (E_eta(u) / R^2 + R^2 ||u||_{H^-1}^2). Zero for u = 0.
double ehrling_constant(const Spectrum& spectrum, const SymbolTable& table, double r);

struct EhrlingReport : StudyReport {
  double fitted_c = 0.0;
  std::size_t violations = 0;
};

/// For each R, eta = 1/R, `trials` band-limited fields seeded from mt19937_64(seed). A violation is
/// a field whose minimal C is not finite or exceeds 1e6. Passes iff there are
/// no violations. `table` holds (R, max C at R).
EhrlingReport ehrling_check(const MollifierSpec& spec, const TorusGrid& grid,
                            std::span<const double> r_values, int trials, std::uint64_t seed,
                            std::size_t workers = 1);

// ---------------------------------------------------------------------------
// Smallest eigenvalue of -Laplacian + eps^-2 f''(u).

struct SpectralFloorOptions {
  double tol = 1e-6;
  double inner_tol = 1e-8;
  int max_outer = 400;
  int max_inner = 5000;
  std::uint64_t seed = 0;
};

struct SpectralFloorResult {
  double lambda = 0.0;
  bool converged = false;
  int outer_iterations = 0;
  int inner_iterations = 0;
  /// ||A x - lambda x|| / ||x|| at the returned estimate.
  double residual = 0.0;
};

/// Shift-and-invert power iteration with preconditioned CG inner solves. The
/// first shift lies below min(eps^-2 f''(u)), a lower bound for the spectrum;
/// later shifts track the Rayleigh quotient. Converged when the relative
/// change of the Rayleigh quotient drops below tol. Throws InvalidArgument for
/// eps <= 0 or tol <= 0.
SpectralFloorResult spectral_floor(const Field& u_a, double epsilon, const PotentialSpec& potential,
                                   const SpectralFloorOptions& options = {});

struct SpectralFloorReport : StudyReport {
  std::vector<SpectralFloorResult> results;
  /// 1.2 |lambda_min| at the largest eps.
  double floor_bound = 0.0;
};

/// spectral_floor on the circle approximate solution for each eps. Passes iff
/// every estimate converged and lambda_min(eps) >= -floor_bound.
SpectralFloorReport spectral_floor_study(const TorusGrid& grid, const InterfaceSpec& interface,
                                         std::span<const double> epsilons,
                                         const PotentialSpec& potential,
                                         const SpectralFloorOptions& options = {},
                                         std::size_t workers = 1);

// ---------------------------------------------------------------------------
// Nonlocal vs local solutions from the same initial data.

struct CompareReport : StudyReport {};

/// Runs `base` with the local operator once and with L_eta for each eta;
/// error(eta) = max over diagnostic times of the L2 distance. Passes when the
/// slope lies in [0.8, 1.2].
CompareReport compare_nonlocal_local(const SolverConfig& base, const MollifierSpec& spec,
                                     std::span<const double> etas, const Field& initial,
                                     std::size_t workers = 1);

// ---------------------------------------------------------------------------
// Sharp-interface limit.

enum class EtaRule { zero, pow4, custom };

struct McfStudy {
  InterfaceSpec interface;
  std::vector<double> epsilons;
  EtaRule eta_rule = EtaRule::zero;
  /// eta = eta_constant * eps^eta_exponent (exponent 4 for pow4).
  double eta_constant = 1.0;
  double eta_exponent = 4.0;
  TorusGrid grid{2, 256};
  PotentialSpec potential = PotentialSpec::quartic();
  MollifierSpec mollifier;
  double t_end = 0.3;
  /// dt = dt_factor * eps^2.
  double dt_factor = 0.005;
  int diagnostic_stride = 10;
  double stabilizer = 2.0;
};

struct McfCurve {
  double epsilon = 0.0;
  double eta = 0.0;
  std::vector<double> times;
  std::vector<double> radius;
  std::vector<double> exact_radius;
  double radius_error = 0.0;
  double field_error = 0.0;
};

struct McfReport : StudyReport {
  std::vector<McfCurve> curves;
  /// Fit of radius error against eps; needs at least three eps.
  std::optional<RateReport> radius_fit;
};

/// Throws InvalidArgument if eps < grid spacing for some eps, if t_end exceeds
/// 0.6 of the collapse time, or if the mollifier dimension differs from the
/// grid's. Passes when the field error strictly decreases as eps decreases and
/// its fitted slope is >= 1 (single-eps studies pass by default).
McfReport mcf_convergence(const McfStudy& study, std::size_t workers = 1);

}  // namespace nlac
