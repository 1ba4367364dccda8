#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "nlac/error.hpp"
#include "nlac/geometry.hpp"
#include "nlac/grid.hpp"
#include "nlac/kernel.hpp"
#include "nlac/potential.hpp"

namespace nlac {

/// -Laplacian, symbol |k|^2.
struct LocalOperator {};

/// L_eta with a precomputed symbol table.
struct NonlocalOperator {
  std::shared_ptr<const SymbolTable> table;
};

using OperatorChoice = std::variant<LocalOperator, NonlocalOperator>;

struct SolverConfig {
  double epsilon = 0.1;
  OperatorChoice op = LocalOperator{};
  double dt = 1e-4;
  double t_end = 0.1;
  /// Stabilizer s of the semi-implicit splitting.
  double stabilizer = 2.0;
  PotentialSpec potential = PotentialSpec::quartic();
  TorusGrid grid{2, 64};
  int diagnostic_stride = 1;
  std::uint64_t seed = 0;
  /// Truncate the nonlinear term to |k_i| <= N/3 before each update.
  bool dealias = false;
  /// When set, run() records the extracted interface radius at each diagnostic.
  std::optional<InterfaceSpec> track_interface;
};

/// eps^2 / (2 max(0, f''_max - s)); +infinity when the denominator vanishes.
double dt_max(const PotentialSpec& potential, double stabilizer, double epsilon);

/// Throws InvalidArgument on any violated SolverConfig invariant, including
/// dt > dt_max and a symbol table built for a different grid.
void validate(const SolverConfig& config);

/// Number of steps run() takes and the step length it uses (t_end / steps <= dt).
std::int64_t step_count(const SolverConfig& config);

struct RunRecord {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> sup_norm;
  /// Bessel-potential norms H^0..H^3 per diagnostic.
  std::vector<std::array<double, 4>> sobolev;
  std::vector<double> interface_radius;
  Field final_state{TorusGrid{2, 4}};
};

/// Raised when a run produces non-finite values or |c| > 10 R0. Carries the
/// diagnostics recorded so far.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, RunRecord partial)
      : NumericalError(what), partial_(std::move(partial)) {}
  const RunRecord& partial() const noexcept { return partial_; }

 private:
  RunRecord partial_;
};

/// Called with (t, state) at every diagnostic time.
using RunObserver = std::function<void(double, const Field&)>;

/// Phi(c) = E_op(c) + eps^-2 sum_j f(c(x_j)) (2pi/N)^dim.
double total_energy(const Field& state, const SolverConfig& config);

/// One stabilized semi-implicit step:
///   c_hat' = [c_hat + (dt/eps^2)(s c_hat - F[f'(c)])] / (1 + dt (m(k) + s/eps^2)).
Field step(const Field& state, const SolverConfig& config);

/// Steps from `initial` to t_end, recording diagnostics every
/// diagnostic_stride steps and at the final step. Deterministic.
RunRecord run(const SolverConfig& config, const Field& initial, const RunObserver& observer = {});

/// Reusable stepping state for one configuration; avoids per-step allocation.
class Integrator {
 public:
  explicit Integrator(SolverConfig config);

  const SolverConfig& config() const noexcept { return config_; }
  double step_length() const noexcept { return dt_; }

  /// Advances `state` by one step of length step_length().
  void advance(Field& state);
  /// Advances `state` by one step, given its spectrum, and updates both.
  void advance(Field& state, Spectrum& spectrum);

  double energy(const Field& state, const Spectrum& spectrum) const;

 private:
  SolverConfig config_;
  double dt_;
  std::shared_ptr<const SpectralTransform> transform_;
  std::vector<double> denominator_;
  std::vector<double> symbol_;
  std::vector<unsigned char> keep_;
  std::vector<double> nonlinear_;
  std::vector<Complex> nonlinear_hat_;
};

}  // namespace nlac
