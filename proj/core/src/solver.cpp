#include "nlac/solver.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nlac/error.hpp"
#include "nlac/ops.hpp"

namespace nlac {

namespace {

const SymbolTable* table_of(const OperatorChoice& op) {
  if (const auto* nl = std::get_if<NonlocalOperator>(&op)) return nl->table.get();
  return nullptr;
}

}  // namespace

double dt_max(const PotentialSpec& potential, double stabilizer, double epsilon) {
  const double denom = std::max(0.0, potential.fpp_max() - stabilizer);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return epsilon * epsilon / (2.0 * denom);
}

void validate(const SolverConfig& c) {
  auto fail = [](const std::string& msg) { throw InvalidArgument("solver: " + msg); };
  if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon)) fail("epsilon must be positive");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) fail("dt must be positive");
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) fail("t_end must be positive");
  if (!(c.stabilizer >= 0.0) || !std::isfinite(c.stabilizer)) fail("stabilizer must be nonnegative");
  if (c.diagnostic_stride < 1) fail("diagnostic_stride must be >= 1");
  if (std::holds_alternative<NonlocalOperator>(c.op)) {
    const SymbolTable* t = table_of(c.op);
    if (t == nullptr) fail("nonlocal operator without a symbol table");
    if (!(t->grid() == c.grid)) fail("symbol table grid does not match the solver grid");
  }
  const double limit = dt_max(c.potential, c.stabilizer, c.epsilon);
  if (c.dt > limit) {
    std::ostringstream os;
    os << "dt = " << c.dt << " exceeds dt_max = " << limit << " for stabilizer " << c.stabilizer;
    fail(os.str());
  }
  if (c.track_interface && c.track_interface->dim != c.grid.dim()) {
    fail("tracked interface dimension does not match the grid");
  }
}

std::int64_t step_count(const SolverConfig& c) {
  const double ratio = c.t_end / c.dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest)) return std::max<std::int64_t>(1, std::int64_t(nearest));
  return std::int64_t(std::ceil(ratio));
}

// ---------------------------------------------------------------------------

Integrator::Integrator(SolverConfig config)
    : config_(std::move(config)), transform_(SpectralTransform::for_grid(config_.grid)) {
  validate(config_);
  dt_ = config_.dt;
  const TorusGrid& g = config_.grid;
  const double eps2 = config_.epsilon * config_.epsilon;
  const SymbolTable* table = table_of(config_.op);
  denominator_.resize(g.spectral_size());
  symbol_.resize(g.spectral_size());
  keep_.assign(g.spectral_size(), 1);
  const int cutoff = g.n() / 3;
  for_each_mode(g, [&](std::size_t i, const IntVec& k, long k2, double) {
    symbol_[i] = table ? table->values()[i] : double(k2);
    denominator_[i] = 1.0 + dt_ * (symbol_[i] + config_.stabilizer / eps2);
    if (config_.dealias) {
      for (int a = 0; a < g.dim(); ++a) {
        if (std::abs(k[a]) > cutoff) keep_[i] = 0;
      }
    }
  });
  nonlinear_.resize(g.size());
  nonlinear_hat_.resize(g.spectral_size());
}

void Integrator::advance(Field& state, Spectrum& spectrum) {
  const auto c = state.values();
  const PotentialSpec& pot = config_.potential;
  const bool quartic = pot.kind() == PotentialKind::quartic;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double v = c[i];
    nonlinear_[i] = quartic ? v * v * v - v : f_eval(pot, v, 1);
  }
  transform_->forward(nonlinear_, nonlinear_hat_);
  const double ratio = dt_ / (config_.epsilon * config_.epsilon);
  const double s = config_.stabilizer;
  auto hat = spectrum.coefficients();
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const Complex nl = keep_[i] ? nonlinear_hat_[i] : Complex(0.0);
    hat[i] = (hat[i] + ratio * (s * hat[i] - nl)) / denominator_[i];
  }
  transform_->inverse(hat, c);
}

void Integrator::advance(Field& state) {
  Spectrum spectrum(state.grid());
  transform_->forward(state.values(), spectrum.coefficients());
  advance(state, spectrum);
}

double Integrator::energy(const Field& state, const Spectrum& spectrum) const {
  const auto hat = spectrum.coefficients();
  double quad = 0.0;
  for_each_mode(config_.grid, [&](std::size_t i, const IntVec&, long, double w) {
    quad += w * symbol_[i] * std::norm(hat[i]);
  });
  quad *= 0.5 * std::pow(2.0 * std::numbers::pi, -config_.grid.dim());
  double well = 0.0;
  for (double v : state.values()) well += f_eval(config_.potential, v, 0);
  well *= config_.grid.cell_volume();
  return quad + well / (config_.epsilon * config_.epsilon);
}

double total_energy(const Field& state, const SolverConfig& config) {
  if (!(state.grid() == config.grid)) throw InvalidArgument("solver: state is not on the config grid");
  const SymbolTable* table = table_of(config.op);
  const Spectrum s = forward_transform(state);
  const double quad = table ? nonlocal_energy(s, *table) : dirichlet_energy(s);
  double well = 0.0;
  for (double v : state.values()) well += f_eval(config.potential, v, 0);
  well *= config.grid.cell_volume();
  return quad + well / (config.epsilon * config.epsilon);
}

Field step(const Field& state, const SolverConfig& config) {
  if (!(state.grid() == config.grid)) throw InvalidArgument("solver: state is not on the config grid");
  Integrator integrator(config);
  Field next = state;
  integrator.advance(next);
  for (double v : next.values()) {
    if (!std::isfinite(v)) throw NumericalError("solver: step produced non-finite values");
  }
  return next;
}

RunRecord run(const SolverConfig& config, const Field& initial, const RunObserver& observer) {
  validate(config);
  if (!(initial.grid() == config.grid)) throw InvalidArgument("solver: initial field is not on the config grid");

  const std::int64_t steps = step_count(config);
  SolverConfig effective = config;
  effective.dt = config.t_end / double(steps);
  Integrator integrator(effective);
  const auto transform = SpectralTransform::for_grid(config.grid);

  Field state = initial;
  Spectrum spectrum(config.grid);
  transform->forward(state.values(), spectrum.coefficients());

  RunRecord rec;
  const double blow_up = 10.0 * config.potential.r0();

  auto record = [&](std::int64_t m) {
    const double t = m == steps ? config.t_end : double(m) * effective.dt;
    rec.times.push_back(t);
    rec.energy.push_back(integrator.energy(state, spectrum));
    rec.sup_norm.push_back(state.sup_norm());
    std::array<double, 4> norms{0.0, 0.0, 0.0, 0.0};
    const auto hat = spectrum.coefficients();
    for_each_mode(config.grid, [&](std::size_t i, const IntVec&, long k2, double w) {
      const double a = w * std::norm(hat[i]);
      const double b = 1.0 + double(k2);
      norms[0] += a;
      norms[1] += a * b;
      norms[2] += a * b * b;
      norms[3] += a * b * b * b;
    });
    for (auto& v : norms) v = std::sqrt(v);
    rec.sobolev.push_back(norms);
    if (config.track_interface) rec.interface_radius.push_back(extract_radius(state, *config.track_interface));
    if (observer) observer(t, state);
  };

  record(0);
  for (std::int64_t m = 1; m <= steps; ++m) {
    integrator.advance(state, spectrum);
    for (double v : state.values()) {
      if (!std::isfinite(v) || std::abs(v) > blow_up) {
        std::ostringstream os;
        os << "solver: blow-up at step " << m << " (t = " << double(m) * effective.dt << ")";
        rec.final_state = state;
        throw BlowUpError(os.str(), std::move(rec));
      }
    }
    if (m % config.diagnostic_stride == 0 || m == steps) record(m);
  }
  rec.final_state = std::move(state);
  return rec;
}

}  // namespace nlac
