#include "nlac/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "nlac/error.hpp"
#include "nlac/ops.hpp"
#include "nlac/parallel.hpp"

namespace nlac {

namespace {

std::string number(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

RateReport fit_rate(std::vector<RatePair> pairs) {
  if (pairs.size() < 3) throw InvalidArgument("fit_rate: at least 3 pairs are required");
  for (const auto& [p, e] : pairs) {
    if (!(p > 0.0) || !(e > 0.0) || !std::isfinite(p) || !std::isfinite(e)) {
      throw InvalidArgument("fit_rate: parameters and errors must be positive and finite");
    }
  }
  const double n = double(pairs.size());
  double sx = 0, sy = 0;
  for (const auto& [p, e] : pairs) {
    sx += std::log(p);
    sy += std::log(e);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [p, e] : pairs) {
    const double dx = std::log(p) - mx, dy = std::log(e) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw InvalidArgument("fit_rate: parameters must not all be equal");
  RateReport r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  r.pairs = std::move(pairs);
  return r;
}

Field random_band_limited(const TorusGrid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const long band = long(grid.n() / 4) * (grid.n() / 4);
  Spectrum s(grid);
  auto c = s.coefficients();
  for_each_mode(grid, [&](std::size_t i, const IntVec&, long k2, double) {
    const double re = normal(rng);
    const double im = normal(rng);
    c[i] = k2 <= band ? Complex(re, im) : Complex(0.0);
  });
  // The complex-to-real inverse keeps only the Hermitian part; the forward
  // transform of the result is the symmetrized spectrum.
  return inverse_transform(s);
}

double consistency_error(const Spectrum& spectrum, const SymbolTable& table) {
  if (!(spectrum.grid() == table.grid())) throw InvalidArgument("consistency_error: grid mismatch");
  const auto c = spectrum.coefficients();
  const auto d = table.deviation();
  double num = 0.0;
  for_each_mode(spectrum.grid(), [&](std::size_t i, const IntVec&, long, double w) {
    num += w * d[i] * d[i] * std::norm(c[i]);
  });
  const double den = sobolev_norm(spectrum, 3.0);
  return den == 0.0 ? 0.0 : std::sqrt(num) / den;
}

ConsistencyReport consistency_study(const MollifierSpec& spec, const TorusGrid& grid,
                                    std::span<const double> etas, std::span<const Field> fields,
                                    std::size_t workers) {
  if (etas.size() < 2) throw InvalidArgument("consistency_study: at least two eta values are required");
  if (fields.empty()) throw InvalidArgument("consistency_study: no fields");
  std::vector<Spectrum> spectra;
  spectra.reserve(fields.size());
  for (const Field& f : fields) {
    if (!(f.grid() == grid)) throw InvalidArgument("consistency_study: field grid mismatch");
    spectra.push_back(forward_transform(f));
  }

  std::vector<double> errors(etas.size(), 0.0);
  for (std::size_t j = 0; j < etas.size(); ++j) {
    const SymbolTable table = symbol_table(spec, etas[j], grid, workers);
    for (const Spectrum& s : spectra) errors[j] = std::max(errors[j], consistency_error(s, table));
  }

  ConsistencyReport rep;
  rep.study = "consistency";
  rep.params = {{"dim", double(grid.dim())}, {"n", double(grid.n())}, {"beta", spec.beta},
                {"bump_radius", spec.bump_radius}, {"fields", double(fields.size())}};
  for (std::size_t j = 0; j < etas.size(); ++j) {
    rep.table.emplace_back(etas[j], errors[j]);
    rep.constants.push_back(errors[j] / etas[j]);
  }
  const bool degenerate = std::all_of(errors.begin(), errors.end(), [](double e) { return e == 0.0; });
  if (degenerate) return rep;

  std::vector<RatePair> positive;
  for (const auto& p : rep.table) {
    if (p.second > 0.0) positive.push_back(p);
  }
  if (positive.size() >= 3) rep.fit = fit_rate(positive);

  std::vector<std::size_t> order(etas.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return etas[a] < etas[b]; });
  const double ka = rep.constants[order[0]];
  const double kb = rep.constants[order[1]];
  rep.constant_spread = std::abs(ka - kb) / std::max(ka, kb);

  rep.metrics = {{"K_max", *std::max_element(rep.constants.begin(), rep.constants.end())},
                 {"K_finest", ka},
                 {"K_second_finest", kb},
                 {"K_spread", rep.constant_spread}};
  rep.passed = rep.fit && rep.fit->slope >= 0.9 && rep.fit->slope <= 1.1 && rep.constant_spread <= 0.1;
  return rep;
}

double ehrling_constant(const Spectrum& spectrum, const SymbolTable& table, double r) {
  if (!(spectrum.grid() == table.grid())) throw InvalidArgument("ehrling_constant: grid mismatch");
  if (!(r > 0.0)) throw InvalidArgument("ehrling_constant: R must be positive");
  const auto c = spectrum.coefficients();
  const auto m = table.values();
  double l2 = 0.0, energy = 0.0, negative = 0.0;
  for_each_mode(spectrum.grid(), [&](std::size_t i, const IntVec&, long k2, double w) {
    const double a = w * std::norm(c[i]);
    l2 += a;
    energy += 0.5 * m[i] * a;
    negative += a / (1.0 + double(k2));
  });
  if (l2 == 0.0) return 0.0;
  // The common (2pi)^-dim factor of all three quantities cancels.
  return l2 / (energy / (r * r) + r * r * negative);
}

EhrlingReport ehrling_check(const MollifierSpec& spec, const TorusGrid& grid,
                            std::span<const double> r_values, int trials, std::uint64_t seed,
                            std::size_t workers) {
  if (trials < 1) throw InvalidArgument("ehrling_check: trials must be >= 1");
  if (r_values.empty()) throw InvalidArgument("ehrling_check: no R values");
  for (double r : r_values) {
    if (!(r >= 1.0)) throw InvalidArgument("ehrling_check: R values must be >= 1");
  }
  constexpr double kCap = 1e6;

  std::vector<Spectrum> spectra;
  spectra.reserve(std::size_t(trials));
  // per-trial seeds drawn from one stream, so nearby base seeds share no fields
  std::mt19937_64 seeds(seed);
  for (int t = 0; t < trials; ++t) spectra.push_back(forward_transform(random_band_limited(grid, seeds())));

  EhrlingReport rep;
  rep.study = "ehrling";
  rep.params = {{"dim", double(grid.dim())}, {"n", double(grid.n())}, {"beta", spec.beta},
                {"trials", double(trials)}, {"seed", double(seed)}};
  for (double r : r_values) {
    const SymbolTable table = symbol_table(spec, 1.0 / r, grid, workers);
    std::vector<double> cs(spectra.size());
    parallel_for(spectra.size(), workers, [&](std::size_t i) { cs[i] = ehrling_constant(spectra[i], table, r); });
    double worst = 0.0;
    for (double c : cs) {
      if (!std::isfinite(c) || c > kCap) {
        ++rep.violations;
        continue;
      }
      worst = std::max(worst, c);
    }
    rep.table.emplace_back(r, worst);
    rep.fitted_c = std::max(rep.fitted_c, worst);
  }
  rep.metrics = {{"fitted_C", rep.fitted_c}, {"violations", double(rep.violations)}};
  rep.passed = rep.violations == 0;
  return rep;
}

SpectralFloorReport spectral_floor_study(const TorusGrid& grid, const InterfaceSpec& interface,
                                         std::span<const double> epsilons,
                                         const PotentialSpec& potential,
                                         const SpectralFloorOptions& options, std::size_t workers) {
  if (epsilons.empty()) throw InvalidArgument("spectral_floor_study: no eps values");
  SpectralFloorReport rep;
  rep.study = "spectral-floor";
  rep.params = {{"dim", double(grid.dim())}, {"n", double(grid.n())}, {"radius0", interface.radius0},
                {"delta0", interface.delta0}, {"tol", options.tol}};
  rep.results.resize(epsilons.size());
  parallel_for(epsilons.size(), workers, [&](std::size_t i) {
    const Field u = approximate_solution(grid, interface, interface.radius0, epsilons[i], potential);
    rep.results[i] = spectral_floor(u, epsilons[i], potential, options);
  });
  const auto coarsest = std::max_element(epsilons.begin(), epsilons.end()) - epsilons.begin();
  rep.floor_bound = 1.2 * std::abs(rep.results[std::size_t(coarsest)].lambda);
  rep.passed = true;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const auto& res = rep.results[i];
    rep.table.emplace_back(epsilons[i], res.lambda);
    rep.metrics.emplace_back("residual@" + number(epsilons[i]), res.residual);
    rep.metrics.emplace_back("outer_iterations@" + number(epsilons[i]), double(res.outer_iterations));
    if (!res.converged || res.lambda < -rep.floor_bound) rep.passed = false;
  }
  rep.metrics.emplace_back("floor_bound", rep.floor_bound);
  return rep;
}

CompareReport compare_nonlocal_local(const SolverConfig& base, const MollifierSpec& spec,
                                     std::span<const double> etas, const Field& initial,
                                     std::size_t workers) {
  if (etas.empty()) throw InvalidArgument("compare_nonlocal_local: no eta values");
  SolverConfig local = base;
  local.op = LocalOperator{};
  local.track_interface.reset();
  std::vector<Field> reference;
  run(local, initial, [&](double, const Field& f) { reference.push_back(f); });

  std::vector<double> errors(etas.size(), 0.0);
  parallel_for(etas.size(), workers, [&](std::size_t j) {
    SolverConfig cfg = local;
    cfg.op = NonlocalOperator{std::make_shared<const SymbolTable>(symbol_table(spec, etas[j], base.grid))};
    std::size_t slot = 0;
    double worst = 0.0;
    Field diff(base.grid);
    run(cfg, initial, [&](double, const Field& f) {
      const auto a = f.values();
      const auto b = reference[slot++].values();
      auto d = diff.values();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
      worst = std::max(worst, l2_norm(diff));
    });
    errors[j] = worst;
  });

  CompareReport rep;
  rep.study = "compare-local";
  rep.params = {{"dim", double(base.grid.dim())}, {"n", double(base.grid.n())}, {"epsilon", base.epsilon},
                {"dt", base.dt}, {"t_end", base.t_end}, {"stabilizer", base.stabilizer}, {"beta", spec.beta}};
  for (std::size_t j = 0; j < etas.size(); ++j) rep.table.emplace_back(etas[j], errors[j]);
  std::vector<RatePair> positive;
  for (const auto& p : rep.table) {
    if (p.second > 0.0) positive.push_back(p);
  }
  if (positive.size() >= 3) rep.fit = fit_rate(positive);
  rep.passed = rep.fit && rep.fit->slope >= 0.8 && rep.fit->slope <= 1.2;
  return rep;
}

McfReport mcf_convergence(const McfStudy& study, std::size_t workers) {
  const TorusGrid& grid = study.grid;
  if (study.epsilons.empty()) throw InvalidArgument("mcf: no eps values");
  if (study.interface.dim != grid.dim()) throw InvalidArgument("mcf: interface and grid dimensions differ");
  if (study.eta_rule != EtaRule::zero && study.mollifier.dim != grid.dim()) {
    throw InvalidArgument("mcf: mollifier and grid dimensions differ");
  }
  if (!(study.t_end > 0.0) || study.t_end > 0.6 * mcf_collapse_time(study.interface)) {
    throw InvalidArgument("mcf: t_end must lie in (0, 0.6 * collapse time]");
  }
  if (!(study.dt_factor > 0.0)) throw InvalidArgument("mcf: dt_factor must be positive");
  for (double eps : study.epsilons) {
    if (!(eps >= grid.spacing())) {
      throw InvalidArgument("mcf: eps = " + number(eps) + " is below the grid spacing " + number(grid.spacing()));
    }
  }

  std::vector<McfCurve> curves(study.epsilons.size());
  parallel_for(curves.size(), workers, [&](std::size_t i) {
    const double eps = study.epsilons[i];
    McfCurve& curve = curves[i];
    curve.epsilon = eps;
    SolverConfig cfg;
    cfg.epsilon = eps;
    cfg.grid = grid;
    cfg.potential = study.potential;
    cfg.stabilizer = study.stabilizer;
    cfg.t_end = study.t_end;
    cfg.dt = study.dt_factor * eps * eps;
    cfg.diagnostic_stride = study.diagnostic_stride;
    if (study.eta_rule != EtaRule::zero) {
      const double p = study.eta_rule == EtaRule::pow4 ? 4.0 : study.eta_exponent;
      curve.eta = study.eta_constant * std::pow(eps, p);
      cfg.op = NonlocalOperator{std::make_shared<const SymbolTable>(symbol_table(study.mollifier, curve.eta, grid))};
    }
    const Field initial = approximate_solution(grid, study.interface, study.interface.radius0, eps, study.potential);
    run(cfg, initial, [&](double t, const Field& f) {
      const double exact = mcf_radius(study.interface, t);
      curve.times.push_back(t);
      curve.exact_radius.push_back(exact);
      curve.radius.push_back(extract_radius(f, study.interface));
      curve.radius_error = std::max(curve.radius_error, std::abs(curve.radius.back() - exact));
      Field diff = approximate_solution(grid, study.interface, exact, eps, study.potential);
      const auto a = f.values();
      auto d = diff.values();
      for (std::size_t j = 0; j < d.size(); ++j) d[j] = a[j] - d[j];
      curve.field_error = std::max(curve.field_error, l2_norm(diff));
    });
  });

  McfReport rep;
  rep.study = "mcf";
  rep.params = {{"dim", double(grid.dim())}, {"n", double(grid.n())}, {"radius0", study.interface.radius0},
                {"delta0", study.interface.delta0}, {"t_end", study.t_end}, {"dt_factor", study.dt_factor},
                {"eta_constant", study.eta_constant},
                {"eta_exponent", study.eta_rule == EtaRule::zero ? 0.0
                                 : study.eta_rule == EtaRule::pow4 ? 4.0 : study.eta_exponent}};
  for (const McfCurve& c : curves) {
    rep.table.emplace_back(c.epsilon, c.field_error);
    rep.metrics.emplace_back("radius_error@" + number(c.epsilon), c.radius_error);
  }
  rep.curves = std::move(curves);

  std::vector<RatePair> radius_pairs;
  for (const McfCurve& c : rep.curves) {
    if (c.radius_error > 0.0) radius_pairs.emplace_back(c.epsilon, c.radius_error);
  }
  if (radius_pairs.size() >= 3) rep.radius_fit = fit_rate(radius_pairs);
  if (rep.table.size() >= 3) rep.fit = fit_rate(rep.table);

  std::vector<RatePair> sorted = rep.table;
  std::sort(sorted.begin(), sorted.end());
  bool decreasing = true;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (!(sorted[i - 1].second < sorted[i].second)) decreasing = false;
  }
  rep.passed = sorted.size() < 2 || (decreasing && (!rep.fit || rep.fit->slope >= 1.0));
  if (sorted.size() == 2) {
    const double slope = std::log(sorted[1].second / sorted[0].second) / std::log(sorted[1].first / sorted[0].first);
    rep.passed = rep.passed && slope >= 1.0;
  }
  return rep;
}

}  // namespace nlac
