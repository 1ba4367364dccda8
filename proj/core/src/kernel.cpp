#include "nlac/kernel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "nlac/error.hpp"
#include "nlac/parallel.hpp"

namespace nlac {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRequestedTol = 1e-11;
constexpr double kMultiplierTol = 1e-9;
constexpr double kNormalizationTol = 1e-10;
// Below this value of eta|k| the symbol is assembled as |k|^2 plus a remainder
// integral, avoiding cancellation between m_eta and |k|^2.
constexpr double kRemainderBranch = 1.0;
constexpr double kSeriesCutoff = 2.0;

template <class F>
double integrate(F&& f, double a, double b, double required_tol, const char* what) {
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 30, kRequestedTol, &error, &l1);
  const double scale = std::max(std::abs(value), 1e-300);
  if (!std::isfinite(value) || error > required_tol * std::max(scale, 1e-12 * l1)) {
    std::ostringstream os;
    os << "kernel: quadrature for " << what << " did not converge (achieved relative error "
       << error / scale << ", required " << required_tol << ")";
    throw NumericalError(os.str());
  }
  return value;
}

// 1 - <cos(x sigma_1)> averaged over the unit sphere, times the sphere area:
// |S| - A_dim(x) with A_2(x) = 2pi J0(x) and A_3(x) = 4pi sin(x)/x.
double sphere_defect(int dim, double x) {
  if (x < kSeriesCutoff) {
    // Alternating series; every term is below 1 in magnitude here.
    const double q = dim == 2 ? 0.25 * x * x : x * x;
    double term = 1.0;
    double sum = 0.0;
    for (int j = 1; j < 40; ++j) {
      if (dim == 2) {
        term *= q / (double(j) * double(j));
      } else {
        term *= q / (double(2 * j) * double(2 * j + 1));
      }
      const double signed_term = (j % 2 == 1) ? term : -term;
      sum += signed_term;
      if (term < 1e-18 * std::abs(sum)) break;
    }
    return sphere_area(dim) * sum;
  }
  if (dim == 2) return 2.0 * kPi * (1.0 - std::cyl_bessel_j(0.0, x));
  return 4.0 * kPi * (1.0 - std::sin(x) / x);
}

// sphere_defect minus its leading x^2 term |S| x^2 / (2 dim).
double sphere_defect_remainder(int dim, double x) {
  if (x < kSeriesCutoff) {
    const double q = dim == 2 ? 0.25 * x * x : x * x;
    double term = dim == 2 ? q : q / 6.0;
    double sum = 0.0;
    for (int j = 2; j < 40; ++j) {
      if (dim == 2) {
        term *= q / (double(j) * double(j));
      } else {
        term *= q / (double(2 * j) * double(2 * j + 1));
      }
      const double signed_term = (j % 2 == 1) ? term : -term;
      sum += signed_term;
      if (term < 1e-18 * std::abs(sum)) break;
    }
    return sphere_area(dim) * sum;
  }
  return sphere_defect(dim, x) - sphere_area(dim) * x * x / (2.0 * dim);
}

void require_normalized(const MollifierSpec& spec) {
  if (!(spec.normalization > 0.0)) {
    throw InvalidArgument("kernel: mollifier spec is not normalized");
  }
}

// m_1(z) - z^2 for z <= kRemainderBranch, m_1(z) otherwise.
double unit_symbol_part(const MollifierSpec& spec, double z, bool remainder) {
  const int dim = spec.dim;
  const double weight_exp = spec.beta + dim - 3.0;
  auto integrand = [&](double r) {
    if (r <= 0.0) return 0.0;
    const double w = spec.normalization * std::pow(r, weight_exp) * bump(spec, r);
    if (w == 0.0) return 0.0;
    return w * (remainder ? sphere_defect_remainder(dim, z * r) : sphere_defect(dim, z * r));
  };
  return integrate(integrand, 0.0, spec.bump_radius, kMultiplierTol, "the symbol");
}

}  // namespace

double sphere_moment_constant(int dim) {
  if (dim == 2) return kPi;
  if (dim == 3) return 4.0 * kPi / 3.0;
  throw InvalidArgument("kernel: dimension must be 2 or 3");
}

double sphere_area(int dim) {
  if (dim == 2) return 2.0 * kPi;
  if (dim == 3) return 4.0 * kPi;
  throw InvalidArgument("kernel: dimension must be 2 or 3");
}

void validate(const MollifierSpec& spec) {
  if (spec.dim != 2 && spec.dim != 3) {
    throw InvalidArgument("kernel: dim must be 2 or 3 (got " + std::to_string(spec.dim) + ")");
  }
  const double lo = 3.0 - spec.dim;
  if (!(spec.beta > lo && spec.beta < 2.0)) {
    std::ostringstream os;
    os << "kernel: beta = " << spec.beta << " violates the integrability range (" << lo
       << ", 2) for dim " << spec.dim;
    throw InvalidArgument(os.str());
  }
  if (!(spec.bump_radius > 0.0 && spec.bump_radius < kPi)) {
    throw InvalidArgument("kernel: bump_radius must lie in (0, pi)");
  }
  if (!(spec.bump_amplitude > 0.0) || !std::isfinite(spec.bump_amplitude)) {
    throw InvalidArgument("kernel: bump_amplitude must be positive");
  }
}

double bump(const MollifierSpec& spec, double r) {
  const double t = std::abs(r) / spec.bump_radius;
  if (t >= 1.0) return 0.0;
  return spec.bump_amplitude * std::exp(-1.0 / (1.0 - t * t));
}

double unit_mollifier(const MollifierSpec& spec, double r) {
  require_normalized(spec);
  return spec.normalization * std::pow(std::abs(r), spec.beta) * bump(spec, r);
}

MollifierSpec normalize(MollifierSpec spec) {
  validate(spec);
  const double p = spec.beta + spec.dim - 1.0;
  const double moment = integrate([&](double r) { return std::pow(r, p) * bump(spec, r); }, 0.0,
                                  spec.bump_radius, kNormalizationTol, "the moment normalization");
  spec.normalization = (2.0 / sphere_moment_constant(spec.dim)) / moment;
  return spec;
}

MollifierSpec default_mollifier(int dim) {
  MollifierSpec spec;
  spec.dim = dim;
  spec.beta = dim == 3 ? 0.5 : 1.5;
  return normalize(spec);
}

double multiplier(const MollifierSpec& spec, double eta, double k_abs) {
  require_normalized(spec);
  if (!(eta > 0.0)) throw InvalidArgument("kernel: eta must be positive");
  if (!(k_abs >= 0.0)) throw InvalidArgument("kernel: |k| must be nonnegative");
  if (k_abs == 0.0) return 0.0;
  const double z = eta * k_abs;
  if (z <= kRemainderBranch) return k_abs * k_abs + unit_symbol_part(spec, z, true) / (eta * eta);
  return unit_symbol_part(spec, z, false) / (eta * eta);
}

double multiplier_deviation(const MollifierSpec& spec, double eta, double k_abs) {
  require_normalized(spec);
  if (!(eta > 0.0)) throw InvalidArgument("kernel: eta must be positive");
  if (k_abs == 0.0) return 0.0;
  const double z = eta * k_abs;
  if (z <= kRemainderBranch) return unit_symbol_part(spec, z, true) / (eta * eta);
  return unit_symbol_part(spec, z, false) / (eta * eta) - k_abs * k_abs;
}

double psi(const MollifierSpec& spec, double xi_abs) {
  return std::pow(2.0 * kPi, -spec.dim) * multiplier(spec, 1.0, xi_abs);
}

double kernel_mass(const MollifierSpec& spec) {
  require_normalized(spec);
  // r = t^2 removes the r^p endpoint singularity
  const double p = spec.beta + spec.dim - 3.0;
  return sphere_area(spec.dim) * spec.normalization *
         integrate([&](double t) { return t <= 0.0 ? 0.0 : 2.0 * std::pow(t, 2.0 * p + 1.0) * bump(spec, t * t); },
                   0.0, std::sqrt(spec.bump_radius), kMultiplierTol, "the kernel mass");
}

// ---------------------------------------------------------------------------

SymbolTable::SymbolTable(TorusGrid grid, double eta, std::vector<double> values,
                         std::vector<double> deviation,
                         std::vector<std::pair<double, double>> radial)
    : grid_(grid),
      eta_(eta),
      values_(std::move(values)),
      deviation_(std::move(deviation)),
      radial_(std::move(radial)) {
  if (values_.size() != grid_.spectral_size() || deviation_.size() != grid_.spectral_size()) {
    throw InvalidArgument("symbol table: size does not match the grid");
  }
}

SymbolTable symbol_table(const MollifierSpec& spec, double eta, const TorusGrid& grid,
                         std::size_t workers) {
  require_normalized(spec);
  if (grid.dim() != spec.dim) {
    throw InvalidArgument("kernel: grid dimension does not match the mollifier dimension");
  }
  if (!(eta > 0.0)) throw InvalidArgument("kernel: eta must be positive");

  std::map<long, std::size_t> slot;
  for_each_mode(grid, [&](std::size_t, const IntVec&, long k2, double) { slot.emplace(k2, 0); });
  std::vector<long> radii;
  radii.reserve(slot.size());
  for (auto& [k2, s] : slot) {
    s = radii.size();
    radii.push_back(k2);
  }

  std::vector<double> dev(radii.size(), 0.0);
  parallel_for(radii.size(), workers, [&](std::size_t i) {
    dev[i] = multiplier_deviation(spec, eta, std::sqrt(double(radii[i])));
  });

  std::vector<double> values(grid.spectral_size());
  std::vector<double> deviation(grid.spectral_size());
  for_each_mode(grid, [&](std::size_t idx, const IntVec&, long k2, double) {
    const std::size_t s = slot[k2];
    deviation[idx] = dev[s];
    values[idx] = k2 == 0 ? 0.0 : double(k2) + dev[s];
  });

  std::vector<std::pair<double, double>> radial;
  radial.reserve(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    radial.emplace_back(std::sqrt(double(radii[i])), radii[i] == 0 ? 0.0 : double(radii[i]) + dev[i]);
  }
  return SymbolTable(grid, eta, std::move(values), std::move(deviation), std::move(radial));
}

EhrlingConstants ehrling_constants(const MollifierSpec& spec) {
  require_normalized(spec);
  constexpr int kSamples = 512;
  const double scale = std::pow(2.0 * kPi, -spec.dim);

  double c0 = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= kSamples; ++i) {
    const double xi = std::pow(10.0, -3.0 + 3.0 * double(i) / kSamples);
    c0 = std::min(c0, psi(spec, xi) / (xi * xi));
  }
  double c1 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSamples; ++i) {
    const double xi = std::pow(64.0, double(i) / (kSamples - 1));
    c1 = std::min(c1, psi(spec, xi));
  }
  const double psi_inf = scale * kernel_mass(spec);
  c1 = std::min(c1, psi_inf);
  if (!(c0 > 0.0) || !(c1 > 0.0)) {
    std::ostringstream os;
    os << "kernel: Ehrling constants not positive (c0 = " << c0 << ", c1 = " << c1 << ")";
    throw NumericalError(os.str());
  }
  return {c0, c1, psi_inf};
}

}  // namespace nlac
