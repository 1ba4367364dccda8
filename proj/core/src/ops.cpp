#include "nlac/ops.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "nlac/error.hpp"

namespace nlac {

namespace {

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* op) {
  if (!(a == b)) throw InvalidArgument(std::string(op) + ": grid mismatch");
}

double l2_scale(const TorusGrid& grid) { return std::pow(2.0 * std::numbers::pi, -grid.dim()); }

}  // namespace

Field apply_nonlocal(const Field& field, const SymbolTable& table) {
  require_same_grid(field.grid(), table.grid(), "apply_nonlocal");
  Spectrum s = forward_transform(field);
  auto c = s.coefficients();
  const auto m = table.values();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= m[i];
  return inverse_transform(s);
}

Field apply_laplacian(const Field& field) {
  Spectrum s = forward_transform(field);
  auto c = s.coefficients();
  for_each_mode(field.grid(), [&](std::size_t i, const IntVec&, long k2, double) { c[i] *= -double(k2); });
  return inverse_transform(s);
}

double nonlocal_energy(const Spectrum& spectrum, const SymbolTable& table) {
  require_same_grid(spectrum.grid(), table.grid(), "nonlocal_energy");
  const auto c = spectrum.coefficients();
  const auto m = table.values();
  double sum = 0.0;
  for_each_mode(spectrum.grid(), [&](std::size_t i, const IntVec&, long, double w) {
    sum += w * m[i] * std::norm(c[i]);
  });
  return 0.5 * l2_scale(spectrum.grid()) * sum;
}

double nonlocal_energy(const Field& field, const SymbolTable& table) {
  return nonlocal_energy(forward_transform(field), table);
}

double dirichlet_energy(const Spectrum& spectrum) {
  const auto c = spectrum.coefficients();
  double sum = 0.0;
  for_each_mode(spectrum.grid(), [&](std::size_t i, const IntVec&, long k2, double w) {
    sum += w * double(k2) * std::norm(c[i]);
  });
  return 0.5 * l2_scale(spectrum.grid()) * sum;
}

double dirichlet_energy(const Field& field) { return dirichlet_energy(forward_transform(field)); }

double consistency_residual(const Spectrum& spectrum, const SymbolTable& table) {
  require_same_grid(spectrum.grid(), table.grid(), "consistency_residual");
  const auto c = spectrum.coefficients();
  const auto d = table.deviation();
  double sum = 0.0;
  for_each_mode(spectrum.grid(), [&](std::size_t i, const IntVec&, long, double w) {
    sum += w * d[i] * d[i] * std::norm(c[i]);
  });
  return std::sqrt(l2_scale(spectrum.grid()) * sum);
}

double consistency_residual(const Field& field, const SymbolTable& table) {
  return consistency_residual(forward_transform(field), table);
}

Field project(const Field& field, int cutoff) {
  const int n = field.grid().n();
  if (cutoff < 0 || cutoff > n / 2) {
    throw InvalidArgument("project: cutoff must lie in [0, N/2]");
  }
  Spectrum s = forward_transform(field);
  auto c = s.coefficients();
  const int dim = field.grid().dim();
  for_each_mode(field.grid(), [&](std::size_t i, const IntVec& k, long, double) {
    for (int a = 0; a < dim; ++a) {
      if (std::abs(k[a]) > cutoff) {
        c[i] = 0.0;
        return;
      }
    }
  });
  return inverse_transform(s);
}

}  // namespace nlac
