#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "nlac/grid.hpp"

namespace nlac {

/// Radial mollifier rho_1(r) = C |r|^beta * a * exp(-1 / (1 - (r/r0)^2)) on |r| < r0.
///
/// The interaction kernel is J_eta(x) = rho_eta(|x|) / |x|^2 with
/// rho_eta(r) = eta^-dim rho_1(r / eta). `normalization` (C) is filled in by
/// normalize() so that int_0^inf rho_1(r) r^(dim-1) dr = 2 / C_dim, which
/// forces the symbol of L_eta to approach |k|^2 as eta -> 0.
struct MollifierSpec {
  int dim = 2;
  double beta = 1.5;
  double bump_radius = std::numbers::pi / 2;
  /// Pointwise scale a of the bump profile.
  double bump_amplitude = 1.0;
  double normalization = 0.0;
};

/// Integral of (e_1 . sigma)^2 over the unit sphere: pi in 2D, 4pi/3 in 3D.
double sphere_moment_constant(int dim);
/// Surface measure of the unit sphere S^(dim-1): 2pi in 2D, 4pi in 3D.
double sphere_area(int dim);

/// Throws InvalidArgument unless dim is 2 or 3, beta lies in (3 - dim, 2),
/// r0 lies in (0, pi) and the amplitude is positive.
void validate(const MollifierSpec& spec);

/// Returns a copy with the normalization constant set. Throws
/// InvalidArgument on an out-of-range spec and NumericalError if the moment
/// quadrature does not converge.
MollifierSpec normalize(MollifierSpec spec);

/// Normalized spec with the default exponent for `dim` (1.5 in 2D, 0.5 in 3D)
/// and r0 = pi/2.
MollifierSpec default_mollifier(int dim);

/// The bump profile a * exp(-1 / (1 - (r/r0)^2)), zero outside (-r0, r0).
double bump(const MollifierSpec& spec, double r);
/// rho_1(r); requires a normalized spec.
double unit_mollifier(const MollifierSpec& spec, double r);

/// Symbol m_eta(k) = int J_eta(x) (1 - cos(k.x)) dx at |k| = k_abs, computed by
/// adaptive radial quadrature to relative tolerance 1e-9.
double multiplier(const MollifierSpec& spec, double eta, double k_abs);
/// m_eta(k) - |k|^2, evaluated without cancellation for small eta |k|.
double multiplier_deviation(const MollifierSpec& spec, double eta, double k_abs);

/// Psi(xi) = (2pi)^-dim m_1(|xi|).
double psi(const MollifierSpec& spec, double xi_abs);
/// Total kernel mass J_1_hat(0) = int J_1 dx, so Psi(inf) = (2pi)^-dim times this.
double kernel_mass(const MollifierSpec& spec);

/// m_eta tabulated on every frequency of a grid, in the spectral half layout.
class SymbolTable {
 public:
  SymbolTable(TorusGrid grid, double eta, std::vector<double> values, std::vector<double> deviation,
              std::vector<std::pair<double, double>> radial);

  const TorusGrid& grid() const noexcept { return grid_; }
  double eta() const noexcept { return eta_; }
  /// m_eta(k) per stored coefficient.
  std::span<const double> values() const noexcept { return values_; }
  /// m_eta(k) - |k|^2 per stored coefficient.
  std::span<const double> deviation() const noexcept { return deviation_; }
  /// Distinct (|k|, m_eta) pairs sorted by |k|.
  std::span<const std::pair<double, double>> radial() const noexcept { return radial_; }

 private:
  TorusGrid grid_;
  double eta_;
  std::vector<double> values_;
  std::vector<double> deviation_;
  std::vector<std::pair<double, double>> radial_;
};

/// One quadrature per distinct |k|^2 on the lattice, fanned out over
/// `workers` threads and broadcast to every frequency of that radius.
SymbolTable symbol_table(const MollifierSpec& spec, double eta, const TorusGrid& grid,
                         std::size_t workers = 1);

struct EhrlingConstants {
  /// min Psi(xi) / |xi|^2 over sampled 0 < |xi| <= 1.
  double c0;
  /// min Psi(xi) over sampled |xi| >= 1, including the limit at infinity.
  double c1;
  double psi_infinity;
};

/// Throws NumericalError if either minimum is not positive.
EhrlingConstants ehrling_constants(const MollifierSpec& spec);

}  // namespace nlac
