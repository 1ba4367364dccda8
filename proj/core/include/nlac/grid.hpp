#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace nlac {

using Complex = std::complex<double>;
using IntVec = std::array<int, 3>;
using Point = std::array<double, 3>;

/// Uniform periodic discretization of [0, 2pi)^dim.
///
/// Physical values are stored row-major with the last axis fastest. Spectral
/// coefficients use the real-to-complex half layout: every axis but the last
/// has N entries, the last has N/2 + 1. Index j on an axis maps to the
/// integer frequency j for j <= N/2 and j - N otherwise, so each axis covers
/// (-N/2, N/2].
class TorusGrid {
 public:
  /// Throws InvalidArgument unless dim is 1, 2 or 3 and n is a power of two >= 4.
  TorusGrid(int dim, int points_per_axis);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double spacing() const noexcept { return spacing_; }
  double cell_volume() const noexcept { return cell_volume_; }

  std::size_t size() const noexcept { return size_; }
  std::size_t spectral_size() const noexcept { return spectral_size_; }
  /// Extent of the last spectral axis, N/2 + 1.
  int half_extent() const noexcept { return n_ / 2 + 1; }

  /// Integer frequency of axis index j.
  int frequency(int index) const noexcept { return index <= n_ / 2 ? index : index - n_; }
  /// Sorted frequencies of one axis.
  std::vector<int> frequencies() const;

  /// Coordinates 2pi j / N of the grid point with flat index `flat`.
  Point point(std::size_t flat) const noexcept;

  friend bool operator==(const TorusGrid& a, const TorusGrid& b) noexcept {
    return a.dim_ == b.dim_ && a.n_ == b.n_;
  }

 private:
  int dim_;
  int n_;
  double spacing_;
  double cell_volume_;
  std::size_t size_;
  std::size_t spectral_size_;
};

TorusGrid make_grid(int dim, int points_per_axis);

/// Calls fn(spectral_index, k, |k|^2, weight) for every stored coefficient.
///
/// `weight` is the number of full-lattice frequencies the stored coefficient
/// stands for (1 on the self-conjugate planes of the last axis, 2 elsewhere),
/// so weighted sums over the half layout equal sums over the full lattice.
template <class Fn>
void for_each_mode(const TorusGrid& grid, Fn&& fn) {
  const int n = grid.n();
  const int h = grid.half_extent();
  const int dim = grid.dim();
  const int e0 = dim >= 2 ? n : 1;
  const int e1 = dim >= 3 ? n : 1;
  std::size_t idx = 0;
  for (int a = 0; a < e0; ++a) {
    for (int b = 0; b < e1; ++b) {
      for (int c = 0; c < h; ++c, ++idx) {
        IntVec k{0, 0, 0};
        if (dim == 1) {
          k = {c, 0, 0};
        } else if (dim == 2) {
          k = {grid.frequency(a), c, 0};
        } else {
          k = {grid.frequency(a), grid.frequency(b), c};
        }
        const long k2 = long(k[0]) * k[0] + long(k[1]) * k[1] + long(k[2]) * k[2];
        const double weight = (c == 0 || c == n / 2) ? 1.0 : 2.0;
        fn(idx, k, k2, weight);
      }
    }
  }
}

/// Real scalar function sampled on a grid.
class Field {
 public:
  explicit Field(TorusGrid grid);
  /// Throws InvalidArgument if values.size() != grid.size().
  Field(TorusGrid grid, std::vector<double> values);

  template <class Fn>
  static Field from_function(const TorusGrid& grid, Fn&& fn) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.point(i));
    return Field(grid, std::move(v));
  }

  const TorusGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  double sup_norm() const noexcept;

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

/// Discrete Fourier coefficients u_hat(k) = (2pi/N)^dim sum_j u(x_j) exp(-i k.x_j),
/// stored in the half layout described on TorusGrid.
class Spectrum {
 public:
  explicit Spectrum(TorusGrid grid);
  Spectrum(TorusGrid grid, std::vector<Complex> coefficients);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }
  std::span<Complex> coefficients() noexcept { return coeffs_; }

  /// Coefficient of an arbitrary lattice frequency, using Hermitian symmetry
  /// for frequencies outside the stored half. Components must lie in (-N/2, N/2].
  Complex at(const IntVec& k) const;

 private:
  TorusGrid grid_;
  std::vector<Complex> coeffs_;
};

/// FFTW-backed transform pair for one grid. Instances are cached per grid
/// shape and are safe to use from several threads.
class SpectralTransform {
 public:
  static std::shared_ptr<const SpectralTransform> for_grid(const TorusGrid& grid);

  ~SpectralTransform();
  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  const TorusGrid& grid() const noexcept { return grid_; }

  /// Physical values -> scaled coefficients. Sizes must match the grid.
  void forward(std::span<const double> values, std::span<Complex> coefficients) const;
  /// Scaled coefficients -> physical values. The input is left untouched.
  void inverse(std::span<const Complex> coefficients, std::span<double> values) const;

 private:
  explicit SpectralTransform(const TorusGrid& grid);

  TorusGrid grid_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
  double forward_scale_;
  double inverse_scale_;
};

/// Throws InvalidArgument on grid mismatch.
Spectrum forward_transform(const Field& field);
Field inverse_transform(const Spectrum& spectrum);

/// Bessel-potential norm (sum_k (1 + |k|^2)^s |u_hat(k)|^2)^(1/2). For s = 0
/// this is (2pi)^(dim/2) times the L2 norm.
double sobolev_norm(const Spectrum& spectrum, double s);
double sobolev_norm(const Field& field, double s);

/// Discrete L2 inner product sum_j u_j v_j (2pi/N)^dim.
double inner_product(const Field& u, const Field& v);
double l2_norm(const Field& u);

}  // namespace nlac
