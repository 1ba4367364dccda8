#include "nlac/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "nlac/error.hpp"

namespace nlac {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// The FFTW planner is not reentrant; execution of existing plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int axis_index(int frequency, int n) { return frequency >= 0 ? frequency : frequency + n; }

}  // namespace

TorusGrid::TorusGrid(int dim, int points_per_axis) : dim_(dim), n_(points_per_axis) {
  if (dim < 1 || dim > 3) {
    throw InvalidArgument("grid: dim must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
  }
  if (points_per_axis < 4 || !is_power_of_two(points_per_axis)) {
    throw InvalidArgument("grid: points_per_axis must be a power of two >= 4 (got " +
                          std::to_string(points_per_axis) + ")");
  }
  spacing_ = 2.0 * std::numbers::pi / n_;
  cell_volume_ = std::pow(spacing_, dim_);
  size_ = ipow(std::size_t(n_), dim_);
  spectral_size_ = ipow(std::size_t(n_), dim_ - 1) * std::size_t(n_ / 2 + 1);
}

std::vector<int> TorusGrid::frequencies() const {
  std::vector<int> out;
  out.reserve(n_);
  for (int k = -n_ / 2 + 1; k <= n_ / 2; ++k) out.push_back(k);
  return out;
}

Point TorusGrid::point(std::size_t flat) const noexcept {
  Point p{0.0, 0.0, 0.0};
  for (int axis = dim_ - 1; axis >= 0; --axis) {
    p[axis] = spacing_ * double(flat % std::size_t(n_));
    flat /= std::size_t(n_);
  }
  return p;
}

TorusGrid make_grid(int dim, int points_per_axis) { return TorusGrid(dim, points_per_axis); }

// ---------------------------------------------------------------------------

Field::Field(TorusGrid grid) : grid_(grid), values_(grid.size(), 0.0) {}

Field::Field(TorusGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("field: expected " + std::to_string(grid_.size()) + " values, got " +
                          std::to_string(values_.size()));
  }
}

double Field::sup_norm() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Spectrum::Spectrum(TorusGrid grid) : grid_(grid), coeffs_(grid.spectral_size()) {}

Spectrum::Spectrum(TorusGrid grid, std::vector<Complex> coefficients)
    : grid_(grid), coeffs_(std::move(coefficients)) {
  if (coeffs_.size() != grid_.spectral_size()) {
    throw InvalidArgument("spectrum: expected " + std::to_string(grid_.spectral_size()) +
                          " coefficients, got " + std::to_string(coeffs_.size()));
  }
}

Complex Spectrum::at(const IntVec& k) const {
  const int n = grid_.n();
  const int dim = grid_.dim();
  for (int a = 0; a < dim; ++a) {
    if (k[a] <= -n / 2 || k[a] > n / 2) {
      throw InvalidArgument("spectrum: frequency component outside (-N/2, N/2]");
    }
  }
  const int last = k[dim - 1];
  if (last < 0) {
    IntVec neg{-k[0], -k[1], -k[2]};
    std::size_t idx = 0;
    for (int a = 0; a < dim - 1; ++a) idx = idx * std::size_t(n) + std::size_t(axis_index(neg[a], n));
    idx = idx * std::size_t(grid_.half_extent()) + std::size_t(neg[dim - 1]);
    return std::conj(coeffs_[idx]);
  }
  std::size_t idx = 0;
  for (int a = 0; a < dim - 1; ++a) idx = idx * std::size_t(n) + std::size_t(axis_index(k[a], n));
  idx = idx * std::size_t(grid_.half_extent()) + std::size_t(last);
  return coeffs_[idx];
}

// ---------------------------------------------------------------------------

SpectralTransform::SpectralTransform(const TorusGrid& grid) : grid_(grid) {
  const double h = grid.spacing();
  forward_scale_ = std::pow(h, grid.dim());
  inverse_scale_ = std::pow(2.0 * std::numbers::pi, -grid.dim());

  int dims[3] = {grid.n(), grid.n(), grid.n()};
  double* in = fftw_alloc_real(grid.size());
  fftw_complex* out = fftw_alloc_complex(grid.spectral_size());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_r2c(grid.dim(), dims, in, out, flags);
  inverse_plan_ = fftw_plan_dft_c2r(grid.dim(), dims, out, in, flags);
  fftw_free(in);
  fftw_free(out);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    throw NumericalError("grid: FFTW plan creation failed");
  }
}

SpectralTransform::~SpectralTransform() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

std::shared_ptr<const SpectralTransform> SpectralTransform::for_grid(const TorusGrid& grid) {
  static std::map<std::pair<int, int>, std::shared_ptr<const SpectralTransform>> cache;
  std::lock_guard lock(planner_mutex());
  auto key = std::make_pair(grid.dim(), grid.n());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::shared_ptr<const SpectralTransform> t(new SpectralTransform(grid));
  cache.emplace(key, t);
  return t;
}

void SpectralTransform::forward(std::span<const double> values, std::span<Complex> coefficients) const {
  if (values.size() != grid_.size() || coefficients.size() != grid_.spectral_size()) {
    throw InvalidArgument("transform: buffer sizes do not match the grid");
  }
  // r2c leaves its input intact, so the const_cast is safe.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(values.data()),
                       reinterpret_cast<fftw_complex*>(coefficients.data()));
  for (auto& c : coefficients) c *= forward_scale_;
}

void SpectralTransform::inverse(std::span<const Complex> coefficients, std::span<double> values) const {
  if (values.size() != grid_.size() || coefficients.size() != grid_.spectral_size()) {
    throw InvalidArgument("transform: buffer sizes do not match the grid");
  }
  // c2r overwrites its input.
  thread_local std::vector<Complex> scratch;
  scratch.assign(coefficients.begin(), coefficients.end());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(scratch.data()), values.data());
  for (auto& v : values) v *= inverse_scale_;
}

Spectrum forward_transform(const Field& field) {
  Spectrum s(field.grid());
  SpectralTransform::for_grid(field.grid())->forward(field.values(), s.coefficients());
  return s;
}

Field inverse_transform(const Spectrum& spectrum) {
  Field f(spectrum.grid());
  SpectralTransform::for_grid(spectrum.grid())->inverse(spectrum.coefficients(), f.values());
  return f;
}

double sobolev_norm(const Spectrum& spectrum, double s) {
  const auto c = spectrum.coefficients();
  double sum = 0.0;
  for_each_mode(spectrum.grid(), [&](std::size_t i, const IntVec&, long k2, double w) {
    sum += w * std::pow(1.0 + double(k2), s) * std::norm(c[i]);
  });
  return std::sqrt(sum);
}

double sobolev_norm(const Field& field, double s) { return sobolev_norm(forward_transform(field), s); }

double inner_product(const Field& u, const Field& v) {
  if (!(u.grid() == v.grid())) throw InvalidArgument("inner_product: grid mismatch");
  double sum = 0.0;
  const auto a = u.values();
  const auto b = v.values();
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum * u.grid().cell_volume();
}

double l2_norm(const Field& u) { return std::sqrt(inner_product(u, u)); }

}  // namespace nlac
