#include <algorithm>
#include <cmath>
#include <random>

#include "nlac/error.hpp"
#include "nlac/verify.hpp"

namespace nlac {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// -Laplacian + V, shifted by sigma, and the Fourier-diagonal preconditioner
// (|k|^2 + c)^-1.
class ShiftedOperator {
 public:
  ShiftedOperator(const TorusGrid& grid, Vec potential, double preconditioner_shift)
      : grid_(grid),
        transform_(SpectralTransform::for_grid(grid)),
        v_(std::move(potential)),
        k2_(grid.spectral_size()),
        hat_(grid.spectral_size()),
        c_(preconditioner_shift) {
    for_each_mode(grid, [&](std::size_t i, const IntVec&, long k2, double) { k2_[i] = double(k2); });
  }

  void apply(const Vec& x, double sigma, Vec& y) {
    transform_->forward(x, hat_);
    for (std::size_t i = 0; i < hat_.size(); ++i) hat_[i] *= k2_[i];
    transform_->inverse(hat_, y);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += (v_[i] - sigma) * x[i];
  }

  void precondition(const Vec& r, Vec& z) {
    transform_->forward(r, hat_);
    for (std::size_t i = 0; i < hat_.size(); ++i) hat_[i] /= k2_[i] + c_;
    transform_->inverse(hat_, z);
  }

 private:
  TorusGrid grid_;
  std::shared_ptr<const SpectralTransform> transform_;
  Vec v_;
  Vec k2_;
  std::vector<Complex> hat_;
  double c_;
};

struct SolveResult {
  bool ok = true;
  int iterations = 0;
};

// Preconditioned CG for (A - sigma) y = b. Reports failure on non-positive
// curvature, which means sigma is not below the spectrum.
SolveResult pcg(ShiftedOperator& op, double sigma, const Vec& b, Vec& y, double tol, int max_iter) {
  const std::size_t n = b.size();
  Vec r = b, z(n), p(n), q(n);
  std::fill(y.begin(), y.end(), 0.0);
  op.precondition(r, z);
  p = z;
  double rz = dot(r, z);
  const double stop = tol * norm(b);
  SolveResult res;
  for (int it = 0; it < max_iter; ++it) {
    op.apply(p, sigma, q);
    const double curvature = dot(p, q);
    if (!(curvature > 0.0)) {
      res.ok = false;
      res.iterations = it;
      return res;
    }
    const double alpha = rz / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    res.iterations = it + 1;
    if (norm(r) <= stop) return res;
    op.precondition(r, z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return res;
}

}  // namespace

SpectralFloorResult spectral_floor(const Field& u_a, double epsilon, const PotentialSpec& potential,
                                   const SpectralFloorOptions& options) {
  if (!(epsilon > 0.0)) throw InvalidArgument("spectral_floor: eps must be positive");
  if (!(options.tol > 0.0) || !(options.inner_tol > 0.0)) throw InvalidArgument("spectral_floor: tolerances must be positive");
  if (options.max_outer < 1 || options.max_inner < 1) throw InvalidArgument("spectral_floor: iteration caps must be >= 1");

  const TorusGrid& grid = u_a.grid();
  const auto u = u_a.values();
  const std::size_t n = u.size();
  const double inv_eps2 = 1.0 / (epsilon * epsilon);

  Vec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = inv_eps2 * f_eval(potential, u[i], 2);
  const double vmin = *std::min_element(v.begin(), v.end());
  const double vmax = *std::max_element(v.begin(), v.end());
  const double safe_shift = vmin - 1.0;
  ShiftedOperator op(grid, v, std::max(1.0, vmax - safe_shift));

  Vec x(n);
  const auto [umin, umax] = std::minmax_element(u.begin(), u.end());
  if (*umin == *umax) {
    std::fill(x.begin(), x.end(), 1.0);
  } else {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> noise(0.0, 1e-3);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 - u[i] * u[i] + noise(rng);
  }
  double scale = norm(x);
  for (double& e : x) e /= scale;

  SpectralFloorResult res;
  Vec ax(n), y(n);
  auto rayleigh = [&](double& residual) {
    op.apply(x, 0.0, ax);
    const double mu = dot(x, ax);
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += (ax[i] - mu * x[i]) * (ax[i] - mu * x[i]);
    residual = std::sqrt(r2);
    return mu;
  };

  double residual = 0.0;
  double mu = rayleigh(residual);
  double sigma = safe_shift;
  res.lambda = mu;
  res.residual = residual;

  for (int outer = 1; outer <= options.max_outer; ++outer) {
    res.outer_iterations = outer;
    SolveResult solve = pcg(op, sigma, x, y, options.inner_tol, options.max_inner);
    res.inner_iterations += solve.iterations;
    while (!solve.ok) {
      // sigma reached the spectrum: step back below it.
      sigma = sigma - std::max(mu - sigma, 1.0);
      sigma = std::max(sigma, safe_shift);
      solve = pcg(op, sigma, x, y, options.inner_tol, options.max_inner);
      res.inner_iterations += solve.iterations;
      if (!solve.ok && sigma == safe_shift) throw NumericalError("spectral_floor: operator below its lower bound");
    }
    scale = norm(y);
    if (!(scale > 0.0) || !std::isfinite(scale)) break;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / scale;

    const double previous = mu;
    mu = rayleigh(residual);
    res.lambda = mu;
    res.residual = residual;
    const double size = std::max(1.0, std::abs(mu));
    if (std::abs(mu - previous) < options.tol * size && residual <= std::sqrt(options.tol) * size) {
      res.converged = true;
      return res;
    }
    // Move the shift toward the Rayleigh quotient, staying below the
    // eigenvalue that the residual bound places within `residual` of mu.
    const double candidate = mu - 2.0 * residual - 1e-3 * size;
    if (candidate > sigma) sigma = candidate;
  }
  return res;
}

}  // namespace nlac
