#include "nlac/potential.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "nlac/error.hpp"

namespace nlac {

namespace {

// d^order/dc^order of sum_i a_i c^i.
double poly_derivative(std::span<const double> a, double c, int order) {
  double result = 0.0;
  for (int i = int(a.size()) - 1; i >= order; --i) {
    double factor = 1.0;
    for (int j = 0; j < order; ++j) factor *= double(i - j);
    result = result * c + a[std::size_t(i)] * factor;
  }
  return result;
}

// Coefficients of q with f = (1 - c^2)^2 q, by synthetic division at the
// double roots +-1. Evaluating sqrt(2 f) in this factored form avoids the
// cancellation in f near the wells.
std::vector<double> deflate_wells(std::span<const double> a) {
  std::vector<double> q(a.begin(), a.end());
  for (double root : {1.0, 1.0, -1.0, -1.0}) {
    std::vector<double> next(q.size() - 1);
    double carry = 0.0;
    for (std::size_t i = q.size() - 1; i >= 1; --i) {
      carry = q[i] + carry * root;
      next[i - 1] = carry;
    }
    q = std::move(next);
  }
  return q;
}

double well_tolerance(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return 1e-12 * std::max(s, 1.0);
}

// Outermost |root| of f' found by sampling for sign changes then bisecting.
double outermost_derivative_root(std::span<const double> a) {
  // Cauchy bound on the roots of f'.
  const std::size_t deg = a.size() - 1;
  const double lead = a[deg] * double(deg);
  double bound = 0.0;
  for (std::size_t i = 1; i < deg; ++i) bound = std::max(bound, std::abs(a[i] * double(i) / lead));
  bound += 1.0;
  constexpr int kSamples = 20000;
  double outer = 0.0;
  double prev_x = -bound;
  double prev_v = poly_derivative(a, prev_x, 1);
  for (int i = 1; i <= kSamples; ++i) {
    const double x = -bound + 2.0 * bound * i / kSamples;
    const double v = poly_derivative(a, x, 1);
    if (v == 0.0) {
      outer = std::max(outer, std::abs(x));
    } else if ((prev_v < 0.0) != (v < 0.0) && prev_v != 0.0) {
      double lo = prev_x, hi = x;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((poly_derivative(a, mid, 1) < 0.0) == (prev_v < 0.0)) lo = mid; else hi = mid;
      }
      outer = std::max(outer, std::abs(0.5 * (lo + hi)));
    }
    prev_x = x;
    prev_v = v;
  }
  return outer;
}

template <class Fn>
double sampled_extreme(double lo, double hi, int samples, bool want_max, Fn&& fn) {
  double best = want_max ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples; ++i) {
    const double v = fn(lo + (hi - lo) * i / samples);
    best = want_max ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

}  // namespace

PotentialSpec PotentialSpec::quartic() {
  PotentialSpec p;
  p.kind_ = PotentialKind::quartic;
  p.coeffs_ = {0.25, 0.0, -0.5, 0.0, 0.25};
  p.r0_ = 1.0;
  p.alpha_ = 1.0;
  p.fpp_max_ = 2.0;
  // max |c^3 - c| / (1 + |c|^3) on [-2, 2] is below 1.
  p.growth_ = sampled_extreme(-2.0, 2.0, 4000, true, [](double c) {
    return std::abs(c * c * c - c) / (1.0 + std::abs(c * c * c));
  });
  return p;
}

PotentialSpec PotentialSpec::custom(std::vector<double> coefficients) {
  while (!coefficients.empty() && coefficients.back() == 0.0) coefficients.pop_back();
  if (coefficients.size() < 3) {
    throw InvalidArgument("potential: custom polynomial must have degree >= 2");
  }
  const std::size_t deg = coefficients.size() - 1;
  if (deg % 2 != 0 || coefficients.back() <= 0.0) {
    throw InvalidArgument("potential: leading term must have even degree and positive coefficient");
  }
  const std::span<const double> a(coefficients);
  const double tol = well_tolerance(a);
  for (double c : {-1.0, 1.0}) {
    if (std::abs(poly_derivative(a, c, 0)) > tol || std::abs(poly_derivative(a, c, 1)) > tol) {
      throw InvalidArgument("potential: wells must satisfy f(+-1) = f'(+-1) = 0");
    }
    if (!(poly_derivative(a, c, 2) > 0.0)) {
      throw InvalidArgument("potential: wells must satisfy f''(+-1) > 0");
    }
  }
  for (int i = 1; i < 1000; ++i) {
    const double c = -1.0 + 2.0 * i / 1000.0;
    if (!(poly_derivative(a, c, 0) > 0.0)) {
      std::ostringstream os;
      os << "potential: f must be positive on (-1, 1); f(" << c << ") = " << poly_derivative(a, c, 0);
      throw InvalidArgument(os.str());
    }
  }

  PotentialSpec p;
  p.kind_ = PotentialKind::custom;
  p.coeffs_ = coefficients;
  p.r0_ = std::max(1.0, outermost_derivative_root(a));
  const double r0 = p.r0_;
  p.alpha_ = std::max(0.0, -sampled_extreme(-2.0 * r0, 2.0 * r0, 10000, false,
                                            [&](double c) { return poly_derivative(a, c, 2); }));
  p.fpp_max_ = sampled_extreme(-r0, r0, 10000, true, [&](double c) { return poly_derivative(a, c, 2); });
  p.growth_ = sampled_extreme(-2.0 * r0, 2.0 * r0, 10000, true, [&](double c) {
    return std::abs(poly_derivative(a, c, 1)) / (1.0 + std::abs(c * c * c));
  });
  p.profile_ = std::make_shared<const ProfileTable>(a);
  return p;
}

double f_eval(const PotentialSpec& spec, double c, int order) {
  if (order < 0 || order > 4) throw InvalidArgument("potential: derivative order must be 0..4");
  if (spec.kind() == PotentialKind::quartic) {
    switch (order) {
      case 0: {
        const double w = 1.0 - c * c;
        return 0.25 * w * w;
      }
      case 1: return c * c * c - c;
      case 2: return 3.0 * c * c - 1.0;
      case 3: return 6.0 * c;
      default: return 6.0;
    }
  }
  return poly_derivative(spec.coefficients(), c, order);
}

double optimal_profile(const PotentialSpec& spec, double rho) {
  if (spec.kind() == PotentialKind::quartic) return std::tanh(rho / std::numbers::sqrt2);
  return (*spec.profile_table())(rho);
}

// ---------------------------------------------------------------------------

ProfileTable::ProfileTable(std::span<const double> coefficients)
    : coeffs_(coefficients.begin(), coefficients.end()) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 1>;

  const int half = int(std::lround(kHalfWidth / kNodeSpacing));
  const std::size_t count = std::size_t(2 * half + 1);
  value_.assign(count, 0.0);

  const std::vector<double> q = deflate_wells(coeffs_);
  auto slope_of = [&q](double theta) {
    if (std::abs(theta) >= 1.0) return 0.0;
    return (1.0 - theta * theta) * std::sqrt(2.0 * std::max(poly_derivative(q, theta, 0), 0.0));
  };

  std::vector<double> times(std::size_t(half) + 1);
  for (int i = 0; i <= half; ++i) times[std::size_t(i)] = i * kNodeSpacing;

  for (int direction : {+1, -1}) {
    auto rhs = [&](const State& x, State& dxdt, double) { dxdt[0] = direction * slope_of(x[0]); };
    State x{0.0};
    std::size_t step = 0;
    auto observer = [&](const State& s, double) {
      value_[std::size_t(half + direction * int(step))] = s[0];
      ++step;
    };
    auto stepper = odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>());
    odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), 1e-3, observer);
  }

  slope_.resize(count);
  curvature_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double v = std::clamp(value_[i], -1.0, 1.0);
    value_[i] = v;
    slope_[i] = slope_of(v);
    curvature_[i] = poly_derivative(coeffs_, v, 1);
  }
  if (!std::isfinite(value_.front()) || !std::isfinite(value_.back()) || value_.back() < 0.999 ||
      value_.front() > -0.999) {
    throw NumericalError("potential: optimal profile integration did not reach the wells");
  }
}

double ProfileTable::operator()(double rho) const {
  if (rho >= kHalfWidth) return 1.0;
  if (rho <= -kHalfWidth) return -1.0;
  const double pos = (rho + kHalfWidth) / kNodeSpacing;
  std::size_t i = std::size_t(pos);
  if (i + 1 >= value_.size()) i = value_.size() - 2;
  const double t = pos - double(i);
  const double h = kNodeSpacing;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  const double h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  const double h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
  const double h3 = 0.5 * (t3 - 2.0 * t4 + t5);
  const double h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
  const double h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  return h0 * value_[i] + h1 * h * slope_[i] + h2 * h * h * curvature_[i] +
         h3 * h * h * curvature_[i + 1] + h4 * h * slope_[i + 1] + h5 * value_[i + 1];
}

}  // namespace nlac
