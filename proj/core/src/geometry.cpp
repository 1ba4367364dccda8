#include "nlac/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "nlac/error.hpp"

namespace nlac {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double d) {
  d = std::fmod(d, 2.0 * kPi);
  if (d > kPi) d -= 2.0 * kPi;
  if (d <= -kPi) d += 2.0 * kPi;
  return d;
}

// Periodic tensor-product cubic Lagrange interpolation at an off-grid point.
double interpolate(const Field& field, const Point& x) {
  const TorusGrid& g = field.grid();
  const int n = g.n();
  const int dim = g.dim();
  int base[3] = {0, 0, 0};
  double w[3][4] = {{0, 1, 0, 0}, {0, 1, 0, 0}, {0, 1, 0, 0}};
  for (int a = 0; a < dim; ++a) {
    const double s = x[a] / g.spacing();
    const double fl = std::floor(s);
    const double t = s - fl;
    base[a] = int(fl);
    w[a][0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    w[a][1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    w[a][2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    w[a][3] = (t + 1.0) * t * (t - 1.0) / 6.0;
  }
  auto idx = [n](int i) { return ((i % n) + n) % n; };
  const auto v = field.values();
  double sum = 0.0;
  const int e1 = dim >= 2 ? 4 : 1;
  const int e2 = dim >= 3 ? 4 : 1;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < e1; ++j) {
      for (int k = 0; k < e2; ++k) {
        std::size_t flat = std::size_t(idx(base[0] + i - 1));
        double weight = w[0][i];
        if (dim >= 2) {
          flat = flat * std::size_t(n) + std::size_t(idx(base[1] + j - 1));
          weight *= w[1][j];
        }
        if (dim >= 3) {
          flat = flat * std::size_t(n) + std::size_t(idx(base[2] + k - 1));
          weight *= w[2][k];
        }
        sum += weight * v[flat];
      }
    }
  }
  return sum;
}

std::vector<Point> ray_directions(int dim) {
  std::vector<Point> dirs;
  if (dim == 2) {
    for (int j = 0; j < 360; ++j) {
      const double th = 2.0 * kPi * j / 360.0;
      dirs.push_back({std::cos(th), std::sin(th), 0.0});
    }
  } else if (dim == 3) {
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c) {
          if (a == 0 && b == 0 && c == 0) continue;
          const double len = std::sqrt(double(a * a + b * b + c * c));
          dirs.push_back({a / len, b / len, c / len});
        }
  } else {
    dirs.push_back({1.0, 0.0, 0.0});
    dirs.push_back({-1.0, 0.0, 0.0});
  }
  return dirs;
}

}  // namespace

double default_delta0(double radius0) { return 0.45 * std::min(radius0, kPi - radius0); }

InterfaceSpec make_interface(int dim, double radius0, std::optional<double> delta0, Point center) {
  if (dim < 1 || dim > 3) throw InvalidArgument("geometry: dim must be 1, 2 or 3");
  for (int a = 0; a < dim; ++a) {
    if (!(center[a] > -kPi && center[a] < kPi)) {
      throw InvalidArgument("geometry: center must lie in (-pi, pi)^dim");
    }
  }
  for (int a = dim; a < 3; ++a) center[a] = 0.0;
  if (!(radius0 > 0.0 && radius0 < kPi)) throw InvalidArgument("geometry: radius0 must lie in (0, pi)");
  const double d0 = delta0.value_or(default_delta0(radius0));
  if (!(d0 > 0.0) || !(2.0 * d0 < std::min(radius0, kPi - radius0))) {
    std::ostringstream os;
    os << "geometry: tube half-width delta0 = " << d0 << " violates 2 delta0 < min(R0, pi - R0)";
    throw InvalidArgument(os.str());
  }
  return InterfaceSpec{dim, center, radius0, d0};
}

Point wrapped_offset(const Point& x, const InterfaceSpec& spec) {
  return {wrap(x[0] - spec.center[0]), wrap(x[1] - spec.center[1]), wrap(x[2] - spec.center[2])};
}

double signed_distance(const Point& x, const InterfaceSpec& spec, double radius) {
  const Point d = wrapped_offset(x, spec);
  return std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) - radius;
}

double tube_cutoff(double s) {
  const double a = std::abs(s);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double t = a - 1.0;
  return 1.0 - t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

Field approximate_solution(const TorusGrid& grid, const InterfaceSpec& spec, double radius,
                           double epsilon, const PotentialSpec& potential) {
  if (grid.dim() != spec.dim) throw InvalidArgument("geometry: grid and interface dimensions differ");
  if (!(epsilon > 0.0) || epsilon > spec.delta0 / 4.0) {
    std::ostringstream os;
    os << "geometry: epsilon = " << epsilon << " must lie in (0, delta0/4] with delta0 = " << spec.delta0;
    throw InvalidArgument(os.str());
  }
  if (!(radius > 0.0) || radius + 2.0 * spec.delta0 >= kPi) {
    throw InvalidArgument("geometry: radius must be positive with radius + 2 delta0 < pi");
  }
  return Field::from_function(grid, [&](const Point& x) {
    const double r = signed_distance(x, spec, radius);
    const double zeta = tube_cutoff(r / spec.delta0);
    const double sign = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
    if (zeta == 0.0) return sign;
    return zeta * optimal_profile(potential, r / epsilon) + (1.0 - zeta) * sign;
  });
}

double mcf_collapse_time(const InterfaceSpec& spec) {
  if (spec.dim < 2) throw InvalidArgument("geometry: mean curvature flow needs dim >= 2");
  return spec.radius0 * spec.radius0 / (2.0 * (spec.dim - 1));
}

double mcf_radius(const InterfaceSpec& spec, double t) {
  const double tc = mcf_collapse_time(spec);
  if (!(t >= 0.0) || t >= tc) {
    std::ostringstream os;
    os << "geometry: t = " << t << " outside [0, collapse time " << tc << ")";
    throw InvalidArgument(os.str());
  }
  return std::sqrt(spec.radius0 * spec.radius0 - 2.0 * (spec.dim - 1) * t);
}

double extract_radius(const Field& field, const InterfaceSpec& spec) {
  const TorusGrid& g = field.grid();
  if (g.dim() != spec.dim) throw InvalidArgument("geometry: grid and interface dimensions differ");
  const double h = g.spacing();
  const int samples = int(std::floor((kPi - h) / h));
  const auto dirs = ray_directions(g.dim());
  double total = 0.0;
  for (std::size_t ray = 0; ray < dirs.size(); ++ray) {
    const Point& d = dirs[ray];
    auto value_at = [&](double r) {
      return interpolate(field, {spec.center[0] + r * d[0], spec.center[1] + r * d[1],
                                 spec.center[2] + r * d[2]});
    };
    double prev_r = 0.0;
    double prev = value_at(0.0);
    int i = 1;
    // Skip an exact zero at the center.
    while (prev == 0.0 && i <= samples) {
      prev_r = i * h;
      prev = value_at(prev_r);
      ++i;
    }
    bool found = false;
    for (; i <= samples; ++i) {
      const double r = i * h;
      const double v = value_at(r);
      if ((v > 0.0) != (prev > 0.0) || v == 0.0) {
        total += prev_r + (r - prev_r) * prev / (prev - v);
        found = true;
        break;
      }
      prev_r = r;
      prev = v;
    }
    if (!found) {
      std::ostringstream os;
      os << "geometry: no sign change along ray " << ray << " (direction " << d[0] << ", " << d[1]
         << ", " << d[2] << ")";
      throw NumericalError(os.str());
    }
  }
  return total / double(dirs.size());
}

}  // namespace nlac
