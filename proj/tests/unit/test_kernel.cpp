#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "nlac/error.hpp"
#include "nlac/kernel.hpp"

using namespace nlac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

double tanh_sinh(const std::function<double(double)>& f, double a, double b) {
  static boost::math::quadrature::tanh_sinh<double> q(15);
  return q.integrate(f, a, b, 1e-13);
}

// m_eta(k) from the defining integral int J_eta(x)(1 - cos(k.x)) dx in polar
// coordinates: radial tanh-sinh, angular average by the trapezoid rule (2D)
// or the elementary sphere average (3D). No Bessel functions involved.
double multiplier_oracle(const MollifierSpec& spec, double eta, double k) {
  auto angular = [&](double r) {
    const double z = k * r;
    if (spec.dim == 2) {
      constexpr int n = 512;
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += 1.0 - std::cos(z * std::cos(2 * pi * j / n));
      return 2 * pi * s / n;
    }
    // sphere average of 1 - cos(z cos t) is 1 - sin(z)/z
    return 4 * pi * (z < 1e-4 ? z * z / 6 : 1.0 - std::sin(z) / z);
  };
  const double rmax = eta * spec.bump_radius;
  return tanh_sinh(
      [&](double r) {
        const double rho = std::pow(eta, -spec.dim) * unit_mollifier(spec, r / eta);
        return rho * std::pow(r, spec.dim - 3) * angular(r);
      },
      0.0, rmax);
}

double moment_oracle(const MollifierSpec& spec) {
  return tanh_sinh([&](double r) { return unit_mollifier(spec, r) * std::pow(r, spec.dim - 1); }, 0.0,
                   spec.bump_radius);
}

}  // namespace

TEST_CASE("sphere constants") {
  CHECK_THAT(sphere_moment_constant(2), WithinRel(pi, 1e-15));
  CHECK_THAT(sphere_moment_constant(3), WithinRel(4 * pi / 3, 1e-15));
  CHECK_THAT(sphere_area(2), WithinRel(2 * pi, 1e-15));
  CHECK_THAT(sphere_area(3), WithinRel(4 * pi, 1e-15));
}

TEST_CASE("normalize meets the moment condition") {
  const MollifierSpec s2 = default_mollifier(2);
  CHECK_THAT(moment_oracle(s2), WithinRel(2 / pi, 1e-10));
  const MollifierSpec s3 = default_mollifier(3);
  CHECK_THAT(moment_oracle(s3), WithinRel(3 / (2 * pi), 1e-10));
  CHECK(s2.beta == 1.5);
  CHECK(s3.beta == 0.5);
  CHECK_THAT(s2.bump_radius, WithinRel(pi / 2, 1e-15));
}

TEST_CASE("doubling the bump halves the normalization") {
  MollifierSpec a;
  a = normalize(a);
  MollifierSpec b;
  b.bump_amplitude = 2.0;
  b = normalize(b);
  CHECK_THAT(b.normalization, WithinRel(a.normalization / 2, 1e-10));
}

TEST_CASE("kernel validation") {
  MollifierSpec s;
  s.beta = 2.5;
  CHECK_THROWS_AS(normalize(s), InvalidArgument);
  s.beta = 1.0;  // endpoint 3 - dim is excluded
  CHECK_THROWS_AS(normalize(s), InvalidArgument);
  s = MollifierSpec{};
  s.bump_radius = 3.5;
  CHECK_THROWS_AS(normalize(s), InvalidArgument);
  s = MollifierSpec{};
  s.dim = 1;
  CHECK_THROWS_AS(normalize(s), InvalidArgument);
  CHECK_THROWS_AS(multiplier(MollifierSpec{}, 0.1, 1.0), InvalidArgument);
}

TEST_CASE("multiplier matches the angular-quadrature oracle") {
  for (int dim : {2, 3}) {
    const MollifierSpec s = default_mollifier(dim);
    for (double eta : {1.0, 0.25, 0.01}) {
      for (double k : {0.5, 1.0, 3.0, 17.0, 60.0}) {
        INFO("dim " << dim << " eta " << eta << " k " << k);
        const double got = multiplier(s, eta, k);
        CHECK_THAT(got, WithinRel(multiplier_oracle(s, eta, k), 1e-8));
      }
    }
  }
}

TEST_CASE("multiplier examples") {
  const MollifierSpec s = default_mollifier(2);
  CHECK(multiplier(s, 0.3, 0.0) == 0.0);
  CHECK_THAT(multiplier(s, 1e-3, 2.0), WithinRel(4.0, 0.05));
  // deviation is consistent with the multiplier
  CHECK_THAT(multiplier_deviation(s, 0.1, 3.0), WithinRel(multiplier(s, 0.1, 3.0) - 9.0, 1e-7));
}

TEST_CASE("scaling identity m_eta(q) = eta^-2 m_1(eta q)") {
  for (int dim : {2, 3}) {
    for (double beta : dim == 2 ? std::vector<double>{1.2, 1.5, 1.9} : std::vector<double>{0.2, 0.5, 1.5}) {
      MollifierSpec s;
      s.dim = dim;
      s.beta = beta;
      s = normalize(s);
      for (double eta : {0.5, 0.05}) {
        for (double q : {0.7, 5.0, 40.0}) {
          CHECK_THAT(multiplier(s, eta, q), WithinRel(multiplier(s, 1.0, eta * q) / (eta * eta), 1e-8));
        }
      }
    }
  }
}

TEST_CASE("symbol limit: |m_eta/|k|^2 - 1| decreases monotonically to 0") {
  for (int dim : {2, 3}) {
    const MollifierSpec s = default_mollifier(dim);
    for (double k : {1.0, 2.0, 4.0}) {
      double prev = INFINITY;
      for (int p = 3; p <= 10; ++p) {
        const double eta = std::ldexp(1.0, -p);
        const double dev = std::abs(multiplier(s, eta, k) / (k * k) - 1.0);
        CHECK(dev < prev);
        prev = dev;
      }
      CHECK(prev < 1e-4);
    }
  }
}

TEST_CASE("symbol table on a 4x4 grid") {
  const TorusGrid g = make_grid(2, 4);
  const SymbolTable t = symbol_table(default_mollifier(2), 0.2, g);
  std::vector<double> radii;
  for (const auto& [k, m] : t.radial()) radii.push_back(k);
  const std::vector<double> expected{0, 1, std::sqrt(2.0), 2, std::sqrt(5.0), std::sqrt(8.0)};
  REQUIRE(radii.size() == expected.size());
  for (std::size_t i = 0; i < radii.size(); ++i) CHECK_THAT(radii[i], WithinRel(expected[i], 1e-15));
  CHECK(t.values()[0] == 0.0);
  CHECK(t.radial().front().second == 0.0);
}

TEST_CASE("symbol table invariants") {
  const TorusGrid g = make_grid(2, 32);
  const MollifierSpec s = default_mollifier(2);
  const SymbolTable t = symbol_table(s, 0.1, g, 2);
  std::map<long, double> by_radius;
  for_each_mode(g, [&](std::size_t i, const IntVec&, long k2, double) {
    const double m = t.values()[i];
    if (k2 == 0) {
      CHECK(m == 0.0);
      return;
    }
    CHECK(m > 0.0);
    auto [it, fresh] = by_radius.emplace(k2, m);
    if (!fresh) CHECK(it->second == m);
    CHECK_THAT(t.deviation()[i], WithinAbs(m - double(k2), 1e-13 * double(k2)));
  });
  CHECK_THROWS_AS(symbol_table(s, 0.1, make_grid(3, 8)), InvalidArgument);
  CHECK_THROWS_AS(symbol_table(s, 0.0, g), InvalidArgument);
}

TEST_CASE("table values approach |k|^2 monotonically as eta halves") {
  const TorusGrid g = make_grid(2, 16);
  const MollifierSpec s = default_mollifier(2);
  const SymbolTable coarse = symbol_table(s, 0.2, g);
  const SymbolTable fine = symbol_table(s, 0.1, g);
  for_each_mode(g, [&](std::size_t i, const IntVec&, long k2, double) {
    if (k2 == 0 || k2 > 16) return;
    CHECK(std::abs(fine.deviation()[i]) < std::abs(coarse.deviation()[i]));
    CHECK_THAT(coarse.values()[i], WithinRel(multiplier_oracle(s, 0.2, std::sqrt(double(k2))), 1e-8));
  });
}

TEST_CASE("kernel mass and Psi tail") {
  for (int dim : {2, 3}) {
    const MollifierSpec s = default_mollifier(dim);
    const double mass = tanh_sinh(
        [&](double r) { return sphere_area(dim) * unit_mollifier(s, r) * std::pow(r, dim - 3); }, 0.0, s.bump_radius);
    CHECK_THAT(kernel_mass(s), WithinRel(mass, 1e-9));
    const double tail = std::pow(2 * pi, -dim) * mass;
    CHECK_THAT(psi(s, 64.0), WithinRel(tail, 0.05));
    CHECK(psi(s, 0.0) == 0.0);
  }
}

TEST_CASE("Ehrling constants are positive and c0 follows the Taylor limit") {
  for (int dim : {2, 3}) {
    const MollifierSpec s = default_mollifier(dim);
    const EhrlingConstants c = ehrling_constants(s);
    CHECK(c.c0 > 0.0);
    CHECK(c.c0 <= 1.0);
    CHECK(c.c1 > 0.0);
    CHECK_THAT(c.psi_infinity, WithinRel(std::pow(2 * pi, -dim) * kernel_mass(s), 1e-12));
    // Psi(xi)/|xi|^2 -> (2pi)^-dim as xi -> 0
    CHECK_THAT(psi(s, 1e-3) / 1e-6, WithinRel(std::pow(2 * pi, -dim), 1e-5));
    CHECK(c.c0 <= psi(s, 1e-3) / 1e-6 * (1 + 1e-12));
    CHECK(c.c1 <= c.psi_infinity);
  }
}
