#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

#include "nlac/error.hpp"
#include "nlac/ops.hpp"

using namespace nlac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

double max_abs_diff(const Field& a, const Field& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.grid().size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

// (L_eta u)(x) = int J_eta(y) (u(x) - u(x + y)) dy by polar quadrature.
template <class U>
double convolution_oracle(const MollifierSpec& spec, double eta, U&& u, double x0, double x1) {
  static boost::math::quadrature::tanh_sinh<double> q(15);
  auto radial = [&](double r) {
    constexpr int n = 256;
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      const double t = 2 * pi * j / n;
      s += u(x0, x1) - u(x0 + r * std::cos(t), x1 + r * std::sin(t));
    }
    const double rho = std::pow(eta, -2) * unit_mollifier(spec, r / eta);
    return rho / r * (2 * pi * s / n);
  };
  return q.integrate(radial, 0.0, eta * spec.bump_radius, 1e-12);
}

}  // namespace

TEST_CASE("L_eta annihilates constants") {
  const TorusGrid g = make_grid(2, 16);
  const SymbolTable t = symbol_table(default_mollifier(2), 0.2, g);
  const Field c(g, std::vector<double>(g.size(), 3.0));
  CHECK(apply_nonlocal(c, t).sup_norm() < 1e-13);
  CHECK(nonlocal_energy(c, t) == 0.0);
}

TEST_CASE("L_eta acts on cos(x1) by m_eta(1), matching a direct convolution") {
  const TorusGrid g = make_grid(2, 16);
  const MollifierSpec s = default_mollifier(2);
  const double eta = 0.3;
  const SymbolTable t = symbol_table(s, eta, g);
  const Field u = Field::from_function(g, [](const Point& x) { return std::cos(x[0]); });
  const Field lu = apply_nonlocal(u, t);
  const double m1 = multiplier(s, eta, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK_THAT(lu[i], WithinAbs(m1 * u[i], 1e-12));

  auto cosine = [](double a, double) { return std::cos(a); };
  for (int j : {0, 3, 5}) {
    const Point x = g.point(std::size_t(j) * g.n() + 2);
    CHECK_THAT(lu[std::size_t(j) * g.n() + 2], WithinAbs(convolution_oracle(s, eta, cosine, x[0], x[1]), 1e-9));
  }
}

TEST_CASE("L_eta matches the convolution oracle on a two-mode field") {
  const TorusGrid g = make_grid(2, 16);
  const MollifierSpec s = default_mollifier(2);
  const double eta = 0.5;
  const SymbolTable t = symbol_table(s, eta, g);
  auto u = [](double a, double b) { return std::sin(2 * a + b) + 0.5 * std::cos(3 * b); };
  const Field f = Field::from_function(g, [&](const Point& x) { return u(x[0], x[1]); });
  const Field lf = apply_nonlocal(f, t);
  for (std::size_t i : {std::size_t(0), std::size_t(37), std::size_t(200)}) {
    const Point x = g.point(i);
    CHECK_THAT(lf[i], WithinAbs(convolution_oracle(s, eta, u, x[0], x[1]), 1e-9));
  }
}

TEST_CASE("operators are linear") {
  const TorusGrid g = make_grid(2, 16);
  const SymbolTable t = symbol_table(default_mollifier(2), 0.2, g);
  const Field u = Field::from_function(g, [](const Point& x) { return std::sin(x[0]) * std::cos(2 * x[1]); });
  const Field v = Field::from_function(g, [](const Point& x) { return std::exp(std::cos(x[0] + x[1])); });
  Field w(g);
  for (std::size_t i = 0; i < g.size(); ++i) w[i] = 2.0 * u[i] - 0.5 * v[i];
  const Field lu = apply_nonlocal(u, t), lv = apply_nonlocal(v, t), lw = apply_nonlocal(w, t);
  Field comb(g);
  for (std::size_t i = 0; i < g.size(); ++i) comb[i] = 2.0 * lu[i] - 0.5 * lv[i];
  CHECK(max_abs_diff(lw, comb) < 1e-12);
}

TEST_CASE("Laplacian of cos(2 x2) is -4 cos(2 x2)") {
  const TorusGrid g = make_grid(2, 16);
  const Field u = Field::from_function(g, [](const Point& x) { return std::cos(2 * x[1]); });
  const Field lap = apply_laplacian(u);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK_THAT(lap[i], WithinAbs(-4 * u[i], 1e-12));
}

TEST_CASE("energies") {
  const TorusGrid g = make_grid(2, 16);
  const SymbolTable t = symbol_table(default_mollifier(2), 0.2, g);
  const Field u = Field::from_function(g, [](const Point& x) { return std::cos(x[0]); });
  // 1/2 int |grad cos x1|^2 = 1/2 * 2pi^2
  CHECK_THAT(dirichlet_energy(u), WithinRel(pi * pi, 1e-13));
  CHECK_THAT(nonlocal_energy(u, t), WithinRel(0.5 * inner_product(apply_nonlocal(u, t), u), 1e-12));
  CHECK_THAT(nonlocal_energy(u, t), WithinRel(t.values()[1] * pi * pi, 1e-12));
}

TEST_CASE("consistency residual of a pure mode") {
  const TorusGrid g = make_grid(2, 16);
  const SymbolTable t = symbol_table(default_mollifier(2), 0.2, g);
  const Field u = Field::from_function(g, [](const Point& x) { return std::cos(3 * x[0]); });
  const double expected = std::abs(multiplier(default_mollifier(2), 0.2, 3.0) - 9.0) * pi * std::sqrt(2.0);
  CHECK_THAT(consistency_residual(u, t), WithinRel(expected, 1e-8));
}

TEST_CASE("projection") {
  const TorusGrid g = make_grid(2, 16);
  const Field u = Field::from_function(g, [](const Point& x) { return std::cos(x[0]) + std::sin(5 * x[1]); });
  const Field p = project(u, 3);
  const Field expected = Field::from_function(g, [](const Point& x) { return std::cos(x[0]); });
  CHECK(max_abs_diff(p, expected) < 1e-13);
  CHECK(max_abs_diff(project(p, 3), p) < 1e-13);
  CHECK(max_abs_diff(project(u, 8), u) < 1e-13);
  CHECK_THROWS_AS(project(u, 9), InvalidArgument);
  CHECK_THROWS_AS(project(u, -1), InvalidArgument);
}

TEST_CASE("grid mismatch is rejected") {
  const SymbolTable t = symbol_table(default_mollifier(2), 0.2, make_grid(2, 8));
  const Field u(make_grid(2, 16));
  CHECK_THROWS_AS(apply_nonlocal(u, t), InvalidArgument);
  CHECK_THROWS_AS(nonlocal_energy(u, t), InvalidArgument);
}
