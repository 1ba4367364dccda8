#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "nlac/error.hpp"
#include "nlac/ops.hpp"
#include "nlac/verify.hpp"

using namespace nlac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double pi = std::numbers::pi;

Field constant(const TorusGrid& g, double v) { return Field(g, std::vector<double>(g.size(), v)); }
}  // namespace

TEST_CASE("fit_rate on exact data") {
  const RateReport r = fit_rate({{1, 1}, {2, 4}, {4, 16}});
  CHECK_THAT(r.slope, WithinAbs(2.0, 1e-14));
  CHECK_THAT(r.intercept, WithinAbs(0.0, 1e-14));
  CHECK_THAT(r.r_squared, WithinAbs(1.0, 1e-14));
  CHECK(r.pairs.size() == 3);
}

TEST_CASE("fit_rate preconditions") {
  CHECK_THROWS_AS(fit_rate({{1, 2}, {2, 2}}), InvalidArgument);
  CHECK_THROWS_AS(fit_rate({{1, 2}, {2, 0}, {3, 1}}), InvalidArgument);
  CHECK_THROWS_AS(fit_rate({{-1, 2}, {2, 1}, {3, 1}}), InvalidArgument);
}

TEST_CASE("fit_rate matches a normal-equations oracle on noisy data") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<RatePair> pairs;
  for (int i = 0; i < 12; ++i) {
    const double p = std::pow(2.0, -i);
    pairs.emplace_back(p, 3.0 * p * std::exp(noise(rng)));
  }
  // 2x2 normal equations for y = a + b x
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (auto [p, e] : pairs) {
    const double x = std::log(p), y = std::log(e);
    n += 1; sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  const double det = n * sxx - sx * sx;
  const double b = (n * sxy - sx * sy) / det;
  const double a = (sxx * sy - sx * sxy) / det;
  const double r2 = std::pow(n * sxy - sx * sy, 2) / (det * (n * syy - sy * sy));
  const RateReport r = fit_rate(pairs);
  CHECK_THAT(r.slope, WithinRel(b, 1e-10));
  CHECK_THAT(r.intercept, WithinRel(a, 1e-10));
  CHECK_THAT(r.r_squared, WithinRel(r2, 1e-10));
  CHECK(std::abs(r.slope - 1.0) < 0.05);
}

TEST_CASE("random band-limited fields") {
  const TorusGrid g = make_grid(2, 32);
  const Field a = random_band_limited(g, 1);
  const Field b = random_band_limited(g, 1);
  const Field c = random_band_limited(g, 2);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
  const Spectrum s = forward_transform(a);
  double outside = 0.0, inside = 0.0;
  for_each_mode(g, [&](std::size_t i, const IntVec&, long k2, double) {
    (k2 > 64 ? outside : inside) += std::norm(s.coefficients()[i]);
  });
  CHECK(outside < 1e-20 * inside);
}

TEST_CASE("consistency error of a pure mode has the closed form") {
  const TorusGrid g = make_grid(2, 32);
  const MollifierSpec spec = default_mollifier(2);
  const Field u = Field::from_function(g, [](const Point& x) { return std::cos(3 * x[0] + 4 * x[1]); });
  for (double eta : {0.1, 0.02}) {
    const SymbolTable t = symbol_table(spec, eta, g);
    const double expected = std::abs(multiplier(spec, eta, 5.0) - 25.0) * std::pow(26.0, -1.5);
    CHECK_THAT(consistency_error(forward_transform(u), t), WithinRel(expected, 1e-8));
  }
}

TEST_CASE("consistency study on constants is degenerate") {
  const TorusGrid g = make_grid(2, 16);
  const std::vector<Field> fields{constant(g, 1.0), constant(g, -2.0)};
  const std::vector<double> etas{0.1, 0.05, 0.025, 0.0125};
  const ConsistencyReport r = consistency_study(default_mollifier(2), g, etas, fields);
  CHECK_FALSE(r.fit.has_value());
  CHECK_FALSE(r.passed);
  for (const auto& [eta, e] : r.table) CHECK(e == 0.0);
}

TEST_CASE("consistency study table and constants") {
  const TorusGrid g = make_grid(2, 32);
  std::vector<Field> fields;
  for (std::uint64_t s = 0; s < 3; ++s) fields.push_back(random_band_limited(g, s));
  const std::vector<double> etas{0.0625, 0.03125, 0.015625, 0.0078125};
  const ConsistencyReport r = consistency_study(default_mollifier(2), g, etas, fields, 2);
  REQUIRE(r.table.size() == 4);
  REQUIRE(r.fit.has_value());
  for (std::size_t j = 0; j < 4; ++j) CHECK_THAT(r.constants[j], WithinRel(r.table[j].second / etas[j], 1e-15));
  // errors shrink as eta shrinks
  for (std::size_t j = 1; j < 4; ++j) CHECK(r.table[j].second < r.table[j - 1].second);
}

TEST_CASE("Ehrling constant closed forms") {
  const TorusGrid g = make_grid(2, 32);
  const MollifierSpec spec = default_mollifier(2);
  for (double r : {1.0, 2.0, 4.0}) {
    const SymbolTable t = symbol_table(spec, 1.0 / r, g);
    CHECK_THAT(ehrling_constant(forward_transform(constant(g, 0.3)), t, r), WithinRel(1.0 / (r * r), 1e-13));
    const Field mode = Field::from_function(g, [](const Point& x) { return std::cos(2 * x[0] + x[1]); });
    const double m = multiplier(spec, 1.0 / r, std::sqrt(5.0));
    const double expected = 1.0 / (0.5 * m / (r * r) + r * r / 6.0);
    CHECK_THAT(ehrling_constant(forward_transform(mode), t, r), WithinRel(expected, 1e-8));
    CHECK(ehrling_constant(forward_transform(constant(g, 0.0)), t, r) == 0.0);
  }
}

TEST_CASE("Ehrling check has no violations on random fields") {
  const TorusGrid g = make_grid(2, 32);
  const std::vector<double> rs{1.0, 2.0, 4.0};
  const EhrlingReport a = ehrling_check(default_mollifier(2), g, rs, 10, 3, 2);
  CHECK(a.violations == 0);
  CHECK(a.passed);
  CHECK(a.fitted_c > 0.0);
  CHECK(a.table.size() == 3);
  const EhrlingReport b = ehrling_check(default_mollifier(2), g, rs, 10, 3, 1);
  CHECK(a.fitted_c == b.fitted_c);
  CHECK_THROWS_AS(ehrling_check(default_mollifier(2), g, std::vector<double>{0.5}, 1, 0), InvalidArgument);
}

TEST_CASE("spectral floor on constant fields") {
  const TorusGrid g = make_grid(2, 32);
  const PotentialSpec q = PotentialSpec::quartic();
  for (double eps : {0.1, 0.05}) {
    const SpectralFloorResult one = spectral_floor(constant(g, 1.0), eps, q);
    CHECK(one.converged);
    CHECK_THAT(one.lambda, WithinRel(2 / (eps * eps), 1e-6));
    const SpectralFloorResult zero = spectral_floor(constant(g, 0.0), eps, q);
    CHECK(zero.converged);
    CHECK_THAT(zero.lambda, WithinRel(-1 / (eps * eps), 1e-6));
  }
  CHECK_THROWS_AS(spectral_floor(constant(g, 1.0), 0.0, q), InvalidArgument);
}

TEST_CASE("spectral floor matches a dense eigenvalue oracle in 1D") {
  // -d2/dx2 + V on a 1D grid, V = 3 cos(x) + cos(2x): compare with the
  // smallest eigenvalue of the Fourier-Galerkin matrix on the same modes.
  const TorusGrid g = make_grid(1, 16);
  PotentialSpec q = PotentialSpec::quartic();
  // f''(u) = 3u^2 - 1; choose u with u^2 = (1 + V)/3 >= 0
  Field u(g);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.point(i)[0];
    v[i] = 1.5 + std::cos(x) + 0.5 * std::sin(2 * x);
    u[i] = std::sqrt((1 + v[i]) / 3);
  }
  const SpectralFloorResult res = spectral_floor(u, 1.0, q, {1e-12, 1e-12, 400, 5000, 0});
  // dense matrix in the nodal basis: D2 spectral + diag(V)
  const int n = 16;
  std::vector<double> a(n * n, 0.0);
  for (int j = 0; j < n; ++j) {
    Field e(g);
    e[std::size_t(j)] = 1.0;
    const Field col = apply_laplacian(e);
    for (int i = 0; i < n; ++i) a[i * n + j] = -col[std::size_t(i)] + (i == j ? v[std::size_t(i)] : 0.0);
  }
  // smallest eigenvalue by bisection on Sturm-free inertia: use Jacobi rotations
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int r = p + 1; r < n; ++r) off += a[p * n + r] * a[p * n + r];
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int r = p + 1; r < n; ++r) {
        const double apr = a[p * n + r];
        if (std::abs(apr) < 1e-300) continue;
        const double theta = (a[r * n + r] - a[p * n + p]) / (2 * apr);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akr = a[k * n + r];
          a[k * n + p] = c * akp - s * akr;
          a[k * n + r] = s * akp + c * akr;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p * n + k], ark = a[r * n + k];
          a[p * n + k] = c * apk - s * ark;
          a[r * n + k] = s * apk + c * ark;
        }
      }
    }
  }
  double lmin = a[0];
  for (int i = 1; i < n; ++i) lmin = std::min(lmin, a[i * n + i]);
  CHECK(res.converged);
  CHECK_THAT(res.lambda, WithinRel(lmin, 1e-8));
}

TEST_CASE("compare_nonlocal_local is deterministic and shrinks with eta") {
  SolverConfig base;
  base.grid = make_grid(2, 32);
  base.epsilon = 0.2;
  base.dt = 1e-3;
  base.t_end = 0.01;
  base.diagnostic_stride = 5;
  Field init = random_band_limited(base.grid, 9);
  const double sup = init.sup_norm();
  for (double& v : init.values()) v /= sup;
  const std::vector<double> etas{0.2, 0.1, 0.05};
  const CompareReport a = compare_nonlocal_local(base, default_mollifier(2), etas, init, 2);
  const CompareReport b = compare_nonlocal_local(base, default_mollifier(2), etas, init, 1);
  CHECK(a.table == b.table);
  CHECK(a.table[0].second > a.table[1].second);
  CHECK(a.table[1].second > a.table[2].second);
  REQUIRE(a.fit.has_value());
}

TEST_CASE("mcf study guards") {
  McfStudy s;
  s.interface = make_interface(2, 1.0);
  s.grid = make_grid(2, 64);
  s.epsilons = {0.05};
  CHECK_THROWS_AS(mcf_convergence(s), InvalidArgument);  // eps below the spacing
  s.epsilons = {0.1};
  s.t_end = 0.4;
  CHECK_THROWS_AS(mcf_convergence(s), InvalidArgument);  // beyond 0.6 collapse time
}

TEST_CASE("mcf study on a coarse grid tracks the shrinking circle") {
  McfStudy s;
  s.interface = make_interface(2, 1.0);
  s.grid = make_grid(2, 64);
  s.epsilons = {0.1};
  s.t_end = 0.1;
  s.dt_factor = 0.2;
  const McfReport r = mcf_convergence(s);
  REQUIRE(r.curves.size() == 1);
  CHECK(r.curves[0].radius_error < 0.05);
  CHECK(r.curves[0].times.size() == r.curves[0].radius.size());
  CHECK(r.passed);
}
