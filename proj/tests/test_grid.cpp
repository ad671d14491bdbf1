#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "hyperlab.hpp"

using namespace hyperlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("make_grid spacing and preconditions") {
  CHECK_THAT(make_grid(8.0, 1024).spacing, WithinRel(16.0 / 1023, 1e-15));
  CHECK(make_grid(1.0, 8).spacing == 2.0 / 7);
  CHECK_THROWS_AS(make_grid(8.0, 7), Error);
  CHECK_THROWS_AS(make_grid(-1.0, 64), Error);
  const Grid g = make_grid(3.0, 31);
  CHECK(g.node(0) == -3.0);
  CHECK_THAT(g.node(30), WithinAbs(3.0, 1e-14));
}

TEST_CASE("grid function rejects non-finite samples and size mismatches") {
  const Grid g = make_grid(1.0, 8);
  CHECK_THROWS_AS(GridFunction(g, std::vector<double>(7, 1.0)), Error);
  CHECK_THROWS_AS(sample(g, [](double x) { return x == -1.0 ? NAN : 1.0; }), Error);
}

TEST_CASE("integration against the standard Gaussian") {
  const Grid g = make_grid(12.0, 2049);
  const auto m = standard_gaussian();
  CHECK_THAT(integrate(constant(g, 1.0), m), WithinAbs(1.0, 1e-12));
  CHECK_THAT(integrate(sample(g, [](double x) { return x * x; }), m), WithinAbs(1.0, 1e-8));
  CHECK_THAT(integrate(sample(g, [](double x) { return std::exp(0.25 * x * x); }), m),
             WithinAbs(std::sqrt(2.0), 1e-8));
}

TEST_CASE("radial integration matches the n-dimensional Gaussian moments") {
  for (int n : {2, 3}) {
    const Grid g = make_radial_grid(12.0, 2049, n);
    const auto m = standard_gaussian(n);
    CHECK_THAT(integrate(constant(g, 1.0), m), WithinAbs(1.0, 1e-8));
    CHECK_THAT(integrate(sample(g, [](double r) { return r * r; }), m), WithinAbs(n, 1e-8));
  }
}

TEST_CASE("finite differences are exact on quadratics") {
  const Grid g = make_grid(2.0, 65);
  const auto f = sample(g, [](double x) { return x * x; });
  const auto d1 = fd_gradient(f), d2 = fd_laplacian(f);
  for (std::size_t i = 1; i + 1 < g.points; ++i) {
    CHECK_THAT(d1[i], WithinAbs(2 * g.node(i), 1e-12));
    CHECK_THAT(d2[i], WithinAbs(2.0, 1e-10));
  }
}

TEST_CASE("second-order Laplacian converges at h^2 on a non-polynomial") {
  // Cubics are reproduced exactly by the centered stencil, so the rate is
  // measured on sin.
  auto err = [](std::size_t points) {
    const Grid g = make_grid(2.0, points);
    const auto d2 = fd_laplacian(sample(g, [](double x) { return std::sin(x); }));
    double e = 0;
    for (std::size_t i = 1; i + 1 < g.points; ++i) e = std::max(e, std::abs(d2[i] + std::sin(g.node(i))));
    return e;
  };
  const double coarse = err(65), fine = err(129);
  CHECK(coarse / fine > 3.8);
  CHECK(coarse / fine < 4.2);
}

TEST_CASE("x^3 Laplacian is 6x under both stencil orders") {
  const Grid g = make_grid(2.0, 65);
  const auto f = sample(g, [](double x) { return x * x * x; });
  for (auto order : {FdOrder::second, FdOrder::fourth}) {
    const auto d2 = fd_laplacian(f, order);
    for (std::size_t i = 2; i + 2 < g.points; ++i) CHECK_THAT(d2[i], WithinAbs(6 * g.node(i), 1e-9));
  }
}

TEST_CASE("Fourier multiplier: identity, heat and Poisson symbols") {
  const Grid g = make_grid(20.0, 1025);
  const auto bump = sample(g, [](double x) { return std::exp(-x * x); });

  const auto same = fourier_multiplier(bump, [](double) { return 1.0; });
  for (std::size_t i = 0; i < g.points; ++i) CHECK_THAT(same[i], WithinAbs(bump[i], 1e-12));

  const double t = 0.3;
  const auto heat = fourier_multiplier(bump, [t](double xi) { return std::exp(-t * xi * xi); });
  for (std::size_t i = 0; i < g.points; ++i) {
    const double x = g.node(i);
    const double exact = std::exp(-x * x / (1 + 4 * t)) / std::sqrt(1 + 4 * t);
    CHECK_THAT(heat[i], WithinAbs(exact, 1e-8));
  }

  const double tc = 0.5;
  const auto cauchy = kernel_on_grid(g, [tc](double xi) { return std::exp(-tc * std::abs(xi)); }, 16);
  for (std::size_t i = 0; i < g.points; ++i) {
    const double x = g.node(i);
    if (std::abs(x) > 10) continue;
    CHECK_THAT(cauchy[i], WithinAbs(tc / (std::numbers::pi * (tc * tc + x * x)), 1e-6));
  }
}

TEST_CASE("interpolation reproduces smooth data and flags extrapolation") {
  const Grid g = make_grid(4.0, 401);
  const auto f = sample(g, [](double x) { return std::sin(x); });
  for (double x : {-3.33, -0.5, 0.123, 2.9}) CHECK_THAT(interpolate(f, x), WithinAbs(std::sin(x), 1e-7));
  Diagnostics d;
  interpolate(f, 5.0, &d);
  CHECK_FALSE(d.empty());
}

TEST_CASE("log floor reports clamping") {
  const Grid g = make_grid(1.0, 8);
  Diagnostics d;
  const auto l = log_floor(constant(g, 0.0), &d);
  CHECK(std::isfinite(l[0]));
  CHECK_FALSE(d.empty());
}
