#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "hyperlab.hpp"

using namespace hyperlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Grid kLine = make_grid(14.0, 4097);

}  // namespace

TEST_CASE("entropy") {
  const auto g = standard_gaussian();
  CHECK_THAT(entropy(g, constant(kLine, 2.5)), WithinAbs(0.0, 1e-14));
  const auto tilt = sample(kLine, [](double x) { return std::exp(x - 0.5); });
  CHECK_THAT(entropy(g, tilt), WithinAbs(0.5, 1e-8));

  const auto q = [](const Grid& grid) {
    return sample(grid, [](double x) { return (1 + 0.1 * x * x) / 1.1; });
  };
  const double coarse = entropy(g, q(kLine));
  const double fine = entropy(g, q(make_grid(14.0, 4 * 4096 + 1)));
  CHECK_THAT(coarse, WithinAbs(fine, 1e-8));

  const auto neg = sample(kLine, [](double x) { return x; });
  CHECK_THROWS_AS(entropy(g, neg), Error);
}

TEST_CASE("entropy is homogeneous of degree one") {
  const auto g = standard_gaussian();
  const auto f = sample(kLine, [](double x) { return 1 + 0.4 * std::exp(-x * x); });
  const auto f3 = transform(f, [](double v) { return 3 * v; });
  CHECK_THAT(entropy(g, f3), WithinRel(3 * entropy(g, f), 1e-12));
}

TEST_CASE("L^q means") {
  const auto g = standard_gaussian();
  const auto f = sample(kLine, [](double x) { return std::exp(0.1 * x * x); });
  CHECK_THAT(lq_mean(g, f, 1.0), WithinRel(integrate(f, g), 1e-15));
  CHECK_THAT(lq_mean(g, f, 2.0), WithinAbs(std::pow(0.6, -0.25), 1e-8));
  const auto b = sample(kLine, [](double x) { return 1 + 0.5 * std::sin(x); });
  double prev = lq_mean(g, b, -2.0);
  for (double q : {-0.5, 0.5, 1.0, 2.0, 4.0}) {
    const double v = lq_mean(g, b, q);
    CHECK(v >= prev - 1e-14);
    prev = v;
  }
  CHECK_THROWS_AS(lq_mean(g, b, 0.0), Error);
}

TEST_CASE("carre du champ") {
  const Grid g = make_grid(3.0, 61);
  const auto one = carre_du_champ(sample(g, [](double x) { return x; }));
  const auto sq = carre_du_champ(sample(g, [](double x) { return x * x; }));
  for (std::size_t i = 1; i + 1 < g.points; ++i) {
    CHECK_THAT(one[i], WithinAbs(1.0, 1e-12));
    CHECK_THAT(sq[i], WithinAbs(4 * g.node(i) * g.node(i), 1e-11));
  }
}

TEST_CASE("diffusion chain rule Gamma(e^f) = e^{2f} Gamma(f) at O(h^2)") {
  auto err = [](std::size_t points) {
    const Grid g = make_grid(2.0, points);
    const auto f = sample(g, [](double x) { return std::sin(x); });
    const auto lhs = carre_du_champ(transform(f, [](double v) { return std::exp(v); }));
    const auto gf = carre_du_champ(f);
    double e = 0;
    for (std::size_t i = 1; i + 1 < g.points; ++i)
      e = std::max(e, std::abs(lhs[i] - std::exp(2 * f[i]) * gf[i]));
    return e;
  };
  const double coarse = err(101), fine = err(201);
  CHECK(coarse < 1e-2);
  CHECK(coarse / fine > 3.5);
}

TEST_CASE("Gamma_2 on the line") {
  const Grid g = make_grid(3.0, 301);
  const auto interior = [&](std::size_t i) {
    return i >= kGamma2Margin && i + kGamma2Margin < g.points;
  };
  // Laplacian in dimension one: Gamma_2 = (f'')^2 = (Delta f)^2.
  const auto f = sample(g, [](double x) { return std::sin(x) + 0.1 * x * x * x; });
  const auto g2 = gamma2(f, Generator::laplacian);
  const auto lf = apply_generator(f, Generator::laplacian);
  for (std::size_t i = 0; i < g.points; ++i)
    if (interior(i)) CHECK_THAT(g2[i] - lf[i] * lf[i], WithinAbs(0.0, 1e-6));

  const auto x = gamma2(sample(g, [](double y) { return y; }), Generator::ou);
  const auto x2 = gamma2(sample(g, [](double y) { return y * y; }), Generator::ou);
  const auto gx2 = carre_du_champ(sample(g, [](double y) { return y * y; }));
  for (std::size_t i = 0; i < g.points; ++i) {
    if (!interior(i)) continue;
    CHECK_THAT(x[i], WithinAbs(1.0, 1e-8));
    CHECK_THAT(x2[i] - gx2[i], WithinAbs(4.0, 1e-7));
  }
}

TEST_CASE("deficiency A_lambda") {
  CHECK(deficiency(1.0).value == 0.0);
  CHECK_THAT(deficiency(std::numbers::e).value, WithinAbs(std::numbers::e - 2, 1e-12));
  CHECK_THAT(deficiency(0.5).value, WithinAbs(std::log(2.0) - 0.5, 1e-12));
  for (double l : {1e-3, 0.2, 0.9, 1.1, 7.0, 1e3}) CHECK(deficiency(l).value > 0);
  CHECK_THROWS_AS(deficiency(0.0), Error);
}

TEST_CASE("variance") {
  const auto g = standard_gaussian();
  CHECK_THAT(variance(g, constant(kLine, 3.0)), WithinAbs(0.0, 1e-14));
  CHECK_THAT(variance(g, sample(kLine, [](double x) { return x; })), WithinAbs(1.0, 1e-8));
  CHECK_THAT(variance(g, sample(kLine, [](double x) { return x * x; })), WithinAbs(2.0, 1e-8));
  const Grid r = make_radial_grid(14.0, 4097, 3);
  CHECK_THAT(variance(standard_gaussian(3), sample(r, [](double x) { return x * x; })),
             WithinAbs(6.0, 1e-7));
}
