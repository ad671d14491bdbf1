#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "hyperlab.hpp"

using namespace hyperlab;
using Catch::Matchers::WithinAbs;

namespace {

const Grid kGrid = make_grid(20.0, 2049);

GridFunction bump_on(const Grid& g, double c) {
  return sample(g, [c](double x) { return 1 + c * std::exp(-x * x); });
}

double sup_inner(const GridFunction& a, const GridFunction& b, double radius) {
  double e = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a.grid().node(i)) <= radius) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

// P(|X_t| > L) for the symmetric stable law from the series for its density.
double stable_tail(double alpha, double t, double L) {
  double s = 0;
  for (int k = 1; k < 30; ++k) {
    const double term = std::tgamma(alpha * k + 1) / std::tgamma(k + 1.0) *
                        std::sin(0.5 * k * std::numbers::pi * alpha) * std::pow(t, k) *
                        std::pow(L, -alpha * k) / (alpha * k);
    s += k % 2 ? term : -term;
  }
  return 2 * s / std::numbers::pi;
}

}  // namespace

TEST_CASE("stable tail oracle") {
  CHECK_THAT(stable_tail(1.0, 0.5, 20.0), WithinAbs(1 - 2 / std::numbers::pi * std::atan(40.0), 1e-15));
}

TEST_CASE("stable kernels") {
  const double t = 0.5;
  const auto k2 = stable_kernel(2.0, t, kGrid);
  const auto heat = sample(kGrid, [t](double x) {
    return std::exp(-x * x / (4 * t)) / std::sqrt(4 * std::numbers::pi * t);
  });
  CHECK(sup_inner(k2, heat, kGrid.half_width) <= 1e-8);

  const auto k1 = stable_kernel(1.0, t, kGrid);
  const auto cauchy = sample(kGrid, [t](double x) { return t / (std::numbers::pi * (t * t + x * x)); });
  CHECK(sup_inner(k1, cauchy, 10.0) <= 1e-6);

  // Unit mass: grid quadrature plus the analytic tail beyond the window.
  for (double alpha : {0.8, 1.0, 1.5, 2.0}) {
    const auto k = stable_kernel(alpha, t, kGrid);
    const double tail = alpha == 2.0 ? 0.0 : stable_tail(alpha, t, kGrid.half_width);
    CHECK_THAT(integrate_dx(k) + tail, WithinAbs(1.0, 1e-8));
  }
}

TEST_CASE("Levy semigroup action") {
  const auto f = bump_on(kGrid, 0.3);
  const LevyEngine st2(stable(2.0), kGrid);
  CHECK(sup_inner(st2.apply(0.0, f), f, 20) == 0.0);
  CHECK(sup_inner(st2.apply(0.4, f), heat_apply(f, 0.4), 10) <= 1e-8);

  // Unit jump at z = 1 on a grid whose spacing divides 1.
  const Grid g = make_grid(16.0, 3201);
  const auto fg = bump_on(g, 0.3);
  const LevyEngine cp(compound_poisson({1.0}, {1.0}), g);
  const double t = 0.5;
  const auto series = cp.apply(t, fg);
  double worst = 0;
  for (std::size_t i = 0; i < g.points; ++i) {
    const double x = g.node(i);
    if (std::abs(x) > 8) continue;
    double direct = 0, p = std::exp(-t);
    for (int k = 0; k < 40; ++k) {
      direct += p * (1 + 0.3 * std::exp(-(x + k) * (x + k)));
      p *= t / (k + 1);
    }
    worst = std::max(worst, std::abs(series[i] - direct));
  }
  CHECK(worst <= 1e-10);
  CHECK(cp.jump_mass() == 1.0);
  CHECK(std::isinf(st2.jump_mass()));
}

TEST_CASE("Bregman distance") {
  for (double u : {0.1, 0.5, 1.0, 2.0, 7.0})
    for (double v : {0.1, 0.5, 1.0, 2.0, 7.0}) {
      const double d = LevyEngine::bregman(u, v);
      if (u == v)
        CHECK(d == 0.0);
      else
        CHECK(d > 0);
    }
  CHECK_THROWS_AS(LevyEngine::bregman(0.0, 1.0), Error);
}

TEST_CASE("Bregman entropy bound") {
  const LevyEngine cp(compound_poisson({1.0}, {1.0}), kGrid);
  const auto c = bregman_entropy_check(cp, constant(kGrid, 2.0), 0.5);
  CHECK_THAT(c.lhs, WithinAbs(0.0, 1e-12));
  CHECK_THAT(c.rhs, WithinAbs(0.0, 1e-12));
  CHECK(bregman_entropy_check(cp, bump_on(kGrid, 0.3), 0.5).margin >= -1e-6);
  const LevyEngine st(stable(1.0), kGrid);
  CHECK_THROWS_AS(bregman_entropy_check(st, bump_on(kGrid, 0.3), 0.5), Error);
}

TEST_CASE("truncated stable ladder") {
  const auto ladder = bregman_truncation_ladder(1.0, bump_on(kGrid, 0.3), 0.5, {0.4, 0.2, 0.1});
  REQUIRE(ladder.size() == 3);
  for (const auto& r : ladder) CHECK(r.ok());
  // Smaller cutoffs carry more jump mass.
  CHECK(ladder[0].params[1].second < ladder[1].params[1].second);
  CHECK(ladder[1].params[1].second < ladder[2].params[1].second);
}

TEST_CASE("Levy hypercontractivity") {
  const auto f = bump_on(kGrid, 0.2);
  SECTION("s = t") {
    const auto sch = ExponentSchedule::levy_fine(0.8, 1.0, 1.0);
    CHECK(sch.q2 == 0.8);
    const auto r = check_levy_hyper(LevyEngine(stable(1.0), kGrid), sch, f, LevyVariant::fine);
    CHECK_THAT(r.margin, WithinAbs(0.0, 1e-12));
  }
  SECTION("fine, stable alpha = 1") {
    const auto sch = ExponentSchedule::levy_fine(0.8, 0.5, 1.0);
    CHECK_THAT(sch.q2, WithinAbs(0.4 / 0.6, 1e-15));
    CHECK(check_levy_hyper(LevyEngine(stable(1.0), kGrid), sch, f, LevyVariant::fine).margin >= -1e-6);
  }
  SECTION("coarse, unit jump") {
    const auto sch = ExponentSchedule::levy_coarse(0.8, 0.5, 1.0);
    const auto r = check_levy_hyper(LevyEngine(compound_poisson({1.0}, {1.0}), kGrid), sch, f,
                                    LevyVariant::coarse);
    CHECK(r.margin >= -1e-6);
    CHECK(r.extra("factor") > 1);
  }
  SECTION("variant and schedule must match") {
    const auto sch = ExponentSchedule::levy_fine(0.8, 0.5, 1.0);
    CHECK_THROWS_AS(check_levy_hyper(LevyEngine(stable(1.0), kGrid), sch, f, LevyVariant::coarse), Error);
  }
}

TEST_CASE("Levy Ornstein-Uhlenbeck semigroup") {
  const auto f = bump_on(kGrid, 0.2);
  CHECK(sup_inner(levy_ou_apply(1.0, 0.0, f), f, 20) == 0.0);
  const Grid fine = make_grid(20.0, 8193);
  const auto ff = bump_on(fine, 0.2);
  CHECK(sup_inner(levy_ou_apply(2.0, 0.3, ff), ou_apply(ff, 0.3), 6) <= 1e-8);

  const auto c = levy_dilation_commutation(1.0, 0.4, 0.5, [](double x) { return std::exp(-x * x); }, kGrid);
  CHECK(c.max_deviation <= 1e-8);

  CHECK(check_levy_ou_corollary(1.0, 0.3, 0.9, f).margin >= -1e-6);
  CHECK(check_levy_ou_corollary(2.0, 0.5, 0.8, f).margin >= -1e-6);
  CHECK_THAT(check_levy_ou_corollary(1.0, 0.0, 0.9, f).margin, WithinAbs(0.0, 1e-12));
}

TEST_CASE("ultracontractive scaling exponent") {
  const auto a = ultracontractive_exponent(2.0, 2.0, 4.0);
  CHECK_THAT(a.slope, WithinAbs(-0.125, 0.02));
  const auto b = ultracontractive_exponent(1.0, 2.0, 3.0);
  CHECK_THAT(b.slope, WithinAbs(-1.0 / 6, 0.02));
  const auto c = ultracontractive_exponent(1.5, 2.0, 2.0);
  CHECK_THAT(c.slope, WithinAbs(0.0, 0.02));
}
