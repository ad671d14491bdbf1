#include <catch_amalgamated.hpp>

#include <cmath>

#include "hyperlab.hpp"

using namespace hyperlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Grid kGrid = make_grid(16.0, 4097);

TestFunction one() { return from_function("1", [](double) { return 1.0; }); }

}  // namespace

TEST_CASE("quantile W2 against Gaussian closed forms") {
  CHECK_THAT(w2_quantile(standard_gaussian(), standard_gaussian(), kGrid).w2_squared,
             WithinAbs(0.0, 1e-12));
  CHECK_THAT(w2_quantile(standard_gaussian(), gaussian(1.0, 1.0), kGrid).w2_squared,
             WithinAbs(0.5, 1e-6));
  CHECK_THAT(w2_quantile(gaussian(0.0, 1.0), gaussian(0.0, 4.0), kGrid).w2_squared,
             WithinAbs(0.5, 1e-6));
  CHECK_THAT(w2_quantile(gaussian(-0.3, 0.5), gaussian(0.7, 2.0), kGrid).w2_squared,
             WithinAbs(w2_gaussian_closed_form(-0.3, std::sqrt(0.5), 0.7, std::sqrt(2.0)), 1e-6));
}

TEST_CASE("quantile-sample method agrees with the map integral") {
  W2Options o;
  o.method = W2Method::quantile_samples;
  o.quantile_samples = 1 << 14;
  const double a = w2_quantile(gaussian(0.0, 1.0), gaussian(0.5, 2.25), kGrid).w2_squared;
  const double b = w2_quantile(gaussian(0.0, 1.0), gaussian(0.5, 2.25), kGrid, o).w2_squared;
  CHECK_THAT(a, WithinAbs(b, 1e-4));
}

TEST_CASE("Gaussian W2 closed form") {
  CHECK(w2_gaussian_closed_form(0.3, 1.2, 0.3, 1.2, 2) == 0.0);
  CHECK(w2_gaussian_closed_form(0.0, 1.0, 1.0, 1.0, 1) == 0.5);
  CHECK(w2_gaussian_closed_form(0.0, 1.0, 0.0, 2.0, 3) == 1.5);
  CHECK(to_unhalved_convention(0.5) == 1.0);
}

TEST_CASE("Kantorovich dual stays below the primal") {
  const Grid g = make_grid(12.0, 1025);
  const auto pair = w2_quantile(gaussian(0.0, 1.0), gaussian(0.8, 1.69), g, {}, true);
  // The node-only infimum inside the dual overestimates Q_1 by at most h^2/8.
  CHECK(pair.dual_value <= pair.w2_squared + g.spacing * g.spacing / 8);
  CHECK(pair.dual_value >= pair.w2_squared - 1e-3);
}

TEST_CASE("unnormalized measures are rejected") {
  CHECK_THROWS_AS(w2_quantile(gaussian(0.0, 1.0), gaussian(0.0, 1.0), make_grid(2.0, 257)), Error);
}

TEST_CASE("local Talagrand") {
  SECTION("h = 1") {
    const auto r = check_talagrand_local(1.0, one(), heat_semigroup());
    CHECK_THAT(r.lhs, WithinAbs(0.0, 1e-10));
    CHECK_THAT(r.rhs, WithinAbs(0.0, 1e-10));
  }
  SECTION("OU at u = 8 recovers the classical Gaussian bound") {
    // density of N(0.8, v) against the kernel N(0, v), v = 1 - e^{-16}
    const double m = 0.8, v = -std::expm1(-16.0);
    const auto h = from_closed("shift", ClosedForm{GaussExp{std::exp(-0.5 * m * m / v), 0, m / v, 1}});
    const auto r = check_talagrand_local(8.0, h, ou_semigroup());
    CHECK_THAT(r.lhs, WithinAbs(0.32, 1e-5));
    CHECK(r.margin >= -1e-5);
    CHECK(std::abs(r.log_ratio) <= 1e-3);
  }
  SECTION("heat, normalized tilt") {
    // density of N(0.5, 2) against N(0, 2)
    const double m = 0.5, v = 2.0;
    const auto h = from_closed("tilt", ClosedForm{GaussExp{std::exp(-0.5 * m * m / v), 0, m / v, 1}});
    CHECK(check_talagrand_local(1.0, h, heat_semigroup()).margin >= -1e-5);
  }
  SECTION("unnormalized tilts are rejected") {
    const auto h = from_function("2", [](double) { return 2.0; });
    CHECK_THROWS_AS(check_talagrand_local(1.0, h, heat_semigroup()), Error);
  }
}

TEST_CASE("dimensional Talagrand") {
  SECTION("u2 = u1 and h = 1") {
    const auto r = check_talagrand_dimensional(0.5, 0.5, one());
    CHECK_THAT(r.lhs, WithinAbs(0.0, 1e-10));
    CHECK_THAT(r.rhs, WithinAbs(0.0, 1e-10));
  }
  SECTION("u1 = 0.5, u2 = 0.4, mean-shift tilt") {
    const double m = 0.6, v = 1.0;
    const auto h = from_closed("tilt", ClosedForm{GaussExp{std::exp(-0.5 * m * m / v), 0, m / v, 1}});
    const auto r = check_talagrand_dimensional(0.5, 0.4, h);
    CHECK(r.margin >= -1e-5);
    const auto at_u1 = check_talagrand_dimensional(0.5, 0.5, h);
    CHECK(r.extra("best_margin") <= at_u1.margin + 1e-9);
  }
}

TEST_CASE("refined Talagrand") {
  SECTION("h = 1") {
    for (auto mode : {TalagrandMode::classical, TalagrandMode::lambda_family, TalagrandMode::optimized}) {
      const auto r = check_refined_talagrand(one(), 1, mode);
      CHECK_THAT(r.lhs, WithinAbs(0.0, 1e-10));
      CHECK_THAT(r.rhs, WithinAbs(0.0, 1e-10));
    }
  }
  SECTION("shift m = 1 saturates the classical bound") {
    const auto r = check_refined_talagrand(shift_tilt(1.0), 1, TalagrandMode::classical);
    CHECK_THAT(r.lhs, WithinAbs(0.5, 1e-4));
    CHECK_THAT(r.rhs, WithinAbs(0.5, 1e-4));
  }
  SECTION("lambda = 1 reproduces the classical margin") {
    RefinedTalagrandOptions o;
    o.lambda = 1.0;
    for (const auto& h : talagrand_corpus()) {
      const auto a = check_refined_talagrand(h, 1, TalagrandMode::classical);
      const auto b = check_refined_talagrand(h, 1, TalagrandMode::lambda_family, o);
      CHECK(a.margin == b.margin);
    }
  }
  SECTION("refined right side never exceeds the classical one") {
    for (bool nonsmooth : {false, true}) {
      RefinedTalagrandOptions o;
      o.nonsmooth = nonsmooth;
      for (const auto& h : talagrand_corpus()) {
        const auto r = check_refined_talagrand(h, 1, TalagrandMode::optimized, o);
        CHECK(r.extra("refined_rhs") <= r.extra("classical_rhs") + 1e-10);
        CHECK(r.ok());
      }
    }
  }
}

TEST_CASE("refined Poincare") {
  const auto c = check_refined_poincare(from_function("c", [](double) { return 2.0; }), 1);
  CHECK_THAT(c.lhs, WithinAbs(0.0, 1e-12));
  CHECK_THAT(c.rhs, WithinAbs(0.0, 1e-12));
  const auto sq = check_refined_poincare(from_closed("x^2", polynomial({0, 0, 1})), 1);
  CHECK_THAT(sq.lhs, WithinAbs(2.0, 1e-8));
  CHECK_THAT(sq.extra("dirichlet"), WithinAbs(4.0, 1e-8));
  CHECK_THAT(sq.extra("improvement"), WithinAbs(2.0, 1e-8));
  CHECK(sq.status == Status::saturated);
  const auto x = check_refined_poincare(from_closed("x", linear(1.0)), 1);
  CHECK_THAT(x.lhs, WithinAbs(1.0, 1e-8));
  CHECK(x.status == Status::saturated);
  for (const auto& f : default_corpus()) CHECK(check_refined_poincare(f, 1).margin >= -1e-6);
}
