#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hyperlab.hpp"

using namespace hyperlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

TestFunction bump03() { return bump(0.3); }

}  // namespace

TEST_CASE("schedule constructors land on their relations") {
  const auto cd = ExponentSchedule::cd_rho_infty(2.0, 0.5, 1.0, 0.0);
  CHECK_THAT(cd.q2, WithinAbs(3.0, 1e-14));
  const auto ou = ExponentSchedule::cd_rho_infty(2.0, 0.3, 0.9, 1.0);
  CHECK_THAT((ou.q2 - 1) / (ou.q1 - 1),
             WithinRel(std::expm1(2 * 0.9) / std::expm1(2 * 0.3), 1e-14));
  const auto dim = ExponentSchedule::ou_dimensional(2.0, 0.5 * std::log(3.0), 0.0, 1);
  CHECK_THAT(dim.q2, WithinAbs(4.0, 1e-13));
  CHECK_THAT(ExponentSchedule::hj_rho(0.5, 1.0, 1.0, 0.0).q1, WithinAbs(1.0, 1e-15));
  CHECK_THAT(ExponentSchedule::hj_rho(0.0, 1.0, 1.0, 1.0).q1,
             WithinRel(1 / (1 - std::exp(-2.0)), 1e-14));
  CHECK_THAT(ExponentSchedule::hj_0n(1.0, 0.5, 1.0, 0.5, 1).t, WithinAbs(1.5, 1e-15));
  CHECK_THAT(ExponentSchedule::levy_coarse(0.8, 0.5, 1.0).q2, WithinAbs(0.6, 1e-15));
  for (const auto& s : {cd, ou, dim, ExponentSchedule::levy_fine(0.8, 0.5, 1.0),
                        ExponentSchedule::levy_ou(0.9, 0.3, 1.0)})
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("schedule constructors reject invalid inputs") {
  CHECK_THROWS_AS(ExponentSchedule::cd_rho_infty(2.0, 1.5, 1.0, 0.0), Error);
  CHECK_THROWS_AS(ExponentSchedule::cd_rho_infty(1.0, 0.5, 1.0, 0.0), Error);
  CHECK_THROWS_AS(ExponentSchedule::cd0n(2.0, 1.5, 1.0, 0.5, 0.5, 1), Error);
  CHECK_THROWS_AS(ExponentSchedule::hj_0n(0.5, 1.0, 1.0, 1.0, 1), Error);
  CHECK_THROWS_AS(ExponentSchedule::levy_coarse(0.2, 0.1, 1.0), Error);
  auto off = ExponentSchedule::cd_rho_infty(2.0, 0.5, 1.0, 0.0);
  off.q2 += 1e-9;
  CHECK_THROWS_AS(off.validate(), Error);
}

TEST_CASE("constant M is at least one, with equality on u1 = t, u2 = s") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  while (checked < 2000) {
    const double q1 = 1 + 3 * u(rng), q2 = q1 + 3 * u(rng) + 1e-3;
    const double u1 = 0.05 + 2 * u(rng), u2 = 0.05 + 2 * u(rng), s = 0.05 + u(rng);
    if (u1 * q1 <= u2 * q2) continue;
    const auto e = ExponentSchedule::cd0n(q1, q2, u1, u2, s, 1);
    CHECK(cd0n_constant_m(e) >= 1 - 1e-12);
    ++checked;
  }
  for (int k = 0; k < 200; ++k) {
    const double s = 0.05 + u(rng), t = s + 0.05 + 2 * u(rng), q1 = 1.05 + 3 * u(rng);
    const double q2 = 1 + (t / s) * (q1 - 1);
    const auto e = ExponentSchedule::cd0n(q1, q2, t, s, s, 1);
    CHECK_THAT(cd0n_constant_m(e), WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("CD(rho, inf) checker") {
  CheckOptions o;
  SECTION("s = t gives identical sides") {
    const auto sch = ExponentSchedule::cd_rho_infty(2.0, 1.0, 1.0, 0.0);
    const auto r = check_cd_rho_infty(sch, bump(0.2), heat_semigroup(), o);
    CHECK(r.margin == 0.0);
  }
  SECTION("heat, t = 2s, q2 = 3") {
    const auto sch = ExponentSchedule::cd_rho_infty(2.0, 0.5, 1.0, 0.0);
    const auto r = check_cd_rho_infty(sch, bump(0.2), heat_semigroup(), o);
    CHECK(r.margin >= -1e-8);
    CHECK(r.ok());
  }
  SECTION("exp-linear functions saturate") {
    const auto sch = ExponentSchedule::cd_rho_infty(2.0, 0.5, 1.0, 0.0);
    const auto r = check_cd_rho_infty(sch, from_closed("e^x", exp_linear(1.0)), heat_semigroup(), o);
    CHECK(r.status == Status::saturated);
  }
  SECTION("OU on the default corpus at several points") {
    const auto sch = ExponentSchedule::cd_rho_infty(3.0, 0.4, 1.2, 1.0);
    for (double x : {-1.0, 0.0, 1.5}) {
      o.x = x;
      for (const auto& f : default_corpus()) CHECK(check_cd_rho_infty(sch, f, ou_semigroup(), o).ok());
    }
  }
  SECTION("reverse orientation below one") {
    const auto sch = ExponentSchedule::cd_rho_infty(0.8, 0.5, 1.0, 0.0);
    CHECK(sch.constraint == Constraint::CDRhoInftyReverse);
    CHECK(check_cd_rho_infty(sch, bump(0.4), heat_semigroup(), o).ok());
  }
}

TEST_CASE("Nelson bound, directly and through the heat flow") {
  const double t = 0.5 * std::log(3.0);
  for (const auto& g : default_corpus()) {
    const auto a = check_nelson(2.0, t, g);
    const auto b = check_nelson_via_heat(2.0, t, g);
    CHECK(a.margin >= -1e-8);
    CHECK(a.schedule->q2 == Catch::Approx(4.0).epsilon(1e-13));
    CHECK_THAT(a.lhs, WithinAbs(b.lhs, 1e-8));
    CHECK_THAT(a.rhs, WithinAbs(b.rhs, 1e-8));
  }
}

TEST_CASE("CD(0,n) checker") {
  SECTION("u1 = t, u2 = s coincides with the rho = 0 checker") {
    const auto base = ExponentSchedule::cd_rho_infty(2.0, 0.5, 1.0, 0.0);
    const auto sch = ExponentSchedule::cd0n(2.0, base.q2, 1.0, 0.5, 0.5, 1);
    CHECK_THAT(sch.t, WithinAbs(1.0, 1e-15));
    const auto a = check_cd0n(sch, bump(0.2));
    const auto b = check_cd_rho_infty(base, bump(0.2), heat_semigroup());
    CHECK_THAT(a.extra("M"), WithinAbs(1.0, 1e-12));
    CHECK_THAT(a.lhs, WithinRel(b.lhs, 1e-12));
    CHECK_THAT(a.rhs, WithinRel(b.rhs, 1e-12));
  }
  SECTION("Gaussian extremal saturates at every x") {
    const auto sch = ExponentSchedule::cd0n(2.0, 3.0, 1.0, 0.4, 0.5, 1);
    const double a = cd0n_extremal_coefficient(sch);
    CHECK_THAT(a, WithinAbs(0.0625, 1e-15));
    for (double x : {-1.0, 0.0, 0.7}) {
      CheckOptions o;
      o.x = x;
      const auto r = check_cd0n(sch, from_closed("e^{ax^2}", square_exponential(a)), o);
      CHECK(r.status == Status::saturated);
      CHECK(std::abs(r.log_ratio) <= 1e-7);
    }
  }
  SECTION("extremal in dimension three on the radial path") {
    const auto sch = ExponentSchedule::cd0n(2.0, 3.0, 1.0, 0.4, 0.5, 3);
    const double a = cd0n_extremal_coefficient(sch);
    const auto r = check_cd0n(sch, from_closed("e^{a|x|^2}", square_exponential(a, 3)));
    CHECK(std::abs(r.log_ratio) <= 1e-7);
  }
  SECTION("generic bump") {
    const auto sch = ExponentSchedule::cd0n(2.0, 2.5, 0.8, 0.6, 0.3, 1);
    CHECK(check_cd0n(sch, bump(0.2)).margin >= -1e-8);
  }
  SECTION("reverse schedule carries N") {
    const auto sch = ExponentSchedule::cd0n(0.8, 0.5, 1.0, 0.6, 0.3, 1);
    const auto r = check_cd0n(sch, bump(0.2));
    CHECK(std::isfinite(r.extra("N")));
    CHECK(r.ok());
  }
}

TEST_CASE("local log-Sobolev flavors") {
  for (auto fl : {LsiFlavor::rho_form, LsiFlavor::zero_n_form, LsiFlavor::lambda_family,
                  LsiFlavor::li_yau}) {
    const auto r = check_local_lsi(heat_semigroup(), from_function("1", [](double) { return 1.0; }), 0.7, fl, 1.0);
    CHECK_THAT(r.lhs, WithinAbs(0.0, 1e-12));
    CHECK_THAT(r.rhs, WithinAbs(0.0, 1e-12));
  }
  CHECK(check_local_lsi(ou_semigroup(), bump03(), 0.5, LsiFlavor::rho_form).margin >= -1e-8);
  const auto sq = from_closed("e^{0.05x^2}", square_exponential(0.05));
  CHECK(check_local_lsi(heat_semigroup(), sq, 1.0, LsiFlavor::zero_n_form).margin >= -1e-8);
  CHECK(check_local_lsi(heat_semigroup(), sq, 1.0, LsiFlavor::li_yau).margin >= -1e-8);
  for (double lambda : {0.2, 1.0, 3.0})
    CHECK(check_local_lsi(heat_semigroup(), bump03(), 0.4, LsiFlavor::lambda_family, lambda).ok());
}

TEST_CASE("dimensional OU bound") {
  const auto sch = ExponentSchedule::ou_dimensional(2.0, 0.5 * std::log(3.0), 0.0, 1);
  CHECK_THAT(ou_dimensional_constant(sch), WithinAbs(1.0, 1e-14));
  const auto r = check_ou_dimensional(sch, bump(0.2));
  CHECK(r.margin >= -1e-8);
  const auto tilted = ExponentSchedule::ou_dimensional(2.0, 0.4, 0.3, 1);
  CHECK(check_ou_dimensional(tilted, bump(0.2)).ok());
  CHECK_THAT(ou_l1_l2_prefactor(std::log(2.0), 1), WithinRel(std::pow(5.0 / 3.0, 0.25), 1e-14));
}

TEST_CASE("kernel diagonal identity") {
  for (int n : {1, 2, 3}) {
    const auto r = kernel_diagonal_identity(0.4, 0.0, n);
    CHECK_THAT(r.lhs, WithinRel(std::pow(1 - std::exp(-1.6), -0.5 * n), 1e-12));
  }
  CHECK_THAT(kernel_diagonal_identity(25.0, 1.0, 1).lhs, WithinAbs(1.0, 1e-10));
  const auto r = kernel_diagonal_identity(0.3, 1.5, 2);
  CHECK_THAT(r.lhs, WithinRel(r.rhs, 1e-10));
}

TEST_CASE("trace of the OU semigroup") {
  const auto a = ou_trace(std::log(2.0), 1);
  CHECK_THAT(a.eigen_sum, WithinAbs(2.0, 1e-12));
  CHECK_THAT(a.quadrature, WithinAbs(2.0, 1e-6));
  CHECK_THAT(a.weight_integral, WithinAbs(2.0, 1e-8));
  CHECK_FALSE(a.notes.empty());
  const auto b = ou_trace(1.0, 3);
  CHECK_THAT(b.eigen_sum, WithinRel(std::pow(1 - std::exp(-1.0), -3), 1e-12));
  CHECK_THAT(b.weight_integral, WithinRel(b.eigen_sum, 1e-8));
  CHECK_THAT(ou_trace(30.0, 1).eigen_sum, WithinAbs(1.0, 1e-12));
}
