#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hyperlab/error.hpp"

namespace hyperlab {

enum class Constraint {
  CDRhoInfty,
  CDRhoInftyReverse,
  CD0n,
  CD0nReverse,
  OUDimensional,
  HJRho,
  HJ0n,
  LevyFine,
  LevyCoarse,
  LevyOU,
};

inline const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::CDRhoInfty: return "CDRhoInfty";
    case Constraint::CDRhoInftyReverse: return "CDRhoInftyReverse";
    case Constraint::CD0n: return "CD0n";
    case Constraint::CD0nReverse: return "CD0nReverse";
    case Constraint::OUDimensional: return "OUDimensional";
    case Constraint::HJRho: return "HJRho";
    case Constraint::HJ0n: return "HJ0n";
    case Constraint::LevyFine: return "LevyFine";
    case Constraint::LevyCoarse: return "LevyCoarse";
    case Constraint::LevyOU: return "LevyOU";
  }
  return "unknown";
}

/// Residual above which a schedule is rejected as off its constraint.
inline constexpr double kScheduleResidual = 1e-12;

/// (e^{2 rho t} - 1) / (2 rho), with the rho -> 0 limit t.
inline double rho_time(double rho, double t) {
  return rho == 0 ? t : std::expm1(2 * rho * t) / (2 * rho);
}

/// Exponents and times bound by one of the constraint relations. Build with
/// the named constructors: each takes a generating subset, fills the bound
/// parameter from the relation and stores the residual of the relation.
struct ExponentSchedule {
  double q1 = 0, q2 = 0, s = 0, t = 0, u1 = 0, u2 = 0;
  double rho = 0, n = 1, a_dil = 0, alpha = 2, lambda = 1;
  Constraint constraint = Constraint::CDRhoInfty;
  double residual = 0;

  /// Residual of the binding relation recomputed from the fields.
  double relation_residual() const {
    switch (constraint) {
      case Constraint::CDRhoInfty:
      case Constraint::CDRhoInftyReverse:
        return std::abs((q2 - 1) * rho_time(rho, s) - (q1 - 1) * rho_time(rho, t)) /
               std::max(1.0, std::abs(rho_time(rho, t)));
      case Constraint::CD0n:
      case Constraint::CD0nReverse:
        return std::abs((t - s) - (u1 * q1 - u2 * q2));
      case Constraint::OUDimensional:
        return std::abs((q2 - 1) - std::exp(2 * t) * (q1 * std::exp(-a_dil) - 1)) /
               std::max(1.0, std::abs(q2));
      case Constraint::HJRho:
        return std::abs(q1 - q2 - hj_increment(rho, t, u1));
      case Constraint::HJ0n:
        return std::abs(t - 2 * (u1 * q1 - u2 * q2));
      case Constraint::LevyFine:
        return std::abs((q2 - 1) - (q2 / q1) * (t / s) * (q1 - 1));
      case Constraint::LevyCoarse:
        return std::abs((q2 - 1) - (t / s) * (q1 - 1));
      case Constraint::LevyOU:
        return std::abs((q2 - 1) - (q2 / q1) * (q1 - 1) * std::exp(alpha * t));
    }
    return INFINITY;
  }

  /// Throws invalid-argument when the relation residual exceeds 1e-12.
  const ExponentSchedule& validate() const {
    const double r = relation_residual();
    if (!(r <= kScheduleResidual)) {
      std::ostringstream msg;
      msg << to_string(constraint) << " relation violated, residual " << r;
      fail(ErrorKind::invalid_argument, msg.str());
    }
    return *this;
  }

  /// Parameter list for reports, in a fixed order per constraint.
  std::vector<std::pair<std::string, double>> parameters() const {
    using P = std::vector<std::pair<std::string, double>>;
    switch (constraint) {
      case Constraint::CDRhoInfty:
      case Constraint::CDRhoInftyReverse:
        return P{{"q1", q1}, {"q2", q2}, {"s", s}, {"t", t}, {"rho", rho}};
      case Constraint::CD0n:
      case Constraint::CD0nReverse:
        return P{{"q1", q1}, {"q2", q2}, {"u1", u1}, {"u2", u2}, {"s", s}, {"t", t}, {"n", n}};
      case Constraint::OUDimensional:
        return P{{"q1", q1}, {"q2", q2}, {"t", t}, {"a", a_dil}, {"n", n}};
      case Constraint::HJRho:
        return P{{"q1", q1}, {"q2", q2}, {"t", t}, {"u", u1}, {"rho", rho}};
      case Constraint::HJ0n:
        return P{{"q1", q1}, {"q2", q2}, {"t", t}, {"u1", u1}, {"u2", u2}, {"n", n}};
      case Constraint::LevyFine:
      case Constraint::LevyCoarse:
        return P{{"q1", q1}, {"q2", q2}, {"s", s}, {"t", t}};
      case Constraint::LevyOU:
        return P{{"q1", q1}, {"q2", q2}, {"t", t}, {"alpha", alpha}};
    }
    return {};
  }

  static double hj_increment(double rho, double t, double u) {
    return rho == 0 ? t / (2 * u) : rho * t / (-std::expm1(-2 * rho * u));
  }

  // ---- constructors -----------------------------------------------------

  /// q2 - 1 = (q1 - 1) (e^{2 rho t} - 1)/(e^{2 rho s} - 1); forward for
  /// q1 > 1, reverse for 0 < q2 <= q1 < 1 or q2 <= q1 < 0.
  static ExponentSchedule cd_rho_infty(double q1, double s, double t, double rho) {
    require(s > 0 && s <= t, ErrorKind::invalid_argument, "need 0 < s <= t");
    require(q1 != 1 && q1 != 0, ErrorKind::invalid_argument, "q1 must differ from 0 and 1");
    ExponentSchedule e;
    e.q1 = q1;
    e.s = s;
    e.t = t;
    e.u1 = t;
    e.u2 = s;
    e.rho = rho;
    e.q2 = 1 + (q1 - 1) * rho_time(rho, t) / rho_time(rho, s);
    if (q1 > 1) {
      e.constraint = Constraint::CDRhoInfty;
    } else {
      e.constraint = Constraint::CDRhoInftyReverse;
      const bool ok = (e.q2 > 0 && e.q2 <= q1 && q1 < 1) || (e.q2 <= q1 && q1 < 0);
      require(ok, ErrorKind::invalid_argument,
              "reverse schedule needs 0 < q2 <= q1 < 1 or q2 <= q1 < 0");
    }
    e.residual = e.relation_residual();
    return e;
  }

  /// t - s = u1 q1 - u2 q2 with 1 < q1 < q2 (forward) or 0 < q2 < q1 < 1,
  /// q2 < q1 < 0 (reverse); t is filled from s.
  static ExponentSchedule cd0n(double q1, double q2, double u1, double u2, double s,
                               double n) {
    require(u1 >= 0 && u2 >= 0 && s >= 0, ErrorKind::invalid_argument,
            "CD(0,n) schedule needs u1, u2, s >= 0");
    require(n >= 1, ErrorKind::invalid_argument, "dimension must be >= 1");
    ExponentSchedule e;
    e.q1 = q1;
    e.q2 = q2;
    e.u1 = u1;
    e.u2 = u2;
    e.s = s;
    e.n = n;
    e.t = s + u1 * q1 - u2 * q2;
    if (1 < q1 && q1 < q2) {
      e.constraint = Constraint::CD0n;
    } else if ((0 < q2 && q2 < q1 && q1 < 1) || (q2 < q1 && q1 < 0)) {
      e.constraint = Constraint::CD0nReverse;
    } else {
      fail(ErrorKind::invalid_argument,
           "CD(0,n) schedule needs 1 < q1 < q2, 0 < q2 < q1 < 1 or q2 < q1 < 0");
    }
    require(e.t > s, ErrorKind::invalid_argument, "CD(0,n) schedule needs u1 q1 > u2 q2");
    e.residual = e.relation_residual();
    return e;
  }

  /// q2 - 1 = e^{2t}(q1 e^{-a} - 1) with 1 < q1 < q2.
  static ExponentSchedule ou_dimensional(double q1, double t, double a_dil, double n) {
    require(t > 0, ErrorKind::invalid_argument, "OU time must be positive");
    ExponentSchedule e;
    e.constraint = Constraint::OUDimensional;
    e.q1 = q1;
    e.t = t;
    e.a_dil = a_dil;
    e.n = n;
    e.q2 = 1 + std::exp(2 * t) * (q1 * std::exp(-a_dil) - 1);
    require(q1 > 1 && e.q2 > q1, ErrorKind::invalid_argument,
            "dimensional OU schedule needs 1 < q1 < q2");
    e.residual = e.relation_residual();
    return e;
  }

  /// q1 = q2 + rho t / (1 - e^{-2 rho u}) (q2 + t/(2u) at rho = 0).
  static ExponentSchedule hj_rho(double q2, double t, double u, double rho) {
    require(u > 0 && t >= 0, ErrorKind::invalid_argument, "HJ schedule needs u > 0, t >= 0");
    require(q2 >= 0, ErrorKind::invalid_argument, "HJ schedule needs q2 >= 0");
    ExponentSchedule e;
    e.constraint = Constraint::HJRho;
    e.q2 = q2;
    e.t = t;
    e.u1 = e.u2 = u;
    e.rho = rho;
    e.q1 = q2 + hj_increment(rho, t, u);
    e.residual = e.relation_residual();
    return e;
  }

  /// t = 2(u1 q1 - u2 q2) with q1 > q2 >= 0.
  static ExponentSchedule hj_0n(double q1, double q2, double u1, double u2, double n) {
    require(q1 > q2 && q2 >= 0, ErrorKind::invalid_argument, "HJ schedule needs q1 > q2 >= 0");
    require(u1 > 0 && u2 > 0, ErrorKind::invalid_argument, "HJ schedule needs u1, u2 > 0");
    ExponentSchedule e;
    e.constraint = Constraint::HJ0n;
    e.q1 = q1;
    e.q2 = q2;
    e.u1 = u1;
    e.u2 = u2;
    e.n = n;
    e.t = 2 * (u1 * q1 - u2 * q2);
    require(e.t >= 0, ErrorKind::invalid_argument, "HJ schedule needs u1 q1 >= u2 q2");
    e.residual = e.relation_residual();
    return e;
  }

  static void levy_times(double q1, double s, double t) {
    require(s > 0 && s <= t, ErrorKind::invalid_argument, "need 0 < s <= t");
    require(q1 > 0 && q1 < 1, ErrorKind::invalid_argument, "need 0 < q1 < 1");
  }

  /// q2 - 1 = (q2/q1)(t/s)(q1 - 1).
  static ExponentSchedule levy_fine(double q1, double s, double t) {
    levy_times(q1, s, t);
    ExponentSchedule e;
    e.constraint = Constraint::LevyFine;
    e.q1 = q1;
    e.s = s;
    e.t = t;
    e.q2 = q1 * s / (q1 * s + t * (1 - q1));
    e.residual = e.relation_residual();
    return e;
  }

  /// q2 - 1 = (t/s)(q1 - 1), requires q2 > 0.
  static ExponentSchedule levy_coarse(double q1, double s, double t) {
    levy_times(q1, s, t);
    ExponentSchedule e;
    e.constraint = Constraint::LevyCoarse;
    e.q1 = q1;
    e.s = s;
    e.t = t;
    e.q2 = 1 + (t / s) * (q1 - 1);
    require(e.q2 > 0, ErrorKind::invalid_argument, "coarse Levy schedule gives q2 <= 0");
    e.residual = e.relation_residual();
    return e;
  }

  /// q2 - 1 = (q2/q1)(q1 - 1) e^{alpha t}.
  static ExponentSchedule levy_ou(double q1, double t, double alpha) {
    require(q1 > 0 && q1 < 1, ErrorKind::invalid_argument, "need 0 < q1 < 1");
    require(t >= 0, ErrorKind::invalid_argument, "need t >= 0");
    require(alpha > 0 && alpha <= 2, ErrorKind::invalid_argument, "need alpha in (0, 2]");
    ExponentSchedule e;
    e.constraint = Constraint::LevyOU;
    e.q1 = q1;
    e.t = t;
    e.alpha = alpha;
    e.q2 = q1 / (q1 + std::exp(alpha * t) * (1 - q1));
    e.residual = e.relation_residual();
    return e;
  }
};

/// Constant M of the forward CD(0,n) bound (M^{n/2} multiplies the right side).
inline double cd0n_constant_m(const ExponentSchedule& e) {
  const double tau = e.u1 * e.q1 - e.u2 * e.q2;
  const double f1 = std::pow((e.q1 - 1) / e.u2, 1 - 1 / e.q1);
  const double f2 = std::pow((e.q2 - 1) / e.u1, 1 / e.q2 - 1);
  const double f3 = std::pow(tau / (e.q2 - e.q1), 1 / e.q2 - 1 / e.q1);
  if (!std::isfinite(f1)) fail(ErrorKind::invalid_argument, "M: factor ((q1-1)/u2) is not finite");
  if (!std::isfinite(f2)) fail(ErrorKind::invalid_argument, "M: factor ((q2-1)/u1) is not finite");
  if (!std::isfinite(f3))
    fail(ErrorKind::invalid_argument, "M: factor ((u1 q1 - u2 q2)/(q2 - q1)) is not finite");
  return f1 * f2 * f3;
}

/// Constant N of the reverse CD(0,n) bound.
inline double cd0n_constant_n(const ExponentSchedule& e) {
  const double tau = e.u1 * e.q1 - e.u2 * e.q2;
  const double f1 = std::pow((1 - e.q1) / e.u2, 1 / e.q1 - 1);
  const double f2 = std::pow((1 - e.q2) / e.u1, 1 - 1 / e.q2);
  const double f3 = std::pow(tau / (e.q1 - e.q2), 1 / e.q1 - 1 / e.q2);
  if (!std::isfinite(f1)) fail(ErrorKind::invalid_argument, "N: factor ((1-q1)/u2) is not finite");
  if (!std::isfinite(f2)) fail(ErrorKind::invalid_argument, "N: factor ((1-q2)/u1) is not finite");
  if (!std::isfinite(f3))
    fail(ErrorKind::invalid_argument, "N: factor ((u1 q1 - u2 q2)/(q1 - q2)) is not finite");
  return f1 * f2 * f3;
}

/// Square-exponential coefficient that turns the forward CD(0,n) bound
/// into an equality.
inline double cd0n_extremal_coefficient(const ExponentSchedule& e) {
  const double tau = e.t - e.s;
  return (tau + e.u2 - e.u1) / (4 * e.u1 * tau * (e.q1 - 1));
}

namespace detail {
// x^y with the convention 0^0 = 1.
inline double pow0(double x, double y) { return y == 0 ? 1.0 : std::pow(x, y); }
}  // namespace detail

/// Constant M of the dimensional OU bound; equals 1 when a = 0.
inline double ou_dimensional_constant(double q1, double q2, double t, double a) {
  const double e2t = std::exp(-2 * t);
  return detail::pow0((q1 - 1) / e2t, 1 - 1 / q1) *
         detail::pow0((q2 - 1) / std::exp(-a), 1 / q2 - 1) *
         detail::pow0(-std::expm1(-2 * t) / (q2 - q1), 1 / q2 - 1 / q1);
}

inline double ou_dimensional_constant(const ExponentSchedule& e) {
  return ou_dimensional_constant(e.q1, e.q2, e.t, e.a_dil);
}

/// Bracket u1^{1/q2} u2^{-1/q1} ((q1-q2)/(u1 q1 - u2 q2))^{1/q2 - 1/q1}
/// of the dimensional Hamilton-Jacobi bound (raised to n/2 by callers).
inline double hj_0n_bracket(const ExponentSchedule& e) {
  const double tau = e.u1 * e.q1 - e.u2 * e.q2;
  const double v = std::pow(e.u1, 1 / e.q2) / std::pow(e.u2, 1 / e.q1) *
                   std::pow((e.q1 - e.q2) / tau, 1 / e.q2 - 1 / e.q1);
  require(std::isfinite(v) && v > 0, ErrorKind::invalid_argument,
          "HJ bracket is not finite");
  return v;
}

}  // namespace hyperlab
