#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>

#include "hyperlab/closed_form.hpp"
#include "hyperlab/functional.hpp"
#include "hyperlab/report.hpp"
#include "hyperlab/schedule.hpp"
#include "hyperlab/semigroup.hpp"
#include "hyperlab/test_function.hpp"

namespace hyperlab {

namespace detail {

inline ClosedForm propagate(const Semigroup& sg, const ClosedForm& f, double t) {
  return sg.kind == SemigroupKind::heat ? heat(f, t) : ou(f, t);
}

inline const GaussExp* gauss_exp(const TestFunction& f) {
  return f.closed ? std::get_if<GaussExp>(&f.closed->form) : nullptr;
}

// P_t(f^q)^{1/q}(x).
inline double outer_mean(const Semigroup& sg, const TestFunction& f, double q, double t,
                         double x, const GaussianExpectation& ex, bool& exact) {
  if (const auto* g = gauss_exp(f)) {
    exact = true;
    const ClosedForm p = propagate(sg, {power(*g, q)}, t);
    return std::pow(p(x), 1 / q);
  }
  exact = false;
  return lq_mean_at(sg, f.eval, q, t, x, ex);
}

// P_outer((P_inner f)^q)^{1/q}(x).
inline double nested_mean(const Semigroup& sg, const TestFunction& f, double inner,
                          double outer, double q, double x, const GaussianExpectation& ex,
                          bool& exact) {
  if (const auto* g = gauss_exp(f)) {
    exact = true;
    const auto in = std::get<GaussExp>(propagate(sg, {*g}, inner).form);
    const ClosedForm p = propagate(sg, {power(in, q)}, outer);
    return std::pow(p(x), 1 / q);
  }
  exact = false;
  const RealFn inner_pow = [&](double y) {
    return std::pow(apply_at(sg, f.eval, inner, y, ex), q);
  };
  return std::pow(apply_at(sg, inner_pow, outer, x, ex), 1 / q);
}

inline void require_positive(const TestFunction& f, const char* check) {
  require(f.positive, ErrorKind::domain,
          std::string(check) + " needs a strictly positive function, got " + f.name);
}

inline void require_dimension(const TestFunction& f, int n) {
  require(f.n == n, ErrorKind::invalid_argument,
          "function " + f.name + " has dimension " + std::to_string(f.n) +
              ", the check uses " + std::to_string(n));
}

}  // namespace detail

struct CheckOptions {
  double x = 0.0;
  QuadratureOptions quadrature{};
  /// Allow a curvature parameter that differs from the semigroup's own;
  /// such reports are marked exploratory.
  bool exploratory = false;
};

/// P_s((P_{t-s} f)^{q2})^{1/q2} <= P_t(f^{q1})^{1/q1} at x, reversed for
/// exponents below one.
inline InequalityReport check_cd_rho_infty(const ExponentSchedule& sch, const TestFunction& f,
                                           const Semigroup& sg, const CheckOptions& opt = {}) {
  require(sch.constraint == Constraint::CDRhoInfty ||
              sch.constraint == Constraint::CDRhoInftyReverse,
          ErrorKind::invalid_argument, "schedule is not a CD(rho,inf) schedule");
  sch.validate();
  if (sch.rho != sg.rho() && !opt.exploratory)
    fail(ErrorKind::invalid_argument, "schedule rho " + std::to_string(sch.rho) +
                                          " does not match " + sg.name());
  detail::require_positive(f, "CD(rho,inf) check");
  detail::require_dimension(f, sg.n);
  GaussianExpectation ex(opt.quadrature);
  bool e1 = false, e2 = false;
  const double nested = detail::nested_mean(sg, f, sch.t - sch.s, sch.s, sch.q2, opt.x, ex, e1);
  const double outer = detail::outer_mean(sg, f, sch.q1, sch.t, opt.x, ex, e2);
  const bool forward = sch.constraint == Constraint::CDRhoInfty;
  auto r = make_report(forward ? "cd-rho-infty" : "cd-rho-infty-reverse",
                       forward ? nested : outer, forward ? outer : nested,
                       e1 && e2 ? kClosedFormTolerance : kGridTolerance,
                       {{"x", opt.x}}, sch);
  r.subject = f.name + " / " + sg.name();
  if (sch.rho != sg.rho()) r.notes.push_back("exploratory: rho differs from the semigroup's");
  return r;
}

/// The two sides of the CD(0,n) bound for the heat semigroup, with the
/// constant M (forward) or N (reverse) raised to n/2.
inline InequalityReport check_cd0n(const ExponentSchedule& sch, const TestFunction& f,
                                   const CheckOptions& opt = {}) {
  require(sch.constraint == Constraint::CD0n || sch.constraint == Constraint::CD0nReverse,
          ErrorKind::invalid_argument, "schedule is not a CD(0,n) schedule");
  sch.validate();
  detail::require_positive(f, "CD(0,n) check");
  const bool forward = sch.constraint == Constraint::CD0n;
  const double c = forward ? cd0n_constant_m(sch) : cd0n_constant_n(sch);
  const double factor = std::pow(c, 0.5 * sch.n);
  const int n = static_cast<int>(std::lround(sch.n));
  const bool exact_form = detail::gauss_exp(f) != nullptr;
  if (!exact_form)
    require(n == sch.n, ErrorKind::invalid_argument,
            "quadrature paths need an integer dimension");
  if (exact_form) {
    require(std::get<GaussExp>(f.closed->form).n == n || f.n == n, ErrorKind::invalid_argument,
            "closed form dimension differs from the schedule");
  } else {
    detail::require_dimension(f, n);
  }
  const Semigroup sg = heat_semigroup(n);
  GaussianExpectation ex(opt.quadrature);
  bool e1 = false, e2 = false;
  const double nested =
      detail::nested_mean(sg, f, sch.t - sch.s, sch.u2, sch.q2, opt.x, ex, e1);
  const double outer = detail::outer_mean(sg, f, sch.q1, sch.u1, opt.x, ex, e2);
  InequalityReport r =
      forward ? make_report("cd0n", nested, outer * factor,
                            e1 && e2 ? kClosedFormTolerance : kGridTolerance, {{"x", opt.x}}, sch)
              : make_report("cd0n-reverse", outer, nested * factor,
                            e1 && e2 ? kClosedFormTolerance : kGridTolerance, {{"x", opt.x}}, sch);
  r.subject = f.name;
  r.extras.push_back({forward ? "M" : "N", c});
  return r;
}

/// Nelson's bound ||N_t g||_{q2} <= ||g||_{q1} with q2 - 1 = e^{2t}(q1 - 1),
/// evaluated directly with the Mehler formula.
inline InequalityReport check_nelson(double q1, double t, const TestFunction& g,
                                     const CheckOptions& opt = {}) {
  const auto sch = ExponentSchedule::ou_dimensional(q1, t, 0.0, g.n);
  detail::require_positive(g, "Nelson check");
  GaussianExpectation ex(opt.quadrature);
  const Semigroup sg = ou_semigroup(g.n);
  bool exact = false;
  double lhs = 0, rhs = 0;
  if (const auto* ge = detail::gauss_exp(g)) {
    exact = true;
    const auto ng = std::get<GaussExp>(ou(*g.closed, t).form);
    lhs = std::pow(gaussian_mean(power(ng, sch.q2)), 1 / sch.q2);
    rhs = std::pow(gaussian_mean(power(*ge, q1)), 1 / q1);
  } else {
    const RealFn ng = [&](double y) { return std::pow(apply_at(sg, g.eval, t, y, ex), sch.q2); };
    lhs = std::pow(ex(ng, 0.0, 1.0, g.n), 1 / sch.q2);
    rhs = std::pow(ex([&](double y) { return std::pow(g(y), q1); }, 0.0, 1.0, g.n), 1 / q1);
  }
  auto r = make_report("nelson", lhs, rhs, exact ? kClosedFormTolerance : kGridTolerance, {},
                       sch);
  r.subject = g.name;
  return r;
}

/// The same bound reached through the heat semigroup at x = 0: heat times
/// s = T e^{-2t}, T, applied to f = g(. / sqrt(2T)).
inline InequalityReport check_nelson_via_heat(double q1, double t, const TestFunction& g,
                                              const CheckOptions& opt = {}) {
  const double big_t = t;
  const double s = big_t * std::exp(-2 * t);
  const auto sch = ExponentSchedule::cd_rho_infty(q1, s, big_t, 0.0);
  TestFunction f = g;
  f.name = g.name + " (dilated)";
  f.gradient = nullptr;
  f.laplacian = nullptr;
  const double c = 1.0 / std::sqrt(2 * big_t);
  f.eval = [ge = g.eval, c](double x) { return ge(c * x); };
  if (g.closed) f.closed = dilate(*g.closed, 2 * std::log(c));
  CheckOptions o = opt;
  o.x = 0.0;
  auto r = check_cd_rho_infty(sch, f, heat_semigroup(g.n), o);
  r.check = "nelson-via-heat";
  r.subject = g.name;
  r.extras.push_back({"ou_time", t});
  return r;
}

/// ||N_t f||_{q2} <= M^{n/2} ||T_{-a} f||_{q1} against the standard Gaussian.
inline InequalityReport check_ou_dimensional(const ExponentSchedule& sch, const TestFunction& f,
                                             const CheckOptions& opt = {}) {
  require(sch.constraint == Constraint::OUDimensional, ErrorKind::invalid_argument,
          "schedule is not a dimensional OU schedule");
  sch.validate();
  detail::require_positive(f, "dimensional OU check");
  const int n = static_cast<int>(std::lround(sch.n));
  detail::require_dimension(f, n);
  const double m = ou_dimensional_constant(sch);
  const double factor = std::pow(m, 0.5 * sch.n);
  const double c = std::exp(-0.5 * sch.a_dil);
  GaussianExpectation ex(opt.quadrature);
  const Semigroup sg = ou_semigroup(n);
  bool exact = false;
  double lhs = 0, norm = 0;
  if (const auto* ge = detail::gauss_exp(f)) {
    exact = true;
    const auto nf = std::get<GaussExp>(ou(*f.closed, sch.t).form);
    const auto tf = std::get<GaussExp>(dilate(*f.closed, -sch.a_dil).form);
    lhs = std::pow(gaussian_mean(power(nf, sch.q2)), 1 / sch.q2);
    norm = std::pow(gaussian_mean(power(tf, sch.q1)), 1 / sch.q1);
    (void)ge;
  } else {
    const RealFn nf = [&](double y) { return std::pow(apply_at(sg, f.eval, sch.t, y, ex), sch.q2); };
    lhs = std::pow(ex(nf, 0.0, 1.0, n), 1 / sch.q2);
    norm = std::pow(ex([&](double y) { return std::pow(f(c * y), sch.q1); }, 0.0, 1.0, n),
                    1 / sch.q1);
  }
  auto r = make_report("ou-dimensional", lhs, factor * norm,
                       exact ? kClosedFormTolerance : kGridTolerance, {}, sch);
  r.subject = f.name;
  r.extras.push_back({"M", m});
  if (sch.a_dil == 0 && std::abs(m - 1) > 1e-14)
    r.notes.push_back("constant M differs from 1 at a = 0");
  return r;
}

/// Prefactor of the q1 -> 1, q2 = 2 limit: ((1+e^{-2t})/(1-e^{-2t}))^{n/4}.
inline double ou_l1_l2_prefactor(double t, double n) {
  const double e = std::exp(-2 * t);
  return std::pow((1 + e) / (1 - e), 0.25 * n);
}

enum class LsiFlavor { rho_form, zero_n_form, lambda_family, li_yau };

inline const char* to_string(LsiFlavor f) {
  switch (f) {
    case LsiFlavor::rho_form: return "rho-form";
    case LsiFlavor::zero_n_form: return "zero-n-form";
    case LsiFlavor::lambda_family: return "lambda-family";
    case LsiFlavor::li_yau: return "li-yau";
  }
  return "unknown";
}

/// Local logarithmic Sobolev bounds for the kernel measure P_t(x, .):
/// rho form Ent <= ((1-e^{-2 rho t})/(2 rho)) P_t(Gamma f / f); the
/// dimensional form and its lambda family for the heat semigroup; and the
/// reverse (Li-Yau type) lower bound, reported as rhs = Ent.
inline InequalityReport check_local_lsi(const Semigroup& sg, const TestFunction& f, double t,
                                        LsiFlavor flavor, double lambda = 1.0,
                                        const CheckOptions& opt = {}) {
  detail::require_positive(f, "local log-Sobolev check");
  detail::require_dimension(f, sg.n);
  require(t > 0, ErrorKind::invalid_argument, "local log-Sobolev check needs t > 0");
  if (flavor == LsiFlavor::lambda_family)
    require(lambda > 0, ErrorKind::invalid_argument, "lambda must be positive");
  if (flavor != LsiFlavor::rho_form)
    require(sg.kind == SemigroupKind::heat, ErrorKind::invalid_argument,
            std::string(to_string(flavor)) + " applies to the heat semigroup only");
  GaussianExpectation ex(opt.quadrature);
  const double x = opt.x;
  const double n = sg.n;
  const double ent = entropy_at(sg, f.eval, t, x, ex);
  const double pf = apply_at(sg, f.eval, t, x, ex);
  // f L(log f) = Lf - Gamma(f)/f.
  const RealFn fisher = [&](double y) { const double d = f.grad(y); return d * d / f(y); };
  const RealFn f_lap_log = [&](double y) {
    const double d = f.grad(y);
    return f.lap(y) - d * d / f(y);
  };
  Params params{{"t", t}, {"x", x}};
  bool warn = false;
  std::string note;
  double lhs = ent, rhs = 0;
  switch (flavor) {
    case LsiFlavor::rho_form: {
      const double c = sg.rho() == 0 ? t : -std::expm1(-2 * sg.rho() * t) / (2 * sg.rho());
      rhs = c * apply_at(sg, fisher, t, x, ex);
      break;
    }
    case LsiFlavor::zero_n_form: {
      const double lap_pf = apply_at(sg, [&](double y) { return f.lap(y); }, t, x, ex);
      const double arg = 1 - (2 * t / n) * apply_at(sg, f_lap_log, t, x, ex) / pf;
      if (arg <= 0) {
        warn = true;
        note = "domain violation: logarithm argument " + std::to_string(arg) + " <= 0";
        rhs = INFINITY;
      } else {
        rhs = t * lap_pf + 0.5 * n * pf * std::log(arg);
      }
      break;
    }
    case LsiFlavor::lambda_family: {
      const double lap_pf = apply_at(sg, [&](double y) { return f.lap(y); }, t, x, ex);
      rhs = t * lap_pf + 0.5 * n * deficiency(lambda).value * pf -
            t * lambda * apply_at(sg, f_lap_log, t, x, ex);
      params.push_back({"lambda", lambda});
      break;
    }
    case LsiFlavor::li_yau: {
      const double lap_pf = apply_at(sg, [&](double y) { return f.lap(y); }, t, x, ex);
      double grad_pf = 0.0;
      if (n == 1) {
        grad_pf = apply_at(sg, [&](double y) { return f.grad(y); }, t, x, ex);
      } else if (x != 0) {
        const double h = 1e-3 * std::max(1.0, std::abs(x));
        auto p = [&](double r) { return apply_at(sg, f.eval, t, r, ex); };
        grad_pf = (p(x - 2 * h) - 8 * p(x - h) + 8 * p(x + h) - p(x + 2 * h)) / (12 * h);
      }
      const double lap_log = lap_pf / pf - grad_pf * grad_pf / (pf * pf);
      const double arg = 1 + (2 * t / n) * lap_log;
      rhs = ent;
      if (arg <= 0) {
        warn = true;
        note = "domain violation: logarithm argument " + std::to_string(arg) + " <= 0";
        lhs = -INFINITY;
      } else {
        lhs = t * lap_pf - 0.5 * n * pf * std::log(arg);
      }
      break;
    }
  }
  const bool exact = false;
  InequalityReport r;
  r.check = std::string("local-lsi-") + to_string(flavor);
  r.subject = f.name + " / " + sg.name();
  r.lhs = lhs;
  r.rhs = rhs;
  r.params = params;
  r.tolerance = exact ? kClosedFormTolerance : kGridTolerance;
  r.extras.push_back({"entropy", ent});
  if (warn) {
    r.margin = NAN;
    r.status = Status::warning;
    r.notes.push_back(note);
  } else {
    r.finalize();
  }
  return r;
}

/// n_{2t}(x, x) against V_t(x)^2: an identity, reported as saturated when
/// the two agree to 1e-10 relative.
inline InequalityReport kernel_diagonal_identity(double t, double x, int n) {
  const double lhs = ou_kernel_diagonal(2 * t, x, n);
  const double v = nash_weight(t, x, n);
  InequalityReport r;
  r.check = "kernel-diagonal";
  r.subject = "n=" + std::to_string(n);
  r.lhs = lhs;
  r.rhs = v * v;
  r.params = {{"t", t}, {"x", x}, {"n", static_cast<double>(n)}};
  r.tolerance = 1e-10 * r.rhs;
  r.saturation_tolerance = 1e-10;
  r.finalize();
  return r;
}

struct TraceResult {
  double t = 0;
  int n = 1;
  double quadrature = 0;
  double weight_integral = 0;
  double eigen_sum = 0;
  double max_relative_deviation = 0;
  double half_width = 0;
  std::vector<std::string> notes;
};

/// Trace of N_t three ways: quadrature of n_t(x,x) against gamma on a
/// radial grid, the closed-form integral of V_{t/2}^2, and the spectral sum
/// over multi-indices of e^{-t|k|}.
inline TraceResult ou_trace(double t, int n, std::size_t points = 4096) {
  require(t > 0, ErrorKind::invalid_argument, "trace needs t > 0");
  require(n >= 1, ErrorKind::invalid_argument, "dimension must be >= 1");
  TraceResult res;
  res.t = t;
  res.n = n;
  // Integrand decays like exp(-c r^2 / 2) with c = tanh(t/2).
  const double c = std::tanh(0.5 * t);
  double width = std::sqrt(2 * 45.0 / c) + std::sqrt(static_cast<double>(n));
  if (width > 400) {
    res.notes.push_back("widen-grid: trace integrand decays too slowly at this t; "
                        "quadrature truncation may exceed 1e-6");
    width = 400;
  }
  res.half_width = width;
  const Grid g = make_radial_grid(width, points, n);
  const auto diag = sample(g, [&](double r) { return ou_kernel_diagonal(t, r, n); });
  res.quadrature = integrate(diag, standard_gaussian(n));
  const double vscale = std::pow(-std::expm1(-2 * t), -0.5 * n);
  res.weight_integral = gaussian_mean(GaussExp{vscale, 1 / (1 + std::exp(t)), 0.0, n});
  double one_d = 0, term = 1;
  const double q = std::exp(-t);
  for (int k = 0; k < 100000 && term > 1e-18 * one_d; ++k) {
    one_d += term;
    term *= q;
  }
  res.eigen_sum = std::pow(one_d, n);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };
  res.max_relative_deviation =
      std::max({rel(res.quadrature, res.weight_integral), rel(res.quadrature, res.eigen_sum),
                rel(res.weight_integral, res.eigen_sum)});
  std::ostringstream msg;
  msg.precision(10);
  msg << "(1-e^{-t})^n = " << std::pow(-std::expm1(-t), n)
      << " is the reciprocal of the trace, not an upper bound for it";
  res.notes.push_back(msg.str());
  return res;
}

inline InequalityReport trace_report(const TraceResult& tr) {
  InequalityReport r;
  r.check = "ou-trace";
  r.subject = "n=" + std::to_string(tr.n);
  r.lhs = tr.quadrature;
  r.rhs = tr.eigen_sum;
  r.params = {{"t", tr.t}, {"n", static_cast<double>(tr.n)}};
  r.extras = {{"quadrature", tr.quadrature},
              {"weight_integral", tr.weight_integral},
              {"eigen_sum", tr.eigen_sum},
              {"max_relative_deviation", tr.max_relative_deviation}};
  r.tolerance = 1e-6 * tr.eigen_sum;
  r.notes = tr.notes;
  r.finalize(tr.max_relative_deviation > 1e-6);
  if (r.status == Status::warning) r.status = Status::fail;
  return r;
}

}  // namespace hyperlab
