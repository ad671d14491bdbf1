#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "hyperlab/functional.hpp"
#include "hyperlab/grid.hpp"
#include "hyperlab/hypercheck.hpp"
#include "hyperlab/report.hpp"
#include "hyperlab/schedule.hpp"
#include "hyperlab/semigroup.hpp"

namespace hyperlab {

struct HopfLaxResult {
  GridFunction values;
  std::vector<std::size_t> argmin_indices;
};

/// Q_t f(x) = inf_y f(y) + |x - y|^2/(2t) over the grid nodes. The
/// leftmost minimizer is nondecreasing in x, so a divide-and-conquer sweep
/// needs O(N log N) evaluations. On radial grids the infimum runs over
/// radii, the optimal y being aligned with x.
inline HopfLaxResult hopf_lax(const GridFunction& f, double t) {
  require(f.size() > 0, ErrorKind::invalid_argument, "empty grid");
  require(t >= 0, ErrorKind::invalid_argument, "Hopf-Lax time must be nonnegative");
  const Grid& g = f.grid();
  const std::size_t n = f.size();
  std::vector<std::size_t> arg(n);
  std::vector<double> val(n);
  if (t == 0) {
    for (std::size_t i = 0; i < n; ++i) arg[i] = i;
    return {f, arg};
  }
  const auto xs = nodes(g);
  const double inv = 1.0 / (2 * t);
  struct Frame { std::size_t lo, hi, jlo, jhi; };
  std::vector<Frame> stack{{0, n - 1, 0, n - 1}};
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    const std::size_t mid = fr.lo + (fr.hi - fr.lo) / 2;
    double best = std::numeric_limits<double>::infinity();
    std::size_t bj = fr.jlo;
    for (std::size_t j = fr.jlo; j <= fr.jhi; ++j) {
      const double d = xs[mid] - xs[j];
      const double v = f[j] + d * d * inv;
      if (v < best) {
        best = v;
        bj = j;
      }
    }
    val[mid] = best;
    arg[mid] = bj;
    if (mid > fr.lo) stack.push_back({fr.lo, mid - 1, fr.jlo, bj});
    if (mid < fr.hi) stack.push_back({mid + 1, fr.hi, bj, fr.jhi});
  }
  return {GridFunction(g, std::move(val)), std::move(arg)};
}

/// v = -2 eps log P_{eps t}(e^{-f/(2 eps)}), by quadrature over the grid
/// nodes in the log domain (which is the same as subtracting min f before
/// exponentiating). The kernel is normalized by its discrete mass on the
/// grid, so constants are preserved exactly near the edges too.
inline GridFunction viscous_hj(const GridFunction& f, double t, double eps) {
  require(eps > 0 && t > 0, ErrorKind::invalid_argument, "viscous HJ needs eps, t > 0");
  const Grid& g = f.grid();
  require(!g.radial(), ErrorKind::unsupported, "viscous HJ runs on line grids");
  const auto w = quadrature_weights(g);
  const auto xs = nodes(g);
  const double var = 2 * eps * t;
  std::vector<double> logw(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) logw[j] = std::log(w[j]) - f[j] / (2 * eps);
  std::vector<double> out(f.size());
  std::vector<double> e(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    double mass = 0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double d = xs[i] - xs[j];
      const double k = -d * d / (2 * var);
      mass += w[j] * std::exp(k);
      e[j] = logw[j] + k;
      mx = std::max(mx, e[j]);
    }
    if (!std::isfinite(mx))
      fail(ErrorKind::range, "viscous HJ exponent out of range at node " + std::to_string(i));
    double s = 0;
    for (double v : e) s += std::exp(v - mx);
    out[i] = -2 * eps * (mx + std::log(s) - std::log(mass));
  }
  return GridFunction(g, std::move(out));
}

namespace detail {

// P_u(e^{q g})(x) for a grid function g.
inline double exp_moment(const Semigroup& sg, const GridFunction& g, double q, double u,
                         double x, const GaussianExpectation& ex) {
  const auto fn = as_function(g);
  return apply_at(sg, [&](double y) { return std::exp(q * fn(y)); }, u, x, ex);
}

}  // namespace detail

/// P_u(e^{q1 Q_t f})^{1/q1} <= P_u(e^{q2 f})^{1/q2}; with q2 = 0 the
/// endpoint P_u(e^{q1 Q_t f}) <= exp(q1 P_u f).
inline InequalityReport check_hj_hyper_rho(const ExponentSchedule& sch, const GridFunction& f,
                                           const Semigroup& sg, const CheckOptions& opt = {}) {
  require(sch.constraint == Constraint::HJRho, ErrorKind::invalid_argument,
          "schedule is not a Hamilton-Jacobi rho schedule");
  sch.validate();
  if (sch.rho != sg.rho() && !opt.exploratory)
    fail(ErrorKind::invalid_argument, "schedule rho does not match " + sg.name());
  GaussianExpectation ex(opt.quadrature);
  const auto q = hopf_lax(f, sch.t).values;
  const double u = sch.u1;
  double lhs = 0, rhs = 0;
  const bool endpoint = sch.q2 == 0;
  if (endpoint) {
    lhs = detail::exp_moment(sg, q, sch.q1, u, opt.x, ex);
    rhs = std::exp(sch.q1 * apply_at(sg, as_function(f), u, opt.x, ex));
  } else {
    lhs = std::pow(detail::exp_moment(sg, q, sch.q1, u, opt.x, ex), 1 / sch.q1);
    rhs = std::pow(detail::exp_moment(sg, f, sch.q2, u, opt.x, ex), 1 / sch.q2);
  }
  auto r = make_report(endpoint ? "hj-rho-endpoint" : "hj-rho", lhs, rhs, kGridTolerance,
                       {{"x", opt.x}, {"h", f.grid().spacing}}, sch);
  r.subject = sg.name();
  return r;
}

/// P_{u1}(e^{q1 Q_t f})^{1/q1} <= P_{u2}(e^{q2 f})^{1/q2} B^{n/2} for the heat
/// semigroup; with q2 = 0 the endpoint
/// P_{u1}(e^{q1 Q_t f}) <= e^{q1 P_{u2} f} exp((n/2) A_{u2/u1}).
inline InequalityReport check_hj_hyper_0n(const ExponentSchedule& sch, const GridFunction& f,
                                          const CheckOptions& opt = {}) {
  require(sch.constraint == Constraint::HJ0n, ErrorKind::invalid_argument,
          "schedule is not a Hamilton-Jacobi CD(0,n) schedule");
  sch.validate();
  const int n = f.grid().radial() ? f.grid().dimension : 1;
  require(n == sch.n, ErrorKind::invalid_argument, "grid dimension differs from the schedule");
  const Semigroup sg = heat_semigroup(n);
  GaussianExpectation ex(opt.quadrature);
  const auto q = hopf_lax(f, sch.t).values;
  const bool endpoint = sch.q2 == 0;
  double lhs = 0, rhs = 0, factor = 1;
  if (endpoint) {
    factor = std::exp(0.5 * sch.n * deficiency(sch.u2 / sch.u1).value);
    lhs = detail::exp_moment(sg, q, sch.q1, sch.u1, opt.x, ex);
    rhs = std::exp(sch.q1 * apply_at(sg, as_function(f), sch.u2, opt.x, ex)) * factor;
  } else {
    factor = std::pow(hj_0n_bracket(sch), 0.5 * sch.n);
    lhs = std::pow(detail::exp_moment(sg, q, sch.q1, sch.u1, opt.x, ex), 1 / sch.q1);
    rhs = std::pow(detail::exp_moment(sg, f, sch.q2, sch.u2, opt.x, ex), 1 / sch.q2) * factor;
  }
  auto r = make_report(endpoint ? "hj-0n-endpoint" : "hj-0n", lhs, rhs, kGridTolerance,
                       {{"x", opt.x}, {"h", f.grid().spacing}}, sch);
  r.subject = sg.name();
  r.extras.push_back({"constant", factor});
  return r;
}

}  // namespace hyperlab
