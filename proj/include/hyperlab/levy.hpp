#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "hyperlab/error.hpp"
#include "hyperlab/fourier.hpp"
#include "hyperlab/grid.hpp"
#include "hyperlab/measure.hpp"
#include "hyperlab/report.hpp"
#include "hyperlab/schedule.hpp"
#include "hyperlab/semigroup.hpp"

namespace hyperlab {

struct Stable {
  double alpha = 2.0;
};

/// Finite jump measure nu = sum_k w_k delta_{z_k}; the generator is
/// f -> int (f(. + z) - f) dnu(z), total mass C = sum_k w_k.
struct CompoundPoisson {
  std::vector<double> jumps;
  std::vector<double> weights;
};

/// c_alpha |z|^{-1-alpha} restricted to |z| > delta.
struct TruncatedStable {
  double alpha = 1.0;
  double cutoff = 0.1;
};

struct LevySpec {
  std::variant<Stable, CompoundPoisson, TruncatedStable> variant;
  int n = 1;
};

inline LevySpec stable(double alpha) {
  require(alpha > 0 && alpha <= 2, ErrorKind::invalid_argument, "stable index must lie in (0, 2]");
  return {Stable{alpha}};
}

inline LevySpec compound_poisson(std::vector<double> jumps, std::vector<double> weights) {
  require(jumps.size() == weights.size() && !jumps.empty(), ErrorKind::shape_mismatch,
          "jump locations and weights differ in length");
  for (double w : weights)
    require(w >= 0 && std::isfinite(w), ErrorKind::invalid_argument, "jump weights must be >= 0");
  return {CompoundPoisson{std::move(jumps), std::move(weights)}};
}

/// Jump measure given as a density sampled on a grid (atoms at the nodes).
inline LevySpec compound_poisson(const GridFunction& density) {
  const auto w = quadrature_weights(density.grid());
  std::vector<double> z, m;
  for (std::size_t i = 0; i < density.size(); ++i) {
    require(density[i] >= 0, ErrorKind::invalid_argument, "jump density must be >= 0");
    if (density[i] > 0) {
      z.push_back(density.grid().node(i));
      m.push_back(w[i] * density[i]);
    }
  }
  return compound_poisson(std::move(z), std::move(m));
}

inline LevySpec truncated_stable(double alpha, double cutoff) {
  require(alpha > 0 && alpha < 2, ErrorKind::invalid_argument,
          "truncated stable index must lie in (0, 2)");
  require(cutoff > 0, ErrorKind::invalid_argument, "cutoff must be positive");
  return {TruncatedStable{alpha, cutoff}};
}

/// Constant of the symmetric alpha-stable Levy density c_alpha |z|^{-1-alpha}
/// whose generator has symbol -|xi|^alpha.
inline double stable_levy_constant(double alpha) {
  return alpha * std::pow(2.0, alpha - 1) * std::tgamma(0.5 * (1 + alpha)) /
         (std::sqrt(std::numbers::pi) * std::tgamma(1 - 0.5 * alpha));
}

/// Tail constant of the stable density: K_t(x) ~ t A |x|^{-1-alpha}.
inline double stable_tail_constant(double alpha) {
  return std::tgamma(1 + alpha) * std::sin(0.5 * std::numbers::pi * alpha) / std::numbers::pi;
}

/// Far-field expansion of the symmetric stable density, sum over k of
/// (-1)^{k+1} Gamma(alpha k + 1) sin(k pi alpha / 2) t^k |y|^{-alpha k - 1} / (pi k!).
/// Convergent for alpha < 1, asymptotic otherwise; meant for |y| >> t^{1/alpha}.
inline double stable_far_field(double alpha, double t, double y) {
  const double ay = std::abs(y);
  double sum = 0, prev = INFINITY;
  for (int k = 1; k <= 40; ++k) {
    const double term = std::exp(std::lgamma(alpha * k + 1) - std::lgamma(k + 1.0) + k * std::log(t) -
                                 (alpha * k + 1) * std::log(ay)) *
                        std::sin(0.5 * k * std::numbers::pi * alpha);
    if (std::abs(term) > prev) break;
    sum += (k % 2 ? 1 : -1) * term;
    prev = std::abs(term);
    if (prev < 1e-18 * std::abs(sum)) break;
  }
  return sum / std::numbers::pi;
}

/// K_t^alpha on the grid nodes, by discrete inversion of e^{-t|xi|^alpha}
/// with the periodic images removed.
inline GridFunction stable_kernel(double alpha, double t, const Grid& g, std::size_t padding = 16) {
  require(alpha > 0 && alpha <= 2, ErrorKind::invalid_argument, "stable index must lie in (0, 2]");
  require(t > 0, ErrorKind::invalid_argument, "stable time must be positive");
  auto k = stable_density(alpha, t, g, padding);
  if (alpha == 2) return k;
  const double period = static_cast<double>(detail::next_pow2(g.points * padding)) * g.spacing;
  constexpr int near = 32;
  double far = std::riemann_zeta(1 + alpha);
  for (int m = 1; m <= near; ++m) far -= std::pow(m, -1 - alpha);
  far *= 2 * t * stable_tail_constant(alpha) / std::pow(period, 1 + alpha);
  std::vector<double> v = k.vector();
  for (std::size_t i = 0; i < g.points; ++i) {
    const double x = g.node(i);
    double images = far;
    for (int m = 1; m <= near; ++m)
      images += stable_far_field(alpha, t, x + m * period) + stable_far_field(alpha, t, x - m * period);
    v[i] -= images;
  }
  return GridFunction(g, std::move(v));
}

/// Levy semigroup acting on functions that are constant outside the grid
/// (the constant being the mean of the two boundary samples).
class LevyEngine {
 public:
  LevyEngine(LevySpec spec, Grid grid, std::size_t padding = 16, double series_tol = 1e-15)
      : spec_(std::move(spec)), grid_(grid), padding_(padding), tol_(series_tol) {
    require(!grid_.radial(), ErrorKind::unsupported, "Levy semigroups act on line grids");
    require(spec_.n == 1, ErrorKind::unsupported, "Levy semigroups are realized on the line");
    if (auto* ts = std::get_if<TruncatedStable>(&spec_.variant)) atoms_ = truncated_atoms(*ts);
    if (auto* cp = std::get_if<CompoundPoisson>(&spec_.variant)) atoms_ = *cp;
  }

  const Grid& grid() const { return grid_; }
  const LevySpec& spec() const { return spec_; }
  bool finite_mass() const { return !std::holds_alternative<Stable>(spec_.variant); }

  /// Total jump mass C (infinite for stable specs).
  double jump_mass() const {
    if (!finite_mass()) return INFINITY;
    double c = 0;
    for (double w : atoms_.weights) c += w;
    return c;
  }

  const CompoundPoisson& atoms() const { return atoms_; }

  GridFunction apply(double t, const GridFunction& f, Diagnostics* diag = nullptr) const {
    require(t >= 0, ErrorKind::invalid_argument, "Levy time must be nonnegative");
    require(f.grid() == grid_, ErrorKind::shape_mismatch, "function lives on another grid");
    if (t == 0) return f;
    if (auto* st = std::get_if<Stable>(&spec_.variant)) {
      const double a = st->alpha;
      return fourier_multiplier(
          f, [=](double xi) { return std::exp(-t * std::pow(std::abs(xi), a)); },
          {padding_, Detrend::constant, diag});
    }
    return poisson_series(t, f);
  }

  /// int g dL_t(x, .) at x = 0.
  double at_origin(double t, const GridFunction& g, Diagnostics* diag = nullptr) const {
    require(g.grid() == grid_, ErrorKind::shape_mismatch, "function lives on another grid");
    if (t == 0) return interpolate(g, 0.0, diag);
    if (auto* st = std::get_if<Stable>(&spec_.variant)) {
      const auto k = stable_kernel(st->alpha, t, grid_, padding_);
      const auto w = quadrature_weights(grid_);
      double s = 0, inside = 0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        s += w[i] * k[i] * g[i];
        inside += w[i] * k[i];
      }
      const double outside = std::max(0.0, 1 - inside);
      return s + 0.5 * outside * (g[0] + g[g.size() - 1]);
    }
    return interpolate(poisson_series(t, g), 0.0, diag);
  }

  /// x -> int D(f(x + z), f(x)) dnu(z), D(u, v) = u log(u/v) - (u - v).
  GridFunction bregman_integrand(const GridFunction& f) const {
    require(finite_mass(), ErrorKind::unsupported,
            "Bregman bound needs a finite jump measure; truncate the stable measure");
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t k = 0; k < atoms_.jumps.size(); ++k) {
      const auto shifted = shift(f, atoms_.jumps[k]);
      for (std::size_t i = 0; i < f.size(); ++i)
        out[i] += atoms_.weights[k] * bregman(shifted[i], f[i]);
    }
    return GridFunction(grid_, std::move(out));
  }

  static double bregman(double u, double v) {
    require(u > 0 && v > 0, ErrorKind::domain, "Bregman distance needs positive arguments");
    return u * std::log(u / v) - (u - v);
  }

 private:
  // f(. + z) with constant extension outside the grid.
  std::vector<double> shift(const GridFunction& f, double z) const {
    const double s = z / grid_.spacing;
    const double r = std::round(s);
    std::vector<double> out(f.size());
    const long n = static_cast<long>(f.size());
    const double lo = f[0], hi = f[f.size() - 1];
    if (std::abs(s - r) < 1e-9) {
      const long m = static_cast<long>(r);
      for (long i = 0; i < n; ++i) {
        const long j = i + m;
        out[i] = j < 0 ? lo : (j >= n ? hi : f[j]);
      }
      return out;
    }
    for (long i = 0; i < n; ++i) {
      const double x = grid_.node(static_cast<std::size_t>(i)) + z;
      out[i] = x <= grid_.lower() ? lo : (x >= grid_.upper() ? hi : interpolate(f, x));
    }
    return out;
  }

  // e^{-Ct} sum_k (t^k / k!) J^k f, J f = int f(. + z) dnu(z).
  GridFunction poisson_series(double t, const GridFunction& f) const {
    const double c = jump_mass();
    const double lam = c * t;
    std::vector<double> term(f.vector()), acc(f.size(), 0.0);
    double p = std::exp(-lam), cum = 0;
    const int kmax = static_cast<int>(lam + 40 * std::sqrt(lam + 1) + 60);
    int k = 0;
    for (; k <= kmax; ++k) {
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p * term[i];
      cum += p;
      if (1 - cum < tol_ && k >= lam) break;
      std::vector<double> next(f.size(), 0.0);
      const GridFunction cur(grid_, term);
      for (std::size_t a = 0; a < atoms_.jumps.size(); ++a) {
        const auto sh = shift(cur, atoms_.jumps[a]);
        const double w = atoms_.weights[a] / c;
        for (std::size_t i = 0; i < next.size(); ++i) next[i] += w * sh[i];
      }
      term.swap(next);
      p *= lam / (k + 1);
    }
    if (k > kmax)
      fail(ErrorKind::convergence, "Poisson series tail " + std::to_string(1 - cum) +
                                       " above tolerance");
    return GridFunction(grid_, std::move(acc));
  }

  // Atoms at grid-spacing multiples for delta < |z| <= span, plus the mass
  // beyond span lumped just outside the grid (where f is constant).
  CompoundPoisson truncated_atoms(const TruncatedStable& ts) const {
    const double ca = stable_levy_constant(ts.alpha);
    const double h = grid_.spacing;
    const double span = 2 * grid_.half_width;
    CompoundPoisson cp;
    const auto first = static_cast<long>(std::ceil(ts.cutoff / h - 1e-12));
    const auto last = static_cast<long>(std::floor(span / h));
    // Cell masses integrate the density exactly over [z - h/2, z + h/2]
    // (clipped at the cutoff).
    auto cdf_tail = [&](double z) { return ca / ts.alpha * std::pow(z, -ts.alpha); };
    for (long k = first; k <= last; ++k) {
      const double z = static_cast<double>(k) * h;
      const double a = std::max(ts.cutoff, z - 0.5 * h);
      const double b = k == last ? INFINITY : z + 0.5 * h;
      const double m = cdf_tail(a) - (std::isinf(b) ? 0.0 : cdf_tail(b));
      if (k == last) {
        cp.jumps.push_back(2 * span);
        cp.weights.push_back(m);
        cp.jumps.push_back(-2 * span);
        cp.weights.push_back(m);
        continue;
      }
      cp.jumps.push_back(z);
      cp.weights.push_back(m);
      cp.jumps.push_back(-z);
      cp.weights.push_back(m);
    }
    return cp;
  }

  LevySpec spec_;
  Grid grid_;
  std::size_t padding_;
  double tol_;
  CompoundPoisson atoms_;
};

/// Ent_{L_t}(f)(0) <= t L_t( int D(f(. + z), f) dnu(z) )(0).
inline InequalityReport bregman_entropy_check(const LevyEngine& eng, const GridFunction& f,
                                              double t) {
  require(f.strictly_positive(), ErrorKind::domain, "Bregman check needs a positive function");
  require(t > 0, ErrorKind::invalid_argument, "Bregman check needs t > 0");
  Diagnostics diag;
  const double pf = eng.at_origin(t, f, &diag);
  const double pflogf =
      eng.at_origin(t, transform(f, [](double v) { return v * std::log(v); }), &diag);
  const double ent = std::max(0.0, pflogf - pf * std::log(pf));
  const double rhs = t * eng.at_origin(t, eng.bregman_integrand(f), &diag);
  auto r = make_report("levy-bregman", ent, rhs, kGridTolerance,
                       {{"t", t}, {"jump_mass", eng.jump_mass()}});
  if (auto* ts = std::get_if<TruncatedStable>(&eng.spec().variant)) {
    r.params.push_back({"alpha", ts->alpha});
    r.params.push_back({"cutoff", ts->cutoff});
  }
  r.absorb(diag);
  return r;
}

/// Bregman check along a ladder of truncation cutoffs for the stable
/// measure; the ladder is reported, no limit value is asserted.
inline std::vector<InequalityReport> bregman_truncation_ladder(double alpha, const GridFunction& f,
                                                               double t,
                                                               const std::vector<double>& cutoffs) {
  std::vector<InequalityReport> out;
  for (double d : cutoffs) {
    LevyEngine eng(truncated_stable(alpha, d), f.grid());
    out.push_back(bregman_entropy_check(eng, f, t));
  }
  return out;
}

enum class LevyVariant { fine, coarse };

/// L_t(f^{q1})^{1/q1} <= L_s((L_{t-s} f)^{q2})^{1/q2} at 0, times
/// exp[C s(t-s)(1-q2)^2 / (q2(s q2 + t - s))] in the coarse variant.
inline InequalityReport check_levy_hyper(const LevyEngine& eng, const ExponentSchedule& sch,
                                         const GridFunction& f, LevyVariant variant) {
  const bool fine = variant == LevyVariant::fine;
  require(sch.constraint == (fine ? Constraint::LevyFine : Constraint::LevyCoarse),
          ErrorKind::invalid_argument, "schedule does not match the Levy variant");
  sch.validate();
  require(f.strictly_positive(), ErrorKind::domain, "Levy check needs a positive function");
  double factor = 1;
  if (!fine) {
    require(eng.finite_mass(), ErrorKind::invalid_argument,
            "coarse Levy bound needs a finite jump measure");
    const double c = eng.jump_mass();
    const double s = sch.s, t = sch.t, q2 = sch.q2;
    factor = std::exp(c * s * (t - s) * (1 - q2) * (1 - q2) / (q2 * (s * q2 + t - s)));
  }
  Diagnostics diag;
  const double lhs =
      std::pow(eng.at_origin(sch.t, transform(f, [&](double v) { return std::pow(v, sch.q1); }),
                             &diag),
               1 / sch.q1);
  const auto inner = eng.apply(sch.t - sch.s, f, &diag);
  const double rhs =
      std::pow(eng.at_origin(sch.s, transform(inner, [&](double v) { return std::pow(v, sch.q2); }),
                             &diag),
               1 / sch.q2) *
      factor;
  auto r = make_report(fine ? "levy-fine" : "levy-coarse", lhs, rhs, kGridTolerance, {}, sch);
  r.extras.push_back({"factor", factor});
  r.absorb(diag);
  return r;
}

/// P_t^{LOU} f = T_{-2t} L_{(1 - e^{-alpha t})/alpha} f.
inline GridFunction levy_ou_apply(double alpha, double t, const GridFunction& f,
                                  Diagnostics* diag = nullptr) {
  require(t >= 0, ErrorKind::invalid_argument, "time must be nonnegative");
  if (t == 0) return f;
  const LevyEngine eng(stable(alpha), f.grid());
  const double tau = -std::expm1(-alpha * t) / alpha;
  return dilation_apply(eng.apply(tau, f, diag), -2 * t, diag);
}

struct CommutationResult {
  double max_deviation = 0;
  GridFunction lhs, rhs;
};

/// L_t T_a f against T_a L_{t e^{a alpha/2}} f on the inner half of the grid.
inline CommutationResult levy_dilation_commutation(double alpha, double a, double t,
                                                   const GridFunction& f) {
  const LevyEngine eng(stable(alpha), f.grid());
  auto lhs = eng.apply(t, dilation_apply(f, a));
  auto rhs = dilation_apply(eng.apply(t * std::exp(0.5 * a * alpha), f), a);
  double dev = 0;
  for (std::size_t i = 0; i < lhs.size(); ++i)
    if (std::abs(f.grid().node(i)) <= 0.5 * f.grid().half_width)
      dev = std::max(dev, std::abs(lhs[i] - rhs[i]));
  return {dev, std::move(lhs), std::move(rhs)};
}

/// Pointwise input: T_a f is sampled exactly, and the second path runs on the
/// grid scaled by e^{a/2} so that dilated nodes are nodes again.
inline CommutationResult levy_dilation_commutation(double alpha, double a, double t,
                                                   const RealFn& f, const Grid& g) {
  const double c = std::exp(0.5 * a);
  auto lhs = LevyEngine(stable(alpha), g).apply(t, sample(g, dilation_apply(f, a)));
  const Grid scaled = make_grid(c * g.half_width, g.points);
  auto on_scaled = LevyEngine(stable(alpha), scaled).apply(t * std::exp(0.5 * a * alpha),
                                                           sample(scaled, f));
  GridFunction rhs(g, std::vector<double>(on_scaled.values().begin(), on_scaled.values().end()));
  double dev = 0;
  for (std::size_t i = 0; i < lhs.size(); ++i)
    if (std::abs(g.node(i)) <= 0.5 * g.half_width) dev = std::max(dev, std::abs(lhs[i] - rhs[i]));
  return {dev, std::move(lhs), std::move(rhs)};
}

namespace detail {

// (int g^q dK)^{1/q} against the invariant law K^alpha_{1/alpha}, with the
// mass outside the grid carried by the boundary values.
inline double invariant_norm(const GridFunction& g, const GridFunction& k, double q) {
  const auto w = quadrature_weights(g.grid());
  double s = 0, inside = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    s += w[i] * k[i] * std::pow(g[i], q);
    inside += w[i] * k[i];
  }
  const double outside = std::max(0.0, 1 - inside);
  s += 0.5 * outside * (std::pow(g[0], q) + std::pow(g[g.size() - 1], q));
  return std::pow(s, 1 / q);
}

}  // namespace detail

/// ||f||_{q1} <= ||P_t^{LOU} f||_{q2} in L^q(K^alpha_{1/alpha}) with
/// q2 - 1 = (q2/q1)(q1 - 1) e^{alpha t}.
inline InequalityReport check_levy_ou_corollary(double alpha, double t, double q1,
                                                const GridFunction& f) {
  const auto sch = ExponentSchedule::levy_ou(q1, t, alpha);
  require(f.strictly_positive(), ErrorKind::domain, "Levy-OU check needs a positive function");
  Diagnostics diag;
  const auto k = stable_kernel(alpha, 1 / alpha, f.grid());
  const auto pf = levy_ou_apply(alpha, t, f, &diag);
  const double lhs = detail::invariant_norm(f, k, q1);
  const double rhs = detail::invariant_norm(pf, k, sch.q2);
  auto r = make_report("levy-ou", lhs, rhs, kGridTolerance, {}, sch);
  r.absorb(diag);
  return r;
}

struct ExponentFit {
  double slope = 0;
  double predicted = 0;
  double residual = 0;
  bool low_confidence = false;
  std::vector<double> times, log_ratios;
};

/// Fits the t-exponent of sup_f ||L_t f||_{q2} / ||f||_{q1} (Lebesgue norms)
/// over Gaussian probes, against -n(q2-q1)/(alpha q1 q2).
inline ExponentFit ultracontractive_exponent(double alpha, double q1, double q2,
                                             std::vector<double> times = {0.25, 0.5, 1, 2, 4}) {
  require(q2 >= q1 && q1 >= 1, ErrorKind::invalid_argument, "need q2 >= q1 >= 1");
  const Grid g = make_grid(64.0, 8192);
  const LevyEngine eng(stable(alpha), g, 4);
  auto lq = [&](const GridFunction& f, double q) {
    return std::pow(integrate_dx(transform(f, [q](double v) { return std::pow(std::abs(v), q); })),
                    1 / q);
  };
  auto ratio = [&](double t, double log_sigma) {
    const double s = std::exp(log_sigma);
    const auto f = sample(g, [s](double x) { return std::exp(-0.5 * x * x / (s * s)); });
    return std::log(lq(eng.apply(t, f), q2) / lq(f, q1));
  };
  ExponentFit fit;
  fit.predicted = -(q2 - q1) / (alpha * q1 * q2);
  fit.times = times;
  for (double t : times) {
    // Golden-section search of the best probe width; the window follows t^{1/alpha}.
    const double shift = std::log(t / *std::max_element(times.begin(), times.end())) / alpha;
    double a = std::log(0.05) + shift, b = std::log(8.0) + shift;
    const double gr = 0.5 * (std::sqrt(5.0) - 1);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = ratio(t, c), fd = ratio(t, d);
    for (int it = 0; it < 60 && b - a > 1e-7; ++it) {
      if (fc > fd) { b = d; d = c; fd = fc; c = b - gr * (b - a); fc = ratio(t, c); }
      else { a = c; c = d; fc = fd; d = a + gr * (b - a); fd = ratio(t, d); }
    }
    fit.log_ratios.push_back(std::max(fc, fd));
  }
  const std::size_t m = times.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(times[i]), y = fit.log_ratios[i];
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double md = static_cast<double>(m);
  fit.slope = m > 1 ? (md * sxy - sx * sy) / (md * sxx - sx * sx) : 0.0;
  const double icpt = (sy - fit.slope * sx) / md;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = fit.log_ratios[i] - (icpt + fit.slope * std::log(times[i]));
    fit.residual = std::max(fit.residual, std::abs(e));
  }
  fit.low_confidence = fit.residual > 1e-2;
  return fit;
}

}  // namespace hyperlab
