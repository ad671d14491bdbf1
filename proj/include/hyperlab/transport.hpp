#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hyperlab/functional.hpp"
#include "hyperlab/grid.hpp"
#include "hyperlab/hjb.hpp"
#include "hyperlab/hypercheck.hpp"
#include "hyperlab/measure.hpp"
#include "hyperlab/report.hpp"
#include "hyperlab/semigroup.hpp"
#include "hyperlab/test_function.hpp"

namespace hyperlab {

/// Cost convention of every W2 value in this library: d(x,y)^2 / 2.
inline constexpr double kTransportCostFactor = 0.5;

/// For comparison with the convention without the 1/2 factor only.
inline double to_unhalved_convention(double w2_squared) { return 2.0 * w2_squared; }

struct TransportPair {
  MeasureSpec source;
  MeasureSpec target;
  double w2_squared = 0;
  double cost_factor = kTransportCostFactor;
  double dual_value = NAN;
};

/// Cumulative distribution of a line-grid density, with the Euler-Maclaurin
/// endpoint correction so that the node values are fourth-order accurate.
struct Cdf {
  std::vector<double> x, F, rho;
  double h = 0;

  explicit Cdf(const GridFunction& density) {
    const Grid& g = density.grid();
    require(!g.radial(), ErrorKind::unsupported, "CDFs are built on line grids");
    h = g.spacing;
    x = nodes(g);
    rho.assign(density.values().begin(), density.values().end());
    for (auto& r : rho) r = std::max(r, 0.0);
    const auto d = detail::first_derivative(rho, h, FdOrder::fourth, false);
    F.assign(rho.size(), 0.0);
    double trap = 0;
    for (std::size_t i = 1; i < rho.size(); ++i) {
      trap += 0.5 * h * (rho[i - 1] + rho[i]);
      F[i] = trap - h * h / 12.0 * (d[i] - d[0]);
    }
    const double total = F.back();
    require(total > 0, ErrorKind::invalid_argument, "density has no mass");
    for (std::size_t i = 0; i < F.size(); ++i) {
      F[i] /= total;
      rho[i] /= total;
      if (i > 0) F[i] = std::max(F[i], F[i - 1]);
    }
    F.back() = 1.0;
  }

  /// Generalized inverse by cubic Hermite interpolation of (F, rho).
  double quantile(double u) const {
    if (u <= F.front()) return x.front();
    if (u >= F.back()) return x.back();
    const auto it = std::upper_bound(F.begin(), F.end(), u);
    const std::size_t k = static_cast<std::size_t>(it - F.begin()) - 1;
    const double f0 = F[k], f1 = F[k + 1];
    if (f1 <= f0) return x[k];
    const double m0 = rho[k] * h, m1 = rho[k + 1] * h;
    auto H = [&](double s) {
      const double s2 = s * s, s3 = s2 * s;
      return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * f1 +
             (s3 - s2) * m1;
    };
    auto dH = [&](double s) {
      const double s2 = s * s;
      return (6 * s2 - 6 * s) * f0 + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * f1 +
             (3 * s2 - 2 * s) * m1;
    };
    double lo = 0, hi = 1, s = (u - f0) / (f1 - f0);
    for (int it2 = 0; it2 < 60; ++it2) {
      const double v = H(s) - u;
      if (v > 0) hi = s; else lo = s;
      const double d = dH(s);
      double next = d > 0 ? s - v / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - s) < 1e-15) { s = next; break; }
      s = next;
    }
    return x[k] + s * h;
  }

  /// F at an arbitrary point (same Hermite interpolant).
  double operator()(double y) const {
    if (y <= x.front()) return 0.0;
    if (y >= x.back()) return 1.0;
    const double pos = (y - x.front()) / h;
    const std::size_t k = std::min(static_cast<std::size_t>(pos), x.size() - 2);
    const double s = pos - static_cast<double>(k);
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * F[k] + (s3 - 2 * s2 + s) * rho[k] * h +
           (-2 * s3 + 3 * s2) * F[k + 1] + (s3 - s2) * rho[k + 1] * h;
  }
};

enum class W2Method { map_integral, quantile_samples };

struct W2Options {
  W2Method method = W2Method::map_integral;
  std::size_t quantile_samples = 4096;
};

/// W2^2 (half cost) between two densities on a common line grid. The
/// default integrates |T(x) - x|^2/2 against mu with the monotone map
/// T = F_nu^{-1} o F_mu; the alternative averages the quantile gap over
/// uniform u-samples.
inline double w2_squared(const GridFunction& mu, const GridFunction& nu, W2Options opt = {}) {
  require(mu.grid() == nu.grid(), ErrorKind::shape_mismatch,
          "transport densities live on different grids");
  const Cdf fm(mu), fn(nu);
  double s = 0;
  if (opt.method == W2Method::quantile_samples) {
    const std::size_t k = opt.quantile_samples;
    for (std::size_t i = 0; i < k; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(k);
      const double d = fn.quantile(u) - fm.quantile(u);
      s += d * d;
    }
    return kTransportCostFactor * s / static_cast<double>(k);
  }
  const auto w = quadrature_weights(mu.grid());
  for (std::size_t i = 0; i < fm.x.size(); ++i) {
    if (fm.rho[i] <= 0) continue;
    const double d = fn.quantile(fm.F[i]) - fm.x[i];
    s += w[i] * fm.rho[i] * d * d;
  }
  return kTransportCostFactor * s;
}

/// (|m1 - m2|^2 + n (sigma1 - sigma2)^2) / 2.
inline double w2_gaussian_closed_form(double m1, double sigma1, double m2, double sigma2,
                                      int n = 1) {
  require(sigma1 > 0 && sigma2 > 0, ErrorKind::invalid_argument, "sigma must be positive");
  return 0.5 * ((m1 - m2) * (m1 - m2) + n * (sigma1 - sigma2) * (sigma1 - sigma2));
}

/// Best value of  int Q_1 f dmu - int f dnu  over a finite family of
/// potentials: affine-quadratic ones and the potential induced by the
/// computed monotone map. Never exceeds the primal value (up to
/// discretization).
inline double kantorovich_dual(const GridFunction& mu, const GridFunction& nu) {
  const Grid& g = mu.grid();
  require(g == nu.grid(), ErrorKind::shape_mismatch, "dual needs a common grid");
  const auto xs = nodes(g);
  auto value = [&](const GridFunction& f) {
    const auto q = hopf_lax(f, 1.0).values;
    double a = 0, b = 0;
    const auto w = quadrature_weights(g);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      a += w[i] * q[i] * mu[i];
      b += w[i] * f[i] * nu[i];
    }
    return a - b;
  };
  double best = 0.0;
  for (double c : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0})
    for (double a : {-0.5, -0.25, 0.0, 0.5, 1.0, 2.0})
      best = std::max(best, value(sample(g, [&](double y) { return c * y + 0.5 * a * y * y; })));
  // Potential of the computed map: phi' = x - T(x), f = -Q_1(-phi).
  const Cdf fm(mu), fn(nu);
  std::vector<double> phi(xs.size(), 0.0);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double d0 = xs[i - 1] - fn.quantile(fm.F[i - 1]);
    const double d1 = xs[i] - fn.quantile(fm.F[i]);
    phi[i] = phi[i - 1] + 0.5 * g.spacing * (d0 + d1);
  }
  std::vector<double> neg(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) neg[i] = -phi[i];
  const auto qn = hopf_lax(GridFunction(g, neg), 1.0).values;
  best = std::max(best, value(transform(qn, [](double v) { return -v; })));
  return best;
}

/// W2 between two measures sampled on a line grid.
inline TransportPair w2_quantile(const MeasureSpec& mu, const MeasureSpec& nu, const Grid& g,
                                 W2Options opt = {}, bool with_dual = false) {
  const auto dm = density_on(mu, g), dn = density_on(nu, g);
  for (const auto* d : {&dm, &dn}) {
    const double mass = integrate_dx(*d);
    require(std::abs(mass - 1) <= 1e-6, ErrorKind::invalid_argument,
            "measure is not normalized on the grid (mass " + std::to_string(mass) + ")");
  }
  TransportPair p{mu, nu, w2_squared(dm, dn, opt)};
  if (with_dual) p.dual_value = kantorovich_dual(dm, dn);
  return p;
}

namespace detail {

// Line grid covering N(mean, var) to 14 standard deviations.
inline Grid kernel_grid(double mean, double var, std::size_t points) {
  return make_grid(std::abs(mean) + 14.0 * std::sqrt(var), points);
}

// P_u h(x) and the renormalized tilt; rejects |P_u h(x) - 1| > 1e-8.
inline double tilt_mass(const Semigroup& sg, const TestFunction& h, double u, double x,
                        const GaussianExpectation& ex) {
  const double z = apply_at(sg, h.eval, u, x, ex);
  require(std::abs(z - 1) <= 1e-8, ErrorKind::invalid_argument,
          "tilt is not normalized: P_u h(x) = " + std::to_string(z));
  return z;
}

inline double tilt_entropy(const Semigroup& sg, const TestFunction& h, double u, double x,
                           double z, const GaussianExpectation& ex) {
  const double m = apply_at(
      sg, [&](double y) { const double v = h(y) / z; return v > 0 ? v * std::log(v) : 0.0; }, u,
      x, ex);
  return std::max(m, 0.0);
}

inline GridFunction tilted_density(const Grid& g, const TestFunction& h, double mean, double var,
                                   double z) {
  return sample(g, [&](double y) {
    const double d = y - mean;
    return std::max(h(y), 0.0) / z * std::exp(-0.5 * d * d / var) /
           std::sqrt(2 * std::numbers::pi * var);
  });
}

inline GridFunction gaussian_on(const Grid& g, double mean, double var) {
  return sample(g, [&](double y) {
    const double d = y - mean;
    return std::exp(-0.5 * d * d / var) / std::sqrt(2 * std::numbers::pi * var);
  });
}

}  // namespace detail

struct TransportOptions {
  double x = 0.0;
  std::size_t points = 4096;
  QuadratureOptions quadrature{};
};

/// W2^2(h P_u^x, P_u^x) <= ((1 - e^{-2 rho u})/rho) Ent_{P_u^x}(h)  (2u at rho = 0).
inline InequalityReport check_talagrand_local(double u, const TestFunction& h,
                                              const Semigroup& sg,
                                              const TransportOptions& opt = {}) {
  require(u > 0, ErrorKind::invalid_argument, "Talagrand check needs u > 0");
  require(sg.n == 1, ErrorKind::unsupported, "local Talagrand check runs on the line");
  GaussianExpectation ex(opt.quadrature);
  const double z = detail::tilt_mass(sg, h, u, opt.x, ex);
  const double ent = detail::tilt_entropy(sg, h, u, opt.x, z, ex);
  const double mean = sg.kernel_mean(opt.x, u), var = sg.kernel_variance(u);
  const Grid g = detail::kernel_grid(mean, var, opt.points);
  const double w2 = w2_squared(detail::tilted_density(g, h, mean, var, z),
                               detail::gaussian_on(g, mean, var));
  const double c = sg.rho() == 0 ? 2 * u : -std::expm1(-2 * sg.rho() * u) / sg.rho();
  auto r = make_report("talagrand-local", w2, c * ent, kGridTolerance,
                       {{"u", u}, {"x", opt.x}});
  r.subject = h.name + " / " + sg.name();
  r.extras = {{"w2_squared", w2}, {"entropy", ent}, {"constant", c}};
  return r;
}

/// W2^2(h P_{u1}^x, P_{u2}^x) <= 2 u1 (Ent_{P_{u1}^x}(h) + (n/2) A_{u2/u1}) for the
/// heat semigroup, plus the smallest margin over a u2 ladder around u1.
inline InequalityReport check_talagrand_dimensional(double u1, double u2, const TestFunction& h,
                                                    int n = 1,
                                                    const TransportOptions& opt = {}) {
  require(u1 > 0 && u2 > 0, ErrorKind::invalid_argument, "need u1, u2 > 0");
  require(n == 1, ErrorKind::unsupported, "dimensional Talagrand check runs on the line");
  const Semigroup sg = heat_semigroup(1);
  GaussianExpectation ex(opt.quadrature);
  const double z = detail::tilt_mass(sg, h, u1, opt.x, ex);
  const double ent = detail::tilt_entropy(sg, h, u1, opt.x, z, ex);
  const double v1 = 2 * u1;
  auto margin_at = [&](double w, double* w2_out) {
    const double v2 = 2 * w;
    const Grid g = make_grid(std::abs(opt.x) + 14.0 * std::sqrt(std::max(v1, v2)), opt.points);
    const double w2 = w2_squared(detail::tilted_density(g, h, opt.x, v1, z),
                                 detail::gaussian_on(g, opt.x, v2));
    if (w2_out) *w2_out = w2;
    return 2 * u1 * (ent + 0.5 * n * deficiency(w / u1).value) - w2;
  };
  double w2 = 0;
  margin_at(u2, &w2);
  const double rhs = 2 * u1 * (ent + 0.5 * n * deficiency(u2 / u1).value);
  double best = INFINITY, best_u2 = u1;
  for (int k = -8; k <= 8; ++k) {
    const double w = u1 * std::pow(2.0, 0.25 * k);
    const double m = margin_at(w, nullptr);
    if (m < best) {
      best = m;
      best_u2 = w;
    }
  }
  auto r = make_report("talagrand-dimensional", w2, rhs, kGridTolerance,
                       {{"u1", u1}, {"u2", u2}, {"x", opt.x}, {"n", static_cast<double>(n)}});
  r.subject = h.name;
  r.extras = {{"entropy", ent}, {"best_margin", best}, {"best_u2", best_u2}};
  return r;
}

enum class TalagrandMode { classical, lambda_family, optimized };

inline const char* to_string(TalagrandMode m) {
  switch (m) {
    case TalagrandMode::classical: return "classical";
    case TalagrandMode::lambda_family: return "lambda-family";
    case TalagrandMode::optimized: return "optimized";
  }
  return "unknown";
}

struct RefinedTalagrandOptions {
  double lambda = 1.0;
  /// Replace the Laplacian term by its integrated-by-parts form
  /// int |x|^2 h dgamma - n, which needs no derivatives.
  bool nonsmooth = false;
  std::size_t points = 4096;
  QuadratureOptions quadrature{};
};

/// Transport-entropy bounds for the standard Gaussian on the line:
/// classical W2^2(h gamma, gamma) <= Ent(h), the lambda family, and the
/// optimized refined form (whose right side never exceeds Ent(h)).
inline InequalityReport check_refined_talagrand(const TestFunction& h, int n,
                                                TalagrandMode mode,
                                                const RefinedTalagrandOptions& opt = {}) {
  require(n == 1, ErrorKind::unsupported, "refined Talagrand check runs on the line");
  GaussianExpectation ex(opt.quadrature);
  const double mass = ex(h.eval, 0.0, 1.0, n);
  require(std::abs(mass - 1) <= 1e-8, ErrorKind::invalid_argument,
          "h is not a probability density against gamma (mass " + std::to_string(mass) + ")");
  const double ent = ex([&](double y) { const double v = h(y) / mass; return v > 0 ? v * std::log(v) : 0.0; },
                        0.0, 1.0, n);
  const double lap =
      opt.nonsmooth
          ? ex([&](double y) { return y * y * h(y) / mass; }, 0.0, 1.0, n) - n
          : ex([&](double y) { return h.lap(y) / mass; }, 0.0, 1.0, n);
  const Grid g = make_grid(16.0, opt.points);
  const double w2 = w2_squared(detail::tilted_density(g, h, 0.0, 1.0, mass),
                               detail::gaussian_on(g, 0.0, 1.0));
  const double refined = 0.5 * lap + n * (1 - std::exp(lap / (2.0 * n) - ent / n));
  double rhs = ent;
  Params params{{"n", static_cast<double>(n)}};
  if (mode == TalagrandMode::lambda_family) {
    const double l = opt.lambda;
    require(l > 0, ErrorKind::invalid_argument, "lambda must be positive");
    rhs = l * ent + n * (1 - l + l * std::log(l)) + 0.5 * (1 - l) * lap;
    params.push_back({"lambda", l});
  } else if (mode == TalagrandMode::optimized) {
    rhs = refined;
  }
  auto r = make_report(std::string("refined-talagrand-") + to_string(mode), w2, rhs,
                       kGridTolerance, params);
  r.subject = h.name;
  r.extras = {{"w2_squared", w2}, {"entropy", ent}, {"laplacian_term", lap},
              {"refined_rhs", refined}, {"classical_rhs", ent}};
  if (refined > ent + 1e-10) {
    r.status = Status::fail;
    r.notes.push_back("refined right side exceeds the classical one");
  }
  if (opt.nonsmooth) r.notes.push_back("Laplacian term from the second moment of h");
  return r;
}

/// Var(f) <= int |grad f|^2 dgamma - (int Delta f dgamma)^2 / (2n).
inline InequalityReport check_refined_poincare(const TestFunction& f, int n,
                                               const QuadratureOptions& q = {}) {
  detail::require_dimension(f, n);
  GaussianExpectation ex(q);
  const double mean = ex(f.eval, 0.0, 1.0, n);
  const double var = ex([&](double y) { const double d = f(y) - mean; return d * d; }, 0.0, 1.0, n);
  const double grad = ex([&](double y) { const double d = f.grad(y); return d * d; }, 0.0, 1.0, n);
  const double lap = ex([&](double y) { return f.lap(y); }, 0.0, 1.0, n);
  const double improvement = lap * lap / (2.0 * n);
  auto r = make_report("refined-poincare", var, grad - improvement, kGridTolerance,
                       {{"n", static_cast<double>(n)}});
  r.subject = f.name;
  r.extras = {{"variance", var}, {"dirichlet", grad}, {"improvement", improvement}};
  return r;
}

}  // namespace hyperlab
