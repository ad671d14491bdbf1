#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hyperlab/error.hpp"
#include "hyperlab/grid.hpp"
#include "hyperlab/measure.hpp"
#include "hyperlab/quadrature.hpp"
#include "hyperlab/semigroup.hpp"

namespace hyperlab {

namespace detail {

inline void require_positive(const GridFunction& f, const char* what) {
  if (!f.strictly_positive())
    fail(ErrorKind::domain, std::string(what) + " needs a strictly positive function");
}

inline GridFunction weighted(const GridFunction& f, const MeasureSpec& m) {
  const auto rho = density_on(m, f.grid());
  return combine(f, rho, [](double a, double b) { return a * b; });
}

}  // namespace detail

/// Ent_m(f) = m(f log f) - m(f) log m(f).
inline double entropy(const MeasureSpec& m, const GridFunction& f) {
  detail::require_positive(f, "entropy");
  const double mf = integrate(f, m);
  const double mflogf = integrate(transform(f, [](double v) { return v * std::log(v); }), m);
  const double ent = mflogf - mf * std::log(mf);
  if (ent < -1e-10 * (std::abs(mflogf) + 1.0))
    fail(ErrorKind::numeric, "negative entropy " + std::to_string(ent));
  return std::max(ent, 0.0);
}

/// Entropy of f under the kernel measure P_t(x, .).
inline double entropy_at(const Semigroup& sg, const RealFn& f, double t, double x,
                         const GaussianExpectation& ex) {
  const double pf = apply_at(sg, f, t, x, ex);
  const double pflogf = apply_at(
      sg, [&](double y) { const double v = f(y); return v > 0 ? v * std::log(v) : 0.0; }, t,
      x, ex);
  return std::max(pflogf - pf * std::log(pf), 0.0);
}

/// m(f^q)^{1/q}, computed in the log domain so that negative q and extreme
/// values stay representable; the result may be +inf or 0 at the range
/// limits, never NaN.
inline double lq_mean(const MeasureSpec& m, const GridFunction& f, double q) {
  require(q != 0 && std::isfinite(q), ErrorKind::invalid_argument, "L^q mean needs q != 0");
  if (q == 1) return integrate(f, m);
  const bool integer_q = q == std::round(q) && q > 0;
  if (!integer_q) detail::require_positive(f, "fractional or negative L^q mean");
  if (integer_q && !f.strictly_positive()) {
    const double s = integrate(transform(f, [q](double v) { return std::pow(v, q); }), m);
    return std::pow(s, 1.0 / q);
  }
  const auto rho = density_on(m, f.grid());
  const Grid& g = f.grid();
  const auto w = quadrature_weights(g);
  const double area = g.radial() ? sphere_area(g.dimension) : 1.0;
  std::vector<double> logs;
  logs.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double wi = w[i] * rho[i] * area;
    if (g.radial()) wi *= std::pow(g.node(i), g.dimension - 1);
    if (wi > 0) logs.push_back(q * std::log(f[i]) + std::log(wi));
  }
  require(!logs.empty(), ErrorKind::numeric, "L^q mean over an empty support");
  const double mx = *std::max_element(logs.begin(), logs.end());
  double s = 0.0;
  for (double l : logs) s += std::exp(l - mx);
  return std::exp((mx + std::log(s)) / q);
}

/// P_t(f^q)^{1/q}(x).
inline double lq_mean_at(const Semigroup& sg, const RealFn& f, double q, double t,
                         double x, const GaussianExpectation& ex) {
  require(q != 0 && std::isfinite(q), ErrorKind::invalid_argument, "L^q mean needs q != 0");
  const double s = apply_at(sg, [&](double y) { return std::pow(f(y), q); }, t, x, ex);
  return std::pow(s, 1.0 / q);
}

/// Gamma(f) = |grad f|^2.
inline GridFunction carre_du_champ(const GridFunction& f, FdOrder order = FdOrder::second) {
  return transform(fd_gradient(f, order), [](double d) { return d * d; });
}

enum class Generator { laplacian, ou };

/// Generator applied by finite differences: Delta f (radial on radial
/// grids) or Delta f - x.grad f.
inline GridFunction apply_generator(const GridFunction& f, Generator gen,
                                    FdOrder order = FdOrder::fourth) {
  auto lap = fd_laplacian(f, order);
  if (gen == Generator::laplacian) return lap;
  const auto grad = fd_gradient(f, order);
  const Grid& g = f.grid();
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = lap[i] - g.node(i) * grad[i];
  return GridFunction(g, std::move(v));
}

/// Nodes excluded at each non-reflected boundary when reading Gamma_2.
inline constexpr std::size_t kGamma2Margin = 8;

/// Gamma_2(f) = (L Gamma(f) - 2 Gamma(f, Lf)) / 2, from the definition,
/// with fourth-order differences. Values within kGamma2Margin nodes of an
/// outer boundary are not meaningful.
inline GridFunction gamma2(const GridFunction& f, Generator gen) {
  require(f.size() > 2 * kGamma2Margin + 1, ErrorKind::invalid_argument,
          "grid too small for the Gamma_2 interior margin");
  const auto grad = fd_gradient(f, FdOrder::fourth);
  const auto gam = transform(grad, [](double d) { return d * d; });
  const auto lgam = apply_generator(gam, gen);
  const auto lf = apply_generator(f, gen);
  const auto glf = fd_gradient(lf, FdOrder::fourth);
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * lgam[i] - grad[i] * glf[i];
  return GridFunction(f.grid(), std::move(v));
}

struct DeficiencyValue {
  double lambda = 1.0;
  double value = 0.0;
};

/// A_lambda = lambda - 1 - log lambda.
inline DeficiencyValue deficiency(double lambda) {
  require(lambda > 0 && std::isfinite(lambda), ErrorKind::invalid_argument,
          "deficiency needs lambda > 0");
  const double d = lambda - 1.0;
  return {lambda, std::max(0.0, d - std::log1p(d))};
}

/// m(f^2) - m(f)^2.
inline double variance(const MeasureSpec& m, const GridFunction& f) {
  const double mean = integrate(f, m);
  const double var = integrate(transform(f, [mean](double v) { return (v - mean) * (v - mean); }), m);
  if (!std::isfinite(var)) fail(ErrorKind::numeric, "non-finite variance");
  return var;
}

}  // namespace hyperlab
