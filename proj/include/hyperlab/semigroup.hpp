#pragma once

#include <cmath>
#include <string>

#include "hyperlab/closed_form.hpp"
#include "hyperlab/error.hpp"
#include "hyperlab/fourier.hpp"
#include "hyperlab/grid.hpp"
#include "hyperlab/quadrature.hpp"

namespace hyperlab {

enum class SemigroupKind { heat, ou };

/// Heat semigroup of the Laplacian on R^n (CD(0,n)) or the OU semigroup
/// (CD(1,inf)). Both kernels are Gaussian: P_t(x, .) = N(mean, var).
struct Semigroup {
  SemigroupKind kind = SemigroupKind::heat;
  int n = 1;

  double rho() const { return kind == SemigroupKind::heat ? 0.0 : 1.0; }
  double kernel_mean(double x, double t) const {
    return kind == SemigroupKind::heat ? x : std::exp(-t) * x;
  }
  double kernel_variance(double t) const {
    return kind == SemigroupKind::heat ? 2.0 * t : -std::expm1(-2.0 * t);
  }
  std::string name() const {
    return (kind == SemigroupKind::heat ? "heat(n=" : "ou(n=") + std::to_string(n) + ")";
  }
};

inline Semigroup heat_semigroup(int n = 1) { return {SemigroupKind::heat, n}; }
inline Semigroup ou_semigroup(int n = 1) { return {SemigroupKind::ou, n}; }

inline void check_time(double t) {
  require(t >= 0 && std::isfinite(t), ErrorKind::invalid_argument,
          "semigroup time must be nonnegative, got " + std::to_string(t));
}

/// P_t g(x) for a function given pointwise (radial in dimension n > 1).
inline double apply_at(const Semigroup& sg, const RealFn& g, double t, double x,
                       const GaussianExpectation& ex) {
  check_time(t);
  return ex(g, sg.kernel_mean(x, t), sg.kernel_variance(t), sg.n);
}

inline double heat_at(const RealFn& g, double t, double x, int n,
                      const GaussianExpectation& ex) {
  return apply_at(heat_semigroup(n), g, t, x, ex);
}

inline double ou_at(const RealFn& g, double t, double x, int n,
                    const GaussianExpectation& ex) {
  return apply_at(ou_semigroup(n), g, t, x, ex);
}

/// Heat flow of a closed form (exact parameter propagation).
inline ClosedForm heat_apply(const ClosedForm& f, double t) { return heat(f, t); }

/// Heat flow on a grid: spectral multiplier e^{-t xi^2} after removing the
/// affine part (which the heat flow fixes) on line grids, Bessel-kernel
/// quadrature on radial grids.
inline GridFunction heat_apply(const GridFunction& f, double t,
                               Diagnostics* diag = nullptr, std::size_t padding = 1) {
  check_time(t);
  if (t == 0) return f;
  const Grid& g = f.grid();
  if (!g.radial()) {
    return fourier_multiplier(f, [t](double xi) { return std::exp(-t * xi * xi); },
                              {padding, Detrend::affine, diag});
  }
  GaussianExpectation ex({g.points, 10.0});
  const auto fn = as_function(f, diag);
  return sample(g, [&](double r) { return ex(fn, r, 2 * t, g.dimension); });
}

/// Mehler propagation of a closed form.
inline ClosedForm ou_apply(const ClosedForm& f, double t) { return ou(f, t); }

/// Mehler formula at every node, by Gaussian quadrature in Y.
inline GridFunction ou_apply(const GridFunction& f, double t, Diagnostics* diag = nullptr) {
  check_time(t);
  if (t == 0) return f;
  const Grid& g = f.grid();
  GaussianExpectation ex({g.points, 10.0});
  const auto fn = as_function(f, diag);
  const Semigroup sg = ou_semigroup(g.radial() ? g.dimension : 1);
  return sample(g, [&](double x) { return apply_at(sg, fn, t, x, ex); });
}

/// x -> f(e^{a/2} x).
inline ClosedForm dilation_apply(const ClosedForm& f, double a) { return dilate(f, a); }

inline GridFunction dilation_apply(const GridFunction& f, double a,
                                   Diagnostics* diag = nullptr) {
  if (a == 0) return f;
  const double c = std::exp(0.5 * a);
  return sample(f.grid(), [&](double x) { return interpolate(f, c * x, diag); });
}

inline RealFn dilation_apply(RealFn f, double a) {
  const double c = std::exp(0.5 * a);
  return [f = std::move(f), c](double x) { return f(c * x); };
}

/// N_t = T_{-2t} P_b with b = (1 - e^{-2t})/2, closed-form route.
inline ClosedForm ou_from_heat(const ClosedForm& f, double t) {
  check_time(t);
  return dilate(heat(f, -0.5 * std::expm1(-2 * t)), -2 * t);
}

/// Same composition on a grid: spectral heat flow, then dilation by
/// interpolation. Independent of the quadrature used by ou_apply.
inline GridFunction ou_from_heat(const GridFunction& f, double t,
                                 Diagnostics* diag = nullptr) {
  check_time(t);
  if (t == 0) return f;
  return dilation_apply(heat_apply(f, -0.5 * std::expm1(-2 * t), diag), -2 * t, diag);
}

/// Pointwise composition for functions given by evaluation.
inline double ou_from_heat(const RealFn& f, double t, double x, int n,
                           const GaussianExpectation& ex) {
  check_time(t);
  const double b = -0.5 * std::expm1(-2 * t);
  return heat_at(f, b, std::exp(-t) * x, n, ex);
}

/// Mehler kernel: density of N_t(x, .) against the standard Gaussian at y,
/// for points on a common line through the origin (|x|, |y| and x.y = xy).
inline double mehler_density(double t, double x, double y, int n) {
  require(t > 0, ErrorKind::invalid_argument, "Mehler kernel needs t > 0");
  const double e1 = std::exp(-t);
  const double v = -std::expm1(-2 * t);
  const double expo = -(e1 * e1 * (x * x + y * y) - 2 * e1 * x * y) / (2 * v);
  return std::pow(v, -0.5 * n) * std::exp(expo);
}

/// n_t(x, x).
inline double ou_kernel_diagonal(double t, double x, int n) {
  require(t > 0, ErrorKind::invalid_argument, "kernel diagonal needs t > 0");
  if (std::isinf(t)) return 1.0;
  return mehler_density(t, x, x, n);
}

/// V_t(y) = (1-e^{-4t})^{-n/4} exp(|y|^2 / (2(1+e^{2t}))).
inline double nash_weight(double t, double y, double n) {
  require(t > 0, ErrorKind::invalid_argument, "Nash weight needs t > 0");
  return std::pow(-std::expm1(-4 * t), -0.25 * n) *
         std::exp(y * y / (2 * (1 + std::exp(2 * t))));
}

}  // namespace hyperlab
