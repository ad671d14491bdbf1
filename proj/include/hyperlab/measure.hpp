#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "hyperlab/error.hpp"
#include "hyperlab/fourier.hpp"
#include "hyperlab/grid.hpp"

namespace hyperlab {

struct Gaussian {
  double mean = 0.0;
  double variance = 1.0;
  int n = 1;
};

/// Law of the OU process started at x after time t: N(e^{-t}x, 1-e^{-2t}).
struct OUKernel {
  double x = 0.0;
  double t = 1.0;
  int n = 1;
};

/// Symmetric alpha-stable law with characteristic function e^{-t|xi|^alpha}.
struct StableLaw {
  double alpha = 2.0;
  double t = 1.0;
  int n = 1;
};

/// Probability density with respect to Lebesgue measure, sampled on a grid.
struct GridDensity {
  GridFunction density;
};

struct MeasureSpec {
  std::variant<Gaussian, OUKernel, StableLaw, GridDensity> variant;
};

inline MeasureSpec standard_gaussian(int n = 1) { return {Gaussian{0.0, 1.0, n}}; }

inline MeasureSpec gaussian(double mean, double variance, int n = 1) {
  require(variance > 0 && std::isfinite(variance), ErrorKind::invalid_argument,
          "Gaussian variance must be positive");
  require(n >= 1, ErrorKind::invalid_argument, "dimension must be >= 1");
  return {Gaussian{mean, variance, n}};
}

inline MeasureSpec ou_kernel(double x, double t, int n = 1) {
  require(t > 0, ErrorKind::invalid_argument, "OU kernel time must be positive");
  return {OUKernel{x, t, n}};
}

inline MeasureSpec stable_law(double alpha, double t, int n = 1) {
  require(alpha > 0 && alpha <= 2, ErrorKind::invalid_argument,
          "stable index must lie in (0, 2]");
  require(t > 0, ErrorKind::invalid_argument, "stable time must be positive");
  require(n == 1, ErrorKind::unsupported, "stable laws are realized on the line only");
  return {StableLaw{alpha, t, n}};
}

inline MeasureSpec grid_density(GridFunction density) {
  const double mass = integrate_dx(density);
  double lo = 0.0;
  for (double v : density.values()) lo = std::min(lo, v);
  require(lo >= -1e-12 * density.max_abs(), ErrorKind::invalid_argument,
          "grid density has negative values");
  require(std::abs(mass - 1.0) <= 1e-8, ErrorKind::invalid_argument,
          "grid density mass " + std::to_string(mass) + " differs from 1");
  return {GridDensity{std::move(density)}};
}

/// Stable density e^{-t|xi|^alpha} inverted on the grid (padding controls
/// the periodic image error, which decays like t / period^{1+alpha}).
inline GridFunction stable_density(double alpha, double t, const Grid& g,
                                   std::size_t padding = 8) {
  require(alpha > 0 && alpha <= 2, ErrorKind::invalid_argument,
          "stable index must lie in (0, 2]");
  require(t > 0, ErrorKind::invalid_argument, "stable time must be positive");
  return kernel_on_grid(
      g, [=](double xi) { return std::exp(-t * std::pow(std::abs(xi), alpha)); }, padding);
}

namespace detail {

inline double gaussian_density(double x, double mean, double var, const Grid& g, int n) {
  if (!g.radial()) {
    const double d = x - mean;
    return std::exp(-0.5 * d * d / var) / std::sqrt(2 * std::numbers::pi * var);
  }
  require(mean == 0.0, ErrorKind::unsupported,
          "radial grids carry centered Gaussians only");
  require(n == g.dimension, ErrorKind::shape_mismatch,
          "measure dimension differs from the radial grid dimension");
  return std::exp(-0.5 * x * x / var) * std::pow(2 * std::numbers::pi * var, -0.5 * n);
}

}  // namespace detail

/// Density of m at the nodes of g (against dx on line grids, against
/// Lebesgue measure of R^n on radial grids).
inline GridFunction density_on(const MeasureSpec& m, const Grid& g) {
  return std::visit(
      [&](const auto& v) -> GridFunction {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return sample(g, [&](double x) {
            return detail::gaussian_density(x, v.mean, v.variance, g, v.n);
          });
        } else if constexpr (std::is_same_v<T, OUKernel>) {
          const double mean = std::exp(-v.t) * v.x;
          const double var = -std::expm1(-2 * v.t);
          return sample(g, [&](double x) {
            return detail::gaussian_density(x, mean, var, g, v.n);
          });
        } else if constexpr (std::is_same_v<T, StableLaw>) {
          require(!g.radial(), ErrorKind::unsupported, "stable laws need a line grid");
          return stable_density(v.alpha, v.t, g);
        } else {
          require(v.density.grid() == g, ErrorKind::shape_mismatch,
                  "grid density lives on a different grid");
          return v.density;
        }
      },
      m.variant);
}

/// Quadrature value of the integral of f against m.
inline double integrate(const GridFunction& f, const MeasureSpec& m) {
  const auto rho = density_on(m, f.grid());
  return integrate_dx(combine(f, rho, [](double a, double b) { return a * b; }));
}

}  // namespace hyperlab
