#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "hyperlab/error.hpp"
#include "hyperlab/grid.hpp"

namespace hyperlab {

using RealFn = std::function<double(double)>;

/// Evaluates a grid function anywhere by six-point interpolation.
inline RealFn as_function(const GridFunction& f, Diagnostics* diag = nullptr) {
  return [f, diag](double x) { return interpolate(f, x, diag); };
}

/// Nodes and weights of a quadrature rule.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard Gaussian measure (weights sum to 1),
/// computed by Newton iteration on the orthonormal Hermite recurrence.
inline Rule gauss_hermite(std::size_t m) {
  require(m >= 1 && m <= 400, ErrorKind::invalid_argument,
          "Gauss-Hermite order must lie in [1, 400]");
  Rule rule;
  rule.nodes.assign(m, 0.0);
  rule.weights.assign(m, 0.0);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const std::size_t half = (m + 1) / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    const double md = static_cast<double>(m);
    if (i == 0) z = std::sqrt(2 * md + 1) - 1.85575 * std::pow(2 * md + 1, -0.16667);
    else if (i == 1) z -= 1.14 * std::pow(md, 0.426) / z;
    else if (i == 2) z = 1.86 * z - 0.86 * rule.nodes[0];
    else if (i == 3) z = 1.91 * z - 0.91 * rule.nodes[1];
    else z = 2.0 * z - rule.nodes[i - 2];
    double pp = 0.0;
    int it = 0;
    for (; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (std::size_t j = 1; j <= m; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / jd) * p2 - std::sqrt((jd - 1.0) / jd) * p3;
      }
      pp = std::sqrt(2.0 * md) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    if (it == 100) fail(ErrorKind::convergence, "Gauss-Hermite Newton iteration stalled");
    rule.nodes[i] = z;
    rule.nodes[m - 1 - i] = -z;
    rule.weights[i] = rule.weights[m - 1 - i] = 2.0 / (pp * pp);
  }
  // Physicists' weights for e^{-z^2}; map to the standard normal.
  for (std::size_t i = 0; i < m; ++i) {
    rule.nodes[i] *= std::numbers::sqrt2;
    rule.weights[i] /= std::sqrt(std::numbers::pi);
  }
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

/// e^{-z} z^{-nu} I_nu(z), finite and positive for all z >= 0.
inline double scaled_bessel_ratio(double nu, double z) {
  if (z < 1e-12) return std::pow(2.0, -nu) / std::tgamma(nu + 1.0);
  if (z <= 40.0) {
    const double q = 0.25 * z * z;
    double term = 1.0 / std::tgamma(nu + 1.0);
    double sum = term;
    for (int k = 1; k < 500; ++k) {
      term *= q / (k * (k + nu));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sum * std::pow(2.0, -nu) * std::exp(-z);
  }
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (k * 8.0 * z);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * z) * std::pow(z, -nu);
}

struct QuadratureOptions {
  std::size_t points = 1024;
  double half_width = 10.0;
  double max_half_width = 60.0;
};

/// Expectations E g(m + sqrt(v) Y) against Gaussian kernels. In dimension
/// n > 1 the function is radial, g(x) = g(|x|), and the center is a radius.
/// The integration window is widened until the tail contribution is below
/// 1e-17 of the total, so growing integrands such as e^{a|x|^2} are handled.
class GaussianExpectation {
 public:
  explicit GaussianExpectation(QuadratureOptions opts = {}) : opts_(opts) {
    require(opts_.points >= kMinGridPoints, ErrorKind::invalid_argument,
            "quadrature needs at least 8 points");
    require(opts_.half_width > 0, ErrorKind::invalid_argument,
            "quadrature half width must be positive");
  }

  const QuadratureOptions& options() const { return opts_; }

  double operator()(const RealFn& g, double mean, double var, int n = 1) const {
    require(var >= 0 && std::isfinite(var), ErrorKind::invalid_argument,
            "kernel variance must be nonnegative");
    require(n >= 1, ErrorKind::invalid_argument, "dimension must be >= 1");
    if (var == 0.0) return g(n == 1 ? mean : std::abs(mean));
    const double sd = std::sqrt(var);
    double width = opts_.half_width;
    double value = 0.0;
    for (;;) {
      const auto steps = static_cast<std::size_t>(
          std::ceil(static_cast<double>(opts_.points - 1) * width / opts_.half_width));
      double tail = 0.0;
      value = n == 1 ? line(g, mean, sd, width, steps + 1, tail)
                     : radial(g, std::abs(mean), sd, n, width, steps + 1, tail);
      if (!std::isfinite(value))
        fail(ErrorKind::numeric, "non-finite Gaussian expectation");
      if (tail <= 1e-17 * std::abs(value) || width >= opts_.max_half_width) break;
      width = std::min(1.5 * width, opts_.max_half_width);
    }
    return value;
  }

 private:
  static double line(const RealFn& g, double mean, double sd, double width,
                     std::size_t m, double& tail) {
    const double h = 2 * width / static_cast<double>(m - 1);
    double sum = 0.0, wsum = 0.0;
    tail = 0.0;
    const std::size_t edge = std::max<std::size_t>(2, m / 40);
    for (std::size_t j = 0; j < m; ++j) {
      const double y = -width + static_cast<double>(j) * h;
      double w = std::exp(-0.5 * y * y);
      if (j == 0 || j + 1 == m) w *= 0.5;
      const double v = w * g(mean + sd * y);
      sum += v;
      wsum += w;
      if (j < edge || j + edge >= m) tail += std::abs(v);
    }
    tail /= wsum;
    return sum / wsum;
  }

  // Radial kernel: density of |c e1 + sd Y| in dimension n at radius rho.
  static double radial(const RealFn& g, double c, double sd, int n, double width,
                       std::size_t m, double& tail) {
    const double nu = 0.5 * n - 1.0;
    const double lo = std::max(0.0, c - width * sd);
    const double hi = c + width * sd;
    const double h = (hi - lo) / static_cast<double>(m - 1);
    std::vector<double> w(m, h);
    w.front() *= 0.5;
    w.back() *= 0.5;
    if (lo == 0.0 && n % 2 == 0)
      for (std::size_t j = 0; j < detail::kGregoryLeft.size(); ++j)
        w[j] += h * detail::kGregoryLeft[j];
    const double v = sd * sd;
    double sum = 0.0, wsum = 0.0;
    tail = 0.0;
    const std::size_t edge = std::max<std::size_t>(2, m / 40);
    for (std::size_t j = 0; j < m; ++j) {
      const double rho = lo + static_cast<double>(j) * h;
      const double z = c * rho / v;
      const double d = rho - c;
      const double k = std::exp(-0.5 * d * d / v) * scaled_bessel_ratio(nu, z) *
                       std::pow(rho / sd, n - 1);
      const double wk = w[j] * k;
      const double val = wk * g(rho);
      sum += val;
      wsum += wk;
      if (j + edge >= m || (lo > 0.0 && j < edge)) tail += std::abs(val);
    }
    tail /= wsum;
    return sum / wsum;
  }

  QuadratureOptions opts_;
};

}  // namespace hyperlab
