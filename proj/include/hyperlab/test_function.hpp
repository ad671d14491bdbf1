#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "hyperlab/closed_form.hpp"
#include "hyperlab/grid.hpp"
#include "hyperlab/quadrature.hpp"

namespace hyperlab {

/// A function handed to the checkers: pointwise evaluation plus, when
/// available, an exact closed form and exact derivatives. In dimension
/// n > 1 the function is radial and eval receives |x|.
struct TestFunction {
  std::string name;
  RealFn eval;
  std::optional<ClosedForm> closed;
  RealFn gradient;   // radial derivative; empty = finite differences
  RealFn laplacian;  // empty = finite differences
  int n = 1;
  bool positive = true;
  bool lipschitz = false;

  double operator()(double x) const { return eval(x); }

  /// f'(x) (radial derivative for n > 1).
  double grad(double x) const {
    if (gradient) return gradient(x);
    const double h = 1e-3 * std::max(1.0, std::abs(x));
    return (eval(x - 2 * h) - 8 * eval(x - h) + 8 * eval(x + h) - eval(x + 2 * h)) / (12 * h);
  }

  /// Laplacian in dimension n (f'' + (n-1) f'/r for radial functions).
  double lap(double x) const {
    if (laplacian) return laplacian(x);
    const double h = 1e-3 * std::max(1.0, std::abs(x));
    const double d2 = (-eval(x - 2 * h) + 16 * eval(x - h) - 30 * eval(x) +
                       16 * eval(x + h) - eval(x + 2 * h)) /
                      (12 * h * h);
    if (n == 1) return d2;
    if (std::abs(x) < 1e-12) return n * d2;
    return d2 + (n - 1) * grad(x) / x;
  }
};

inline TestFunction from_closed(std::string name, const ClosedForm& cf) {
  TestFunction f;
  f.name = std::move(name);
  f.closed = cf;
  f.eval = [cf](double x) { return cf(x); };
  f.n = cf.dimension();
  if (auto* g = std::get_if<GaussExp>(&cf.form)) {
    const GaussExp e = *g;
    require(e.n == 1 || e.b == 0, ErrorKind::unsupported,
            "tilted exponentials are line functions");
    f.gradient = [e](double x) { return (2 * e.a * x + e.b) * e(x); };
    f.laplacian = [e](double x) {
      const double d = 2 * e.a * x + e.b;
      return (d * d + 2 * e.a * e.n) * e(x);
    };
    f.positive = e.scale > 0;
  } else {
    const auto& c = std::get<Polynomial>(cf.form).coeffs;
    Polynomial d1, d2;
    for (std::size_t k = 1; k < c.size(); ++k) d1.coeffs.push_back(static_cast<double>(k) * c[k]);
    for (std::size_t k = 1; k < d1.coeffs.size(); ++k)
      d2.coeffs.push_back(static_cast<double>(k) * d1.coeffs[k]);
    f.gradient = [d1](double x) { return d1(x); };
    f.laplacian = [d2](double x) { return d2(x); };
    f.positive = false;
  }
  return f;
}

inline TestFunction from_function(std::string name, RealFn fn, int n = 1, bool positive = true) {
  TestFunction f;
  f.name = std::move(name);
  f.eval = std::move(fn);
  f.n = n;
  f.positive = positive;
  return f;
}

/// Grid samples evaluated by interpolation (clamped outside the grid).
inline TestFunction from_grid(std::string name, const GridFunction& g,
                              Diagnostics* diag = nullptr) {
  TestFunction f;
  f.name = std::move(name);
  f.eval = as_function(g, diag);
  f.n = g.grid().radial() ? g.grid().dimension : 1;
  f.positive = g.strictly_positive();
  return f;
}

}  // namespace hyperlab
