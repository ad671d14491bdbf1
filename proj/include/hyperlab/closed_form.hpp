#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "hyperlab/error.hpp"

namespace hyperlab {

/// scale * exp(a |x|^2 + b x_1) on R^n. Square-exponentials have b = 0,
/// exponentials of linear functions have a = 0.
struct GaussExp {
  double scale = 1.0;
  double a = 0.0;
  double b = 0.0;
  int n = 1;

  double operator()(double x) const { return scale * std::exp(a * x * x + b * x); }
};

/// Polynomial sum_k c_k x^k on the line.
struct Polynomial {
  std::vector<double> coeffs;

  double operator()(double x) const {
    double s = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) s = s * x + coeffs[k];
    return s;
  }
};

/// Analytic function family closed under the Gaussian semigroups.
struct ClosedForm {
  std::variant<GaussExp, Polynomial> form;

  double operator()(double x) const {
    return std::visit([x](const auto& f) { return f(x); }, form);
  }
  int dimension() const {
    if (auto* g = std::get_if<GaussExp>(&form)) return g->n;
    return 1;
  }
};

inline ClosedForm square_exponential(double a, int n = 1) { return {GaussExp{1.0, a, 0.0, n}}; }
inline ClosedForm exp_linear(double c) { return {GaussExp{1.0, 0.0, c, 1}}; }
inline ClosedForm linear(double slope) { return {Polynomial{{0.0, slope}}}; }
inline ClosedForm polynomial(std::vector<double> coeffs) { return {Polynomial{std::move(coeffs)}}; }

namespace detail {

// E exp(a|m + sqrt(v) Y|^2 + b (m_1 + sqrt(v) Y_1)) written as a GaussExp in
// the affine argument m = alpha x.
inline GaussExp gauss_exp_expect(const GaussExp& f, double alpha, double v,
                                 const char* what, double time_scale) {
  const double d = 1.0 - 2.0 * f.a * v;
  if (!(d > 0.0)) {
    std::ostringstream msg;
    msg << what << ": 1-4ta <= 0, the square-exponential blows up at t = "
        << (f.a > 0 ? time_scale / (4.0 * f.a) : INFINITY);
    fail(ErrorKind::blow_up, msg.str());
  }
  GaussExp g;
  g.n = f.n;
  g.a = f.a * alpha * alpha / d;
  g.b = f.b * alpha / d;
  g.scale = f.scale * std::pow(d, -0.5 * f.n) * std::exp(0.5 * v * f.b * f.b / d);
  return g;
}

inline double double_factorial_odd(int k) {
  double r = 1.0;
  for (int j = k; j > 1; j -= 2) r *= j;
  return r;
}

// Coefficients of x -> E p(alpha x + sqrt(v) Y).
inline Polynomial poly_expect(const Polynomial& p, double alpha, double v) {
  const std::size_t deg = p.coeffs.size();
  std::vector<double> out(deg, 0.0);
  for (std::size_t k = 0; k < deg; ++k) {
    double binom = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      if (j > 0) binom = binom * static_cast<double>(k - j + 1) / static_cast<double>(j);
      if (j % 2 == 1) continue;
      const double moment = double_factorial_odd(static_cast<int>(j) - 1) *
                            std::pow(v, 0.5 * static_cast<double>(j));
      out[k - j] += p.coeffs[k] * binom * moment * std::pow(alpha, static_cast<double>(k - j));
    }
  }
  return Polynomial{out};
}

inline ClosedForm expect(const ClosedForm& f, double alpha, double v, const char* what,
                         double time_scale) {
  if (auto* g = std::get_if<GaussExp>(&f.form))
    return {gauss_exp_expect(*g, alpha, v, what, time_scale)};
  return {poly_expect(std::get<Polynomial>(f.form), alpha, v)};
}

}  // namespace detail

/// Exact heat propagation P_t f, kernel variance 2t.
inline ClosedForm heat(const ClosedForm& f, double t) {
  require(t >= 0, ErrorKind::invalid_argument, "heat time must be nonnegative");
  if (t == 0) return f;
  return detail::expect(f, 1.0, 2.0 * t, "heat propagation", 1.0);
}

/// Exact Mehler propagation N_t f.
inline ClosedForm ou(const ClosedForm& f, double t) {
  require(t >= 0, ErrorKind::invalid_argument, "OU time must be nonnegative");
  if (t == 0) return f;
  return detail::expect(f, std::exp(-t), -std::expm1(-2.0 * t), "OU propagation", 2.0);
}

/// x -> f(e^{d/2} x).
inline ClosedForm dilate(const ClosedForm& f, double d) {
  const double c = std::exp(0.5 * d);
  if (auto* g = std::get_if<GaussExp>(&f.form)) {
    GaussExp r = *g;
    r.a *= c * c;
    r.b *= c;
    return {r};
  }
  Polynomial p = std::get<Polynomial>(f.form);
  double ck = 1.0;
  for (auto& coeff : p.coeffs) {
    coeff *= ck;
    ck *= c;
  }
  return {p};
}

/// f^q for the exponential family.
inline GaussExp power(const GaussExp& f, double q) {
  require(f.scale > 0, ErrorKind::domain, "power of a non-positive closed form");
  return GaussExp{std::pow(f.scale, q), q * f.a, q * f.b, f.n};
}

/// Integral of f against the standard Gaussian measure of dimension f.n.
inline double gaussian_mean(const GaussExp& f) {
  const double d = 1.0 - 2.0 * f.a;
  require(d > 0, ErrorKind::blow_up, "square-exponential not integrable against gamma");
  return f.scale * std::pow(d, -0.5 * f.n) * std::exp(0.5 * f.b * f.b / d);
}

}  // namespace hyperlab
