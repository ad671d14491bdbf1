#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hyperlab/closed_form.hpp"
#include "hyperlab/grid.hpp"
#include "hyperlab/test_function.hpp"

namespace hyperlab {

/// c + sum_k w_k exp(-(x - m_k)^2 / (2 s_k^2)), with exact derivatives.
struct Mixture {
  double floor = 0.0;
  std::vector<double> weights, means, widths;

  double operator()(double x) const {
    double v = floor;
    for (std::size_t k = 0; k < weights.size(); ++k) v += weights[k] * bump(k, x);
    return v;
  }
  double d1(double x) const {
    double v = 0;
    for (std::size_t k = 0; k < weights.size(); ++k)
      v -= weights[k] * (x - means[k]) / (widths[k] * widths[k]) * bump(k, x);
    return v;
  }
  double d2(double x) const {
    double v = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      const double s2 = widths[k] * widths[k];
      const double z = (x - means[k]) / s2;
      v += weights[k] * (z * z - 1 / s2) * bump(k, x);
    }
    return v;
  }

 private:
  double bump(std::size_t k, double x) const {
    const double z = (x - means[k]) / widths[k];
    return std::exp(-0.5 * z * z);
  }
};

inline TestFunction from_mixture(std::string name, const Mixture& m) {
  TestFunction f;
  f.name = std::move(name);
  f.eval = [m](double x) { return m(x); };
  f.gradient = [m](double x) { return m.d1(x); };
  f.laplacian = [m](double x) { return m.d2(x); };
  f.positive = m.floor > 0;
  f.lipschitz = true;
  return f;
}

/// 1 + c e^{-x^2}.
inline TestFunction bump(double c = 0.2) {
  return from_mixture("bump(" + std::to_string(c) + ")",
                      Mixture{1.0, {c}, {0.0}, {std::sqrt(0.5)}});
}

/// 1 + c x^2.
inline TestFunction quadratic_bump(double c = 0.1) {
  TestFunction f = from_function("1+" + std::to_string(c) + "x^2",
                                 [c](double x) { return 1 + c * x * x; });
  f.gradient = [c](double x) { return 2 * c * x; };
  f.laplacian = [c](double) { return 2 * c; };
  return f;
}

/// 1 + x^2 / (1 + x^2/4): quadratic near 0, capped at 5.
inline TestFunction capped_quadratic() {
  TestFunction f = from_function("capped-quadratic", [](double x) { return 1 + x * x / (1 + 0.25 * x * x); });
  f.gradient = [](double x) {
    const double u = 1 + 0.25 * x * x;
    return 2 * x / (u * u);
  };
  f.laplacian = [](double x) {
    const double u = 1 + 0.25 * x * x;
    return 2 / (u * u) - 2 * x * x / (u * u * u);
  };
  f.lipschitz = true;
  return f;
}

/// sqrt(1 + x^2), a smoothed |x|.
inline TestFunction smooth_kink() {
  TestFunction f = from_function("sqrt(1+x^2)", [](double x) { return std::sqrt(1 + x * x); });
  f.gradient = [](double x) { return x / std::sqrt(1 + x * x); };
  f.laplacian = [](double x) { return std::pow(1 + x * x, -1.5); };
  f.lipschitz = true;
  return f;
}

/// Seeded random mixtures: floor in [0.2, 1], two or three bumps.
inline std::vector<TestFunction> random_mixtures(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TestFunction> out;
  for (int i = 0; i < count; ++i) {
    Mixture m;
    m.floor = 0.2 + 0.8 * u(rng);
    const int k = 2 + static_cast<int>(u(rng) * 2);
    for (int j = 0; j < k; ++j) {
      m.weights.push_back(0.1 + 0.9 * u(rng));
      m.means.push_back(-2 + 4 * u(rng));
      m.widths.push_back(0.4 + 1.2 * u(rng));
    }
    out.push_back(from_mixture("mixture#" + std::to_string(i), m));
  }
  return out;
}

/// Positive line functions used by the hypercontractivity checks.
inline std::vector<TestFunction> default_corpus(std::uint64_t seed = 7, int random_count = 2) {
  std::vector<TestFunction> c;
  c.push_back(bump(0.2));
  c.push_back(from_mixture("gauss-mixture", Mixture{0.3, {1.0, 0.6}, {-1.0, 1.5}, {0.6, 0.9}}));
  c.push_back(from_closed("exp(0.3x)", exp_linear(0.3)));
  c.push_back(quadratic_bump(0.1));
  c.push_back(capped_quadratic());
  c.push_back(smooth_kink());
  for (auto& f : random_mixtures(seed, random_count)) c.push_back(std::move(f));
  return c;
}

/// Bounded or Lipschitz functions for the Hamilton-Jacobi checks.
inline std::vector<std::pair<std::string, RealFn>> hj_corpus() {
  return {
      {"min(x^2,4)", [](double x) { return std::min(x * x, 4.0); }},
      {"|x|", [](double x) { return std::abs(x); }},
      {"bump", [](double x) { return std::exp(-x * x); }},
      {"0.5x", [](double x) { return 0.5 * x; }},
  };
}

/// h = exp(m x - m^2/2): density of N(m, 1) against the standard Gaussian.
inline TestFunction shift_tilt(double m) {
  TestFunction h = from_closed("shift(" + std::to_string(m) + ")", exp_linear(m));
  auto cf = std::get<GaussExp>(h.closed->form);
  cf.scale = std::exp(-0.5 * m * m);
  return from_closed(h.name, ClosedForm{cf});
}

/// Probability densities against the standard Gaussian.
inline std::vector<TestFunction> talagrand_corpus() {
  std::vector<TestFunction> c;
  c.push_back(shift_tilt(0.8));
  c.push_back(shift_tilt(-0.5));
  // (1 + c x^2)/(1 + c), mean one under the Gaussian.
  for (double k : {0.1, 0.5}) {
    TestFunction f = from_function("(1+" + std::to_string(k) + "x^2)/(1+" + std::to_string(k) + ")",
                                   [k](double x) { return (1 + k * x * x) / (1 + k); });
    f.gradient = [k](double x) { return 2 * k * x / (1 + k); };
    f.laplacian = [k](double) { return 2 * k / (1 + k); };
    c.push_back(std::move(f));
  }
  // Gaussian variance change: density of N(0, s^2) against N(0, 1).
  for (double s : {0.8, 1.3}) {
    const double a = 0.5 * (1 - 1 / (s * s));
    ClosedForm cf{GaussExp{1 / s, a, 0.0, 1}};
    c.push_back(from_closed("scale(" + std::to_string(s) + ")", cf));
  }
  return c;
}

}  // namespace hyperlab
