#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hyperlab/error.hpp"

namespace hyperlab {

/// Collects non-fatal findings (clamped logarithms, boundary leakage,
/// out-of-domain interpolation) so that checkers can surface them in their
/// reports instead of silently proceeding.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message) {
    if (std::find(warnings.begin(), warnings.end(), message) == warnings.end())
      warnings.push_back(std::move(message));
  }
  bool empty() const { return warnings.empty(); }
  void merge(const Diagnostics& other) {
    for (const auto& w : other.warnings) warn(w);
  }
};

inline void note(Diagnostics* diag, std::string message) {
  if (diag) diag->warn(std::move(message));
}

/// Floor applied before any logarithm of sampled data.
inline constexpr double kPositivityFloor = 1e-300;
/// Relative boundary magnitude above which the transform path warns.
inline constexpr double kBoundaryDecayThreshold = 1e-10;

enum class Geometry { line, radial };

/// Uniform grid. On a line grid the nodes are -L + i*h with h = 2L/(N-1);
/// on a radial grid they are r_i = i*h on [0, L] with h = L/(N-1) and the
/// grid carries the nominal dimension n of the radial reduction.
struct Grid {
  double half_width = 0.0;
  std::size_t points = 0;
  double spacing = 0.0;
  Geometry geometry = Geometry::line;
  int dimension = 1;

  double node(std::size_t i) const {
    return geometry == Geometry::line
               ? -half_width + static_cast<double>(i) * spacing
               : static_cast<double>(i) * spacing;
  }
  double lower() const { return geometry == Geometry::line ? -half_width : 0.0; }
  double upper() const { return half_width; }
  bool radial() const { return geometry == Geometry::radial; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

inline constexpr std::size_t kMinGridPoints = 8;

inline Grid make_grid(double half_width, std::size_t points) {
  require(std::isfinite(half_width) && half_width > 0.0,
          ErrorKind::invalid_argument, "grid half width must be positive");
  require(points >= kMinGridPoints, ErrorKind::invalid_argument,
          "grid needs at least 8 points, got " + std::to_string(points));
  return Grid{half_width, points, 2.0 * half_width / static_cast<double>(points - 1),
              Geometry::line, 1};
}

inline Grid make_radial_grid(double radius, std::size_t points, int dimension) {
  require(std::isfinite(radius) && radius > 0.0, ErrorKind::invalid_argument,
          "radial grid radius must be positive");
  require(points >= kMinGridPoints, ErrorKind::invalid_argument,
          "grid needs at least 8 points, got " + std::to_string(points));
  require(dimension >= 1, ErrorKind::invalid_argument,
          "radial dimension must be >= 1");
  return Grid{radius, points, radius / static_cast<double>(points - 1),
              Geometry::radial, dimension};
}

/// Grid for nominal dimension n: a line grid for n = 1, radial otherwise.
inline Grid make_grid_for_dimension(double half_width, std::size_t points, int n) {
  return n == 1 ? make_grid(half_width, points)
                : make_radial_grid(half_width, points, n);
}

inline std::vector<double> nodes(const Grid& g) {
  std::vector<double> x(g.points);
  for (std::size_t i = 0; i < g.points; ++i) x[i] = g.node(i);
  return x;
}

/// Sampled real function on a grid. Values are always finite.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(Grid grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    require(values_.size() == grid_.points, ErrorKind::shape_mismatch,
            "value count " + std::to_string(values_.size()) +
                " does not match grid size " + std::to_string(grid_.points));
    double lo = values_.empty() ? 0.0 : values_.front();
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]))
        fail(ErrorKind::numeric, "non-finite sample at node " + std::to_string(i));
      lo = std::min(lo, values_[i]);
    }
    strictly_positive_ = !values_.empty() && lo > 0.0;
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  bool strictly_positive() const { return strictly_positive_; }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  Grid grid_{};
  std::vector<double> values_;
  bool strictly_positive_ = false;
};

template <class F>
GridFunction sample(const Grid& grid, F&& f) {
  std::vector<double> v(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) v[i] = f(grid.node(i));
  return GridFunction(grid, std::move(v));
}

template <class Op>
GridFunction transform(const GridFunction& f, Op&& op) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = op(f[i]);
  return GridFunction(f.grid(), std::move(v));
}

template <class Op>
GridFunction combine(const GridFunction& f, const GridFunction& g, Op&& op) {
  require(f.grid() == g.grid(), ErrorKind::shape_mismatch,
          "grid functions live on different grids");
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = op(f[i], g[i]);
  return GridFunction(f.grid(), std::move(v));
}

inline GridFunction constant(const Grid& grid, double c) {
  return GridFunction(grid, std::vector<double>(grid.points, c));
}

/// log f with the positivity floor; clamping is reported, never silent.
inline GridFunction log_floor(const GridFunction& f, Diagnostics* diag = nullptr) {
  bool clamped = false;
  auto out = transform(f, [&](double v) {
    if (v < kPositivityFloor) {
      clamped = true;
      v = kPositivityFloor;
    }
    return std::log(v);
  });
  if (clamped) note(diag, "positivity floor applied before logarithm");
  return out;
}

namespace detail {

// Left-end Gregory corrections (exact through degree 6 differences); added
// to the trapezoid weights on radial grids of even dimension where the
// integrand has an odd component at r = 0.
inline constexpr std::array<double, 7> kGregoryLeft = {
    -3383.0 / 17280.0,  6961.0 / 15120.0, -66109.0 / 120960.0, 33.0 / 70.0,
    -31523.0 / 120960.0, 1247.0 / 15120.0, -275.0 / 24192.0};

}  // namespace detail

/// Quadrature weights for integrals over the grid's domain (without any
/// density or radial Jacobian).
inline std::vector<double> quadrature_weights(const Grid& g) {
  std::vector<double> w(g.points, g.spacing);
  w.front() *= 0.5;
  w.back() *= 0.5;
  if (g.radial() && g.dimension % 2 == 0) {
    for (std::size_t j = 0; j < detail::kGregoryLeft.size(); ++j)
      w[j] += g.spacing * detail::kGregoryLeft[j];
  }
  return w;
}

/// Surface area of the unit sphere in R^n.
inline double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Integral against Lebesgue measure on R^n (radial grids include the
/// spherical Jacobian).
inline double integrate_dx(const GridFunction& f) {
  const Grid& g = f.grid();
  const auto w = quadrature_weights(g);
  double s = 0.0;
  if (!g.radial()) {
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
    return s;
  }
  const double area = sphere_area(g.dimension);
  for (std::size_t i = 0; i < f.size(); ++i)
    s += w[i] * f[i] * std::pow(g.node(i), g.dimension - 1);
  return area * s;
}

enum class FdOrder { second = 2, fourth = 4 };

namespace detail {

// Value of f at index i, reflecting evenly through r = 0 on radial grids.
inline double at(std::span<const double> v, long i, bool reflect) {
  if (i < 0 && reflect) return v[static_cast<std::size_t>(-i)];
  return v[static_cast<std::size_t>(i)];
}

inline std::vector<double> first_derivative(std::span<const double> v, double h,
                                            FdOrder order, bool reflect) {
  const long n = static_cast<long>(v.size());
  std::vector<double> d(v.size());
  auto f = [&](long i) { return at(v, i, reflect); };
  if (order == FdOrder::second) {
    for (long i = 0; i < n; ++i) {
      if (i > 0 && i < n - 1)
        d[i] = (f(i + 1) - f(i - 1)) / (2 * h);
      else if (i == 0 && reflect)
        d[i] = 0.0;
      else if (i == 0)
        d[i] = (-3 * f(0) + 4 * f(1) - f(2)) / (2 * h);
      else
        d[i] = (3 * f(n - 1) - 4 * f(n - 2) + f(n - 3)) / (2 * h);
    }
    return d;
  }
  for (long i = 0; i < n; ++i) {
    const bool left_ok = reflect || i >= 2;
    if (left_ok && i + 2 < n) {
      d[i] = (-f(i + 2) + 8 * f(i + 1) - 8 * f(i - 1) + f(i - 2)) / (12 * h);
    } else if (i == 0) {
      d[i] = (-25 * f(0) + 48 * f(1) - 36 * f(2) + 16 * f(3) - 3 * f(4)) / (12 * h);
    } else if (i == 1) {
      d[i] = (-3 * f(0) - 10 * f(1) + 18 * f(2) - 6 * f(3) + f(4)) / (12 * h);
    } else if (i == n - 2) {
      d[i] = (3 * f(n - 1) + 10 * f(n - 2) - 18 * f(n - 3) + 6 * f(n - 4) - f(n - 5)) /
             (12 * h);
    } else {
      d[i] = (25 * f(n - 1) - 48 * f(n - 2) + 36 * f(n - 3) - 16 * f(n - 4) +
              3 * f(n - 5)) /
             (12 * h);
    }
  }
  return d;
}

inline std::vector<double> second_derivative(std::span<const double> v, double h,
                                             FdOrder order, bool reflect) {
  const long n = static_cast<long>(v.size());
  std::vector<double> d(v.size());
  auto f = [&](long i) { return at(v, i, reflect); };
  const double h2 = h * h;
  if (order == FdOrder::second) {
    for (long i = 0; i < n; ++i) {
      if ((i > 0 || reflect) && i < n - 1)
        d[i] = (f(i + 1) - 2 * f(i) + f(i - 1)) / h2;
      else if (i == 0)
        d[i] = (2 * f(0) - 5 * f(1) + 4 * f(2) - f(3)) / h2;
      else
        d[i] = (2 * f(n - 1) - 5 * f(n - 2) + 4 * f(n - 3) - f(n - 4)) / h2;
    }
    return d;
  }
  for (long i = 0; i < n; ++i) {
    const bool left_ok = reflect || i >= 2;
    if (left_ok && i + 2 < n) {
      d[i] = (-f(i + 2) + 16 * f(i + 1) - 30 * f(i) + 16 * f(i - 1) - f(i - 2)) /
             (12 * h2);
    } else if (i == 0) {
      d[i] = (45 * f(0) - 154 * f(1) + 214 * f(2) - 156 * f(3) + 61 * f(4) -
              10 * f(5)) /
             (12 * h2);
    } else if (i == 1) {
      d[i] = (10 * f(0) - 15 * f(1) - 4 * f(2) + 14 * f(3) - 6 * f(4) + f(5)) /
             (12 * h2);
    } else if (i == n - 2) {
      d[i] = (10 * f(n - 1) - 15 * f(n - 2) - 4 * f(n - 3) + 14 * f(n - 4) -
              6 * f(n - 5) + f(n - 6)) /
             (12 * h2);
    } else {
      d[i] = (45 * f(n - 1) - 154 * f(n - 2) + 214 * f(n - 3) - 156 * f(n - 4) +
              61 * f(n - 5) - 10 * f(n - 6)) /
             (12 * h2);
    }
  }
  return d;
}

}  // namespace detail

/// Gradient (radial derivative on radial grids). Second order by default;
/// one-sided stencils of matching order at the outer boundary, even
/// reflection through r = 0.
inline GridFunction fd_gradient(const GridFunction& f, FdOrder order = FdOrder::second) {
  require(f.size() >= 3, ErrorKind::invalid_argument,
          "finite differences need at least 3 nodes");
  const Grid& g = f.grid();
  return GridFunction(g, detail::first_derivative(f.values(), g.spacing, order, g.radial()));
}

/// Laplacian; on radial grids f'' + (n-1) f'/r, with n f''(0) at the origin.
inline GridFunction fd_laplacian(const GridFunction& f, FdOrder order = FdOrder::second) {
  require(f.size() >= 3, ErrorKind::invalid_argument,
          "finite differences need at least 3 nodes");
  const Grid& g = f.grid();
  auto d2 = detail::second_derivative(f.values(), g.spacing, order, g.radial());
  if (g.radial() && g.dimension > 1) {
    auto d1 = detail::first_derivative(f.values(), g.spacing, order, true);
    const double n = g.dimension;
    d2[0] *= n;
    for (std::size_t i = 1; i < d2.size(); ++i) d2[i] += (n - 1) * d1[i] / g.node(i);
  }
  return GridFunction(g, std::move(d2));
}

/// Six-point Lagrange interpolation. Points outside the domain are clamped
/// to the boundary value and reported.
inline double interpolate(const GridFunction& f, double x, Diagnostics* diag = nullptr) {
  const Grid& g = f.grid();
  if (g.radial()) x = std::abs(x);
  const double tol = 1e-12 * g.half_width;
  if (x < g.lower() - tol || x > g.upper() + tol) {
    note(diag, "interpolation outside the grid domain (clamped to boundary value)");
    return x < g.lower() ? f[0] : f[f.size() - 1];
  }
  const double s = (x - g.lower()) / g.spacing;
  const long n = static_cast<long>(f.size());
  long base = static_cast<long>(std::floor(s)) - 2;
  if (!g.radial()) base = std::clamp(base, 0L, n - 6);
  else base = std::min(base, n - 6);
  double result = 0.0;
  for (long j = 0; j < 6; ++j) {
    double w = 1.0;
    for (long k = 0; k < 6; ++k)
      if (k != j) w *= (s - static_cast<double>(base + k)) / static_cast<double>(j - k);
    result += w * detail::at(f.values(), base + j, g.radial());
  }
  return result;
}

}  // namespace hyperlab
