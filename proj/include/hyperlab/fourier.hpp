#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "hyperlab/error.hpp"
#include "hyperlab/grid.hpp"

namespace hyperlab {

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

// In-place complex transform of length n; sign -1 forward, +1 backward
// (unnormalized, FFTW conventions).
inline void fft_inplace(std::vector<std::complex<double>>& data, int sign) {
  const int n = static_cast<int>(data.size());
  std::unique_ptr<fftw_complex, FftwFree> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * data.size())));
  if (!buf) fail(ErrorKind::numeric, "FFT buffer allocation failed");
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(n, buf.get(), buf.get(), sign, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    buf.get()[i][0] = data[i].real();
    buf.get()[i][1] = data[i].imag();
  }
  fftw_execute(plan);
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] = {buf.get()[i][0], buf.get()[i][1]};
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Angular frequency of DFT bin k for a period of p samples at spacing h.
inline double frequency(std::size_t k, std::size_t p, double h) {
  const double kk = k <= p / 2 ? static_cast<double>(k)
                               : static_cast<double>(k) - static_cast<double>(p);
  return 2.0 * std::numbers::pi * kk / (static_cast<double>(p) * h);
}

}  // namespace detail

enum class Detrend { none, constant, affine };

struct MultiplierOptions {
  /// Zero-padding factor (1 = periodic extension of the grid itself).
  std::size_t padding = 1;
  /// Part of f removed before the transform and restored afterwards; valid
  /// only when the multiplier fixes that part (constants need symbol(0)=1,
  /// affine functions additionally need an even symbol with finite
  /// curvature at 0).
  Detrend detrend = Detrend::constant;
  Diagnostics* diagnostics = nullptr;
};

/// Applies the Fourier multiplier with the given symbol to f using the
/// discrete transform of its (optionally zero-padded) periodic extension.
inline GridFunction fourier_multiplier(const GridFunction& f,
                                       const std::function<double(double)>& symbol,
                                       MultiplierOptions opts = {}) {
  const Grid& g = f.grid();
  require(!g.radial(), ErrorKind::unsupported,
          "Fourier multipliers act on line grids only");
  require(opts.padding >= 1, ErrorKind::invalid_argument, "padding must be >= 1");
  const std::size_t n = f.size();
  std::vector<double> base(n, 0.0);
  if (opts.detrend != Detrend::none) {
    const double a = f[0], b = f[n - 1];
    for (std::size_t i = 0; i < n; ++i) {
      const double s = static_cast<double>(i) / static_cast<double>(n - 1);
      base[i] = opts.detrend == Detrend::affine ? a + (b - a) * s : 0.5 * (a + b);
    }
  }
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, std::abs(f[i] - base[i]));
  const double edge = std::max(std::abs(f[0] - base[0]), std::abs(f[n - 1] - base[n - 1]));
  if (peak > 0 && edge > kBoundaryDecayThreshold * peak)
    note(opts.diagnostics, "boundary leakage: input does not decay at the grid edge");

  const std::size_t p = n * opts.padding;
  std::vector<std::complex<double>> buf(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) buf[i] = f[i] - base[i];
  detail::fft_inplace(buf, FFTW_FORWARD);
  for (std::size_t k = 0; k < p; ++k)
    buf[k] *= symbol(detail::frequency(k, p, g.spacing));
  detail::fft_inplace(buf, FFTW_BACKWARD);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = buf[i].real() / static_cast<double>(p) + base[i];
  return GridFunction(g, std::move(out));
}

/// Density on the grid nodes whose Fourier transform is the given symbol,
/// (2 pi)^{-1} * integral of symbol(xi) e^{i xi x} d xi, evaluated by the
/// discrete transform over a period of padding * N samples. The period sets
/// the aliasing (image) error, the spacing the frequency cutoff.
inline GridFunction kernel_on_grid(const Grid& g, const std::function<double(double)>& symbol,
                                   std::size_t padding = 8) {
  require(!g.radial(), ErrorKind::unsupported, "kernels live on line grids");
  const std::size_t p = detail::next_pow2(g.points * padding);
  const double h = g.spacing;
  const double x0 = g.lower();
  std::vector<std::complex<double>> buf(p);
  for (std::size_t k = 0; k < p; ++k) {
    const double xi = detail::frequency(k, p, h);
    buf[k] = symbol(xi) * std::polar(1.0, xi * x0) / (static_cast<double>(p) * h);
  }
  detail::fft_inplace(buf, FFTW_BACKWARD);
  std::vector<double> out(g.points);
  for (std::size_t i = 0; i < g.points; ++i) out[i] = buf[i].real();
  return GridFunction(g, std::move(out));
}

/// Pointwise value of the same inverse transform at an arbitrary x, by
/// direct summation over the frequency lattice of the given period.
inline double kernel_at(double x, const std::function<double(double)>& symbol,
                        double period, double max_frequency) {
  const double dxi = 2.0 * std::numbers::pi / period;
  const auto kmax = static_cast<std::size_t>(std::ceil(max_frequency / dxi));
  double s = 0.5 * symbol(0.0);
  for (std::size_t k = 1; k <= kmax; ++k) {
    const double xi = dxi * static_cast<double>(k);
    s += symbol(xi) * std::cos(xi * x);
  }
  return s * dxi / std::numbers::pi;
}

}  // namespace hyperlab
