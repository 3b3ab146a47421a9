#pragma once

// Brute-force reference computations, written without the library's
// transforms, transfers or ladders.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// c_xi = n^-1 sum_j f_j e^{-i xi x_j}, xi in FFT order.
inline std::vector<cplx> dft_1d(const std::vector<cplx>& f) {
  const std::size_t n = f.size();
  std::vector<cplx> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += f[j] * std::polar(1.0, -kTwoPi * double(k * j % n) / double(n));
    c[k] = s / double(n);
  }
  return c;
}

inline std::vector<cplx> dft_2d(const std::vector<cplx>& f, std::size_t n) {
  std::vector<cplx> c(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      cplx s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          s += f[i * n + j] * std::polar(1.0, -kTwoPi * double((a * i + b * j) % n) / double(n));
        }
      }
      c[a * n + b] = s / double(n * n);
    }
  }
  return c;
}

// h sum_y a(y) b(x - y) on a periodic line.
inline std::vector<cplx> convolve_1d(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  const std::size_t n = a.size();
  const double h = kTwoPi / double(n);
  std::vector<cplx> out(n);
  for (std::size_t x = 0; x < n; ++x) {
    cplx s = 0.0;
    for (std::size_t y = 0; y < n; ++y) s += a[y] * b[(x + n - y) % n];
    out[x] = h * s;
  }
  return out;
}

// j-th derivative by nested central differences with step h.
inline cplx central_difference(const std::function<cplx(double)>& f, double x, int j, double h) {
  if (j == 0) return f(x);
  return (central_difference(f, x + h, j - 1, h) - central_difference(f, x - h, j - 1, h)) / (2.0 * h);
}

// a^-1 (1 + |z|/a)^{-lambda} summed over images z + 2 pi m, |m| <= images.
inline double kernel_images_1d(double a, double lambda, double z, long images) {
  double s = 0.0;
  for (long m = -images; m <= images; ++m) s += std::pow(1.0 + std::abs(z + kTwoPi * double(m)) / a, -lambda) / a;
  return s;
}

// phi_hat(r) = exp(1 - 1/(1 - log2(r)^2)) on (1/2, 2).
inline double lp_profile(double r) {
  if (!(r > 0.5 && r < 2.0)) return 0.0;
  const double l = std::log2(r);
  return std::exp(1.0 - 1.0 / (1.0 - l * l));
}

// Periodic 1-D ball average over |i - x| <= R (in cells).
inline std::vector<double> ball_average_1d(const std::vector<double>& w, long R) {
  const long n = long(w.size());
  std::vector<double> out(w.size());
  for (long x = 0; x < n; ++x) {
    double s = 0.0;
    for (long i = -R; i <= R; ++i) s += w[std::size_t(((x + i) % n + n) % n)];
    out[std::size_t(x)] = s / double(2 * R + 1);
  }
  return out;
}

// Discrete sup over every radius 0..n/2 of periodic ball averages.
inline std::vector<double> hl_maximal_all_radii_1d(const std::vector<double>& w) {
  const long n = long(w.size());
  std::vector<double> out(w.size(), 0.0);
  for (long R = 0; 2 * R + 1 <= n; ++R) {
    const auto avg = ball_average_1d(w, R);
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = std::max(out[i], avg[i]);
  }
  return out;
}

// Max of w over grid points within R cells (periodic).
inline std::vector<double> dilation_1d(const std::vector<double>& w, long R) {
  const long n = long(w.size());
  std::vector<double> out(w.size());
  for (long x = 0; x < n; ++x) {
    double m = 0.0;
    for (long i = -R; i <= R; ++i) m = std::max(m, w[std::size_t(((x + i) % n + n) % n)]);
    out[std::size_t(x)] = m;
  }
  return out;
}

// h sum over all integers q of a^-1 (1 + h|q|/a)^{-lambda}: explicit up to Q,
// the rest by the integral beyond (Q + 1/2) h.
inline double kernel_line_mass(double a, double lambda, double h, long Q = 200000) {
  double s = 1.0 / a;
  for (long q = Q; q >= 1; --q) s += 2.0 * std::pow(1.0 + h * double(q) / a, -lambda) / a;
  s *= h;
  s += 2.0 * std::pow(1.0 + h * (double(Q) + 0.5) / a, 1.0 - lambda) / (lambda - 1.0);
  return s;
}

}  // namespace oracle
