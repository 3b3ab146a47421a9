#include "logsub/maximal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "logsub/error.hpp"
#include "logsub/squarefn.hpp"

namespace logsub {

namespace {

void require_nonnegative(const RealField& w, const char* what) {
  for (double v : w.values) {
    if (!(v >= 0.0)) throw DomainError(std::string(what) + ": negative or non-finite weight");
  }
}

long wrap(long i, long n) {
  i %= n;
  return i < 0 ? i + n : i;
}

// Window maximum over [i - R, i + R] along a periodic line of length n.
void line_window_max(const double* in, double* out, std::size_t n, long R, std::vector<double>& a,
                     std::vector<double>& b) {
  const long N = static_cast<long>(n);
  const long L = 2 * R + 1;
  if (L >= N) {
    const double m = *std::max_element(in, in + n);
    std::fill(out, out + n, m);
    return;
  }
  a.assign(in, in + n);
  long len = 1;
  while (2 * len <= L) {
    b.resize(n);
    for (long i = 0; i < N; ++i) b[i] = std::max(a[i], a[wrap(i + len, N)]);
    a.swap(b);
    len *= 2;
  }
  for (long i = 0; i < N; ++i) out[i] = std::max(a[wrap(i - R, N)], a[wrap(i + R - len + 1, N)]);
}

}  // namespace

double AveragingKernel::lower_bound(int d) {
  return std::pow(2.0 * std::numbers::pi, -d / 2.0) * std::exp(-0.5);
}

RealField AveragingKernel::sampled(const TorusGrid& g, double t) {
  RealField k{g, std::vector<double>(g.size(), 0.0)};
  const std::size_t n = g.n();
  const double h = g.spacing();
  const double two_pi = 2.0 * std::numbers::pi;
  auto line = [&](std::size_t j) {
    const double x = h * static_cast<double>(j);
    double s = 0.0;
    for (int m = -2; m <= 2; ++m) {
      const double z = (x + two_pi * m) / t;
      s += std::exp(-0.5 * z * z);
    }
    return s;
  };
  std::vector<double> prof(n);
  for (std::size_t j = 0; j < n; ++j) prof[j] = line(j);
  long double mass = 0.0L;
  if (g.d() == 1) {
    for (std::size_t j = 0; j < n; ++j) {
      k.values[j] = prof[j];
      mass += prof[j];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        k.values[i * n + j] = prof[i] * prof[j];
        mass += k.values[i * n + j];
      }
    }
  }
  const double scale = 1.0 / (static_cast<double>(mass) * g.cell_volume());
  for (auto& v : k.values) v *= scale;
  return k;
}

RealField smooth_average(const RealField& w, double t) {
  require_nonnegative(w, "smooth_average");
  RealField out = convolve(w, AveragingKernel::sampled(w.grid, t));
  for (auto& v : out.values) v = std::max(v, 0.0);
  return out;
}

RealField hl_maximal(const RealField& w) {
  require_nonnegative(w, "hl_maximal");
  const TorusGrid& g = w.grid;
  const std::size_t N = g.size();
  RealField M = w;
  long double total = 0.0L;
  for (double v : w.values) total += v;
  const double mean = static_cast<double>(total) / static_cast<double>(N);
  for (auto& v : M.values) v = std::max(v, mean);

  if (g.d() == 1) {
    const long n = static_cast<long>(g.n());
    // S[i] = sum of w over [i - r, i + r - 1]; doubled by disjoint halves.
    std::vector<double> S(n), T(n);
    for (long i = 0; i < n; ++i) S[i] = w.values[wrap(i - 1, n)] + w.values[i];
    for (long r = 1; 2 * r + 1 <= n / 2 + 1; r *= 2) {
      const double inv = 1.0 / static_cast<double>(2 * r + 1);
      for (long i = 0; i < n; ++i) M.values[i] = std::max(M.values[i], (S[i] + w.values[wrap(i + r, n)]) * inv);
      for (long i = 0; i < n; ++i) T[i] = S[wrap(i - r, n)] + S[wrap(i + r, n)];
      S.swap(T);
    }
    return M;
  }
  const SpectralField W = forward(to_field(w));
  for (double r = 1.0; r <= static_cast<double>(g.n()) / 4.0; r *= 2.0) {
    const RealField ball = ball_average_weights(g, r * g.spacing());
    SpectralField B = forward(to_field(ball));
    for (std::size_t i = 0; i < N; ++i) B.coeffs[i] = W.coeffs[i] * B.coeffs[i] * static_cast<double>(N);
    const Field avg = inverse(B);
    for (std::size_t i = 0; i < N; ++i) M.values[i] = std::max(M.values[i], avg.samples[i].real());
  }
  return M;
}

RealField hl_maximal_s(const RealField& w, double s) {
  if (!(s > 1.0)) throw DomainError("hl_maximal_s: s must exceed 1");
  require_nonnegative(w, "hl_maximal_s");
  RealField ws = w;
  for (auto& v : ws.values) v = std::pow(v, s);
  RealField M = hl_maximal(ws);
  for (auto& v : M.values) v = std::pow(v, 1.0 / s);
  return M;
}

RealField ball_max_dilation(const RealField& w, double radius) {
  const TorusGrid& g = w.grid;
  const double rc = radius / g.spacing();
  const long R = static_cast<long>(std::floor(rc));
  RealField out{g, std::vector<double>(g.size())};
  std::vector<double> a, b;
  const std::size_t n = g.n();
  if (g.d() == 1) {
    line_window_max(w.values.data(), out.values.data(), n, R, a, b);
    return out;
  }
  // Disk = union of horizontal segments; one row-window max per half-width.
  const long N = static_cast<long>(n);
  std::vector<std::vector<double>> rowmax(R + 1);
  std::vector<long> half_width(2 * R + 1);
  for (long dy = -R; dy <= R; ++dy) {
    half_width[dy + R] = static_cast<long>(std::floor(std::sqrt(std::max(rc * rc - static_cast<double>(dy * dy), 0.0))));
  }
  for (long dy = -R; dy <= R; ++dy) {
    const long hw = half_width[dy + R];
    auto& rm = rowmax[hw];
    if (!rm.empty()) continue;
    rm.resize(g.size());
    for (std::size_t row = 0; row < n; ++row) {
      line_window_max(w.values.data() + row * n, rm.data() + row * n, n, hw, a, b);
    }
  }
  std::fill(out.values.begin(), out.values.end(), 0.0);
  for (long dy = -R; dy <= R; ++dy) {
    const auto& rm = rowmax[half_width[dy + R]];
    for (long row = 0; row < N; ++row) {
      const double* src = rm.data() + wrap(row + dy, N) * N;
      double* dst = out.values.data() + row * N;
      for (long col = 0; col < N; ++col) dst[col] = std::max(dst[col], src[col]);
    }
  }
  return out;
}

RealField log_maximal(const RealField& w, const LogParams& p, const ScaleGrid& scales) {
  require_nonnegative(w, "log_maximal");
  if (!(p.beta >= 0.0)) throw DomainError("log_maximal: beta must be nonnegative");
  const TorusGrid& g = w.grid;
  const std::size_t N = g.size();
  const SpectralField W = forward(to_field(w));
  RealField out = RealField::constant(g, 0.0);
  ComplexBuffer buf(N);
  RealField avg{g, std::vector<double>(N)};
  const double two_pi_d = std::pow(2.0 * std::numbers::pi, g.d());
  for (const auto& node : scales.nodes) {
    const RealField k = AveragingKernel::sampled(g, node.t);
    for (std::size_t i = 0; i < N; ++i) buf[i] = {k.values[i], 0.0};
    fft_inplace(g, buf.data(), -1);
    // forward(k) = buf / N; convolution coefficient (2 pi)^d W K.
    const double c = two_pi_d / static_cast<double>(N);
    for (std::size_t i = 0; i < N; ++i) buf[i] = W.coeffs[i] * buf[i] * c;
    fft_inplace(g, buf.data(), +1);
    for (std::size_t i = 0; i < N; ++i) avg.values[i] = std::max(buf[i].real(), 0.0);
    const RealField dil = ball_max_dilation(avg, aperture_unchecked(node.t, p.gamma));
    const double f = std::pow(node.u, -2.0 * p.beta);
    for (std::size_t i = 0; i < N; ++i) out.values[i] = std::max(out.values[i], f * dil.values[i]);
  }
  return out;
}

RealField rhs_weight(const RealField& w, const LogParams& p, const ScaleGrid& scales) {
  RealField v = w;
  for (int i = 0; i < 4; ++i) v = hl_maximal(v);
  v = log_maximal(v, p, scales);
  for (int i = 0; i < 2; ++i) v = hl_maximal(v);
  return v;
}

}  // namespace logsub
