#include "logsub/squarefn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "logsub/error.hpp"
#include "logsub/profiles.hpp"

namespace logsub {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Periodic offset of grid index j along one axis, in [-n/2, n/2).
long wrap_offset(std::size_t j, std::size_t n) {
  return j < n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
}

// Sum over images m of a^{-1}(1+|x+2 pi m|/a)^{-lambda}, x in [0, pi]:
// |m| <= 16 explicitly, the rest by the midpoint rule with two
// Euler-Maclaurin corrections.
double periodized_1d(double x, double a, double lambda) {
  constexpr int M = 16;
  auto f = [&](double z) { return std::pow(1.0 + std::abs(z) / a, -lambda) / a; };
  double s = 0.0;
  for (int m = -M; m <= M; ++m) s += f(x + kTwoPi * m);
  // Tail on each side: sum_{m > M} g(m), g(s) = f(c + 2 pi s), c = +-x.
  for (double c : {x, -x}) {
    const double s0 = c + kTwoPi * (M + 0.5);
    const double v = 1.0 + s0 / a;
    const double integral = std::pow(v, 1.0 - lambda) / ((lambda - 1.0) * kTwoPi);
    const double k = kTwoPi / a;
    const double g1 = -lambda * std::pow(v, -lambda - 1.0) * k / a;
    const double g3 = -lambda * (lambda + 1.0) * (lambda + 2.0) * std::pow(v, -lambda - 3.0) * k * k * k / a;
    s += integral + g1 / 24.0 - 7.0 * g3 / 5760.0;
  }
  return s;
}

double periodized_2d(double x, double y, double a, double lambda) {
  constexpr int M = 3;
  const double q = 2.0 * lambda;
  double s = 0.0;
  for (int m1 = -M; m1 <= M; ++m1) {
    for (int m2 = -M; m2 <= M; ++m2) {
      const double r = std::hypot(x + kTwoPi * m1, y + kTwoPi * m2);
      s += std::pow(1.0 + r / a, -q) / (a * a);
    }
  }
  // Remaining images replaced by the continuum outside a disk of equal area.
  const double R = (2 * M + 1) * kTwoPi / std::sqrt(std::numbers::pi);
  const double S = 1.0 + R / a;
  const double tail = kTwoPi * (std::pow(S, 2.0 - q) / (q - 2.0) - std::pow(S, 1.0 - q) / (q - 1.0));
  return s + tail / (kTwoPi * kTwoPi);
}

}  // namespace

LPFamily LPFamily::make(const LogParams& p, const TorusGrid& g, double du) {
  LPFamily fam{default_scale_grid(p, g, du)};
  fam.validate(p);
  return fam;
}

void LPFamily::validate(const LogParams& p) const {
  const double floor_freq = std::ldexp(1.0, p.k0 + 1);
  for (const auto& node : scales.nodes) {
    if (!(0.5 / node.t >= floor_freq)) throw DomainError("LPFamily: scale reaches below 2^{k0+1}");
  }
}

double LPFamily::energy_constant(double beta) const {
  if (scales.nodes.empty()) return 0.0;
  const double lo = std::log2(0.5 / scales.nodes.front().t);
  const double hi = std::log2(2.0 / scales.nodes.back().t);
  const int steps = static_cast<int>(std::ceil((hi - lo) * 512.0));
  double best = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double r = std::exp2(lo + (hi - lo) * i / steps);
    double s = 0.0;
    for (const auto& node : scales.nodes) {
      const double v = lp_profile(node.t * r);
      s += node.weight * v * v * std::pow(node.u, 2.0 * beta);
    }
    best = std::max(best, s);
  }
  return best;
}

RobustKernelSpec RobustKernelSpec::make(double t, double lambda, const LogParams& p) {
  if (!(lambda > 1.0)) throw DomainError("kernel: lambda must exceed 1");
  return RobustKernelSpec{t, lambda, aperture(t, p), p.d};
}

double kernel_value(const RobustKernelSpec& k, Point z) {
  return std::pow(k.a, -k.d) * std::pow(1.0 + norm(z) / k.a, -k.d * k.lambda);
}

double kernel_l1(const RobustKernelSpec& k) {
  const double q = k.d * k.lambda;
  if (k.d == 1) return 2.0 / (q - 1.0);
  return kTwoPi * (1.0 / (q - 2.0) - 1.0 / (q - 1.0));
}

RealField periodized_kernel(const RobustKernelSpec& k, const TorusGrid& g) {
  if (!(k.lambda > 1.0)) throw DomainError("kernel: lambda must exceed 1");
  RealField K{g, std::vector<double>(g.size())};
  const std::size_t n = g.n();
  const double h = g.spacing();
  if (g.d() == 1) {
    for (std::size_t j = 0; j <= n / 2; ++j) {
      const double v = periodized_1d(h * static_cast<double>(j), k.a, k.lambda);
      K.values[j] = v;
      if (j > 0 && j < n / 2) K.values[n - j] = v;
    }
    return K;
  }
  // Symmetric in both axes and under swapping them.
  for (std::size_t i = 0; i <= n / 2; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = periodized_2d(h * static_cast<double>(i), h * static_cast<double>(j), k.a, k.lambda);
      for (std::size_t a : {i, (n - i) % n}) {
        for (std::size_t b : {j, (n - j) % n}) {
          K.values[a * n + b] = v;
          K.values[b * n + a] = v;
        }
      }
    }
  }
  return K;
}

double kernel_conv_stability(const RobustKernelSpec& k, const TorusGrid& g) {
  const RealField K = periodized_kernel(k, g);
  const RealField KK = convolve(K, K);
  double best = 0.0;
  for (std::size_t i = 0; i < K.values.size(); ++i) best = std::max(best, KK.values[i] / K.values[i]);
  return best;
}

RealField ball_average_weights(const TorusGrid& g, double a) {
  RealField w{g, std::vector<double>(g.size(), 0.0)};
  const double rc = a / g.spacing();
  const std::size_t n = g.n();
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double o0 = static_cast<double>(wrap_offset(g.d() == 1 ? i : i / n, n));
    const double o1 = g.d() == 1 ? 0.0 : static_cast<double>(wrap_offset(i % n, n));
    if (o0 * o0 + o1 * o1 <= rc * rc) members.push_back(i);
  }
  const double v = 1.0 / static_cast<double>(members.size());
  for (auto i : members) w.values[i] = v;
  return w;
}

std::size_t ball_point_count(const TorusGrid& g, double a) {
  const double rc = a / g.spacing();
  const long R = static_cast<long>(std::floor(rc));
  if (g.d() == 1) return static_cast<std::size_t>(2 * R + 1);
  std::size_t count = 0;
  for (long i = -R; i <= R; ++i) {
    for (long j = -R; j <= R; ++j) count += (static_cast<double>(i * i + j * j) <= rc * rc) ? 1 : 0;
  }
  return count;
}

Field lp_piece(const SpectralField& F, double t) {
  if (!(t > 0.0) || !(2.0 / t < static_cast<double>(F.grid.n()) / 2.0)) {
    throw DomainError("lp_piece: scale outside the resolvable range");
  }
  SpectralField G{F.grid, F.coeffs};
  for (std::size_t i = 0; i < G.coeffs.size(); ++i) {
    if (G.coeffs[i] == cplx{0.0, 0.0}) continue;
    G.coeffs[i] *= lp_profile(t * F.grid.frequency_norm(i));
  }
  return inverse(G);
}

SquareFunctionEngine::SquareFunctionEngine(const LogParams& p, const TorusGrid& g, ScaleGrid scales)
    : params_(p), grid_(g), scales_(std::move(scales)) {
  for (const auto& node : scales_.nodes) {
    if (!(2.0 / node.t < static_cast<double>(g.n()) / 2.0)) {
      throw DomainError("SquareFunctionEngine: scale grid exceeds the grid's resolvable range");
    }
  }
}

std::size_t SquareFunctionEngine::degenerate_scales() const {
  std::size_t c = 0;
  for (const auto& node : scales_.nodes) c += ball_point_count(grid_, aperture_unchecked(node.t, params_.gamma)) == 1;
  return c;
}

double SquareFunctionEngine::normalization_discrepancy() const {
  double worst = 0.0;
  const double vol_unit = grid_.d() == 1 ? 2.0 : std::numbers::pi;
  for (const auto& node : scales_.nodes) {
    const double a = aperture_unchecked(node.t, params_.gamma);
    const double ratio = static_cast<double>(ball_point_count(grid_, a)) * grid_.cell_volume() /
                         (vol_unit * std::pow(a, grid_.d()));
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  return worst;
}

std::shared_ptr<const SquareFunctionEngine::Transfers> SquareFunctionEngine::transfers(double lambda) const {
  const double key = lambda > 0.0 ? lambda : -1.0;
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto T = std::make_shared<Transfers>();
  T->reserve(scales_.nodes.size());
  ComplexBuffer buf(grid_.size());
  for (const auto& node : scales_.nodes) {
    RealField kernel;
    double factor = 1.0;
    if (key < 0.0) {
      kernel = ball_average_weights(grid_, aperture_unchecked(node.t, params_.gamma));
    } else {
      RobustKernelSpec spec{node.t, lambda, aperture_unchecked(node.t, params_.gamma), grid_.d()};
      kernel = periodized_kernel(spec, grid_);
      factor = grid_.cell_volume();
    }
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = {kernel.values[i], 0.0};
    fft_inplace(grid_, buf.data(), -1);
    std::vector<double> t(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) t[i] = factor * buf[i].real();
    T->push_back(std::move(t));
  }
  std::lock_guard lock(mu_);
  auto [it, inserted] = cache_.emplace(key, std::move(T));
  return it->second;
}

RealField SquareFunctionEngine::accumulate(std::span<const SparseSpectral> pieces, double beta,
                                           const Transfers& T) const {
  const std::size_t N = grid_.size();
  ComplexBuffer acc(N, cplx{0.0, 0.0});
  ComplexBuffer buf(N);
  ComplexBuffer energy(N);
  std::vector<double> radii;
  bool any_scale = false;
  for (std::size_t j = 0; j < scales_.nodes.size(); ++j) {
    const auto& node = scales_.nodes[j];
    bool any = false;
    for (const auto& piece : pieces) {
      if (piece.empty() || !(grid_ == piece.grid)) {
        if (!piece.empty()) throw ShapeError("square function: piece grid mismatch");
        continue;
      }
      if (node.t * piece.r_max <= 0.5 || node.t * piece.r_min >= 2.0) continue;
      std::fill(buf.begin(), buf.end(), cplx{0.0, 0.0});
      bool nonzero = false;
      for (std::size_t q = 0; q < piece.index.size(); ++q) {
        const double v = lp_profile(node.t * grid_.frequency_norm(piece.index[q]));
        if (v == 0.0) continue;
        buf[piece.index[q]] = piece.value[q] * v;
        nonzero = true;
      }
      if (!nonzero) continue;
      fft_inplace(grid_, buf.data(), +1);
      if (!any) std::fill(energy.begin(), energy.end(), cplx{0.0, 0.0});
      for (std::size_t i = 0; i < N; ++i) energy[i] += std::norm(buf[i]);
      any = true;
    }
    if (!any) continue;
    any_scale = true;
    fft_inplace(grid_, energy.data(), -1);
    const double c = node.weight * std::pow(node.u, 2.0 * beta);
    const auto& Tj = T[j];
    for (std::size_t i = 0; i < N; ++i) acc[i] += c * Tj[i] * energy[i];
  }
  RealField out{grid_, std::vector<double>(N, 0.0)};
  if (!any_scale) return out;
  fft_inplace(grid_, acc.data(), +1);
  const double inv = 1.0 / static_cast<double>(N);
  for (std::size_t i = 0; i < N; ++i) out.values[i] = std::max(acc[i].real() * inv, 0.0);
  return out;
}

RealField SquareFunctionEngine::g_log_squared(const SpectralField& F, double beta) const {
  const SparseSpectral s = SparseSpectral::from_dense(F);
  return g_log_squared_sum(std::span<const SparseSpectral>(&s, 1), beta);
}

RealField SquareFunctionEngine::g_star_squared(const SpectralField& F, double beta, double lambda) const {
  const SparseSpectral s = SparseSpectral::from_dense(F);
  return g_star_squared_sum(std::span<const SparseSpectral>(&s, 1), beta, lambda);
}

RealField SquareFunctionEngine::g_log_squared_sum(std::span<const SparseSpectral> pieces, double beta) const {
  return accumulate(pieces, beta, *transfers(-1.0));
}

RealField SquareFunctionEngine::g_star_squared_sum(std::span<const SparseSpectral> pieces, double beta,
                                                   double lambda) const {
  if (!(lambda > 1.0)) throw DomainError("g_star: lambda must exceed 1");
  return accumulate(pieces, beta, *transfers(lambda));
}

RealField sqrt_field(RealField f) {
  for (auto& v : f.values) v = std::sqrt(v);
  return f;
}

RealField g_log(const Field& f, double beta, const LPFamily& fam, const LogParams& p) {
  const SquareFunctionEngine eng(p, f.grid, fam.scales);
  return sqrt_field(eng.g_log_squared(forward(f), beta));
}

RealField g_star(const Field& f, double beta, double lambda, const LPFamily& fam, const LogParams& p) {
  const SquareFunctionEngine eng(p, f.grid, fam.scales);
  return sqrt_field(eng.g_star_squared(forward(f), beta, lambda));
}

}  // namespace logsub
