#include "logsub/symbols.hpp"

#include <algorithm>
#include <array>
#include <boost/math/interpolators/makima.hpp>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "logsub/error.hpp"
#include "logsub/profiles.hpp"

namespace logsub {

namespace {

constexpr int kMaxOrder = 16;

double falling(double a, int i) {
  double r = 1.0;
  for (int q = 0; q < i; ++q) r *= a - q;
  return r;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Signed Stirling numbers of the first kind s(j, k): x^j D_x^j = sum_k s(j,k) (x D_x)^k.
const std::array<std::array<double, kMaxOrder + 1>, kMaxOrder + 1>& stirling1() {
  static const auto table = [] {
    std::array<std::array<double, kMaxOrder + 1>, kMaxOrder + 1> s{};
    s[0][0] = 1.0;
    for (int j = 0; j < kMaxOrder; ++j) {
      for (int k = 1; k <= j + 1; ++k) s[j + 1][k] = s[j][k - 1] - j * s[j][k];
    }
    return s;
  }();
  return table;
}

// Derivatives of exp(G) from F0 = exp(G) and G[i] = G^{(i)}, i = 1..K.
void exp_derivatives(cplx F0, const cplx* G, int K, cplx* out) {
  out[0] = F0;
  for (int k = 0; k < K; ++k) {
    cplx acc{0.0, 0.0};
    for (int i = 0; i <= k; ++i) acc += binom(k, i) * G[i + 1] * out[k - i];
    out[k + 1] = acc;
  }
}

// u-derivatives of u^{-beta} exp(i c u^gamma), c = 1 with phase, 0 without.
void u_engine(double u, double beta, double gamma, bool phase, int K, cplx* out) {
  std::array<cplx, kMaxOrder + 2> G{};
  for (int i = 1; i <= K; ++i) {
    const double fact = std::tgamma(static_cast<double>(i));
    const double amp = -beta * ((i - 1) % 2 == 0 ? 1.0 : -1.0) * fact * std::pow(u, -i);
    const double ph = phase ? falling(gamma, i) * std::pow(u, gamma - i) : 0.0;
    G[i] = {amp, ph};
  }
  const double mod = std::pow(u, -beta);
  const double arg = phase ? std::pow(u, gamma) : 0.0;
  exp_derivatives(std::polar(mod, arg), G.data(), K, out);
}

// R-derivatives of F(log(e + R)) from its u-derivatives.
void chain_log(double x, const cplx* Fu, int jmax, cplx* out) {
  const auto& s = stirling1();
  out[0] = Fu[0];
  double xp = 1.0;
  for (int j = 1; j <= jmax; ++j) {
    xp /= x;
    cplx acc{0.0, 0.0};
    for (int k = 1; k <= j; ++k) acc += s[j][k] * Fu[k];
    out[j] = acc * xp;
  }
}

RadialSymbol::Engine log_amplitude_engine(double gamma, double beta, bool phase) {
  return [=](double R, int jmax, cplx* out) {
    const double x = std::numbers::e + R;
    std::array<cplx, kMaxOrder + 1> Fu{};
    u_engine(std::log(x), beta, gamma, phase, jmax, Fu.data());
    chain_log(x, Fu.data(), jmax, out);
  };
}

void require_order(int j, int N) {
  if (j < 0 || j > N) throw DomainError("derivative order outside [0, N]");
}

// Nested central difference of order j with step h.
template <class F>
cplx central_difference(F&& f, double R, int j, double h) {
  cplx acc{0.0, 0.0};
  for (int k = 0; k <= j; ++k) {
    const double sgn = k % 2 == 0 ? 1.0 : -1.0;
    acc += sgn * binom(j, k) * f(R + (0.5 * j - k) * h);
  }
  return acc / std::pow(h, j);
}

}  // namespace

RadialSymbol::RadialSymbol(std::string name, int max_order, Engine engine)
    : name_(std::move(name)), max_order_(std::min(max_order, kMaxOrder)), engine_(std::move(engine)) {}

cplx RadialSymbol::operator()(double R) const {
  cplx v;
  engine_(R, 0, &v);
  return v;
}

cplx RadialSymbol::derivative(double R, int j) const {
  require_order(j, max_order_);
  std::array<cplx, kMaxOrder + 1> out{};
  engine_(R, j, out.data());
  return out[j];
}

std::vector<cplx> RadialSymbol::derivatives(double R, int jmax) const {
  require_order(jmax, max_order_);
  std::vector<cplx> out(jmax + 1);
  engine_(R, jmax, out.data());
  return out;
}

RadialSymbol RadialSymbol::conjugate() const {
  Engine inner = engine_;
  return RadialSymbol(name_ + "_conj", max_order_, [inner](double R, int jmax, cplx* out) {
    inner(R, jmax, out);
    for (int j = 0; j <= jmax; ++j) out[j] = std::conj(out[j]);
  });
}

RadialSymbol RadialSymbol::model(double gamma, double beta, int N) {
  if (!(gamma > 1.0)) throw DomainError("model symbol: gamma must exceed 1");
  return RadialSymbol("model", N, log_amplitude_engine(gamma, beta, true));
}

RadialSymbol RadialSymbol::mikhlin_log(double beta, int N) {
  return RadialSymbol("mikhlin_log", N, log_amplitude_engine(1.0, beta, false));
}

RadialSymbol RadialSymbol::power_phase(double alpha, double beta, int N) {
  auto amp = log_amplitude_engine(1.0, beta, false);
  return RadialSymbol("power_phase", N, [=](double R, int jmax, cplx* out) {
    std::array<cplx, kMaxOrder + 1> A{};
    amp(R, jmax, A.data());
    if (jmax == 0) {
      out[0] = A[0] * std::polar(1.0, std::pow(std::max(R, 0.0), alpha));
      return;
    }
    if (!(R > 0.0)) throw DomainError("power_phase: derivatives need R > 0");
    std::array<cplx, kMaxOrder + 2> G{};
    for (int i = 1; i <= jmax; ++i) G[i] = {0.0, falling(alpha, i) * std::pow(R, alpha - i)};
    std::array<cplx, kMaxOrder + 1> P{};
    exp_derivatives(std::polar(1.0, std::pow(R, alpha)), G.data(), jmax, P.data());
    for (int j = 0; j <= jmax; ++j) {
      cplx acc{0.0, 0.0};
      for (int i = 0; i <= j; ++i) acc += binom(j, i) * A[i] * P[j - i];
      out[j] = acc;
    }
  });
}

RadialSymbol RadialSymbol::constant(cplx c) {
  return RadialSymbol("constant", kMaxOrder, [c](double, int jmax, cplx* out) {
    out[0] = c;
    for (int j = 1; j <= jmax; ++j) out[j] = {0.0, 0.0};
  });
}

RadialSymbol RadialSymbol::tabulated(std::vector<double> R, std::vector<cplx> m, int N) {
  if (R.size() != m.size() || R.size() < 4) throw ConfigError("tabulated symbol: need at least 4 rows");
  if (R.front() != 0.0) throw ConfigError("tabulated symbol: value at R = 0 is required");
  for (std::size_t i = 1; i < R.size(); ++i) {
    if (!(R[i] > R[i - 1])) throw ConfigError("tabulated symbol: R must be strictly increasing");
  }
  std::vector<double> re(m.size()), im(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    re[i] = m[i].real();
    im[i] = m[i].imag();
  }
  using Makima = boost::math::interpolators::makima<std::vector<double>>;
  auto fre = std::make_shared<Makima>(std::vector<double>(R), std::move(re));
  auto fim = std::make_shared<Makima>(std::vector<double>(R), std::move(im));
  const double lo = R.front();
  const double hi = R.back();
  auto value = [=](double r) {
    const double x = std::clamp(r, lo, hi);
    return cplx{(*fre)(x), (*fim)(x)};
  };
  return RadialSymbol("tabulated", N, [=](double r, int jmax, cplx* out) {
    out[0] = value(r);
    if (jmax >= 1) {
      const double x = std::clamp(r, lo, hi);
      out[1] = {fre->prime(x), fim->prime(x)};
    }
    const double h = std::max(1e-3 * r, 1e-4);
    for (int j = 2; j <= jmax; ++j) out[j] = central_difference(value, r, j, h);
  });
}

RadialSymbol model_symbol(double gamma, double beta) { return RadialSymbol::model(gamma, beta); }

SymbolKind parse_symbol_kind(const std::string& s) {
  if (s == "model") return SymbolKind::model;
  if (s == "mikhlin_log") return SymbolKind::mikhlin_log;
  if (s == "power_phase") return SymbolKind::power_phase;
  if (s == "tabulated") return SymbolKind::tabulated;
  if (s == "identity") return SymbolKind::identity;
  throw ConfigError("unknown symbol kind '" + s + "'");
}

std::string to_string(SymbolKind k) {
  switch (k) {
    case SymbolKind::model: return "model";
    case SymbolKind::mikhlin_log: return "mikhlin_log";
    case SymbolKind::power_phase: return "power_phase";
    case SymbolKind::tabulated: return "tabulated";
    case SymbolKind::identity: return "identity";
  }
  return "unknown";
}

RadialSymbol read_tabulated_symbol(const std::filesystem::path& path, std::optional<cplx> value_at_zero, int N) {
  std::ifstream in(path);
  if (!in) throw ConfigError("tabulated symbol: cannot open " + path.string());
  std::vector<double> R;
  std::vector<cplx> m;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::replace(line.begin(), line.end(), ';', ' ');
    std::istringstream ss(line);
    double r, re, im;
    if (!(ss >> r)) continue;
    if (!(ss >> re >> im)) throw ConfigError("tabulated symbol: expected rows R, Re m, Im m");
    R.push_back(r);
    m.push_back({re, im});
  }
  if (R.empty() || R.front() != 0.0) {
    if (!value_at_zero) throw ConfigError("tabulated symbol: value at R = 0 is required");
    R.insert(R.begin(), 0.0);
    m.insert(m.begin(), *value_at_zero);
  }
  return RadialSymbol::tabulated(std::move(R), std::move(m), N);
}

RadialSymbol make_symbol(const SymbolSpec& spec, int N) {
  switch (spec.kind) {
    case SymbolKind::model: return RadialSymbol::model(spec.gamma, spec.beta, N);
    case SymbolKind::mikhlin_log: return RadialSymbol::mikhlin_log(spec.beta, N);
    case SymbolKind::power_phase: return RadialSymbol::power_phase(spec.alpha, spec.beta, N);
    case SymbolKind::tabulated: return read_tabulated_symbol(spec.table, spec.value_at_zero, std::min(N, 3));
    case SymbolKind::identity: return RadialSymbol::constant({1.0, 0.0});
  }
  throw ConfigError("unknown symbol kind");
}

cplx radial_derivative(const RadialSymbol& s, double R, int j) { return s.derivative(R, j); }

double pointwise_miyachi_ratio(const RadialSymbol& s, double R, int j, const LogParams& p) {
  if (!(R >= p.R0)) throw DomainError("pointwise_miyachi_ratio: R below R0");
  const double bound = std::pow(std::log(R), -p.beta) * std::pow(rho_unchecked(R, p.gamma), -j);
  return std::abs(s.derivative(R, j)) / bound;
}

namespace {

double ball_volume(double r, int d) { return d == 1 ? 2.0 * r : std::numbers::pi * r * r; }

// Largest |m'|/|m| across the radial range a box can see.
double phase_rate(const RadialSymbol& s, double r_lo, double r_hi) {
  if (s.max_order() < 1) return 0.0;
  double k = 0.0;
  for (int i = 0; i <= 8; ++i) {
    const double R = std::max(r_lo + (r_hi - r_lo) * i / 8.0, 1e-9);
    const auto dv = s.derivatives(R, 1);
    const double a = std::abs(dv[0]);
    if (a > 0.0) k = std::max(k, std::abs(dv[1]) / a);
  }
  return k;
}

}  // namespace

double localized_sobolev_norm(const RadialSymbol& s, const Ball& b, double theta, const LogParams& p,
                              const SobolevOptions& opt) {
  if (classify_ball(b, p) != BallVerdict::log_subdyadic) {
    throw DomainError("localized_sobolev_norm: ball is not log-subdyadic");
  }
  if (!(theta >= 0.0 && theta <= p.sigma)) throw DomainError("localized_sobolev_norm: theta outside [0, sigma]");
  if (opt.points_per_radius < 8) throw DomainError("localized_sobolev_norm: unresolved ball (under 8 cells per radius)");
  const int d = p.d;
  const double r = b.radius;
  const double scale = p.C1 * r / (BumpProfile::half_width * std::sqrt(static_cast<double>(d))) * opt.support_scale;
  const Point c{b.center[0] + opt.shift[0] * r, b.center[1] + opt.shift[1] * r};
  const double half_box = BumpProfile::half_width * scale * opt.pad;

  const double reach = half_box * std::sqrt(static_cast<double>(d));
  const double kappa = phase_rate(s, std::max(norm(c) - reach, 0.0), norm(c) + reach);
  double delta = r / opt.points_per_radius;
  if (kappa > 0.0) delta = std::min(delta, 0.25 / kappa);
  std::size_t m = 8;
  while (static_cast<double>(m) * delta < 2.0 * half_box) {
    m *= 2;
    if (m > opt.max_points_per_axis) throw DomainError("localized_sobolev_norm: local grid too large to resolve symbol");
  }
  delta = 2.0 * half_box / static_cast<double>(m);

  const TorusGrid g(d, m);
  ComplexBuffer buf(g.size());
  const BumpProfile bump;
  std::vector<double> axis0(m), axis1(d == 2 ? m : 1, 1.0), w0(m), w1(d == 2 ? m : 1, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    axis0[j] = c[0] - half_box + delta * static_cast<double>(j);
    w0[j] = bump((axis0[j] - c[0]) / scale);
    if (d == 2) {
      axis1[j] = c[1] - half_box + delta * static_cast<double>(j);
      w1[j] = bump((axis1[j] - c[1]) / scale);
    }
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t i0 = d == 1 ? i : i / m;
    const std::size_t i1 = d == 1 ? 0 : i % m;
    const double w = w0[i0] * w1[i1];
    if (w == 0.0) {
      buf[i] = {0.0, 0.0};
      continue;
    }
    const double R = d == 1 ? std::abs(axis0[i0]) : std::hypot(axis0[i0], axis1[i1]);
    buf[i] = s(R) * w;
  }
  fft_inplace(g, buf.data(), -1);
  const double zstep = 2.0 * std::numbers::pi / (static_cast<double>(m) * delta);
  long double acc = 0.0L;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point f = g.frequency_at(i);
    const double z = zstep * norm(f);
    const double wt = theta == 0.0 ? 1.0 : (z == 0.0 ? 0.0 : std::pow(z, 2.0 * theta));
    acc += static_cast<long double>(std::norm(buf[i])) * wt;
  }
  const double val = static_cast<double>(acc) * std::pow(delta, d) / std::pow(static_cast<double>(m), d);
  return std::sqrt(std::max(val, 0.0));
}

double normalized_miyachi_quantity(const RadialSymbol& s, const Ball& b, double theta, const LogParams& p,
                                   const SobolevOptions& opt) {
  const double RB = b.R_B();
  const double norm_val = localized_sobolev_norm(s, b, theta, p, opt);
  return std::pow(std::log(RB), p.beta) * std::pow(rho_unchecked(RB, p.gamma), theta) *
         norm_val / std::sqrt(ball_volume(b.radius, p.d));
}

std::vector<Ball> log_subdyadic_balls(double u_lo, double u_hi, int count, const LogParams& p) {
  std::vector<Ball> out;
  for (int i = 0; i < count; ++i) {
    const double u = count == 1 ? u_lo : u_lo + (u_hi - u_lo) * i / (count - 1);
    const double RB = std::exp(u);
    const double r = rho_unchecked(RB, p.gamma);
    out.push_back(Ball{{RB + r, 0.0}, r});
  }
  return out;
}

MiyachiReport miyachi_constant(const RadialSymbol& s, const std::vector<Ball>& balls,
                               const std::vector<double>& thetas, const LogParams& p, std::uint64_t seed,
                               const SobolevOptions& opt) {
  MiyachiReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& b : balls) {
    if (classify_ball(b, p) != BallVerdict::log_subdyadic) throw DomainError("miyachi_constant: ball is not log-subdyadic");
    SobolevOptions rescaled = opt;
    rescaled.support_scale = 0.6 + 0.4 * unit(rng);
    const double room = (1.0 - rescaled.support_scale) * p.C1;
    const double mag = room * unit(rng);
    const double ang = 2.0 * std::numbers::pi * unit(rng);
    rescaled.shift = p.d == 1 ? Point{mag * (unit(rng) < 0.5 ? -1.0 : 1.0), 0.0}
                              : Point{mag * std::cos(ang), mag * std::sin(ang)};
    double ball_max = 0.0;
    for (double theta : thetas) {
      for (int variant = 0; variant < 2; ++variant) {
        SobolevOptions o = variant == 0 ? opt : rescaled;
        MiyachiRecord rec;
        rec.ball = b;
        rec.R_B = b.R_B();
        rec.theta = theta;
        rec.bump = variant == 0 ? "canonical" : "rescaled";
        rec.quantity = normalized_miyachi_quantity(s, b, theta, p, o);
        o.points_per_radius *= 2;
        rec.refined = normalized_miyachi_quantity(s, b, theta, p, o);
        if (rec.quantity > 0.0) {
          rep.max_refinement_drift = std::max(rep.max_refinement_drift, std::abs(rec.refined / rec.quantity - 1.0));
        }
        ball_max = std::max(ball_max, rec.quantity);
        rep.constant = std::max(rep.constant, rec.quantity);
        rep.records.push_back(rec);
      }
    }
    rep.per_ball.push_back(ball_max);
    for (int j = 0; j <= std::min(p.N, s.max_order()); ++j) {
      const double R = std::max(b.R_B(), p.R0);
      rep.pointwise.push_back({j, R, pointwise_miyachi_ratio(s, R, j, p)});
    }
  }
  if (!rep.per_ball.empty()) {
    std::vector<double> sorted = rep.per_ball;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    rep.ball_spread = median > 0.0 ? sorted.back() / median : 0.0;
  }
  // Least-squares slope of log Q against log R_B for each positive theta.
  for (double theta : thetas) {
    if (theta <= 0.0) continue;
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rep.records) {
      if (r.theta == theta && r.bump == "canonical" && r.quantity > 0.0) {
        pts.emplace_back(std::log(r.R_B), std::log(r.quantity));
      }
    }
    if (pts.size() < 2) continue;
    double mx = 0.0, my = 0.0;
    for (auto& [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxy = 0.0, sxx = 0.0;
    for (auto& [x, y] : pts) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    rep.growth_slope = std::max(rep.growth_slope, slope);
    if (std::exp(pts.back().second - pts.front().second) > 2.0 && slope > 0.05) rep.growth_flag = true;
  }
  return rep;
}

ComplexMask symbol_mask(const RadialSymbol& s, const TorusGrid& g) {
  ComplexMask mask{g, ComplexBuffer(g.size())};
  if (g.d() == 1) {
    const std::size_t n = g.n();
    for (std::size_t i = 0; i <= n / 2; ++i) {
      const cplx v = s(static_cast<double>(i));
      mask.values[i] = v;
      if (i > 0 && i < n / 2) mask.values[n - i] = v;
    }
    return mask;
  }
  for (std::size_t i = 0; i < g.size(); ++i) mask.values[i] = s(g.frequency_norm(i));
  return mask;
}

SpectralField apply_multiplier(const SpectralField& F, const RadialSymbol& s) {
  return apply_mask(F, symbol_mask(s, F.grid));
}

std::pair<ComplexMask, ComplexMask> hi_lo_split(const RadialSymbol& s, const LogParams& p, const TorusGrid& g) {
  ComplexMask m = symbol_mask(s, g);
  ComplexMask lo{g, ComplexBuffer(g.size())};
  ComplexMask hi{g, ComplexBuffer(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double th = low_cutoff(g.frequency_norm(i), p.k0);
    lo.values[i] = m.values[i] * th;
    hi.values[i] = m.values[i] * (1.0 - th);
  }
  return {lo, hi};
}

RealMask hi_mask(const LogParams& p, const TorusGrid& g) {
  RealMask m{g, std::vector<double>(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) m.values[i] = 1.0 - low_cutoff(g.frequency_norm(i), p.k0);
  return m;
}

SpectralField hi_projection(const SpectralField& F, const LogParams& p) { return apply_mask(F, hi_mask(p, F.grid)); }

}  // namespace logsub
