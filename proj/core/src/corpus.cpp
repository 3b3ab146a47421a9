#include "logsub/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "logsub/error.hpp"
#include "logsub/geometry.hpp"
#include "logsub/profiles.hpp"

namespace logsub {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x5eedu};
  return std::mt19937_64(seq);
}

void check_band(const CorpusSpec& s, const TorusGrid& g) {
  if (s.k_lo < 0 || s.k_lo >= s.k_hi) throw DomainError("corpus: band needs 0 <= k_lo < k_hi");
  if (!(std::ldexp(1.0, s.k_hi) < static_cast<double>(g.n()) / 2.0)) {
    throw DomainError("corpus: band exceeds the grid's resolvable range");
  }
}

// Visits every integer frequency with 2^k_lo <= |xi| <= 2^k_hi in a fixed
// lexicographic order.
template <class Visit>
void for_band(const CorpusSpec& s, int d, Visit&& visit) {
  const long K = 1L << s.k_hi;
  const double lo = std::ldexp(1.0, s.k_lo);
  const double hi = std::ldexp(1.0, s.k_hi);
  const long K1 = d == 2 ? K : 0;
  for (long a = -K; a <= K; ++a) {
    for (long b = -K1; b <= K1; ++b) {
      const double r = std::hypot(static_cast<double>(a), static_cast<double>(b));
      if (r >= lo && r <= hi) visit(a, b, r);
    }
  }
}

Field finish(SpectralField F) {
  const double nrm = F.l2_norm();
  if (nrm > 0.0) {
    for (auto& c : F.coeffs) c /= nrm;
  }
  return inverse(F);
}

double smooth_step(double x) { return BumpProfile::cdf((x - 0.5) / 2.0); }

}  // namespace

std::string to_string(CorpusKind k) {
  switch (k) {
    case CorpusKind::random_bandlimited: return "random_bandlimited";
    case CorpusKind::wave_packet: return "wave_packet";
    case CorpusKind::tone: return "tone";
    case CorpusKind::chirp_log: return "chirp_log";
  }
  return "unknown";
}

CorpusKind parse_corpus_kind(const std::string& s) {
  if (s == "random_bandlimited") return CorpusKind::random_bandlimited;
  if (s == "wave_packet") return CorpusKind::wave_packet;
  if (s == "tone") return CorpusKind::tone;
  if (s == "chirp_log") return CorpusKind::chirp_log;
  throw ConfigError("unknown corpus kind '" + s + "'");
}

std::vector<Field> gen_corpus(const CorpusSpec& spec, const TorusGrid& g) {
  std::vector<Field> out;
  if (spec.count == 0) return out;
  check_band(spec, g);
  const int d = g.d();
  auto rng = make_rng(spec.seed, static_cast<std::uint64_t>(spec.kind));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t m = 0; m < spec.count; ++m) {
    SpectralField F = SpectralField::zeros(g);
    switch (spec.kind) {
      case CorpusKind::random_bandlimited: {
        for_band(spec, d, [&](long a, long b, double) {
          const double re = normal(rng);
          const double im = normal(rng);
          F.coeffs[g.index_of_frequency(a, b)] = {re, im};
        });
        break;
      }
      case CorpusKind::wave_packet: {
        const double mag = std::exp2(spec.k_lo + 0.5 + (spec.k_hi - spec.k_lo - 1.0) * unit(rng));
        const double ang = kTwoPi * unit(rng);
        const double side = unit(rng) < 0.5 ? -1.0 : 1.0;
        const Point xi0 = d == 1 ? Point{side * mag, 0.0} : Point{mag * std::cos(ang), mag * std::sin(ang)};
        const Point x0{kTwoPi * unit(rng), d == 2 ? kTwoPi * unit(rng) : 0.0};
        const double width = aperture_unchecked(1.0 / mag, spec.gamma);
        for_band(spec, d, [&](long a, long b, double) {
          const double da = static_cast<double>(a) - xi0[0];
          const double db = static_cast<double>(b) - xi0[1];
          const double env = std::exp(-0.5 * (da * da + db * db) * width * width);
          if (env < 1e-300) return;
          F.coeffs[g.index_of_frequency(a, b)] = std::polar(env, -(a * x0[0] + b * x0[1]));
        });
        break;
      }
      case CorpusKind::tone: {
        const int k = spec.k_lo + static_cast<int>(m % static_cast<std::size_t>(spec.k_hi - spec.k_lo));
        const long xi = std::lround(1.5 * std::ldexp(1.0, k));
        const bool second_axis = d == 2 && (m / static_cast<std::size_t>(spec.k_hi - spec.k_lo)) % 2 == 1;
        F.coeffs[second_axis ? g.index_of_frequency(0, xi) : g.index_of_frequency(xi, 0)] = {1.0, 0.0};
        break;
      }
      case CorpusKind::chirp_log: {
        const double s = 0.25 * static_cast<double>(m % 4);
        const Point x0{kTwoPi * unit(rng), d == 2 ? kTwoPi * unit(rng) : 0.0};
        for_band(spec, d, [&](long a, long b, double r) {
          const double l2 = std::log2(r);
          const double win = smooth_step(l2 - spec.k_lo) * (1.0 - smooth_step(l2 - spec.k_hi + 1.0));
          if (win == 0.0) return;
          const double phase = -spec.chirp_strength * std::pow(std::log(std::numbers::e + r), spec.gamma);
          F.coeffs[g.index_of_frequency(a, b)] = std::polar(win * std::pow(r, -s), phase - (a * x0[0] + b * x0[1]));
        });
        break;
      }
    }
    out.push_back(finish(std::move(F)));
  }
  return out;
}

std::string MixedCorpusSpec::describe() const {
  return "seed=" + std::to_string(seed) + " random_bandlimited=" + std::to_string(random_bandlimited) +
         " wave_packet=" + std::to_string(wave_packet) + " tone=" + std::to_string(tone) +
         " chirp_log=" + std::to_string(chirp_log) + " band=[2^" + std::to_string(k_lo) + ",2^" +
         std::to_string(k_hi) + "]";
}

std::vector<CorpusMember> gen_mixed_corpus(const MixedCorpusSpec& spec, const TorusGrid& g) {
  std::vector<CorpusMember> out;
  const std::pair<CorpusKind, std::size_t> parts[] = {{CorpusKind::random_bandlimited, spec.random_bandlimited},
                                                      {CorpusKind::wave_packet, spec.wave_packet},
                                                      {CorpusKind::tone, spec.tone},
                                                      {CorpusKind::chirp_log, spec.chirp_log}};
  for (const auto& [kind, count] : parts) {
    CorpusSpec cs{spec.seed, kind, count, spec.k_lo, spec.k_hi, spec.gamma, 1.0};
    auto fields = gen_corpus(cs, g);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      out.push_back({to_string(kind) + "#" + std::to_string(i), std::move(fields[i])});
    }
  }
  return out;
}

std::string to_string(WeightKind k) {
  switch (k) {
    case WeightKind::constant: return "constant";
    case WeightKind::spike: return "spike";
    case WeightKind::smoothed_random: return "smoothed_random";
    case WeightKind::power_singularity: return "power_singularity";
    case WeightKind::narrow_bump: return "narrow_bump";
  }
  return "unknown";
}

WeightKind parse_weight_kind(const std::string& s) {
  if (s == "constant") return WeightKind::constant;
  if (s == "spike") return WeightKind::spike;
  if (s == "smoothed_random") return WeightKind::smoothed_random;
  if (s == "power_singularity") return WeightKind::power_singularity;
  if (s == "narrow_bump") return WeightKind::narrow_bump;
  throw ConfigError("unknown weight kind '" + s + "'");
}

RealField gen_weight(const WeightSpec& spec, const TorusGrid& g) {
  auto rng = make_rng(spec.seed, 100 + static_cast<std::uint64_t>(spec.kind));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int d = g.d();
  const Point x0{kTwoPi * unit(rng), d == 2 ? kTwoPi * unit(rng) : 0.0};
  RealField w = RealField::constant(g, 0.0);
  auto periodic_dist = [&](Point x) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      double dx = std::fmod(std::abs(x[a] - x0[a]), kTwoPi);
      dx = std::min(dx, kTwoPi - dx);
      s += dx * dx;
    }
    return std::sqrt(s);
  };
  switch (spec.kind) {
    case WeightKind::constant:
      std::fill(w.values.begin(), w.values.end(), 1.0);
      break;
    case WeightKind::spike: {
      const double h = g.spacing();
      const auto i0 = static_cast<std::size_t>(std::lround(x0[0] / h)) % g.n();
      const auto i1 = static_cast<std::size_t>(std::lround(x0[1] / h)) % g.n();
      w.values[d == 1 ? i0 : i0 * g.n() + i1] = 1.0;
      break;
    }
    case WeightKind::smoothed_random: {
      // exp of a random trigonometric polynomial with |xi| <= 8.
      struct Mode { long a, b; double amp, phase; };
      std::vector<Mode> modes;
      const long K = 8, K1 = d == 2 ? 8 : 0;
      for (long a = -K; a <= K; ++a) {
        for (long b = -K1; b <= K1; ++b) {
          if ((a == 0 && b == 0) || a * a + b * b > K * K) continue;
          modes.push_back({a, b, 0.35 * normal(rng) / std::sqrt(static_cast<double>(modes.size() + 1) / 4.0 + 1.0),
                           kTwoPi * unit(rng)});
        }
      }
      for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.position_at(i);
        double s = 0.0;
        for (const auto& m : modes) s += m.amp * std::cos(m.a * x[0] + m.b * x[1] + m.phase);
        w.values[i] = std::exp(s);
      }
      break;
    }
    case WeightKind::power_singularity: {
      constexpr double cutoff = 1e-4;
      for (std::size_t i = 0; i < g.size(); ++i) {
        w.values[i] = std::pow(std::max(periodic_dist(g.position_at(i)), cutoff), -0.5);
      }
      break;
    }
    case WeightKind::narrow_bump: {
      constexpr double width = 0.01;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double z = periodic_dist(g.position_at(i)) / width;
        w.values[i] = std::exp(-0.5 * z * z);
      }
      break;
    }
  }
  return w;
}

std::vector<WeightMember> gen_weights(const std::vector<WeightKind>& kinds, std::uint64_t seed, const TorusGrid& g) {
  std::vector<WeightMember> out;
  for (auto k : kinds) out.push_back({to_string(k), gen_weight({k, seed}, g)});
  return out;
}

}  // namespace logsub
