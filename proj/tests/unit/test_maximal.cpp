#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "logsub/error.hpp"
#include "logsub/maximal.hpp"
#include "oracles.hpp"

using namespace logsub;

namespace {

RealField random_weight(const TorusGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  RealField w{g, std::vector<double>(g.size())};
  for (auto& v : w.values) v = e(rng);
  return w;
}

// Ladder radii 0, 1, 2, 4, ... plus the torus mean, by direct summation.
std::vector<double> ladder_oracle(const std::vector<double>& w) {
  const long n = long(w.size());
  double mean = 0.0;
  for (double v : w) mean += v;
  mean /= double(n);
  std::vector<double> out(w.size(), mean);
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = std::max(out[i], w[i]);
  for (long R = 1; 2 * R + 1 <= n / 2 + 1; R *= 2) {
    const auto avg = oracle::ball_average_1d(w, R);
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = std::max(out[i], avg[i]);
  }
  return out;
}

}  // namespace

TEST(AveragingKernel, UnitMassAndLowerBound) {
  const TorusGrid g(1, 2048);
  const RealField k = AveragingKernel::sampled(g, 0.05);
  double mass = 0.0;
  for (double v : k.values) mass += v * g.cell_volume();
  EXPECT_NEAR(mass, 1.0, 1e-14);
  EXPECT_NEAR(AveragingKernel::lower_bound(1), std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  const RealField one = RealField::constant(g, 2.0);
  for (double v : smooth_average(one, 0.05).values) EXPECT_NEAR(v, 2.0, 1e-12);
}

TEST(HardyLittlewood, MatchesLadderOracle) {
  for (std::size_t n : {16u, 64u, 256u}) {
    const TorusGrid g(1, n);
    const RealField w = random_weight(g, n);
    const RealField M = hl_maximal(w);
    const auto ref = ladder_oracle(w.values);
    auto all = oracle::hl_maximal_all_radii_1d(w.values);
    const double mean = std::accumulate(w.values.begin(), w.values.end(), 0.0) / double(n);
    for (auto& v : all) v = std::max(v, mean);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(M.values[i], ref[i], 1e-12 * ref[i]);
      EXPECT_GE(M.values[i], w.values[i]);
      EXPECT_LE(M.values[i], all[i] * (1.0 + 1e-12) + 1e-15);
      EXPECT_GE(3.0 * M.values[i], all[i]);
    }
  }
}

TEST(HardyLittlewood, ConstantsAndScaling) {
  for (int d : {1, 2}) {
    const TorusGrid g(d, d == 1 ? 512 : 32);
    for (double v : hl_maximal(RealField::constant(g, 4.0)).values) EXPECT_NEAR(v, 4.0, 1e-12);
    const RealField w = random_weight(g, 8);
    RealField w5 = w;
    for (auto& v : w5.values) v *= 5.0;
    const RealField a = hl_maximal(w), b = hl_maximal(w5);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_NEAR(b.values[i], 5.0 * a.values[i], 1e-12 * b.values[i]);
      EXPECT_GE(a.values[i], w.values[i] * (1.0 - 1e-12));
    }
  }
  RealField bad = RealField::constant(TorusGrid(1, 64), 1.0);
  bad.values[3] = -1.0;
  EXPECT_THROW(hl_maximal(bad), DomainError);
}

TEST(HardyLittlewood, PowerVariant) {
  const TorusGrid g(1, 128);
  const RealField w = random_weight(g, 12);
  const RealField M2 = hl_maximal_s(w, 2.0);
  RealField sq = w;
  for (auto& v : sq.values) v *= v;
  const RealField Msq = hl_maximal(sq);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(M2.values[i], std::sqrt(Msq.values[i]), 1e-12);
  const RealField M1 = hl_maximal(w);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_GE(M2.values[i], M1.values[i] * (1.0 - 1e-12));
  EXPECT_THROW(hl_maximal_s(w, 1.0), DomainError);
}

TEST(Dilation, MatchesDirectWindowMax) {
  const TorusGrid g(1, 256);
  const RealField w = random_weight(g, 3);
  for (long R : {0L, 1L, 5L, 40L, 200L}) {
    const RealField out = ball_max_dilation(w, (double(R) + 0.25) * g.spacing());
    const auto ref = oracle::dilation_1d(w.values, std::min(R, 128L));
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(out.values[i], ref[i]) << "R=" << R;
  }
  const TorusGrid g2(2, 32);
  const RealField w2 = random_weight(g2, 4);
  const double rc = 3.2;
  const RealField out2 = ball_max_dilation(w2, rc * g2.spacing());
  for (long i = 0; i < 32; ++i) {
    for (long j = 0; j < 32; ++j) {
      double m = 0.0;
      for (long a = -3; a <= 3; ++a) {
        for (long b = -3; b <= 3; ++b) {
          if (double(a * a + b * b) > rc * rc) continue;
          m = std::max(m, w2.values[std::size_t(((i + a + 32) % 32) * 32 + (j + b + 32) % 32)]);
        }
      }
      EXPECT_EQ(out2.values[std::size_t(i * 32 + j)], m);
    }
  }
}

TEST(LogMaximal, ConstantWeightClosedForm) {
  for (double beta : {0.0, 0.5, 1.0}) {
    const LogParams p = LogParams::defaults(1, 2.0, beta);
    const TorusGrid g(1, 4096);
    const ScaleGrid s = default_scale_grid(p, g);
    const RealField out = log_maximal(RealField::constant(g, 1.0), p, s);
    const double ref = std::pow(std::log(1.0 / s.t_max()), -2.0 * beta);
    for (double v : out.values) EXPECT_NEAR(v / ref, 1.0, 1e-10);
  }
}

TEST(LogMaximal, DominatesTheWeightedAverage) {
  const LogParams p = LogParams::defaults();
  const TorusGrid g(1, 2048);
  const ScaleGrid s = default_scale_grid(p, g);
  const RealField w = random_weight(g, 21);
  const RealField out = log_maximal(w, p, s);
  for (const auto& node : s.nodes) {
    const RealField avg = smooth_average(w, node.t);
    const double f = std::pow(node.u, -2.0 * p.beta);
    for (std::size_t i = 0; i < g.size(); i += 7) EXPECT_GE(out.values[i], f * avg.values[i] * (1.0 - 1e-10));
  }
}

TEST(RhsWeight, ComposesTheMaximalOperators) {
  const LogParams p = LogParams::defaults();
  const TorusGrid g(1, 1024);
  const ScaleGrid s = default_scale_grid(p, g);
  const RealField w = random_weight(g, 5);
  RealField ref = w;
  for (int i = 0; i < 4; ++i) ref = hl_maximal(ref);
  ref = log_maximal(ref, p, s);
  ref = hl_maximal(hl_maximal(ref));
  const RealField out = rhs_weight(w, p, s);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(out.values[i], ref.values[i]);
  const RealField one = rhs_weight(RealField::constant(g, 1.0), p, s);
  for (double v : one.values) EXPECT_NEAR(v, std::pow(std::log(1.0 / s.t_max()), -2.0 * p.beta), 1e-10);
}
