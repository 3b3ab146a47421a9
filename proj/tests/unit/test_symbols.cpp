#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "logsub/error.hpp"
#include "logsub/symbols.hpp"
#include "oracles.hpp"

using namespace logsub;

namespace {

cplx model_value(double R, double gamma, double beta) {
  const double L = std::log(std::exp(1.0) + R);
  return std::pow(L, -beta) * std::polar(1.0, std::pow(L, gamma));
}

}  // namespace

TEST(ModelSymbol, ClosedFormValues) {
  const RadialSymbol m = RadialSymbol::model(2.0, 1.0);
  EXPECT_NEAR(std::abs(m(0.0) - std::polar(1.0, 1.0)), 0.0, 1e-15);
  for (double R : {1.0, 10.0, 1e3, 1e6}) EXPECT_NEAR(std::abs(m(R) - model_value(R, 2.0, 1.0)), 0.0, 1e-14);
  const RadialSymbol id = RadialSymbol::constant({1.0, 0.0});
  EXPECT_EQ(id(123.0), cplx(1.0));
  EXPECT_EQ(id.derivative(123.0, 3), cplx(0.0));
  const RadialSymbol ml = RadialSymbol::mikhlin_log(0.5);
  EXPECT_NEAR(ml(100.0).real(), std::pow(std::log(std::exp(1.0) + 100.0), -0.5), 1e-15);
  EXPECT_EQ(ml(100.0).imag(), 0.0);
  EXPECT_NEAR(std::abs(m.conjugate()(50.0) - std::conj(m(50.0))), 0.0, 0.0);
}

TEST(ModelSymbol, DerivativesMatchFiniteDifferences) {
  for (double gamma : {1.5, 2.0, 3.0}) {
    const RadialSymbol m = RadialSymbol::model(gamma, 1.0);
    auto f = [&](double R) { return model_value(R, gamma, 1.0); };
    for (double R : {20.0, 500.0, 3e4}) {
      for (int j = 1; j <= 3; ++j) {
        const cplx exact = m.derivative(R, j);
        const cplx fd = oracle::central_difference(f, R, j, 1e-4 * R);
        EXPECT_LE(std::abs(exact - fd), 1e-3 * std::abs(exact) + 1e-12) << "gamma=" << gamma << " R=" << R << " j=" << j;
      }
    }
  }
  const RadialSymbol pp = RadialSymbol::power_phase(0.5, 1.0);
  auto g = [](double R) { return std::pow(std::log(std::exp(1.0) + R), -1.0) * std::polar(1.0, std::sqrt(R)); };
  EXPECT_LE(std::abs(pp.derivative(400.0, 1) - oracle::central_difference(g, 400.0, 1, 1e-3)), 1e-8);
  EXPECT_THROW(RadialSymbol::model(2.0, 1.0, 3).derivative(10.0, 4), DomainError);
}

TEST(ModelSymbol, PointwiseMiyachiRatiosBounded) {
  const LogParams p = LogParams::defaults();
  const RadialSymbol m = RadialSymbol::model(2.0, 1.0);
  for (int j = 0; j <= 3; ++j) {
    double lo = INFINITY, hi = 0.0;
    for (double u = 4.0; u <= 20.0; u += 0.5) {
      const double r = pointwise_miyachi_ratio(m, std::exp(u), j, p);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    EXPECT_TRUE(std::isfinite(hi));
    EXPECT_LE(hi, 4.0 * std::pow(2.0, j) + 1.0) << "j=" << j;
  }
  EXPECT_THROW(pointwise_miyachi_ratio(m, 2.0, 1, p), DomainError);
}

TEST(ModelSymbol, ClassicalMikhlinRatioGrows) {
  const LogParams p = LogParams::defaults();
  const RadialSymbol m = RadialSymbol::model(2.0, 1.0);
  double prev = 0.0;
  for (int j = 3; j <= 6; ++j) {
    const double L = std::exp2(j);
    const double v = std::abs(m.derivative(std::exp(L), 1)) * std::exp(L) * std::pow(L, p.beta);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Sobolev, HomogeneousInTheSymbol) {
  const LogParams p = LogParams::defaults();
  const Ball b = log_subdyadic_balls(8.0, 8.0, 1, p).front();
  const RadialSymbol m = RadialSymbol::model(2.0, 1.0);
  const RadialSymbol m3("scaled", 8, [&](double R, int jmax, cplx* out) {
    const auto dv = m.derivatives(R, jmax);
    for (int j = 0; j <= jmax; ++j) out[j] = 3.0 * dv[j];
  });
  for (double theta : {0.0, 1.0, 1.5}) {
    const double a = localized_sobolev_norm(m, b, theta, p);
    EXPECT_GT(a, 0.0);
    EXPECT_NEAR(localized_sobolev_norm(m3, b, theta, p) / a, 3.0, 1e-10);
    EXPECT_NEAR(localized_sobolev_norm(m.conjugate(), b, theta, p) / a, 1.0, 1e-8);
  }
  EXPECT_THROW(localized_sobolev_norm(m, Ball{{1e5, 0.0}, 1.0}, 1.0, p), DomainError);
}

TEST(Sobolev, MiyachiConstantStableAcrossBalls) {
  const LogParams p = LogParams::defaults();
  const auto balls = log_subdyadic_balls(6.0, 14.0, 5, p);
  const MiyachiReport rep = miyachi_constant(RadialSymbol::model(2.0, 1.0), balls, {0.0, 1.0, p.sigma}, p);
  EXPECT_TRUE(std::isfinite(rep.constant));
  EXPECT_EQ(rep.per_ball.size(), balls.size());
  EXPECT_LE(rep.ball_spread, 3.0);
  EXPECT_LE(rep.max_refinement_drift, 0.1);
}

TEST(Sobolev, BallsAreLogSubdyadic) {
  const LogParams p = LogParams::defaults();
  for (const Ball& b : log_subdyadic_balls(4.0, 20.0, 12, p)) EXPECT_EQ(classify_ball(b, p), BallVerdict::log_subdyadic);
}

TEST(Multiplier, IdentityAndModulus) {
  const TorusGrid g(1, 1024);
  SpectralField F = SpectralField::zeros(g);
  for (std::size_t i = 0; i < g.size(); ++i) F.coeffs[i] = {std::sin(double(i)), std::cos(3.0 * i)};
  const SpectralField same = apply_multiplier(F, RadialSymbol::constant({1.0, 0.0}));
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(same.coeffs[i], F.coeffs[i]);
  const RadialSymbol m = RadialSymbol::model(2.0, 0.0);
  EXPECT_NEAR(apply_multiplier(F, m).l2_norm() / F.l2_norm(), 1.0, 1e-12);
  const ComplexMask mask = symbol_mask(m, g);
  EXPECT_EQ(mask.values[g.index_of_frequency(37)], mask.values[g.index_of_frequency(-37)]);
  const TorusGrid g2(2, 32);
  const ComplexMask mask2 = symbol_mask(m, g2);
  EXPECT_NEAR(std::abs(mask2.values[g2.index_of_frequency(3, 4)] - m(5.0)), 0.0, 1e-15);
}

TEST(Multiplier, HiLoSplitSumsToSymbol) {
  const LogParams p = LogParams::defaults();
  const TorusGrid g(1, 512);
  const RadialSymbol m = RadialSymbol::model(2.0, 1.0);
  const auto [lo, hi] = hi_lo_split(m, p, g);
  const ComplexMask full = symbol_mask(m, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(std::abs(lo.values[i] + hi.values[i] - full.values[i]), 0.0, 1e-15);
    const double r = g.frequency_norm(i);
    if (r <= 8.0) EXPECT_EQ(hi.values[i], cplx(0.0));
    if (r >= 16.0) EXPECT_EQ(lo.values[i], cplx(0.0));
  }
}

TEST(Tabulated, InterpolatesAndValidates) {
  std::vector<double> R;
  std::vector<cplx> v;
  for (int i = 0; i <= 4000; ++i) {
    R.push_back(0.05 * i);
    v.push_back(model_value(R.back(), 2.0, 1.0));
  }
  const RadialSymbol t = RadialSymbol::tabulated(R, v);
  for (double x : {0.0, 1.234, 77.77, 199.9}) EXPECT_NEAR(std::abs(t(x) - model_value(x, 2.0, 1.0)), 0.0, 1e-5);
  EXPECT_NEAR(std::abs(t.derivative(50.0, 1) - RadialSymbol::model(2.0, 1.0).derivative(50.0, 1)), 0.0, 1e-4);

  EXPECT_THROW(RadialSymbol::tabulated({1.0, 2.0, 3.0, 4.0}, {1.0, 1.0, 1.0, 1.0}), ConfigError);
  EXPECT_THROW(RadialSymbol::tabulated({0.0, 2.0, 2.0, 4.0}, {1.0, 1.0, 1.0, 1.0}), ConfigError);

  const auto path = std::filesystem::temp_directory_path() / "logsub_symbol_table.csv";
  {
    std::ofstream out(path);
    out << "# R, re, im\n";
    for (int i = 1; i <= 10; ++i) out << i << ", " << 1.0 / i << ", 0\n";
  }
  EXPECT_THROW(read_tabulated_symbol(path, std::nullopt), ConfigError);
  const RadialSymbol fromfile = read_tabulated_symbol(path, cplx(1.0, 0.0));
  EXPECT_NEAR(fromfile(4.0).real(), 0.25, 1e-12);
  std::filesystem::remove(path);
  EXPECT_THROW(parse_symbol_kind("bogus"), ConfigError);
  EXPECT_EQ(parse_symbol_kind(to_string(SymbolKind::power_phase)), SymbolKind::power_phase);
}
