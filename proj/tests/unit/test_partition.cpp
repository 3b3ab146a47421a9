#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "logsub/error.hpp"
#include "logsub/partition.hpp"
#include "logsub/profiles.hpp"
#include "oracles.hpp"

using namespace logsub;

namespace {

Field random_band_field(const TorusGrid& g, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  SpectralField F = SpectralField::zeros(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.frequency_norm(i);
    if (r >= lo && r <= hi) F.coeffs[i] = {nd(rng), nd(rng)};
  }
  return inverse(F);
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST(Profiles, BumpTelescopesToOne) {
  const BumpProfile b;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    double s = 0.0;
    for (int m = -6; m <= 6; ++m) s += b(x - m);
    EXPECT_NEAR(s, 1.0, 1e-14);
  }
  EXPECT_EQ(b(0.76), 0.0);
  EXPECT_EQ(b(-0.76), 0.0);
  EXPECT_NEAR(b(0.0), 1.0, 1e-15);
  EXPECT_NEAR(BumpProfile::cdf(0.1) + BumpProfile::cdf(-0.1), 1.0, 1e-14);
}

TEST(Profiles, DyadicAndLittlewoodPaley) {
  const DyadicProfile chi;
  for (double r : {3.0, 17.5, 1000.0, 123456.0}) {
    double s = 0.0;
    for (int k = -5; k <= 30; ++k) s += chi(std::ldexp(r, -k));
    EXPECT_NEAR(s, 1.0, 1e-14);
  }
  for (double r : {0.3, 0.5, 0.7, 1.0, 1.3, 1.99, 2.0, 3.0}) EXPECT_NEAR(lp_profile(r), oracle::lp_profile(r), 1e-15);
  EXPECT_EQ(low_cutoff(8.0, 3), 1.0);
  EXPECT_EQ(low_cutoff(16.0, 3), 0.0);
}

TEST(Partition, SumExamples) {
  const LogParams p = LogParams::defaults();
  const int kmax = 15;
  EXPECT_EQ(partition_sum({std::ldexp(1.0, p.k0 - 2), 0.0}, p, kmax), 0.0);
  EXPECT_NEAR(partition_sum({std::ldexp(1.0, p.k0 + 2), 0.0}, p, kmax), 1.0, 1e-12);
  EXPECT_NEAR(partition_sum({-1000.0, 0.0}, p, kmax), 1.0, 1e-12);
  EXPECT_NEAR(partition_sum({std::ldexp(1.0, kmax), 0.0}, p, kmax), 1.0, 1e-12);
}

TEST(Partition, IdentityOnRandomFrequencies) {
  for (int d : {1, 2}) {
    const LogParams p = LogParams::defaults(d);
    const int kmax = d == 1 ? 15 : 9;
    std::mt19937_64 rng(42 + d);
    std::uniform_real_distribution<double> u(std::log(std::ldexp(1.0, p.k0 + 1)), std::log(std::ldexp(1.0, kmax)));
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const double r = std::exp(u(rng));
      const double a = d == 1 ? (i % 2 ? 0.0 : std::numbers::pi) : ang(rng);
      worst = std::max(worst, std::abs(partition_sum({r * std::cos(a), r * std::sin(a)}, p, kmax) - 1.0));
    }
    EXPECT_LE(worst, 1e-10) << "d=" << d;
  }
}

TEST(Partition, OverlapIsBounded) {
  const LogParams p = LogParams::defaults();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(5.0, 2000.0);
  for (int i = 0; i < 500; ++i) {
    const std::size_t ov = partition_overlap({u(rng), 0.0}, p, 12);
    EXPECT_GE(ov, 1u);
    EXPECT_LE(ov, 8u);
  }
}

TEST(Partition, CellsAndRelevance) {
  const LogParams p = LogParams::defaults();
  EXPECT_THROW(enumerate_cells(p.k0 - 1, p, 12), DomainError);
  EXPECT_THROW(enumerate_cells(13, p, 12), DomainError);
  for (int k = p.k0; k <= 12; ++k) {
    const auto cells = enumerate_cells(k, p, 12);
    ASSERT_FALSE(cells.empty());
    for (const auto& c : cells) {
      EXPECT_TRUE(cell_is_relevant(k, c.ell, p));
      EXPECT_NEAR(c.r_k, lattice_spacing(k, p), 0.0);
      EXPECT_NEAR(c.center[0], c.r_k * double(c.ell[0]), 1e-9);
      EXPECT_EQ(c.ell[1], 0);
    }
  }
  // Cells far outside the annulus are irrelevant.
  const long far = long(std::ldexp(4.0, 10) / lattice_spacing(10, p));
  EXPECT_FALSE(cell_is_relevant(10, {far, 0}, p));
  EXPECT_FALSE(cell_is_relevant(10, {0, 0}, p));
}

TEST(Partition, CenterMagnitudesAtLargeLevels) {
  const LogParams p = LogParams::defaults();
  for (int k = 20; k <= 30; ++k) {
    for (const auto& c : enumerate_cells(k, p, 40)) {
      const double m = norm(c.center) / std::ldexp(1.0, k);
      EXPECT_GE(m, 0.5);
      EXPECT_LE(m, 1.8);
    }
  }
}

TEST(Partition, CellCountExponent) {
  for (double gamma : {1.5, 2.0, 3.0}) {
    LogParams p = LogParams::defaults(1, gamma);
    std::vector<double> x, y;
    for (int k = 16; k <= 48; ++k) {
      x.push_back(std::log(double(k)));
      y.push_back(std::log(double(enumerate_cells(k, p, 60).size())));
    }
    EXPECT_NEAR(slope(x, y), gamma - 1.0, 0.15) << "gamma=" << gamma;
  }
}

TEST(Project, ReconstructsBandLimitedField) {
  for (int d : {1, 2}) {
    const TorusGrid g(d, d == 1 ? 4096 : 256);
    const LogParams p = LogParams::defaults(d);
    const int kmax = g.max_annulus();
    const Field f = random_band_field(g, std::ldexp(1.0, p.k0 + 1), std::ldexp(1.0, kmax), 7);
    const SpectralField F = forward(f);
    SpectralField sum = SpectralField::zeros(g);
    for (const auto& c : all_cells(p, kmax)) {
      const SparseSpectral piece = project_sparse(F, c, p);
      for (std::size_t i = 0; i < piece.index.size(); ++i) sum.coeffs[piece.index[i]] += piece.value[i];
    }
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(sum.coeffs[i] - F.coeffs[i]));
    EXPECT_LE(err, 1e-12) << "d=" << d;
  }
}

TEST(Project, DenseMatchesSparseAndCutoff) {
  const TorusGrid g(1, 2048);
  const LogParams p = LogParams::defaults();
  const SpectralField F = forward(random_band_field(g, 16.0, 256.0, 9));
  const auto cells = enumerate_cells(7, p, g.max_annulus());
  const Cell& c = cells[cells.size() / 3];
  const SpectralField dense = project(F, c, p);
  const SpectralField back = project_sparse(F, c, p).densify();
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(dense.coeffs[i], back.coeffs[i]);
    EXPECT_NEAR(std::abs(dense.coeffs[i] - F.coeffs[i] * cell_cutoff(c, g.frequency_at(i), p)), 0.0, 1e-15);
  }
  const auto big = enumerate_cells(12, p, 12);
  EXPECT_THROW(project(forward(Field::zeros(TorusGrid(1, 256))), big.front(), p), DomainError);
}

TEST(Bessel, FiniteAndUniformAcrossLevels) {
  const TorusGrid g(1, 4096);
  const LogParams p = LogParams::defaults();
  double lo = INFINITY, hi = 0.0;
  for (int k = 5; k <= 8; ++k) {
    const Field f = random_band_field(g, std::ldexp(0.6, k), std::ldexp(1.6, k), 100 + k);
    const BesselResult r = bessel_ratio(f, k, p);
    EXPECT_TRUE(std::isfinite(r.ratio));
    EXPECT_GT(r.ratio, 0.0);
    EXPECT_GT(r.lattice_terms, 0u);
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  EXPECT_LE(hi / lo, 4.0);
  EXPECT_EQ(bessel_ratio(Field::zeros(g), 6, p).ratio, 0.0);
}

TEST(Inventory, WritesOneRowPerCell) {
  const LogParams p = LogParams::defaults();
  const auto cells = enumerate_cells(6, p, 10);
  std::ostringstream os;
  write_cell_inventory(os, cells);
  std::size_t lines = 0;
  for (char ch : os.str()) lines += ch == '\n';
  EXPECT_EQ(lines, cells.size() + 1);
}
