#include "logsub/profiles.hpp"

#include <boost/math/interpolators/quintic_hermite.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <memory>
#include <vector>

namespace logsub {

namespace {

double mu_raw(double x) {
  const double y = 1.0 - 16.0 * x * x;
  return y > 0.0 ? std::exp(-1.0 / y) : 0.0;
}

double mu_raw_prime(double x) {
  const double y = 1.0 - 16.0 * x * x;
  return y > 0.0 ? std::exp(-1.0 / y) * (-32.0 * x / (y * y)) : 0.0;
}

// Quintic Hermite table of the CDF on [-1/4, 0] built from exact
// derivative data; node values come from cumulative Gauss-Legendre panels.
struct CdfTable {
  static constexpr int kIntervals = 2048;
  double mass = 0.0;
  std::unique_ptr<boost::math::interpolators::cardinal_quintic_hermite<std::vector<double>>> interp;

  CdfTable() {
    const double x0 = -0.25;
    const double dx = 0.25 / kIntervals;
    std::vector<double> y(kIntervals + 1), dy(kIntervals + 1), d2y(kIntervals + 1);
    y[0] = 0.0;
    for (int i = 0; i < kIntervals; ++i) {
      const double a = x0 + i * dx;
      y[i + 1] = y[i] + boost::math::quadrature::gauss<double, 20>::integrate(mu_raw, a, a + dx);
    }
    mass = 2.0 * y[kIntervals];
    for (int i = 0; i <= kIntervals; ++i) {
      const double x = x0 + i * dx;
      y[i] /= mass;
      dy[i] = mu_raw(x) / mass;
      d2y[i] = mu_raw_prime(x) / mass;
    }
    y[kIntervals] = 0.5;
    interp = std::make_unique<boost::math::interpolators::cardinal_quintic_hermite<std::vector<double>>>(
        std::move(y), std::move(dy), std::move(d2y), x0, dx);
  }

  double left_half(double s) const { return (*interp)(s); }
};

const CdfTable& table() {
  static const CdfTable t;
  return t;
}

}  // namespace

double BumpProfile::mollifier(double x) { return mu_raw(x) / table().mass; }

double BumpProfile::cdf(double s) {
  if (s <= -0.25) return 0.0;
  if (s >= 0.25) return 1.0;
  if (s <= 0.0) return table().left_half(s);
  return 1.0 - table().left_half(-s);
}

double DyadicProfile::operator()(double r) const {
  if (!(r > 0.0)) return 0.0;
  return BumpProfile{}(std::log2(r));
}

double DyadicProfile::level(int k, double r, int k0) const {
  if (k < k0) return 0.0;
  if (k == k0) {
    if (!(r > 0.0)) return 1.0;
    return 1.0 - BumpProfile::cdf(std::log2(r) - k0 - 0.5);
  }
  if (!(r > 0.0)) return 0.0;
  return BumpProfile{}(std::log2(r) - k);
}

double lp_profile(double r) {
  if (!(r > 0.5 && r < 2.0)) return 0.0;
  const double x = std::log2(r);
  const double y = 1.0 - x * x;
  return y > 0.0 ? std::exp(1.0 - 1.0 / y) : 0.0;
}

double low_cutoff(double r, int k0) {
  if (!(r > 0.0)) return 1.0;
  return 1.0 - BumpProfile::cdf((std::log2(r) - k0 - 0.5) / 2.0);
}

}  // namespace logsub
