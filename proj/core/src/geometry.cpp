#include "logsub/geometry.hpp"

#include <algorithm>
#include <string>

#include "logsub/error.hpp"

namespace logsub {

LogParams LogParams::defaults(int d, double gamma, double beta) {
  LogParams p;
  p.d = d;
  p.gamma = gamma;
  p.beta = beta;
  p.sigma = d / 2.0 + 1.0;
  p.lambda = 2.0 * p.sigma / d;
  p.R0 = std::exp(2.0);
  p.k0 = static_cast<int>(std::ceil(std::log2(p.R0)));
  p.t0 = default_t0(gamma, p.k0);
  p.N = static_cast<int>(std::floor(p.sigma)) + 2;
  return p;
}

double LogParams::default_t0(double gamma, int k0) {
  return std::min(std::exp(-(gamma - 1.0)), std::ldexp(1.0, -(k0 + 3)));
}

void LogParams::validate() const {
  auto fail = [](const std::string& what) { throw DomainError("LogParams: " + what); };
  if (d != 1 && d != 2) fail("d must be 1 or 2");
  if (!(gamma > 1.0)) fail("gamma must exceed 1");
  if (!(beta >= 0.0)) fail("beta must be nonnegative");
  if (!(sigma > d / 2.0)) fail("sigma must exceed d/2");
  if (!(lambda > 1.0)) fail("lambda must exceed 1");
  if (!(R0 >= std::exp(2.0) * (1.0 - 1e-15))) fail("R0 must be at least e^2");
  if (!(std::ldexp(1.0, k0) >= R0)) fail("2^k0 must be at least R0");
  if (!(t0 > 0.0 && t0 < 1.0)) fail("t0 must lie in (0,1)");
  if (!(t0 <= std::exp(-(gamma - 1.0)))) fail("t0 must not exceed e^{-(gamma-1)}");
  if (!(t0 < std::ldexp(1.0, -(k0 + 2)))) fail("t0 must be below 2^{-(k0+2)}");
  if (!(c0 > 0.0 && c0 < C0)) fail("need 0 < c0 < C0");
  if (!(C1 >= 1.0)) fail("C1 must be at least 1");
  if (!(N > sigma)) fail("N must exceed sigma");
}

std::string_view to_string(BallVerdict v) {
  switch (v) {
    case BallVerdict::log_subdyadic: return "log_subdyadic";
    case BallVerdict::too_small: return "too_small";
    case BallVerdict::too_large: return "too_large";
    case BallVerdict::below_R0: return "below_R0";
  }
  return "unknown";
}

double rho_unchecked(double R, double gamma) noexcept {
  return R / std::pow(std::log(R), gamma - 1.0);
}

double aperture_unchecked(double t, double gamma) noexcept {
  return t * std::pow(std::log(1.0 / t), gamma - 1.0);
}

double rho(double R, const LogParams& p) {
  if (!(R >= p.R0)) throw DomainError("rho: R below R0");
  return rho_unchecked(R, p.gamma);
}

double aperture(double t, const LogParams& p) {
  if (!(t > 0.0 && t < p.t0)) throw DomainError("aperture: t outside (0, t0)");
  return aperture_unchecked(t, p.gamma);
}

BallVerdict classify_ball(const Ball& b, const LogParams& p) {
  const double RB = b.R_B();
  if (RB < p.R0) return BallVerdict::below_R0;
  const double r = rho_unchecked(RB, p.gamma);
  if (b.radius < p.c0 * r) return BallVerdict::too_small;
  if (b.radius > p.C0 * r) return BallVerdict::too_large;
  return BallVerdict::log_subdyadic;
}

double stability_ratio(double R, double Rp, const LogParams& p) {
  return rho(Rp, p) / rho(R, p);
}

}  // namespace logsub
