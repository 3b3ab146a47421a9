#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string_view>

namespace logsub {

// Frequency or spatial point. In d=1 the second coordinate is zero.
using Point = std::array<double, 2>;

inline double norm(const Point& p) { return std::hypot(p[0], p[1]); }

struct LogParams {
  int d = 1;
  double gamma = 2.0;
  double beta = 1.0;
  double sigma = 1.5;
  double lambda = 3.0;
  double R0 = std::exp(2.0);
  double t0 = 1.0 / 64.0;
  int k0 = 3;
  double c0 = 0.5;
  double C0 = 2.0;
  double C1 = 2.0;
  int N = 3;

  // sigma = d/2 + 1, lambda = 2 sigma / d, R0 = e^2, k0 = ceil(log2 R0),
  // t0 = min(e^{-(gamma-1)}, 2^{-(k0+3)}), N = floor(sigma) + 2.
  static LogParams defaults(int d = 1, double gamma = 2.0, double beta = 1.0);

  // Recomputes t0 from gamma and k0 with the default rule.
  static double default_t0(double gamma, int k0);

  // Throws DomainError naming the first violated invariant.
  void validate() const;
};

struct Ball {
  Point center{0.0, 0.0};
  double radius = 1.0;

  // Distance from the ball to the origin, max(|center| - radius, 0).
  double R_B() const { return std::max(norm(center) - radius, 0.0); }
};

enum class BallVerdict { log_subdyadic, too_small, too_large, below_R0 };

std::string_view to_string(BallVerdict v);

// R / (log R)^{gamma-1}; throws DomainError for R < R0.
double rho(double R, const LogParams& p);

// t (log 1/t)^{gamma-1}; throws DomainError outside (0, t0).
double aperture(double t, const LogParams& p);

// Unchecked forms used on internally generated arguments.
double rho_unchecked(double R, double gamma) noexcept;
double aperture_unchecked(double t, double gamma) noexcept;

BallVerdict classify_ball(const Ball& b, const LogParams& p);

// rho(Rp) / rho(R); throws DomainError if either argument is below R0.
double stability_ratio(double R, double Rp, const LogParams& p);

}  // namespace logsub
