#pragma once

namespace logsub {

// One-dimensional bump b = 1_[-1/2,1/2] * mu, mu the unit-mass mollifier
// exp(-1/(1-(4x)^2)) on [-1/4,1/4]. Sum over integer shifts is exactly 1.
struct BumpProfile {
  static constexpr double half_width = 0.75;

  // Normalized mollifier density.
  static double mollifier(double x);
  // Mollifier CDF: 0 below -1/4, 1 above 1/4, M(-s) = 1 - M(s).
  static double cdf(double s);

  double operator()(double x) const { return cdf(x + 0.5) - cdf(x - 0.5); }
};

// chi(r) = b(log2 r): supp in [2^{-3/4}, 2^{3/4}], sum_k chi(2^{-k} r) = 1.
struct DyadicProfile {
  double operator()(double r) const;
  // eta_k(r); at k = k0 the cap absorbs every lower level.
  double level(int k, double r, int k0) const;
};

// Littlewood-Paley profile phi_hat(r) = exp(1 - 1/(1 - log2(r)^2)), supp [1/2, 2].
double lp_profile(double r);

// Smooth radial cutoff, 1 on r <= 2^k0 and 0 on r >= 2^{k0+1}.
double low_cutoff(double r, int k0);

}  // namespace logsub
