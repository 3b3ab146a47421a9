#pragma once

#include "logsub/geometry.hpp"
#include "logsub/grid.hpp"

namespace logsub {

// Unit-mass Gaussian eta(x) = (2 pi)^{-d/2} exp(-|x|^2/2) and its dilates.
struct AveragingKernel {
  // min over |x| <= 1 of eta.
  static double lower_bound(int d);
  // eta_t sampled on the grid (periodized), normalized to unit discrete mass.
  static RealField sampled(const TorusGrid& g, double t);
};

// eta_t * w; throws DomainError on negative input.
RealField smooth_average(const RealField& w, double t);

// Sup of discrete ball averages over radii 0, 1, 2, 4, ... cells and the whole torus.
RealField hl_maximal(const RealField& w);
// (M(w^s))^{1/s}; throws DomainError for s <= 1.
RealField hl_maximal_s(const RealField& w, double s);

// max of w over grid points within distance radius.
RealField ball_max_dilation(const RealField& w, double radius);

// sup over grid scales of (log 1/t)^{-2 beta} dilation_{a(t)}(A_t w), beta = p.beta.
RealField log_maximal(const RealField& w, const LogParams& p, const ScaleGrid& scales);

// M(M(M_log(M(M(M(M w)))))).
RealField rhs_weight(const RealField& w, const LogParams& p, const ScaleGrid& scales);

}  // namespace logsub
