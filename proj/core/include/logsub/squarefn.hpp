#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "logsub/geometry.hpp"
#include "logsub/grid.hpp"

namespace logsub {

// phi_hat(t |xi|) with phi_hat = lp_profile, over a log-uniform scale grid.
struct LPFamily {
  ScaleGrid scales;

  static LPFamily make(const LogParams& p, const TorusGrid& g, double du = 0.125 * 0.6931471805599453);

  // Throws DomainError if some scale violates supp phi_hat(t.) in |xi| >= 2^{k0+1}.
  void validate(const LogParams& p) const;

  // sup_r sum_j w_j |phi_hat(t_j r)|^2 (log 1/t_j)^{2 beta}, dense log grid in r.
  double energy_constant(double beta = 0.0) const;
};

struct RobustKernelSpec {
  double t = 0.0;
  double lambda = 2.0;
  double a = 0.0;  // aperture at t
  int d = 1;

  static RobustKernelSpec make(double t, double lambda, const LogParams& p);
};

// a^{-d} (1 + |z|/a)^{-d lambda}.
double kernel_value(const RobustKernelSpec& k, Point z);
// Closed-form integral of the kernel over R^d.
double kernel_l1(const RobustKernelSpec& k);
// Kernel wrapped on the torus and sampled at grid points.
RealField periodized_kernel(const RobustKernelSpec& k, const TorusGrid& g);
// max_z (K*K)(z) / K(z) on the grid.
double kernel_conv_stability(const RobustKernelSpec& k, const TorusGrid& g);

// Discrete ball average weights: 1/count on grid points with |z| <= a.
RealField ball_average_weights(const TorusGrid& g, double a);
// Number of grid points in the discrete ball of radius a.
std::size_t ball_point_count(const TorusGrid& g, double a);

// inverse(phi_hat(t|xi|) F); throws DomainError when 2/t reaches Nyquist.
Field lp_piece(const SpectralField& F, double t);

// Evaluates g_log^2 and g*^2 on one grid and scale grid. Ball and kernel
// transfer functions are built on first use and reused.
class SquareFunctionEngine {
 public:
  SquareFunctionEngine(const LogParams& p, const TorusGrid& g, ScaleGrid scales);

  const ScaleGrid& scales() const { return scales_; }
  const TorusGrid& grid() const { return grid_; }
  const LogParams& params() const { return params_; }

  RealField g_log_squared(const SpectralField& F, double beta) const;
  RealField g_star_squared(const SpectralField& F, double beta, double lambda) const;
  // Sum over pieces of the squared square functions.
  RealField g_log_squared_sum(std::span<const SparseSpectral> pieces, double beta) const;
  RealField g_star_squared_sum(std::span<const SparseSpectral> pieces, double beta, double lambda) const;

  // Scales whose discrete ball is the center point alone.
  std::size_t degenerate_scales() const;
  // max over scales of |count h^d / |B(0,a)| - 1|.
  double normalization_discrepancy() const;

 private:
  using Transfers = std::vector<std::vector<double>>;
  std::shared_ptr<const Transfers> transfers(double lambda) const;  // lambda < 0: ball
  RealField accumulate(std::span<const SparseSpectral> pieces, double beta, const Transfers& T) const;

  LogParams params_;
  TorusGrid grid_;
  ScaleGrid scales_;
  mutable std::mutex mu_;
  mutable std::map<double, std::shared_ptr<const Transfers>> cache_;
};

RealField sqrt_field(RealField f);

RealField g_log(const Field& f, double beta, const LPFamily& fam, const LogParams& p);
RealField g_star(const Field& f, double beta, double lambda, const LPFamily& fam, const LogParams& p);

}  // namespace logsub
