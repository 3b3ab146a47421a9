#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "logsub/geometry.hpp"
#include "logsub/grid.hpp"

namespace logsub {

// Radial multiplier m(R), R = |xi|, with derivatives up to max_order().
class RadialSymbol {
 public:
  // Writes m, m', ..., m^{(jmax)} at R into out.
  using Engine = std::function<void(double R, int jmax, cplx* out)>;

  RadialSymbol(std::string name, int max_order, Engine engine);

  cplx operator()(double R) const;
  // Throws DomainError when j exceeds max_order().
  cplx derivative(double R, int j) const;
  std::vector<cplx> derivatives(double R, int jmax) const;

  int max_order() const { return max_order_; }
  const std::string& name() const { return name_; }

  // Pointwise complex conjugate symbol.
  RadialSymbol conjugate() const;

  // (log(e+R))^{-beta} exp(i (log(e+R))^gamma), closed-form derivatives.
  static RadialSymbol model(double gamma, double beta, int N = 8);
  // (log(e+R))^{-beta}, no phase.
  static RadialSymbol mikhlin_log(double beta, int N = 8);
  // (log(e+R))^{-beta} exp(i R^alpha); derivatives need R > 0.
  static RadialSymbol power_phase(double alpha, double beta, int N = 8);
  static RadialSymbol constant(cplx c);
  // Modified Akima interpolation of (R, m) rows; R strictly increasing and
  // starting at 0. Derivatives beyond the first by nested central differences.
  static RadialSymbol tabulated(std::vector<double> R, std::vector<cplx> m, int N = 3);

 private:
  std::string name_;
  int max_order_;
  Engine engine_;
};

RadialSymbol model_symbol(double gamma, double beta);

enum class SymbolKind { model, mikhlin_log, power_phase, tabulated, identity };

struct SymbolSpec {
  SymbolKind kind = SymbolKind::model;
  double gamma = 2.0;
  double beta = 1.0;
  double alpha = 0.5;
  std::filesystem::path table;        // tabulated rows (R, Re m, Im m)
  std::optional<cplx> value_at_zero;  // required unless the table starts at R = 0
};

SymbolKind parse_symbol_kind(const std::string& s);
std::string to_string(SymbolKind k);

// Throws ConfigError for unreadable or non-monotone tables.
RadialSymbol make_symbol(const SymbolSpec& spec, int N = 8);
RadialSymbol read_tabulated_symbol(const std::filesystem::path& path, std::optional<cplx> value_at_zero, int N = 3);

cplx radial_derivative(const RadialSymbol& s, double R, int j);

// |m^{(j)}(R)| / ((log R)^{-beta} rho(R)^{-j}); throws DomainError for R < R0.
double pointwise_miyachi_ratio(const RadialSymbol& s, double R, int j, const LogParams& p);

struct SobolevOptions {
  int points_per_radius = 256;
  double pad = 1.25;               // box side over bump support side
  double support_scale = 1.0;      // < 1 shrinks the bump inside C1*B
  Point shift{0.0, 0.0};           // bump center offset in units of the radius
  std::size_t max_points_per_axis = std::size_t{1} << 22;
};

// ||m Psi_B||_{H^theta dot}; Psi_B = prod_i b((xi_i - c_i)/s), s = C1 r/(0.75 sqrt d).
double localized_sobolev_norm(const RadialSymbol& s, const Ball& b, double theta, const LogParams& p,
                              const SobolevOptions& opt = {});

// (log R_B)^beta rho(R_B)^theta |B|^{-1/2} ||m Psi_B||_{H^theta dot}.
double normalized_miyachi_quantity(const RadialSymbol& s, const Ball& b, double theta, const LogParams& p,
                                   const SobolevOptions& opt = {});

struct MiyachiRecord {
  Ball ball;
  double R_B = 0.0;
  double theta = 0.0;
  std::string bump;        // "canonical" or "rescaled"
  double quantity = 0.0;
  double refined = 0.0;    // same quantity with the local grid doubled
};

struct PointwiseRecord {
  int order = 0;
  double R = 0.0;
  double ratio = 0.0;
};

struct MiyachiReport {
  std::vector<MiyachiRecord> records;
  std::vector<PointwiseRecord> pointwise;
  double constant = 0.0;              // max over records
  std::vector<double> per_ball;       // max over theta and bumps, per ball
  double ball_spread = 0.0;           // max / median of per_ball
  double growth_slope = 0.0;          // largest d log Q / d log R_B over theta > 0
  bool growth_flag = false;
  double max_refinement_drift = 0.0;
};

MiyachiReport miyachi_constant(const RadialSymbol& s, const std::vector<Ball>& balls,
                               const std::vector<double>& thetas, const LogParams& p, std::uint64_t seed = 1,
                               const SobolevOptions& opt = {});

// count balls on the first axis with log R_B evenly spaced in [u_lo, u_hi]
// and radius rho(R_B).
std::vector<Ball> log_subdyadic_balls(double u_lo, double u_hi, int count, const LogParams& p);

ComplexMask symbol_mask(const RadialSymbol& s, const TorusGrid& g);
SpectralField apply_multiplier(const SpectralField& F, const RadialSymbol& s);

// (m * theta_lo, m * (1 - theta_lo)) on the grid's frequencies.
std::pair<ComplexMask, ComplexMask> hi_lo_split(const RadialSymbol& s, const LogParams& p, const TorusGrid& g);
RealMask hi_mask(const LogParams& p, const TorusGrid& g);
SpectralField hi_projection(const SpectralField& F, const LogParams& p);

}  // namespace logsub
