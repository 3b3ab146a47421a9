#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "logsub/corpus.hpp"
#include "logsub/geometry.hpp"
#include "logsub/grid.hpp"
#include "logsub/report.hpp"
#include "logsub/symbols.hpp"

namespace logsub {

enum class RefineKind { du_halving, n_doubling };

std::string to_string(RefineKind k);

// Grid size and scale step. J > 0 fixes the number of scale cells on
// [log 1/t0, resolvable u] instead of the step du.
struct Resolution {
  std::size_t n = std::size_t{1} << 18;
  double du = 0.125 * 0.6931471805599453;
  std::size_t J = 0;
};

Resolution refine(const Resolution& r, RefineKind kind, const LogParams& p);
ScaleGrid make_scales(const LogParams& p, const TorusGrid& g, const Resolution& r);

struct MaximalSettings {
  double r = 2.0;
  double beta_below = 0.0;
  std::vector<WeightKind> weights{WeightKind::constant, WeightKind::narrow_bump, WeightKind::smoothed_random,
                                  WeightKind::power_singularity};
};

struct SweepSettings {
  std::vector<double> ps{2.0, 4.0};
  std::vector<double> betas{0.0, 0.125, 0.25, 0.5, 1.0};
  int ceiling = -1;  // lower band ceiling K; -1 means kmax - ceiling_step
  int ceiling_step = 2;
  std::size_t members = 4;
  double dual_tolerance = 0.15;
};

struct LocalSettings {
  std::vector<int> level_offsets{4, 8, 12};  // cells at k = k0 + offset
  std::size_t members = 4;
  double spread_limit = 2.0;
};

struct HarnessConfig {
  LogParams params = LogParams::defaults();
  Resolution resolution;
  std::map<std::string, Resolution> overrides;  // per experiment
  MixedCorpusSpec corpus;                       // k_lo/k_hi < 0: k0 + 1 and kmax
  std::vector<WeightKind> weights{WeightKind::constant, WeightKind::spike, WeightKind::smoothed_random,
                                  WeightKind::power_singularity};
  SymbolSpec symbol;
  bool refine = false;
  std::vector<std::string> experiments;
  MaximalSettings maximal;
  SweepSettings sweep;
  LocalSettings local;
  double drift_limit = 0.25;

  // Defaults for d, gamma, beta; experiments = all nine.
  static HarnessConfig defaults(int d = 1, double gamma = 2.0, double beta = 1.0);
};

// Fixed dependency order of the nine estimates.
const std::vector<std::string>& experiment_names();

Resolution resolution_for(const HarnessConfig& cfg, const std::string& experiment);
RadialSymbol harness_symbol(const HarnessConfig& cfg);

Report verify_decoupling(const HarnessConfig& cfg);
Report verify_recoupling(const HarnessConfig& cfg);
Report verify_local_multiplier(const HarnessConfig& cfg);
Report verify_pointwise(const HarnessConfig& cfg);
Report verify_forward_weighted(const HarnessConfig& cfg);
Report verify_reverse_weighted(const HarnessConfig& cfg);
Report verify_weighted_multiplier(const HarnessConfig& cfg);
Report verify_maximal_lr(const HarnessConfig& cfg);
Report lp_sweep(const HarnessConfig& cfg);

// Dispatch by name; throws ConfigError for unknown names.
Report verify(const std::string& name, const HarnessConfig& cfg);

// Partition identity and Plancherel checks run before any estimate.
std::vector<Check> preflight(const HarnessConfig& cfg);

// Runs the configured experiments in dependency order; preflight checks are
// attached to the first report.
std::vector<Report> run_all(const HarnessConfig& cfg);

// Localized Miyachi constant of a symbol over count balls with log R_B in [u_lo, u_hi].
Report miyachi_report(const RadialSymbol& s, const LogParams& p, double u_lo = 6.0, double u_hi = 20.0,
                      int count = 12, std::uint64_t seed = 1);

}  // namespace logsub
