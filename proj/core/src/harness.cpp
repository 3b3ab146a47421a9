#include "logsub/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "logsub/error.hpp"
#include "logsub/maximal.hpp"
#include "logsub/partition.hpp"
#include "logsub/squarefn.hpp"

namespace logsub {

namespace {

constexpr double kFloor = 1e-14;

// Runs body(i) for i in [0, count) on up to hardware_concurrency threads.
// Results must be written to slot i so the reduction order is fixed.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

struct RatioField {
  MemberStat stat;
  std::vector<double> field;
};

// LHS / RHS pointwise; RHS below the floor is skipped, and counted as excluded
// when LHS is not also below it.
RatioField ratio_field(std::string label, const RealField& lhs, const RealField& rhs, bool root) {
  RatioField out;
  out.stat.label = std::move(label);
  const std::size_t N = lhs.values.size();
  out.stat.points = N;
  out.field.assign(N, 0.0);
  std::vector<double> vals;
  vals.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double L = lhs.values[i];
    const double R = rhs.values[i];
    if (!(R >= kFloor)) {
      if (L >= kFloor) ++out.stat.excluded;
      continue;
    }
    const double q = root ? std::sqrt(L / R) : L / R;
    out.field[i] = q;
    vals.push_back(q);
  }
  if (!vals.empty()) {
    out.stat.max_ratio = *std::max_element(vals.begin(), vals.end());
    auto mid = vals.begin() + static_cast<long>(vals.size() / 2);
    std::nth_element(vals.begin(), mid, vals.end());
    out.stat.median_ratio = *mid;
  }
  return out;
}

MemberStat scalar_stat(std::string label, double lhs, double rhs) {
  MemberStat m;
  m.label = std::move(label);
  m.points = 1;
  if (!(rhs >= kFloor)) {
    m.excluded = lhs >= kFloor ? 1 : 0;
    return m;
  }
  m.max_ratio = m.median_ratio = lhs / rhs;
  return m;
}

void assemble_fields(Report& r, std::vector<RatioField>& fields, const TorusGrid& g) {
  std::size_t worst = 0;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    r.members.push_back(fields[i].stat);
    if (fields[i].stat.max_ratio > fields[worst].stat.max_ratio) worst = i;
  }
  if (!fields.empty()) {
    const auto& f = fields[worst].field;
    std::vector<SeriesPoint> s(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      s[i] = {g.d() == 1 ? g.position_at(i)[0] : static_cast<double>(i), f[i]};
    }
    r.series = thin_series(s);
    r.histogram = log_histogram(f);
    r.add_metric("worst_member", static_cast<double>(worst));
  }
  finalize_members(r);
}

void assemble_scalars(Report& r, std::vector<MemberStat> members) {
  std::vector<double> ratios;
  for (std::size_t i = 0; i < members.size(); ++i) {
    r.series.push_back({static_cast<double>(i), members[i].max_ratio});
    ratios.push_back(members[i].max_ratio);
  }
  r.members = std::move(members);
  r.histogram = log_histogram(ratios, 20);
  finalize_members(r);
}

Truncation truncation_of(const ScaleGrid& s, const TorusGrid& g, const Resolution& res) {
  Truncation t;
  t.n = g.n();
  t.du = s.du;
  t.scales = s.size();
  t.u_lo = s.u_lo;
  t.u_hi = s.u_hi;
  t.u_requested = s.u_requested;
  t.dropped = s.dropped;
  (void)res;
  return t;
}

Truncation truncation_of(const SquareFunctionEngine& e, const Resolution& res) {
  Truncation t = truncation_of(e.scales(), e.grid(), res);
  t.degenerate_scales = e.degenerate_scales();
  t.normalization_discrepancy = e.normalization_discrepancy();
  return t;
}

// Default band [k0 + 1, kmax]. Estimates whose left side is a plain L2
// quantity (reverse chain) need the band inside the range resolved by the
// scales t < t0, |xi| >= 1/t0.
MixedCorpusSpec band_corpus(const HarnessConfig& cfg, const TorusGrid& base, bool lp_resolved = false) {
  MixedCorpusSpec c = cfg.corpus;
  if (c.k_lo < 0) {
    c.k_lo = cfg.params.k0 + 1;
    if (lp_resolved) c.k_lo = std::max(c.k_lo, static_cast<int>(std::ceil(std::log2(1.0 / cfg.params.t0) - 1e-9)));
  }
  if (c.k_hi < 0) c.k_hi = base.max_annulus();
  c.gamma = cfg.params.gamma;
  return c;
}

double weighted_integral(const RealField& a, const RealField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
  return s * a.grid.cell_volume();
}

RealField iterate_hl(RealField w, int times) {
  for (int i = 0; i < times; ++i) w = hl_maximal(w);
  return w;
}

using Clock = std::chrono::steady_clock;

template <class Measure>
Report with_refinement(const HarnessConfig& cfg, const std::string& name, RefineKind kind, Measure&& measure) {
  const auto start = Clock::now();
  const Resolution base = resolution_for(cfg, name);
  const TorusGrid base_grid(cfg.params.d, base.n);
  Report r = measure(base, base_grid);
  r.name = name;
  r.drift.kind = to_string(kind);
  if (cfg.refine) {
    const Report rr = measure(refine(base, kind, cfg.params), base_grid);
    set_drift(r, to_string(kind), r.constant, rr.constant, cfg.drift_limit);
    r.add_metric("refined_n", static_cast<double>(rr.truncation.n));
    r.add_metric("refined_scales", static_cast<double>(rr.truncation.scales));
  }
  r.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

std::vector<SparseSpectral> cell_pieces(const SpectralField& F, const std::vector<Cell>& cells, const LogParams& p) {
  std::vector<SparseSpectral> pieces;
  for (const auto& c : cells) {
    auto sp = project_sparse(F, c, p);
    if (!sp.empty()) pieces.push_back(std::move(sp));
  }
  return pieces;
}

SpectralField sum_pieces(const TorusGrid& g, const std::vector<SparseSpectral>& pieces) {
  SpectralField S = SpectralField::zeros(g);
  for (const auto& piece : pieces) {
    for (std::size_t q = 0; q < piece.index.size(); ++q) S.coeffs[piece.index[q]] += piece.value[q];
  }
  return S;
}

std::vector<Cell> covering_cells(const LogParams& p, int kmax) {
  auto cells = all_cells(p, kmax);
  if (cells.empty()) throw DomainError("empty cell cover");
  return cells;
}

}  // namespace

std::string to_string(RefineKind k) { return k == RefineKind::du_halving ? "du_halving" : "n_doubling"; }

Resolution refine(const Resolution& r, RefineKind kind, const LogParams& p) {
  Resolution out = r;
  if (kind == RefineKind::du_halving) {
    if (r.J > 0) {
      out.J = 2 * r.J;
    } else {
      out.du = r.du / 2.0;
    }
    return out;
  }
  if (r.J > 0) {
    // Keep the step of the base grid so the doubled grid only adds scales.
    const TorusGrid g(p.d, r.n);
    out.du = (g.resolvable_u() - std::log(1.0 / p.t0)) / static_cast<double>(r.J);
    out.J = 0;
  }
  out.n = 2 * r.n;
  return out;
}

ScaleGrid make_scales(const LogParams& p, const TorusGrid& g, const Resolution& r) {
  if (r.J > 0) return make_scale_grid(p, r.J, g.resolvable_u(), &g);
  return default_scale_grid(p, g, r.du);
}

HarnessConfig HarnessConfig::defaults(int d, double gamma, double beta) {
  HarnessConfig c;
  c.params = LogParams::defaults(d, gamma, beta);
  c.resolution.n = d == 1 ? std::size_t{1} << 18 : std::size_t{1} << 9;
  c.overrides["decoupling"] = {d == 1 ? std::size_t{1} << 14 : std::size_t{1} << 8, c.resolution.du, 0};
  c.overrides["recoupling"] = c.overrides["decoupling"];
  c.corpus.k_lo = -1;
  c.corpus.k_hi = -1;
  c.corpus.gamma = gamma;
  c.symbol.kind = SymbolKind::model;
  c.symbol.gamma = gamma;
  c.symbol.beta = beta;
  c.experiments = experiment_names();
  return c;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"decoupling",       "recoupling",        "local_multiplier",
                                              "pointwise",        "forward_weighted",  "reverse_weighted",
                                              "weighted_multiplier", "maximal_lr",     "lp_sweep"};
  return names;
}

Resolution resolution_for(const HarnessConfig& cfg, const std::string& experiment) {
  if (auto it = cfg.overrides.find(experiment); it != cfg.overrides.end()) return it->second;
  return cfg.resolution;
}

RadialSymbol harness_symbol(const HarnessConfig& cfg) { return make_symbol(cfg.symbol, cfg.params.N); }

Report verify_decoupling(const HarnessConfig& cfg) {
  const LogParams& p = cfg.params;
  return with_refinement(cfg, "decoupling", RefineKind::du_halving, [&](const Resolution& res, const TorusGrid& bg) {
    const TorusGrid g(p.d, res.n);
    const SquareFunctionEngine eng(p, g, make_scales(p, g, res));
    const auto spec = band_corpus(cfg, bg);
    const auto corpus = gen_mixed_corpus(spec, g);
    const auto cells = covering_cells(p, bg.max_annulus());
    std::vector<RatioField> fields(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t i) {
      const auto F = forward(corpus[i].field);
      const auto pieces = cell_pieces(F, cells, p);
      const auto lhs = eng.g_log_squared(sum_pieces(g, pieces), p.beta);
      const auto rhs = eng.g_star_squared_sum(pieces, p.beta, p.lambda);
      fields[i] = ratio_field(corpus[i].label, lhs, rhs, false);
    });
    Report r;
    r.corpus = spec.describe();
    r.truncation = truncation_of(eng, res);
    r.add_metric("cells", static_cast<double>(cells.size()));
    assemble_fields(r, fields, g);
    return r;
  });
}

Report verify_recoupling(const HarnessConfig& cfg) {
  const LogParams& p = cfg.params;
  return with_refinement(cfg, "recoupling", RefineKind::n_doubling, [&](const Resolution& res, const TorusGrid& bg) {
    const TorusGrid g(p.d, res.n);
    const SquareFunctionEngine eng(p, g, make_scales(p, g, res));
    const auto spec = band_corpus(cfg, bg);
    const auto corpus = gen_mixed_corpus(spec, g);
    const auto cells = covering_cells(p, bg.max_annulus());
    std::vector<RatioField> fields(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t i) {
      const auto F = forward(corpus[i].field);
      const auto pieces = cell_pieces(F, cells, p);
      const auto lhs = eng.g_star_squared_sum(pieces, p.beta, p.lambda);
      const auto rhs = eng.g_star_squared(F, p.beta, p.lambda);
      fields[i] = ratio_field(corpus[i].label, lhs, rhs, false);
    });
    Report r;
    r.corpus = spec.describe();
    r.truncation = truncation_of(eng, res);
    r.add_metric("cells", static_cast<double>(cells.size()));
    assemble_fields(r, fields, g);
    return r;
  });
}

Report verify_local_multiplier(const HarnessConfig& cfg) {
  const LogParams& p = cfg.params;
  const RadialSymbol m = harness_symbol(cfg);
  return with_refinement(cfg, "local_multiplier", RefineKind::du_halving,
                         [&](const Resolution& res, const TorusGrid& bg) {
    const TorusGrid g(p.d, res.n);
    const SquareFunctionEngine eng(p, g, make_scales(p, g, res));
    const int kmax = bg.max_annulus();
    std::vector<Cell> chosen;
    for (int off : cfg.local.level_offsets) {
      const int k = p.k0 + off;
      if (k <= p.k0 || k > kmax) continue;
      const double target = 0.85 * std::ldexp(1.0, k);
      const auto cells = enumerate_cells(k, p, kmax);
      const Cell* best = nullptr;
      for (const auto& c : cells) {
        if (c.ell[1] != 0 || c.center[0] <= 0.0) continue;
        if (!best || std::abs(c.center[0] - target) < std::abs(best->center[0] - target)) best = &c;
      }
      if (best) chosen.push_back(*best);
    }
    if (chosen.empty()) throw DomainError("local_multiplier: no requested level fits the grid");
    auto spec = band_corpus(cfg, bg);
    const CorpusSpec cs{spec.seed, CorpusKind::random_bandlimited, cfg.local.members, spec.k_lo, spec.k_hi, p.gamma, 1.0};
    const auto corpus = gen_corpus(cs, g);
    const std::size_t jobs = corpus.size() * chosen.size();
    std::vector<RatioField> fields(jobs);
    const ComplexMask mask = symbol_mask(m, g);
    parallel_for(jobs, [&](std::size_t job) {
      const std::size_t c = job / corpus.size();
      const std::size_t f = job % corpus.size();
      const auto piece = project(forward(corpus[f]), chosen[c], p);
      const auto lhs = eng.g_star_squared(apply_mask(piece, mask), p.beta, p.lambda);
      const auto rhs = eng.g_star_squared(piece, 0.0, p.lambda);
      fields[job] = ratio_field("k=" + std::to_string(chosen[c].k) + " member=" + std::to_string(f), lhs, rhs, true);
    });
    Report r;
    r.corpus = "random_bandlimited x " + std::to_string(corpus.size()) + " projected to " +
               std::to_string(chosen.size()) + " cells";
    r.truncation = truncation_of(eng, res);
    r.table_header = {"k", "center", "support_radius", "R_B", "constant"};
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::size_t empty = 0;
    for (const auto& f : fields) empty += f.stat.max_ratio == 0.0;
    for (std::size_t c = 0; c < chosen.size(); ++c) {
      double level_max = 0.0;
      for (std::size_t f = 0; f < corpus.size(); ++f) {
        level_max = std::max(level_max, fields[c * corpus.size() + f].stat.max_ratio);
      }
      const auto& cell = chosen[c];
      const double rb = std::max(norm(cell.center) - cell.support_radius, 0.0);
      r.table_rows.push_back({static_cast<double>(cell.k), norm(cell.center), cell.support_radius, rb, level_max});
      r.add_metric("constant_k" + std::to_string(cell.k), level_max);
      lo = std::min(lo, level_max);
      hi = std::max(hi, level_max);
    }
    assemble_fields(r, fields, g);
    r.add_check("empty_pieces", static_cast<double>(empty), 0.0, "<=");
    r.add_check("level_spread", hi / lo, cfg.local.spread_limit, "<=");
    return r;
  });
}

Report verify_pointwise(const HarnessConfig& cfg) {
  const LogParams& p = cfg.params;
  const RadialSymbol m = harness_symbol(cfg);
  return with_refinement(cfg, "pointwise", RefineKind::du_halving, [&](const Resolution& res, const TorusGrid& bg) {
    const TorusGrid g(p.d, res.n);
    const SquareFunctionEngine eng(p, g, make_scales(p, g, res));
    const auto spec = band_corpus(cfg, bg);
    const auto corpus = gen_mixed_corpus(spec, g);
    const ComplexMask mask = symbol_mask(m, g);
    std::vector<RatioField> fields(corpus.size());
    std::vector<double> control(corpus.size(), 0.0);
    parallel_for(corpus.size(), [&](std::size_t i) {
      const auto F = forward(corpus[i].field);
      const auto rhs = eng.g_star_squared(F, 0.0, p.lambda);
      const auto lhs = eng.g_log_squared(apply_mask(F, mask), p.beta);
      fields[i] = ratio_field(corpus[i].label, lhs, rhs, true);
      control[i] = ratio_field("", eng.g_log_squared(F, 0.0), rhs, true).stat.max_ratio;
    });
    Report r;
    r.corpus = spec.describe();
    r.truncation = truncation_of(eng, res);
    assemble_fields(r, fields, g);
    const double ctrl = *std::max_element(control.begin(), control.end());
    r.add_metric("identity_control", ctrl);
    r.add_check("identity_control", ctrl, std::pow(2.0, p.d * p.lambda / 2.0), "<=");
    return r;
  });
}

Report verify_forward_weighted(const HarnessConfig& cfg) {
  const LogParams& p = cfg.params;
  return with_refinement(cfg, "forward_weighted", RefineKind::du_halving,
                         [&](const Resolution& res, const TorusGrid& bg) {
    const TorusGrid g(p.d, res.n);
    const SquareFunctionEngine eng(p, g, make_scales(p, g, res));
    const auto spec = band_corpus(cfg, bg);
    const auto corpus = gen_mixed_corpus(spec, g);
    const auto weights = gen_weights(cfg.weights, spec.seed, g);
    std::vector<RealField> m2w;
    for (const auto& w : weights) m2w.push_back(iterate_hl(w.weight, 2));
    const std::size_t W = weights.size();
    std::vector<MemberStat> stats(corpus.size() * W);
    parallel_for(corpus.size(), [&](std::size_t i) {
      const auto G = eng.g_star_squared(forward(corpus[i].field), 0.0, p.lambda);
      const auto f2 = squared_modulus(corpus[i].field);
      for (std::size_t k = 0; k < W; ++k) {
        stats[i * W + k] = scalar_stat(corpus[i].label + " x " + weights[k].label, weighted_integral(G, weights[k].weight),
                                       weighted_integral(f2, m2w[k]));
      }
    });
    Report r;
    r.corpus = spec.describe() + " weights=" + std::to_string(W);
    r.truncation = truncation_of(eng, res);
    assemble_scalars(r, std::move(stats));
    return r;
  });
}

Report verify_reverse_weighted(const HarnessConfig& cfg) {
  const LogParams& p = cfg.params;
  return with_refinement(cfg, "reverse_weighted", RefineKind::du_halving,
                         [&](const Resolution& res, const TorusGrid& bg) {
    const TorusGrid g(p.d, res.n);
    const SquareFunctionEngine eng(p, g, make_scales(p, g, res));
    const auto spec = band_corpus(cfg, bg, true);
    const auto corpus = gen_mixed_corpus(spec, g);
    const auto weights = gen_weights(cfg.weights, spec.seed, g);
    std::vector<RealField> w1;
    for (const auto& w : weights) w1.push_back(log_maximal(iterate_hl(w.weight, 4), p, eng.scales()));
    const std::size_t W = weights.size();
    std::vector<MemberStat> stats(corpus.size() * W);
    parallel_for(corpus.size(), [&](std::size_t i) {
      const auto F = forward(corpus[i].field);
      const auto G = eng.g_log_squared(F, p.beta);
      const auto hi2 = squared_modulus(inverse(hi_projection(F, p)));
      for (std::size_t k = 0; k < W; ++k) {
        stats[i * W + k] = scalar_stat(corpus[i].label + " x " + weights[k].label,
                                       weighted_integral(hi2, weights[k].weight), weighted_integral(G, w1[k]));
      }
    });
    Report r;
    r.corpus = spec.describe() + " weights=" + std::to_string(W);
    r.truncation = truncation_of(eng, res);
    assemble_scalars(r, std::move(stats));
    return r;
  });
}

Report verify_weighted_multiplier(const HarnessConfig& cfg) {
  const LogParams& p = cfg.params;
  const RadialSymbol m = harness_symbol(cfg);
  return with_refinement(cfg, "weighted_multiplier", RefineKind::du_halving,
                         [&](const Resolution& res, const TorusGrid& bg) {
    const TorusGrid g(p.d, res.n);
    const SquareFunctionEngine eng(p, g, make_scales(p, g, res));
    const auto spec = band_corpus(cfg, bg, true);
    const auto corpus = gen_mixed_corpus(spec, g);
    const auto weights = gen_weights(cfg.weights, spec.seed, g);
    const std::size_t W = weights.size();
    // W1 = M_log M^4 w feeds the reverse and forward stages; M^2 W1 is the
    // right-hand weight of the end-to-end estimate.
    std::vector<RealField> w1, rhs_w;
    for (const auto& w : weights) {
      w1.push_back(log_maximal(iterate_hl(w.weight, 4), p, eng.scales()));
      rhs_w.push_back(iterate_hl(w1.back(), 2));
    }
    const ComplexMask mask = symbol_mask(m, g);
    const RealMask hmask = hi_mask(p, g);
    LogParams p0 = p;
    p0.beta = 0.0;
    const ComplexMask mask0 = symbol_mask(RadialSymbol::model(p.gamma, 0.0, p.N), g);
    const RealField one = RealField::constant(g, 1.0);
    const RealField rhs_one = rhs_weight(one, p0, eng.scales());

    std::vector<MemberStat> stats(corpus.size() * W);
    std::vector<double> rev(corpus.size() * W), fwd(corpus.size() * W), pw(corpus.size()), ctrl(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t i) {
      const auto F = forward(corpus[i].field);
      const auto TF = apply_mask(F, mask);
      const auto hiT2 = squared_modulus(inverse(apply_mask(TF, hmask)));
      const auto f2 = squared_modulus(corpus[i].field);
      const auto GlogT = eng.g_log_squared(TF, p.beta);
      const auto Gstar = eng.g_star_squared(F, 0.0, p.lambda);
      pw[i] = ratio_field("", GlogT, Gstar, true).stat.max_ratio;
      for (std::size_t k = 0; k < W; ++k) {
        const double lhs = weighted_integral(hiT2, weights[k].weight);
        stats[i * W + k] =
            scalar_stat(corpus[i].label + " x " + weights[k].label, lhs, weighted_integral(f2, rhs_w[k]));
        rev[i * W + k] = lhs / weighted_integral(GlogT, w1[k]);
        fwd[i * W + k] = weighted_integral(Gstar, w1[k]) / weighted_integral(f2, rhs_w[k]);
      }
      const auto hi0 = squared_modulus(inverse(apply_mask(apply_mask(F, mask0), hmask)));
      ctrl[i] = weighted_integral(hi0, one) / weighted_integral(f2, rhs_one);
    });
    Report r;
    r.corpus = spec.describe() + " weights=" + std::to_string(W);
    r.truncation = truncation_of(eng, res);
    assemble_scalars(r, std::move(stats));
    const double c_rev = *std::max_element(rev.begin(), rev.end());
    const double c_fwd = *std::max_element(fwd.begin(), fwd.end());
    const double c_pw = *std::max_element(pw.begin(), pw.end());
    const double product = c_rev * c_pw * c_pw * c_fwd;
    r.add_metric("stage_reverse", c_rev);
    r.add_metric("stage_pointwise", c_pw);
    r.add_metric("stage_forward", c_fwd);
    r.add_metric("stage_product", product);
    r.add_check("stage_composition", r.constant, 1.10 * product, "<=");
    const double c0 = *std::max_element(ctrl.begin(), ctrl.end());
    r.add_metric("unimodular_constant_weight_control", c0);
    r.add_check("unimodular_constant_weight_control", c0, 1.0 + 1e-10, "<=");
    return r;
  });
}

Report verify_maximal_lr(const HarnessConfig& cfg) {
  const LogParams& p = cfg.params;
  const double r_exp = cfg.maximal.r;
  if (!(r_exp >= 1.0)) throw DomainError("maximal_lr: r must be at least 1");
  return with_refinement(cfg, "maximal_lr", RefineKind::n_doubling, [&](const Resolution& res, const TorusGrid&) {
    const TorusGrid g(p.d, res.n);
    const ScaleGrid scales = make_scales(p, g, res);
    LogParams below = p;
    below.beta = cfg.maximal.beta_below;
    const auto weights = gen_weights(cfg.maximal.weights, cfg.corpus.seed, g);
    std::vector<MemberStat> stats(weights.size());
    std::vector<double> below_ratio(weights.size());
    parallel_for(weights.size(), [&](std::size_t k) {
      const double wn = lp_norm(weights[k].weight, r_exp);
      stats[k] = scalar_stat(weights[k].label, lp_norm(log_maximal(weights[k].weight, p, scales), r_exp), wn);
      below_ratio[k] = lp_norm(log_maximal(weights[k].weight, below, scales), r_exp) / wn;
    });
    Report r;
    r.corpus = "weights=" + std::to_string(weights.size()) + " r=" + std::to_string(r_exp);
    r.truncation = truncation_of(scales, g, res);
    const double threshold = p.d * (p.gamma - 1.0) / (2.0 * r_exp);
    r.add_metric("beta_threshold", threshold);
    r.add_metric("beta_above", p.beta);
    r.add_metric("beta_below", below.beta);
    r.table_header = {"weight", "ratio_above", "ratio_below"};
    for (std::size_t k = 0; k < weights.size(); ++k) {
      r.add_metric("below_" + weights[k].label, below_ratio[k]);
      r.table_rows.push_back({static_cast<double>(k), stats[k].max_ratio, below_ratio[k]});
    }
    r.add_check("beta_above_threshold", p.beta - threshold, 0.0, "trend");
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (cfg.maximal.weights[k] != WeightKind::constant) continue;
      const double exact = std::pow(scales.nodes.front().u, -2.0 * p.beta);
      r.add_metric("constant_weight_closed_form", exact);
      r.add_check("constant_weight_closed_form", std::abs(stats[k].max_ratio - exact) / exact, 1e-10, "<=");
    }
    assemble_scalars(r, std::move(stats));
    return r;
  });
}

Report lp_sweep(const HarnessConfig& cfg) {
  const LogParams& p = cfg.params;
  const auto& sw = cfg.sweep;
  for (double q : sw.ps) {
    if (!(q > 1.0 && std::isfinite(q))) throw DomainError("lp_sweep: p must lie in (1, inf)");
  }
  return with_refinement(cfg, "lp_sweep", RefineKind::n_doubling, [&](const Resolution& res, const TorusGrid& bg) {
    const TorusGrid g(p.d, res.n);
    const int K = sw.ceiling >= 0 ? sw.ceiling : bg.max_annulus() - sw.ceiling_step;
    const int K2 = K + sw.ceiling_step;
    const int k_lo = cfg.corpus.k_lo >= 0 ? cfg.corpus.k_lo : p.k0 + 1;
    const std::uint64_t seed = cfg.corpus.seed;
    // strength +1 focuses under m, -1 under conj(m), 0 gives focused bumps.
    auto corpus = [&](int ceiling, double strength) {
      return gen_corpus({seed, CorpusKind::chirp_log, sw.members, k_lo, ceiling, p.gamma, strength}, g);
    };
    std::map<std::pair<int, int>, std::vector<SpectralField>> cache;
    auto spectra = [&](int ceiling, int strength) -> const std::vector<SpectralField>& {
      auto key = std::make_pair(ceiling, strength);
      auto it = cache.find(key);
      if (it == cache.end()) {
        std::vector<SpectralField> v;
        for (const auto& f : corpus(ceiling, strength)) v.push_back(forward(f));
        it = cache.emplace(key, std::move(v)).first;
      }
      return it->second;
    };
    auto ratio = [&](const std::vector<SpectralField>& fs, const ComplexMask& mask, double q) {
      double best = 0.0;
      for (const auto& F : fs) {
        const Field f = inverse(F);
        best = std::max(best, lp_norm(inverse(apply_mask(F, mask)), q) / lp_norm(f, q));
      }
      return best;
    };
    auto corpus_for = [](double q, bool conj) { return q > 2.0 ? (conj ? -1 : 1) : (q < 2.0 ? 0 : 1); };

    Report r;
    r.corpus = "chirp_log x " + std::to_string(sw.members) + " band=[2^" + std::to_string(k_lo) + ",2^" +
               std::to_string(K) + "|2^" + std::to_string(K2) + "]";
    r.truncation.n = g.n();
    r.table_header = {"p", "beta", "ratio_K", "ratio_K2", "growth", "dual_p", "dual_ratio_K", "dual_ratio_K2",
                      "dual_growth"};
    std::vector<MemberStat> stats;
    double plancherel_worst = 0.0;
    for (double q : sw.ps) {
      const double qd = q / (q - 1.0);
      std::vector<double> growth, dual_growth;
      for (double beta : sw.betas) {
        const RadialSymbol m = RadialSymbol::model(p.gamma, beta, p.N);
        const ComplexMask mask = symbol_mask(m, g);
        ComplexMask cmask = mask;
        for (auto& v : cmask.values) v = std::conj(v);
        const double rK = ratio(spectra(K, corpus_for(q, false)), mask, q);
        const double rK2 = ratio(spectra(K2, corpus_for(q, false)), mask, q);
        const double dK = ratio(spectra(K, corpus_for(qd, true)), cmask, qd);
        const double dK2 = ratio(spectra(K2, corpus_for(qd, true)), cmask, qd);
        growth.push_back(rK2 / rK);
        dual_growth.push_back(dK2 / dK);
        r.table_rows.push_back({q, beta, rK, rK2, rK2 / rK, qd, dK, dK2, dK2 / dK});
        MemberStat s;
        s.label = "p=" + std::to_string(q) + " beta=" + std::to_string(beta);
        s.max_ratio = s.median_ratio = std::max(rK, rK2);
        s.points = 1;
        stats.push_back(s);
        r.series.push_back({beta, rK2 / rK});
        if (q == 2.0) plancherel_worst = std::max({plancherel_worst, rK, rK2, dK, dK2});
        if (beta >= 0.0 && q != 2.0) {
          r.add_metric("threshold_p" + std::to_string(q), p.d * (p.gamma - 1.0) * std::abs(0.5 - 1.0 / q));
        }
      }
      if (q == 2.0) continue;
      double worst_increase = 0.0, worst_dual = 0.0;
      for (std::size_t b = 0; b < growth.size(); ++b) {
        if (b > 0) worst_increase = std::max(worst_increase, growth[b] / growth[b - 1]);
        worst_dual = std::max(worst_dual, std::abs(dual_growth[b] / growth[b] - 1.0));
      }
      const std::string tag = "p=" + std::to_string(q);
      if (growth.size() > 1) r.add_check("growth_nonincreasing " + tag, worst_increase, 1.0, "<=");
      r.add_check("duality " + tag, worst_dual, sw.dual_tolerance, "<=");
    }
    for (double q : sw.ps) {
      if (q == 2.0) {
        r.add_check("plancherel_p2", plancherel_worst, 1.0 + 1e-10, "<=");
        break;
      }
    }
    r.members = std::move(stats);
    std::vector<double> all;
    for (const auto& s : r.members) all.push_back(s.max_ratio);
    r.histogram = log_histogram(all, 20);
    finalize_members(r);
    return r;
  });
}

Report verify(const std::string& name, const HarnessConfig& cfg) {
  if (name == "decoupling") return verify_decoupling(cfg);
  if (name == "recoupling") return verify_recoupling(cfg);
  if (name == "local_multiplier") return verify_local_multiplier(cfg);
  if (name == "pointwise") return verify_pointwise(cfg);
  if (name == "forward_weighted") return verify_forward_weighted(cfg);
  if (name == "reverse_weighted") return verify_reverse_weighted(cfg);
  if (name == "weighted_multiplier") return verify_weighted_multiplier(cfg);
  if (name == "maximal_lr") return verify_maximal_lr(cfg);
  if (name == "lp_sweep") return lp_sweep(cfg);
  throw ConfigError("unknown experiment '" + name + "'");
}

std::vector<Check> preflight(const HarnessConfig& cfg) {
  const LogParams& p = cfg.params;
  const TorusGrid g(p.d, cfg.resolution.n);
  const int kmax = g.max_annulus();
  std::mt19937_64 rng(cfg.corpus.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lo = p.k0 + 1e-6, hi = kmax + 0.25 - 1e-6;
  double dev = 0.0;
  for (int s = 0; s < 10000; ++s) {
    const double r = std::exp2(lo + (hi - lo) * unit(rng));
    const double ang = 2.0 * std::numbers::pi * unit(rng);
    const Point xi = p.d == 1 ? Point{unit(rng) < 0.5 ? -r : r, 0.0} : Point{r * std::cos(ang), r * std::sin(ang)};
    dev = std::max(dev, std::abs(partition_sum(xi, p, kmax) - 1.0));
  }
  Report tmp;
  tmp.add_check("preflight_partition_identity", dev, 1e-10, "<=");
  const auto spec = band_corpus(cfg, g);
  const auto f = gen_corpus({spec.seed, CorpusKind::random_bandlimited, 1, spec.k_lo, spec.k_hi, p.gamma, 1.0}, g);
  const double l2 = lp_norm(f.front(), 2.0);
  tmp.add_check("preflight_plancherel", std::abs(l2 - forward(f.front()).l2_norm()) / l2, 1e-10, "<=");
  return tmp.checks;
}

std::vector<Report> run_all(const HarnessConfig& cfg) {
  std::vector<Report> out;
  if (cfg.experiments.empty()) return out;
  for (const auto& name : cfg.experiments) {
    if (std::find(experiment_names().begin(), experiment_names().end(), name) == experiment_names().end()) {
      throw ConfigError("unknown experiment '" + name + "'");
    }
  }
  const auto pre = preflight(cfg);
  for (const auto& name : experiment_names()) {
    if (std::find(cfg.experiments.begin(), cfg.experiments.end(), name) == cfg.experiments.end()) continue;
    out.push_back(verify(name, cfg));
  }
  out.front().checks.insert(out.front().checks.begin(), pre.begin(), pre.end());
  return out;
}

Report miyachi_report(const RadialSymbol& s, const LogParams& p, double u_lo, double u_hi, int count,
                      std::uint64_t seed) {
  const auto start = Clock::now();
  Report r;
  r.name = "miyachi_" + s.name();
  const auto balls = log_subdyadic_balls(u_lo, u_hi, count, p);
  const std::vector<double> thetas{0.0, 1.0, p.sigma};
  const MiyachiReport mr = miyachi_constant(s, balls, thetas, p, seed);
  r.corpus = std::to_string(count) + " balls, log R_B in [" + std::to_string(u_lo) + "," + std::to_string(u_hi) +
             "], theta in {0, 1, sigma}";
  double refined = 0.0;
  for (const auto& rec : mr.records) refined = std::max(refined, rec.refined);
  r.table_header = {"R_B", "theta", "rescaled", "quantity", "refined"};
  for (const auto& rec : mr.records) {
    r.table_rows.push_back({rec.R_B, rec.theta, rec.bump == "rescaled" ? 1.0 : 0.0, rec.quantity, rec.refined});
  }
  for (std::size_t b = 0; b < balls.size(); ++b) {
    MemberStat m;
    m.label = "ball#" + std::to_string(b);
    m.max_ratio = m.median_ratio = mr.per_ball[b];
    m.points = 1;
    r.members.push_back(m);
    r.series.push_back({std::log(balls[b].R_B()), mr.per_ball[b]});
  }
  r.histogram = log_histogram(mr.per_ball, 12);
  finalize_members(r);
  set_drift(r, "local_grid_doubling", mr.constant, refined);
  r.add_metric("ball_spread", mr.ball_spread);
  r.add_metric("growth_slope", mr.growth_slope);
  r.add_check("ball_spread", mr.ball_spread, 3.0, "<=");
  r.add_check("growth_flag", mr.growth_flag ? 1.0 : 0.0, 0.0, "<=");
  for (int j = 0; j <= std::min(3, s.max_order()); ++j) {
    double worst = 0.0;
    for (int q = 0; q <= 64; ++q) {
      const double R = std::exp(4.0 + 16.0 * q / 64.0);
      worst = std::max(worst, pointwise_miyachi_ratio(s, R, j, p));
    }
    r.add_metric("pointwise_max_j" + std::to_string(j), worst);
    r.add_check("pointwise_bounded_j" + std::to_string(j), worst, 0.0, "finite");
  }
  // Classical Mikhlin normalization |m'(R)| R (log R)^beta along R = e^{2^j}.
  double prev = 0.0, worst_step = std::numeric_limits<double>::infinity();
  for (int j = 3; j <= 6; ++j) {
    const double L = std::exp2(j);
    const double v = std::abs(s.derivative(std::exp(L), 1)) * std::exp(L) * std::pow(L, p.beta);
    r.add_metric("mikhlin_ratio_j" + std::to_string(j), v);
    if (j > 3) worst_step = std::min(worst_step, v / prev);
    prev = v;
  }
  r.add_check("mikhlin_ratio_increasing", worst_step, 1.0, "trend");
  r.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

}  // namespace logsub
