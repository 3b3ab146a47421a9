#include "logsub/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "logsub/error.hpp"

namespace logsub {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Resolution read_resolution(const json& j, Resolution base, const std::string& where) {
  require_keys(j, where, {"n", "du", "J"});
  read(j, "n", base.n);
  read(j, "du", base.du);
  read(j, "J", base.J);
  if (base.n < 8 || (base.n & (base.n - 1)) != 0) throw ConfigError(where + ": n must be a power of two >= 8");
  if (!(base.du > 0.0)) throw ConfigError(where + ": du must be positive");
  return base;
}

std::vector<WeightKind> read_weights(const json& j) {
  if (!j.is_array()) throw ConfigError("weights: expected an array of names");
  std::vector<WeightKind> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ConfigError("weights: expected names");
    out.push_back(parse_weight_kind(v.get<std::string>()));
  }
  return out;
}

}  // namespace

HarnessConfig parse_config(const std::string& text) {
  json j;
  try {
    j = text.find_first_not_of(" \t\r\n") == std::string::npos ? json::object() : json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require_keys(j, "config", {"params", "grid", "corpus", "weights", "symbol", "experiments", "refine", "maximal",
                             "sweep", "local", "drift_limit"});

  int d = 1;
  double gamma = 2.0, beta = 1.0;
  const json params = j.value("params", json::object());
  require_keys(params, "params", {"d", "gamma", "beta", "sigma", "lambda", "R0", "t0", "k0", "c0", "C0", "C1", "N"});
  read(params, "d", d);
  read(params, "gamma", gamma);
  read(params, "beta", beta);
  if (d != 1 && d != 2) throw ConfigError("params.d must be 1 or 2");

  HarnessConfig cfg;
  try {
    cfg = HarnessConfig::defaults(d, gamma, beta);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
  LogParams& p = cfg.params;
  read(params, "sigma", p.sigma);
  read(params, "lambda", p.lambda);
  read(params, "R0", p.R0);
  read(params, "t0", p.t0);
  read(params, "k0", p.k0);
  read(params, "c0", p.c0);
  read(params, "C0", p.C0);
  read(params, "C1", p.C1);
  read(params, "N", p.N);
  if (params.contains("k0") && !params.contains("t0")) p.t0 = LogParams::default_t0(p.gamma, p.k0);
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }

  if (j.contains("grid")) {
    const json& gj = j["grid"];
    require_keys(gj, "grid", {"n", "du", "J", "overrides"});
    json top = json::object();
    for (const char* k : {"n", "du", "J"}) {
      if (gj.contains(k)) top[k] = gj[k];
    }
    cfg.resolution = read_resolution(top, cfg.resolution, "grid");
    if (gj.contains("overrides")) {
      if (!gj["overrides"].is_object()) throw ConfigError("grid.overrides: expected an object");
      cfg.overrides.clear();
      for (const auto& [name, v] : gj["overrides"].items()) {
        cfg.overrides[name] = read_resolution(v, cfg.resolution, "grid.overrides." + name);
      }
    }
  }

  if (j.contains("corpus")) {
    const json& cj = j["corpus"];
    require_keys(cj, "corpus", {"seed", "random_bandlimited", "wave_packet", "tone", "chirp_log", "k_lo", "k_hi"});
    read(cj, "seed", cfg.corpus.seed);
    read(cj, "random_bandlimited", cfg.corpus.random_bandlimited);
    read(cj, "wave_packet", cfg.corpus.wave_packet);
    read(cj, "tone", cfg.corpus.tone);
    read(cj, "chirp_log", cfg.corpus.chirp_log);
    read(cj, "k_lo", cfg.corpus.k_lo);
    read(cj, "k_hi", cfg.corpus.k_hi);
  }
  if (j.contains("weights")) cfg.weights = read_weights(j["weights"]);

  cfg.symbol.gamma = p.gamma;
  cfg.symbol.beta = p.beta;
  if (j.contains("symbol")) {
    const json& sj = j["symbol"];
    require_keys(sj, "symbol", {"kind", "gamma", "beta", "alpha", "table", "value_at_zero"});
    std::string kind = to_string(cfg.symbol.kind);
    read(sj, "kind", kind);
    cfg.symbol.kind = parse_symbol_kind(kind);
    read(sj, "gamma", cfg.symbol.gamma);
    read(sj, "beta", cfg.symbol.beta);
    read(sj, "alpha", cfg.symbol.alpha);
    std::string table;
    read(sj, "table", table);
    cfg.symbol.table = table;
    if (sj.contains("value_at_zero")) {
      std::vector<double> z;
      read(sj, "value_at_zero", z);
      if (z.size() != 2) throw ConfigError("symbol.value_at_zero: expected [re, im]");
      cfg.symbol.value_at_zero = cplx{z[0], z[1]};
    }
    try {
      (void)make_symbol(cfg.symbol, p.N);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("symbol: ") + e.what());
    }
  }

  if (j.contains("experiments")) {
    std::vector<std::string> names;
    read(j, "experiments", names);
    for (const auto& n : names) {
      if (std::find(experiment_names().begin(), experiment_names().end(), n) == experiment_names().end()) {
        throw ConfigError("unknown experiment '" + n + "'");
      }
    }
    cfg.experiments = names;
  }
  read(j, "refine", cfg.refine);
  read(j, "drift_limit", cfg.drift_limit);

  if (j.contains("maximal")) {
    const json& mj = j["maximal"];
    require_keys(mj, "maximal", {"r", "beta_below", "weights"});
    read(mj, "r", cfg.maximal.r);
    read(mj, "beta_below", cfg.maximal.beta_below);
    if (mj.contains("weights")) cfg.maximal.weights = read_weights(mj["weights"]);
    if (!(cfg.maximal.r >= 1.0)) throw ConfigError("maximal.r must be at least 1");
  }
  if (j.contains("sweep")) {
    const json& sj = j["sweep"];
    require_keys(sj, "sweep", {"p", "beta", "ceiling", "ceiling_step", "members", "dual_tolerance"});
    read(sj, "p", cfg.sweep.ps);
    read(sj, "beta", cfg.sweep.betas);
    read(sj, "ceiling", cfg.sweep.ceiling);
    read(sj, "ceiling_step", cfg.sweep.ceiling_step);
    read(sj, "members", cfg.sweep.members);
    read(sj, "dual_tolerance", cfg.sweep.dual_tolerance);
    for (double q : cfg.sweep.ps) {
      if (!(q > 1.0 && std::isfinite(q))) throw ConfigError("sweep.p entries must lie in (1, inf)");
    }
  }
  if (j.contains("local")) {
    const json& lj = j["local"];
    require_keys(lj, "local", {"level_offsets", "members", "spread_limit"});
    read(lj, "level_offsets", cfg.local.level_offsets);
    read(lj, "members", cfg.local.members);
    read(lj, "spread_limit", cfg.local.spread_limit);
  }
  return cfg;
}

HarnessConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const HarnessConfig& cfg) {
  const LogParams& p = cfg.params;
  json j;
  j["params"] = {{"d", p.d},   {"gamma", p.gamma}, {"beta", p.beta}, {"sigma", p.sigma}, {"lambda", p.lambda},
                 {"R0", p.R0}, {"t0", p.t0},       {"k0", p.k0},     {"c0", p.c0},       {"C0", p.C0},
                 {"C1", p.C1}, {"N", p.N}};
  auto res = [](const Resolution& r) { return json{{"n", r.n}, {"du", r.du}, {"J", r.J}}; };
  j["grid"] = res(cfg.resolution);
  j["grid"]["overrides"] = json::object();
  for (const auto& [k, v] : cfg.overrides) j["grid"]["overrides"][k] = res(v);
  const auto& c = cfg.corpus;
  j["corpus"] = {{"seed", c.seed},           {"random_bandlimited", c.random_bandlimited},
                 {"wave_packet", c.wave_packet}, {"tone", c.tone},
                 {"chirp_log", c.chirp_log}, {"k_lo", c.k_lo},
                 {"k_hi", c.k_hi}};
  j["weights"] = json::array();
  for (auto w : cfg.weights) j["weights"].push_back(to_string(w));
  j["symbol"] = {{"kind", to_string(cfg.symbol.kind)},
                 {"gamma", cfg.symbol.gamma},
                 {"beta", cfg.symbol.beta},
                 {"alpha", cfg.symbol.alpha},
                 {"table", cfg.symbol.table.string()}};
  if (cfg.symbol.value_at_zero) {
    j["symbol"]["value_at_zero"] = {cfg.symbol.value_at_zero->real(), cfg.symbol.value_at_zero->imag()};
  }
  j["experiments"] = cfg.experiments;
  j["refine"] = cfg.refine;
  j["drift_limit"] = cfg.drift_limit;
  j["maximal"] = {{"r", cfg.maximal.r}, {"beta_below", cfg.maximal.beta_below}, {"weights", json::array()}};
  for (auto w : cfg.maximal.weights) j["maximal"]["weights"].push_back(to_string(w));
  j["sweep"] = {{"p", cfg.sweep.ps},
                {"beta", cfg.sweep.betas},
                {"ceiling", cfg.sweep.ceiling},
                {"ceiling_step", cfg.sweep.ceiling_step},
                {"members", cfg.sweep.members},
                {"dual_tolerance", cfg.sweep.dual_tolerance}};
  j["local"] = {{"level_offsets", cfg.local.level_offsets},
                {"members", cfg.local.members},
                {"spread_limit", cfg.local.spread_limit}};
  return j.dump(2) + "\n";
}

}  // namespace logsub
