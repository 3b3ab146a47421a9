#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "logsub/config.hpp"
#include "logsub/error.hpp"
#include "logsub/harness.hpp"
#include "logsub/partition.hpp"
#include "logsub/report.hpp"
#include "logsub/symbols.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfigError = 2;

struct Options {
  std::string config;
  std::string out = "logsub_out";
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  bool refine = false;
};

logsub::HarnessConfig load(const Options& o) {
  logsub::HarnessConfig cfg = o.config.empty() ? logsub::HarnessConfig::defaults() : logsub::load_config(o.config);
  if (o.seed) cfg.corpus.seed = *o.seed;
  if (o.refine) cfg.refine = true;
  return cfg;
}

int emit(const Options& o, const std::vector<logsub::Report>& reports) {
  logsub::write_bundle(o.out, reports, o.format == "csv");
  std::cout << logsub::summary_table(reports);
  int code = kPass;
  for (const auto& r : reports) {
    if (const auto* c = r.failed_check()) {
      std::cerr << "FAIL " << r.name << ": " << c->name << " = " << c->value << " (" << c->relation << " " << c->limit
                << ")\n";
      code = kFail;
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"logsub: log-subdyadic Littlewood-Paley verification harness"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "Output directory for the report bundle");
  app.add_option("--seed", o.seed, "Corpus seed");
  app.add_flag("--refine", o.refine, "Run both resolutions and record drift");
  app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  auto* part = app.add_subcommand("partition", "Write the cell inventory of the configured grid");
  auto* ver = app.add_subcommand("verify", "Verify one named estimate");
  std::string name;
  ver->add_option("name", name, "Estimate name")->required();
  auto* sweep = app.add_subcommand("sweep-lp", "L^p threshold sweep");
  auto* miy = app.add_subcommand("miyachi", "Localized Miyachi constant of a symbol");
  std::string symbol_kind;
  miy->add_option("symbol", symbol_kind, "model|mikhlin_log|power_phase|tabulated|identity")->required();
  auto* all = app.add_subcommand("run-all", "Run every configured estimate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kConfigError;
  }

  try {
    const logsub::HarnessConfig cfg = load(o);
    if (*part) {
      const logsub::TorusGrid g(cfg.params.d, cfg.resolution.n);
      const auto cells = logsub::all_cells(cfg.params, g.max_annulus());
      std::filesystem::create_directories(o.out);
      const bool json = o.format == "json";
      std::ofstream os(std::filesystem::path(o.out) / (json ? "cells.json" : "cells.csv"));
      logsub::write_cell_inventory(os, cells, json);
      std::cout << cells.size() << " cells, levels " << cfg.params.k0 << ".." << g.max_annulus() << "\n";
      return os ? kPass : kFail;
    }
    if (*ver) return emit(o, {logsub::verify(name, cfg)});
    if (*sweep) return emit(o, {logsub::lp_sweep(cfg)});
    if (*miy) {
      logsub::SymbolSpec spec = cfg.symbol;
      spec.kind = logsub::parse_symbol_kind(symbol_kind);
      return emit(o, {logsub::miyachi_report(logsub::make_symbol(spec, cfg.params.N), cfg.params, 6.0, 20.0, 12,
                                             cfg.corpus.seed)});
    }
    if (*all) {
      std::filesystem::create_directories(o.out);
      std::ofstream(std::filesystem::path(o.out) / "config.json") << logsub::config_to_json(cfg);
      return emit(o, logsub::run_all(cfg));
    }
  } catch (const logsub::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kConfigError;
}
