#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace logsub {

struct MemberStat {
  std::string label;
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  std::size_t excluded = 0;  // points with RHS below the floor and LHS above it
  std::size_t points = 0;
};

struct Drift {
  std::string kind;  // "du_halving" or "n_doubling"
  double base = 0.0;
  double refined = 0.0;
  double relative = 0.0;  // |refined - base| / base
  bool present = false;
};

struct Truncation {
  std::size_t n = 0;
  double du = 0.0;
  std::size_t scales = 0;
  double u_lo = 0.0;
  double u_hi = 0.0;
  double u_requested = 0.0;
  std::size_t dropped = 0;
  std::size_t degenerate_scales = 0;
  double normalization_discrepancy = 0.0;
};

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  std::string relation;  // "<=", ">=", "finite", "trend"
  bool pass = false;
};

struct SeriesPoint {
  double x = 0.0;
  double ratio = 0.0;
};

struct Report {
  std::string name;
  std::string corpus;
  std::vector<MemberStat> members;
  double constant = 0.0;  // max over members of max_ratio
  Drift drift;
  bool provisional = true;  // no refined run
  Truncation truncation;
  std::size_t excluded = 0;
  std::size_t points = 0;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> table_header;
  std::vector<std::vector<double>> table_rows;
  std::vector<SeriesPoint> series;           // ratio field of the worst member, plot-ready
  std::vector<SeriesPoint> histogram;        // (bin center, count) of log10 ratios
  double runtime_seconds = 0.0;

  bool passed() const;
  const Check* failed_check() const;
  void add_check(std::string name, double value, double limit, std::string relation);
  void add_metric(std::string name, double value) { metrics.emplace_back(std::move(name), value); }
};

// Fills constant, excluded and points from the members and adds the exclusion
// check (at most 0.1% of the grid points).
void finalize_members(Report& r);

// Records drift between two constants and clears the provisional flag.
void set_drift(Report& r, std::string kind, double base, double refined, double limit = 0.25);

// Histogram of log10 ratios with the given number of bins.
std::vector<SeriesPoint> log_histogram(const std::vector<double>& ratios, std::size_t bins = 40);

// Thins a series to at most max_points by keeping the max of each block.
std::vector<SeriesPoint> thin_series(const std::vector<SeriesPoint>& s, std::size_t max_points = 4096);

std::string to_json(const Report& r, bool include_timing = true);
std::string to_csv(const Report& r);
std::string summary_table(const std::vector<Report>& reports);

// <name>.json|csv, <name>_ratio.csv, <name>_hist.csv and summary.txt / summary.json in dir.
void write_bundle(const std::filesystem::path& dir, const std::vector<Report>& reports, bool csv);

}  // namespace logsub
