#include "logsub/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "logsub/error.hpp"

namespace logsub {

namespace {

using nlohmann::json;

// JSON has no inf/nan; encode them as strings so payloads stay parseable.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << s;
}

std::string series_csv(const std::vector<SeriesPoint>& s, const char* xname, const char* yname) {
  std::string out = std::string(xname) + "," + yname + "\n";
  for (const auto& p : s) out += fmt(p.x) + "," + fmt(p.ratio) + "\n";
  return out;
}

}  // namespace

bool Report::passed() const { return failed_check() == nullptr; }

const Check* Report::failed_check() const {
  for (const auto& c : checks) {
    if (!c.pass) return &c;
  }
  return nullptr;
}

void Report::add_check(std::string cname, double value, double limit, std::string relation) {
  bool pass = false;
  if (relation == "<=") {
    pass = value <= limit;
  } else if (relation == ">=") {
    pass = value >= limit;
  } else if (relation == "finite") {
    pass = std::isfinite(value);
  } else if (relation == "trend") {
    pass = true;
  } else {
    throw std::invalid_argument("unknown check relation " + relation);
  }
  checks.push_back({std::move(cname), value, limit, std::move(relation), pass});
}

void finalize_members(Report& r) {
  r.constant = 0.0;
  r.excluded = 0;
  r.points = 0;
  for (const auto& m : r.members) {
    r.constant = std::max(r.constant, m.max_ratio);
    if (std::isnan(m.max_ratio)) r.constant = m.max_ratio;
    r.excluded += m.excluded;
    r.points += m.points;
  }
  const double frac = r.points == 0 ? 0.0 : static_cast<double>(r.excluded) / static_cast<double>(r.points);
  r.add_check("constant_finite", r.constant, 0.0, "finite");
  r.add_check("excluded_fraction", frac, 1e-3, "<=");
}

void set_drift(Report& r, std::string kind, double base, double refined, double limit) {
  r.drift.kind = std::move(kind);
  r.drift.base = base;
  r.drift.refined = refined;
  r.drift.relative = base == refined ? 0.0 : std::abs(refined - base) / std::abs(base);
  r.drift.present = true;
  r.provisional = false;
  r.add_check("refinement_drift", r.drift.relative, limit, "<=");
}

std::vector<SeriesPoint> log_histogram(const std::vector<double>& ratios, std::size_t bins) {
  std::vector<double> v;
  v.reserve(ratios.size());
  for (double x : ratios) {
    if (x > 0.0 && std::isfinite(x)) v.push_back(std::log10(x));
  }
  if (v.empty() || bins == 0) return {};
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double w = (hi - lo) / static_cast<double>(bins);
  std::vector<double> counts(bins, 0.0);
  for (double x : v) {
    auto b = static_cast<std::size_t>((x - lo) / w);
    counts[std::min(b, bins - 1)] += 1.0;
  }
  std::vector<SeriesPoint> out(bins);
  for (std::size_t b = 0; b < bins; ++b) out[b] = {std::pow(10.0, lo + (b + 0.5) * w), counts[b]};
  return out;
}

std::vector<SeriesPoint> thin_series(const std::vector<SeriesPoint>& s, std::size_t max_points) {
  if (s.size() <= max_points || max_points == 0) return s;
  const std::size_t block = (s.size() + max_points - 1) / max_points;
  std::vector<SeriesPoint> out;
  for (std::size_t i = 0; i < s.size(); i += block) {
    const auto end = std::min(s.size(), i + block);
    auto best = std::max_element(s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(end),
                                 [](const SeriesPoint& a, const SeriesPoint& b) { return a.ratio < b.ratio; });
    out.push_back(*best);
  }
  return out;
}

std::string to_json(const Report& r, bool include_timing) {
  json j;
  j["name"] = r.name;
  j["corpus"] = r.corpus;
  j["passed"] = r.passed();
  j["constant"] = num(r.constant);
  j["provisional"] = r.provisional;
  j["excluded"] = r.excluded;
  j["points"] = r.points;
  j["drift"] = {{"kind", r.drift.kind},
                {"base", num(r.drift.base)},
                {"refined", num(r.drift.refined)},
                {"relative", num(r.drift.relative)},
                {"present", r.drift.present}};
  const auto& t = r.truncation;
  j["truncation"] = {{"n", t.n},
                     {"du", num(t.du)},
                     {"scales", t.scales},
                     {"u_lo", num(t.u_lo)},
                     {"u_hi", num(t.u_hi)},
                     {"u_requested", num(t.u_requested)},
                     {"dropped", t.dropped},
                     {"degenerate_scales", t.degenerate_scales},
                     {"normalization_discrepancy", num(t.normalization_discrepancy)}};
  j["members"] = json::array();
  for (const auto& m : r.members) {
    j["members"].push_back({{"label", m.label},
                            {"max_ratio", num(m.max_ratio)},
                            {"median_ratio", num(m.median_ratio)},
                            {"excluded", m.excluded},
                            {"points", m.points}});
  }
  j["checks"] = json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back(
        {{"name", c.name}, {"value", num(c.value)}, {"limit", num(c.limit)}, {"relation", c.relation}, {"pass", c.pass}});
  }
  j["metrics"] = json::object();
  for (const auto& [k, v] : r.metrics) j["metrics"][k] = num(v);
  if (!r.table_header.empty()) {
    j["table"] = {{"header", r.table_header}, {"rows", json::array()}};
    for (const auto& row : r.table_rows) {
      json jr = json::array();
      for (double v : row) jr.push_back(num(v));
      j["table"]["rows"].push_back(jr);
    }
  }
  if (include_timing) j["runtime_seconds"] = r.runtime_seconds;
  return j.dump(2) + "\n";
}

std::string to_csv(const Report& r) {
  std::ostringstream os;
  os << "section,key,value,limit,relation,pass\n";
  os << "report,name," << r.name << ",,,\n";
  os << "report,corpus,\"" << r.corpus << "\",,,\n";
  os << "report,constant," << fmt(r.constant) << ",,," << (r.passed() ? 1 : 0) << "\n";
  os << "report,provisional," << (r.provisional ? 1 : 0) << ",,,\n";
  os << "drift," << (r.drift.kind.empty() ? "none" : r.drift.kind) << "," << fmt(r.drift.relative) << ","
     << fmt(r.drift.base) << "," << fmt(r.drift.refined) << ",\n";
  os << "truncation,n," << r.truncation.n << ",,,\n";
  os << "truncation,scales," << r.truncation.scales << ",,,\n";
  os << "truncation,dropped," << r.truncation.dropped << ",,,\n";
  for (const auto& m : r.members) {
    os << "member," << m.label << "," << fmt(m.max_ratio) << "," << fmt(m.median_ratio) << "," << m.excluded << "/"
       << m.points << ",\n";
  }
  for (const auto& c : r.checks) {
    os << "check," << c.name << "," << fmt(c.value) << "," << fmt(c.limit) << "," << c.relation << ","
       << (c.pass ? 1 : 0) << "\n";
  }
  for (const auto& [k, v] : r.metrics) os << "metric," << k << "," << fmt(v) << ",,,\n";
  return os.str();
}

std::string summary_table(const std::vector<Report>& reports) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %-6s %-14s %-10s %-10s %s\n", "report", "status", "constant", "drift",
                "excluded", "first_failure");
  os << line;
  for (const auto& r : reports) {
    const Check* f = r.failed_check();
    const std::string drift = r.drift.present ? short_fmt(r.drift.relative) : "provisional";
    std::snprintf(line, sizeof line, "%-22s %-6s %-14s %-10s %-10zu %s\n", r.name.c_str(), r.passed() ? "PASS" : "FAIL",
                  short_fmt(r.constant).c_str(), drift.c_str(), r.excluded, f ? f->name.c_str() : "-");
    os << line;
  }
  return os.str();
}

void write_bundle(const std::filesystem::path& dir, const std::vector<Report>& reports, bool csv) {
  std::filesystem::create_directories(dir);
  json summary = json::array();
  for (const auto& r : reports) {
    write_text(dir / (r.name + (csv ? ".csv" : ".json")), csv ? to_csv(r) : to_json(r));
    write_text(dir / (r.name + "_ratio.csv"), series_csv(r.series, "x", "ratio"));
    write_text(dir / (r.name + "_hist.csv"), series_csv(r.histogram, "ratio", "count"));
    if (!r.table_header.empty()) {
      std::string t;
      for (std::size_t i = 0; i < r.table_header.size(); ++i) t += (i ? "," : "") + r.table_header[i];
      t += "\n";
      for (const auto& row : r.table_rows) {
        for (std::size_t i = 0; i < row.size(); ++i) t += (i ? "," : "") + fmt(row[i]);
        t += "\n";
      }
      write_text(dir / (r.name + "_table.csv"), t);
    }
    const Check* f = r.failed_check();
    summary.push_back({{"name", r.name},
                       {"passed", r.passed()},
                       {"constant", num(r.constant)},
                       {"drift", num(r.drift.relative)},
                       {"provisional", r.provisional},
                       {"first_failure", f ? f->name : ""}});
  }
  write_text(dir / "summary.txt", summary_table(reports));
  write_text(dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace logsub
