#include "logsub/partition.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <ostream>

#include "logsub/error.hpp"

namespace logsub {

namespace {

constexpr double kHalf = BumpProfile::half_width;

double nu_value(const Cell& c, Point xi, int d) {
  const BumpProfile b;
  double v = b(xi[0] / c.r_k - static_cast<double>(c.ell[0]));
  if (d == 2 && v != 0.0) v *= b(xi[1] / c.r_k - static_cast<double>(c.ell[1]));
  return v;
}

Cell make_cell(int k, const std::array<long, 2>& ell, double r, int d) {
  Cell c;
  c.k = k;
  c.ell = ell;
  c.r_k = r;
  c.center = {r * static_cast<double>(ell[0]), r * static_cast<double>(ell[1])};
  c.support_radius = kHalf * r * std::sqrt(static_cast<double>(d));
  return c;
}

// Integer frequency range [lo, hi] along one axis covered by the open box.
std::pair<long, long> axis_range(double center, double r) {
  return {static_cast<long>(std::floor(center - kHalf * r)) + 1,
          static_cast<long>(std::ceil(center + kHalf * r)) - 1};
}

void require_resolved(const Cell& c, const TorusGrid& g) {
  if (!(std::ldexp(1.0, c.k) * std::pow(2.0, kHalf) < static_cast<double>(g.n()) / 2.0)) {
    throw DomainError("project: grid does not resolve annulus " + std::to_string(c.k));
  }
}

}  // namespace

double lattice_spacing(int k, const LogParams& p) { return rho_unchecked(std::ldexp(1.0, k), p.gamma); }

bool cell_is_relevant(int k, const std::array<long, 2>& ell, const LogParams& p) {
  if (p.d == 1 && ell[1] != 0) return false;
  const double r = lattice_spacing(k, p);
  double min_sq = 0.0;
  double max_sq = 0.0;
  for (int i = 0; i < p.d; ++i) {
    const double lo = r * (static_cast<double>(ell[i]) - kHalf);
    const double hi = r * (static_cast<double>(ell[i]) + kHalf);
    const double near = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
    const double far = std::max(std::abs(lo), std::abs(hi));
    min_sq += near * near;
    max_sq += far * far;
  }
  const double inner = std::max(std::ldexp(std::pow(2.0, -kHalf), k), std::ldexp(1.0, p.k0));
  const double outer = std::ldexp(std::pow(2.0, kHalf), k);
  return std::sqrt(min_sq) < outer && std::sqrt(max_sq) > inner;
}

std::vector<Cell> enumerate_cells(int k, const LogParams& p, int kmax) {
  if (k < p.k0 || k > kmax) throw DomainError("enumerate_cells: k outside [k0, kmax]");
  const double r = lattice_spacing(k, p);
  const long L = static_cast<long>(std::ceil(std::ldexp(2.0, k) / r + kHalf)) + 1;
  std::vector<Cell> out;
  const long L1 = p.d == 2 ? L : 0;
  for (long a = -L; a <= L; ++a) {
    for (long b = -L1; b <= L1; ++b) {
      const std::array<long, 2> ell{a, b};
      if (cell_is_relevant(k, ell, p)) out.push_back(make_cell(k, ell, r, p.d));
    }
  }
  return out;
}

std::vector<Cell> all_cells(const LogParams& p, int kmax) {
  std::vector<Cell> out;
  for (int k = p.k0; k <= kmax; ++k) {
    auto level = enumerate_cells(k, p, kmax);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

double cell_cutoff(const Cell& c, Point xi, const LogParams& p) {
  const double eta = DyadicProfile{}.level(c.k, norm(xi), p.k0);
  if (eta == 0.0) return 0.0;
  return eta * nu_value(c, xi, p.d);
}

namespace {

template <class Visit>
void visit_cells_at(Point xi, const LogParams& p, int kmax, Visit&& visit) {
  const DyadicProfile chi;
  const double r_xi = norm(xi);
  for (int k = p.k0; k <= kmax; ++k) {
    const double eta = chi.level(k, r_xi, p.k0);
    if (eta == 0.0) continue;
    const double r = lattice_spacing(k, p);
    const long a0 = static_cast<long>(std::floor(xi[0] / r - kHalf));
    const long a1 = static_cast<long>(std::ceil(xi[0] / r + kHalf));
    long b0 = 0, b1 = 0;
    if (p.d == 2) {
      b0 = static_cast<long>(std::floor(xi[1] / r - kHalf));
      b1 = static_cast<long>(std::ceil(xi[1] / r + kHalf));
    }
    for (long a = a0; a <= a1; ++a) {
      for (long b = b0; b <= b1; ++b) {
        const std::array<long, 2> ell{a, b};
        if (!cell_is_relevant(k, ell, p)) continue;
        const Cell c = make_cell(k, ell, r, p.d);
        visit(eta * nu_value(c, xi, p.d));
      }
    }
  }
}

}  // namespace

double partition_sum(Point xi, const LogParams& p, int kmax) {
  double s = 0.0;
  visit_cells_at(xi, p, kmax, [&](double v) { s += v; });
  return s;
}

std::size_t partition_overlap(Point xi, const LogParams& p, int kmax, double tol) {
  std::size_t count = 0;
  visit_cells_at(xi, p, kmax, [&](double v) { count += v > tol ? 1 : 0; });
  return count;
}

SparseSpectral project_sparse(const SpectralField& F, const Cell& c, const LogParams& p) {
  const TorusGrid& g = F.grid;
  require_resolved(c, g);
  SparseSpectral out{g, {}, {}, std::numeric_limits<double>::infinity(), 0.0};
  const long half = static_cast<long>(g.n() / 2);
  auto [a0, a1] = axis_range(c.center[0], c.r_k);
  long b0 = 0, b1 = 0;
  if (g.d() == 2) std::tie(b0, b1) = axis_range(c.center[1], c.r_k);
  for (long a = std::max(a0, -half); a <= std::min(a1, half - 1); ++a) {
    for (long b = std::max(b0, -half); b <= std::min(b1, g.d() == 2 ? half - 1 : 0L); ++b) {
      const Point xi{static_cast<double>(a), static_cast<double>(b)};
      const double v = cell_cutoff(c, xi, p);
      if (v == 0.0) continue;
      const std::size_t idx = g.index_of_frequency(a, b);
      const cplx z = F.coeffs[idx] * v;
      if (z == cplx{0.0, 0.0}) continue;
      out.index.push_back(idx);
      out.value.push_back(z);
      const double r = norm(xi);
      out.r_min = std::min(out.r_min, r);
      out.r_max = std::max(out.r_max, r);
    }
  }
  if (out.index.empty()) out.r_min = 0.0;
  return out;
}

SpectralField project(const SpectralField& F, const Cell& c, const LogParams& p) {
  return project_sparse(F, c, p).densify();
}

BesselResult bessel_ratio(const Field& F, int k, const LogParams& p) {
  const TorusGrid& g = F.grid;
  const SpectralField Fh = forward(F);
  const double r = lattice_spacing(k, p);
  BesselResult res;
  res.points = g.size();

  double cmax = 0.0;
  for (const auto& c : Fh.coeffs) cmax = std::max(cmax, std::abs(c));
  if (cmax == 0.0) return res;
  std::array<double, 2> lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  std::array<double, 2> hi{-lo[0], -lo[1]};
  for (std::size_t i = 0; i < Fh.coeffs.size(); ++i) {
    if (std::abs(Fh.coeffs[i]) <= 1e-13 * cmax) continue;
    const Point xi = g.frequency_at(i);
    for (int a = 0; a < g.d(); ++a) {
      lo[a] = std::min(lo[a], xi[a]);
      hi[a] = std::max(hi[a], xi[a]);
    }
  }
  auto ell_range = [&](int a) {
    return std::pair<long, long>{static_cast<long>(std::floor(lo[a] / r - kHalf)),
                                 static_cast<long>(std::ceil(hi[a] / r + kHalf))};
  };
  const auto [l0, l1] = ell_range(0);
  long m0 = 0, m1 = 0;
  if (g.d() == 2) std::tie(m0, m1) = ell_range(1);

  std::vector<double> lhs(g.size(), 0.0);
  Field piece = Field::zeros(g);
  for (long a = l0; a <= l1; ++a) {
    for (long b = m0; b <= m1; ++b) {
      const Cell c = make_cell(k, {a, b}, r, g.d());
      std::fill(piece.samples.begin(), piece.samples.end(), cplx{0.0, 0.0});
      bool any = false;
      for (std::size_t i = 0; i < Fh.coeffs.size(); ++i) {
        if (Fh.coeffs[i] == cplx{0.0, 0.0}) continue;
        const double v = nu_value(c, g.frequency_at(i), g.d());
        if (v == 0.0) continue;
        piece.samples[i] = Fh.coeffs[i] * v;
        any = true;
      }
      if (!any) continue;
      ++res.lattice_terms;
      fft_inplace(g, piece.samples.data(), +1);
      for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] += std::norm(piece.samples[i]);
    }
  }

  SpectralField nu0 = SpectralField::zeros(g);
  const Cell origin = make_cell(k, {0, 0}, r, g.d());
  for (std::size_t i = 0; i < nu0.coeffs.size(); ++i) nu0.coeffs[i] = nu_value(origin, g.frequency_at(i), g.d());
  const Field nu_check = inverse(nu0);
  RealField majorant{g, std::vector<double>(g.size())};
  const double norm_c = std::pow(2.0 * std::numbers::pi, -g.d());
  for (std::size_t i = 0; i < g.size(); ++i) majorant.values[i] = norm_c * std::abs(nu_check.samples[i]);
  const RealField rhs = convolve(squared_modulus(F), majorant);

  for (std::size_t i = 0; i < g.size(); ++i) {
    if (rhs.values[i] < 1e-14) {
      if (lhs[i] > 1e-14) ++res.excluded;
      continue;
    }
    res.ratio = std::max(res.ratio, lhs[i] / rhs.values[i]);
  }
  return res;
}

void write_cell_inventory(std::ostream& os, const std::vector<Cell>& cells, bool json) {
  if (json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : cells) {
      arr.push_back({{"k", c.k},
                     {"ell", {c.ell[0], c.ell[1]}},
                     {"center", {c.center[0], c.center[1]}},
                     {"r_k", c.r_k},
                     {"support_radius", c.support_radius}});
    }
    os << arr.dump(2) << '\n';
    return;
  }
  os << "k,ell0,ell1,center0,center1,r_k,support_radius\n";
  char buf[256];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%d,%ld,%ld,%.17g,%.17g,%.17g,%.17g\n", c.k, c.ell[0], c.ell[1], c.center[0],
                  c.center[1], c.r_k, c.support_radius);
    os << buf;
  }
}

}  // namespace logsub
