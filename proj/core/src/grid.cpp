#include "logsub/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "logsub/error.hpp"

namespace logsub {

namespace detail {

void* aligned_alloc_bytes(std::size_t bytes) {
  void* p = fftw_malloc(std::max<std::size_t>(bytes, 16));
  if (!p) throw std::bad_alloc();
  return p;
}

void aligned_free(void* p) noexcept { fftw_free(p); }

}  // namespace detail

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Planning is not thread-safe in FFTW; execution with new arrays is.
// FFTW_ESTIMATE keeps the chosen algorithm, and thus the bits, reproducible.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int d, std::size_t n, int sign, bool aligned) {
    std::lock_guard lock(mu_);
    auto key = std::make_tuple(d, n, sign, aligned);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t total = d == 1 ? n : n * n;
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
    unsigned flags = FFTW_ESTIMATE | (aligned ? 0u : FFTW_UNALIGNED);
    fftw_plan plan = d == 1
        ? fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, flags)
        : fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buf, buf, sign, flags);
    fftw_free(buf);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, std::size_t, int, bool>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void require_same(const TorusGrid& a, const TorusGrid& b, const char* what) {
  if (!(a == b)) throw ShapeError(std::string(what) + ": grid mismatch");
}

}  // namespace

TorusGrid::TorusGrid(int d, std::size_t n) : d_(d), n_(n) {
  if (d != 1 && d != 2) throw DomainError("TorusGrid: d must be 1 or 2");
  if (n < 8 || !std::has_single_bit(n)) throw DomainError("TorusGrid: n must be a power of two >= 8");
}

double TorusGrid::spacing() const { return kTwoPi / static_cast<double>(n_); }

double TorusGrid::cell_volume() const { return std::pow(spacing(), d_); }

Point TorusGrid::frequency_at(std::size_t flat) const {
  if (d_ == 1) return {static_cast<double>(frequency(flat)), 0.0};
  return {static_cast<double>(frequency(flat / n_)), static_cast<double>(frequency(flat % n_))};
}

Point TorusGrid::position_at(std::size_t flat) const {
  const double h = spacing();
  if (d_ == 1) return {h * static_cast<double>(flat), 0.0};
  return {h * static_cast<double>(flat / n_), h * static_cast<double>(flat % n_)};
}

std::size_t TorusGrid::index_of_frequency(long xi0, long xi1) const {
  const long half = static_cast<long>(n_ / 2);
  auto axis = [&](long xi) {
    if (xi < -half || xi >= half) throw DomainError("frequency outside grid");
    return static_cast<std::size_t>(xi < 0 ? xi + static_cast<long>(n_) : xi);
  };
  if (d_ == 1) {
    if (xi1 != 0) throw DomainError("second frequency component on a 1-d grid");
    return axis(xi0);
  }
  return axis(xi0) * n_ + axis(xi1);
}

int TorusGrid::max_annulus() const { return std::countr_zero(n_) - 3; }

double TorusGrid::resolvable_u() const { return std::log(static_cast<double>(n_) / 4.0); }

Field Field::zeros(const TorusGrid& g) { return Field{g, ComplexBuffer(g.size(), cplx{0.0, 0.0})}; }

SpectralField SpectralField::zeros(const TorusGrid& g) {
  return SpectralField{g, ComplexBuffer(g.size(), cplx{0.0, 0.0})};
}

double SpectralField::l2_norm() const {
  long double s = 0.0L;
  for (const auto& c : coeffs) s += std::norm(c);
  return std::sqrt(std::pow(kTwoPi, grid.d()) * static_cast<double>(s));
}

std::pair<double, double> SpectralField::support_radii() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] == cplx{0.0, 0.0}) continue;
    const double r = grid.frequency_norm(i);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo, hi};
}

SpectralField SparseSpectral::densify() const {
  SpectralField F = SpectralField::zeros(grid);
  for (std::size_t i = 0; i < index.size(); ++i) F.coeffs[index[i]] = value[i];
  return F;
}

SparseSpectral SparseSpectral::from_dense(const SpectralField& F) {
  SparseSpectral s{F.grid, {}, {}, std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
    if (F.coeffs[i] == cplx{0.0, 0.0}) continue;
    s.index.push_back(i);
    s.value.push_back(F.coeffs[i]);
    const double r = F.grid.frequency_norm(i);
    s.r_min = std::min(s.r_min, r);
    s.r_max = std::max(s.r_max, r);
  }
  if (s.index.empty()) s.r_min = 0.0;
  return s;
}

RealField RealField::constant(const TorusGrid& g, double v) {
  return RealField{g, std::vector<double>(g.size(), v)};
}

void fft_inplace(const TorusGrid& g, cplx* data, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  const bool aligned = fftw_alignment_of(reinterpret_cast<double*>(p)) == 0;
  fftw_plan plan = plan_cache().get(g.d(), g.n(), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, aligned);
  fftw_execute_dft(plan, p, p);
}

SpectralField forward(const Field& f) {
  if (f.samples.size() != f.grid.size()) throw ShapeError("forward: sample count mismatch");
  SpectralField F{f.grid, f.samples};
  fft_inplace(f.grid, F.coeffs.data(), -1);
  const double scale = 1.0 / static_cast<double>(f.grid.size());
  for (auto& c : F.coeffs) c *= scale;
  return F;
}

Field inverse(const SpectralField& F) {
  if (F.coeffs.size() != F.grid.size()) throw ShapeError("inverse: coefficient count mismatch");
  Field f{F.grid, F.coeffs};
  fft_inplace(F.grid, f.samples.data(), +1);
  return f;
}

SpectralField apply_mask(const SpectralField& F, const RealMask& mask) {
  require_same(F.grid, mask.grid, "apply_mask");
  if (mask.values.size() != F.coeffs.size()) throw ShapeError("apply_mask: mask size mismatch");
  SpectralField out{F.grid, F.coeffs};
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] *= mask.values[i];
  return out;
}

SpectralField apply_mask(const SpectralField& F, const ComplexMask& mask) {
  require_same(F.grid, mask.grid, "apply_mask");
  if (mask.values.size() != F.coeffs.size()) throw ShapeError("apply_mask: mask size mismatch");
  SpectralField out{F.grid, F.coeffs};
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] *= mask.values[i];
  return out;
}

namespace {

template <class Range, class Abs>
double lp_norm_impl(const TorusGrid& g, const Range& v, double p, Abs abs) {
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, abs(x));
    return m;
  }
  long double s = 0.0L;
  for (const auto& x : v) s += std::pow(static_cast<long double>(abs(x)), static_cast<long double>(p));
  return std::pow(static_cast<double>(s) * g.cell_volume(), 1.0 / p);
}

}  // namespace

double lp_norm(const Field& f, double p) {
  return lp_norm_impl(f.grid, f.samples, p, [](const cplx& z) { return std::abs(z); });
}

double lp_norm(const RealField& f, double p) {
  return lp_norm_impl(f.grid, f.values, p, [](double x) { return std::abs(x); });
}

double weighted_l2(const Field& f, const RealField& w) {
  require_same(f.grid, w.grid, "weighted_l2");
  long double s = 0.0L;
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    if (w.values[i] < 0.0) throw DomainError("weighted_l2: negative weight");
    s += static_cast<long double>(std::norm(f.samples[i])) * w.values[i];
  }
  return static_cast<double>(s) * f.grid.cell_volume();
}

double integral(const RealField& f) {
  long double s = 0.0L;
  for (double v : f.values) s += v;
  return static_cast<double>(s) * f.grid.cell_volume();
}

Field convolve(const Field& f, const Field& g) {
  require_same(f.grid, g.grid, "convolve");
  SpectralField F = forward(f);
  SpectralField G = forward(g);
  const double c = std::pow(kTwoPi, f.grid.d());
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) F.coeffs[i] *= c * G.coeffs[i];
  return inverse(F);
}

RealField convolve(const RealField& f, const RealField& g) {
  Field c = convolve(to_field(f), to_field(g));
  RealField out{f.grid, std::vector<double>(c.samples.size())};
  for (std::size_t i = 0; i < c.samples.size(); ++i) out.values[i] = c.samples[i].real();
  return out;
}

RealField squared_modulus(const Field& f) {
  RealField out{f.grid, std::vector<double>(f.samples.size())};
  for (std::size_t i = 0; i < f.samples.size(); ++i) out.values[i] = std::norm(f.samples[i]);
  return out;
}

Field to_field(const RealField& f) {
  Field out{f.grid, ComplexBuffer(f.values.size())};
  for (std::size_t i = 0; i < f.values.size(); ++i) out.samples[i] = {f.values[i], 0.0};
  return out;
}

ScaleGrid make_scale_grid(const LogParams& p, std::size_t J, double u_max, const TorusGrid* grid) {
  const double u0 = std::log(1.0 / p.t0);
  if (J < 2) throw DomainError("make_scale_grid: J must be at least 2");
  if (!(u_max > u0)) throw DomainError("make_scale_grid: u_max must exceed log(1/t0)");
  ScaleGrid sg;
  sg.du = (u_max - u0) / static_cast<double>(J);
  sg.u_lo = u0;
  sg.u_requested = u_max;
  const double u_res = grid ? grid->resolvable_u() : std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < J; ++j) {
    const double u = u0 + (static_cast<double>(j) + 0.5) * sg.du;
    if (u >= u_res) {
      ++sg.dropped;
      continue;
    }
    sg.nodes.push_back({std::exp(-u), u, sg.du});
  }
  sg.u_hi = u0 + static_cast<double>(sg.nodes.size()) * sg.du;
  return sg;
}

ScaleGrid default_scale_grid(const LogParams& p, const TorusGrid& grid, double du) {
  const double u0 = std::log(1.0 / p.t0);
  const double span = grid.resolvable_u() - u0;
  const auto J = static_cast<std::size_t>(std::floor(span / du));
  if (J < 2) throw DomainError("default_scale_grid: grid too small for two scales");
  return make_scale_grid(p, J, u0 + static_cast<double>(J) * du, &grid);
}

}  // namespace logsub
