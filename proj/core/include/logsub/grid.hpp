#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "logsub/geometry.hpp"

namespace logsub {

using cplx = std::complex<double>;

namespace detail {
void* aligned_alloc_bytes(std::size_t bytes);
void aligned_free(void* p) noexcept;
}  // namespace detail

// SIMD-aligned storage so transforms can use aligned plans.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) { return static_cast<T*>(detail::aligned_alloc_bytes(n * sizeof(T))); }
  void deallocate(T* p, std::size_t) noexcept { detail::aligned_free(p); }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using ComplexBuffer = std::vector<cplx, AlignedAllocator<cplx>>;

// Periodic grid of period 2 pi per axis; dual frequencies are integers.
class TorusGrid {
 public:
  TorusGrid() = default;
  TorusGrid(int d, std::size_t n);

  int d() const { return d_; }
  std::size_t n() const { return n_; }
  std::size_t size() const { return d_ == 1 ? n_ : n_ * n_; }
  double spacing() const;
  double cell_volume() const;

  // Integer frequency of a per-axis FFT index, in [-n/2, n/2).
  long frequency(std::size_t axis_index) const {
    return axis_index < n_ / 2 ? static_cast<long>(axis_index)
                               : static_cast<long>(axis_index) - static_cast<long>(n_);
  }
  Point frequency_at(std::size_t flat) const;
  double frequency_norm(std::size_t flat) const { return norm(frequency_at(flat)); }
  // Grid point x_j = 2 pi j / n.
  Point position_at(std::size_t flat) const;
  // Flat index of an integer frequency vector; throws if outside the grid.
  std::size_t index_of_frequency(long xi0, long xi1 = 0) const;

  // Largest annulus k with 2^{k+1} < n/2 whose cutoffs are fully resolved.
  int max_annulus() const;
  // Largest admissible u = log(1/t): frequencies up to 2/t stay below n/2.
  double resolvable_u() const;

  bool operator==(const TorusGrid&) const = default;

 private:
  int d_ = 1;
  std::size_t n_ = 8;
};

struct Field {
  TorusGrid grid;
  ComplexBuffer samples;

  static Field zeros(const TorusGrid& g);
};

struct SpectralField {
  TorusGrid grid;
  ComplexBuffer coeffs;  // FFT order per axis

  static SpectralField zeros(const TorusGrid& g);
  // Spatial L2 norm recovered through Plancherel.
  double l2_norm() const;
  // Smallest and largest |xi| with a nonzero coefficient; {inf, 0} when empty.
  std::pair<double, double> support_radii() const;
};

// Spectral field stored only on its (small) support, as a cell projection is.
struct SparseSpectral {
  TorusGrid grid;
  std::vector<std::size_t> index;
  std::vector<cplx> value;
  double r_min = 0.0;  // smallest |xi| in the support
  double r_max = 0.0;  // largest |xi| in the support

  bool empty() const { return index.empty(); }
  SpectralField densify() const;
  static SparseSpectral from_dense(const SpectralField& F);
};

// Real nonnegative quantities: weights, square functions, maximal functions.
struct RealField {
  TorusGrid grid;
  std::vector<double> values;

  static RealField constant(const TorusGrid& g, double v);
};

// Frequency-indexed masks in FFT order.
struct RealMask {
  TorusGrid grid;
  std::vector<double> values;
};
struct ComplexMask {
  TorusGrid grid;
  ComplexBuffer values;
};

SpectralField forward(const Field& f);
Field inverse(const SpectralField& F);

// In-place unnormalized transforms on raw buffers of grid.size() entries.
// sign = -1 forward, +1 inverse.
void fft_inplace(const TorusGrid& g, cplx* data, int sign);

SpectralField apply_mask(const SpectralField& F, const RealMask& mask);
SpectralField apply_mask(const SpectralField& F, const ComplexMask& mask);

double lp_norm(const Field& f, double p);
double lp_norm(const RealField& f, double p);
double weighted_l2(const Field& f, const RealField& w);
// Integral of a real field over the torus.
double integral(const RealField& f);

// Periodic convolution h^d sum_y f(y) g(x-y), computed spectrally.
Field convolve(const Field& f, const Field& g);
RealField convolve(const RealField& f, const RealField& g);

RealField squared_modulus(const Field& f);
Field to_field(const RealField& f);

struct ScaleNode {
  double t;
  double u;       // log(1/t)
  double weight;  // Delta u
};

struct ScaleGrid {
  std::vector<ScaleNode> nodes;  // t strictly decreasing
  double du = 0.0;
  double u_lo = 0.0;             // log(1/t0)
  double u_hi = 0.0;             // upper end actually integrated
  double u_requested = 0.0;      // upper end requested
  std::size_t dropped = 0;       // midpoints beyond the grid's resolvable range

  bool truncated() const { return dropped > 0; }
  double t_max() const { return nodes.empty() ? 0.0 : nodes.front().t; }
  std::size_t size() const { return nodes.size(); }
};

// Midpoint rule in u on [log(1/t0), u_max] with J cells. When a grid is given,
// nodes with 1/t >= n/4 are dropped and the drop is recorded.
ScaleGrid make_scale_grid(const LogParams& p, std::size_t J, double u_max,
                          const TorusGrid* grid = nullptr);

// Fixed step du, as many nodes as the grid resolves.
ScaleGrid default_scale_grid(const LogParams& p, const TorusGrid& grid,
                             double du = 0.125 * 0.6931471805599453);

}  // namespace logsub
