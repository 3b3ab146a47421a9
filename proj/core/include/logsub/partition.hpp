#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "logsub/geometry.hpp"
#include "logsub/grid.hpp"
#include "logsub/profiles.hpp"

namespace logsub {

struct Cell {
  int k = 0;
  std::array<long, 2> ell{0, 0};
  double r_k = 0.0;             // rho(2^k)
  Point center{0.0, 0.0};       // r_k * ell
  double support_radius = 0.0;  // center to corner of the nu support box
};

// Lattice spacing of annulus k.
double lattice_spacing(int k, const LogParams& p);

// True when the cutoff of cell (k, ell) is not identically zero on the
// covered part of annulus k (supp eta_k intersected with |xi| > 2^k0).
bool cell_is_relevant(int k, const std::array<long, 2>& ell, const LogParams& p);

// Cells of annulus k; throws DomainError unless k0 <= k <= kmax.
std::vector<Cell> enumerate_cells(int k, const LogParams& p, int kmax);

// eta_k(xi) * nu(xi / r_k - ell).
double cell_cutoff(const Cell& c, Point xi, const LogParams& p);

// Full double sum over levels k0..kmax and relevant lattice indices.
double partition_sum(Point xi, const LogParams& p, int kmax);

// Number of cells with cutoff above tol at xi.
std::size_t partition_overlap(Point xi, const LogParams& p, int kmax, double tol = 1e-14);

// Every cell of levels k0..kmax, level by level.
std::vector<Cell> all_cells(const LogParams& p, int kmax);

// Coefficientwise multiplication by the cell cutoff; throws DomainError if the
// grid cannot resolve annulus k.
SpectralField project(const SpectralField& F, const Cell& c, const LogParams& p);
SparseSpectral project_sparse(const SpectralField& F, const Cell& c, const LogParams& p);

struct BesselResult {
  double ratio = 0.0;
  std::size_t excluded = 0;  // points with RHS below 1e-14 and LHS above it
  std::size_t points = 0;
  std::size_t lattice_terms = 0;
};

// max_y sum_ell |F * nu_check_{k,ell}|^2 / (|F|^2 * |nu_check_k|)(y).
BesselResult bessel_ratio(const Field& F, int k, const LogParams& p);

// Tabular text: k, ell0, ell1, center0, center1, r_k, support_radius.
void write_cell_inventory(std::ostream& os, const std::vector<Cell>& cells, bool json = false);

}  // namespace logsub
