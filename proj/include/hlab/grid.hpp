#pragma once
#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace hlab::grid {

// Scalar field sampled at the cell centers of a uniform grid over a square
// box. Row-major storage: index = iy * cells + ix (ix alone when dim == 1).
struct GridFunction {
  int dim = 1;
  std::array<double, 2> corner{0.0, 0.0};  // minimal corner of the box
  double side = 1.0;                       // box side length
  int cells = 1;                           // cells per axis; h = side / cells
  std::vector<double> values;

  double h() const { return side / cells; }
  std::size_t size() const;
  std::size_t index(int ix, int iy = 0) const;
  double& at(int ix, int iy = 0);
  double at(int ix, int iy = 0) const;
  double center(int axis, int idx) const { return corner[axis] + (idx + 0.5) * h(); }
  double diameter() const;  // Euclidean diameter of the box

  // Value of the containing cell (clamped to the box).
  double value_at(std::span<const double> x) const;
  // Multilinear interpolation between cell centers; linear extrapolation
  // within the half-cell fringe so affine fields are reproduced exactly
  // up to the box boundary.
  double sample_linear(std::span<const double> x) const;

  // Same field, each cell split in two per axis (h -> h/2).
  GridFunction refined() const;

  void validate() const;  // throws DomainError
};

GridFunction make_grid(int dim, std::array<double, 2> corner, double side, int cells,
                       double fill = 0.0);
GridFunction transformed(const GridFunction& f, const std::function<double(double)>& fn);
GridFunction abs(const GridFunction& f);

double lp_norm(const GridFunction& f, double p);
double max_abs(const GridFunction& f);
double min_value(const GridFunction& f);
double max_value(const GridFunction& f);
double integral(const GridFunction& f);
double total_variation_1d(const GridFunction& f);

// CSV with a `# dim=... box_corner=... box_side=... cells_per_side=...`
// header line, values row-major, one grid row per line.
void write_csv(std::ostream& out, const GridFunction& f);
GridFunction read_csv(std::istream& in);

}  // namespace hlab::grid
