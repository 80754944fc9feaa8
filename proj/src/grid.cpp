#include "hlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "hlab/errors.hpp"

namespace hlab::grid {

std::size_t GridFunction::size() const {
  std::size_t s = static_cast<std::size_t>(cells);
  return dim == 2 ? s * s : s;
}

std::size_t GridFunction::index(int ix, int iy) const {
  return static_cast<std::size_t>(iy) * static_cast<std::size_t>(cells) +
         static_cast<std::size_t>(ix);
}

double& GridFunction::at(int ix, int iy) { return values[index(ix, iy)]; }
double GridFunction::at(int ix, int iy) const { return values[index(ix, iy)]; }

double GridFunction::diameter() const { return side * std::sqrt(static_cast<double>(dim)); }

void GridFunction::validate() const {
  if (dim != 1 && dim != 2) throw DomainError("grid dim must be 1 or 2");
  if (!(side > 0.0) || !std::isfinite(side)) throw DomainError("grid side must be positive");
  if (cells < 1) throw DomainError("grid must have at least one cell per axis");
  if (values.size() != size())
    throw DomainError("grid value count does not match cells_per_side^dim");
}

namespace {

int containing_cell(const GridFunction& f, int axis, double x) {
  const double u = (x - f.corner[axis]) / f.h();
  int i = static_cast<int>(std::floor(u));
  return std::clamp(i, 0, f.cells - 1);
}

}  // namespace

double GridFunction::value_at(std::span<const double> x) const {
  const int ix = containing_cell(*this, 0, x[0]);
  const int iy = dim == 2 ? containing_cell(*this, 1, x[1]) : 0;
  return at(ix, iy);
}

double GridFunction::sample_linear(std::span<const double> x) const {
  // Interpolation nodes are the cell centers.
  int i0[2] = {0, 0};
  double w[2] = {0.0, 0.0};
  for (int axis = 0; axis < dim; ++axis) {
    const double u = (x[axis] - corner[axis]) / h() - 0.5;
    int i = static_cast<int>(std::floor(u));
    i = std::clamp(i, 0, cells - 2 >= 0 ? cells - 2 : 0);
    i0[axis] = i;
    w[axis] = cells > 1 ? u - i : 0.0;
  }
  if (dim == 1) {
    if (cells == 1) return values[0];
    const double a = at(i0[0]), b = at(i0[0] + 1);
    return a + w[0] * (b - a);
  }
  if (cells == 1) return values[0];
  const double f00 = at(i0[0], i0[1]), f10 = at(i0[0] + 1, i0[1]);
  const double f01 = at(i0[0], i0[1] + 1), f11 = at(i0[0] + 1, i0[1] + 1);
  const double fx0 = f00 + w[0] * (f10 - f00);
  const double fx1 = f01 + w[0] * (f11 - f01);
  return fx0 + w[1] * (fx1 - fx0);
}

GridFunction GridFunction::refined() const {
  GridFunction out;
  out.dim = dim;
  out.corner = corner;
  out.side = side;
  out.cells = cells * 2;
  out.values.resize(out.size());
  if (dim == 1) {
    for (int i = 0; i < cells; ++i) {
      out.values[2 * i] = values[i];
      out.values[2 * i + 1] = values[i];
    }
  } else {
    for (int iy = 0; iy < cells; ++iy)
      for (int ix = 0; ix < cells; ++ix) {
        const double v = at(ix, iy);
        out.at(2 * ix, 2 * iy) = v;
        out.at(2 * ix + 1, 2 * iy) = v;
        out.at(2 * ix, 2 * iy + 1) = v;
        out.at(2 * ix + 1, 2 * iy + 1) = v;
      }
  }
  return out;
}

GridFunction make_grid(int dim, std::array<double, 2> corner, double side, int cells,
                       double fill) {
  GridFunction f;
  f.dim = dim;
  f.corner = corner;
  f.side = side;
  f.cells = cells;
  f.values.assign(dim == 2 ? static_cast<std::size_t>(cells) * cells
                           : static_cast<std::size_t>(cells),
                  fill);
  f.validate();
  return f;
}

GridFunction transformed(const GridFunction& f, const std::function<double(double)>& fn) {
  GridFunction out = f;
  for (double& v : out.values) v = fn(v);
  return out;
}

GridFunction abs(const GridFunction& f) {
  return transformed(f, [](double v) { return std::fabs(v); });
}

double lp_norm(const GridFunction& f, double p) {
  if (!(p > 0.0)) throw DomainError("p must be positive");
  const double cellvol = std::pow(f.h(), f.dim);
  double acc = 0.0;
  for (double v : f.values) acc += std::pow(std::fabs(v), p) * cellvol;
  return std::pow(acc, 1.0 / p);
}

double max_abs(const GridFunction& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::fabs(v));
  return m;
}

double min_value(const GridFunction& f) {
  double m = f.values.empty() ? 0.0 : f.values[0];
  for (double v : f.values) m = std::min(m, v);
  return m;
}

double max_value(const GridFunction& f) {
  double m = f.values.empty() ? 0.0 : f.values[0];
  for (double v : f.values) m = std::max(m, v);
  return m;
}

double integral(const GridFunction& f) {
  const double cellvol = std::pow(f.h(), f.dim);
  double acc = 0.0;
  for (double v : f.values) acc += v;
  return acc * cellvol;
}

double total_variation_1d(const GridFunction& f) {
  if (f.dim != 1) throw DomainError("total_variation_1d requires dim == 1");
  double tv = 0.0;
  for (int i = 0; i + 1 < f.cells; ++i) tv += std::fabs(f.values[i + 1] - f.values[i]);
  return tv;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const GridFunction& f) {
  out << "# dim=" << f.dim << " box_corner=" << fmt_double(f.corner[0]);
  if (f.dim == 2) out << "," << fmt_double(f.corner[1]);
  out << " box_side=" << fmt_double(f.side) << " cells_per_side=" << f.cells << "\n";
  const int rows = f.dim == 2 ? f.cells : 1;
  const int cols = f.dim == 2 ? f.cells : f.cells;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c) out << ",";
      out << fmt_double(f.values[static_cast<std::size_t>(r) * cols + c]);
    }
    out << "\n";
  }
}

GridFunction read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#')
    throw DomainError("grid csv: missing header line");

  GridFunction f;
  bool have_dim = false, have_corner = false, have_side = false, have_cells = false;
  std::istringstream hs(line.substr(1));
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "dim") {
      f.dim = std::stoi(val);
      have_dim = true;
    } else if (key == "box_corner") {
      const auto comma = val.find(',');
      f.corner[0] = std::stod(val.substr(0, comma));
      if (comma != std::string::npos) f.corner[1] = std::stod(val.substr(comma + 1));
      have_corner = true;
    } else if (key == "box_side") {
      f.side = std::stod(val);
      have_side = true;
    } else if (key == "cells_per_side") {
      f.cells = std::stoi(val);
      have_cells = true;
    }
  }
  if (!have_dim || !have_corner || !have_side || !have_cells)
    throw DomainError("grid csv: header must carry dim, box_corner, box_side, cells_per_side");

  f.values.reserve(f.dim == 2 ? static_cast<std::size_t>(f.cells) * f.cells
                              : static_cast<std::size_t>(f.cells));
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.values.push_back(std::stod(cell));
  }
  f.validate();
  return f;
}

}  // namespace hlab::grid
