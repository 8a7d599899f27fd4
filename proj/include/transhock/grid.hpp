#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

#include "transhock/errors.hpp"

namespace transhock {

// Uniform node-centred grid on the rectangle [x0, x0+lx] x [y0, y0+ly].
struct RectGrid {
  double x0 = 0.0;
  double y0 = 0.0;
  double lx = 1.0;
  double ly = 1.0;
  int nx = 3;
  int ny = 3;

  RectGrid() = default;
  RectGrid(double x0_, double y0_, double lx_, double ly_, int nx_, int ny_)
      : x0(x0_), y0(y0_), lx(lx_), ly(ly_), nx(nx_), ny(ny_) {
    if (nx < 3 || ny < 3) throw DomainError("RectGrid: need at least 3 nodes per direction");
    if (lx <= 0.0 || ly <= 0.0) throw DomainError("RectGrid: non-positive extent");
  }

  double hx() const { return lx / (nx - 1); }
  double hy() const { return ly / (ny - 1); }
  double x(int i) const { return x0 + i * hx(); }
  double y(int j) const { return y0 + j * hy(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  bool same_layout(const RectGrid& o) const {
    return nx == o.nx && ny == o.ny && x0 == o.x0 && y0 == o.y0 && lx == o.lx && ly == o.ly;
  }
};

// Nodal scalar field over a RectGrid, stored row-major in i (x index outer).
class ScalarField2D {
 public:
  ScalarField2D() = default;
  explicit ScalarField2D(const RectGrid& g, double fill = 0.0)
      : grid_(g), v_(g.size(), fill) {}

  const RectGrid& grid() const { return grid_; }
  double& at(int i, int j) { return v_[static_cast<std::size_t>(i) * grid_.ny + j]; }
  double at(int i, int j) const { return v_[static_cast<std::size_t>(i) * grid_.ny + j]; }
  double& operator()(int i, int j) { return at(i, j); }
  double operator()(int i, int j) const { return at(i, j); }
  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }

  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  RectGrid grid_;
  std::vector<double> v_;
};

// -------- quadrature helpers --------

// Composite trapezoid over uniformly spaced samples.
double trapezoid(const std::vector<double>& f, double h);

// Composite Simpson; requires an odd sample count, falls back to trapezoid otherwise.
double simpson(const std::vector<double>& f, double h);

// Trapezoid in both directions over all grid nodes.
double trapezoid2d(const ScalarField2D& f);

// cum[j] = integral from the first sample to sample j (trapezoid).
std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double h);

// -------- finite differences --------

// d/dx of a nodal field: centred inside, second-order one-sided at the edges.
ScalarField2D diff_x(const ScalarField2D& f);
ScalarField2D diff_y(const ScalarField2D& f);

// -------- interpolation --------

// Cubic Lagrange interpolation through the 4 samples nearest to x.
// xs must be uniform ascending; clamps the stencil at the ends.
double cubic_interp(const std::vector<double>& fs, double x0, double h, double x);

// Cubic in x through grid columns, then cubic in y: bicubic sample of a field.
double bicubic_sample(const ScalarField2D& f, double x, double y);

// Column trace f(x, y_j) for all j, cubic in x.
std::vector<double> sample_column_cubic(const ScalarField2D& f, double x);

}  // namespace transhock
