#include "transhock/grid.hpp"

#include <algorithm>
#include <cmath>

namespace transhock {

double trapezoid(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < n; ++i) s += f[i];
  return s * h;
}

double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 3 || n % 2 == 0) return trapezoid(f, h);
  double s = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < n; i += 2) s += 4.0 * f[i];
  for (std::size_t i = 2; i + 1 < n; i += 2) s += 2.0 * f[i];
  return s * h / 3.0;
}

double trapezoid2d(const ScalarField2D& f) {
  const RectGrid& g = f.grid();
  double s = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    const double wi = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
    for (int j = 0; j < g.ny; ++j) {
      const double wj = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
      s += wi * wj * f.at(i, j);
    }
  }
  return s * g.hx() * g.hy();
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double h) {
  std::vector<double> c(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i)
    c[i] = c[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
  return c;
}

namespace {

// Third-order one-sided first derivative at the start of a line (4 samples);
// keeps edge rows from degrading fields that get differenced again.
inline double onesided4(double f0, double f1, double f2, double f3, double h) {
  return (-11.0 * f0 + 18.0 * f1 - 9.0 * f2 + 2.0 * f3) / (6.0 * h);
}
inline double onesided3(double f0, double f1, double f2, double h) {
  return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
}

}  // namespace

ScalarField2D diff_x(const ScalarField2D& f) {
  const RectGrid& g = f.grid();
  ScalarField2D d(g);
  const double h = g.hx();
  const int n = g.nx;
  for (int j = 0; j < g.ny; ++j) {
    d.at(0, j) = n >= 4 ? onesided4(f.at(0, j), f.at(1, j), f.at(2, j), f.at(3, j), h)
                        : onesided3(f.at(0, j), f.at(1, j), f.at(2, j), h);
    for (int i = 1; i < n - 1; ++i)
      d.at(i, j) = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * h);
    d.at(n - 1, j) =
        n >= 4 ? -onesided4(f.at(n - 1, j), f.at(n - 2, j), f.at(n - 3, j), f.at(n - 4, j), h)
               : -onesided3(f.at(n - 1, j), f.at(n - 2, j), f.at(n - 3, j), h);
  }
  return d;
}

ScalarField2D diff_y(const ScalarField2D& f) {
  const RectGrid& g = f.grid();
  ScalarField2D d(g);
  const double h = g.hy();
  const int n = g.ny;
  for (int i = 0; i < g.nx; ++i) {
    d.at(i, 0) = n >= 4 ? onesided4(f.at(i, 0), f.at(i, 1), f.at(i, 2), f.at(i, 3), h)
                        : onesided3(f.at(i, 0), f.at(i, 1), f.at(i, 2), h);
    for (int j = 1; j < n - 1; ++j)
      d.at(i, j) = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * h);
    d.at(i, n - 1) =
        n >= 4 ? -onesided4(f.at(i, n - 1), f.at(i, n - 2), f.at(i, n - 3), f.at(i, n - 4), h)
               : -onesided3(f.at(i, n - 1), f.at(i, n - 2), f.at(i, n - 3), h);
  }
  return d;
}

namespace {

// Index of the left end of a 4-point stencil containing x, clamped to range.
int stencil_start(int n, double x0, double h, double x) {
  int i = static_cast<int>(std::floor((x - x0) / h));
  i = std::clamp(i - 1, 0, n - 4);
  return i;
}

double cubic4(const double* f, double t) {
  // Lagrange basis on nodes 0,1,2,3 evaluated at t (stencil-local coordinate).
  const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  return f[0] * l0 + f[1] * l1 + f[2] * l2 + f[3] * l3;
}

}  // namespace

double cubic_interp(const std::vector<double>& fs, double x0, double h, double x) {
  const int n = static_cast<int>(fs.size());
  if (n < 4) {
    // Fall back to linear on tiny sample sets.
    if (n == 1) return fs[0];
    double t = std::clamp((x - x0) / h, 0.0, static_cast<double>(n - 1));
    int i = std::clamp(static_cast<int>(t), 0, n - 2);
    return fs[i] + (t - i) * (fs[i + 1] - fs[i]);
  }
  const int i0 = stencil_start(n, x0, h, x);
  const double t = (x - (x0 + i0 * h)) / h;
  return cubic4(&fs[i0], t);
}

double bicubic_sample(const ScalarField2D& f, double x, double y) {
  const RectGrid& g = f.grid();
  if (g.nx < 4 || g.ny < 4) throw DomainError("bicubic_sample: grid too small");
  const int i0 = stencil_start(g.nx, g.x0, g.hx(), x);
  const int j0 = stencil_start(g.ny, g.y0, g.hy(), y);
  const double tx = (x - g.x(i0)) / g.hx();
  const double ty = (y - g.y(j0)) / g.hy();
  double col[4];
  for (int a = 0; a < 4; ++a) {
    const double row[4] = {f.at(i0 + a, j0), f.at(i0 + a, j0 + 1), f.at(i0 + a, j0 + 2),
                           f.at(i0 + a, j0 + 3)};
    col[a] = cubic4(row, ty);
  }
  return cubic4(col, tx);
}

std::vector<double> sample_column_cubic(const ScalarField2D& f, double x) {
  const RectGrid& g = f.grid();
  std::vector<double> out(g.ny);
  const int i0 = stencil_start(g.nx, g.x0, g.hx(), x);
  const double t = (x - g.x(i0)) / g.hx();
  for (int j = 0; j < g.ny; ++j) {
    const double row[4] = {f.at(i0, j), f.at(i0 + 1, j), f.at(i0 + 2, j), f.at(i0 + 3, j)};
    out[j] = cubic4(row, t);
  }
  return out;
}

}  // namespace transhock
