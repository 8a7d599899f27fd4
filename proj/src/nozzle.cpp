#include "transhock/nozzle.hpp"

#include <cmath>

namespace transhock {

NozzleSpec make_nozzle(double length, double sigma, Profile1D theta, Profile1D pressure) {
  if (!(length > 0.0)) throw DomainError("make_nozzle: length must be positive");
  if (sigma < 0.0) throw DomainError("make_nozzle: sigma must be non-negative");
  NozzleSpec spec;
  spec.length = length;
  spec.sigma = sigma;
  spec.theta = std::move(theta);
  spec.pressure = std::move(pressure);
  return spec;
}

std::array<double, 3> NozzleSpec::inlet_compatibility() const {
  // Fourth-order one-sided stencils keep truncation below the reporting
  // threshold for analytic profiles.
  const double h = 1e-3 * length;
  double f[6];
  for (int k = 0; k < 6; ++k) f[k] = theta.value(k * h);
  const double d1 = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) /
                    (12.0 * h);
  const double d2 = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] -
                     10.0 * f[5]) /
                    (12.0 * h * h);
  return {std::abs(f[0]), std::abs(d1), std::abs(d2)};
}

double NozzleSpec::compatibility_violation() const {
  const auto v = inlet_compatibility();
  return std::max({v[0], v[1], v[2]});
}

double wall_height(const NozzleSpec& spec, double x, int subdivisions) {
  if (x < 0.0 || x > spec.length) throw GeometryError("wall_height: x outside [0, L]");
  if (x == 0.0) return 1.0;
  const int n = std::max(2, subdivisions);
  const double h = x / n;
  auto slope = [&](double s) {
    const double a = spec.sigma * spec.theta.value(s);
    if (std::abs(a) >= M_PI / 2.0)
      throw GeometryError("wall_height: wall angle reaches pi/2 at x = " + std::to_string(s));
    return std::tan(a);
  };
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = i * h, b = (i + 1) * h;
    acc += h / 6.0 * (slope(a) + 4.0 * slope(0.5 * (a + b)) + slope(b));
  }
  return 1.0 + acc;
}

std::vector<double> physical_y(const FlowColumn& col, const GasConstants& g) {
  const std::size_t n = col.eta.size();
  if (n < 2 || col.p.size() != n || col.theta.size() != n || col.q.size() != n ||
      col.s.size() != n)
    throw DomainError("physical_y: inconsistent column sizes");
  std::vector<double> integrand(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double rho = density(col.p[j], col.s[j], g);
    const double flux = rho * col.q[j] * std::cos(col.theta[j]);
    if (!(flux > 1e-12 * rho * col.q[j]))
      throw DomainError("physical_y: non-positive axial mass flux");
    integrand[j] = 1.0 / flux;
  }
  std::vector<double> y(n, 0.0);
  for (std::size_t j = 1; j < n; ++j)
    y[j] = y[j - 1] + 0.5 * (col.eta[j] - col.eta[j - 1]) * (integrand[j] + integrand[j - 1]);
  return y;
}

PhysicalShockCurve lagrange_to_physical(
    const std::vector<double>& eta, const std::vector<double>& psi,
    const std::function<FlowState(double xi, double eta)>& state_at, const GasConstants& g) {
  const std::size_t n = eta.size();
  if (psi.size() != n || n < 2)
    throw DomainError("lagrange_to_physical: inconsistent shock samples");
  PhysicalShockCurve out;
  out.x = psi;
  out.y.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    // Integrate up the vertical line x = psi(eta_j); the integrand switches
    // sides wherever that line crosses the shock curve.
    FlowColumn col;
    col.eta.assign(eta.begin(), eta.begin() + j + 1);
    if (col.eta.size() == 1) {
      out.y[j] = 0.0;
      continue;
    }
    for (double s : col.eta) {
      const FlowState u = state_at(psi[j], s);
      col.p.push_back(u.p);
      col.theta.push_back(u.theta);
      col.q.push_back(u.q);
      col.s.push_back(u.s);
    }
    out.y[j] = physical_y(col, g).back();
  }
  out.y_wall = out.y.back();
  out.x_wall = psi.back();
  return out;
}

}  // namespace transhock
