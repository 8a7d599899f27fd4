#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "transhock/gas.hpp"
#include "transhock/nozzle.hpp"

namespace tst {

inline transhock::GasConstants air() { return {1.4, 1.0, 0.0}; }

// Background used across the suites: gamma = 1.4, upstream Mach 2, p chosen
// so the upstream speed is 1 (keeps every quantity O(1)).
inline transhock::BackgroundShock bg_m2() {
  const transhock::GasConstants g = air();
  return transhock::make_background(1.0 / (g.gamma * 4.0), 2.0, g);
}

inline transhock::BackgroundShock bg_m2_p1() {
  return transhock::make_background(1.0, 2.0, air());
}

// Strictly expanding wall shape, compatible at the inlet to first order.
inline transhock::NozzleSpec expanding_nozzle(double sigma, double pressure_level,
                                              double length = 1.0) {
  using transhock::Profile1D;
  return transhock::make_nozzle(
      length, sigma, Profile1D::expression("sin(pi*x/L)^2", 0.0, length, length),
      Profile1D::constant(pressure_level, 0.0, 1.0));
}

// Wall angle of the k-bump wavy nozzle: k expanding/contracting pairs.
inline transhock::NozzleSpec wavy_nozzle(int k, double sigma, double pressure_level,
                                         double length = 1.0) {
  using transhock::Profile1D;
  return transhock::make_nozzle(
      length, sigma,
      Profile1D::expression("sin(2*" + std::to_string(k) + "*pi*x/L)", 0.0, length, length),
      Profile1D::constant(pressure_level, 0.0, 1.0));
}

// log2(e_coarse / e_fine) for a halved step.
inline double observed_order(double e_coarse, double e_fine) {
  return std::log(e_coarse / e_fine) / std::log(2.0);
}

inline double l2_error(const transhock::ScalarField2D& a,
                       const std::function<double(double, double)>& exact) {
  const transhock::RectGrid& g = a.grid();
  double acc = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double d = a.at(i, j) - exact(g.x(i), g.y(j));
      acc += d * d;
    }
  return std::sqrt(acc * g.hx() * g.hy());
}

inline double max_error(const transhock::ScalarField2D& a,
                        const std::function<double(double, double)>& exact) {
  const transhock::RectGrid& g = a.grid();
  double m = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      m = std::max(m, std::abs(a.at(i, j) - exact(g.x(i), g.y(j))));
  return m;
}

}  // namespace tst
