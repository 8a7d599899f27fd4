#pragma once

#include <functional>
#include <string>
#include <vector>

#include "transhock/gas.hpp"
#include "transhock/grid.hpp"
#include "transhock/profile.hpp"

namespace transhock {

// Duct of length L with a flat lower wall and an upper wall whose angle is
// sigma * theta(x); the receiver pressure at the exit is
// p_plus_bar + sigma * pressure(y).
struct NozzleSpec {
  double length = 1.0;
  double sigma = 0.0;
  Profile1D theta;     // wall-angle shape on [0, L]
  Profile1D pressure;  // exit-pressure shape, evaluated at the physical exit height

  // |Theta(0)|, |Theta'(0)|, |Theta''(0)| from one-sided sampled differences.
  std::array<double, 3> inlet_compatibility() const;
  // Largest of the three; reported by validate, never fatal.
  double compatibility_violation() const;
};

NozzleSpec make_nozzle(double length, double sigma, Profile1D theta, Profile1D pressure);

// Upper wall height 1 + integral of tan(sigma Theta), composite Simpson.
double wall_height(const NozzleSpec& spec, double x, int subdivisions = 512);

// Physical height of the point (xi, eta) given the flow state along the
// vertical line xi: y = integral_0^eta ds / (rho q cos theta), trapezoid on
// the given eta samples.
struct FlowColumn {
  std::vector<double> eta;
  std::vector<double> p, theta, q, s;
};
std::vector<double> physical_y(const FlowColumn& col, const GasConstants& g);

// Shock curve mapped back to physical coordinates.  `state_at` must return
// the flow state at arbitrary stream-function coordinates (on whichever side
// of the shock the point lies).
struct PhysicalShockCurve {
  std::vector<double> x;   // = psi(eta_j)
  std::vector<double> y;
  double y_wall;           // height where the shock meets the upper wall
  double x_wall;           // = psi(1)
};
PhysicalShockCurve lagrange_to_physical(
    const std::vector<double>& eta, const std::vector<double>& psi,
    const std::function<FlowState(double xi, double eta)>& state_at, const GasConstants& g);

}  // namespace transhock
