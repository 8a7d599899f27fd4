#pragma once

#include <array>

#include "transhock/errors.hpp"

namespace transhock {

using Vec4 = std::array<double, 4>;
using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// Polytropic equation of state p = (gamma-1) e^{(S-S0)/c_v} rho^gamma.
struct GasConstants {
  double gamma = 1.4;
  double c_v = 1.0;
  double s0 = 0.0;

  void validate() const {
    if (!(gamma > 1.0)) throw DomainError("GasConstants: gamma must exceed 1");
    if (!(c_v > 0.0)) throw DomainError("GasConstants: c_v must be positive");
  }
};

// State U = (p, theta, q, S): pressure, flow angle, speed, entropy.
struct FlowState {
  double p = 1.0;
  double theta = 0.0;
  double q = 1.0;
  double s = 0.0;
};

struct DerivedState {
  double rho;
  double c;            // sonic speed
  double mach;
  double temperature;  // p / ((gamma-1) c_v rho)
  double enthalpy;     // gamma p / ((gamma-1) rho)
  double bernoulli;    // q^2/2 + enthalpy
};

double density(double p, double s, const GasConstants& g);
double entropy_from(double p, double rho, const GasConstants& g);
DerivedState derived(const FlowState& u, const GasConstants& g);

// Uniform normal-shock pair, flow axis-aligned, with the mass-flux
// normalization rho_minus * q_minus = 1 baked in at construction.
struct BackgroundShock {
  FlowState u_minus;
  FlowState u_plus;
  GasConstants gas;

  DerivedState minus() const { return derived(u_minus, gas); }
  DerivedState plus() const { return derived(u_plus, gas); }
  double jump_p() const { return u_plus.p - u_minus.p; }
};

// Subsonic state downstream of a normal shock with upstream u_minus
// (theta = 0, M > 1).  Closed-form Mach relations plus one Newton polish.
FlowState normal_shock_downstream(const FlowState& u_minus, const GasConstants& g);

// Background pair from (p_minus, M_minus), rescaled so rho_minus q_minus = 1.
BackgroundShock make_background(double p_minus, double mach_minus, const GasConstants& g);

// The four jump residuals in stream-function coordinates,
//   G1 = [1/(rho u)][p] + [v/u][v]
//   G2 = [u + p/(rho u)][p] + [p v/u][v]
//   G3 = [q^2/2 + i]
//   G4 = [v] - psi'[p]
// with u = q cos(theta), v = q sin(theta).
Vec4 rh_residuals(const FlowState& u_plus, const FlowState& u_minus, double psi_prime,
                  const GasConstants& g);

// Gradients of G1..G4 with respect to the plus and minus states, evaluated at
// a background pair (closed forms).
struct RhJacobians {
  std::array<Vec4, 4> beta_plus;
  std::array<Vec4, 4> beta_minus;
};
RhJacobians rh_jacobians(const BackgroundShock& bg, const GasConstants& g);

// Jump bracket K = [p] ((gamma-1)/(gamma p_plus) + 1/(rho_plus q_plus^2)).
double kdot(const BackgroundShock& bg, const GasConstants& g);

// Coefficient matrix of the linearized jump conditions acting on
// (p, q, S) perturbations of the plus state.
Mat3 bs_matrix(const BackgroundShock& bg, const GasConstants& g);
double bs_determinant(const BackgroundShock& bg, const GasConstants& g);

// Linear maps (p_dot_plus, q_dot_plus, S_dot_plus) of the upstream pressure
// perturbation p_dot_minus, obtained by eliminating the jump conditions.
struct GSharp {
  double p_dot_plus;
  double q_dot_plus;
  double s_dot_plus;
};
GSharp gsharp_from_pdot(const BackgroundShock& bg, const GasConstants& g, double p_dot_minus);

// Dense 3x3 solve with partial pivoting.
Vec3 solve3(const Mat3& a, const Vec3& b);

}  // namespace transhock
