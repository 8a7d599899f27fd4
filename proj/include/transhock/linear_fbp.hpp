#pragma once

#include <vector>

#include "transhock/elliptic.hpp"
#include "transhock/gas.hpp"
#include "transhock/locator.hpp"
#include "transhock/nozzle.hpp"

namespace transhock {

// First-order perturbation fields of the supersonic flow on the whole duct.
struct LinearSupersonic {
  RectGrid grid;                     // (0,L) x (0,1)
  ScalarField2D p, theta, q, s;      // perturbations about the background
  ScalarField2D potential;           // stream potential the scheme marches
};

// kappa^2 = q_minus (M_minus^2 - 1) / (rho_minus q_minus)^2: squared inverse
// slope of the characteristics of the linearized supersonic system.
double supersonic_kappa(const BackgroundShock& bg);

// Second-order leapfrog march of the potential (the production scheme).
LinearSupersonic solve_linear_supersonic(const NozzleSpec& spec, const BackgroundShock& bg,
                                         const RectGrid& grid);

// Characteristic upwind march of (p_dot, theta_dot) with coefficients frozen
// at the background; independent cross-check scheme.  order 2 uses the
// second-order upwind-biased stencil, order 1 plain donor-cell.
LinearSupersonic solve_linear_supersonic_upwind(const NozzleSpec& spec,
                                                const BackgroundShock& bg,
                                                const RectGrid& grid, int order = 2);

struct LinearSolution {
  double xi_star = 0.0;
  RectGrid grid;                 // (xi_star, L) x (0,1)
  ScalarField2D p, theta, q, s;  // subsonic perturbation fields
  std::vector<double> psi_dot_prime;       // shock-slope perturbation on eta nodes
  std::vector<double> g1s, g2s, g3s;       // shock-trace data for (p, q, S)
  double compat_residual = 0.0;            // of the assembled elliptic problem
};

struct LinearOptions {
  // Absolute compatibility tolerance; negative selects
  // max(compat_rel * scale, compat_h2 * h^2 * scale).
  double compat_tol = -1.0;
  double compat_rel = 1e-8;
  double compat_h2 = 50.0;
  SolveMethod method = SolveMethod::Direct;
};

LinearSolution solve_linear_subsonic(double xi_star, const NozzleSpec& spec,
                                     const BackgroundShock& bg, const GasConstants& g,
                                     const LinearSupersonic& supersonic, const RectGrid& sub_grid,
                                     const LinearOptions& opts = {});

// pstar minus R(xi_star): both sides of the location equation evaluated
// independently.
double verify_solvability_identity(double xi_star, const NozzleSpec& spec,
                                   const BackgroundShock& bg, const GasConstants& g);

// a_plus = (1/(rho+ q+)) (1 - M+^2)/(rho+ q+^2), the elliptic coefficient of
// the subsonic linearization (positive for subsonic states).
double subsonic_a2(const BackgroundShock& bg);

// Grid builders: supersonic grid satisfying the leapfrog stability bound,
// subsonic grid matched to the aspect ratio (L - xi_star) : 1.
RectGrid default_supersonic_grid(const NozzleSpec& spec, const BackgroundShock& bg,
                                 int eta_nodes = 129, int min_xi_nodes = 257);
RectGrid default_subsonic_grid(double xi_star, const NozzleSpec& spec, int eta_nodes = 129,
                               int xi_nodes = 0);

// psi_dot(eta) = xi_star - int_eta^1 psi_dot_prime (trapezoid).
std::vector<double> integrate_shock_curve(double xi_star, const std::vector<double>& psi_prime,
                                          double h_eta);

}  // namespace transhock
