#pragma once

#include <string>
#include <vector>

#include "transhock/gas.hpp"
#include "transhock/nozzle.hpp"

namespace transhock {

// Solvability function R(xi) = int_0^L Theta - kdot * int_0^xi Theta with a
// cached cumulative quadrature; evaluable (smoothly) anywhere in [0, L].
class RFunction {
 public:
  RFunction(const NozzleSpec& spec, double kdot_value, int cache_cells = 4096);

  double r(double xi) const;
  double r_prime(double xi) const { return -kdot_ * theta_(xi); }
  double integral_theta_to(double xi) const;
  double total_integral() const { return total_; }
  double kdot_value() const { return kdot_; }

 private:
  Profile1D theta_;
  double length_;
  double kdot_;
  double cell_;
  std::vector<double> cum_;  // cumulative Simpson at cache nodes
  double total_;
};

double pstar(const BackgroundShock& bg, const GasConstants& g, const Profile1D& pressure,
             int quad_cells = 2048);

struct RootInfo {
  double xi_star = 0.0;
  double theta_at_root = 0.0;
  double r_prime = 0.0;
  int r_prime_sign = 0;
  double residual = 0.0;     // R(xi*) - pstar
  bool degenerate = false;   // tangential root or Theta(xi*) == 0
  bool boundary = false;     // sits on xi = 0 or xi = L
};

struct LocationReport {
  std::vector<RootInfo> roots;  // ascending in xi
  double r_lower = 0.0;
  double r_upper = 0.0;
  double p_star = 0.0;
  double kdot = 0.0;
  bool in_range = false;
  std::string status;  // "ok" | "out-of-range" | "boundary-of-range" | "flat-degenerate"
  int scan_cells = 0;

  // Roots eligible to seed the nonlinear solve.
  std::vector<RootInfo> admissible() const;
};

struct LocatorOptions {
  int scan_cells = 4096;
  double bisect_rel_tol = 1e-12;   // on the bracket width, relative to L
  double theta_tol = 1e-6;         // |Theta(xi*)| below this (relative to the
                                   // scanned max |Theta|) marks degeneracy
  double boundary_rel_tol = 1e-7;  // distance to an endpoint, relative to L
};

LocationReport find_admissible_locations(const NozzleSpec& spec, const BackgroundShock& bg,
                                         const GasConstants& g, const LocatorOptions& opts = {});

}  // namespace transhock
