#pragma once

#include <vector>

#include "transhock/linear_fbp.hpp"

namespace transhock {

// Fully nonlinear supersonic flow on the whole duct (absolute state fields).
struct SupersonicFlow {
  RectGrid grid;
  ScalarField2D p, theta, q, s;
  double min_mach = 0.0;
};

struct SupersonicOptions {
  double mach_margin = 1e-6;  // abort below M = 1 + margin
};

SupersonicFlow solve_supersonic_nonlinear(const NozzleSpec& spec, const BackgroundShock& bg,
                                          const GasConstants& g, const RectGrid& grid,
                                          const SupersonicOptions& opts = {});

// Iterate state: perturbation fields on the fixed rectangle
// (xi_star_bar, L) x (0, 1), the shock-slope perturbation, and the anchor
// correction produced by the last solvability solve.
struct IterationState {
  RectGrid grid;
  ScalarField2D dp, dtheta, dq, ds;
  std::vector<double> dpsi_prime;
  double dxi_star = 0.0;
  int index = 0;
};

// Stopping-rule norm: sup norm plus an h-weighted beta-norm of first
// differences; the trace term is the 1-D analogue.
struct ProxyNorm {
  double beta = 4.0;
  double field(const ScalarField2D& f) const;
  double trace(const std::vector<double>& v, double h) const;
  double state(const IterationState& s) const;
  double state_diff(const IterationState& a, const IterationState& b) const;
};

struct TransonicOptions {
  int eta_nodes = 129;
  int supersonic_xi_nodes = 0;  // 0: from the stability bound
  int subsonic_xi_nodes = 0;    // 0: from the aspect ratio
  double iter_tol = 1e-10;
  int max_iters = 50;
  double final_tol = 1e-8;
  double compat_rel = 1e-8;
  double beta = 4.0;
  // Trust ball around the linear seed, radius ball_factor * sigma^(3/2).
  // Violations are always logged; enforcement aborts the run.  The ball is an
  // asymptotic (small sigma, fine grid) statement, so it stays diagnostic by
  // default.
  double ball_factor = 0.5;
  bool enforce_ball = false;
  double delta_xi_bracket = 10.0;  // bracket half-width is this times sigma * L
  SolveMethod method = SolveMethod::Direct;
};

// Everything assembled for one candidate anchor correction.
struct AssembledRhs {
  ScalarField2D f1, f2, f3;
  std::vector<double> g1, g2, g3, g4;     // raw jump data on shock nodes
  std::vector<double> g1s, g2s, g3s;      // after the 3x3 jump-matrix solve
  std::vector<double> dP3;                // exit pressure data
  std::vector<double> dTheta4;            // top wall data
  std::vector<double> psi;                // shock curve for this candidate
  double compat_residual = 0.0;           // of the assembled elliptic problem
};

class TransonicIterator {
 public:
  TransonicIterator(const NozzleSpec& spec, const BackgroundShock& bg, const GasConstants& g,
                    double xi_star_bar, const SupersonicFlow& supersonic,
                    const RectGrid& sub_grid, const TransonicOptions& opts);

  AssembledRhs assemble_rhs(const IterationState& state, double dxi_candidate) const;

  // Root of the solvability functional in the anchor correction; the
  // functional is (minus) the compatibility residual of the assembled
  // elliptic problem, so a root makes the update solvable.
  double solve_delta_xi(const IterationState& state) const;

  IterationState apply_map(const IterationState& state) const;

  const RectGrid& grid() const { return sub_grid_; }
  const NozzleSpec& spec() const { return spec_; }

 private:
  NozzleSpec spec_;
  BackgroundShock bg_;
  GasConstants gas_;
  double xi_star_bar_;
  const SupersonicFlow* supersonic_;
  RectGrid sub_grid_;
  TransonicOptions opts_;
  FirstOrderEllipticSolver elliptic_;
  Mat3 bs_;
  double a2_;
  double i_tol_;  // absolute tolerance for the solvability root
};

struct IterationLogEntry {
  int k = 0;
  double step = 0.0;
  double ratio = 0.0;
  double dxi_star = 0.0;
  double seed_distance = 0.0;
};

struct ShockResiduals {
  double max_g[4] = {0, 0, 0, 0};
  double exit_pressure = 0.0;
  double min_pressure_jump = 0.0;  // entropy condition wants this positive
};

struct ShockSolution {
  double xi_star_bar = 0.0;
  double dxi_star = 0.0;            // = psi(1) - xi_star_bar
  RectGrid grid;                    // fixed rectangle
  ScalarField2D p, theta, q, s;     // absolute subsonic fields
  std::vector<double> psi;          // shock curve on eta nodes
  std::vector<double> psi_prime;
  SupersonicFlow supersonic;
  LinearSolution seed;
  std::vector<IterationLogEntry> log;
  ShockResiduals residuals;
  int iterations = 0;
  bool converged = false;
  bool ball_violated = false;
  double median_ratio = 0.0;
  double sup_deviation = 0.0;       // max |U+ - U+_bar| over the fields
  double seed_distance = 0.0;       // proxy-norm distance of the fixed point from the seed

  FlowState state_at_fixed(int i, int j) const;  // fixed-rectangle node state
};

ShockSolution solve_transonic(const NozzleSpec& spec, const BackgroundShock& bg,
                              const GasConstants& g, double xi_star_seed,
                              const TransonicOptions& opts = {});

// Largest perturbation amplitude for which solve_transonic converges on this
// problem, found by bisection on convergence starting from sigma_init.  The
// admissible range has no closed form, so it is probed empirically.
double find_sigma_max(const NozzleSpec& spec, const BackgroundShock& bg,
                      const GasConstants& g, double xi_star_seed, double sigma_init = 0.05,
                      int bisections = 6, const TransonicOptions& opts = {});

}  // namespace transhock
