#include "transhock/linear_fbp.hpp"

#include <algorithm>
#include <cmath>

namespace transhock {

double supersonic_kappa(const BackgroundShock& bg) {
  const DerivedState dm = bg.minus();
  const double rq = dm.rho * bg.u_minus.q;
  return std::sqrt(bg.u_minus.q * (dm.mach * dm.mach - 1.0) / (rq * rq * bg.u_minus.q));
}

double subsonic_a2(const BackgroundShock& bg) {
  const DerivedState dp = bg.plus();
  const double rq = dp.rho * bg.u_plus.q;
  return (1.0 - dp.mach * dp.mach) / (rq * rq * bg.u_plus.q);
}

namespace {

double supersonic_a2(const BackgroundShock& bg) {
  const DerivedState dm = bg.minus();
  const double rq = dm.rho * bg.u_minus.q;
  return (1.0 - dm.mach * dm.mach) / (rq * rq * bg.u_minus.q);  // negative upstream
}

}  // namespace

RectGrid default_supersonic_grid(const NozzleSpec& spec, const BackgroundShock& bg,
                                 int eta_nodes, int min_xi_nodes) {
  const double kappa = supersonic_kappa(bg);
  const double h_eta = 1.0 / (eta_nodes - 1);
  // Stability: h_xi <= kappa * h_eta; keep a 0.85 margin.
  const int needed = static_cast<int>(std::ceil(spec.length / (0.85 * kappa * h_eta))) + 1;
  const int nx = std::max(min_xi_nodes, needed);
  return RectGrid(0.0, 0.0, spec.length, 1.0, nx, eta_nodes);
}

RectGrid default_subsonic_grid(double xi_star, const NozzleSpec& spec, int eta_nodes,
                               int xi_nodes) {
  const double lx = spec.length - xi_star;
  if (!(lx > 0.0)) throw GeometryError("default_subsonic_grid: xi_star is past the exit");
  int nx = xi_nodes;
  // Unit-aspect density 257x129: twice the eta density along xi.
  if (nx <= 0)
    nx = std::clamp(static_cast<int>(std::lround(2.0 * lx * (eta_nodes - 1))) + 1, 17, 1025);
  return RectGrid(xi_star, 0.0, lx, 1.0, nx, eta_nodes);
}

LinearSupersonic solve_linear_supersonic(const NozzleSpec& spec, const BackgroundShock& bg,
                                         const RectGrid& grid) {
  const DerivedState dm = bg.minus();
  const double a_m = supersonic_a2(bg);          // negative
  const double kappa2 = -a_m * bg.u_minus.q;     // wave-speed factor, positive
  const double kappa = std::sqrt(kappa2);
  const double hx = grid.hx(), he = grid.hy();
  if (hx > kappa * he * (1.0 + 1e-12))
    throw CflError("solve_linear_supersonic: step violates h_xi <= kappa*h_eta (h_xi = " +
                   std::to_string(hx) + ", bound = " + std::to_string(kappa * he) + ")");

  // phi_xx = (1/kappa^2) phi_ee is marched in xi; the wall data feed the top
  // Dirichlet row, the bottom row stays pinned at zero.
  ScalarField2D phi(grid);
  const int nx = grid.nx, ne = grid.ny;
  const double lam = (hx * hx) / (kappa2 * he * he);

  // Cumulative wall deflection sigma * int_0^xi Theta (per-cell Simpson).
  std::vector<double> wall(nx, 0.0);
  for (int i = 1; i < nx; ++i) {
    const double a = grid.x(i - 1), b = grid.x(i);
    wall[i] = wall[i - 1] + spec.sigma * (b - a) / 6.0 *
                                (spec.theta(a) + 4.0 * spec.theta(0.5 * (a + b)) + spec.theta(b));
  }

  // First step: phi(0,.) = 0 and phi_xi(0,.) = 0 give a zero interior row.
  for (int j = 0; j < ne; ++j) {
    phi.at(0, j) = 0.0;
    phi.at(1, j) = 0.0;
  }
  phi.at(1, ne - 1) = wall[1];
  for (int i = 2; i < nx; ++i) {
    for (int j = 1; j < ne - 1; ++j)
      phi.at(i, j) = 2.0 * phi.at(i - 1, j) - phi.at(i - 2, j) +
                     lam * (phi.at(i - 1, j + 1) - 2.0 * phi.at(i - 1, j) + phi.at(i - 1, j - 1));
    phi.at(i, 0) = 0.0;
    phi.at(i, ne - 1) = wall[i];
  }

  LinearSupersonic out;
  out.grid = grid;
  out.potential = phi;
  const ScalarField2D phi_x = diff_x(phi);
  const ScalarField2D phi_e = diff_y(phi);
  out.theta = phi_x;
  out.p = ScalarField2D(grid);
  out.q = ScalarField2D(grid);
  out.s = ScalarField2D(grid);
  const double rq = dm.rho * bg.u_minus.q;
  for (std::size_t k = 0; k < phi.data().size(); ++k) {
    const double pdot = phi_e.data()[k] / a_m;
    out.p.data()[k] = pdot;
    out.q.data()[k] = -pdot / rq;
  }
  return out;
}

LinearSupersonic solve_linear_supersonic_upwind(const NozzleSpec& spec,
                                                const BackgroundShock& bg,
                                                const RectGrid& grid, int order) {
  const DerivedState dm = bg.minus();
  const double rq = dm.rho * bg.u_minus.q;
  const double m = std::sqrt(dm.mach * dm.mach - 1.0);
  const double rq2 = dm.rho * bg.u_minus.q * bg.u_minus.q;
  // Frozen characteristic structure at the background: invariants
  // w+- = p/(2 rho q^2) +- theta/(2m) advected at d eta/d xi = +- rho q / m.
  const double mu = rq / m;
  const double hx = grid.hx(), he = grid.hy();
  const double c = mu * hx / he;
  if (c > 1.0 + 1e-12)
    throw CflError("solve_linear_supersonic_upwind: step violates the CFL bound");

  const int nx = grid.nx, ne = grid.ny;
  std::vector<double> p(ne, 0.0), th(ne, 0.0), pn(ne), thn(ne);
  LinearSupersonic out;
  out.grid = grid;
  out.p = ScalarField2D(grid);
  out.theta = ScalarField2D(grid);
  out.q = ScalarField2D(grid);
  out.s = ScalarField2D(grid);
  out.potential = ScalarField2D(grid);

  auto wplus = [&](int j) { return p[j] / (2.0 * rq2) + th[j] / (2.0 * m); };
  auto wminus = [&](int j) { return p[j] / (2.0 * rq2) - th[j] / (2.0 * m); };
  // Upwind-biased advection step toward +eta (uses j, j-1, j-2).
  auto advect_up = [&](auto w, int j) {
    if (order >= 2 && j >= 2)
      return w(j) - 0.5 * c * (3.0 * w(j) - 4.0 * w(j - 1) + w(j - 2)) +
             0.5 * c * c * (w(j) - 2.0 * w(j - 1) + w(j - 2));
    return w(j) - c * (w(j) - w(j - 1));
  };
  auto advect_down = [&](auto w, int j) {
    if (order >= 2 && j + 2 < ne)
      return w(j) - 0.5 * c * (3.0 * w(j) - 4.0 * w(j + 1) + w(j + 2)) +
             0.5 * c * c * (w(j) - 2.0 * w(j + 1) + w(j + 2));
    return w(j) - c * (w(j) - w(j + 1));
  };

  for (int i = 1; i < nx; ++i) {
    for (int j = 1; j < ne - 1; ++j) {
      const double wp = advect_up(wplus, j);
      const double wm = advect_down(wminus, j);
      pn[j] = (wp + wm) * rq2;
      thn[j] = (wp - wm) * m;
    }
    {  // bottom wall: theta = 0, outgoing invariant from above
      const double wm = advect_down(wminus, 0);
      thn[0] = 0.0;
      pn[0] = 2.0 * rq2 * wm;
    }
    {  // top wall: theta = sigma Theta, outgoing invariant from below
      const double wp = advect_up(wplus, ne - 1);
      thn[ne - 1] = spec.sigma * spec.theta(grid.x(i));
      pn[ne - 1] = 2.0 * rq2 * wp - rq2 * thn[ne - 1] / m;
    }
    p = pn;
    th = thn;
    for (int j = 0; j < ne; ++j) {
      out.p.at(i, j) = p[j];
      out.theta.at(i, j) = th[j];
      out.q.at(i, j) = -p[j] / rq;
    }
  }
  return out;
}

std::vector<double> integrate_shock_curve(double xi_star, const std::vector<double>& psi_prime,
                                          double h_eta) {
  const std::size_t n = psi_prime.size();
  std::vector<double> psi(n, xi_star);
  // psi(eta) = xi_star - int_eta^1 psi'
  for (std::size_t j = n - 1; j > 0; --j)
    psi[j - 1] = psi[j] - 0.5 * h_eta * (psi_prime[j] + psi_prime[j - 1]);
  return psi;
}

LinearSolution solve_linear_subsonic(double xi_star, const NozzleSpec& spec,
                                     const BackgroundShock& bg, const GasConstants& g,
                                     const LinearSupersonic& supersonic, const RectGrid& sub_grid,
                                     const LinearOptions& opts) {
  if (!(xi_star > 0.0) || !(xi_star < spec.length))
    throw GeometryError("solve_linear_subsonic: xi_star outside (0, L)");
  const DerivedState dp = bg.plus();
  const double a1 = bg.u_plus.q;
  const double a2 = subsonic_a2(bg);

  // Shock-trace data from the supersonic solution at xi_star, interpolated
  // onto this problem's eta nodes (the two grids need not share them).
  std::vector<double> pdot_minus(sub_grid.ny), thdot_minus(sub_grid.ny);
  for (int j = 0; j < sub_grid.ny; ++j) {
    pdot_minus[j] = bicubic_sample(supersonic.p, xi_star, sub_grid.y(j));
    thdot_minus[j] = bicubic_sample(supersonic.theta, xi_star, sub_grid.y(j));
  }

  EllipticProblem prob = EllipticProblem::zero(sub_grid, a1, a2);
  const int ne = sub_grid.ny;
  LinearSolution sol;
  sol.xi_star = xi_star;
  sol.grid = sub_grid;
  sol.g1s.resize(ne);
  sol.g2s.resize(ne);
  sol.g3s.resize(ne);
  for (int j = 0; j < ne; ++j) {
    const GSharp gs = gsharp_from_pdot(bg, g, pdot_minus[j]);
    sol.g1s[j] = gs.p_dot_plus;
    sol.g2s[j] = gs.q_dot_plus;
    sol.g3s[j] = gs.s_dot_plus;
    prob.g1[j] = gs.p_dot_plus;                          // pressure on the shock
    prob.g3[j] = spec.sigma * spec.pressure(sub_grid.y(j));  // receiver pressure at the exit
  }
  for (int i = 0; i < sub_grid.nx; ++i) {
    prob.g2[i] = 0.0;                                    // flat lower wall
    prob.g4[i] = spec.sigma * spec.theta(sub_grid.x(i)); // upper wall angle
  }

  sol.compat_residual = compatibility_residual(prob);
  EllipticOptions eopts;
  eopts.method = opts.method;
  const double h2 = sub_grid.hx() * sub_grid.hx() + sub_grid.hy() * sub_grid.hy();
  const double scale = default_compat_scale(prob) + 1e-18;
  eopts.compat_tol = opts.compat_tol >= 0.0
                         ? opts.compat_tol
                         : std::max(opts.compat_rel * scale, opts.compat_h2 * h2 * scale);

  FirstOrderEllipticSolver solver(sub_grid, a1, a2, opts.method);
  auto [p_dot, th_dot] = solver.solve(prob, eopts);
  sol.p = std::move(p_dot);
  sol.theta = std::move(th_dot);

  // Transport in xi: S is carried unchanged, q follows the conserved
  // combination q+ qdot + pdot/rho+ + T+ Sdot seeded on the shock.
  sol.q = ScalarField2D(sub_grid);
  sol.s = ScalarField2D(sub_grid);
  const double rq = dp.rho * bg.u_plus.q;
  for (int i = 0; i < sub_grid.nx; ++i)
    for (int j = 0; j < ne; ++j) {
      sol.s.at(i, j) = sol.g3s[j];
      sol.q.at(i, j) = sol.g2s[j] + (sol.g1s[j] - sol.p.at(i, j)) / rq;
    }

  // Slope of the shock perturbation from the transverse jump condition.
  sol.psi_dot_prime.resize(ne);
  const double jp = bg.jump_p();
  for (int j = 0; j < ne; ++j)
    sol.psi_dot_prime[j] =
        (bg.u_plus.q * sol.theta.at(0, j) - bg.u_minus.q * thdot_minus[j]) / jp;
  return sol;
}

double verify_solvability_identity(double xi_star, const NozzleSpec& spec,
                                   const BackgroundShock& bg, const GasConstants& g) {
  const double ps = pstar(bg, g, spec.pressure);
  const RFunction R(spec, kdot(bg, g));
  return ps - R.r(xi_star);
}

}  // namespace transhock
