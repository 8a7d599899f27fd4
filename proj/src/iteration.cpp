#include "transhock/iteration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace transhock {

// ---------------------------------------------------------------------------
// Nonlinear supersonic march
// ---------------------------------------------------------------------------

SupersonicFlow solve_supersonic_nonlinear(const NozzleSpec& spec, const BackgroundShock& bg,
                                          const GasConstants& g, const RectGrid& grid,
                                          const SupersonicOptions& opts) {
  const double s_bar = bg.u_minus.s;
  const double bernoulli_bar = bg.minus().bernoulli;
  const double hx = grid.hx(), he = grid.hy();
  const int nx = grid.nx, ne = grid.ny;

  // Entropy and the Bernoulli quantity are carried unchanged along rows, so
  // the speed is a pointwise function of the pressure.
  auto speed_of = [&](double p) {
    const double rho = density(p, s_bar, g);
    const double i = g.gamma * p / ((g.gamma - 1.0) * rho);
    const double qq = 2.0 * (bernoulli_bar - i);
    if (!(qq > 0.0)) throw MarchError("supersonic march: Bernoulli budget exhausted");
    return std::sqrt(qq);
  };

  SupersonicFlow out;
  out.grid = grid;
  out.p = ScalarField2D(grid, bg.u_minus.p);
  out.theta = ScalarField2D(grid, 0.0);
  out.q = ScalarField2D(grid, bg.u_minus.q);
  out.s = ScalarField2D(grid, s_bar);
  out.min_mach = bg.minus().mach;

  struct Local {
    double rq2, m, mu_p, mu_m;  // rho q^2, sqrt(M^2-1), d eta/d xi of both families
  };
  auto local_of = [&](double p, double th) {
    const double rho = density(p, s_bar, g);
    const double q = speed_of(p);
    const double c = std::sqrt(g.gamma * p / rho);
    const double mach = q / c;
    if (!(mach > 1.0 + opts.mach_margin))
      throw MarchError("supersonic march: loss of supersonicity (M = " + std::to_string(mach) +
                       ")");
    Local l;
    l.m = std::sqrt(mach * mach - 1.0);
    l.rq2 = rho * q * q;
    const double rq = rho * q;
    const double lam_p = (-std::sin(th) + l.m * std::cos(th)) / rq;
    const double lam_m = (-std::sin(th) - l.m * std::cos(th)) / rq;
    if (!(lam_p > 0.0) || !(lam_m < 0.0))
      throw MarchError("supersonic march: characteristic families lost their orientation");
    l.mu_p = 1.0 / lam_p;
    l.mu_m = 1.0 / lam_m;
    return l;
  };

  std::vector<double> p(ne, bg.u_minus.p), th(ne, 0.0), pn(ne), thn(ne);
  double min_mach = bg.minus().mach;

  for (int i = 1; i < nx; ++i) {
    for (int j = 0; j < ne; ++j) {
      const Local l = local_of(p[j], th[j]);
      const double cfl = std::max(l.mu_p, -l.mu_m) * hx / he;
      if (cfl > 1.0 + 1e-12)
        throw CflError("supersonic march: local CFL " + std::to_string(cfl) + " exceeds 1");
      auto wp = [&](int jj) { return p[jj] / (2.0 * l.rq2) + th[jj] / (2.0 * l.m); };
      auto wm = [&](int jj) { return p[jj] / (2.0 * l.rq2) - th[jj] / (2.0 * l.m); };
      if (j == 0) {
        // wall closure: incoming invariant from above, theta pinned
        const double wmn = wm(0) - (hx / he) * l.mu_m * (wm(1) - wm(0));
        thn[0] = 0.0;
        pn[0] = 2.0 * l.rq2 * (wmn + thn[0] / (2.0 * l.m));
      } else if (j == ne - 1) {
        const double wpn = wp(j) - (hx / he) * l.mu_p * (wp(j) - wp(j - 1));
        thn[j] = spec.sigma * spec.theta(grid.x(i));
        pn[j] = 2.0 * l.rq2 * (wpn - thn[j] / (2.0 * l.m));
      } else {
        const double wpn = wp(j) - (hx / he) * l.mu_p * (wp(j) - wp(j - 1));
        const double wmn = wm(j) - (hx / he) * l.mu_m * (wm(j + 1) - wm(j));
        pn[j] = (wpn + wmn) * l.rq2;
        thn[j] = (wpn - wmn) * l.m;
      }
      if (!(pn[j] > 0.0)) throw MarchError("supersonic march: pressure lost positivity");
    }
    p = pn;
    th = thn;
    for (int j = 0; j < ne; ++j) {
      out.p.at(i, j) = p[j];
      out.theta.at(i, j) = th[j];
      const double q = speed_of(p[j]);
      out.q.at(i, j) = q;
      const double rho = density(p[j], s_bar, g);
      min_mach = std::min(min_mach, q / std::sqrt(g.gamma * p[j] / rho));
    }
  }
  out.min_mach = min_mach;
  return out;
}

// ---------------------------------------------------------------------------
// Proxy norms
// ---------------------------------------------------------------------------

double ProxyNorm::field(const ScalarField2D& f) const {
  const RectGrid& g = f.grid();
  double acc = 0.0;
  const double cellw = g.hx() * g.hy();
  for (int i = 0; i + 1 < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      acc += std::pow(std::abs(f.at(i + 1, j) - f.at(i, j)) / g.hx(), beta) * cellw;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j + 1 < g.ny; ++j)
      acc += std::pow(std::abs(f.at(i, j + 1) - f.at(i, j)) / g.hy(), beta) * cellw;
  return f.max_abs() + std::pow(acc, 1.0 / beta);
}

double ProxyNorm::trace(const std::vector<double>& v, double h) const {
  double sup = 0.0, acc = 0.0;
  for (double x : v) sup = std::max(sup, std::abs(x));
  for (std::size_t j = 0; j + 1 < v.size(); ++j)
    acc += std::pow(std::abs(v[j + 1] - v[j]) / h, beta) * h;
  return sup + std::pow(acc, 1.0 / beta);
}

double ProxyNorm::state(const IterationState& s) const {
  return field(s.dp) + field(s.dtheta) + field(s.dq) + field(s.ds) +
         trace(s.dpsi_prime, s.grid.hy());
}

double ProxyNorm::state_diff(const IterationState& a, const IterationState& b) const {
  IterationState d = a;
  for (std::size_t k = 0; k < d.dp.data().size(); ++k) {
    d.dp.data()[k] -= b.dp.data()[k];
    d.dtheta.data()[k] -= b.dtheta.data()[k];
    d.dq.data()[k] -= b.dq.data()[k];
    d.ds.data()[k] -= b.ds.data()[k];
  }
  for (std::size_t j = 0; j < d.dpsi_prime.size(); ++j) d.dpsi_prime[j] -= b.dpsi_prime[j];
  return state(d);
}

// ---------------------------------------------------------------------------
// TransonicIterator
// ---------------------------------------------------------------------------

TransonicIterator::TransonicIterator(const NozzleSpec& spec, const BackgroundShock& bg,
                                     const GasConstants& g, double xi_star_bar,
                                     const SupersonicFlow& supersonic, const RectGrid& sub_grid,
                                     const TransonicOptions& opts)
    : spec_(spec),
      bg_(bg),
      gas_(g),
      xi_star_bar_(xi_star_bar),
      supersonic_(&supersonic),
      sub_grid_(sub_grid),
      opts_(opts),
      elliptic_(sub_grid, bg.u_plus.q, subsonic_a2(bg), opts.method),
      bs_(bs_matrix(bg, g)),
      a2_(subsonic_a2(bg)) {
  // Absolute floor keeps the root-find meaningful when the data vanish and
  // only round-off noise remains.
  i_tol_ = (1e-12 * spec.sigma + 1e-14) * (1.0 + std::abs(kdot(bg, g))) * spec.length;
}

AssembledRhs TransonicIterator::assemble_rhs(const IterationState& state,
                                             double dxi_candidate) const {
  const RectGrid& gr = sub_grid_;
  const int nx = gr.nx, ne = gr.ny;
  const double L = spec_.length;
  const double he = gr.hy();
  const double p_bar = bg_.u_plus.p;
  const double q_bar = bg_.u_plus.q;
  const double s_bar = bg_.u_plus.s;
  const DerivedState dplus = bg_.plus();
  const double rho_bar = dplus.rho;
  const double t_bar = dplus.temperature;
  const double jp = bg_.jump_p();

  AssembledRhs rhs;
  rhs.psi = integrate_shock_curve(xi_star_bar_ + dxi_candidate, state.dpsi_prime, he);
  for (double ps : rhs.psi)
    if (!(ps > 0.0) || !(ps < L))
      throw GeometryError("assemble_rhs: shock curve left the duct interior");

  const ScalarField2D dp_x = diff_x(state.dp);
  const ScalarField2D dth_x = diff_x(state.dtheta);

  rhs.f1 = ScalarField2D(gr);
  rhs.f2 = ScalarField2D(gr);
  rhs.f3 = ScalarField2D(gr);
  for (int i = 0; i < nx; ++i) {
    const double xi = gr.x(i);
    for (int j = 0; j < ne; ++j) {
      const double psi_j = rhs.psi[j];
      const double dpsip_j = state.dpsi_prime[j];
      const double denom = L - psi_j;
      const double shift = psi_j - xi_star_bar_;  // = dxi - int_eta^1 dpsi'

      const double p = p_bar + state.dp.at(i, j);
      const double th = state.dtheta.at(i, j);
      const double q = q_bar + state.dq.at(i, j);
      const double s = s_bar + state.ds.at(i, j);
      const double rho = density(p, s, gas_);
      const double csq = gas_.gamma * p / rho;
      const double msq = q * q / csq;
      const double rq = rho * q;
      const double sinth = std::sin(th), costh = std::cos(th);
      const double a_loc = costh / rq * (1.0 - msq) / (rq * q);

      const double px = dp_x.at(i, j);
      const double tx = dth_x.at(i, j);

      rhs.f1.at(i, j) = (q_bar - q * costh) * tx + sinth / rq * px -
                        (L - xi) / denom * dpsip_j * px +
                        shift / denom * (sinth / rq * px - q * costh * tx);
      rhs.f2.at(i, j) = sinth / rq * tx + (a_loc - a2_) * px -
                        (L - xi) / denom * dpsip_j * tx +
                        shift / denom * (sinth / rq * tx + a_loc * px);
      const double enth = gas_.gamma * p / ((gas_.gamma - 1.0) * rho);
      rhs.f3.at(i, j) = (q_bar * state.dq.at(i, j) + state.dp.at(i, j) / rho_bar +
                         t_bar * state.ds.at(i, j)) -
                        (0.5 * q * q + enth);
    }
  }

  // Jump data along the shock edge of the fixed rectangle.
  const RhJacobians beta = rh_jacobians(bg_, gas_);
  rhs.g1.resize(ne);
  rhs.g2.resize(ne);
  rhs.g3.resize(ne);
  rhs.g4.resize(ne);
  rhs.g1s.resize(ne);
  rhs.g2s.resize(ne);
  rhs.g3s.resize(ne);
  for (int j = 0; j < ne; ++j) {
    const double eta = gr.y(j);
    FlowState up{p_bar + state.dp.at(0, j), state.dtheta.at(0, j), q_bar + state.dq.at(0, j),
                 s_bar + state.ds.at(0, j)};
    FlowState um{bicubic_sample(supersonic_->p, rhs.psi[j], eta),
                 bicubic_sample(supersonic_->theta, rhs.psi[j], eta),
                 bicubic_sample(supersonic_->q, rhs.psi[j], eta),
                 bicubic_sample(supersonic_->s, rhs.psi[j], eta)};
    const Vec4 G = rh_residuals(up, um, state.dpsi_prime[j], gas_);
    const Vec4 du = {state.dp.at(0, j), state.dtheta.at(0, j), state.dq.at(0, j),
                     state.ds.at(0, j)};
    auto dot = [](const Vec4& a, const Vec4& b) {
      return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
    };
    rhs.g1[j] = dot(beta.beta_plus[0], du) - G[0];
    rhs.g2[j] = dot(beta.beta_plus[1], du) - G[1];
    rhs.g3[j] = dot(beta.beta_plus[2], du) - G[2];
    rhs.g4[j] = (q_bar * state.dtheta.at(0, j) - jp * state.dpsi_prime[j]) - G[3];
    const Vec3 gs = solve3(bs_, {rhs.g1[j], rhs.g2[j], rhs.g3[j]});
    rhs.g1s[j] = gs[0];
    rhs.g2s[j] = gs[1];
    rhs.g3s[j] = gs[2];
  }

  // Exit pressure data evaluated at the physical exit height of the iterate.
  FlowColumn exit_col;
  exit_col.eta.resize(ne);
  exit_col.p.resize(ne);
  exit_col.theta.resize(ne);
  exit_col.q.resize(ne);
  exit_col.s.resize(ne);
  for (int j = 0; j < ne; ++j) {
    exit_col.eta[j] = gr.y(j);
    exit_col.p[j] = p_bar + state.dp.at(nx - 1, j);
    exit_col.theta[j] = state.dtheta.at(nx - 1, j);
    exit_col.q[j] = q_bar + state.dq.at(nx - 1, j);
    exit_col.s[j] = s_bar + state.ds.at(nx - 1, j);
  }
  const std::vector<double> y_exit = physical_y(exit_col, gas_);
  rhs.dP3.resize(ne);
  for (int j = 0; j < ne; ++j) rhs.dP3[j] = spec_.sigma * spec_.pressure(y_exit[j]);

  // Top wall data pulled back through the domain-fixing map.
  const double xi_star = xi_star_bar_ + dxi_candidate;
  rhs.dTheta4.resize(nx);
  for (int i = 0; i < nx; ++i) {
    const double arg = ((L - xi_star) * gr.x(i) + dxi_candidate * L) / (L - xi_star_bar_);
    rhs.dTheta4[i] = spec_.sigma * spec_.theta(arg);
  }

  EllipticProblem prob = EllipticProblem::zero(gr, bg_.u_plus.q, a2_);
  prob.f1 = rhs.f1;
  prob.f2 = rhs.f2;
  prob.g1 = rhs.g1s;
  prob.g3 = rhs.dP3;
  prob.g4 = rhs.dTheta4;
  rhs.compat_residual = compatibility_residual(prob);
  return rhs;
}

double TransonicIterator::solve_delta_xi(const IterationState& state) const {
  auto F = [&](double dxi) { return -assemble_rhs(state, dxi).compat_residual; };

  const double f0 = F(0.0);
  if (std::abs(f0) <= i_tol_) return 0.0;

  // The discrete root carries an O(h) offset from the marching scheme on top
  // of the O(sigma) physical part, so the bracket may need to grow.
  double w = opts_.delta_xi_bracket * std::max(spec_.sigma, 1e-12) * spec_.length;
  double a = -w, b = w;
  double fa = F(a), fb = F(b);
  int expansions = 0;
  while ((fa < 0.0) == (fb < 0.0) && expansions < 5) {
    w *= 2.0;
    a = -w;
    b = w;
    fa = F(a);
    fb = F(b);
    ++expansions;
  }
  if ((fa < 0.0) == (fb < 0.0)) {
    std::ostringstream os;
    os << "solve_delta_xi: no sign change in the bracket; samples F(" << a << ") = " << fa
       << ", F(0) = " << f0 << ", F(" << b << ") = " << fb;
    throw SolvabilityError(os.str(), f0);
  }
  // Tighten with the zero sample.
  if ((fa < 0.0) != (f0 < 0.0)) {
    b = 0.0;
    fb = f0;
  } else {
    a = 0.0;
    fa = f0;
  }

  double x = 0.5 * (a + b), fx = 0.0;
  for (int it = 0; it < 100; ++it) {
    // Secant proposal from the bracket ends, safeguarded by bisection.
    double cand = b - fb * (b - a) / (fb - fa);
    if (!(cand > a) || !(cand < b)) cand = 0.5 * (a + b);
    x = cand;
    fx = F(x);
    if (std::abs(fx) <= i_tol_ || (b - a) < 1e-15 * spec_.length) return x;
    if ((fa < 0.0) != (fx < 0.0)) {
      b = x;
      fb = fx;
    } else {
      a = x;
      fa = fx;
    }
  }
  return x;
}

IterationState TransonicIterator::apply_map(const IterationState& state) const {
  const double dxi = solve_delta_xi(state);
  const AssembledRhs rhs = assemble_rhs(state, dxi);
  const RectGrid& gr = sub_grid_;
  const int nx = gr.nx, ne = gr.ny;

  EllipticProblem prob = EllipticProblem::zero(gr, bg_.u_plus.q, a2_);
  prob.f1 = rhs.f1;
  prob.f2 = rhs.f2;
  prob.g1 = rhs.g1s;
  prob.g3 = rhs.dP3;
  prob.g4 = rhs.dTheta4;

  EllipticOptions eopts;
  eopts.method = opts_.method;
  eopts.compat_tol =
      std::max(100.0 * i_tol_, opts_.compat_rel * (default_compat_scale(prob) + 1e-18));
  auto [dp_new, dth_new] = elliptic_.solve(prob, eopts);

  IterationState out;
  out.grid = gr;
  out.dp = std::move(dp_new);
  out.dtheta = std::move(dth_new);
  out.dq = ScalarField2D(gr);
  out.ds = ScalarField2D(gr);
  const double rho_bar = bg_.plus().rho;
  const double q_bar = bg_.u_plus.q;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ne; ++j) {
      out.ds.at(i, j) = rhs.g3s[j];
      out.dq.at(i, j) = rhs.g2s[j] + ((rhs.g1s[j] - out.dp.at(i, j)) / rho_bar +
                                      (rhs.f3.at(i, j) - rhs.f3.at(0, j))) /
                                         q_bar;
    }
  out.dpsi_prime.resize(ne);
  const double jp = bg_.jump_p();
  for (int j = 0; j < ne; ++j)
    out.dpsi_prime[j] = (q_bar * out.dtheta.at(0, j) - rhs.g4[j]) / jp;
  out.dxi_star = dxi;
  out.index = state.index + 1;
  return out;
}

// ---------------------------------------------------------------------------
// Outer driver
// ---------------------------------------------------------------------------

namespace {

IterationState seed_from_linear(const LinearSolution& lin) {
  IterationState s;
  s.grid = lin.grid;
  s.dp = lin.p;
  s.dtheta = lin.theta;
  s.dq = lin.q;
  s.ds = lin.s;
  s.dpsi_prime = lin.psi_dot_prime;
  s.dxi_star = 0.0;
  s.index = 0;
  return s;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

FlowState ShockSolution::state_at_fixed(int i, int j) const {
  return FlowState{p.at(i, j), theta.at(i, j), q.at(i, j), s.at(i, j)};
}

ShockSolution solve_transonic(const NozzleSpec& spec, const BackgroundShock& bg,
                              const GasConstants& g, double xi_star_seed,
                              const TransonicOptions& opts) {
  if (!(xi_star_seed > 0.0) || !(xi_star_seed < spec.length))
    throw GeometryError("solve_transonic: seed location outside (0, L)");

  const RectGrid sup_grid = default_supersonic_grid(
      spec, bg, opts.eta_nodes, opts.supersonic_xi_nodes > 0 ? opts.supersonic_xi_nodes : 257);
  const RectGrid sub_grid =
      default_subsonic_grid(xi_star_seed, spec, opts.eta_nodes, opts.subsonic_xi_nodes);

  ShockSolution sol;
  sol.xi_star_bar = xi_star_seed;
  sol.grid = sub_grid;
  sol.supersonic = solve_supersonic_nonlinear(spec, bg, g, sup_grid);

  // Seed from the linearized problem solved with the same upwind scheme as
  // the nonlinear march: the seed then differs from the fixed point by a
  // genuinely quadratic amount, grid-scale roughness included.
  const LinearSupersonic lin_sup = solve_linear_supersonic_upwind(spec, bg, sup_grid, 1);
  LinearOptions lopts;
  lopts.method = opts.method;
  sol.seed = solve_linear_subsonic(xi_star_seed, spec, bg, g, lin_sup, sub_grid, lopts);

  TransonicIterator iter(spec, bg, g, xi_star_seed, sol.supersonic, sub_grid, opts);
  ProxyNorm norm{opts.beta};
  IterationState seed = seed_from_linear(sol.seed);
  IterationState state = seed;

  const double ball_radius = opts.ball_factor * std::pow(spec.sigma, 1.5);
  std::vector<double> ratios;
  double prev_step = -1.0;
  int diverging = 0;
  bool converged = spec.sigma == 0.0;  // the zero-perturbation problem is exact already

  if (!converged) {
    for (int k = 1; k <= opts.max_iters; ++k) {
      IterationState next = iter.apply_map(state);
      const double step = norm.state_diff(next, state);
      const double dist = norm.state_diff(next, seed);
      IterationLogEntry e;
      e.k = k;
      e.step = step;
      e.dxi_star = next.dxi_star;
      e.seed_distance = dist;
      if (prev_step > 0.0) {
        e.ratio = step / prev_step;
        ratios.push_back(e.ratio);
        diverging = e.ratio > 1.0 ? diverging + 1 : 0;
      }
      sol.log.push_back(e);
      state = std::move(next);
      sol.iterations = k;

      if (dist > ball_radius) {
        sol.ball_violated = true;
        if (opts.enforce_ball) {
          std::ostringstream os;
          os << "solve_transonic: iterate left the trust ball (distance " << dist
             << " > radius " << ball_radius << " at step " << k << ")";
          throw ContractionError(os.str());
        }
      }
      if (diverging >= 3) {
        std::ostringstream os;
        os << "solve_transonic: step ratio above 1 for three consecutive iterations (last step "
           << step << ")";
        throw ContractionError(os.str());
      }
      if (step < opts.iter_tol) {
        converged = true;
        break;
      }
      prev_step = step;
    }
    if (!converged)
      throw ContractionError("solve_transonic: no convergence within " +
                             std::to_string(opts.max_iters) + " iterations");
  }

  // Assemble the solution fields.
  sol.dxi_star = state.dxi_star;
  sol.p = ScalarField2D(sub_grid);
  sol.theta = state.dtheta;
  sol.q = ScalarField2D(sub_grid);
  sol.s = ScalarField2D(sub_grid);
  double sup_dev = 0.0;
  for (int i = 0; i < sub_grid.nx; ++i)
    for (int j = 0; j < sub_grid.ny; ++j) {
      sol.p.at(i, j) = bg.u_plus.p + state.dp.at(i, j);
      sol.q.at(i, j) = bg.u_plus.q + state.dq.at(i, j);
      sol.s.at(i, j) = bg.u_plus.s + state.ds.at(i, j);
      sup_dev = std::max({sup_dev, std::abs(state.dp.at(i, j)), std::abs(state.dtheta.at(i, j)),
                          std::abs(state.dq.at(i, j)), std::abs(state.ds.at(i, j))});
    }
  sol.sup_deviation = sup_dev;
  sol.psi_prime = state.dpsi_prime;
  sol.psi = integrate_shock_curve(xi_star_seed + state.dxi_star, state.dpsi_prime,
                                  sub_grid.hy());
  sol.median_ratio = median(ratios);
  sol.seed_distance = norm.state_diff(state, seed);

  // Final admissibility checks: jump conditions, exit pressure, entropy.
  ShockResiduals res;
  res.min_pressure_jump = std::numeric_limits<double>::infinity();
  for (int j = 0; j < sub_grid.ny; ++j) {
    const double eta = sub_grid.y(j);
    const FlowState up = sol.state_at_fixed(0, j);
    const FlowState um{bicubic_sample(sol.supersonic.p, sol.psi[j], eta),
                       bicubic_sample(sol.supersonic.theta, sol.psi[j], eta),
                       bicubic_sample(sol.supersonic.q, sol.psi[j], eta),
                       bicubic_sample(sol.supersonic.s, sol.psi[j], eta)};
    const Vec4 G = rh_residuals(up, um, sol.psi_prime[j], g);
    for (int k = 0; k < 4; ++k) res.max_g[k] = std::max(res.max_g[k], std::abs(G[k]));
    res.min_pressure_jump = std::min(res.min_pressure_jump, up.p - um.p);
  }
  {
    FlowColumn col;
    const int ix = sub_grid.nx - 1;
    col.eta.resize(sub_grid.ny);
    col.p.resize(sub_grid.ny);
    col.theta.resize(sub_grid.ny);
    col.q.resize(sub_grid.ny);
    col.s.resize(sub_grid.ny);
    for (int j = 0; j < sub_grid.ny; ++j) {
      col.eta[j] = sub_grid.y(j);
      col.p[j] = sol.p.at(ix, j);
      col.theta[j] = sol.theta.at(ix, j);
      col.q[j] = sol.q.at(ix, j);
      col.s[j] = sol.s.at(ix, j);
    }
    const std::vector<double> y = physical_y(col, g);
    for (int j = 0; j < sub_grid.ny; ++j) {
      const double target = bg.u_plus.p + spec.sigma * spec.pressure(y[j]);
      res.exit_pressure = std::max(res.exit_pressure, std::abs(col.p[j] - target));
    }
  }
  sol.residuals = res;
  sol.converged = converged;
  return sol;
}

double find_sigma_max(const NozzleSpec& spec, const BackgroundShock& bg,
                      const GasConstants& g, double xi_star_seed, double sigma_init,
                      int bisections, const TransonicOptions& opts) {
  auto converges = [&](double sigma) {
    NozzleSpec probe = spec;
    probe.sigma = sigma;
    try {
      return solve_transonic(probe, bg, g, xi_star_seed, opts).converged;
    } catch (const std::exception&) {
      return false;
    }
  };

  double lo = 0.0, hi = sigma_init;
  // Grow until a failure brackets the edge, then bisect.
  if (converges(hi)) {
    for (int k = 0; k < 3; ++k) {
      const double next = 2.0 * hi;
      if (!converges(next)) {
        lo = hi;
        hi = next;
        break;
      }
      hi = next;
      if (k == 2) return hi;  // converges everywhere probed
    }
    if (lo == 0.0) return hi;
  }
  for (int k = 0; k < bisections; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (converges(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace transhock
