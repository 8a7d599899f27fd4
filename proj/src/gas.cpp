#include "transhock/gas.hpp"

#include <cmath>

namespace transhock {

double density(double p, double s, const GasConstants& g) {
  g.validate();
  if (!(p > 0.0)) throw DomainError("density: pressure must be positive");
  const double a = (g.gamma - 1.0) * std::exp((s - g.s0) / g.c_v);
  return std::pow(p / a, 1.0 / g.gamma);
}

double entropy_from(double p, double rho, const GasConstants& g) {
  g.validate();
  if (!(p > 0.0) || !(rho > 0.0)) throw DomainError("entropy_from: need p, rho > 0");
  return g.s0 + g.c_v * std::log(p / ((g.gamma - 1.0) * std::pow(rho, g.gamma)));
}

DerivedState derived(const FlowState& u, const GasConstants& g) {
  if (!(u.p > 0.0)) throw DomainError("derived: pressure must be positive");
  if (!(u.q >= 0.0)) throw DomainError("derived: speed must be non-negative");
  DerivedState d;
  d.rho = density(u.p, u.s, g);
  d.c = std::sqrt(g.gamma * u.p / d.rho);
  d.mach = u.q / d.c;
  d.temperature = u.p / ((g.gamma - 1.0) * g.c_v * d.rho);
  d.enthalpy = g.gamma * u.p / ((g.gamma - 1.0) * d.rho);
  d.bernoulli = 0.5 * u.q * u.q + d.enthalpy;
  return d;
}

FlowState normal_shock_downstream(const FlowState& u_minus, const GasConstants& g) {
  const DerivedState dm = derived(u_minus, g);
  const double ga = g.gamma;
  const double m1sq = dm.mach * dm.mach;
  if (!(dm.mach > 1.0))
    throw DomainError("normal_shock_downstream: upstream state is not supersonic");

  const double p_ratio = 1.0 + 2.0 * ga * (m1sq - 1.0) / (ga + 1.0);
  const double rho_ratio = (ga + 1.0) * m1sq / ((ga - 1.0) * m1sq + 2.0);

  FlowState up;
  up.p = u_minus.p * p_ratio;
  up.theta = 0.0;
  const double rho_plus = dm.rho * rho_ratio;
  up.q = dm.rho * u_minus.q / rho_plus;  // mass flux continuity
  up.s = entropy_from(up.p, rho_plus, g);

  // One Newton step on (G1, G2, G3) in (p, q, S); the closed form already
  // solves the system, this just removes trailing round-off drift.
  const Vec4 r = rh_residuals(up, u_minus, 0.0, g);
  const double h = 1e-7;
  Mat3 jac{};
  Vec3 rhs = {-r[0], -r[1], -r[2]};
  const double base[3] = {up.p, up.q, up.s};
  for (int k = 0; k < 3; ++k) {
    FlowState hi = up, lo = up;
    const double dh = h * std::max(1.0, std::abs(base[k]));
    (k == 0 ? hi.p : k == 1 ? hi.q : hi.s) += dh;
    (k == 0 ? lo.p : k == 1 ? lo.q : lo.s) -= dh;
    const Vec4 rh = rh_residuals(hi, u_minus, 0.0, g);
    const Vec4 rl = rh_residuals(lo, u_minus, 0.0, g);
    for (int j = 0; j < 3; ++j) jac[j][k] = (rh[j] - rl[j]) / (2.0 * dh);
  }
  Vec3 step;
  try {
    step = solve3(jac, rhs);
  } catch (const SingularMatrixError&) {
    step = {0.0, 0.0, 0.0};  // sonic limit: zero-strength shock, nothing to polish
  }
  // Guard the polish: accept only a tiny correction.
  const double rel = std::abs(step[0]) / up.p + std::abs(step[1]) / up.q;
  if (rel < 1e-8) {
    up.p += step[0];
    up.q += step[1];
    up.s += step[2];
  }
  return up;
}

BackgroundShock make_background(double p_minus, double mach_minus, const GasConstants& g) {
  g.validate();
  if (!(p_minus > 0.0)) throw DomainError("make_background: p_minus must be positive");
  if (!(mach_minus > 1.0)) throw DomainError("make_background: upstream Mach must exceed 1");
  // Pick the upstream density so that rho q = 1: rho = 1/(gamma p M^2).
  const double rho_minus = 1.0 / (g.gamma * p_minus * mach_minus * mach_minus);
  FlowState um;
  um.p = p_minus;
  um.theta = 0.0;
  um.q = 1.0 / rho_minus;
  um.s = entropy_from(p_minus, rho_minus, g);

  BackgroundShock bg;
  bg.u_minus = um;
  bg.u_plus = normal_shock_downstream(um, g);
  bg.gas = g;
  return bg;
}

Vec4 rh_residuals(const FlowState& up, const FlowState& um, double psi_prime,
                  const GasConstants& g) {
  const DerivedState dp = derived(up, g);
  const DerivedState dm = derived(um, g);
  const double u_p = up.q * std::cos(up.theta);
  const double v_p = up.q * std::sin(up.theta);
  const double u_m = um.q * std::cos(um.theta);
  const double v_m = um.q * std::sin(um.theta);
  if (std::abs(u_p) <= 1e-12 * up.q || std::abs(u_m) <= 1e-12 * um.q)
    throw DomainError("rh_residuals: axial velocity vanishes on one side");

  const double jp = up.p - um.p;
  const double jv = v_p - v_m;
  const double j_inv_rhou = 1.0 / (dp.rho * u_p) - 1.0 / (dm.rho * u_m);
  const double j_vu = v_p / u_p - v_m / u_m;
  const double j_mom = (u_p + up.p / (dp.rho * u_p)) - (u_m + um.p / (dm.rho * u_m));
  const double j_pvu = up.p * v_p / u_p - um.p * v_m / u_m;
  const double j_bern = dp.bernoulli - dm.bernoulli;

  return {j_inv_rhou * jp + j_vu * jv,
          j_mom * jp + j_pvu * jv,
          j_bern,
          jv - psi_prime * jp};
}

RhJacobians rh_jacobians(const BackgroundShock& bg, const GasConstants& g) {
  const DerivedState dp = bg.plus();
  const DerivedState dm = bg.minus();
  const double jp = bg.jump_p();
  RhJacobians out;

  auto fill_side = [&](const FlowState& u, const DerivedState& d, double sign,
                       std::array<Vec4, 4>& dst) {
    const double rq = d.rho * u.q;
    const double c2 = d.c * d.c;
    dst[0] = {sign * jp / rq * (-1.0 / (d.rho * c2)), 0.0,
              sign * jp / rq * (-1.0 / u.q),
              sign * jp / rq * (1.0 / (g.gamma * g.c_v))};
    dst[1] = {sign * jp / rq * (1.0 - u.p / (d.rho * c2)), 0.0,
              sign * jp / rq * (rq - u.p / u.q),
              sign * jp / rq * (u.p / (g.gamma * g.c_v))};
    dst[2] = {sign / d.rho, 0.0, sign * u.q,
              sign * u.p / (d.rho * (g.gamma - 1.0) * g.c_v)};
    dst[3] = {0.0, sign * u.q, 0.0, 0.0};
  };
  fill_side(bg.u_plus, dp, +1.0, out.beta_plus);
  fill_side(bg.u_minus, dm, -1.0, out.beta_minus);
  return out;
}

double kdot(const BackgroundShock& bg, const GasConstants& g) {
  const DerivedState dp = bg.plus();
  const double rq2 = dp.rho * bg.u_plus.q * bg.u_plus.q;
  return bg.jump_p() * ((g.gamma - 1.0) / (g.gamma * bg.u_plus.p) + 1.0 / rq2);
}

Mat3 bs_matrix(const BackgroundShock& bg, const GasConstants& g) {
  const DerivedState dp = bg.plus();
  const double rq = dp.rho * bg.u_plus.q;
  const double q = bg.u_plus.q;
  const double p = bg.u_plus.p;
  const double c2 = dp.c * dp.c;
  const double jp = bg.jump_p();
  const double f = jp / rq;
  return {{{-f / (dp.rho * c2), -f / q, f / (g.gamma * g.c_v)},
           {f * (1.0 - p / (dp.rho * c2)), f * (rq - p / q), f * p / (g.gamma * g.c_v)},
           {q / rq, dp.rho * q * q / rq, p * q / (rq * (g.gamma - 1.0) * g.c_v)}}};
}

double bs_determinant(const BackgroundShock& bg, const GasConstants& g) {
  const DerivedState dp = bg.plus();
  const double rq = dp.rho * bg.u_plus.q;
  const double jp = bg.jump_p();
  const double msq = dp.mach * dp.mach;
  return jp * jp * bg.u_plus.p * (1.0 - msq) / ((g.gamma - 1.0) * g.c_v * rq * rq * rq);
}

GSharp gsharp_from_pdot(const BackgroundShock& bg, const GasConstants& g, double p_dot_minus) {
  const DerivedState dp = bg.plus();
  const DerivedState dm = bg.minus();
  if (std::abs(dp.mach - 1.0) < 1e-14)
    throw SingularMatrixError("gsharp_from_pdot: downstream state is sonic");
  const double jp = bg.jump_p();
  const double k = kdot(bg, g);
  const double rq2_p = dp.rho * bg.u_plus.q * bg.u_plus.q;
  const double rq2_m = dm.rho * bg.u_minus.q * bg.u_minus.q;
  const double upstream = (dm.mach * dm.mach - 1.0) / rq2_m * p_dot_minus;

  GSharp out;
  out.p_dot_plus = rq2_p / (dp.mach * dp.mach - 1.0) * upstream * (1.0 - k);
  out.q_dot_plus = upstream * (jp - rq2_p / (dp.mach * dp.mach - 1.0) * (1.0 - k));
  out.s_dot_plus = -(g.gamma - 1.0) * g.c_v / bg.u_plus.p * upstream * jp;
  return out;
}

Vec3 solve3(const Mat3& a, const Vec3& b) {
  double m[3][4];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] = a[i][j];
    m[i][3] = b[i];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-300) throw SingularMatrixError("solve3: singular matrix");
    if (piv != col)
      for (int j = col; j < 4; ++j) std::swap(m[piv][j], m[col][j]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int j = col; j < 4; ++j) m[r][j] -= f * m[col][j];
    }
  }
  return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

}  // namespace transhock
