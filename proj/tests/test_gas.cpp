#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "transhock/gas.hpp"

using namespace transhock;

TEST_CASE("density inverts the equation of state") {
  GasConstants g{1.4, 1.0, 0.0};
  CHECK(density(g.gamma - 1.0, g.s0, g) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(density(0.4, 0.0, g) == doctest::Approx(1.0).epsilon(1e-15));
  // p = 0.4 * 2^1.4 corresponds to rho = 2 at reference entropy.
  CHECK(density(0.4 * std::pow(2.0, 1.4), 0.0, g) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(density(-1.0, 0.0, g), DomainError);
  CHECK_THROWS_AS(density(0.0, 0.0, g), DomainError);

  GasConstants bad{0.9, 1.0, 0.0};
  CHECK_THROWS_AS(density(1.0, 0.0, bad), DomainError);
}

TEST_CASE("derived quantities at a unit reference state") {
  GasConstants g{1.4, 1.0, 0.0};
  FlowState u;
  u.p = 1.0;
  u.q = 0.0;
  u.s = entropy_from(1.0, 1.0, g);  // rho = 1
  const DerivedState d = derived(u, g);
  CHECK(d.rho == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.c * d.c == doctest::Approx(1.4).epsilon(1e-14));
  CHECK(d.mach == doctest::Approx(0.0));
  CHECK(d.bernoulli == doctest::Approx(3.5).epsilon(1e-14));
  CHECK(d.temperature == doctest::Approx(2.5).epsilon(1e-14));

  // q = c gives M = 1 whatever the state.
  FlowState sonic = u;
  sonic.q = d.c;
  CHECK(derived(sonic, g).mach == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("thermodynamic consistency T (gamma-1) c_v rho = p") {
  GasConstants g{1.3, 2.7, 0.45};
  for (double p : {0.3, 1.0, 4.2})
    for (double s : {-0.5, 0.45, 1.8}) {
      FlowState u{p, 0.1, 2.0, s};
      const DerivedState d = derived(u, g);
      CHECK(d.temperature * (g.gamma - 1.0) * g.c_v * d.rho ==
            doctest::Approx(p).epsilon(1e-13));
    }
}

TEST_CASE("normal shock matches the classical relations") {
  GasConstants g{1.4, 1.0, 0.0};
  FlowState um;
  um.p = 1.0;
  um.s = entropy_from(1.0, 1.0 / (g.gamma * 4.0), g);
  um.q = 2.0 * std::sqrt(g.gamma * um.p / (1.0 / (g.gamma * 4.0)));  // M = 2 by construction
  const FlowState up = normal_shock_downstream(um, g);
  CHECK(up.p / um.p == doctest::Approx(4.5).epsilon(1e-13));
  CHECK(derived(up, g).mach == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-13));

  // Zero-strength limit: downstream tends to upstream.
  FlowState near_sonic = um;
  const double m_eps = 1.0 + 1e-8;
  near_sonic.q = m_eps * std::sqrt(g.gamma * um.p / derived(um, g).rho);
  const FlowState up2 = normal_shock_downstream(near_sonic, g);
  CHECK(up2.p == doctest::Approx(near_sonic.p).epsilon(1e-6));
  CHECK(up2.q == doctest::Approx(near_sonic.q).epsilon(1e-6));

  FlowState subsonic = um;
  subsonic.q = 0.5 * std::sqrt(g.gamma * um.p / derived(um, g).rho);
  CHECK_THROWS_AS(normal_shock_downstream(subsonic, g), DomainError);
}

TEST_CASE("normal shock closes the jump residuals over a parameter sweep") {
  for (double gamma : {1.1, 1.4, 5.0 / 3.0, 2.2, 3.0})
    for (double mach : {1.05, 1.5, 2.0, 3.3, 5.0}) {
      GasConstants g{gamma, 1.0, 0.0};
      const BackgroundShock bg = make_background(1.0 / (gamma * mach * mach), mach, g);
      const Vec4 r = rh_residuals(bg.u_plus, bg.u_minus, 0.0, g);
      CHECK(std::abs(r[0]) <= 1e-12);
      CHECK(std::abs(r[1]) <= 1e-12);
      CHECK(std::abs(r[2]) <= 1e-12);
      CHECK(bg.u_plus.p > bg.u_minus.p);
      CHECK(bg.plus().mach < 1.0);
      // mass-flux normalization
      CHECK(bg.minus().rho * bg.u_minus.q == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(bg.plus().rho * bg.u_plus.q == doctest::Approx(1.0).epsilon(1e-12));
    }
}

namespace {

// Independent re-evaluation of the bracket expressions, assembled from
// scratch (jump-of-products form, no shared helpers with the library).
Vec4 brackets_oracle(const FlowState& up, const FlowState& um, double psi_prime,
                     const GasConstants& g) {
  auto rho = [&](const FlowState& u) {
    return std::pow(u.p / ((g.gamma - 1.0) * std::exp((u.s - g.s0) / g.c_v)), 1.0 / g.gamma);
  };
  auto uvel = [&](const FlowState& u) { return u.q * std::cos(u.theta); };
  auto vvel = [&](const FlowState& u) { return u.q * std::sin(u.theta); };
  auto enthalpy = [&](const FlowState& u) {
    return g.gamma * u.p / ((g.gamma - 1.0) * rho(u));
  };
  auto jump = [&](const std::function<double(const FlowState&)>& f) { return f(up) - f(um); };
  const double g1 =
      jump([&](const FlowState& u) { return 1.0 / (rho(u) * uvel(u)); }) * jump([](const FlowState& u) { return u.p; }) +
      jump([&](const FlowState& u) { return vvel(u) / uvel(u); }) * jump([&](const FlowState& u) { return vvel(u); });
  const double g2 =
      jump([&](const FlowState& u) { return uvel(u) + u.p / (rho(u) * uvel(u)); }) * jump([](const FlowState& u) { return u.p; }) +
      jump([&](const FlowState& u) { return u.p * vvel(u) / uvel(u); }) * jump([&](const FlowState& u) { return vvel(u); });
  const double g3 = jump([&](const FlowState& u) { return 0.5 * u.q * u.q + enthalpy(u); });
  const double g4 = jump([&](const FlowState& u) { return vvel(u); }) -
                    psi_prime * jump([](const FlowState& u) { return u.p; });
  return {g1, g2, g3, g4};
}

}  // namespace

TEST_CASE("jump residuals: trivial zeros and randomized oracle agreement") {
  GasConstants g{1.4, 1.0, 0.0};
  const BackgroundShock bg = tst::bg_m2();

  const Vec4 zero = rh_residuals(bg.u_plus, bg.u_plus, 0.37, g);
  for (double v : zero) CHECK(std::abs(v) <= 1e-15);

  const Vec4 bgres = rh_residuals(bg.u_plus, bg.u_minus, 0.0, g);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(bgres[k]) <= 1e-13);

  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> pert(-0.2, 0.2);
  for (int trial = 0; trial < 50; ++trial) {
    FlowState up = bg.u_plus, um = bg.u_minus;
    up.p *= 1.0 + pert(rng);
    up.theta = 0.3 * pert(rng);
    up.q *= 1.0 + pert(rng);
    up.s += 0.2 * pert(rng);
    um.p *= 1.0 + pert(rng);
    um.theta = 0.3 * pert(rng);
    um.q *= 1.0 + pert(rng);
    const double psip = pert(rng);
    const Vec4 lib = rh_residuals(up, um, psip, g);
    const Vec4 ref = brackets_oracle(up, um, psip, g);
    for (int k = 0; k < 4; ++k)
      CHECK(lib[k] == doctest::Approx(ref[k]).epsilon(1e-12));
  }

  FlowState vertical = bg.u_plus;
  vertical.theta = M_PI / 2.0;
  CHECK_THROWS_AS(rh_residuals(vertical, bg.u_minus, 0.0, g), DomainError);
}

namespace {

// Centered finite-difference gradient of G_j with respect to one side.
Vec4 fd_gradient(int j, bool plus_side, const BackgroundShock& bg, const GasConstants& g,
                 double h) {
  Vec4 grad{};
  for (int k = 0; k < 4; ++k) {
    FlowState hi = plus_side ? bg.u_plus : bg.u_minus;
    FlowState lo = hi;
    double* fields_hi[4] = {&hi.p, &hi.theta, &hi.q, &hi.s};
    double* fields_lo[4] = {&lo.p, &lo.theta, &lo.q, &lo.s};
    const double base = *fields_hi[k];
    const double dh = h * std::max(1.0, std::abs(base));
    *fields_hi[k] += dh;
    *fields_lo[k] -= dh;
    const Vec4 rh = plus_side ? rh_residuals(hi, bg.u_minus, 0.0, g)
                              : rh_residuals(bg.u_plus, hi, 0.0, g);
    const Vec4 rl = plus_side ? rh_residuals(lo, bg.u_minus, 0.0, g)
                              : rh_residuals(bg.u_plus, lo, 0.0, g);
    grad[k] = (rh[j] - rl[j]) / (2.0 * dh);
  }
  return grad;
}

double beta_fd_error(const BackgroundShock& bg, const GasConstants& g, double h) {
  const RhJacobians jac = rh_jacobians(bg, g);
  double err = 0.0;
  for (int j = 0; j < 4; ++j)
    for (int side = 0; side < 2; ++side) {
      const Vec4 fd = fd_gradient(j, side == 0, bg, g, h);
      const Vec4& cf = side == 0 ? jac.beta_plus[j] : jac.beta_minus[j];
      for (int k = 0; k < 4; ++k) err = std::max(err, std::abs(fd[k] - cf[k]));
    }
  return err;
}

}  // namespace

TEST_CASE("linearized jump coefficients: structure and finite-difference oracle") {
  GasConstants g{1.4, 1.0, 0.0};
  const BackgroundShock bg = tst::bg_m2();
  const RhJacobians jac = rh_jacobians(bg, g);

  CHECK(jac.beta_plus[3][0] == 0.0);
  CHECK(jac.beta_plus[3][1] == doctest::Approx(bg.u_plus.q));
  CHECK(jac.beta_plus[3][2] == 0.0);
  CHECK(jac.beta_plus[3][3] == 0.0);
  CHECK(jac.beta_minus[3][1] == doctest::Approx(-bg.u_minus.q));
  for (int j = 0; j < 3; ++j) {
    CHECK(jac.beta_plus[j][1] == 0.0);
    CHECK(jac.beta_minus[j][1] == 0.0);
  }

  CHECK(beta_fd_error(bg, g, 1e-5) <= 1e-6);

  const double e3 = beta_fd_error(bg, g, 1e-3);
  const double e4 = beta_fd_error(bg, g, 1e-4);
  const double e5 = beta_fd_error(bg, g, 1e-5);
  CHECK(std::log(e3 / e4) / std::log(10.0) >= 1.9);
  CHECK(e5 < e4);

  // Same agreement away from the reference gas.
  for (double gamma : {1.25, 5.0 / 3.0}) {
    GasConstants g2{gamma, 0.7, 0.2};
    const BackgroundShock b2 = make_background(0.4, 1.8, g2);
    CHECK(beta_fd_error(b2, g2, 1e-5) <= 1e-6);
  }
}

TEST_CASE("jump-condition matrix: determinant, closed forms, and 3x3 oracle") {
  GasConstants g{1.4, 1.0, 0.0};
  const BackgroundShock bg = tst::bg_m2();

  const double det_closed = bs_determinant(bg, g);
  const Mat3 bs = bs_matrix(bg, g);
  const double det_num =
      bs[0][0] * (bs[1][1] * bs[2][2] - bs[1][2] * bs[2][1]) -
      bs[0][1] * (bs[1][0] * bs[2][2] - bs[1][2] * bs[2][0]) +
      bs[0][2] * (bs[1][0] * bs[2][1] - bs[1][1] * bs[2][0]);
  CHECK(det_num == doctest::Approx(det_closed).epsilon(1e-12));
  CHECK(det_closed > 0.0);  // subsonic downstream: sign of 1 - M+^2

  // K > 0 across upstream Mach numbers.
  for (double mach : {1.1, 1.7, 2.5, 4.0, 5.0}) {
    const BackgroundShock b = make_background(1.0 / (g.gamma * mach * mach), mach, g);
    CHECK(kdot(b, g) > 0.0);
  }
  CHECK(kdot(bg, g) == doctest::Approx(17.0 / 9.0).epsilon(1e-13));

  // Zero upstream perturbation maps to zero.
  const GSharp z = gsharp_from_pdot(bg, g, 0.0);
  CHECK(z.p_dot_plus == 0.0);
  CHECK(z.q_dot_plus == 0.0);
  CHECK(z.s_dot_plus == 0.0);

  // Direct linear-solve oracle: B_s (p,q,S)^T = -(beta_j^- . U_minus_dot).
  const RhJacobians jac = rh_jacobians(bg, g);
  const double rq_m = bg.minus().rho * bg.u_minus.q;
  for (double pdot : {-0.3, 0.02, 1.0}) {
    const Vec4 du_minus = {pdot, 0.0, -pdot / rq_m, 0.0};
    Vec3 rhs;
    for (int j = 0; j < 3; ++j)
      rhs[j] = -(jac.beta_minus[j][0] * du_minus[0] + jac.beta_minus[j][2] * du_minus[2]);
    const Vec3 sol = solve3(bs, rhs);
    const GSharp gs = gsharp_from_pdot(bg, g, pdot);
    CHECK(sol[0] == doctest::Approx(gs.p_dot_plus).epsilon(1e-11));
    CHECK(sol[1] == doctest::Approx(gs.q_dot_plus).epsilon(1e-11));
    CHECK(sol[2] == doctest::Approx(gs.s_dot_plus).epsilon(1e-11));
  }

  // Same closed-form/linear-solve agreement on a different gas.
  {
    GasConstants g2{5.0 / 3.0, 0.6, -0.1};
    const BackgroundShock b2 = make_background(0.9, 3.0, g2);
    const Mat3 bs2 = bs_matrix(b2, g2);
    const RhJacobians jac2 = rh_jacobians(b2, g2);
    const double rq2 = b2.minus().rho * b2.u_minus.q;
    const Vec4 du = {0.7, 0.0, -0.7 / rq2, 0.0};
    Vec3 rhs2;
    for (int j = 0; j < 3; ++j)
      rhs2[j] = -(jac2.beta_minus[j][0] * du[0] + jac2.beta_minus[j][2] * du[2]);
    const Vec3 sol2 = solve3(bs2, rhs2);
    const GSharp gs2 = gsharp_from_pdot(b2, g2, 0.7);
    CHECK(sol2[0] == doctest::Approx(gs2.p_dot_plus).epsilon(1e-11));
    CHECK(sol2[1] == doctest::Approx(gs2.q_dot_plus).epsilon(1e-11));
    CHECK(sol2[2] == doctest::Approx(gs2.s_dot_plus).epsilon(1e-11));
  }

  // Sonic downstream state is rejected.
  BackgroundShock sonic = bg;
  sonic.u_plus.p = 1.0;
  sonic.u_plus.s = entropy_from(1.0, 1.0, g);
  sonic.u_plus.q = std::sqrt(g.gamma);  // M = 1 exactly
  CHECK_THROWS_AS(gsharp_from_pdot(sonic, g, 1.0), SingularMatrixError);

  // Zero-strength limit: K tends to zero with the pressure jump.
  const BackgroundShock weak = make_background(1.0 / (g.gamma * 1.0201), 1.01, g);
  CHECK(kdot(weak, g) < 0.2);
  CHECK(kdot(weak, g) > 0.0);
}
