#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "transhock/locator.hpp"

using namespace transhock;

TEST_CASE("pstar: trivial levels and sampled-profile agreement") {
  const GasConstants g = tst::air();
  const BackgroundShock bg = tst::bg_m2();

  CHECK(pstar(bg, g, Profile1D::constant(0.0)) == 0.0);
  // Unit integral exposes the prefactor; for this background it is 16/9.
  CHECK(pstar(bg, g, Profile1D::constant(1.0)) == doctest::Approx(16.0 / 9.0).epsilon(1e-13));

  const Profile1D smooth = Profile1D::expression("0.3*sin(2*pi*x) - 0.1", 0.0, 1.0, 1.0);
  std::vector<double> xs(513), vs(513);
  for (int i = 0; i < 513; ++i) {
    xs[i] = i / 512.0;
    vs[i] = smooth(xs[i]);
  }
  const Profile1D tabulated = Profile1D::sampled(xs, vs);
  CHECK(std::abs(pstar(bg, g, smooth) - pstar(bg, g, tabulated)) < 1e-10);
}

TEST_CASE("solvability function R") {
  const GasConstants g = tst::air();
  const BackgroundShock bg = tst::bg_m2();
  const double k = kdot(bg, g);
  const double L = 2.0;

  NozzleSpec unit = make_nozzle(L, 0.01, Profile1D::constant(1.0, 0.0, L),
                                Profile1D::constant(0.0));
  const RFunction R(unit, k);
  for (double xi : {0.0, 0.37, 1.0, 2.0})
    CHECK(R.r(xi) == doctest::Approx(L - k * xi).epsilon(1e-13));

  NozzleSpec wavy = tst::wavy_nozzle(2, 0.01, 0.0, L);
  const RFunction Rw(wavy, k);
  CHECK(Rw.r(0.0) == doctest::Approx(Rw.total_integral()));
  // R' = -k Theta, cross-checked against centered differences of R.
  const double h0 = 1e-3;
  for (double xi : {0.3, 0.9, 1.7}) {
    const double e1 = std::abs((Rw.r(xi + h0) - Rw.r(xi - h0)) / (2.0 * h0) - Rw.r_prime(xi));
    const double e2 =
        std::abs((Rw.r(xi + h0 / 2) - Rw.r(xi - h0 / 2)) / h0 - Rw.r_prime(xi));
    CHECK(e1 / e2 >= 3.5);
  }
}

TEST_CASE("single root of a uniformly sloped wall sits at the midpoint") {
  const GasConstants g = tst::air();
  const BackgroundShock bg = tst::bg_m2();
  const double k = kdot(bg, g);
  const double L = 1.0;
  const double a2 = 16.0 / 9.0;  // pstar prefactor of this background
  const double target = L - k * L / 2.0;

  NozzleSpec spec = make_nozzle(L, 0.01, Profile1D::constant(1.0, 0.0, L),
                                Profile1D::constant(target / a2));
  const LocationReport rep = find_admissible_locations(spec, bg, g);
  REQUIRE(rep.status == "ok");
  REQUIRE(rep.roots.size() == 1);
  CHECK(rep.roots[0].xi_star == doctest::Approx(L / 2.0).epsilon(1e-10));
  CHECK(rep.roots[0].r_prime_sign == -1);
  CHECK(!rep.roots[0].degenerate);
}

TEST_CASE("expanding nozzle: unique interior root with negative slope") {
  const GasConstants g = tst::air();
  const BackgroundShock bg = tst::bg_m2();
  NozzleSpec spec = tst::expanding_nozzle(0.01, 0.07);
  const LocationReport rep = find_admissible_locations(spec, bg, g);
  REQUIRE(rep.in_range);
  const auto adm = rep.admissible();
  REQUIRE(adm.size() == 1);
  CHECK(adm[0].r_prime < 0.0);
  CHECK(std::abs(adm[0].residual) <=
        1e-10 * (std::abs(rep.r_lower) + std::abs(rep.r_upper) + 1.0));
}

TEST_CASE("k-bump wavy wall produces 2k interior roots") {
  const GasConstants g = tst::air();
  const BackgroundShock bg = tst::bg_m2();
  for (int k = 1; k <= 3; ++k) {
    NozzleSpec spec = tst::wavy_nozzle(k, 0.01, 0.0);
    // Pick a level strictly inside the attainable band.
    LocationReport probe = find_admissible_locations(spec, bg, g);
    const double level = probe.r_lower + 0.37 * (probe.r_upper - probe.r_lower);
    spec.pressure = Profile1D::constant(level / (16.0 / 9.0));
    const LocationReport rep = find_admissible_locations(spec, bg, g);
    REQUIRE(rep.status == "ok");
    CHECK(rep.admissible().size() == static_cast<std::size_t>(2 * k));
    // Ascending order, alternating slopes between the flanks.
    const auto adm = rep.admissible();
    for (std::size_t i = 0; i + 1 < adm.size(); ++i) {
      CHECK(adm[i].xi_star < adm[i + 1].xi_star);
      CHECK(adm[i].r_prime_sign * adm[i + 1].r_prime_sign == -1);
    }
  }
}

TEST_CASE("root count is stable under scan refinement") {
  const GasConstants g = tst::air();
  const BackgroundShock bg = tst::bg_m2();
  NozzleSpec spec = tst::wavy_nozzle(3, 0.01, 0.0);
  LocationReport probe = find_admissible_locations(spec, bg, g);
  spec.pressure =
      Profile1D::constant((probe.r_lower + 0.61 * (probe.r_upper - probe.r_lower)) / (16.0 / 9.0));

  LocatorOptions coarse, fine;
  coarse.scan_cells = 4096;
  fine.scan_cells = 16384;
  const LocationReport a = find_admissible_locations(spec, bg, g, coarse);
  const LocationReport b = find_admissible_locations(spec, bg, g, fine);
  REQUIRE(a.roots.size() == b.roots.size());
  for (std::size_t i = 0; i < a.roots.size(); ++i)
    CHECK(a.roots[i].xi_star == doctest::Approx(b.roots[i].xi_star).epsilon(1e-9));
}

TEST_CASE("out-of-range level yields an explanatory status, not a throw") {
  const GasConstants g = tst::air();
  const BackgroundShock bg = tst::bg_m2();
  NozzleSpec spec = tst::expanding_nozzle(0.01, 5.0);  // far above the band
  const LocationReport rep = find_admissible_locations(spec, bg, g);
  CHECK(!rep.in_range);
  CHECK(rep.status == "out-of-range");
  CHECK(rep.roots.empty());
}

TEST_CASE("tangency at the band edge is reported as degenerate") {
  const GasConstants g = tst::air();
  const BackgroundShock bg = tst::bg_m2();
  // Wavy wall, level exactly at the upper edge R = 0: interior maxima touch
  // without crossing.
  NozzleSpec spec = tst::wavy_nozzle(2, 0.01, 0.0);
  const LocationReport rep = find_admissible_locations(spec, bg, g);
  CHECK(rep.status == "boundary-of-range");
  CHECK(rep.admissible().empty());
  bool found_interior_degenerate = false;
  for (const RootInfo& r : rep.roots)
    if (r.degenerate && !r.boundary && std::abs(r.xi_star - 0.5) < 1e-3)
      found_interior_degenerate = true;
  CHECK(found_interior_degenerate);
}

TEST_CASE("flat wall shape degenerates the whole problem") {
  const GasConstants g = tst::air();
  const BackgroundShock bg = tst::bg_m2();
  NozzleSpec flat = make_nozzle(1.0, 0.0, Profile1D::constant(0.0),
                                Profile1D::constant(0.0));
  const LocationReport rep = find_admissible_locations(flat, bg, g);
  CHECK(rep.status == "flat-degenerate");
  CHECK(rep.roots.empty());

  flat.pressure = Profile1D::constant(1.0);
  const LocationReport rep2 = find_admissible_locations(flat, bg, g);
  CHECK(rep2.status == "out-of-range");
}

TEST_CASE("randomized sign-definite walls give exactly one root") {
  const GasConstants g = tst::air();
  const BackgroundShock bg = tst::bg_m2();
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const double c0 = 0.5 + 0.5 * uni(rng);
    const double a1 = 0.3 * (2.0 * uni(rng) - 1.0);
    const double a2 = 0.15 * (2.0 * uni(rng) - 1.0);
    const double sign = trial % 2 == 0 ? 1.0 : -1.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.17g*(%.17g + %.17g*sin(pi*x/L) + %.17g*cos(2*pi*x/L))",
                  sign, c0, a1, a2);
    NozzleSpec spec =
        make_nozzle(1.0, 0.01, Profile1D::expression(buf, 0.0, 1.0, 1.0),
                    Profile1D::constant(0.0));
    const RFunction R(spec, kdot(bg, g));
    const double level = R.r(0.3 + 0.4 * uni(rng));
    spec.pressure = Profile1D::constant(level / (16.0 / 9.0));
    const LocationReport rep = find_admissible_locations(spec, bg, g);
    REQUIRE(rep.in_range);
    REQUIRE(rep.admissible().size() == 1);
    const RootInfo root = rep.admissible()[0];
    CHECK(root.r_prime_sign == (sign > 0 ? -1 : 1));
  }
}
