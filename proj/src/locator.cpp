#include "transhock/locator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "transhock/grid.hpp"

namespace transhock {

RFunction::RFunction(const NozzleSpec& spec, double kdot_value, int cache_cells)
    : theta_(spec.theta), length_(spec.length), kdot_(kdot_value) {
  const int n = std::max(16, cache_cells);
  cell_ = length_ / n;
  cum_.resize(n + 1);
  cum_[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = i * cell_, b = (i + 1) * cell_;
    cum_[i + 1] = cum_[i] + cell_ / 6.0 *
                                (theta_(a) + 4.0 * theta_(0.5 * (a + b)) + theta_(b));
  }
  total_ = cum_.back();
}

double RFunction::integral_theta_to(double xi) const {
  if (xi <= 0.0) return 0.0;
  if (xi >= length_) return total_;
  const int i = std::min(static_cast<int>(xi / cell_), static_cast<int>(cum_.size()) - 2);
  const double a = i * cell_;
  const double w = xi - a;
  if (w == 0.0) return cum_[i];
  return cum_[i] + w / 6.0 * (theta_(a) + 4.0 * theta_(a + 0.5 * w) + theta_(xi));
}

double RFunction::r(double xi) const { return total_ - kdot_ * integral_theta_to(xi); }

double pstar(const BackgroundShock& bg, const GasConstants&, const Profile1D& pressure,
             int quad_cells) {
  const DerivedState dp = bg.plus();
  const double rq = dp.rho * bg.u_plus.q;
  const double rq2 = dp.rho * bg.u_plus.q * bg.u_plus.q;
  const double prefactor = (1.0 - dp.mach * dp.mach) / (rq * rq2);
  const int n = std::max(16, quad_cells);
  const double h = 1.0 / n;
  double integral = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = i * h, b = (i + 1) * h;
    integral += h / 6.0 * (pressure(a) + 4.0 * pressure(0.5 * (a + b)) + pressure(b));
  }
  return prefactor * integral;
}

std::vector<RootInfo> LocationReport::admissible() const {
  std::vector<RootInfo> out;
  for (const RootInfo& r : roots)
    if (!r.degenerate && !r.boundary) out.push_back(r);
  return out;
}

LocationReport find_admissible_locations(const NozzleSpec& spec, const BackgroundShock& bg,
                                         const GasConstants& g, const LocatorOptions& opts) {
  LocationReport rep;
  rep.scan_cells = opts.scan_cells;
  rep.kdot = kdot(bg, g);
  rep.p_star = pstar(bg, g, spec.pressure);

  const RFunction R(spec, rep.kdot, std::max(opts.scan_cells, 4096));
  const double L = spec.length;
  const int n = std::max(16, opts.scan_cells);
  const double h = L / n;

  std::vector<double> f(n + 1);
  rep.r_lower = std::numeric_limits<double>::infinity();
  rep.r_upper = -std::numeric_limits<double>::infinity();
  double theta_scale = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double rv = R.r(i * h);
    f[i] = rv - rep.p_star;
    rep.r_lower = std::min(rep.r_lower, rv);
    rep.r_upper = std::max(rep.r_upper, rv);
    theta_scale = std::max(theta_scale, std::abs(spec.theta(i * h)));
  }

  const double range_scale = std::abs(rep.r_lower) + std::abs(rep.r_upper) + 1.0;
  rep.in_range = rep.p_star >= rep.r_lower && rep.p_star <= rep.r_upper;

  if (rep.r_upper - rep.r_lower <= 1e-14 * range_scale) {
    // Theta integrates to nothing anywhere: R is flat and every location is
    // equally (un)suitable.  Nothing usable to report.
    rep.status = std::abs(rep.p_star - rep.r_lower) <= 1e-12 * range_scale ? "flat-degenerate"
                                                                           : "out-of-range";
    return rep;
  }
  if (!rep.in_range) {
    rep.status = "out-of-range";
    return rep;
  }

  const double root_tol = opts.bisect_rel_tol * L;
  std::vector<RootInfo> roots;
  std::vector<char> cell_has_root(n, 0);

  auto refine = [&](double a, double b, double fa) {
    while (b - a > root_tol) {
      const double m = 0.5 * (a + b);
      const double fm = R.r(m) - rep.p_star;
      if (fm == 0.0) return m;
      if ((fa < 0.0) != (fm < 0.0)) {
        b = m;
      } else {
        a = m;
        fa = fm;
      }
    }
    return 0.5 * (a + b);
  };

  for (int i = 0; i < n; ++i) {
    const double fa = f[i], fb = f[i + 1];
    if (fa == 0.0) {
      if (i == 0 || f[i - 1] != 0.0) {
        RootInfo info;
        info.xi_star = i * h;
        roots.push_back(info);
        cell_has_root[i] = 1;
      }
      continue;
    }
    if ((fa < 0.0) != (fb < 0.0)) {
      RootInfo info;
      info.xi_star = refine(i * h, (i + 1) * h, fa);
      roots.push_back(info);
      cell_has_root[i] = 1;
    }
  }
  if (f[n] == 0.0 && (n == 0 || f[n - 1] != 0.0)) {
    RootInfo info;
    info.xi_star = L;
    roots.push_back(info);
  }

  // Tangential (even-multiplicity) contact: local minima of |f| that sit at
  // the rounding floor without a sign change.
  const double tangency_tol = 1e-10 * range_scale;
  for (int i = 1; i < n; ++i) {
    if (cell_has_root[i - 1] || cell_has_root[i]) continue;
    const double am = std::abs(f[i]);
    if (am <= tangency_tol && am <= std::abs(f[i - 1]) && am <= std::abs(f[i + 1])) {
      RootInfo info;
      info.xi_star = i * h;
      info.degenerate = true;
      roots.push_back(info);
    }
  }

  std::sort(roots.begin(), roots.end(),
            [](const RootInfo& a, const RootInfo& b) { return a.xi_star < b.xi_star; });
  // Deduplicate near-coincident detections.
  std::vector<RootInfo> unique;
  for (const RootInfo& r : roots) {
    if (!unique.empty() && std::abs(r.xi_star - unique.back().xi_star) < 16.0 * root_tol)
      continue;
    unique.push_back(r);
  }

  for (RootInfo& r : unique) {
    r.theta_at_root = spec.theta(r.xi_star);
    r.r_prime = -rep.kdot * r.theta_at_root;
    r.r_prime_sign = r.r_prime > 0.0 ? 1 : (r.r_prime < 0.0 ? -1 : 0);
    r.residual = R.r(r.xi_star) - rep.p_star;
    if (std::abs(r.theta_at_root) <= opts.theta_tol * (theta_scale + 1e-300))
      r.degenerate = true;
    if (r.xi_star <= opts.boundary_rel_tol * L || r.xi_star >= L * (1.0 - opts.boundary_rel_tol))
      r.boundary = true;
  }
  rep.roots = std::move(unique);

  const bool at_edge = std::abs(rep.p_star - rep.r_lower) <= 1e-12 * range_scale ||
                       std::abs(rep.p_star - rep.r_upper) <= 1e-12 * range_scale;
  rep.status = at_edge ? "boundary-of-range" : "ok";
  return rep;
}

}  // namespace transhock
