#include "transhock/elliptic.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>

namespace transhock {

EllipticProblem EllipticProblem::zero(const RectGrid& g, double a1, double a2) {
  EllipticProblem p;
  p.grid = g;
  p.a1 = a1;
  p.a2 = a2;
  p.f1 = ScalarField2D(g);
  p.f2 = ScalarField2D(g);
  p.g1.assign(g.ny, 0.0);
  p.g3.assign(g.ny, 0.0);
  p.g2.assign(g.nx, 0.0);
  p.g4.assign(g.nx, 0.0);
  return p;
}

double compatibility_residual(const EllipticProblem& prob) {
  const RectGrid& g = prob.grid;
  std::vector<double> horiz(g.nx), vert(g.ny);
  for (int i = 0; i < g.nx; ++i) horiz[i] = prob.g4[i] - prob.g2[i];
  for (int j = 0; j < g.ny; ++j) vert[j] = prob.g1[j] - prob.g3[j];
  return trapezoid2d(prob.f2) - trapezoid(horiz, g.hx()) - prob.a2 * trapezoid(vert, g.hy());
}

double default_compat_scale(const EllipticProblem& prob) {
  const RectGrid& g = prob.grid;
  auto vmax = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  return (prob.f1.max_abs() + prob.f2.max_abs()) * g.lx * g.ly +
         (vmax(prob.g2) + vmax(prob.g4)) * g.lx +
         std::abs(prob.a2) * (vmax(prob.g1) + vmax(prob.g3)) * g.ly;
}

// ---------------------------------------------------------------------------
// Poisson operator: five-point stencil, cached sparse factorization.
// ---------------------------------------------------------------------------

namespace {

using SpMat = Eigen::SparseMatrix<double>;

struct PoissonOp {
  RectGrid g;
  PoissonKind kind;
  SolveMethod method;
  SpMat A;
  std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt;

  PoissonOp(const RectGrid& grid, PoissonKind k, SolveMethod m) : g(grid), kind(k), method(m) {
    if (kind == PoissonKind::Dirichlet)
      build_dirichlet();
    else
      build_neumann();
    if (method == SolveMethod::Direct) {
      ldlt = std::make_unique<Eigen::SimplicialLDLT<SpMat>>();
      ldlt->compute(A);
      if (ldlt->info() != Eigen::Success)
        throw InternalError("poisson_solve: sparse factorization failed");
    }
  }

  int nxi() const { return g.nx - 2; }
  int nyi() const { return g.ny - 2; }
  int kint(int i, int j) const { return (i - 1) * nyi() + (j - 1); }
  int kall(int i, int j) const { return i * g.ny + j; }

  void build_dirichlet() {
    const double cx = 1.0 / (g.hx() * g.hx());
    const double cy = 1.0 / (g.hy() * g.hy());
    const int n = nxi() * nyi();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 5);
    for (int i = 1; i < g.nx - 1; ++i)
      for (int j = 1; j < g.ny - 1; ++j) {
        const int k = kint(i, j);
        trip.emplace_back(k, k, 2.0 * cx + 2.0 * cy);
        if (i > 1) trip.emplace_back(k, kint(i - 1, j), -cx);
        if (i < g.nx - 2) trip.emplace_back(k, kint(i + 1, j), -cx);
        if (j > 1) trip.emplace_back(k, kint(i, j - 1), -cy);
        if (j < g.ny - 2) trip.emplace_back(k, kint(i, j + 1), -cy);
      }
    A.resize(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
  }

  double weight(int i, int j) const {
    const double wi = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
    const double wj = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
    return wi * wj;
  }

  void build_neumann() {
    const double cx = 1.0 / (g.hx() * g.hx());
    const double cy = 1.0 / (g.hy() * g.hy());
    const int n = g.nx * g.ny;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 5);
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        const int k = kall(i, j);
        if (k == 0) {
          trip.emplace_back(0, 0, 1.0);  // grounded node pins the additive constant
          continue;
        }
        const double w = weight(i, j);
        double diag = 2.0 * cx + 2.0 * cy;
        auto link = [&](int ii, int jj, double coef) {
          const int kk = kall(ii, jj);
          if (kk != 0) trip.emplace_back(k, kk, w * coef);
          // neighbours of the grounded node contribute u0 = 0: drop the entry
        };
        if (i == 0)
          link(1, j, -2.0 * cx);
        else if (i == g.nx - 1)
          link(g.nx - 2, j, -2.0 * cx);
        else {
          link(i - 1, j, -cx);
          link(i + 1, j, -cx);
        }
        if (j == 0)
          link(i, 1, -2.0 * cy);
        else if (j == g.ny - 1)
          link(i, g.ny - 2, -2.0 * cy);
        else {
          link(i, j - 1, -cy);
          link(i, j + 1, -cy);
        }
        trip.emplace_back(k, k, w * diag);
      }
    A.resize(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
  }

  Eigen::VectorXd linear_solve(const Eigen::VectorXd& b) const {
    if (method == SolveMethod::Direct) {
      Eigen::VectorXd u = ldlt->solve(b);
      if (ldlt->info() != Eigen::Success)
        throw InternalError("poisson_solve: back-substitution failed");
      return u;
    }
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-12);
    cg.setMaxIterations(200L * (g.nx + g.ny));
    cg.compute(A);
    Eigen::VectorXd u = cg.solve(b);
    if (cg.info() != Eigen::Success)
      throw InternalError("poisson_solve: conjugate gradients did not converge");
    return u;
  }

  ScalarField2D solve_dirichlet(const ScalarField2D& rhs, const PoissonTraces& tr) const {
    const double cx = 1.0 / (g.hx() * g.hx());
    const double cy = 1.0 / (g.hy() * g.hy());
    Eigen::VectorXd b(nxi() * nyi());
    for (int i = 1; i < g.nx - 1; ++i)
      for (int j = 1; j < g.ny - 1; ++j) {
        double v = -rhs.at(i, j);
        if (i == 1) v += cx * tr.left[j];
        if (i == g.nx - 2) v += cx * tr.right[j];
        if (j == 1) v += cy * tr.bottom[i];
        if (j == g.ny - 2) v += cy * tr.top[i];
        b[kint(i, j)] = v;
      }
    const Eigen::VectorXd u = linear_solve(b);
    ScalarField2D out(g);
    for (int j = 0; j < g.ny; ++j) {
      out.at(0, j) = tr.left[j];
      out.at(g.nx - 1, j) = tr.right[j];
    }
    for (int i = 0; i < g.nx; ++i) {
      out.at(i, 0) = tr.bottom[i];
      out.at(i, g.ny - 1) = tr.top[i];
    }
    for (int i = 1; i < g.nx - 1; ++i)
      for (int j = 1; j < g.ny - 1; ++j) out.at(i, j) = u[kint(i, j)];
    return out;
  }

  ScalarField2D solve_neumann(const ScalarField2D& rhs, const PoissonTraces& tr,
                              double flux_tol) const {
    const int n = g.nx * g.ny;
    Eigen::VectorXd b(n);
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        double v = -rhs.at(i, j);
        if (i == 0) v += 2.0 * tr.left[j] / g.hx();
        if (i == g.nx - 1) v += 2.0 * tr.right[j] / g.hx();
        if (j == 0) v += 2.0 * tr.bottom[i] / g.hy();
        if (j == g.ny - 1) v += 2.0 * tr.top[i] / g.hy();
        b[kall(i, j)] = weight(i, j) * v;
      }
    // Discrete flux balance; b must be orthogonal to constants.
    const double defect = -b.sum() * g.hx() * g.hy();
    if (flux_tol >= 0.0 && std::abs(defect) > flux_tol)
      throw SolvabilityError("poisson_solve: Neumann data violate the flux balance", defect);
    b.array() -= b.sum() / n;
    b[0] = 0.0;

    const Eigen::VectorXd u = linear_solve(b);
    ScalarField2D out(g);
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) out.at(i, j) = u[kall(i, j)];
    // Pin the mean (trapezoid) to zero.
    const double mean = trapezoid2d(out) / (g.lx * g.ly);
    for (double& x : out.data()) x -= mean;
    return out;
  }
};

double poisson_scale(const ScalarField2D& rhs, const PoissonTraces& tr, const RectGrid& g) {
  auto vmax = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  return rhs.max_abs() * g.lx * g.ly +
         (vmax(tr.left) + vmax(tr.right)) * g.ly + (vmax(tr.bottom) + vmax(tr.top)) * g.lx;
}

}  // namespace

ScalarField2D poisson_solve(PoissonKind kind, const ScalarField2D& rhs,
                            const PoissonTraces& traces, SolveMethod method) {
  const RectGrid& g = rhs.grid();
  if (static_cast<int>(traces.left.size()) != g.ny ||
      static_cast<int>(traces.right.size()) != g.ny ||
      static_cast<int>(traces.bottom.size()) != g.nx ||
      static_cast<int>(traces.top.size()) != g.nx)
    throw DomainError("poisson_solve: trace lengths do not match the grid");
  PoissonOp op(g, kind, method);
  if (kind == PoissonKind::Dirichlet) return op.solve_dirichlet(rhs, traces);
  const double tol = 1e-6 * poisson_scale(rhs, traces, g) + 1e-18;
  return op.solve_neumann(rhs, traces, tol);
}

// ---------------------------------------------------------------------------
// Cauchy-Riemann system via the two scalar potentials.
// ---------------------------------------------------------------------------

struct CauchyRiemannSolver::Impl {
  RectGrid grid;
  SolveMethod method;
  PoissonOp dirichlet;
  PoissonOp neumann;

  Impl(const RectGrid& g, SolveMethod m)
      : grid(g),
        method(m),
        dirichlet(g, PoissonKind::Dirichlet, m),
        neumann(g, PoissonKind::Neumann, m) {}
};

CauchyRiemannSolver::CauchyRiemannSolver(const RectGrid& grid, SolveMethod method)
    : impl_(std::make_unique<Impl>(grid, method)) {}
CauchyRiemannSolver::~CauchyRiemannSolver() = default;
CauchyRiemannSolver::CauchyRiemannSolver(CauchyRiemannSolver&&) noexcept = default;
CauchyRiemannSolver& CauchyRiemannSolver::operator=(CauchyRiemannSolver&&) noexcept = default;

const RectGrid& CauchyRiemannSolver::grid() const { return impl_->grid; }

std::pair<ScalarField2D, ScalarField2D> CauchyRiemannSolver::solve(
    const EllipticProblem& prob, const EllipticOptions& opts) const {
  const RectGrid& g = impl_->grid;
  if (!prob.grid.same_layout(g))
    throw DomainError("CauchyRiemannSolver: problem grid does not match the cached grid");

  const double res = compatibility_residual(prob);
  const double tol = opts.compat_tol >= 0.0
                         ? opts.compat_tol
                         : 1e-8 * default_compat_scale(prob) + 1e-18;
  double f2_shift = 0.0;
  if (std::abs(res) > tol) {
    if (opts.projection_tol >= 0.0 && std::abs(res) <= opts.projection_tol)
      f2_shift = res / (g.lx * g.ly);
    else
      throw SolvabilityError("cauchy_riemann: boundary data incompatible (residual " +
                                 std::to_string(res) + ")",
                             res);
  }

  // Gradient-potential part: Delta Phi = f1, Phi = 0 on the boundary.
  PoissonTraces zero;
  zero.left.assign(g.ny, 0.0);
  zero.right.assign(g.ny, 0.0);
  zero.bottom.assign(g.nx, 0.0);
  zero.top.assign(g.nx, 0.0);
  const ScalarField2D phi = impl_->dirichlet.solve_dirichlet(prob.f1, zero);
  const ScalarField2D v1a = diff_y(phi);
  const ScalarField2D v2a = diff_x(phi);

  // Curl-potential part: Delta Psi = f2 with the traces as normal fluxes.
  PoissonTraces flux;
  flux.left = prob.g1;
  flux.right.resize(g.ny);
  for (int j = 0; j < g.ny; ++j) flux.right[j] = -prob.g3[j];
  flux.bottom.resize(g.nx);
  for (int i = 0; i < g.nx; ++i) flux.bottom[i] = -prob.g2[i];
  flux.top = prob.g4;
  ScalarField2D f2 = prob.f2;
  if (f2_shift != 0.0)
    for (double& x : f2.data()) x -= f2_shift;
  const ScalarField2D psi =
      impl_->neumann.solve_neumann(f2, flux,
                                   opts.consistency_projection
                                       ? std::numeric_limits<double>::infinity()
                                       : tol);
  ScalarField2D w1 = diff_x(psi);
  for (double& x : w1.data()) x = -x;
  ScalarField2D w2 = diff_y(psi);
  // The normal derivative at a flux edge equals the prescribed trace by the
  // ghost-node construction; impose it exactly.
  for (int j = 0; j < g.ny; ++j) {
    w1.at(0, j) = prob.g1[j];
    w1.at(g.nx - 1, j) = prob.g3[j];
  }
  for (int i = 0; i < g.nx; ++i) {
    w2.at(i, 0) = prob.g2[i];
    w2.at(i, g.ny - 1) = prob.g4[i];
  }

  ScalarField2D u1(g), u2(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      u1.at(i, j) = v1a.at(i, j) + w1.at(i, j);
      u2.at(i, j) = v2a.at(i, j) + w2.at(i, j);
    }
  return {std::move(u1), std::move(u2)};
}

std::pair<ScalarField2D, ScalarField2D> solve_cauchy_riemann(const EllipticProblem& prob,
                                                             const EllipticOptions& opts) {
  CauchyRiemannSolver solver(prob.grid, opts.method);
  return solver.solve(prob, opts);
}

// ---------------------------------------------------------------------------
// General coefficients via the stretching transformation.
// ---------------------------------------------------------------------------

namespace {

RectGrid stretched_grid(const RectGrid& g, double a1, double a2) {
  return RectGrid(0.0, g.y0, g.lx / std::sqrt(a1 * a2), g.ly, g.nx, g.ny);
}

}  // namespace

FirstOrderEllipticSolver::FirstOrderEllipticSolver(const RectGrid& grid, double a1, double a2,
                                                   SolveMethod method)
    : grid_(grid), a1_(a1), a2_(a2), cr_(stretched_grid(grid, a1, a2), method) {
  if (!(a1 * a2 > 0.0))
    throw DomainError("FirstOrderEllipticSolver: need a1*a2 > 0 (ellipticity)");
}

std::pair<ScalarField2D, ScalarField2D> FirstOrderEllipticSolver::solve(
    const EllipticProblem& prob, const EllipticOptions& opts) const {
  if (!prob.grid.same_layout(grid_))
    throw DomainError("FirstOrderEllipticSolver: grid mismatch");
  if (prob.a1 != a1_ || prob.a2 != a2_)
    throw DomainError("FirstOrderEllipticSolver: coefficient mismatch");

  const double res = compatibility_residual(prob);
  const double tol = opts.compat_tol >= 0.0
                         ? opts.compat_tol
                         : 1e-8 * default_compat_scale(prob) + 1e-18;
  double f2_shift = 0.0;
  if (std::abs(res) > tol) {
    if (opts.projection_tol >= 0.0 && std::abs(res) <= opts.projection_tol)
      f2_shift = res / (grid_.lx * grid_.ly);
    else
      throw SolvabilityError("first_order_elliptic: boundary data incompatible (residual " +
                                 std::to_string(res) + ")",
                             res);
  }

  // Node-for-node rescaling onto the Cauchy-Riemann normal form.
  const double r = std::sqrt(a2_ / a1_);
  EllipticProblem cr = EllipticProblem::zero(cr_.grid());
  for (std::size_t k = 0; k < prob.f1.data().size(); ++k) {
    cr.f1.data()[k] = r * prob.f1.data()[k];
    cr.f2.data()[k] = prob.f2.data()[k] - f2_shift;
  }
  for (int j = 0; j < grid_.ny; ++j) {
    cr.g1[j] = r * prob.g1[j];
    cr.g3[j] = r * prob.g3[j];
  }
  cr.g2 = prob.g2;
  cr.g4 = prob.g4;

  EllipticOptions inner = opts;
  inner.compat_tol = std::numeric_limits<double>::infinity();  // already verified above
  auto [v1, v2] = cr_.solve(cr, inner);

  // Undo the unknown rescaling and re-stamp the original coordinates.
  ScalarField2D u1(grid_), u2(grid_);
  for (std::size_t k = 0; k < u1.data().size(); ++k) u1.data()[k] = v1.data()[k] / r;
  u2.data() = std::move(v2.data());
  return {std::move(u1), std::move(u2)};
}

std::pair<ScalarField2D, ScalarField2D> solve_first_order_elliptic(const EllipticProblem& prob,
                                                                   const EllipticOptions& opts) {
  FirstOrderEllipticSolver solver(prob.grid, prob.a1, prob.a2, opts.method);
  return solver.solve(prob, opts);
}

}  // namespace transhock
