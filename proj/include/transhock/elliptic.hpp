#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "transhock/grid.hpp"

namespace transhock {

enum class SolveMethod { Direct, ConjugateGradient };

// First-order elliptic system on the grid's rectangle:
//   d_y u1 + a1 d_x u2 = f1
//   d_y u2 - a2 d_x u1 = f2
// with u1 prescribed on the vertical edges (g1 at x=x0, g3 at x=x0+lx) and
// u2 on the horizontal edges (g2 at y=y0, g4 at y=y0+ly).
struct EllipticProblem {
  RectGrid grid;
  double a1 = 1.0;
  double a2 = 1.0;
  ScalarField2D f1, f2;
  std::vector<double> g1, g2, g3, g4;  // node samples along the four edges

  static EllipticProblem zero(const RectGrid& g, double a1 = 1.0, double a2 = 1.0);
};

// Defect of the integral solvability condition,
//   int f2 - int (g4 - g2) dx - a2 int (g1 - g3) dy,
// composite trapezoid throughout.  Solutions exist only when this vanishes.
double compatibility_residual(const EllipticProblem& prob);

// -------- Poisson building block --------

enum class PoissonKind { Dirichlet, Neumann };

struct PoissonTraces {
  // Dirichlet: boundary values.  Neumann: outward normal derivatives.
  std::vector<double> left, bottom, right, top;
};

// Five-point Laplacian on the grid; Dirichlet boundary values are imposed
// exactly, Neumann edges use a second-order ghost-node closure.  The Neumann
// solution is mean-pinned to zero (its right-hand side must satisfy the
// discrete flux balance).  Direct sparse factorization by default.
ScalarField2D poisson_solve(PoissonKind kind, const ScalarField2D& rhs,
                            const PoissonTraces& traces, SolveMethod method = SolveMethod::Direct);

// -------- system solvers --------

struct EllipticOptions {
  // Absolute tolerance on compatibility_residual; negative means
  // 1e-8 x (data scale), the library default.
  double compat_tol = -1.0;
  SolveMethod method = SolveMethod::Direct;
  // When true and the (checked, small) residual is nonzero, distribute the
  // defect uniformly over f2 so the discrete system is exactly consistent.
  bool consistency_projection = true;
  // Off by default.  Residuals in (compat_tol, projection_tol] are removed by
  // subtracting the mean defect from f2 instead of raising an error; larger
  // ones always raise.
  double projection_tol = -1.0;
};

// Cauchy-Riemann case (a1 = a2 = 1) with cached factorizations, reusable
// across many right-hand sides on the same grid.
class CauchyRiemannSolver {
 public:
  explicit CauchyRiemannSolver(const RectGrid& grid, SolveMethod method = SolveMethod::Direct);
  ~CauchyRiemannSolver();
  CauchyRiemannSolver(CauchyRiemannSolver&&) noexcept;
  CauchyRiemannSolver& operator=(CauchyRiemannSolver&&) noexcept;

  std::pair<ScalarField2D, ScalarField2D> solve(const EllipticProblem& prob,
                                                const EllipticOptions& opts = {}) const;
  const RectGrid& grid() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::pair<ScalarField2D, ScalarField2D> solve_cauchy_riemann(const EllipticProblem& prob,
                                                             const EllipticOptions& opts = {});

// General a1, a2 > 0: rescale to a Cauchy-Riemann problem, solve, map back.
class FirstOrderEllipticSolver {
 public:
  FirstOrderEllipticSolver(const RectGrid& grid, double a1, double a2,
                           SolveMethod method = SolveMethod::Direct);

  std::pair<ScalarField2D, ScalarField2D> solve(const EllipticProblem& prob,
                                                const EllipticOptions& opts = {}) const;

 private:
  RectGrid grid_;
  double a1_, a2_;
  CauchyRiemannSolver cr_;
};

std::pair<ScalarField2D, ScalarField2D> solve_first_order_elliptic(
    const EllipticProblem& prob, const EllipticOptions& opts = {});

double default_compat_scale(const EllipticProblem& prob);

}  // namespace transhock
