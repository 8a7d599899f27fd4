#pragma once

#include <memory>
#include <string>
#include <vector>

#include "transhock/errors.hpp"

namespace transhock {

// Scalar function of one variable on an interval, either a parsed arithmetic
// expression in x (with sin, cos, pow, ^, pi and the nozzle length L bound as
// constants) or a sampled table with cubic-spline evaluation.
class Profile1D {
 public:
  Profile1D();

  static Profile1D constant(double value, double x_min = 0.0, double x_max = 1.0);
  // Grammar: + - * / ^, unary -, sin(...), cos(...), pow(a,b), pi, L, x.
  static Profile1D expression(const std::string& expr, double x_min, double x_max,
                              double length_binding);
  // Natural cubic spline through (x, v); x strictly increasing.
  static Profile1D sampled(std::vector<double> x, std::vector<double> v);
  // Two-column CSV (coordinate, value); header line optional.
  static Profile1D from_csv(const std::string& path);

  double value(double x) const;
  double operator()(double x) const { return value(x); }
  // Spline: analytic derivative (linear extension outside the knots).
  // Expression/constant: centred finite difference.
  double derivative(double x) const;

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  bool is_sampled() const { return kind_ == Kind::Sampled; }
  const std::string& text() const { return text_; }

  struct Expr;  // parsed AST node, defined in the implementation

 private:
  enum class Kind { Constant, Expression, Sampled };

  Kind kind_ = Kind::Constant;
  double const_value_ = 0.0;
  double x_min_ = 0.0;
  double x_max_ = 1.0;
  std::string text_;
  std::shared_ptr<const Expr> expr_;
  double length_binding_ = 1.0;
  // spline data
  std::vector<double> sx_, sv_, sm_;  // knots, values, second derivatives
};

}  // namespace transhock
