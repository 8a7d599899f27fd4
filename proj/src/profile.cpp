#include "transhock/profile.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace transhock {

// -------- expression AST --------

struct Profile1D::Expr {
  enum class Op { Num, VarX, VarL, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos };
  Op op;
  double num = 0.0;
  std::shared_ptr<const Expr> a, b;

  double eval(double x, double length) const {
    switch (op) {
      case Op::Num: return num;
      case Op::VarX: return x;
      case Op::VarL: return length;
      case Op::Add: return a->eval(x, length) + b->eval(x, length);
      case Op::Sub: return a->eval(x, length) - b->eval(x, length);
      case Op::Mul: return a->eval(x, length) * b->eval(x, length);
      case Op::Div: return a->eval(x, length) / b->eval(x, length);
      case Op::Pow: return std::pow(a->eval(x, length), b->eval(x, length));
      case Op::Neg: return -a->eval(x, length);
      case Op::Sin: return std::sin(a->eval(x, length));
      case Op::Cos: return std::cos(a->eval(x, length));
    }
    return 0.0;
  }
};

namespace {

using ExprPtr = std::shared_ptr<const Profile1D::Expr>;

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  explicit Parser(const std::string& src) : s(src) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw ConfigError("expression error at position " + std::to_string(pos) + ": " + what +
                      " in \"" + s + "\"");
  }

  ExprPtr make(Profile1D::Expr e) { return std::make_shared<Profile1D::Expr>(std::move(e)); }
  ExprPtr unary_node(Profile1D::Expr::Op op, ExprPtr a) {
    Profile1D::Expr e;
    e.op = op;
    e.a = std::move(a);
    return make(std::move(e));
  }
  ExprPtr binary_node(Profile1D::Expr::Op op, ExprPtr a, ExprPtr b) {
    Profile1D::Expr e;
    e.op = op;
    e.a = std::move(a);
    e.b = std::move(b);
    return make(std::move(e));
  }
  ExprPtr number_node(double v) {
    Profile1D::Expr e;
    e.op = Profile1D::Expr::Op::Num;
    e.num = v;
    return make(std::move(e));
  }

  ExprPtr parse() {
    ExprPtr e = expr();
    skip_ws();
    if (pos != s.size()) fail("trailing input");
    return e;
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    for (;;) {
      skip_ws();
      if (eat('+'))
        lhs = binary_node(Profile1D::Expr::Op::Add, lhs, term());
      else if (eat('-'))
        lhs = binary_node(Profile1D::Expr::Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    for (;;) {
      skip_ws();
      if (eat('*'))
        lhs = binary_node(Profile1D::Expr::Op::Mul, lhs, unary());
      else if (eat('/'))
        lhs = binary_node(Profile1D::Expr::Op::Div, lhs, unary());
      else
        return lhs;
    }
  }

  ExprPtr unary() {
    skip_ws();
    if (eat('-')) return unary_node(Profile1D::Expr::Op::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    skip_ws();
    if (eat('^')) return binary_node(Profile1D::Expr::Op::Pow, base, unary());
    return base;
  }

  ExprPtr primary() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of expression");
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t end = 0;
      double v = 0.0;
      try {
        v = std::stod(s.substr(pos), &end);
      } catch (...) {
        fail("bad number");
      }
      pos += end;
      return number_node(v);
    }
    if (c == '(') {
      ++pos;
      ExprPtr e = expr();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      const std::string name = s.substr(start, pos - start);
      if (name == "x") {
        Profile1D::Expr e;
        e.op = Profile1D::Expr::Op::VarX;
        return make(std::move(e));
      }
      if (name == "L") {
        Profile1D::Expr e;
        e.op = Profile1D::Expr::Op::VarL;
        return make(std::move(e));
      }
      if (name == "pi") return number_node(M_PI);
      if (name == "sin" || name == "cos") {
        if (!eat('(')) fail("expected '(' after " + name);
        ExprPtr a = expr();
        if (!eat(')')) fail("missing ')'");
        return unary_node(name == "sin" ? Profile1D::Expr::Op::Sin : Profile1D::Expr::Op::Cos,
                          a);
      }
      if (name == "pow") {
        if (!eat('(')) fail("expected '(' after pow");
        ExprPtr a = expr();
        if (!eat(',')) fail("pow needs two arguments");
        ExprPtr b = expr();
        if (!eat(')')) fail("missing ')'");
        return binary_node(Profile1D::Expr::Op::Pow, a, b);
      }
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

// -------- Profile1D --------

Profile1D::Profile1D() = default;

Profile1D Profile1D::constant(double value, double x_min, double x_max) {
  Profile1D p;
  p.kind_ = Kind::Constant;
  p.const_value_ = value;
  p.x_min_ = x_min;
  p.x_max_ = x_max;
  std::ostringstream os;
  os.precision(17);
  os << value;
  p.text_ = os.str();
  return p;
}

Profile1D Profile1D::expression(const std::string& expr, double x_min, double x_max,
                                double length_binding) {
  Profile1D p;
  p.kind_ = Kind::Expression;
  p.x_min_ = x_min;
  p.x_max_ = x_max;
  p.text_ = expr;
  p.length_binding_ = length_binding;
  Parser parser(expr);
  p.expr_ = parser.parse();
  p.expr_->eval(x_min, length_binding);  // force a first evaluation to surface NaN sources early
  return p;
}

Profile1D Profile1D::sampled(std::vector<double> x, std::vector<double> v) {
  if (x.size() != v.size() || x.size() < 2)
    throw ConfigError("Profile1D::sampled: need matching x/v with at least 2 samples");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1]))
      throw ConfigError("Profile1D::sampled: coordinates must be strictly increasing");

  Profile1D p;
  p.kind_ = Kind::Sampled;
  p.x_min_ = x.front();
  p.x_max_ = x.back();
  p.text_ = "<sampled:" + std::to_string(x.size()) + ">";

  // Natural cubic spline: tridiagonal solve for second derivatives.
  const std::size_t n = x.size();
  std::vector<double> m(n, 0.0);
  if (n > 2) {
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x[i] - x[i - 1];
      const double h1 = x[i + 1] - x[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      c[i] = h1 / 6.0;
      d[i] = (v[i + 1] - v[i]) / h1 - (v[i] - v[i - 1]) / h0;
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double f = a[i] / b[i - 1];
      b[i] -= f * c[i - 1];
      d[i] -= f * d[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
      if (i == 1) break;
    }
  }
  p.sx_ = std::move(x);
  p.sv_ = std::move(v);
  p.sm_ = std::move(m);
  return p;
}

Profile1D Profile1D::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile file: " + path);
  std::vector<double> xs, vs;
  std::string line;
  while (std::getline(in, line)) {
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream row(line);
    double x, v;
    if (row >> x >> v) {
      xs.push_back(x);
      vs.push_back(v);
    }
    // non-numeric rows (headers, comments) are skipped
  }
  if (xs.size() < 2) throw ConfigError("profile file has fewer than 2 numeric rows: " + path);
  return sampled(std::move(xs), std::move(vs));
}

double Profile1D::value(double x) const {
  switch (kind_) {
    case Kind::Constant: return const_value_;
    case Kind::Expression: return expr_->eval(x, length_binding_);
    case Kind::Sampled: break;
  }
  const std::size_t n = sx_.size();
  // Linear extension beyond the knots keeps exit-pressure lookups defined
  // for slightly out-of-range arguments.
  if (x <= sx_.front()) {
    const double slope = (sv_[1] - sv_[0]) / (sx_[1] - sx_[0]) -
                         (sx_[1] - sx_[0]) * (2.0 * sm_[0] + sm_[1]) / 6.0;
    return sv_.front() + slope * (x - sx_.front());
  }
  if (x >= sx_.back()) {
    const double h = sx_[n - 1] - sx_[n - 2];
    const double slope = (sv_[n - 1] - sv_[n - 2]) / h + h * (sm_[n - 2] + 2.0 * sm_[n - 1]) / 6.0;
    return sv_.back() + slope * (x - sx_.back());
  }
  const auto it = std::upper_bound(sx_.begin(), sx_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - sx_.begin()) - 1;
  const double h = sx_[i + 1] - sx_[i];
  const double t0 = (sx_[i + 1] - x) / h;
  const double t1 = (x - sx_[i]) / h;
  return t0 * sv_[i] + t1 * sv_[i + 1] +
         ((t0 * t0 * t0 - t0) * sm_[i] + (t1 * t1 * t1 - t1) * sm_[i + 1]) * h * h / 6.0;
}

double Profile1D::derivative(double x) const {
  if (kind_ == Kind::Sampled) {
    if (x <= sx_.front() || x >= sx_.back()) {
      const double eps = 1e-7 * (sx_.back() - sx_.front());
      return (value(x + eps) - value(x - eps)) / (2.0 * eps);
    }
    const auto it = std::upper_bound(sx_.begin(), sx_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - sx_.begin()) - 1;
    const double h = sx_[i + 1] - sx_[i];
    const double t0 = (sx_[i + 1] - x) / h;
    const double t1 = (x - sx_[i]) / h;
    return (sv_[i + 1] - sv_[i]) / h +
           h / 6.0 * ((3.0 * t1 * t1 - 1.0) * sm_[i + 1] - (3.0 * t0 * t0 - 1.0) * sm_[i]);
  }
  const double eps = 1e-6 * std::max(1.0, std::abs(x));
  return (value(x + eps) - value(x - eps)) / (2.0 * eps);
}

}  // namespace transhock
