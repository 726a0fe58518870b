#include "brokenpde/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <utility>

#include "brokenpde/errors.hpp"

namespace brokenpde {

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;
  Variable var = Variable::X;
  Function func = Function::Sin;
  std::vector<Expr> children;
};

namespace {

using Node = Expr::Node;

std::string_view function_name(Function f) {
  switch (f) {
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Exp: return "exp";
    case Function::Abs: return "abs";
    case Function::Min: return "min";
    case Function::Max: return "max";
  }
  return "?";
}

std::size_t function_arity(Function f) {
  return (f == Function::Min || f == Function::Max) ? 2 : 1;
}

bool lookup_function(std::string_view name, Function& out) {
  static constexpr std::array<std::pair<std::string_view, Function>, 6> table{{
      {"sin", Function::Sin},
      {"cos", Function::Cos},
      {"exp", Function::Exp},
      {"abs", Function::Abs},
      {"min", Function::Min},
      {"max", Function::Max},
  }};
  for (const auto& [n, f] : table) {
    if (n == name) {
      out = f;
      return true;
    }
  }
  return false;
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

}  // namespace

Expr::Expr() : Expr(std::make_shared<const Node>()) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(Variable v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var = v;
  return Expr(std::move(n));
}

Expr Expr::make(Kind kind, std::vector<Expr> children) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->children = std::move(children);
  return Expr(std::move(n));
}

Expr Expr::call(Function f, std::vector<Expr> args) {
  if (args.size() != function_arity(f)) {
    throw InvalidArgument(std::string(function_name(f)) + " expects " +
                          std::to_string(function_arity(f)) + " argument(s)");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->func = f;
  n->children = std::move(args);
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
Variable Expr::variable_id() const { return node_->var; }
Function Expr::function() const { return node_->func; }
const std::vector<Expr>& Expr::children() const { return node_->children; }

double Expr::evaluate(Point p) const {
  const Node& n = *node_;
  auto child = [&](std::size_t i) { return n.children[i].evaluate(p); };
  double r = 0.0;
  switch (n.kind) {
    case Kind::Constant: return n.value;
    case Kind::Var: return n.var == Variable::X ? p.x : p.y;
    case Kind::Negate: return -child(0);
    case Kind::Add: r = child(0) + child(1); break;
    case Kind::Sub: r = child(0) - child(1); break;
    case Kind::Mul: r = child(0) * child(1); break;
    case Kind::Div: {
      const double num = child(0);
      const double den = child(1);
      if (den == 0.0) throw EvalError("division by zero");
      r = num / den;
      break;
    }
    case Kind::Pow: {
      const double base = child(0);
      const double ex = child(1);
      if (base == 0.0 && ex < 0.0) throw EvalError("zero raised to a negative power");
      if (base < 0.0 && !is_integer(ex)) {
        throw EvalError("fractional power of a negative base");
      }
      r = std::pow(base, ex);
      break;
    }
    case Kind::Call: {
      const double a = child(0);
      switch (n.func) {
        case Function::Sin: r = std::sin(a); break;
        case Function::Cos: r = std::cos(a); break;
        case Function::Exp: r = std::exp(a); break;
        case Function::Abs: r = std::abs(a); break;
        case Function::Min: r = std::min(a, child(1)); break;
        case Function::Max: r = std::max(a, child(1)); break;
      }
      break;
    }
  }
  if (!std::isfinite(r)) throw EvalError("non-finite result");
  return r;
}

bool Expr::is_constant() const {
  if (node_->kind == Kind::Var) return false;
  for (const auto& c : node_->children) {
    if (!c.is_constant()) return false;
  }
  return true;
}

std::string Expr::to_string() const {
  const Node& n = *node_;
  auto bin = [&](const char* op) {
    return "(" + n.children[0].to_string() + op + n.children[1].to_string() + ")";
  };
  switch (n.kind) {
    case Kind::Constant:
      return n.value < 0.0 ? "(-" + format_number(-n.value) + ")" : format_number(n.value);
    case Kind::Var: return n.var == Variable::X ? "x" : "y";
    case Kind::Negate: return "(-" + n.children[0].to_string() + ")";
    case Kind::Add: return bin("+");
    case Kind::Sub: return bin("-");
    case Kind::Mul: return bin("*");
    case Kind::Div: return bin("/");
    case Kind::Pow: return bin("^");
    case Kind::Call: {
      std::string s(function_name(n.func));
      s += "(";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) s += ",";
        s += n.children[i].to_string();
      }
      return s + ")";
    }
  }
  return {};
}

bool structurally_equal(const Expr& a, const Expr& b) {
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Expr::Kind::Constant: return x.value == y.value;
    case Expr::Kind::Var: return x.var == y.var;
    case Expr::Kind::Call:
      if (x.func != y.func) return false;
      break;
    default: break;
  }
  if (x.children.size() != y.children.size()) return false;
  for (std::size_t i = 0; i < x.children.size(); ++i) {
    if (!structurally_equal(x.children[i], y.children[i])) return false;
  }
  return true;
}

namespace {

Expr raw(Expr::Kind kind, std::vector<Expr> children) {
  return Expr::make(kind, std::move(children));
}

bool is_const(const Expr& e, double v) {
  return e.kind() == Expr::Kind::Constant && e.constant_value() == v;
}

/// Replaces a foldable node by its value when that value is finite.
Expr fold(Expr e) {
  if (e.kind() == Expr::Kind::Constant || !e.is_constant()) return e;
  try {
    return Expr::constant(e.evaluate({}));
  } catch (const EvalError&) {
    return e;  // leave the error for evaluation time
  }
}

}  // namespace

Expr operator-(const Expr& a) {
  if (a.kind() == Expr::Kind::Constant) return Expr::constant(-a.constant_value());
  if (a.kind() == Expr::Kind::Negate) return a.children()[0];
  return raw(Expr::Kind::Negate, {a});
}

Expr operator+(const Expr& a, const Expr& b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return fold(raw(Expr::Kind::Add, {a, b}));
}

Expr operator-(const Expr& a, const Expr& b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return -b;
  return fold(raw(Expr::Kind::Sub, {a, b}));
}

Expr operator*(const Expr& a, const Expr& b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return -b;
  if (is_const(b, -1.0)) return -a;
  return fold(raw(Expr::Kind::Mul, {a, b}));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (is_const(b, 1.0)) return a;
  if (is_const(a, 0.0) && !(b.kind() == Expr::Kind::Constant)) return Expr::constant(0.0);
  return fold(raw(Expr::Kind::Div, {a, b}));
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (is_const(exponent, 1.0)) return base;
  if (is_const(exponent, 0.0)) return Expr::constant(1.0);
  return fold(raw(Expr::Kind::Pow, {base, exponent}));
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) {
      throw SyntaxError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    }
    return e;
  }

private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      throw SyntaxError(std::string("expected '") + c + "'", pos_);
    }
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = raw(Expr::Kind::Add, {lhs, parse_term()});
      } else if (accept('-')) {
        lhs = raw(Expr::Kind::Sub, {lhs, parse_term()});
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = raw(Expr::Kind::Mul, {lhs, parse_unary()});
      } else if (accept('/')) {
        lhs = raw(Expr::Kind::Div, {lhs, parse_unary()});
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return raw(Expr::Kind::Negate, {parse_unary()});
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) return raw(Expr::Kind::Pow, {base, parse_unary()});
    return base;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(' || c == '{') {
      ++pos_;
      Expr inner = parse_expr();
      expect(c == '(' ? ')' : '}');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw SyntaxError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      throw SyntaxError("malformed number", start);
    }
    return Expr::constant(value);
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x") return Expr::variable(Variable::X);
    if (name == "y") return Expr::variable(Variable::Y);
    Function f{};
    if (!lookup_function(name, f)) throw UnknownIdentifier(std::string(name), start);
    expect('(');
    std::vector<Expr> args;
    args.push_back(parse_expr());
    while (accept(',')) args.push_back(parse_expr());
    expect(')');
    if (args.size() != function_arity(f)) {
      throw SyntaxError(std::string(name) + " expects " + std::to_string(function_arity(f)) +
                            " argument(s)",
                        start);
    }
    return Expr::call(f, std::move(args));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

// ---------------------------------------------------------------------------
// Differentiation

Expr differentiate(const Expr& e, Variable v) {
  if (e.is_constant()) return Expr::constant(0.0);
  const auto& c = e.children();
  switch (e.kind()) {
    case Expr::Kind::Constant: return Expr::constant(0.0);
    case Expr::Kind::Var: return Expr::constant(e.variable_id() == v ? 1.0 : 0.0);
    case Expr::Kind::Negate: return -differentiate(c[0], v);
    case Expr::Kind::Add: return differentiate(c[0], v) + differentiate(c[1], v);
    case Expr::Kind::Sub: return differentiate(c[0], v) - differentiate(c[1], v);
    case Expr::Kind::Mul:
      return differentiate(c[0], v) * c[1] + c[0] * differentiate(c[1], v);
    case Expr::Kind::Div: {
      const Expr& f = c[0];
      const Expr& g = c[1];
      return (differentiate(f, v) * g - f * differentiate(g, v)) / pow(g, Expr::constant(2.0));
    }
    case Expr::Kind::Pow: {
      const Expr& base = c[0];
      const Expr& ex = c[1];
      if (ex.is_constant()) {
        const double p = ex.evaluate({});
        return Expr::constant(p) * pow(base, Expr::constant(p - 1.0)) * differentiate(base, v);
      }
      if (base.is_constant()) {
        const double b = base.evaluate({});
        if (b > 0.0) return e * Expr::constant(std::log(b)) * differentiate(ex, v);
      }
      throw NonDifferentiable("power with a variable exponent: " + e.to_string());
    }
    case Expr::Kind::Call: {
      const Expr& a = c[0];
      switch (e.function()) {
        case Function::Sin:
          return Expr::call(Function::Cos, {a}) * differentiate(a, v);
        case Function::Cos:
          return -(Expr::call(Function::Sin, {a}) * differentiate(a, v));
        case Function::Exp: return e * differentiate(a, v);
        case Function::Abs:
        case Function::Min:
        case Function::Max:
          throw NonDifferentiable(std::string(function_name(e.function())) +
                                  " is not differentiable: " + e.to_string());
      }
    }
  }
  throw NonDifferentiable("unsupported node");
}

Expr laplacian(const Expr& e) {
  const Expr dx = differentiate(e, Variable::X);
  const Expr dy = differentiate(e, Variable::Y);
  return differentiate(dx, Variable::X) + differentiate(dy, Variable::Y);
}

}  // namespace brokenpde
