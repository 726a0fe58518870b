#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "brokenpde/point.hpp"

namespace brokenpde {

enum class Variable { X, Y };

enum class Function { Sin, Cos, Exp, Abs, Min, Max };

/// Immutable expression tree over the variables x and y.
///
/// Nodes are shared between trees, so copying an Expr is cheap and
/// concurrent evaluation from several threads is safe.
class Expr {
public:
  enum class Kind { Constant, Var, Negate, Add, Sub, Mul, Div, Pow, Call };

  struct Node;

  /// The zero constant.
  Expr();

  static Expr constant(double value);
  static Expr variable(Variable v);
  static Expr call(Function f, std::vector<Expr> args);
  /// Operator node built verbatim, without the folding done by the operators below.
  static Expr make(Kind kind, std::vector<Expr> children);

  Kind kind() const;
  double constant_value() const;  ///< only valid for Kind::Constant
  Variable variable_id() const;   ///< only valid for Kind::Var
  Function function() const;      ///< only valid for Kind::Call
  const std::vector<Expr>& children() const;

  /// Evaluates at p. Throws EvalError on division by zero, 0 raised to a
  /// negative power, a fractional power of a negative base, or a non-finite result.
  double evaluate(Point p) const;

  /// True when the tree contains no variable.
  bool is_constant() const;

  /// Fully parenthesized text that parses back to a structurally equal tree.
  std::string to_string() const;

  friend bool structurally_equal(const Expr& a, const Expr& b);

  friend Expr operator-(const Expr& a);
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr pow(const Expr& base, const Expr& exponent);

private:
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Parses the coefficient grammar:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'x' | 'y' | func '(' args ')' | '(' expr ')' | '{' expr '}'
///
/// so '^' binds tighter than unary minus ("-x^2" is -(x^2)) and is right
/// associative. Throws SyntaxError (with byte offset) or UnknownIdentifier.
Expr parse(std::string_view text);

/// Exact derivative with light constant folding. Powers need a constant
/// exponent; abs, min and max raise NonDifferentiable.
Expr differentiate(const Expr& e, Variable v);

/// d^2/dx^2 + d^2/dy^2 of e.
Expr laplacian(const Expr& e);

}  // namespace brokenpde
