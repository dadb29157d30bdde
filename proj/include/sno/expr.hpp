#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sno {

enum class UnaryFn { Sin, Cos, Exp, Log, Sqrt };

/// Immutable symbolic expression over the variables x1..xn.
///
/// Nodes are shared between expressions, so copies are cheap and derivative
/// trees reuse subtrees of the original. Builders fold constants but perform
/// no further simplification.
class Expr {
 public:
  /// The constant 0 over dimension 0.
  Expr();

  static Expr constant(double value, int dimension);
  /// `index` is 1-based and must lie in [1, dimension].
  static Expr variable(int index, int dimension);

  int dimension() const { return dim_; }

  /// Evaluates at `x`, which must have `dimension()` entries.
  /// Throws DomainError for log/sqrt outside their domain or division by zero.
  double eval(std::span<const double> x) const;

  /// Exact partial derivative with respect to x_index (1-based).
  Expr derivative(int index) const;
  std::vector<Expr> gradient() const;
  /// Upper triangle is differentiated, lower triangle mirrors it.
  std::vector<std::vector<Expr>> hessian() const;

  std::optional<double> constant_value() const;
  /// Parenthesized text that `parse` accepts and maps back to the same values.
  std::string to_string() const;

  /// Same tree declared over `dimension`, which may not drop a used variable.
  Expr with_dimension(int dimension) const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& base, int exponent);
  friend Expr apply(UnaryFn fn, const Expr& arg);

  struct Node;

 private:
  Expr(std::shared_ptr<const Node> node, int dim) : node_(std::move(node)), dim_(dim) {}

  std::shared_ptr<const Node> node_;
  int dim_ = 0;
};

Expr operator+(const Expr& a, double b);
Expr operator*(double a, const Expr& b);

/// Parses `text` over variables x1..x`dimension`.
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := atom ['^' integer]
///   atom   := number | 'x' integer | '(' expr ')' | '-' factor | func '(' expr ')'
///   func   := sin | cos | exp | log | sqrt
///
/// Unary minus applies to a whole factor, so `-x1^2` is `-(x1^2)`.
/// Throws ParseError with the offending position.
Expr parse(std::string_view text, int dimension);

}  // namespace sno
