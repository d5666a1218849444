#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hconf/valuation.hpp"

namespace hconf {

/// Arithmetic expression over variables and literals with + - * /, unary
/// minus and exp(). Immutable; copies share structure.
class Expr {
 public:
  enum class Kind { Number, Variable, Add, Sub, Mul, Div, Neg, Exp };

  static Expr number(double v);
  static Expr variable(std::string name);
  static Expr binary(Kind op, Expr lhs, Expr rhs);
  static Expr negate(Expr operand);
  static Expr exp(Expr operand);

  Kind kind() const;
  double number_value() const;
  const std::string& name() const;
  const Expr& lhs() const;
  const Expr& rhs() const;
  const Expr& operand() const;

  /// Free variables in first-occurrence order.
  std::vector<std::string> variables() const;

  /// Evaluates with values looked up by name. Throws DomainError for an
  /// unbound variable and NumericError on division by zero.
  double eval(const Valuation& env) const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Minimal-parenthesis rendering; parse_expr(to_string(e)) == e.
std::string to_string(const Expr& e);

/// expr := term (('+'|'-') term)*; term := factor (('*'|'/') factor)*;
/// factor := number | ident | 'exp' '(' expr ')' | '(' expr ')' | '-' factor.
/// `line` and `column` locate the text inside a larger document for error
/// messages.
Expr parse_expr(std::string_view text, std::size_t line = 1, std::size_t column = 1);

/// Expression lowered to a postfix program over a fixed variable layout.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  /// Throws DomainError when the expression uses a name outside `layout`.
  CompiledExpr(const Expr& e, std::span<const std::string> layout);

  double eval(std::span<const double> env) const;

 private:
  enum class Op : unsigned char { Const, Load, Add, Sub, Mul, Div, Neg, Exp };
  struct Instr {
    Op op;
    double value;
    std::size_t index;
  };
  std::vector<Instr> code_;
  std::size_t max_depth_ = 0;
};

enum class CmpOp { Le, Ge, Lt, Gt, Eq };

struct Comparison {
  Expr lhs;
  CmpOp op;
  Expr rhs;

  friend bool operator==(const Comparison&, const Comparison&) = default;
};

/// Conjunction of comparisons; the empty conjunction is `true`.
struct Predicate {
  std::vector<Comparison> terms;

  bool is_true() const { return terms.empty(); }
  std::vector<std::string> variables() const;
  /// Comparisons are relaxed by `slack` (x <= c holds when x <= c + slack).
  bool holds(const Valuation& env, double slack = 0.0) const;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

std::string to_string(const Predicate& p);

/// pred := 'true' | cmp ('&&' cmp)*; cmp := expr ('<='|'>='|'<'|'>'|'==') expr.
Predicate parse_predicate(std::string_view text, std::size_t line = 1, std::size_t column = 1);

class CompiledPredicate {
 public:
  CompiledPredicate() = default;
  CompiledPredicate(const Predicate& p, std::span<const std::string> layout);

  bool is_true() const { return terms_.empty(); }
  bool holds(std::span<const double> env, double slack = 0.0) const;
  /// Signed distance to violation of the tightest comparison: >= 0 when
  /// every non-strict comparison holds. +inf for `true`.
  double margin(std::span<const double> env) const;

 private:
  struct Term {
    CompiledExpr lhs;
    CmpOp op;
    CompiledExpr rhs;
  };
  std::vector<Term> terms_;
};

}  // namespace hconf
