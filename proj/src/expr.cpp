#include "hconf/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "hconf/errors.hpp"
#include "hconf/format.hpp"

namespace hconf {

struct Expr::Node {
  Kind kind;
  double value = 0.0;
  std::string name;
  std::vector<Expr> children;
};

namespace {

int precedence(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      return 2;
    case Expr::Kind::Neg:
      return 3;
    default:
      return 4;
  }
}

}  // namespace

Expr Expr::number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->value = v;
  return Expr(std::move(n));
}

Expr Expr::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::binary(Kind op, Expr lhs, Expr rhs) {
  if (op != Kind::Add && op != Kind::Sub && op != Kind::Mul && op != Kind::Div) {
    throw DomainError("Expr::binary: not a binary operator");
  }
  auto n = std::make_shared<Node>();
  n->kind = op;
  n->children = {std::move(lhs), std::move(rhs)};
  return Expr(std::move(n));
}

Expr Expr::negate(Expr operand) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Neg;
  n->children = {std::move(operand)};
  return Expr(std::move(n));
}

Expr Expr::exp(Expr operand) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Exp;
  n->children = {std::move(operand)};
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::number_value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
const Expr& Expr::lhs() const { return node_->children.at(0); }
const Expr& Expr::rhs() const { return node_->children.at(1); }
const Expr& Expr::operand() const { return node_->children.at(0); }

std::vector<std::string> Expr::variables() const {
  std::vector<std::string> out;
  auto visit = [&](auto&& self, const Expr& e) -> void {
    if (e.kind() == Kind::Variable) {
      if (std::find(out.begin(), out.end(), e.name()) == out.end()) out.push_back(e.name());
      return;
    }
    for (const auto& c : e.node_->children) self(self, c);
  };
  visit(visit, *this);
  return out;
}

double Expr::eval(const Valuation& env) const {
  switch (kind()) {
    case Kind::Number:
      return number_value();
    case Kind::Variable:
      return env.at(name()).value();
    case Kind::Add:
      return lhs().eval(env) + rhs().eval(env);
    case Kind::Sub:
      return lhs().eval(env) - rhs().eval(env);
    case Kind::Mul:
      return lhs().eval(env) * rhs().eval(env);
    case Kind::Div: {
      double d = rhs().eval(env);
      if (d == 0.0) throw NumericError("division by zero in '" + to_string(*this) + "'");
      return lhs().eval(env) / d;
    }
    case Kind::Neg:
      return -operand().eval(env);
    case Kind::Exp:
      return std::exp(operand().eval(env));
  }
  return 0.0;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Number:
      return a.number_value() == b.number_value();
    case Expr::Kind::Variable:
      return a.name() == b.name();
    default:
      return a.node_->children == b.node_->children;
  }
}

std::string to_string(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Number: {
      std::string s = format_exact(e.number_value());
      return e.number_value() < 0 || std::signbit(e.number_value()) ? "(" + s + ")" : s;
    }
    case K::Variable:
      return e.name();
    case K::Exp:
      return "exp(" + to_string(e.operand()) + ")";
    case K::Neg: {
      std::string inner = to_string(e.operand());
      return precedence(e.operand().kind()) < precedence(K::Neg) ? "-(" + inner + ")" : "-" + inner;
    }
    default: {
      int p = precedence(e.kind());
      std::string l = to_string(e.lhs());
      std::string r = to_string(e.rhs());
      if (precedence(e.lhs().kind()) < p) l = "(" + l + ")";
      // Left-associative: an equal-precedence right operand needs parentheses.
      if (precedence(e.rhs().kind()) <= p) r = "(" + r + ")";
      const char* op = e.kind() == K::Add ? " + " : e.kind() == K::Sub ? " - " : e.kind() == K::Mul ? " * " : " / ";
      return l + op + r;
    }
  }
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::size_t line, std::size_t column) : text_(text), line_(line), col0_(column) {}

  Expr parse_full_expr() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

  Predicate parse_full_predicate() {
    skip_ws();
    Predicate p;
    if (match_word("true")) {
      skip_ws();
      if (pos_ != text_.size()) error("unexpected text after 'true'");
      return p;
    }
    p.terms.push_back(comparison());
    skip_ws();
    while (match("&&")) {
      p.terms.push_back(comparison());
      skip_ws();
    }
    if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const { throw ParseError(msg, line_, col0_ + pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool match(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  bool match_word(std::string_view w) {
    skip_ws();
    if (text_.substr(pos_, w.size()) != w) return false;
    std::size_t end = pos_ + w.size();
    if (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) return false;
    pos_ = end;
    return true;
  }

  Comparison comparison() {
    Expr l = expr();
    skip_ws();
    CmpOp op{};
    if (match("<=")) {
      op = CmpOp::Le;
    } else if (match(">=")) {
      op = CmpOp::Ge;
    } else if (match("==")) {
      op = CmpOp::Eq;
    } else if (match("<")) {
      op = CmpOp::Lt;
    } else if (match(">")) {
      op = CmpOp::Gt;
    } else {
      error("expected a comparison operator");
    }
    Expr r = expr();
    return {std::move(l), op, std::move(r)};
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      skip_ws();
      if (peek('+')) {
        ++pos_;
        e = Expr::binary(Expr::Kind::Add, std::move(e), term());
      } else if (peek('-')) {
        ++pos_;
        e = Expr::binary(Expr::Kind::Sub, std::move(e), term());
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      skip_ws();
      if (peek('*')) {
        ++pos_;
        e = Expr::binary(Expr::Kind::Mul, std::move(e), factor());
      } else if (peek('/')) {
        ++pos_;
        e = Expr::binary(Expr::Kind::Div, std::move(e), factor());
      } else {
        return e;
      }
    }
  }

  bool peek(char c) const { return pos_ < text_.size() && text_[pos_] == c; }

  Expr factor() {
    skip_ws();
    if (pos_ >= text_.size()) error("unexpected end of expression");
    char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return Expr::negate(factor());
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      skip_ws();
      if (!peek(')')) error("expected ')'");
      ++pos_;
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
      std::string ident(text_.substr(start, pos_ - start));
      if (ident == "exp") {
        skip_ws();
        if (!peek('(')) error("expected '(' after exp");
        ++pos_;
        Expr arg = expr();
        skip_ws();
        if (!peek(')')) error("expected ')'");
        ++pos_;
        return Expr::exp(std::move(arg));
      }
      return Expr::variable(std::move(ident));
    }
    error("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (peek('.')) {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (peek('+') || peek('-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    std::string tok(text_.substr(start, pos_ - start));
    try {
      return Expr::number(parse_double(tok));
    } catch (const DomainError&) {
      pos_ = start;
      error("malformed number '" + tok + "'");
    }
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t col0_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, std::size_t line, std::size_t column) {
  return Parser(text, line, column).parse_full_expr();
}

Predicate parse_predicate(std::string_view text, std::size_t line, std::size_t column) {
  return Parser(text, line, column).parse_full_predicate();
}

CompiledExpr::CompiledExpr(const Expr& e, std::span<const std::string> layout) {
  std::size_t depth = 0;
  auto emit = [&](auto&& self, const Expr& x) -> void {
    using K = Expr::Kind;
    switch (x.kind()) {
      case K::Number:
        code_.push_back({Op::Const, x.number_value(), 0});
        ++depth;
        break;
      case K::Variable: {
        auto it = std::find(layout.begin(), layout.end(), x.name());
        if (it == layout.end()) throw DomainError("unknown variable '" + x.name() + "'");
        code_.push_back({Op::Load, 0.0, static_cast<std::size_t>(it - layout.begin())});
        ++depth;
        break;
      }
      case K::Neg:
      case K::Exp:
        self(self, x.operand());
        code_.push_back({x.kind() == K::Neg ? Op::Neg : Op::Exp, 0.0, 0});
        break;
      default:
        self(self, x.lhs());
        self(self, x.rhs());
        code_.push_back({x.kind() == K::Add   ? Op::Add
                         : x.kind() == K::Sub ? Op::Sub
                         : x.kind() == K::Mul ? Op::Mul
                                              : Op::Div,
                         0.0, 0});
        --depth;
        break;
    }
    max_depth_ = std::max(max_depth_, depth);
  };
  emit(emit, e);
}

double CompiledExpr::eval(std::span<const double> env) const {
  constexpr std::size_t kInline = 16;
  double inline_stack[kInline];
  std::vector<double> heap;
  double* stack = inline_stack;
  if (max_depth_ > kInline) {
    heap.resize(max_depth_);
    stack = heap.data();
  }
  std::size_t sp = 0;
  for (const auto& ins : code_) {
    switch (ins.op) {
      case Op::Const:
        stack[sp++] = ins.value;
        break;
      case Op::Load:
        stack[sp++] = env[ins.index];
        break;
      case Op::Add:
        --sp;
        stack[sp - 1] += stack[sp];
        break;
      case Op::Sub:
        --sp;
        stack[sp - 1] -= stack[sp];
        break;
      case Op::Mul:
        --sp;
        stack[sp - 1] *= stack[sp];
        break;
      case Op::Div:
        --sp;
        if (stack[sp] == 0.0) throw NumericError("division by zero");
        stack[sp - 1] /= stack[sp];
        break;
      case Op::Neg:
        stack[sp - 1] = -stack[sp - 1];
        break;
      case Op::Exp:
        stack[sp - 1] = std::exp(stack[sp - 1]);
        break;
    }
  }
  return sp ? stack[0] : 0.0;
}

namespace {

bool compare(double l, CmpOp op, double r, double slack) {
  switch (op) {
    case CmpOp::Le:
      return l <= r + slack;
    case CmpOp::Ge:
      return l + slack >= r;
    case CmpOp::Lt:
      return l < r + slack;
    case CmpOp::Gt:
      return l + slack > r;
    case CmpOp::Eq:
      return std::fabs(l - r) <= slack;
  }
  return false;
}

double signed_margin(double l, CmpOp op, double r) {
  switch (op) {
    case CmpOp::Le:
    case CmpOp::Lt:
      return r - l;
    case CmpOp::Ge:
    case CmpOp::Gt:
      return l - r;
    case CmpOp::Eq:
      return -std::fabs(l - r);
  }
  return 0.0;
}

const char* op_text(CmpOp op) {
  switch (op) {
    case CmpOp::Le:
      return "<=";
    case CmpOp::Ge:
      return ">=";
    case CmpOp::Lt:
      return "<";
    case CmpOp::Gt:
      return ">";
    case CmpOp::Eq:
      return "==";
  }
  return "?";
}

}  // namespace

std::vector<std::string> Predicate::variables() const {
  std::vector<std::string> out;
  for (const auto& t : terms) {
    for (const auto& e : {t.lhs, t.rhs}) {
      for (auto& v : e.variables()) {
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
      }
    }
  }
  return out;
}

bool Predicate::holds(const Valuation& env, double slack) const {
  return std::all_of(terms.begin(), terms.end(),
                     [&](const Comparison& c) { return compare(c.lhs.eval(env), c.op, c.rhs.eval(env), slack); });
}

std::string to_string(const Predicate& p) {
  if (p.is_true()) return "true";
  std::string out;
  for (std::size_t i = 0; i < p.terms.size(); ++i) {
    if (i) out += " && ";
    out += to_string(p.terms[i].lhs) + " " + op_text(p.terms[i].op) + " " + to_string(p.terms[i].rhs);
  }
  return out;
}

CompiledPredicate::CompiledPredicate(const Predicate& p, std::span<const std::string> layout) {
  for (const auto& t : p.terms) terms_.push_back({CompiledExpr(t.lhs, layout), t.op, CompiledExpr(t.rhs, layout)});
}

bool CompiledPredicate::holds(std::span<const double> env, double slack) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [&](const Term& t) { return compare(t.lhs.eval(env), t.op, t.rhs.eval(env), slack); });
}

double CompiledPredicate::margin(std::span<const double> env) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& t : terms_) m = std::min(m, signed_margin(t.lhs.eval(env), t.op, t.rhs.eval(env)));
  return m;
}

}  // namespace hconf
