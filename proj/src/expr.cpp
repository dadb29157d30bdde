#include "sno/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sno/errors.hpp"

namespace sno {

enum class NodeKind { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Unary };

struct Expr::Node {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;
  int index = 0;     // Variable: 1-based
  int exponent = 0;  // Pow
  UnaryFn fn = UnaryFn::Sin;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_constant(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = NodeKind::Constant;
  n->value = v;
  return n;
}

NodePtr make_binary(NodeKind kind, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

bool is_const(const NodePtr& n, double v) { return n->kind == NodeKind::Constant && n->value == v; }
bool is_const(const NodePtr& n) { return n->kind == NodeKind::Constant; }

NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return make_constant(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return make_binary(NodeKind::Add, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
  if (is_const(a)) return make_constant(-a->value);
  if (a->kind == NodeKind::Neg) return a->lhs;
  auto n = std::make_shared<Expr::Node>();
  n->kind = NodeKind::Neg;
  n->lhs = std::move(a);
  return n;
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return make_constant(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(std::move(b));
  return make_binary(NodeKind::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return make_constant(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return neg(std::move(b));
  if (is_const(b, -1.0)) return neg(std::move(a));
  return make_binary(NodeKind::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
  // A zero constant denominator is kept so that evaluation reports it.
  if (is_const(a) && is_const(b) && b->value != 0.0) return make_constant(a->value / b->value);
  if (is_const(b, 1.0)) return a;
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_constant(0.0);
  return make_binary(NodeKind::Div, std::move(a), std::move(b));
}

NodePtr power(NodePtr a, int k) {
  if (k == 0) return make_constant(1.0);
  if (k == 1) return a;
  if (is_const(a) && (k > 0 || a->value != 0.0)) return make_constant(std::pow(a->value, k));
  auto n = std::make_shared<Expr::Node>();
  n->kind = NodeKind::Pow;
  n->exponent = k;
  n->lhs = std::move(a);
  return n;
}

NodePtr unary(UnaryFn fn, NodePtr a) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = NodeKind::Unary;
  n->fn = fn;
  n->lhs = std::move(a);
  return n;
}

const char* fn_name(UnaryFn fn) {
  switch (fn) {
    case UnaryFn::Sin: return "sin";
    case UnaryFn::Cos: return "cos";
    case UnaryFn::Exp: return "exp";
    case UnaryFn::Log: return "log";
    case UnaryFn::Sqrt: return "sqrt";
  }
  return "?";
}

double eval_node(const Expr::Node& n, std::span<const double> x) {
  switch (n.kind) {
    case NodeKind::Constant: return n.value;
    case NodeKind::Variable: return x[static_cast<std::size_t>(n.index - 1)];
    case NodeKind::Add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case NodeKind::Sub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
    case NodeKind::Mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case NodeKind::Div: {
      const double num = eval_node(*n.lhs, x);
      const double den = eval_node(*n.rhs, x);
      if (den == 0.0) throw DomainError("division by zero");
      return num / den;
    }
    case NodeKind::Pow: {
      const double base = eval_node(*n.lhs, x);
      if (n.exponent < 0 && base == 0.0) throw DomainError("negative power of zero");
      // Repeated squaring keeps small integer powers exact.
      double result = 1.0;
      double b = n.exponent < 0 ? 1.0 / base : base;
      unsigned k = static_cast<unsigned>(n.exponent < 0 ? -static_cast<long>(n.exponent) : n.exponent);
      while (k) {
        if (k & 1u) result *= b;
        b *= b;
        k >>= 1u;
      }
      return result;
    }
    case NodeKind::Neg: return -eval_node(*n.lhs, x);
    case NodeKind::Unary: {
      const double a = eval_node(*n.lhs, x);
      switch (n.fn) {
        case UnaryFn::Sin: return std::sin(a);
        case UnaryFn::Cos: return std::cos(a);
        case UnaryFn::Exp: return std::exp(a);
        case UnaryFn::Log:
          if (!(a > 0.0)) throw DomainError("log of non-positive value");
          return std::log(a);
        case UnaryFn::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of negative value");
          return std::sqrt(a);
      }
    }
  }
  return 0.0;
}

NodePtr diff_node(const NodePtr& n, int j) {
  switch (n->kind) {
    case NodeKind::Constant: return make_constant(0.0);
    case NodeKind::Variable: return make_constant(n->index == j ? 1.0 : 0.0);
    case NodeKind::Add: return add(diff_node(n->lhs, j), diff_node(n->rhs, j));
    case NodeKind::Sub: return sub(diff_node(n->lhs, j), diff_node(n->rhs, j));
    case NodeKind::Mul:
      return add(mul(diff_node(n->lhs, j), n->rhs), mul(n->lhs, diff_node(n->rhs, j)));
    case NodeKind::Div: {
      // (a/b)' = a'/b - a*b'/b^2
      auto da = diff_node(n->lhs, j);
      auto db = diff_node(n->rhs, j);
      return sub(div(da, n->rhs), div(mul(n->lhs, db), power(n->rhs, 2)));
    }
    case NodeKind::Pow:
      return mul(mul(make_constant(n->exponent), power(n->lhs, n->exponent - 1)),
                 diff_node(n->lhs, j));
    case NodeKind::Neg: return neg(diff_node(n->lhs, j));
    case NodeKind::Unary: {
      auto da = diff_node(n->lhs, j);
      if (is_const(da, 0.0)) return da;
      switch (n->fn) {
        case UnaryFn::Sin: return mul(unary(UnaryFn::Cos, n->lhs), da);
        case UnaryFn::Cos: return neg(mul(unary(UnaryFn::Sin, n->lhs), da));
        case UnaryFn::Exp: return mul(n, da);
        case UnaryFn::Log: return div(da, n->lhs);
        case UnaryFn::Sqrt: return div(da, mul(make_constant(2.0), n));
      }
    }
  }
  return make_constant(0.0);
}

int max_variable(const Expr::Node& n) {
  switch (n.kind) {
    case NodeKind::Constant: return 0;
    case NodeKind::Variable: return n.index;
    case NodeKind::Neg:
    case NodeKind::Pow:
    case NodeKind::Unary: return max_variable(*n.lhs);
    default: return std::max(max_variable(*n.lhs), max_variable(*n.rhs));
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print(const Expr::Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Constant:
      if (n.value < 0.0) {
        out += "(-" + format_number(-n.value) + ")";
      } else {
        out += format_number(n.value);
      }
      return;
    case NodeKind::Variable: out += "x" + std::to_string(n.index); return;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div: {
      static constexpr char ops[] = {'+', '-', '*', '/'};
      out += '(';
      print(*n.lhs, out);
      out += ' ';
      out += ops[static_cast<int>(n.kind) - static_cast<int>(NodeKind::Add)];
      out += ' ';
      print(*n.rhs, out);
      out += ')';
      return;
    }
    case NodeKind::Pow:
      out += '(';
      print(*n.lhs, out);
      out += "^" + std::to_string(n.exponent) + ")";
      return;
    case NodeKind::Neg:
      out += "(-";
      print(*n.lhs, out);
      out += ')';
      return;
    case NodeKind::Unary:
      out += fn_name(n.fn);
      out += '(';
      print(*n.lhs, out);
      out += ')';
      return;
  }
}

}  // namespace

Expr::Expr() : node_(make_constant(0.0)), dim_(0) {}

Expr Expr::constant(double value, int dimension) { return Expr(make_constant(value), dimension); }

Expr Expr::variable(int index, int dimension) {
  if (index < 1 || index > dimension) {
    throw InvalidArgument("variable index " + std::to_string(index) + " outside [1, " +
                          std::to_string(dimension) + "]");
  }
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Variable;
  n->index = index;
  return Expr(std::move(n), dimension);
}

double Expr::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw InvalidArgument("point has " + std::to_string(x.size()) + " entries, expected " +
                          std::to_string(dim_));
  }
  return eval_node(*node_, x);
}

Expr Expr::derivative(int index) const {
  if (index < 1 || index > dim_) throw InvalidArgument("derivative index out of range");
  return Expr(diff_node(node_, index), dim_);
}

std::vector<Expr> Expr::gradient() const {
  std::vector<Expr> g;
  g.reserve(static_cast<std::size_t>(dim_));
  for (int j = 1; j <= dim_; ++j) g.push_back(derivative(j));
  return g;
}

std::vector<std::vector<Expr>> Expr::hessian() const {
  const auto n = static_cast<std::size_t>(dim_);
  std::vector<std::vector<Expr>> h(n, std::vector<Expr>(n));
  const auto g = gradient();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      h[i][j] = g[i].derivative(static_cast<int>(j) + 1);
      h[j][i] = h[i][j];
    }
  }
  return h;
}

std::optional<double> Expr::constant_value() const {
  if (node_->kind == NodeKind::Constant) return node_->value;
  return std::nullopt;
}

std::string Expr::to_string() const {
  std::string out;
  print(*node_, out);
  return out;
}

Expr Expr::with_dimension(int dimension) const {
  if (max_variable(*node_) > dimension) {
    throw InvalidArgument("expression uses a variable beyond dimension " + std::to_string(dimension));
  }
  return Expr(node_, dimension);
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(add(a.node_, b.node_), std::max(a.dim_, b.dim_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(sub(a.node_, b.node_), std::max(a.dim_, b.dim_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(mul(a.node_, b.node_), std::max(a.dim_, b.dim_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(div(a.node_, b.node_), std::max(a.dim_, b.dim_)); }
Expr operator-(const Expr& a) { return Expr(neg(a.node_), a.dim_); }
Expr pow(const Expr& base, int exponent) { return Expr(power(base.node_, exponent), base.dim_); }
Expr apply(UnaryFn fn, const Expr& arg) { return Expr(unary(fn, arg.node_), arg.dim_); }

Expr operator+(const Expr& a, double b) { return a + Expr::constant(b, a.dimension()); }
Expr operator*(double a, const Expr& b) { return Expr::constant(a, b.dimension()) * b; }

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

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
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept('-')) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * factor();
      } else if (accept('/')) {
        lhs = lhs / factor();
      } else {
        return lhs;
      }
    }
  }

  Expr factor() {
    skip_ws();
    if (accept('-')) return -factor();
    Expr base = atom();
    if (accept('^')) return pow(base, integer());
    return base;
  }

  int integer() {
    skip_ws();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    long value = 0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) {
      pos_ = start;
      fail("expected integer exponent");
    }
    pos_ += static_cast<std::size_t>(ptr - first);
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      fail("exponent must be an integer");
    }
    if (value > 1024) fail("exponent too large");
    return static_cast<int>(negative ? -value : value);
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("expected operand, found '") + c + "'");
  }

  Expr number() {
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::general);
    if (ec != std::errc() || ptr == first) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return Expr::constant(value, dim_);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    if (name == "x" && pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const char* first = text_.data() + pos_;
      int index = 0;
      auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), index);
      if (ec != std::errc()) throw ParseError("malformed variable index", start);
      pos_ += static_cast<std::size_t>(ptr - first);
      if (index < 1 || index > dim_) {
        throw ParseError("variable x" + std::to_string(index) + " outside x1..x" + std::to_string(dim_),
                         start);
      }
      return Expr::variable(index, dim_);
    }

    static constexpr std::pair<std::string_view, UnaryFn> functions[] = {
        {"sin", UnaryFn::Sin}, {"cos", UnaryFn::Cos}, {"exp", UnaryFn::Exp},
        {"log", UnaryFn::Log}, {"sqrt", UnaryFn::Sqrt}};
    for (const auto& [fname, fn] : functions) {
      if (name == fname) {
        expect('(');
        Expr arg = expr();
        expect(')');
        return apply(fn, arg);
      }
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, int dimension) {
  if (dimension < 1) throw InvalidArgument("dimension must be positive");
  return Parser(text, dimension).run();
}

}  // namespace sno
