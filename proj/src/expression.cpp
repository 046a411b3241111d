#include "psweep/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "psweep/errors.hpp"

namespace psweep {

struct Expr::Node {
  enum class Op {
    Const,
    VarT,
    VarX1,
    VarX2,
    VarX3,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Sin,
    Cos,
    Exp,
    Abs,
    Min,
    Max
  };
  Op op = Op::Const;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;

  double eval(double t, double x1, double x2, double x3) const {
    switch (op) {
      case Op::Const: return value;
      case Op::VarT: return t;
      case Op::VarX1: return x1;
      case Op::VarX2: return x2;
      case Op::VarX3: return x3;
      case Op::Add: return a->eval(t, x1, x2, x3) + b->eval(t, x1, x2, x3);
      case Op::Sub: return a->eval(t, x1, x2, x3) - b->eval(t, x1, x2, x3);
      case Op::Mul: return a->eval(t, x1, x2, x3) * b->eval(t, x1, x2, x3);
      case Op::Div: return a->eval(t, x1, x2, x3) / b->eval(t, x1, x2, x3);
      case Op::Neg: return -a->eval(t, x1, x2, x3);
      case Op::Sin: return std::sin(a->eval(t, x1, x2, x3));
      case Op::Cos: return std::cos(a->eval(t, x1, x2, x3));
      case Op::Exp: return std::exp(a->eval(t, x1, x2, x3));
      case Op::Abs: return std::abs(a->eval(t, x1, x2, x3));
      case Op::Min:
        return std::min(a->eval(t, x1, x2, x3), b->eval(t, x1, x2, x3));
      case Op::Max:
        return std::max(a->eval(t, x1, x2, x3), b->eval(t, x1, x2, x3));
    }
    return 0.0;
  }
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

NodePtr make_const(double v) {
  Node n;
  n.op = Node::Op::Const;
  n.value = v;
  return make_node(std::move(n));
}

bool is_const_node(const NodePtr& n) {
  return n && n->op == Node::Op::Const;
}

// fold constant subtrees so that is_constant sees through "-0.1" etc.
NodePtr make_unary(Node::Op op, NodePtr a) {
  Node n;
  n.op = op;
  n.a = std::move(a);
  if (op != Node::Op::VarT && op != Node::Op::VarX1 &&
      op != Node::Op::VarX2 && op != Node::Op::VarX3 && is_const_node(n.a))
    return make_const(n.eval(0, 0, 0, 0));
  return make_node(std::move(n));
}

NodePtr make_binary(Node::Op op, NodePtr a, NodePtr b) {
  Node n;
  n.op = op;
  n.a = std::move(a);
  n.b = std::move(b);
  if (is_const_node(n.a) && is_const_node(n.b))
    return make_const(n.eval(0, 0, 0, 0));
  return make_node(std::move(n));
}

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != src_.size())
      fail("unexpected trailing input");
    return e;
  }

 private:
  const std::string& src_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression '" + src_ + "': " + what + " at position " +
                     std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace((unsigned char)src_[pos_])) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (consume('+'))
        lhs = make_binary(Node::Op::Add, lhs, term());
      else if (consume('-'))
        lhs = make_binary(Node::Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (consume('*'))
        lhs = make_binary(Node::Op::Mul, lhs, factor());
      else if (consume('/'))
        lhs = make_binary(Node::Op::Div, lhs, factor());
      else
        return lhs;
    }
  }

  NodePtr factor() {
    if (consume('-')) return make_unary(Node::Op::Neg, factor());
    if (consume('+')) return factor();
    return primary();
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("expected operand");
    const char c = src_[pos_];
    if (std::isdigit((unsigned char)c) || c == '.') return number();
    if (std::isalpha((unsigned char)c)) return ident();
    if (consume('(')) {
      NodePtr e = expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    fail("expected operand");
  }

  NodePtr number() {
    const char* begin = src_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("bad number");
    pos_ += size_t(end - begin);
    return make_const(v);
  }

  NodePtr ident() {
    const size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_'))
      ++pos_;
    const std::string name = src_.substr(start, pos_ - start);
    if (name == "t") return make_unary(Node::Op::VarT, nullptr);
    if (name == "x1") return make_unary(Node::Op::VarX1, nullptr);
    if (name == "x2") return make_unary(Node::Op::VarX2, nullptr);
    if (name == "x3") return make_unary(Node::Op::VarX3, nullptr);
    if (name == "pi") return make_const(3.14159265358979323846);

    auto unary = [&](Node::Op op) {
      if (!consume('(')) fail("expected '(' after " + name);
      NodePtr a = expr();
      if (!consume(')')) fail("expected ')'");
      return make_unary(op, a);
    };
    auto binary = [&](Node::Op op) {
      if (!consume('(')) fail("expected '(' after " + name);
      NodePtr a = expr();
      if (!consume(',')) fail("expected ',' in " + name);
      NodePtr b = expr();
      if (!consume(')')) fail("expected ')'");
      return make_binary(op, a, b);
    };
    if (name == "sin") return unary(Node::Op::Sin);
    if (name == "cos") return unary(Node::Op::Cos);
    if (name == "exp") return unary(Node::Op::Exp);
    if (name == "abs") return unary(Node::Op::Abs);
    if (name == "min") return binary(Node::Op::Min);
    if (name == "max") return binary(Node::Op::Max);
    pos_ = start;
    fail("unknown identifier '" + name + "'");
  }
};

}  // namespace

Expr::Expr() : root_(make_const(0.0)), src_("0") {}

Expr Expr::parse(const std::string& src) {
  Expr e;
  e.root_ = Parser(src).run();
  e.src_ = src;
  return e;
}

Expr Expr::constant(double value) {
  Expr e;
  e.root_ = make_const(value);
  e.src_ = std::to_string(value);
  return e;
}

double Expr::eval(double t, double x1, double x2, double x3) const {
  return root_->eval(t, x1, x2, x3);
}

bool Expr::is_constant(double* value) const {
  if (root_->op != Node::Op::Const) return false;
  if (value) *value = root_->value;
  return true;
}

}  // namespace psweep
