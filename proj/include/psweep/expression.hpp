#ifndef PSWEEP_EXPRESSION_HPP
#define PSWEEP_EXPRESSION_HPP

#include <memory>
#include <string>

namespace psweep {

//! Parsed arithmetic expression in the variables (t, x1, x2, x3).
//!
//! Grammar: +, -, *, /, unary minus, parentheses, numeric literals and the
//! functions sin, cos, exp, abs, min, max.  Parsing throws ParseError with
//! the offending position.
class Expr {
 public:
  Expr();  // constant zero
  static Expr parse(const std::string& src);
  static Expr constant(double value);

  double eval(double t, double x1, double x2, double x3) const;
  double eval_t(double t) const { return eval(t, 0, 0, 0); }
  const std::string& source() const { return src_; }
  bool is_constant(double* value = nullptr) const;

  struct Node;  // exposed for the parser implementation

 private:
  std::shared_ptr<const Node> root_;
  std::string src_;
};

}  // namespace psweep

#endif
