#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace quasipot {

// Arithmetic expression in the single variable `x`, compiled to postfix
// code by a recursive-descent parser.
//
// Grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | 'x' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func    := 'sin' | 'cos' | 'exp' | 'abs'
class Expression {
 public:
  /// Throws ParseError carrying the byte offset of the offending token.
  static Expression parse(std::string_view text);

  /// Evaluates at x as written (no periodic wrapping).
  double operator()(double x) const;

  const std::string& text() const noexcept { return text_; }
  bool uses_variable() const noexcept { return uses_x_; }

 private:
  enum class Op : std::uint8_t {
    Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Abs
  };
  struct Instr {
    Op op;
    double value;
  };

  friend class ExpressionParser;

  std::vector<Instr> code_;
  std::string text_;
  std::size_t max_depth_ = 0;
  bool uses_x_ = false;
};

}  // namespace quasipot
