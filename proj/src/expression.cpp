#include "quasipot/expression.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "quasipot/error.hpp"

namespace quasipot {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view lexeme;
  double number = 0.0;
};

constexpr std::size_t kMaxStack = 64;

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) return {Tok::End, start, {}};

    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(start);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      return {Tok::Ident, start, text_.substr(start, pos_ - start)};
    }
    ++pos_;
    switch (c) {
      case '+': return {Tok::Plus, start, text_.substr(start, 1)};
      case '-': return {Tok::Minus, start, text_.substr(start, 1)};
      case '*': return {Tok::Star, start, text_.substr(start, 1)};
      case '/': return {Tok::Slash, start, text_.substr(start, 1)};
      case '^': return {Tok::Caret, start, text_.substr(start, 1)};
      case '(': return {Tok::LParen, start, text_.substr(start, 1)};
      case ')': return {Tok::RParen, start, text_.substr(start, 1)};
      default: break;
    }
    throw ParseError(start, std::string("unknown character '") + c + "'");
  }

 private:
  Token number(std::size_t start) {
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
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        digits();
      else
        pos_ = save;
    }
    const std::string_view lexeme = text_.substr(start, pos_ - start);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
    if (ec != std::errc() || ptr != lexeme.data() + lexeme.size())
      throw ParseError(start, "malformed number '" + std::string(lexeme) + "'");
    return {Tok::Number, start, lexeme, value};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : lexer_(text) { advance(); }

  Expression run(std::string_view text) {
    parse_expr();
    if (cur_.kind != Tok::End) {
      if (cur_.kind == Tok::RParen) throw ParseError(cur_.offset, "unbalanced ')'");
      throw ParseError(cur_.offset, "unexpected '" + std::string(cur_.lexeme) + "' after expression");
    }
    out_.text_ = std::string(text);
    return std::move(out_);
  }

 private:
  using Op = Expression::Op;

  void advance() { cur_ = lexer_.next(); }

  void emit(Op op, double value = 0.0) {
    out_.code_.push_back({op, value});
    switch (op) {
      case Op::Const:
      case Op::Var: ++depth_; break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
      case Op::Pow: --depth_; break;
      default: break;
    }
    if (depth_ > out_.max_depth_) out_.max_depth_ = depth_;
    if (depth_ > kMaxStack) throw ParseError(cur_.offset, "expression nested too deeply");
  }

  void parse_expr() {
    parse_term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const Op op = cur_.kind == Tok::Plus ? Op::Add : Op::Sub;
      advance();
      parse_term();
      emit(op);
    }
  }

  void parse_term() {
    parse_unary();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const Op op = cur_.kind == Tok::Star ? Op::Mul : Op::Div;
      advance();
      parse_unary();
      emit(op);
    }
  }

  void parse_unary() {
    if (cur_.kind == Tok::Minus) {
      advance();
      parse_unary();
      emit(Op::Neg);
      return;
    }
    if (cur_.kind == Tok::Plus) {
      advance();
      parse_unary();
      return;
    }
    parse_power();
  }

  void parse_power() {
    parse_primary();
    if (cur_.kind == Tok::Caret) {
      advance();
      parse_unary();
      emit(Op::Pow);
    }
  }

  void parse_primary() {
    const Token tok = cur_;
    switch (tok.kind) {
      case Tok::Number:
        advance();
        emit(Op::Const, tok.number);
        return;
      case Tok::LParen:
        advance();
        parse_expr();
        expect_close(tok.offset);
        return;
      case Tok::Ident:
        parse_identifier(tok);
        return;
      case Tok::End:
        throw ParseError(tok.offset, "expected operand, found end of input");
      default:
        throw ParseError(tok.offset, "expected operand, found '" + std::string(tok.lexeme) + "'");
    }
  }

  void parse_identifier(const Token& tok) {
    advance();
    if (tok.lexeme == "x") {
      out_.uses_x_ = true;
      emit(Op::Var);
      return;
    }
    if (tok.lexeme == "pi") {
      emit(Op::Const, std::numbers::pi);
      return;
    }
    Op fn;
    if (tok.lexeme == "sin") fn = Op::Sin;
    else if (tok.lexeme == "cos") fn = Op::Cos;
    else if (tok.lexeme == "exp") fn = Op::Exp;
    else if (tok.lexeme == "abs") fn = Op::Abs;
    else throw ParseError(tok.offset, "unknown identifier '" + std::string(tok.lexeme) + "'");

    if (cur_.kind != Tok::LParen)
      throw ParseError(cur_.offset, "expected '(' after '" + std::string(tok.lexeme) + "'");
    const std::size_t open = cur_.offset;
    advance();
    parse_expr();
    expect_close(open);
    emit(fn);
  }

  void expect_close(std::size_t open_offset) {
    if (cur_.kind != Tok::RParen) {
      if (cur_.kind == Tok::End)
        throw ParseError(cur_.offset,
                         "unbalanced '(' opened at offset " + std::to_string(open_offset));
      throw ParseError(cur_.offset, "expected ')', found '" + std::string(cur_.lexeme) + "'");
    }
    advance();
  }

  Lexer lexer_;
  Token cur_{Tok::End, 0, {}};
  Expression out_;
  std::size_t depth_ = 0;
};

Expression Expression::parse(std::string_view text) {
  ExpressionParser parser(text);
  return parser.run(text);
}

double Expression::operator()(double x) const {
  std::array<double, kMaxStack> stack;
  std::size_t top = 0;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::Const: stack[top++] = in.value; break;
      case Op::Var: stack[top++] = x; break;
      case Op::Add: --top; stack[top - 1] += stack[top]; break;
      case Op::Sub: --top; stack[top - 1] -= stack[top]; break;
      case Op::Mul: --top; stack[top - 1] *= stack[top]; break;
      case Op::Div: --top; stack[top - 1] /= stack[top]; break;
      case Op::Pow: --top; stack[top - 1] = std::pow(stack[top - 1], stack[top]); break;
      case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
      case Op::Sin: stack[top - 1] = std::sin(stack[top - 1]); break;
      case Op::Cos: stack[top - 1] = std::cos(stack[top - 1]); break;
      case Op::Exp: stack[top - 1] = std::exp(stack[top - 1]); break;
      case Op::Abs: stack[top - 1] = std::fabs(stack[top - 1]); break;
    }
  }
  return stack[0];
}

}  // namespace quasipot
