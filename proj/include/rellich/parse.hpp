#pragma once

#include <cctype>
#include <cstdlib>
#include <string>
#include <vector>

#include "rellich/expr.hpp"

namespace rellich {

/// Recursive-descent parser for the expression syntax used in scenario files.
///
/// Grammar:
///   expr    := term (('+'|'-') term)*
///   term    := factor (('*'|'/') factor)*
///   factor  := unary ('^' factor)?        -- exponent must fold to a constant
///   unary   := '-' unary | primary
///   primary := number | name | name '(' expr ')' | '(' expr ')'
///
/// Names resolve against `vars` (e.g. "x1".."xn"); recognized functions are
/// exp, log, sin, cos, sinh, cosh, sqrt; "pi" is a constant.
class ExprParser {
public:
  ExprParser(std::string text, std::vector<std::string> vars)
      : text_(std::move(text)), vars_(std::move(vars)) {}

  Expr parse() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("expression parse error at column " + std::to_string(pos_ + 1) +
                     ": " + msg + " in \"" + text_ + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (eat('+')) e = add(e, parse_term());
      else if (eat('-')) e = sub(e, parse_term());
      else return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (eat('*')) e = mul(e, parse_factor());
      else if (eat('/')) e = div(e, parse_factor());
      else return e;
    }
  }

  Expr parse_factor() {
    Expr base = parse_unary();
    if (eat('^')) {
      Expr p = parse_factor(); // right-associative
      if (!is_constant(p)) fail("exponent must be a constant");
      return pow_expr(base, p->value);
    }
    return base;
  }

  Expr parse_unary() {
    if (eat('-')) return neg(parse_unary());
    return parse_primary();
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    if (eat('(')) {
      Expr e = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("invalid number");
    pos_ += static_cast<std::size_t>(end - begin);
    return constant(v);
  }

  Expr parse_name() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name = text_.substr(start, pos_ - start);

    if (peek() == '(') {
      eat('(');
      Expr arg = parse_expr();
      if (!eat(')')) fail("expected ')' after argument of " + name);
      if (name == "exp") return exp_expr(arg);
      if (name == "log") return log_expr(arg);
      if (name == "sin") return sin_expr(arg);
      if (name == "cos") return cos_expr(arg);
      if (name == "sinh") return sinh_expr(arg);
      if (name == "cosh") return cosh_expr(arg);
      if (name == "sqrt") return sqrt_expr(arg);
      fail("unknown function '" + name + "'");
    }

    if (name == "pi") return constant(3.14159265358979323846);
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return coordinate(static_cast<int>(i));
    fail("unknown name '" + name + "'");
  }

  std::string text_;
  std::vector<std::string> vars_;
  std::size_t pos_ = 0;
};

inline Expr parse_expr(const std::string& text, const std::vector<std::string>& vars) {
  return ExprParser(text, vars).parse();
}

/// Conventional chart variables x1..xn.
inline std::vector<std::string> chart_vars(int n) {
  std::vector<std::string> v;
  v.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
  return v;
}

inline Expr parse_expr(const std::string& text, int dim) {
  return parse_expr(text, chart_vars(dim));
}

} // namespace rellich
