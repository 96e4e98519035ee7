#include "coxarith/expr.hpp"

#include <cctype>

namespace cox {

namespace {

class Parser {
 public:
  Parser(const std::string& text, TowerPtr& tower, int line)
      : text_(text), tower_(tower), line_(line) {}

  TowerElement run() {
    skip_ws();
    TowerElement e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_, static_cast<int>(pos_) + 1, msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
      ++pos_;
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

  TowerElement expr() {
    TowerElement e = term();
    for (;;) {
      if (eat('+'))
        e += term();
      else if (eat('-'))
        e -= term();
      else
        return e;
    }
  }

  TowerElement term() {
    TowerElement e = factor();
    for (;;) {
      if (eat('*')) {
        e *= factor();
      } else if (eat('/')) {
        size_t at = pos_;
        TowerElement d = factor();
        if (d.is_zero()) {
          pos_ = at;
          fail("division by zero");
        }
        e /= d;
      } else {
        return e;
      }
    }
  }

  TowerElement factor() {
    char c = peek();
    if (c == '-') {
      ++pos_;
      return -factor();
    }
    if (c == '(') {
      ++pos_;
      TowerElement e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return integer();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t at = pos_;
      std::string word;
      while (pos_ < text_.size() &&
             std::isalpha(static_cast<unsigned char>(text_[pos_])))
        word += text_[pos_++];
      if (word != "sqrt") {
        pos_ = at;
        fail("unknown name '" + word + "'");
      }
      if (!eat('(')) fail("expected '(' after sqrt");
      TowerElement arg = expr();
      if (!eat(')')) fail("expected ')'");
      if (arg.is_zero()) return TowerElement::rational(Rat(0), tower_);
      arg = arg.promoted(tower_);
      if (sign_of(arg) < 0) {
        pos_ = at;
        fail("sqrt of a negative value");
      }
      auto [ext, root] = adjoin_sqrt(tower_, arg);
      tower_ = ext;
      return root;
    }
    if (c == '\0') fail("unexpected end of expression");
    fail(std::string("unexpected character '") + c + "'");
  }

  TowerElement integer() {
    std::string digits;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      digits += text_[pos_++];
    return TowerElement::rational(Rat(Int(digits)), tower_);
  }

  const std::string& text_;
  TowerPtr& tower_;
  int line_;
  size_t pos_ = 0;
};

}  // namespace

TowerElement parse_expr(const std::string& text, TowerPtr& tower, int line) {
  return Parser(text, tower, line).run();
}

}  // namespace cox
