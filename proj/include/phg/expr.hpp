#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "phg/dual.hpp"
#include "phg/errors.hpp"

namespace phg {

/// Expression DSL over coordinates x1..xn.
///
/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' integer)?
///   base   := number | 'x'digit+ | func '(' expr ')' | '(' expr ')'
///   func   in {sin, cos, exp, log, sqrt, tanh}
/// Whitespace-insensitive. Unary minus is accepted as a superset.
class ScalarExpr {
 public:
  ScalarExpr() = default;

  static ScalarExpr parse(const std::string& text) {
    Parser p{text, 0};
    ScalarExpr e;
    e.root_ = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) throw ParseError("unexpected trailing input", p.pos);
    e.text_ = text;
    return e;
  }

  const std::string& text() const { return text_; }
  bool empty() const { return !root_; }

  /// Highest coordinate index referenced (1-based), 0 if constant.
  int max_var() const { return root_ ? max_var(*root_) : 0; }

  template <class T>
  T eval(const std::vector<T>& coords) const {
    if (!root_) throw DomainError("empty expression");
    return eval_node<T>(*root_, coords);
  }

 private:
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Log, Sqrt, Tanh };

  struct Node {
    Kind kind;
    double value = 0;   // Const
    int var = 0;        // Var (1-based)
    int exponent = 0;   // Pow
    std::shared_ptr<Node> a, b;
  };

  std::shared_ptr<Node> root_;
  std::string text_;

  static int max_var(const Node& n) {
    int m = n.kind == Kind::Var ? n.var : 0;
    if (n.a) m = std::max(m, max_var(*n.a));
    if (n.b) m = std::max(m, max_var(*n.b));
    return m;
  }

  template <class T>
  static T eval_node(const Node& n, const std::vector<T>& c) {
    switch (n.kind) {
      case Kind::Const:
        return scalar_traits<T>::constant(n.value);
      case Kind::Var:
        if (n.var > static_cast<int>(c.size()))
          throw DomainError("coordinate x" + std::to_string(n.var) + " out of range");
        return c[n.var - 1];
      case Kind::Add:
        return eval_node<T>(*n.a, c) + eval_node<T>(*n.b, c);
      case Kind::Sub:
        return eval_node<T>(*n.a, c) - eval_node<T>(*n.b, c);
      case Kind::Mul:
        return eval_node<T>(*n.a, c) * eval_node<T>(*n.b, c);
      case Kind::Div: {
        T num = eval_node<T>(*n.a, c), den = eval_node<T>(*n.b, c);
        if (scalar_value(den) == 0.0) throw DomainError("division by zero");
        return num / den;
      }
      case Kind::Neg:
        return scalar_traits<T>::constant(0.0) - eval_node<T>(*n.a, c);
      case Kind::Pow: {
        T base = eval_node<T>(*n.a, c);
        int e = n.exponent;
        if (e < 0) {
          if (scalar_value(base) == 0.0) throw DomainError("zero raised to negative power");
          base = scalar_traits<T>::constant(1.0) / base;
          e = -e;
        }
        T r = scalar_traits<T>::constant(1.0);
        for (int i = 0; i < e; ++i) r = r * base;
        return r;
      }
      case Kind::Sin:
        return sin(eval_node<T>(*n.a, c));
      case Kind::Cos:
        return cos(eval_node<T>(*n.a, c));
      case Kind::Exp:
        return exp(eval_node<T>(*n.a, c));
      case Kind::Log: {
        T arg = eval_node<T>(*n.a, c);
        if (scalar_value(arg) <= 0.0) throw DomainError("log of non-positive argument");
        return log(arg);
      }
      case Kind::Sqrt: {
        T arg = eval_node<T>(*n.a, c);
        if (scalar_value(arg) < 0.0) throw DomainError("sqrt of negative argument");
        return sqrt(arg);
      }
      case Kind::Tanh:
        return tanh(eval_node<T>(*n.a, c));
    }
    throw DomainError("corrupt expression node");
  }

  struct Parser {
    const std::string& s;
    std::size_t pos;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool peek(char c) {
      skip_ws();
      return pos < s.size() && s[pos] == c;
    }
    bool eat(char c) {
      if (peek(c)) {
        ++pos;
        return true;
      }
      return false;
    }

    std::shared_ptr<Node> parse_expr() {
      bool neg = false;
      skip_ws();
      if (eat('-')) neg = true;
      auto n = parse_term();
      if (neg) {
        auto m = std::make_shared<Node>();
        m->kind = Kind::Neg;
        m->a = n;
        n = m;
      }
      for (;;) {
        if (eat('+')) {
          auto m = std::make_shared<Node>();
          m->kind = Kind::Add;
          m->a = n;
          m->b = parse_term();
          n = m;
        } else if (eat('-')) {
          auto m = std::make_shared<Node>();
          m->kind = Kind::Sub;
          m->a = n;
          m->b = parse_term();
          n = m;
        } else {
          return n;
        }
      }
    }

    std::shared_ptr<Node> parse_term() {
      auto n = parse_factor();
      for (;;) {
        if (eat('*')) {
          auto m = std::make_shared<Node>();
          m->kind = Kind::Mul;
          m->a = n;
          m->b = parse_factor();
          n = m;
        } else if (eat('/')) {
          auto m = std::make_shared<Node>();
          m->kind = Kind::Div;
          m->a = n;
          m->b = parse_factor();
          n = m;
        } else {
          return n;
        }
      }
    }

    std::shared_ptr<Node> parse_factor() {
      auto n = parse_base();
      if (eat('^')) {
        skip_ws();
        bool neg = eat('-');
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw ParseError("expected integer exponent", pos);
        int e = std::stoi(s.substr(start, pos - start));
        auto m = std::make_shared<Node>();
        m->kind = Kind::Pow;
        m->a = n;
        m->exponent = neg ? -e : e;
        return m;
      }
      return n;
    }

    std::shared_ptr<Node> parse_base() {
      skip_ws();
      if (pos >= s.size()) throw ParseError("unexpected end of expression", pos);
      char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
      if (c == '(') {
        ++pos;
        auto n = parse_expr();
        if (!eat(')')) throw ParseError("expected ')'", pos);
        return n;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = pos;
        while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
        std::string name = s.substr(start, pos - start);
        if (name == "x") {
          std::size_t dstart = pos;
          while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
          if (pos == dstart) throw ParseError("expected coordinate index after 'x'", pos);
          auto n = std::make_shared<Node>();
          n->kind = Kind::Var;
          n->var = std::stoi(s.substr(dstart, pos - dstart));
          if (n->var < 1) throw ParseError("coordinate index must be >= 1", dstart);
          return n;
        }
        Kind k;
        if (name == "sin") k = Kind::Sin;
        else if (name == "cos") k = Kind::Cos;
        else if (name == "exp") k = Kind::Exp;
        else if (name == "log") k = Kind::Log;
        else if (name == "sqrt") k = Kind::Sqrt;
        else if (name == "tanh") k = Kind::Tanh;
        else throw ParseError("unknown function '" + name + "'", start);
        if (!eat('(')) throw ParseError("expected '(' after function name", pos);
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->a = parse_expr();
        if (!eat(')')) throw ParseError("expected ')'", pos);
        return n;
      }
      throw ParseError(std::string("unexpected character '") + c + "'", pos);
    }

    std::shared_ptr<Node> parse_number() {
      std::size_t start = pos;
      while (pos < s.size() &&
             (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) ++pos;
      // scientific notation
      if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
        std::size_t save = pos;
        ++pos;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
        if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
          while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        } else {
          pos = save;
        }
      }
      try {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Const;
        n->value = std::stod(s.substr(start, pos - start));
        return n;
      } catch (const std::exception&) {
        throw ParseError("malformed number", start);
      }
    }
  };
};

}  // namespace phg
