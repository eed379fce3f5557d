#include "sievelab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <vector>

#include "sievelab/util.hpp"

namespace sievelab {

namespace {

struct Node {
  enum class Op { Const, X, Y, Add, Sub, Mul, Div, Pow, Neg, Fun } op;
  double value = 0.0;
  double (*fun)(double) = nullptr;
  std::unique_ptr<Node> lhs, rhs;

  double eval(double x, double y) const {
    switch (op) {
      case Op::Const: return value;
      case Op::X: return x;
      case Op::Y: return y;
      case Op::Add: return lhs->eval(x, y) + rhs->eval(x, y);
      case Op::Sub: return lhs->eval(x, y) - rhs->eval(x, y);
      case Op::Mul: return lhs->eval(x, y) * rhs->eval(x, y);
      case Op::Div: return lhs->eval(x, y) / rhs->eval(x, y);
      case Op::Pow: return std::pow(lhs->eval(x, y), rhs->eval(x, y));
      case Op::Neg: return -lhs->eval(x, y);
      case Op::Fun: return fun(lhs->eval(x, y));
    }
    return 0.0;
  }
};

double step_fn(double t) { return t > 0.0 ? 1.0 : 0.0; }

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw ConfigError(strfmt("expression error at position %zu: %s", pos, what.c_str()));
  }

  std::unique_ptr<Node> parse() {
    auto n = expr();
    skip();
    if (pos != s.size()) fail("trailing input");
    return n;
  }

  std::unique_ptr<Node> expr() {
    auto n = term();
    for (;;) {
      if (eat('+')) {
        auto r = term();
        auto m = std::make_unique<Node>();
        m->op = Node::Op::Add;
        m->lhs = std::move(n);
        m->rhs = std::move(r);
        n = std::move(m);
      } else if (eat('-')) {
        auto r = term();
        auto m = std::make_unique<Node>();
        m->op = Node::Op::Sub;
        m->lhs = std::move(n);
        m->rhs = std::move(r);
        n = std::move(m);
      } else {
        return n;
      }
    }
  }

  std::unique_ptr<Node> term() {
    auto n = factor();
    for (;;) {
      if (eat('*')) {
        auto r = factor();
        auto m = std::make_unique<Node>();
        m->op = Node::Op::Mul;
        m->lhs = std::move(n);
        m->rhs = std::move(r);
        n = std::move(m);
      } else if (eat('/')) {
        auto r = factor();
        auto m = std::make_unique<Node>();
        m->op = Node::Op::Div;
        m->lhs = std::move(n);
        m->rhs = std::move(r);
        n = std::move(m);
      } else {
        return n;
      }
    }
  }

  // unary minus binds looser than '^': -x^2 is -(x^2), x^-2 is x^(-2)
  std::unique_ptr<Node> factor() {
    if (eat('-')) {
      auto m = std::make_unique<Node>();
      m->op = Node::Op::Neg;
      m->lhs = factor();
      return m;
    }
    return power();
  }

  std::unique_ptr<Node> power() {
    auto n = primary();
    if (eat('^')) {  // right associative
      auto r = factor();
      auto m = std::make_unique<Node>();
      m->op = Node::Op::Pow;
      m->lhs = std::move(n);
      m->rhs = std::move(r);
      return m;
    }
    return n;
  }

  std::unique_ptr<Node> primary() {
    skip();
    if (pos >= s.size()) fail("unexpected end of input");
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s.c_str() + pos;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos += static_cast<std::size_t>(end - begin);
      auto m = std::make_unique<Node>();
      m->op = Node::Op::Const;
      m->value = v;
      return m;
    }
    if (c == '(') {
      ++pos;
      auto n = expr();
      if (!eat(')')) fail("missing ')'");
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos;
      while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
      std::string name = s.substr(start, pos - start);
      if (name == "x" || name == "y") {
        auto m = std::make_unique<Node>();
        m->op = name == "x" ? Node::Op::X : Node::Op::Y;
        return m;
      }
      static const std::vector<std::pair<std::string, double (*)(double)>> funs = {
          {"sin", std::sin}, {"cos", std::cos}, {"tan", std::tan},   {"exp", std::exp},
          {"log", std::log}, {"abs", std::fabs}, {"sqrt", std::sqrt}, {"step", step_fn},
      };
      for (const auto& [fname, f] : funs)
        if (name == fname) {
          if (!eat('(')) fail("expected '(' after function name");
          auto m = std::make_unique<Node>();
          m->op = Node::Op::Fun;
          m->fun = f;
          m->lhs = expr();
          if (!eat(')')) fail("missing ')'");
          return m;
        }
      fail("unknown identifier '" + name + "'");
    }
    fail(strfmt("unexpected character '%c'", c));
  }
};

}  // namespace

std::function<double(double, double)> compile_expr(const std::string& text) {
  Parser p(text);
  std::shared_ptr<Node> root{p.parse().release()};
  return [root](double x, double y) { return root->eval(x, y); };
}

}  // namespace sievelab
