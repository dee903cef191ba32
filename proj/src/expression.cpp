#include "calr/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

#include "calr/errors.hpp"

namespace calr {

struct Expression::Node {
  enum class Kind { Number, Variable, Unary, Binary, Call } kind;
  double value = 0.0;
  char op = 0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(double r) const {
    switch (kind) {
      case Kind::Number:
        return value;
      case Kind::Variable:
        return r;
      case Kind::Unary:
        return -lhs->eval(r);
      case Kind::Call:
        return fn(lhs->eval(r));
      case Kind::Binary: {
        const double a = lhs->eval(r);
        const double b = rhs->eval(r);
        switch (op) {
          case '+': return a + b;
          case '-': return a - b;
          case '*': return a * b;
          case '/': return a / b;
          default: return std::pow(a, b);
        }
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

const std::map<std::string, double (*)(double)>& functions() {
  static const std::map<std::string, double (*)(double)> table = {
      {"sin", [](double x) { return std::sin(x); }},
      {"cos", [](double x) { return std::cos(x); }},
      {"tan", [](double x) { return std::tan(x); }},
      {"exp", [](double x) { return std::exp(x); }},
      {"log", [](double x) { return std::log(x); }},
      {"sqrt", [](double x) { return std::sqrt(x); }},
      {"abs", [](double x) { return std::abs(x); }},
      {"tanh", [](double x) { return std::tanh(x); }},
      {"cosh", [](double x) { return std::cosh(x); }},
      {"sinh", [](double x) { return std::sinh(x); }},
  };
  return table;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError("expression '" + s_ + "': " + msg + " at offset " +
                          std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodePtr binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::Binary;
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }
  NodePtr sum() {
    NodePtr n = product();
    for (;;) {
      if (accept('+')) n = binary('+', n, product());
      else if (accept('-')) n = binary('-', n, product());
      else return n;
    }
  }
  NodePtr product() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = binary('*', n, unary());
      else if (accept('/')) n = binary('/', n, unary());
      else return n;
    }
  }
  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Unary;
      n->lhs = unary();
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return binary('^', base, unary());  // right associative
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (accept('(')) {
      NodePtr n = sum();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Number;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      auto n = std::make_shared<Expression::Node>();
      if (name == "r") {
        n->kind = Kind::Variable;
        return n;
      }
      if (name == "pi") {
        n->kind = Kind::Number;
        n->value = std::numbers::pi;
        return n;
      }
      const auto it = functions().find(name);
      if (it == functions().end()) fail("unknown identifier '" + name + "'");
      if (!accept('(')) fail("expected '(' after " + name);
      n->kind = Kind::Call;
      n->fn = it->second;
      n->lhs = sum();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    fail("unexpected character");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& text) : text_(text), root_(Parser(text).parse()) {}

double Expression::operator()(double r) const { return root_->eval(r); }

}  // namespace calr
