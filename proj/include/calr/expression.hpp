#pragma once

#include <memory>
#include <string>

namespace calr {

/// A compiled scalar expression in the single variable `r`.
///
/// Grammar: numbers, `r`, `pi`, binary `+ - * / ^`, unary minus, parentheses
/// and the functions sin, cos, tan, exp, log, sqrt, abs, tanh, cosh, sinh.
class Expression {
 public:
  explicit Expression(const std::string& text);

  double operator()(double r) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace calr
