#pragma once

#include "geopmp/common.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace geopmp::expr {

/// Syntax error; offset() is the byte offset into the source string.
class ParseError : public ArgumentError
{
public:
  ParseError(const std::string& what, std::size_t offset) : ArgumentError(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

class UndeclaredVariableError : public ArgumentError
{
public:
  UndeclaredVariableError(const std::string& name, std::size_t offset)
    : ArgumentError("undeclared variable '" + name + "' at offset " + std::to_string(offset)),
      name_(name)
  {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

enum class UnaryOp { Neg, Sin, Cos, Exp, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node
{
  enum class Kind { Constant, Variable, Unary, Binary };

  Kind kind;
  std::size_t offset = 0;  // source position, for diagnostics
  double value = 0.0;      // Constant
  std::string name;        // Variable
  std::size_t slot = 0;    // Variable: index into the declared variable list
  UnaryOp unary = UnaryOp::Neg;
  BinaryOp binary = BinaryOp::Add;
  NodePtr lhs;             // Unary operand, Binary left
  NodePtr rhs;             // Binary right
};

/**
 * Immutable arithmetic expression over a fixed, ordered list of declared
 * variables. Evaluation takes the variable values in declaration order.
 *
 * Grammar (lowest to highest precedence):
 *   sum     := product (('+' | '-') product)*
 *   product := signed (('*' | '/') signed)*
 *   signed  := ('-' | '+') signed | power
 *   power   := primary ('^' signed)?        right associative, constant exponent
 *   primary := number | name | func '(' sum ')' | '(' sum ')'
 *   func    := sin | cos | exp | sqrt
 */
class Expression
{
public:
  Expression(NodePtr root, std::vector<std::string> variables);

  double evaluate(std::span<const double> values) const;
  double evaluate(const std::map<std::string, double>& bindings) const;

  /// Fully parenthesized source that parses back to an equal tree.
  std::string to_string() const;

  const NodePtr& root() const noexcept { return root_; }
  const std::vector<std::string>& variables() const noexcept { return variables_; }

  /// Structural equality of the trees (variable names, not slots).
  friend bool operator==(const Expression& a, const Expression& b);

private:
  NodePtr root_;
  std::vector<std::string> variables_;
};

Expression parse(const std::string& source, const std::vector<std::string>& declared);

/// {prefix1, ..., prefixN}
std::vector<std::string> numbered_names(const std::string& prefix, int count);

}  // namespace geopmp::expr
