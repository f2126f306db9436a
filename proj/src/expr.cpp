#include "geopmp/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace geopmp::expr {

namespace {

NodePtr make_constant(double v, std::size_t offset)
{
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Constant;
  n->value = v;
  n->offset = offset;
  return n;
}

NodePtr make_unary(UnaryOp op, NodePtr child, std::size_t offset)
{
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Unary;
  n->unary = op;
  n->lhs = std::move(child);
  n->offset = offset;
  return n;
}

NodePtr make_binary(BinaryOp op, NodePtr l, NodePtr r, std::size_t offset)
{
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Binary;
  n->binary = op;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  n->offset = offset;
  return n;
}

bool has_variables(const Node& n)
{
  switch (n.kind) {
    case Node::Kind::Constant: return false;
    case Node::Kind::Variable: return true;
    case Node::Kind::Unary: return has_variables(*n.lhs);
    case Node::Kind::Binary: return has_variables(*n.lhs) || has_variables(*n.rhs);
  }
  return true;
}

[[noreturn]] void eval_fail(const Node& n, const std::string& what)
{
  throw EvaluationError("expression evaluation: " + what + " at offset " +
                        std::to_string(n.offset));
}

double eval(const Node& n, std::span<const double> values)
{
  switch (n.kind) {
    case Node::Kind::Constant: return n.value;
    case Node::Kind::Variable: return values[n.slot];
    case Node::Kind::Unary: {
      const double a = eval(*n.lhs, values);
      switch (n.unary) {
        case UnaryOp::Neg: return -a;
        case UnaryOp::Sin: return std::sin(a);
        case UnaryOp::Cos: return std::cos(a);
        case UnaryOp::Exp: {
          const double r = std::exp(a);
          if (!std::isfinite(r)) eval_fail(n, "exp overflow");
          return r;
        }
        case UnaryOp::Sqrt:
          if (a < 0.0) eval_fail(n, "sqrt of negative value");
          return std::sqrt(a);
      }
      break;
    }
    case Node::Kind::Binary: {
      const double a = eval(*n.lhs, values);
      const double b = eval(*n.rhs, values);
      switch (n.binary) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div:
          if (b == 0.0) eval_fail(n, "division by zero");
          return a / b;
        case BinaryOp::Pow: {
          if (b == 2.0) return a * a;
          const double r = std::pow(a, b);
          if (!std::isfinite(r)) eval_fail(n, "power outside its domain");
          return r;
        }
      }
      break;
    }
  }
  eval_fail(n, "corrupt expression node");
}

std::string format_number(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (v < 0.0) return "(" + s + ")";
  return s;
}

void print(const Node& n, std::ostringstream& os)
{
  switch (n.kind) {
    case Node::Kind::Constant: os << format_number(n.value); return;
    case Node::Kind::Variable: os << n.name; return;
    case Node::Kind::Unary:
      switch (n.unary) {
        case UnaryOp::Neg: os << "(-"; break;
        case UnaryOp::Sin: os << "sin("; break;
        case UnaryOp::Cos: os << "cos("; break;
        case UnaryOp::Exp: os << "exp("; break;
        case UnaryOp::Sqrt: os << "sqrt("; break;
      }
      print(*n.lhs, os);
      os << ')';
      return;
    case Node::Kind::Binary: {
      static constexpr const char* ops[] = {"+", "-", "*", "/", "^"};
      os << '(';
      print(*n.lhs, os);
      os << ' ' << ops[static_cast<int>(n.binary)] << ' ';
      print(*n.rhs, os);
      os << ')';
      return;
    }
  }
}

bool uses_slot(const Node& n, std::size_t slot)
{
  switch (n.kind) {
    case Node::Kind::Constant: return false;
    case Node::Kind::Variable: return n.slot == slot;
    case Node::Kind::Unary: return uses_slot(*n.lhs, slot);
    case Node::Kind::Binary: return uses_slot(*n.lhs, slot) || uses_slot(*n.rhs, slot);
  }
  return false;
}

bool equal(const Node& a, const Node& b)
{
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Node::Kind::Constant: return a.value == b.value;
    case Node::Kind::Variable: return a.name == b.name;
    case Node::Kind::Unary: return a.unary == b.unary && equal(*a.lhs, *b.lhs);
    case Node::Kind::Binary:
      return a.binary == b.binary && equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
  }
  return false;
}

class Parser
{
public:
  Parser(const std::string& src, const std::vector<std::string>& declared)
    : src_(src), declared_(declared)
  {}

  NodePtr run()
  {
    skip_ws();
    if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
    auto root = sum();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return root;
  }

private:
  [[noreturn]] void fail(const std::string& what) const
  {
    throw ParseError(what + " at offset " + std::to_string(pos_), pos_);
  }

  void skip_ws()
  {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c)
  {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c)
  {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr sum()
  {
    auto lhs = product();
    for (;;) {
      skip_ws();
      const auto at = pos_;
      if (accept('+')) {
        lhs = make_binary(BinaryOp::Add, lhs, product(), at);
      } else if (accept('-')) {
        lhs = make_binary(BinaryOp::Sub, lhs, product(), at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr product()
  {
    auto lhs = signed_term();
    for (;;) {
      skip_ws();
      const auto at = pos_;
      if (accept('*')) {
        lhs = make_binary(BinaryOp::Mul, lhs, signed_term(), at);
      } else if (accept('/')) {
        lhs = make_binary(BinaryOp::Div, lhs, signed_term(), at);
      } else {
        return lhs;
      }
    }
  }

  NodePtr signed_term()
  {
    skip_ws();
    const auto at = pos_;
    if (accept('-')) return make_unary(UnaryOp::Neg, signed_term(), at);
    if (accept('+')) return signed_term();
    return power();
  }

  NodePtr power()
  {
    auto base = primary();
    skip_ws();
    const auto at = pos_;
    if (!accept('^')) return base;
    auto exponent = signed_term();
    if (has_variables(*exponent)) {
      throw ParseError("exponent must be a constant at offset " + std::to_string(exponent->offset),
                       exponent->offset);
    }
    const double e = eval(*exponent, {});
    return make_binary(BinaryOp::Pow, base, make_constant(e, exponent->offset), at);
  }

  NodePtr primary()
  {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const auto at = pos_;
    const char ch = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string name;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '_')) {
        name.push_back(src_[pos_++]);
      }
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == '(') {
        UnaryOp op;
        if (name == "sin") op = UnaryOp::Sin;
        else if (name == "cos") op = UnaryOp::Cos;
        else if (name == "exp") op = UnaryOp::Exp;
        else if (name == "sqrt") op = UnaryOp::Sqrt;
        else throw ParseError("unknown function '" + name + "' at offset " + std::to_string(at), at);
        expect('(');
        auto arg = sum();
        expect(')');
        return make_unary(op, arg, at);
      }
      const auto it = std::find(declared_.begin(), declared_.end(), name);
      if (it == declared_.end()) throw UndeclaredVariableError(name, at);
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Variable;
      n->name = name;
      n->slot = static_cast<std::size_t>(it - declared_.begin());
      n->offset = at;
      return n;
    }
    if (accept('(')) {
      auto inner = sum();
      expect(')');
      return inner;
    }
    fail("unexpected character '" + std::string(1, ch) + "'");
  }

  NodePtr number()
  {
    const auto at = pos_;
    const char* begin = src_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    if (!std::isfinite(v)) throw ParseError("number out of range at offset " + std::to_string(at), at);
    return make_constant(v, at);
  }

  const std::string& src_;
  const std::vector<std::string>& declared_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(NodePtr root, std::vector<std::string> variables)
  : root_(std::move(root)), variables_(std::move(variables))
{}

double Expression::evaluate(std::span<const double> values) const
{
  if (values.size() != variables_.size()) {
    throw ArgumentError("expression evaluation: expected " + std::to_string(variables_.size()) +
                        " variable values, got " + std::to_string(values.size()));
  }
  return eval(*root_, values);
}

double Expression::evaluate(const std::map<std::string, double>& bindings) const
{
  std::vector<double> values(variables_.size(), 0.0);
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto it = bindings.find(variables_[i]);
    if (it != bindings.end()) {
      values[i] = it->second;
    } else if (uses_slot(*root_, i)) {
      throw ArgumentError("expression evaluation: variable '" + variables_[i] + "' is unbound");
    }
  }
  return eval(*root_, values);
}

std::string Expression::to_string() const
{
  std::ostringstream os;
  print(*root_, os);
  return os.str();
}

bool operator==(const Expression& a, const Expression& b)
{
  return equal(*a.root_, *b.root_);
}

Expression parse(const std::string& source, const std::vector<std::string>& declared)
{
  Parser p(source, declared);
  return Expression(p.run(), declared);
}

std::vector<std::string> numbered_names(const std::string& prefix, int count)
{
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace geopmp::expr
