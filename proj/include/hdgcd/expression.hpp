// A small arithmetic-expression evaluator for config-defined problem data.
// Grammar: + - * / ^ (right associative), parentheses, unary minus,
// variables x and y, constants pi and e, and the usual transcendentals.

#ifndef HDGCD_EXPRESSION_HPP
#define HDGCD_EXPRESSION_HPP

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

namespace hdgcd {

class Expression {
 public:
  /// Parses the expression; throws std::invalid_argument with a position
  /// marker on malformed input.
  explicit Expression(const std::string& text) : text_(text) {
    pos_ = 0;
    root_ = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
  }

  double operator()(double x, double y) const { return root_->eval(x, y); }

 private:
  struct Node {
    virtual ~Node() = default;
    virtual double eval(double x, double y) const = 0;
  };
  using NodePtr = std::unique_ptr<Node>;

  struct Constant : Node {
    double v;
    explicit Constant(double c) : v(c) {}
    double eval(double, double) const override { return v; }
  };
  struct Variable : Node {
    bool is_x;
    explicit Variable(bool x) : is_x(x) {}
    double eval(double x, double y) const override { return is_x ? x : y; }
  };
  struct Binary : Node {
    char op;
    NodePtr a, b;
    Binary(char o, NodePtr l, NodePtr r) : op(o), a(std::move(l)), b(std::move(r)) {}
    double eval(double x, double y) const override {
      const double u = a->eval(x, y), v = b->eval(x, y);
      switch (op) {
        case '+': return u + v;
        case '-': return u - v;
        case '*': return u * v;
        case '/': return u / v;
        default: return std::pow(u, v);
      }
    }
  };
  struct Unary : Node {
    std::function<double(double)> f;
    NodePtr a;
    Unary(std::function<double(double)> fn, NodePtr arg) : f(std::move(fn)), a(std::move(arg)) {}
    double eval(double x, double y) const override { return f(a->eval(x, y)); }
  };
  struct Binary2 : Node {
    std::function<double(double, double)> f;
    NodePtr a, b;
    Binary2(std::function<double(double, double)> fn, NodePtr l, NodePtr r)
        : f(std::move(fn)), a(std::move(l)), b(std::move(r)) {}
    double eval(double x, double y) const override {
      return f(a->eval(x, y), b->eval(x, y));
    }
  };

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression error at position " + std::to_string(pos_) + ": " +
                                what + " in '" + text_ + "'");
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_sum() {
    NodePtr node = parse_product();
    while (true) {
      if (consume('+'))
        node = std::make_unique<Binary>('+', std::move(node), parse_product());
      else if (consume('-'))
        node = std::make_unique<Binary>('-', std::move(node), parse_product());
      else
        return node;
    }
  }
  NodePtr parse_product() {
    NodePtr node = parse_power();
    while (true) {
      if (consume('*'))
        node = std::make_unique<Binary>('*', std::move(node), parse_power());
      else if (consume('/'))
        node = std::make_unique<Binary>('/', std::move(node), parse_power());
      else
        return node;
    }
  }
  NodePtr parse_power() {
    NodePtr base = parse_unary();
    if (consume('^')) return std::make_unique<Binary>('^', std::move(base), parse_power());
    return base;
  }
  NodePtr parse_unary() {
    if (consume('-'))
      return std::make_unique<Unary>([](double v) { return -v; }, parse_unary());
    if (consume('+')) return parse_unary();
    return parse_primary();
  }
  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      if (!consume(')')) fail("missing ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v;
      try {
        v = std::stod(text_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      return std::make_unique<Constant>(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string name = text_.substr(start, pos_ - start);
      if (name == "x") return std::make_unique<Variable>(true);
      if (name == "y") return std::make_unique<Variable>(false);
      if (name == "pi") return std::make_unique<Constant>(M_PI);
      if (name == "e") return std::make_unique<Constant>(M_E);
      if (!consume('(')) fail("unknown identifier '" + name + "'");
      NodePtr arg = parse_sum();
      if (name == "min" || name == "max" || name == "pow" || name == "atan2") {
        if (!consume(',')) fail("'" + name + "' needs two arguments");
        NodePtr arg2 = parse_sum();
        if (!consume(')')) fail("missing ')'");
        if (name == "min")
          return std::make_unique<Binary2>([](double a, double b) { return std::min(a, b); },
                                           std::move(arg), std::move(arg2));
        if (name == "max")
          return std::make_unique<Binary2>([](double a, double b) { return std::max(a, b); },
                                           std::move(arg), std::move(arg2));
        if (name == "pow")
          return std::make_unique<Binary2>([](double a, double b) { return std::pow(a, b); },
                                           std::move(arg), std::move(arg2));
        return std::make_unique<Binary2>([](double a, double b) { return std::atan2(a, b); },
                                         std::move(arg), std::move(arg2));
      }
      if (!consume(')')) fail("missing ')'");
      static const std::map<std::string, double (*)(double)> fns{
          {"sin", std::sin},   {"cos", std::cos},   {"tan", std::tan},  {"exp", std::exp},
          {"log", std::log},   {"sqrt", std::sqrt}, {"abs", std::fabs}, {"sinh", std::sinh},
          {"cosh", std::cosh}, {"tanh", std::tanh}, {"atan", std::atan}};
      const auto it = fns.find(name);
      if (it == fns.end()) fail("unknown function '" + name + "'");
      return std::make_unique<Unary>(it->second, std::move(arg));
    }
    fail("unexpected character");
  }

  std::string text_;
  size_t pos_ = 0;
  NodePtr root_;
};

/// Compiles an expression into a plain scalar field callable.
inline std::function<double(double, double)> compile_expression(const std::string& text) {
  auto expr = std::make_shared<Expression>(text);
  return [expr](double x, double y) { return (*expr)(x, y); };
}

}  // namespace hdgcd

#endif
