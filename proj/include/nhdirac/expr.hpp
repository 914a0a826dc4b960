#pragma once

// Scalar expressions of (x, t) and named parameters. Used for user-defined
// metric functions alpha(x, t) and beta(x, t).
//
// Grammar (lowest to highest precedence):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | name | name '(' expr ')' | '(' expr ')'
// so -x^2 is -(x^2) and 2^-1 is 2^(-1).

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "errors.hpp"

namespace nhdirac::expr {

enum class Var { x, t };
enum class BinaryOp { add, sub, mul, div, pow };
enum class Func { exp, log, sqrt, sin, cos, cosh, sinh, tanh, abs };

struct Node;
using Ast = std::shared_ptr<const Node>;
using ParamMap = std::map<std::string, double, std::less<>>;

struct Literal {
  double value;
};
struct Variable {
  Var var;
};
struct Parameter {
  std::string name;
};
struct Negate {
  Ast operand;
};
struct Binary {
  BinaryOp op;
  Ast lhs, rhs;
};
struct Call {
  Func func;
  Ast arg;
};

struct Node {
  std::variant<Literal, Variable, Parameter, Negate, Binary, Call> value;
};

inline Ast literal(double v) { return std::make_shared<const Node>(Node{Literal{v}}); }
inline Ast variable(Var v) { return std::make_shared<const Node>(Node{Variable{v}}); }
inline Ast parameter(std::string name) { return std::make_shared<const Node>(Node{Parameter{std::move(name)}}); }
inline Ast negate(Ast a) { return std::make_shared<const Node>(Node{Negate{std::move(a)}}); }
inline Ast binary(BinaryOp op, Ast l, Ast r) {
  return std::make_shared<const Node>(Node{Binary{op, std::move(l), std::move(r)}});
}
inline Ast call(Func f, Ast a) { return std::make_shared<const Node>(Node{Call{f, std::move(a)}}); }

inline constexpr std::array<std::pair<std::string_view, Func>, 9> kFunctions{{
    {"exp", Func::exp},
    {"log", Func::log},
    {"sqrt", Func::sqrt},
    {"sin", Func::sin},
    {"cos", Func::cos},
    {"cosh", Func::cosh},
    {"sinh", Func::sinh},
    {"tanh", Func::tanh},
    {"abs", Func::abs},
}};

inline std::string_view function_name(Func f) {
  for (const auto& [name, fn] : kFunctions)
    if (fn == f) return name;
  return "?";
}

inline bool structurally_equal(const Ast& a, const Ast& b) {
  if (a == b) return true;
  if (!a || !b || a->value.index() != b->value.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b->value);
        if constexpr (std::is_same_v<T, Literal>) {
          return lhs.value == rhs.value;
        } else if constexpr (std::is_same_v<T, Variable>) {
          return lhs.var == rhs.var;
        } else if constexpr (std::is_same_v<T, Parameter>) {
          return lhs.name == rhs.name;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return structurally_equal(lhs.operand, rhs.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return lhs.op == rhs.op && structurally_equal(lhs.lhs, rhs.lhs) && structurally_equal(lhs.rhs, rhs.rhs);
        } else {
          return lhs.func == rhs.func && structurally_equal(lhs.arg, rhs.arg);
        }
      },
      a->value);
}

namespace detail {

inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

inline char op_char(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return '+';
    case BinaryOp::sub: return '-';
    case BinaryOp::mul: return '*';
    case BinaryOp::div: return '/';
    case BinaryOp::pow: return '^';
  }
  return '?';
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Ast parse() {
    skip_space();
    if (pos_ == src_.size()) throw syntax_error(pos_, "expression");
    Ast e = parse_expr();
    skip_space();
    if (pos_ != src_.size()) throw syntax_error(pos_, "operator or end of input");
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw syntax_error(pos_, std::string("'") + c + "'");
  }

  Ast parse_expr() {
    Ast lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(BinaryOp::add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = binary(BinaryOp::sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  Ast parse_term() {
    Ast lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(BinaryOp::mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = binary(BinaryOp::div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Ast parse_unary() {
    if (accept('-')) return negate(parse_unary());
    return parse_power();
  }

  Ast parse_power() {
    Ast base = parse_primary();
    if (accept('^')) return binary(BinaryOp::pow, base, parse_unary());
    return base;
  }

  Ast parse_primary() {
    skip_space();
    if (pos_ == src_.size()) throw syntax_error(pos_, "operand");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Ast inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    throw syntax_error(pos_, "operand");
  }

  Ast parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t n = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw syntax_error(start, "number");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;  // "2e" is 2 followed by a name
    }
    double v = 0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc{} || res.ptr != src_.data() + pos_) throw syntax_error(start, "number");
    return literal(v);
  }

  Ast parse_name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    for (const auto& [fname, fn] : kFunctions) {
      if (name == fname) {
        expect('(');
        Ast arg = parse_expr();
        expect(')');
        return call(fn, arg);
      }
    }
    if (name == "x") return variable(Var::x);
    if (name == "t") return variable(Var::t);
    return parameter(std::string(name));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

inline double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw evaluation_error(std::string("non-finite result in ") + what);
  return v;
}

}  // namespace detail

inline Ast parse(std::string_view source) { return detail::Parser(source).parse(); }

// Fully parenthesised rendering; parse(to_string(a)) is structurally equal to a
// for any tree with nonnegative finite literals.
inline std::string to_string(const Ast& a) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Literal>) {
          return detail::format_number(n.value);
        } else if constexpr (std::is_same_v<T, Variable>) {
          return n.var == Var::x ? "x" : "t";
        } else if constexpr (std::is_same_v<T, Parameter>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return "(-" + to_string(n.operand) + ")";
        } else if constexpr (std::is_same_v<T, Binary>) {
          return "(" + to_string(n.lhs) + " " + detail::op_char(n.op) + " " + to_string(n.rhs) + ")";
        } else {
          return std::string(function_name(n.func)) + "(" + to_string(n.arg) + ")";
        }
      },
      a->value);
}

inline void collect_parameters(const Ast& a, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Parameter>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, Negate>) {
          collect_parameters(n.operand, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          collect_parameters(n.lhs, out);
          collect_parameters(n.rhs, out);
        } else if constexpr (std::is_same_v<T, Call>) {
          collect_parameters(n.arg, out);
        }
      },
      a->value);
}

inline std::set<std::string> parameters(const Ast& a) {
  std::set<std::string> out;
  collect_parameters(a, out);
  return out;
}

inline bool depends_on_t(const Ast& a) {
  return std::visit(
      [](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Variable>) {
          return n.var == Var::t;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return depends_on_t(n.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return depends_on_t(n.lhs) || depends_on_t(n.rhs);
        } else if constexpr (std::is_same_v<T, Call>) {
          return depends_on_t(n.arg);
        } else {
          return false;
        }
      },
      a->value);
}

inline double eval(const Ast& a, double x, double t, const ParamMap& params) {
  using detail::checked;
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Literal>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, Variable>) {
          return n.var == Var::x ? x : t;
        } else if constexpr (std::is_same_v<T, Parameter>) {
          auto it = params.find(n.name);
          if (it == params.end()) throw evaluation_error("unbound parameter '" + n.name + "'");
          return it->second;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return -eval(n.operand, x, t, params);
        } else if constexpr (std::is_same_v<T, Binary>) {
          const double l = eval(n.lhs, x, t, params);
          const double r = eval(n.rhs, x, t, params);
          switch (n.op) {
            case BinaryOp::add: return checked(l + r, "+");
            case BinaryOp::sub: return checked(l - r, "-");
            case BinaryOp::mul: return checked(l * r, "*");
            case BinaryOp::div:
              if (r == 0.0) throw evaluation_error("division by zero");
              return checked(l / r, "/");
            case BinaryOp::pow:
              if (l < 0.0 && r != std::trunc(r))
                throw evaluation_error("negative base with non-integer exponent");
              if (l == 0.0 && r < 0.0) throw evaluation_error("zero raised to a negative power");
              return checked(std::pow(l, r), "^");
          }
          return 0.0;
        } else {
          const double v = eval(n.arg, x, t, params);
          switch (n.func) {
            case Func::exp: return checked(std::exp(v), "exp");
            case Func::log:
              if (v <= 0.0) throw evaluation_error("log of non-positive argument");
              return std::log(v);
            case Func::sqrt:
              if (v < 0.0) throw evaluation_error("sqrt of negative argument");
              return std::sqrt(v);
            case Func::sin: return std::sin(v);
            case Func::cos: return std::cos(v);
            case Func::cosh: return checked(std::cosh(v), "cosh");
            case Func::sinh: return checked(std::sinh(v), "sinh");
            case Func::tanh: return std::tanh(v);
            case Func::abs: return std::abs(v);
          }
          return 0.0;
        }
      },
      a->value);
}

namespace detail {

inline bool is_literal(const Ast& a, double v) {
  const auto* lit = std::get_if<Literal>(&a->value);
  return lit && lit->value == v;
}

// Builders that drop additive zeros and multiplicative ones, nothing more.
inline Ast add(Ast a, Ast b) {
  if (is_literal(a, 0)) return b;
  if (is_literal(b, 0)) return a;
  return binary(BinaryOp::add, a, b);
}
inline Ast sub(Ast a, Ast b) {
  if (is_literal(b, 0)) return a;
  if (is_literal(a, 0)) return negate(b);
  return binary(BinaryOp::sub, a, b);
}
inline Ast mul(Ast a, Ast b) {
  if (is_literal(a, 0) || is_literal(b, 0)) return literal(0);
  if (is_literal(a, 1)) return b;
  if (is_literal(b, 1)) return a;
  return binary(BinaryOp::mul, a, b);
}
inline Ast div(Ast a, Ast b) {
  if (is_literal(a, 0)) return literal(0);
  if (is_literal(b, 1)) return a;
  return binary(BinaryOp::div, a, b);
}
inline Ast neg(Ast a) {
  if (is_literal(a, 0)) return a;
  return negate(a);
}

}  // namespace detail

// Symbolic d/dt. Subtrees without t differentiate to the literal 0, so abs() is
// only rejected when its argument actually depends on t.
inline Ast diff_t(const Ast& a) {
  using namespace detail;
  if (!depends_on_t(a)) return literal(0);
  return std::visit(
      [&](const auto& n) -> Ast {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Variable>) {
          return literal(1);
        } else if constexpr (std::is_same_v<T, Negate>) {
          return neg(diff_t(n.operand));
        } else if constexpr (std::is_same_v<T, Binary>) {
          const Ast& u = n.lhs;
          const Ast& v = n.rhs;
          switch (n.op) {
            case BinaryOp::add: return add(diff_t(u), diff_t(v));
            case BinaryOp::sub: return sub(diff_t(u), diff_t(v));
            case BinaryOp::mul: return add(mul(diff_t(u), v), mul(u, diff_t(v)));
            case BinaryOp::div:
              return div(sub(mul(diff_t(u), v), mul(u, diff_t(v))), binary(BinaryOp::pow, v, literal(2)));
            case BinaryOp::pow: {
              if (!depends_on_t(v)) {
                Ast lowered = binary(BinaryOp::pow, u, sub(v, literal(1)));
                return mul(mul(v, lowered), diff_t(u));
              }
              if (!depends_on_t(u)) return mul(mul(a, call(Func::log, u)), diff_t(v));
              return mul(a, add(mul(diff_t(v), call(Func::log, u)), div(mul(v, diff_t(u)), u)));
            }
          }
          return literal(0);
        } else if constexpr (std::is_same_v<T, Call>) {
          const Ast& u = n.arg;
          const Ast du = diff_t(u);
          switch (n.func) {
            case Func::exp: return mul(du, a);
            case Func::log: return div(du, u);
            case Func::sqrt: return div(du, mul(literal(2), a));
            case Func::sin: return mul(du, call(Func::cos, u));
            case Func::cos: return neg(mul(du, call(Func::sin, u)));
            case Func::cosh: return mul(du, call(Func::sinh, u));
            case Func::sinh: return mul(du, call(Func::cosh, u));
            case Func::tanh:
              return mul(du, sub(literal(1), binary(BinaryOp::pow, a, literal(2))));
            case Func::abs: throw evaluation_error("abs() of a time-dependent argument is not differentiable");
          }
          return literal(0);
        } else {
          return literal(0);
        }
      },
      a->value);
}

}  // namespace nhdirac::expr
