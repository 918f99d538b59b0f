#pragma once
#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace lantern::expr {

// Small arithmetic expressions over the variables u, v (the two plane
// coordinates): literals, + - * / ^, unary -, sin cos tan exp log sqrt abs,
// and the constant pi. `sign` is accepted as well; it is what the
// differentiator emits for abs (with sign(0) = 0). Grammar, EBNF:
//
//   expr    = term { ("+" | "-") term } ;
//   term    = unary { ("*" | "/") unary } ;
//   unary   = "-" unary | power ;
//   power   = atom [ "^" unary ] ;              (right associative)
//   atom    = number | "pi" | "u" | "v" | func "(" expr ")" | "(" expr ")" ;
//   func    = "sin" | "cos" | "tan" | "exp" | "log" | "sqrt" | "abs" | "sign" ;
//
// so ^ binds tighter than unary minus: -2^2 = -(2^2).

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(std::size_t at, const std::string& what)
      : std::runtime_error("parse error at offset " + std::to_string(at) + ": " + what),
        offset(at) {}
};

struct EvalError : std::runtime_error {
  std::string subexpression;
  EvalError(const std::string& what, std::string subexpr)
      : std::runtime_error(what + " in '" + subexpr + "'"), subexpression(std::move(subexpr)) {}
};

struct Node;
using ExprPtr = std::shared_ptr<const Node>;

enum class Kind { Number, Var, Unary, Binary, Call };

struct Node {
  Kind kind;
  double value = 0.0;   // Number
  char var = 0;         // Var: 'u' or 'v'
  char op = 0;          // Binary: + - * / ^ ; Unary: -
  std::string func;     // Call
  ExprPtr lhs, rhs;     // Binary children; Unary/Call use lhs only
};

inline ExprPtr number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->value = v;
  return n;
}
inline ExprPtr variable(char c) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var = c;
  return n;
}
inline ExprPtr negate(ExprPtr e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Unary;
  n->op = '-';
  n->lhs = std::move(e);
  return n;
}
inline ExprPtr binary(char op, ExprPtr l, ExprPtr r) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->op = op;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}
inline ExprPtr call(std::string f, ExprPtr a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->func = std::move(f);
  n->lhs = std::move(a);
  return n;
}

inline bool is_number(const ExprPtr& e, double v) {
  return e->kind == Kind::Number && e->value == v;
}

// Constant-folding constructors keep gradient trees small.
inline ExprPtr add(ExprPtr l, ExprPtr r) {
  if (is_number(l, 0.0)) return r;
  if (is_number(r, 0.0)) return l;
  if (l->kind == Kind::Number && r->kind == Kind::Number) return number(l->value + r->value);
  return binary('+', std::move(l), std::move(r));
}
inline ExprPtr sub(ExprPtr l, ExprPtr r) {
  if (is_number(r, 0.0)) return l;
  if (l->kind == Kind::Number && r->kind == Kind::Number) return number(l->value - r->value);
  if (is_number(l, 0.0)) return negate(std::move(r));
  return binary('-', std::move(l), std::move(r));
}
inline ExprPtr mul(ExprPtr l, ExprPtr r) {
  if (is_number(l, 0.0) || is_number(r, 0.0)) return number(0.0);
  if (is_number(l, 1.0)) return r;
  if (is_number(r, 1.0)) return l;
  if (l->kind == Kind::Number && r->kind == Kind::Number) return number(l->value * r->value);
  return binary('*', std::move(l), std::move(r));
}
inline ExprPtr divide(ExprPtr l, ExprPtr r) {
  if (is_number(l, 0.0)) return number(0.0);
  if (is_number(r, 1.0)) return l;
  return binary('/', std::move(l), std::move(r));
}
inline ExprPtr pow_expr(ExprPtr l, ExprPtr r) {
  if (is_number(r, 1.0)) return l;
  return binary('^', std::move(l), std::move(r));
}

namespace detail {

struct Parser {
  const std::string& src;
  std::size_t pos = 0;

  explicit Parser(const std::string& s) : src(s) {}

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& expected) {
    throw ParseError(pos, "expected " + expected);
  }

  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    for (;;) {
      if (consume('+'))
        e = binary('+', e, parse_term());
      else if (consume('-'))
        e = binary('-', e, parse_term());
      else
        return e;
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    for (;;) {
      if (consume('*'))
        e = binary('*', e, parse_unary());
      else if (consume('/'))
        e = binary('/', e, parse_unary());
      else
        return e;
    }
  }

  ExprPtr parse_unary() {
    if (consume('-')) return negate(parse_unary());
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (consume('^')) return binary('^', base, parse_unary());
    return base;
  }

  ExprPtr parse_atom() {
    const char c = peek();
    if (c == '(') {
      ++pos;
      ExprPtr e = parse_expr();
      if (!consume(')')) fail("')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_word();
    fail("a number, 'u', 'v', 'pi', a function call, or '('");
  }

  ExprPtr parse_number() {
    skip_ws();
    const char* begin = src.c_str() + pos;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("a number");
    pos += std::size_t(end - begin);
    return number(v);
  }

  ExprPtr parse_word() {
    skip_ws();
    std::size_t start = pos;
    while (pos < src.size() && std::isalpha(static_cast<unsigned char>(src[pos]))) ++pos;
    const std::string word = src.substr(start, pos - start);
    if (word == "u" || word == "v") return variable(word[0]);
    if (word == "pi") return number(M_PI);
    for (const char* f : {"sin", "cos", "tan", "exp", "log", "sqrt", "abs", "sign"}) {
      if (word == f) {
        if (!consume('(')) fail("'(' after '" + word + "'");
        ExprPtr arg = parse_expr();
        if (!consume(')')) fail("')'");
        return call(word, arg);
      }
    }
    pos = start;
    fail("'u', 'v', 'pi', or a known function (sin cos tan exp log sqrt abs sign)");
  }
};

inline int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::Binary:
      if (n.op == '+' || n.op == '-') return 1;
      if (n.op == '*' || n.op == '/') return 2;
      return 4;  // ^
    case Kind::Unary: return 3;
    default: return 5;
  }
}

}  // namespace detail

inline ExprPtr parse(const std::string& src) {
  detail::Parser p(src);
  ExprPtr e = p.parse_expr();
  p.skip_ws();
  if (p.pos != src.size()) throw ParseError(p.pos, "expected end of input or an operator");
  return e;
}

inline std::string print(const ExprPtr& e);

namespace detail {
inline std::string print_child(const ExprPtr& child, int parent_prec, bool right_side) {
  const int cp = precedence(*child);
  const bool parens = cp < parent_prec || (cp == parent_prec && right_side);
  const std::string s = print(child);
  return parens ? "(" + s + ")" : s;
}
}  // namespace detail

inline std::string print(const ExprPtr& e) {
  switch (e->kind) {
    case Kind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", e->value);
      std::string s = buf;
      // a bare "-c" would reparse as unary minus around a literal; fine either way,
      // but wrap so precedence stays explicit in printed subtrees
      return e->value < 0 ? "(" + s + ")" : s;
    }
    case Kind::Var: return std::string(1, e->var);
    case Kind::Unary: return "-" + detail::print_child(e->lhs, detail::precedence(*e), true);
    case Kind::Call: return e->func + "(" + print(e->lhs) + ")";
    case Kind::Binary: {
      const int p = detail::precedence(*e);
      // ^ is right associative, the rest left
      const bool right_assoc = (e->op == '^');
      return detail::print_child(e->lhs, p, right_assoc) + std::string(1, e->op) +
             detail::print_child(e->rhs, p, !right_assoc);
    }
  }
  return "";
}

inline double eval(const ExprPtr& e, double u, double v) {
  switch (e->kind) {
    case Kind::Number: return e->value;
    case Kind::Var: return e->var == 'u' ? u : v;
    case Kind::Unary: return -eval(e->lhs, u, v);
    case Kind::Call: {
      const double a = eval(e->lhs, u, v);
      if (e->func == "sin") return std::sin(a);
      if (e->func == "cos") return std::cos(a);
      if (e->func == "tan") return std::tan(a);
      if (e->func == "exp") return std::exp(a);
      if (e->func == "abs") return std::abs(a);
      if (e->func == "sign") return a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0);
      if (e->func == "log") {
        if (a <= 0.0) throw EvalError("log of non-positive value", print(e));
        return std::log(a);
      }
      // sqrt
      if (a < 0.0) throw EvalError("sqrt of negative value", print(e));
      return std::sqrt(a);
    }
    case Kind::Binary: {
      const double l = eval(e->lhs, u, v);
      const double r = eval(e->rhs, u, v);
      switch (e->op) {
        case '+': return l + r;
        case '-': return l - r;
        case '*': return l * r;
        case '/':
          if (r == 0.0) throw EvalError("division by zero", print(e));
          return l / r;
        default:  // ^
          if (l < 0.0 && r != std::floor(r))
            throw EvalError("non-integer power of negative base", print(e));
          return std::pow(l, r);
      }
    }
  }
  return 0.0;
}

// Structural partial derivative with respect to `var` ('u' or 'v').
inline ExprPtr differentiate(const ExprPtr& e, char var) {
  switch (e->kind) {
    case Kind::Number: return number(0.0);
    case Kind::Var: return number(e->var == var ? 1.0 : 0.0);
    case Kind::Unary: return negate(differentiate(e->lhs, var));
    case Kind::Call: {
      const ExprPtr f = e->lhs;
      const ExprPtr df = differentiate(f, var);
      if (e->func == "sin") return mul(call("cos", f), df);
      if (e->func == "cos") return negate(mul(call("sin", f), df));
      if (e->func == "tan") return divide(df, pow_expr(call("cos", f), number(2.0)));
      if (e->func == "exp") return mul(call("exp", f), df);
      if (e->func == "log") return divide(df, f);
      if (e->func == "sqrt") return divide(df, mul(number(2.0), call("sqrt", f)));
      if (e->func == "abs") return mul(call("sign", f), df);  // subgradient 0 at 0
      return number(0.0);  // sign: flat almost everywhere
    }
    case Kind::Binary: {
      const ExprPtr l = e->lhs, r = e->rhs;
      const ExprPtr dl = differentiate(l, var), dr = differentiate(r, var);
      switch (e->op) {
        case '+': return add(dl, dr);
        case '-': return sub(dl, dr);
        case '*': return add(mul(dl, r), mul(l, dr));
        case '/': return divide(sub(mul(dl, r), mul(l, dr)), pow_expr(r, number(2.0)));
        default:  // ^
          if (r->kind == Kind::Number)
            return mul(mul(number(r->value), pow_expr(l, number(r->value - 1.0))), dl);
          // f^g = exp(g log f)
          return mul(pow_expr(l, r), add(mul(dr, call("log", l)), divide(mul(r, dl), l)));
      }
    }
  }
  return number(0.0);
}

inline std::pair<ExprPtr, ExprPtr> gradient(const ExprPtr& e) {
  return {differentiate(e, 'u'), differentiate(e, 'v')};
}

}  // namespace lantern::expr
