#pragma once

// A small expression language for fundamental functions L(x, y).
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' exponent)*          left associative
//   exponent:= '-'* primary                     must be constant
//   primary := number | identifier | call | '(' expr ')'
//   call    := sqrt(e) | pow(e, const) | dot(u, v) | norm2(u)     u, v in {x, y}
//
// Identifiers are coordinates x1..xn, y1..yn or named parameters bound at
// parse time.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finsler/error.hpp"
#include "finsler/jet.hpp"
#include "finsler/metric.hpp"

namespace finsler {

struct SourceLocation {
  int line = 1;
  int column = 1;
  std::size_t position = 0;  // 0-based byte offset
};

class SyntaxError : public ConfigError {
 public:
  SyntaxError(const std::string& msg, SourceLocation loc)
      : ConfigError(std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " + msg), loc_(loc) {}
  const SourceLocation& location() const noexcept { return loc_; }

 private:
  SourceLocation loc_;
};

class UnknownIdentifier : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

class ArityError : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

class IndexOutOfRange : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

/// Raised while evaluating: square root of a negative number, division by a
/// (nearly) zero denominator, or a fractional power of a negative base.
class EvalDomainError : public DomainError {
 public:
  EvalDomainError(const std::string& msg, std::string subexpression)
      : DomainError(msg + " in " + subexpression), subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

struct AstNode;
using Ast = std::shared_ptr<const AstNode>;

struct AstNode {
  enum class Kind { number, param, coord, neg, add, sub, mul, div, pow, sqrt, dot, norm2 };
  Kind kind = Kind::number;
  double value = 0.0;   // number literal, param value, or constant exponent
  std::string name;     // param name
  char block = 'x';     // coord: 'x' or 'y'; dot/norm2: first argument
  char block2 = 'x';    // dot: second argument
  int index = 0;        // coord: 0-based component
  std::vector<Ast> kids;

  friend bool operator==(const AstNode& a, const AstNode& b) {
    if (a.kind != b.kind || a.kids.size() != b.kids.size()) return false;
    switch (a.kind) {
      case Kind::number: if (a.value != b.value) return false; break;
      case Kind::param: if (a.name != b.name || a.value != b.value) return false; break;
      case Kind::coord: if (a.block != b.block || a.index != b.index) return false; break;
      case Kind::dot: if (a.block != b.block || a.block2 != b.block2) return false; break;
      case Kind::norm2: if (a.block != b.block) return false; break;
      default: break;
    }
    for (std::size_t i = 0; i < a.kids.size(); ++i)
      if (!(*a.kids[i] == *b.kids[i])) return false;
    return true;
  }
};

inline bool structurally_equal(const Ast& a, const Ast& b) { return *a == *b; }

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Fully parenthesized text that parses back to an equal tree.
inline std::string print_ast(const Ast& a) {
  using K = AstNode::Kind;
  switch (a->kind) {
    case K::number: return format_number(a->value);
    case K::param: return a->name;
    case K::coord: return std::string(1, a->block) + std::to_string(a->index + 1);
    case K::neg: return "(-" + print_ast(a->kids[0]) + ")";
    case K::add: return "(" + print_ast(a->kids[0]) + "+" + print_ast(a->kids[1]) + ")";
    case K::sub: return "(" + print_ast(a->kids[0]) + "-" + print_ast(a->kids[1]) + ")";
    case K::mul: return "(" + print_ast(a->kids[0]) + "*" + print_ast(a->kids[1]) + ")";
    case K::div: return "(" + print_ast(a->kids[0]) + "/" + print_ast(a->kids[1]) + ")";
    case K::pow: return "(" + print_ast(a->kids[0]) + "^" + print_ast(a->kids[1]) + ")";
    case K::sqrt: return "sqrt(" + print_ast(a->kids[0]) + ")";
    case K::dot: return std::string("dot(") + a->block + "," + a->block2 + ")";
    case K::norm2: return std::string("norm2(") + a->block + ")";
  }
  return "?";
}

struct MetricAst {
  int dim = 0;
  Ast root;
  std::string source;
};

namespace detail {

class Parser {
 public:
  Parser(std::string_view src, int n, const std::map<std::string, double>& params)
      : src_(src), n_(n), params_(params) {}

  Ast parse() {
    skip_ws();
    Ast e = expr();
    skip_ws();
    if (pos_ < src_.size()) fail<SyntaxError>(std::string("unexpected '") + src_[pos_] + "'", pos_);
    return e;
  }

 private:
  template <class E>
  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    SourceLocation loc;
    loc.position = at;
    for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++loc.line;
        loc.column = 1;
      } else {
        ++loc.column;
      }
    }
    throw E(msg, loc);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) fail<SyntaxError>(std::string("expected '") + c + "' but input ended", pos_);
      fail<SyntaxError>(std::string("expected '") + c + "'", pos_);
    }
  }

  static Ast make(AstNode::Kind k, std::vector<Ast> kids = {}) {
    auto n = std::make_shared<AstNode>();
    n->kind = k;
    n->kids = std::move(kids);
    return n;
  }

  Ast expr() {
    Ast lhs = term();
    while (true) {
      if (accept('+')) lhs = make(AstNode::Kind::add, {lhs, term()});
      else if (accept('-')) lhs = make(AstNode::Kind::sub, {lhs, term()});
      else return lhs;
    }
  }

  Ast term() {
    Ast lhs = unary();
    while (true) {
      if (accept('*')) lhs = make(AstNode::Kind::mul, {lhs, unary()});
      else if (accept('/')) lhs = make(AstNode::Kind::div, {lhs, unary()});
      else return lhs;
    }
  }

  Ast unary() {
    if (accept('-')) return make(AstNode::Kind::neg, {unary()});
    return power();
  }

  Ast power() {
    Ast base = primary();
    while (peek('^')) {
      ++pos_;
      skip_ws();
      const std::size_t at = pos_;
      Ast e = exponent();
      base = make_pow(base, e, at);
    }
    return base;
  }

  Ast exponent() {
    if (accept('-')) return make(AstNode::Kind::neg, {exponent()});
    return primary();
  }

  Ast make_pow(Ast base, Ast e, std::size_t at) {
    double v = 0.0;
    if (!constant_value(e, v)) fail<SyntaxError>("exponent must be a constant expression", at);
    auto n = std::make_shared<AstNode>();
    n->kind = AstNode::Kind::pow;
    n->value = v;
    n->kids = {std::move(base), std::move(e)};
    return n;
  }

  static bool constant_value(const Ast& a, double& out) {
    using K = AstNode::Kind;
    double l = 0.0, r = 0.0;
    switch (a->kind) {
      case K::number:
      case K::param: out = a->value; return true;
      case K::neg:
        if (!constant_value(a->kids[0], l)) return false;
        out = -l;
        return true;
      case K::add:
      case K::sub:
      case K::mul:
      case K::div:
        if (!constant_value(a->kids[0], l) || !constant_value(a->kids[1], r)) return false;
        out = a->kind == K::add ? l + r : a->kind == K::sub ? l - r : a->kind == K::mul ? l * r : l / r;
        return std::isfinite(out);
      case K::pow:
        if (!constant_value(a->kids[0], l)) return false;
        out = std::pow(l, a->value);
        return std::isfinite(out);
      case K::sqrt:
        if (!constant_value(a->kids[0], l) || l < 0.0) return false;
        out = std::sqrt(l);
        return true;
      default: return false;
    }
  }

  Ast primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail<SyntaxError>("expected an expression but input ended", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Ast e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail<SyntaxError>(std::string("unexpected '") + c + "'", pos_);
  }

  Ast number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        pos_ = p;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_ || !std::isfinite(v))
      fail<SyntaxError>("malformed number '" + std::string(src_.substr(start, pos_ - start)) + "'", start);
    auto n = std::make_shared<AstNode>();
    n->kind = AstNode::Kind::number;
    n->value = v;
    return n;
  }

  std::string word() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  // Bare 'x' or 'y' as an argument of dot / norm2.
  char block_argument() {
    skip_ws();
    const std::size_t at = pos_;
    const std::string w = word();
    if (w != "x" && w != "y") fail<SyntaxError>("expected x or y", at);
    return w[0];
  }

  // Counts the top-level comma-separated arguments of a call starting after
  // '(' without consuming input. -1 when the call is never closed.
  int count_arguments() const {
    int depth = 0, count = 1;
    std::size_t p = pos_;
    bool any = false;
    for (; p < src_.size(); ++p) {
      const char c = src_[p];
      if (c == '(') ++depth;
      else if (c == ')') {
        if (depth == 0) break;
        --depth;
      } else if (c == ',' && depth == 0) ++count;
      else if (!std::isspace(static_cast<unsigned char>(c))) any = true;
    }
    if (p >= src_.size()) return -1;
    return any || count > 1 ? count : 0;
  }

  void check_arity(const std::string& fn, int expected, std::size_t at) const {
    const int got = count_arguments();
    if (got >= 0 && got != expected)
      fail<ArityError>(fn + " takes " + std::to_string(expected) + " argument" + (expected == 1 ? "" : "s") +
                           ", got " + std::to_string(got),
                       at);
  }

  Ast identifier() {
    const std::size_t at = pos_;
    const std::string w = word();
    if (peek('(')) {
      ++pos_;
      if (w == "sqrt") {
        check_arity(w, 1, at);
        Ast a = expr();
        expect(')');
        return make(AstNode::Kind::sqrt, {a});
      }
      if (w == "pow") {
        check_arity(w, 2, at);
        Ast a = expr();
        expect(',');
        const std::size_t eat = pos_;
        Ast e = expr();
        expect(')');
        return make_pow(a, e, eat);
      }
      if (w == "dot" || w == "norm2") {
        const bool is_dot = w == "dot";
        check_arity(w, is_dot ? 2 : 1, at);
        auto n = std::make_shared<AstNode>();
        n->kind = is_dot ? AstNode::Kind::dot : AstNode::Kind::norm2;
        n->block = block_argument();
        if (is_dot) {
          expect(',');
          n->block2 = block_argument();
        }
        expect(')');
        return n;
      }
      fail<UnknownIdentifier>("unknown function '" + w + "'", at);
    }
    if (const auto it = params_.find(w); it != params_.end()) {
      auto n = std::make_shared<AstNode>();
      n->kind = AstNode::Kind::param;
      n->name = w;
      n->value = it->second;
      return n;
    }
    if ((w[0] == 'x' || w[0] == 'y') && w.size() > 1 &&
        w.find_first_not_of("0123456789", 1) == std::string::npos) {
      const long idx = std::strtol(w.c_str() + 1, nullptr, 10);
      if (idx < 1 || idx > n_)
        fail<IndexOutOfRange>("coordinate " + w + " out of range for dimension " + std::to_string(n_), at);
      auto n = std::make_shared<AstNode>();
      n->kind = AstNode::Kind::coord;
      n->block = w[0];
      n->index = static_cast<int>(idx - 1);
      return n;
    }
    fail<UnknownIdentifier>("unknown identifier '" + w + "'", at);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int n_;
  const std::map<std::string, double>& params_;
};

template <class S>
S sum_of_products(std::span<const S> a, std::span<const S> b) {
  S acc{0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <class S>
S integer_power(const S& base, int e) {
  S r{1.0};
  for (int i = 0; i < e; ++i) r = r * base;
  return r;
}

}  // namespace detail

inline MetricAst parse_metric(std::string_view source, int n, const std::map<std::string, double>& params = {}) {
  if (n < 1) throw ConfigError("metric dimension must be positive");
  for (const auto& [name, value] : params) {
    if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_'))
      throw ConfigError("invalid parameter name '" + name + "'");
    if (!std::isfinite(value)) throw ConfigError("parameter '" + name + "' must be finite");
  }
  detail::Parser p(source, n, params);
  return {n, p.parse(), std::string(source)};
}

/// Evaluates the tree on doubles or jets.
template <class S>
S eval_ast(const Ast& a, std::span<const S> x, std::span<const S> y) {
  using K = AstNode::Kind;
  auto block = [&](char b) { return b == 'x' ? x : y; };
  switch (a->kind) {
    case K::number:
    case K::param: return S{a->value};
    case K::coord: return block(a->block)[static_cast<std::size_t>(a->index)];
    case K::neg: return -eval_ast<S>(a->kids[0], x, y);
    case K::add: return eval_ast<S>(a->kids[0], x, y) + eval_ast<S>(a->kids[1], x, y);
    case K::sub: return eval_ast<S>(a->kids[0], x, y) - eval_ast<S>(a->kids[1], x, y);
    case K::mul: return eval_ast<S>(a->kids[0], x, y) * eval_ast<S>(a->kids[1], x, y);
    case K::div: {
      const S den = eval_ast<S>(a->kids[1], x, y);
      if (!(std::abs(value_of(den)) >= 1e-13)) throw EvalDomainError("division by (nearly) zero", print_ast(a));
      return eval_ast<S>(a->kids[0], x, y) / den;
    }
    case K::pow: {
      const S base = eval_ast<S>(a->kids[0], x, y);
      const double e = a->value;
      if (e == std::floor(e) && e >= 0.0 && e <= 16.0) return detail::integer_power(base, static_cast<int>(e));
      const double b = value_of(base);
      if (b < 0.0 && e != std::floor(e))
        throw EvalDomainError("fractional power of a negative number", print_ast(a));
      if (std::abs(b) < 1e-13) throw EvalDomainError("negative or fractional power of (nearly) zero", print_ast(a));
      return pow(base, e);
    }
    case K::sqrt: {
      const S arg = eval_ast<S>(a->kids[0], x, y);
      if (value_of(arg) < 0.0) throw EvalDomainError("square root of a negative number", print_ast(a));
      return sqrt(arg);
    }
    case K::dot: return detail::sum_of_products<S>(block(a->block), block(a->block2));
    case K::norm2: return detail::sum_of_products<S>(block(a->block), block(a->block));
  }
  throw EvalDomainError("corrupt expression tree", "?");
}

inline double eval_ast(const MetricAst& m, std::span<const double> x, std::span<const double> y) {
  return eval_ast<double>(m.root, x, y);
}

/// Wraps a parsed expression as a metric on the given chart.
inline FinslerMetric metric_from_ast(std::string name, const MetricAst& m, ChartDomain domain = {}) {
  const Ast root = m.root;
  return make_metric(std::move(name), m.dim, std::move(domain), [root](auto x, auto y) {
    using S = typename decltype(x)::value_type;
    return eval_ast<std::remove_const_t<S>>(root, x, y);
  });
}

}  // namespace finsler
