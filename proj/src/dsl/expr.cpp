#include "nxs/dsl/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "nxs/error.hpp"

namespace nxs::dsl {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr parse() {
    skip_ws();
    if (eof()) fail("empty expression");
    Expr e = sum();
    skip_ws();
    if (!eof()) fail(std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (!eof() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw SyntaxError(0, static_cast<int>(pos_) + 1, what);
  }

  Expr sum() {
    Expr lhs = prod();
    while (true) {
      if (accept('+')) {
        lhs = Expr::binary(ExprOp::add, std::move(lhs), prod());
      } else if (accept('-')) {
        lhs = Expr::binary(ExprOp::sub, std::move(lhs), prod());
      } else {
        return lhs;
      }
    }
  }

  Expr prod() {
    Expr lhs = unary();
    while (true) {
      if (accept('*')) {
        lhs = Expr::binary(ExprOp::mul, std::move(lhs), unary());
      } else if (accept('/')) {
        lhs = Expr::binary(ExprOp::div, std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return Expr::unary(ExprOp::neg, unary());
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (accept('^')) return Expr::binary(ExprOp::pow, std::move(base), unary());
    return base;
  }

  Expr atom() {
    skip_ws();
    if (eof()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (!eof() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string_view ident = s_.substr(start, pos_ - start);
      if (ident == "x") return Expr::variable();
      struct Fn {
        std::string_view name;
        ExprOp op;
        int arity;
      };
      static constexpr Fn fns[] = {{"abs", ExprOp::abs, 1},  {"sqrt", ExprOp::sqrt, 1}, {"log", ExprOp::log, 1},
                                   {"exp", ExprOp::exp, 1},  {"min", ExprOp::min, 2},   {"max", ExprOp::max, 2}};
      for (const auto& fn : fns) {
        if (fn.name != ident) continue;
        if (!accept('(')) fail("expected '(' after " + std::string(ident));
        Expr a = sum();
        if (fn.arity == 2) {
          if (!accept(',')) fail(std::string(ident) + " takes two arguments");
          Expr b = sum();
          if (!accept(')')) fail("expected ')'");
          return Expr::binary(fn.op, std::move(a), std::move(b));
        }
        if (!accept(')')) fail("expected ')'");
        return Expr::unary(fn.op, std::move(a));
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(ident) + "'");
    }
    fail(std::string("unexpected '") + c + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (!eof() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (!eof() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (!eof() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const char* first = s_.data() + start;
    const char* last = s_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
      pos_ = start;
      fail("invalid number");
    }
    return Expr::constant(v);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Expr& e) {
  switch (e.op) {
    case ExprOp::constant: return fmt::format("{}", e.value);
    case ExprOp::variable: return "x";
    case ExprOp::neg: return "(-" + to_string(e.args[0]) + ")";
    case ExprOp::add: return "(" + to_string(e.args[0]) + " + " + to_string(e.args[1]) + ")";
    case ExprOp::sub: return "(" + to_string(e.args[0]) + " - " + to_string(e.args[1]) + ")";
    case ExprOp::mul: return "(" + to_string(e.args[0]) + " * " + to_string(e.args[1]) + ")";
    case ExprOp::div: return "(" + to_string(e.args[0]) + " / " + to_string(e.args[1]) + ")";
    case ExprOp::pow: return "(" + to_string(e.args[0]) + " ^ " + to_string(e.args[1]) + ")";
    case ExprOp::abs: return "abs(" + to_string(e.args[0]) + ")";
    case ExprOp::sqrt: return "sqrt(" + to_string(e.args[0]) + ")";
    case ExprOp::log: return "log(" + to_string(e.args[0]) + ")";
    case ExprOp::exp: return "exp(" + to_string(e.args[0]) + ")";
    case ExprOp::min: return "min(" + to_string(e.args[0]) + ", " + to_string(e.args[1]) + ")";
    case ExprOp::max: return "max(" + to_string(e.args[0]) + ", " + to_string(e.args[1]) + ")";
  }
  return "?";
}

double evaluate(const Expr& e, double x) {
  switch (e.op) {
    case ExprOp::constant: return e.value;
    case ExprOp::variable: return x;
    case ExprOp::neg: return -evaluate(e.args[0], x);
    case ExprOp::add: return evaluate(e.args[0], x) + evaluate(e.args[1], x);
    case ExprOp::sub: return evaluate(e.args[0], x) - evaluate(e.args[1], x);
    case ExprOp::mul: return evaluate(e.args[0], x) * evaluate(e.args[1], x);
    case ExprOp::div: return evaluate(e.args[0], x) / evaluate(e.args[1], x);
    case ExprOp::pow: return std::pow(evaluate(e.args[0], x), evaluate(e.args[1], x));
    case ExprOp::abs: return std::abs(evaluate(e.args[0], x));
    case ExprOp::sqrt: {
      const double a = evaluate(e.args[0], x);
      if (a < 0.0) throw Error(Errc::domain_error, fmt::format("sqrt of negative value {}", a));
      return std::sqrt(a);
    }
    case ExprOp::log: {
      const double a = evaluate(e.args[0], x);
      if (a <= 0.0) throw Error(Errc::domain_error, fmt::format("log of non-positive value {}", a));
      return std::log(a);
    }
    case ExprOp::exp: return std::exp(evaluate(e.args[0], x));
    case ExprOp::min: return std::fmin(evaluate(e.args[0], x), evaluate(e.args[1], x));
    case ExprOp::max: return std::fmax(evaluate(e.args[0], x), evaluate(e.args[1], x));
  }
  return 0.0;
}

void eval_inplace(const Expr& e, SampleTable& table, EvalStats* stats) {
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.cols(); ++c) {
      double& v = table(r, c);
      try {
        v = evaluate(e, v);
      } catch (const Error& err) {
        throw Error(Errc::domain_error, fmt::format("at row {}, channel {}: {}", r, c, err.detail()));
      }
      if (stats && !std::isfinite(v)) ++stats->nonfinite;
    }
  }
}

Chunk eval_expression(const Expr& e, const Chunk& chunk, EvalStats* stats) {
  Chunk out = chunk;
  eval_inplace(e, out.data, stats);
  return out;
}

}  // namespace nxs::dsl
