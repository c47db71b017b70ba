#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nxs/core/types.hpp"

namespace nxs::dsl {

enum class ExprOp { constant, variable, neg, add, sub, mul, div, pow, abs, sqrt, log, exp, min, max };

/// Immutable expression tree over one scalar variable `x`.
struct Expr {
  ExprOp op = ExprOp::constant;
  double value = 0.0;  // constant only
  std::vector<Expr> args;

  static Expr constant(double v) { return {ExprOp::constant, v, {}}; }
  static Expr variable() { return {ExprOp::variable, 0.0, {}}; }
  static Expr unary(ExprOp op, Expr a) { return {op, 0.0, {std::move(a)}}; }
  static Expr binary(ExprOp op, Expr a, Expr b) { return {op, 0.0, {std::move(a), std::move(b)}}; }

  bool operator==(const Expr&) const = default;
};

/// Grammar, loosest to tightest binding:
///   sum   := prod (('+' | '-') prod)*
///   prod  := unary (('*' | '/') unary)*
///   unary := '-' unary | power
///   power := atom ('^' unary)?          (right associative)
///   atom  := number | 'x' | '(' sum ')' | fn '(' sum (',' sum)? ')'
/// with fn in abs, sqrt, log, exp (one argument) and min, max (two).
/// Throws SyntaxError carrying the 1-based column.
Expr parse_expression(std::string_view text);

/// Fully parenthesised rendering that parses back to an equal tree.
std::string to_string(const Expr& e);

/// Evaluates at x. log of a non-positive value and sqrt of a negative value
/// throw Errc::domain_error; division by zero follows IEEE (inf/NaN).
double evaluate(const Expr& e, double x);

struct EvalStats {
  std::uint64_t nonfinite = 0;
};

/// Elementwise application; shape, timestamps and channels are preserved.
/// Domain errors are rethrown with the offending row/channel. Non-finite
/// results are kept and counted in `stats`.
Chunk eval_expression(const Expr& e, const Chunk& chunk, EvalStats* stats = nullptr);
void eval_inplace(const Expr& e, SampleTable& table, EvalStats* stats = nullptr);

}  // namespace nxs::dsl
