#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "adw/sql/ast.hpp"
#include "adw/value.hpp"

namespace adw::sql {

struct QueryPlan;

/// Bound, typed expression. Column references address a source by index
/// within the enclosing layout and a column by index within that source.
struct Expr {
  enum class Kind : std::uint8_t { Literal, Column, Compare, And, Or, Like, InList, InSubquery, Year, Month };

  Kind kind = Kind::Literal;
  DataType type = DataType::Bool;
  Value literal;
  int source = 0;
  int column = 0;
  CompareOp op = CompareOp::Eq;
  std::vector<std::shared_ptr<const Expr>> args;
  std::vector<Value> list;  ///< InList members, already coerced to the operand type
  std::string pattern;      ///< Like pattern
  std::shared_ptr<const QueryPlan> subquery;
  std::string label;        ///< Column: `alias.name` as shown by EXPLAIN
};

using ExprPtr = std::shared_ptr<const Expr>;

/// Structural equality (same columns, operators, literals).
bool same_expr(const Expr& a, const Expr& b) noexcept;

std::string render_expr(const Expr& e);

/// Calls `fn(source, column)` for every column reference.
template <typename Fn>
void for_each_column(const Expr& e, Fn&& fn) {
  if (e.kind == Expr::Kind::Column) fn(e.source, e.column);
  for (const auto& a : e.args) for_each_column(*a, fn);
}

/// SQL LIKE: `%` matches any run (including empty), `_` exactly one
/// character (UTF-8 code point). Case-sensitive; no escape character.
bool like_match(std::string_view text, std::string_view pattern) noexcept;

using ValueSet = std::unordered_set<Value, ValueHash, ValueEq>;

/// Materialized results of uncorrelated IN subqueries, keyed by the
/// InSubquery node.
struct SubqueryResults {
  std::unordered_map<const Expr*, ValueSet> sets;
};

/// Scalar evaluation. `acc(source, column)` returns the current value of a
/// column reference. The returned reference points at the accessor's
/// storage, the literal, or `scratch`.
template <typename Acc>
const Value& eval_scalar(const Expr& e, const Acc& acc, const SubqueryResults* subs, Value& scratch);

/// Predicate evaluation: NULL and non-bool results are false.
template <typename Acc>
bool eval_predicate(const Expr& e, const Acc& acc, const SubqueryResults* subs) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::And:
      return eval_predicate(*e.args[0], acc, subs) && eval_predicate(*e.args[1], acc, subs);
    case K::Or:
      return eval_predicate(*e.args[0], acc, subs) || eval_predicate(*e.args[1], acc, subs);
    case K::Compare: {
      Value s0, s1;
      const Value& a = eval_scalar(*e.args[0], acc, subs, s0);
      const Value& b = eval_scalar(*e.args[1], acc, subs, s1);
      const auto c = compare_sql(a, b);
      if (!c) return false;
      switch (e.op) {
        case CompareOp::Eq: return *c == 0;
        case CompareOp::Ne: return *c != 0;
        case CompareOp::Lt: return *c < 0;
        case CompareOp::Le: return *c <= 0;
        case CompareOp::Gt: return *c > 0;
        case CompareOp::Ge: return *c >= 0;
      }
      return false;
    }
    case K::Like: {
      Value s0;
      const Value& a = eval_scalar(*e.args[0], acc, subs, s0);
      const auto* str = std::get_if<std::string>(&a);
      return str && like_match(*str, e.pattern);
    }
    case K::InList: {
      Value s0;
      const Value& a = eval_scalar(*e.args[0], acc, subs, s0);
      if (is_null(a)) return false;
      for (const auto& m : e.list) {
        auto c = compare_sql(a, m);
        if (c && *c == 0) return true;
      }
      return false;
    }
    case K::InSubquery: {
      Value s0;
      const Value& a = eval_scalar(*e.args[0], acc, subs, s0);
      if (is_null(a) || !subs) return false;
      auto it = subs->sets.find(&e);
      return it != subs->sets.end() && it->second.count(a) > 0;
    }
    default: {
      Value s0;
      const Value& v = eval_scalar(e, acc, subs, s0);
      const auto* b = std::get_if<bool>(&v);
      return b && *b;
    }
  }
}

template <typename Acc>
const Value& eval_scalar(const Expr& e, const Acc& acc, const SubqueryResults* subs, Value& scratch) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Literal: return e.literal;
    case K::Column: return acc(e.source, e.column);
    case K::Year:
    case K::Month: {
      Value s0;
      const Value& a = eval_scalar(*e.args[0], acc, subs, s0);
      if (const auto* d = std::get_if<Date>(&a)) {
        const CivilDate c = to_civil(*d);
        scratch = static_cast<std::int64_t>(e.kind == K::Year ? c.year : static_cast<int>(c.month));
      } else {
        scratch = Value{};
      }
      return scratch;
    }
    default:
      scratch = eval_predicate(e, acc, subs);
      return scratch;
  }
}

}  // namespace adw::sql
