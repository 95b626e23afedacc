#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adw/value.hpp"

namespace adw::sql {

struct QueryAst;

enum class CompareOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(CompareOp op) noexcept;

/// Unbound expression as written in the query text.
struct AstExpr {
  enum class Kind : std::uint8_t {
    Literal,     ///< `value`
    Identifier,  ///< `qualifier.name` or `name`
    Call,        ///< `name(args)`; `star` for COUNT(*)
    Compare,     ///< args[0] op args[1]
    And,
    Or,
    Like,        ///< args[0] LIKE args[1]
    InList,      ///< args[0] IN (args[1..])
    InSubquery,  ///< args[0] IN (subquery)
  };

  Kind kind = Kind::Literal;
  Value value;
  std::string qualifier;
  std::string name;
  bool star = false;
  CompareOp op = CompareOp::Eq;
  std::vector<std::shared_ptr<AstExpr>> args;
  std::shared_ptr<QueryAst> subquery;
  std::size_t position = 0;  ///< byte offset in the query text
};

using AstExprPtr = std::shared_ptr<AstExpr>;

struct SelectItem {
  AstExprPtr expr;  ///< null for `*`
  std::string alias;
  bool star = false;
};

enum class JoinType : std::uint8_t { Comma, Inner, Left, Right };

/// One FROM item. Items after the first carry the join that attaches them.
struct TableRef {
  std::string table;  ///< empty for derived tables
  std::shared_ptr<QueryAst> derived;
  std::string alias;
  JoinType join = JoinType::Comma;
  AstExprPtr on;
  std::size_t position = 0;
};

struct SelectCore {
  bool distinct = false;
  std::vector<SelectItem> items;
  std::vector<TableRef> from;
  AstExprPtr where;
  std::vector<AstExprPtr> group_by;
  AstExprPtr having;
};

struct OrderItem {
  AstExprPtr expr;
  bool descending = false;
};

/// A query: one or more SELECT branches joined by UNION [ALL], then an
/// optional ORDER BY / LIMIT applying to the whole.
struct QueryAst {
  std::vector<SelectCore> branches;
  std::vector<bool> union_all;  ///< size branches-1; true for UNION ALL
  std::vector<OrderItem> order_by;
  std::optional<std::int64_t> limit;
};

/// The six command kinds the benchmark groups are built from.
enum class Command : std::uint8_t { Where, GroupBy, Having, OuterJoin, Union, OrderBy };

std::string_view to_string(Command c) noexcept;

/// Commands used by the outermost query (all union branches).
std::vector<Command> commands_used(const QueryAst& q);

/// Canonical SQL text of an expression (used for headers and EXPLAIN).
std::string render(const AstExpr& e);

}  // namespace adw::sql
