#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adw/error.hpp"
#include "adw/schema.hpp"
#include "adw/sql/ast.hpp"
#include "adw/sql/expr.hpp"

namespace adw::sql {

/// Name resolution or typing failure while planning.
class BindError : public Error {
 public:
  using Error::Error;
};

enum class AggKind : std::uint8_t {
  Count,      ///< COUNT(expr): non-null values
  CountStar,  ///< COUNT(*)
  Sum,
  Max,
  AnyMin,     ///< non-grouped column in a grouped SELECT; resolves to the group's minimum
};

std::string_view to_string(AggKind k) noexcept;

struct AggCall {
  AggKind kind = AggKind::CountStar;
  ExprPtr arg;  ///< over the join layout; null for COUNT(*)
  DataType type = DataType::Int64;
  std::string label;
};

struct ColumnInfo {
  std::string name;
  DataType type = DataType::Int64;
  bool nullable = true;
};

/// One FROM item: a catalog table or a materialized subquery.
struct Source {
  std::string alias;
  std::string table;  ///< catalog spelling; empty for derived tables
  std::shared_ptr<const QueryPlan> derived;
  std::vector<ColumnInfo> columns;
  ExprPtr filter;           ///< conjunction over this source only
  std::vector<int> needed;  ///< columns referenced anywhere in the branch, ascending
  bool fact = false;
};

enum class JoinKind : std::uint8_t { Inner, LeftOuter, Cross };

std::string_view to_string(JoinKind k) noexcept;

struct JoinKey {
  ExprPtr left;   ///< column of an already-joined source
  ExprPtr right;  ///< column of the source being added
};

/// Adds `source` to the running left-deep join.
struct JoinStep {
  int source = 0;
  JoinKind kind = JoinKind::Inner;
  bool from_right_join = false;  ///< written as RIGHT JOIN and normalized by swapping inputs
  std::vector<JoinKey> keys;
  ExprPtr condition;  ///< residual ON predicate, evaluated while matching (outer joins)
  ExprPtr filter;     ///< WHERE conjuncts that become evaluable after this step
};

/// One SELECT branch.
///
/// Layouts: every expression up to and including aggregation addresses the
/// join layout (source index, column index). When `aggregate` is set,
/// `having` and `projections` address the aggregate layout instead: a single
/// source 0 whose columns are the group keys followed by the aggregates.
struct CorePlan {
  std::vector<Source> sources;
  int first = 0;
  std::vector<JoinStep> joins;
  bool aggregate = false;
  std::vector<ExprPtr> group_keys;
  std::vector<AggCall> aggs;
  ExprPtr having;
  std::vector<ExprPtr> projections;
  std::vector<DataType> types;
  bool distinct = false;
};

struct SortKey {
  int column = 0;
  bool descending = false;
};

enum class ExecPath : std::uint8_t { Unset, Baseline, Rolap, Molap };

std::string_view to_string(ExecPath p) noexcept;

/// Bound operator tree: per-branch scan -> filter -> join -> aggregate ->
/// having -> project, then union -> sort -> limit.
struct QueryPlan {
  std::vector<CorePlan> branches;
  std::vector<bool> union_all;
  std::vector<std::string> headers;
  std::vector<DataType> types;
  std::vector<SortKey> order;
  std::optional<std::int64_t> limit;
  bool ordered = false;
  ExecPath path = ExecPath::Unset;

  bool has_outer_join() const noexcept;
  bool has_subquery() const noexcept;
};

/// Binds names against the catalog and builds the operator tree.
QueryPlan plan(const QueryAst& ast, const ConstellationSchema& schema);

/// Parses then plans.
QueryPlan plan(std::string_view sql, const ConstellationSchema& schema);

/// Deterministic indented rendering of the operator tree and path tag.
std::string explain(const QueryPlan& plan);

/// Binds a predicate over a single table (source 0), e.g. for storage scans.
ExprPtr bind_table_predicate(std::string_view predicate_sql, const TableDef& table);

}  // namespace adw::sql
