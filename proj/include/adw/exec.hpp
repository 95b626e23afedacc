#pragma once

#include "adw/result.hpp"
#include "adw/sql/plan.hpp"
#include "adw/storage.hpp"

namespace adw::exec {

/// Row-at-a-time execution over a row store: nested-loop joins probing the
/// primary-key index where the join key allows it, tree-map aggregation.
ResultSet execute_baseline(const sql::QueryPlan& plan, const RowStore& store);

struct RolapOptions {
  std::size_t partitions = 1;  ///< aggregation partitions, merged in order
};

/// Vectorized execution over a column store: typed predicate kernels on
/// selection vectors, hash joins, hash aggregation with compensated sums.
/// Only columns a query references are read.
ResultSet execute_rolap(const sql::QueryPlan& plan, const ColumnStore& store, const RolapOptions& options = {});

}  // namespace adw::exec
