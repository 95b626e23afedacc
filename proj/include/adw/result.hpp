#pragma once

#include <string>
#include <vector>

#include "adw/sql/plan.hpp"
#include "adw/storage.hpp"
#include "adw/value.hpp"

namespace adw {

/// Rows produced by a query.
struct ResultSet {
  std::vector<std::string> headers;
  std::vector<DataType> types;
  std::vector<Row> rows;
  bool ordered = false;  ///< the query had ORDER BY
};

/// Tab-separated text with a header line; NULL prints as `NULL`.
std::string to_text(const ResultSet& r);
/// RFC 4180 CSV with a header record; NULL is an empty field.
std::string to_csv(const ResultSet& r);
/// `{"headers":[...],"rows":[[...],...]}` with JSON numbers, strings and null.
std::string to_json(const ResultSet& r);

/// Order-independent FNV-1a digest of the canonical rows (floats rounded to
/// 12 significant digits), as 16 hex digits.
std::string result_digest(const ResultSet& r);

struct CompareOptions {
  double rel_tol = 1e-9;
};

/// True when `actual` matches `expected` as a multiset of rows; when
/// `plan.order` is non-empty the order-key sequence must also match and
/// rows are compared per tie group. Floats match within `rel_tol`
/// relative. On mismatch `why` gets a short description.
bool equivalent_results(const ResultSet& expected, const ResultSet& actual, const sql::QueryPlan& plan,
                        std::string* why = nullptr, CompareOptions opts = {});

/// Float-tolerant value equality.
bool values_close(const Value& a, const Value& b, double rel_tol) noexcept;

}  // namespace adw
