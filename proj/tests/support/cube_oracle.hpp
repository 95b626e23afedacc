#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "adw/exec.hpp"
#include "adw/olap.hpp"

namespace adw::fixture {

inline std::string agg_sql(const olap::MeasureDef& m, const std::string& fact) {
  const std::string col = fact + "." + m.column;
  switch (m.agg) {
    case olap::Aggregator::Count: return m.column.empty() ? "COUNT(*)" : "COUNT(" + col + ")";
    case olap::Aggregator::Sum: return "SUM(" + col + ")";
    case olap::Aggregator::Max: return "MAX(" + col + ")";
  }
  return {};
}

/// Measure totals computed by SQL over the row store.
inline std::vector<Value> oracle_totals(const olap::CubeDef& def, const RowStore& rows) {
  std::string text = "SELECT ";
  for (std::size_t i = 0; i < def.measures.size(); ++i) {
    text += (i ? ", " : "") + agg_sql(def.measures[i], def.fact);
  }
  text += " FROM " + def.fact;
  return exec::execute_baseline(sql::plan(text, rows.schema()), rows).rows.at(0);
}

/// Merges two partial totals of one measure.
inline Value combine(const Value& a, const Value& b, olap::Aggregator agg) {
  if (is_null(a)) return b;
  if (is_null(b)) return a;
  if (agg == olap::Aggregator::Max) return compare_total(a, b) >= 0 ? a : b;
  if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
    return std::get<std::int64_t>(a) + std::get<std::int64_t>(b);
  }
  return *as_double(a) + *as_double(b);
}

/// Ints must match exactly, floats within 1e-9 relative. Returns a
/// description of the first difference, or empty.
inline std::string totals_diff(const std::vector<Value>& expected, const std::vector<Value>& actual) {
  if (expected.size() != actual.size()) return "measure count differs";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const bool exact = std::holds_alternative<std::int64_t>(expected[i]) || is_null(expected[i]);
    const bool ok = exact ? equal_total(expected[i], actual[i]) : values_close(expected[i], actual[i], 1e-9);
    if (!ok) return "measure " + std::to_string(i) + ": " + format_value(expected[i]) + " vs " + format_value(actual[i]);
  }
  return {};
}

/// Distinct members of a dimension present in the cube.
inline std::vector<Value> members_of(const olap::DataCube& cube, std::size_t dim) {
  const auto slot = cube.coordinate_slot(dim);
  std::vector<Value> out;
  if (!slot) return out;
  std::unordered_map<Value, bool, ValueHash, ValueEq> seen;
  for (const auto& [coords, _] : cube.cells()) {
    if (seen.emplace(coords[*slot], true).second) out.push_back(coords[*slot]);
  }
  return out;
}

/// Checks every roll-up and every slice partition of `cube` against `totals`.
/// Returns the problems found.
inline std::vector<std::string> conservation_problems(const olap::DataCube& cube, const std::vector<Value>& totals) {
  std::vector<std::string> problems;
  const auto& def = cube.def();
  auto check = [&](const std::string& what, const std::vector<Value>& got) {
    const auto d = totals_diff(totals, got);
    if (!d.empty()) problems.push_back(def.name + " " + what + ": " + d);
  };
  check("base", cube.totals());
  for (std::size_t d = 0; d < def.dimensions.size(); ++d) {
    const auto& h = def.dimensions[d].hierarchy;
    for (std::size_t l = def.dimensions[d].level + 1; l < h.levels.size(); ++l) {
      check("roll_up " + h.name + " to " + h.levels[l].name, olap::roll_up(cube, h.name, h.levels[l].name).totals());
    }
    check("roll_up " + h.name + " to ALL", olap::roll_up(cube, h.name, "ALL").totals());
    std::vector<Value> acc(def.measures.size());
    std::size_t rows = 0;
    for (const auto& m : members_of(cube, d)) {
      const auto s = olap::slice(cube, h.name, m);
      rows += s.source_rows();
      const auto t = s.totals();
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = combine(acc[i], t[i], def.measures[i].agg);
    }
    if (rows != cube.source_rows()) problems.push_back(def.name + " slices of " + h.name + " lose rows");
    check("slices of " + h.name, acc);
  }
  return problems;
}

}  // namespace adw::fixture
