#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "adw/error.hpp"
#include "adw/result.hpp"
#include "adw/sql/plan.hpp"
#include "adw/storage.hpp"

namespace adw::olap {

/// How a level derives its member from the source column.
enum class Transform : std::uint8_t {
  Identity,
  YearMonth,  ///< date -> yyyymm as int64
  Year,       ///< date -> yyyy as int64
};

std::string_view to_string(Transform t) noexcept;

/// One level of a hierarchy. `path` lists the foreign-key columns followed
/// from the fact table; `column` is read from the table the path reaches.
struct Level {
  std::string name;
  std::vector<std::string> path;
  std::string column;
  Transform transform = Transform::Identity;
};

/// Levels ordered finest first; an implicit ALL level sits above the last.
struct DimensionHierarchy {
  std::string name;
  std::vector<Level> levels;

  std::size_t all_level() const noexcept { return levels.size(); }
  std::optional<std::size_t> level_index(std::string_view level) const noexcept;
};

enum class Aggregator : std::uint8_t { Sum, Count, Max };

std::string_view to_string(Aggregator a) noexcept;

/// `column` empty with Count means COUNT(*).
struct MeasureDef {
  std::string name;
  std::string column;
  Aggregator agg = Aggregator::Sum;
};

struct CubeDimension {
  DimensionHierarchy hierarchy;
  std::size_t level = 0;
};

struct CubeDef {
  std::string name;
  std::string fact;
  std::vector<CubeDimension> dimensions;
  std::vector<MeasureDef> measures;
};

/// Running value of one measure in one cell.
struct MeasureCell {
  std::int64_t count = 0;  ///< rows (COUNT) or non-null inputs (SUM, MAX)
  std::int64_t isum = 0;
  double sum = 0;
  double comp = 0;
  Value best;

  void add_double(double x) noexcept;
  void merge(const MeasureCell& other, Aggregator agg) noexcept;
};

/// Allowed members of one dimension at one level, kept so drill-down can
/// rebuild the same population.
struct Restriction {
  DimensionHierarchy hierarchy;
  std::size_t level = 0;
  std::vector<Value> members;
};

/// Materialized cube. Coordinates hold one member per dimension whose level
/// is below ALL, in dimension order; a null member is UNKNOWN.
class DataCube {
 public:
  /// One entry per measure plus a trailing source-row counter.
  using Cells = std::unordered_map<Row, std::vector<MeasureCell>, RowHash, RowEq>;

  const CubeDef& def() const noexcept { return def_; }
  const Cells& cells() const noexcept { return cells_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }
  std::size_t source_rows() const noexcept { return source_rows_; }
  const std::vector<Restriction>& restrictions() const noexcept { return restrictions_; }
  /// Catalog the cube was built against.
  const ConstellationSchema& schema() const noexcept { return *schema_; }

  /// Aggregator of cell entry `slot`; the trailing row counter counts.
  Aggregator aggregator(std::size_t slot) const noexcept;
  /// Dimension index by hierarchy name (case-insensitive).
  std::optional<std::size_t> dimension_index(std::string_view name) const noexcept;
  /// Position of a dimension within coordinates, or empty at ALL.
  std::optional<std::size_t> coordinate_slot(std::size_t dim) const noexcept;
  /// Member one level up from `member` at `level` of dimension `dim`.
  const Value& parent_member(std::size_t dim, std::size_t level, const Value& member) const;
  /// Rows for which some level's path did not resolve; such rows sit in UNKNOWN.
  std::size_t dangling_rows(std::size_t dim) const noexcept { return dangling_[dim]; }

  /// Finalized measure value: SUM of no inputs and MAX of no inputs are NULL.
  Value measure_value(std::size_t measure, const MeasureCell& cell) const;
  /// Sum over all cells of each measure (count/sum add, max maxes).
  std::vector<Value> totals() const;
  /// Cells sorted by coordinate.
  std::vector<std::pair<Row, std::vector<Value>>> sorted_cells() const;

  std::string to_json() const;

 private:
  friend DataCube build_cube(const StorageEngine&, const CubeDef&, const std::vector<Restriction>&);
  friend DataCube roll_up(const DataCube&, std::string_view, std::string_view);
  friend DataCube slice(const DataCube&, std::string_view, const Value&);
  friend DataCube dice(const DataCube&, const std::map<std::string, std::vector<Value>>&);

  CubeDef def_;
  std::shared_ptr<const ConstellationSchema> schema_;
  Cells cells_;
  std::size_t source_rows_ = 0;
  std::vector<Restriction> restrictions_;
  std::vector<std::size_t> dangling_;
  std::vector<DataType> measure_types_;
  /// Per dimension, per level i: member at i -> member at i + 1.
  std::vector<std::vector<std::unordered_map<Value, Value, ValueHash, ValueEq>>> parents_;
};

/// Thrown when a hierarchy level does not determine the next one.
class FunctionalDependencyError : public CubeError {
 public:
  FunctionalDependencyError(std::string message, std::int64_t first_row, std::int64_t second_row)
      : CubeError(std::move(message)), first_row_(first_row), second_row_(second_row) {}
  /// Primary keys of two fact rows with equal fine and different coarse members.
  std::int64_t first_row() const noexcept { return first_row_; }
  std::int64_t second_row() const noexcept { return second_row_; }

 private:
  std::int64_t first_row_;
  std::int64_t second_row_;
};

/// Validates `def` against the engine's catalog; returns every problem.
std::vector<std::string> validate_cube(const CubeDef& def, const ConstellationSchema& schema);

/// Aggregates the fact table into one cell per coordinate present. Rows are
/// kept only when every restriction admits them. Throws CubeError on an
/// invalid definition and FunctionalDependencyError on a hierarchy violation.
DataCube build_cube(const StorageEngine& engine, const CubeDef& def, const std::vector<Restriction>& restrictions = {});

/// Re-keys `dimension` to the coarser `level` (a level name or "ALL").
DataCube roll_up(const DataCube& cube, std::string_view dimension, std::string_view level);

/// Rebuilds from base facts with `dimension` at the finer `level`.
DataCube drill_down(const DataCube& cube, std::string_view dimension, std::string_view level,
                    const StorageEngine& engine);

/// Keeps cells whose member of `dimension` equals `member`, then removes the dimension.
DataCube slice(const DataCube& cube, std::string_view dimension, const Value& member);

/// Keeps cells whose members lie in the given per-dimension sets.
DataCube dice(const DataCube& cube, const std::map<std::string, std::vector<Value>>& members);

/// Two-axis view of a cube.
struct PivotTable {
  std::vector<std::string> row_dimensions;
  std::vector<std::string> column_dimensions;
  std::vector<Row> row_keys;     ///< sorted
  std::vector<Row> column_keys;  ///< sorted
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Value>> cells;

  /// Measure vector at (row key index, column key index), or null.
  const std::vector<Value>* at(std::size_t r, std::size_t c) const;
};

/// Row and column dimensions must partition the cube's non-ALL dimensions.
PivotTable pivot(const DataCube& cube, const std::vector<std::string>& rows, const std::vector<std::string>& columns);

/// Named hierarchies over the built-in schema (paths relative to a fact).
std::vector<DimensionHierarchy> builtin_hierarchies();
const DimensionHierarchy& builtin_hierarchy(std::string_view name);

/// Cubes materialized for the warehouse path.
std::vector<CubeDef> builtin_cubes();

/// Built-in cube definition by name; throws CubeError when unknown.
CubeDef builtin_cube(std::string_view name);

/// `{"name","fact","dimensions":[{"hierarchy","level"}],"measures":[{"name","aggregator","column"}]}`;
/// hierarchies are referenced by built-in name.
std::string cube_def_to_json(const CubeDef& def);
/// Throws ParseError on malformed JSON and CubeError on unknown names.
CubeDef cube_def_from_json(std::string_view text);

/// Type of the members of `level` in a cube over `fact`.
DataType member_type(const ConstellationSchema& schema, const std::string& fact, const Level& level);

/// Built cubes available to HOLAP routing.
class CubeRegistry {
 public:
  void add(std::shared_ptr<const DataCube> cube) { cubes_.push_back(std::move(cube)); }
  const std::vector<std::shared_ptr<const DataCube>>& cubes() const noexcept { return cubes_; }
  bool empty() const noexcept { return cubes_.empty(); }

 private:
  std::vector<std::shared_ptr<const DataCube>> cubes_;
};

/// Builds every definition in order.
CubeRegistry build_registry(const StorageEngine& engine, const std::vector<CubeDef>& defs);

struct HolapResult {
  sql::ExecPath path = sql::ExecPath::Rolap;
  std::string cube;  ///< cube used on the molap path
  ResultSet result;
};

/// Name of the first registered cube that can answer `plan`, if any.
std::optional<std::size_t> match_cube(const sql::QueryPlan& plan, const CubeRegistry& registry);

/// Answers from a matching cube (path molap) or falls back to the column store.
HolapResult route_holap(const sql::QueryPlan& plan, const CubeRegistry& registry, const ColumnStore& store);

}  // namespace adw::olap
