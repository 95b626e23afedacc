#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "adw/schema.hpp"
#include "adw/sql/expr.hpp"
#include "adw/value.hpp"

namespace adw {

using Row = std::vector<Value>;

/// A named, typed, ordered collection of rows.
struct Relation {
  std::string table;
  std::vector<ColumnDef> columns;
  std::vector<Row> rows;

  std::size_t size() const noexcept { return rows.size(); }
  std::optional<std::size_t> column_index(std::string_view name) const noexcept;
};

/// Empty relation carrying every column of `def`.
Relation make_relation(const TableDef& def);

/// Checks types, nullability and PK uniqueness; returns every problem found.
std::vector<std::string> check_relation(const Relation& rel, const TableDef& def);

enum class EngineKind : std::uint8_t { Row = 0, Column = 1 };

std::string_view to_string(EngineKind k) noexcept;

/// Common contract of both storage engines.
///
/// Tables are created empty from the catalog at construction. Each table has
/// its own readers-writer lock: any number of concurrent scans, or one insert.
class StorageEngine {
 public:
  explicit StorageEngine(std::shared_ptr<const ConstellationSchema> schema);
  virtual ~StorageEngine() = default;
  StorageEngine(const StorageEngine&) = delete;
  StorageEngine& operator=(const StorageEngine&) = delete;

  virtual EngineKind kind() const noexcept = 0;
  const ConstellationSchema& schema() const noexcept { return *schema_; }
  std::shared_ptr<const ConstellationSchema> schema_ptr() const noexcept { return schema_; }

  /// Appends all rows atomically. Throws StorageError on a type mismatch,
  /// null in a non-nullable column, or PK collision; nothing is inserted then.
  std::size_t insert_batch(const Relation& rel);

  /// Rows of `table` restricted to `columns` (all when empty), in insertion
  /// order, keeping rows where `predicate` (bound over the table's columns as
  /// source 0) is true.
  Relation scan(std::string_view table, const std::vector<std::string>& columns = {},
                const sql::Expr* predicate = nullptr) const;

  std::optional<Row> lookup_pk(std::string_view table, const Value& key) const;
  std::size_t row_count(std::string_view table) const;

  /// Drops every row of every table.
  void reset();

  /// Writes all tables to a single binary file (layout in docs/formats.md).
  void save_snapshot(const std::string& path) const;
  /// Replaces the engine contents with a snapshot taken from the same schema.
  void load_snapshot(const std::string& path);

  /// Index of `table` in catalog order; throws StorageError when unknown.
  std::size_t table_id(std::string_view table) const;
  const TableDef& table_def(std::size_t id) const noexcept { return *defs_[id]; }
  std::size_t table_count() const noexcept { return defs_.size(); }

  std::shared_lock<std::shared_mutex> read_lock(std::size_t id) const {
    return std::shared_lock<std::shared_mutex>(*locks_[id]);
  }

 protected:
  virtual void do_append(std::size_t id, const Relation& rel) = 0;
  virtual void do_scan(std::size_t id, const std::vector<std::size_t>& columns, const sql::Expr* predicate,
                       std::vector<Row>& out) const = 0;
  virtual std::optional<std::size_t> do_find(std::size_t id, const Value& key) const = 0;
  virtual Row do_row(std::size_t id, std::size_t row) const = 0;
  virtual std::size_t do_count(std::size_t id) const = 0;
  virtual void do_reset(std::size_t id) = 0;

 private:
  std::shared_ptr<const ConstellationSchema> schema_;
  std::vector<const TableDef*> defs_;
  std::vector<std::unique_ptr<std::shared_mutex>> locks_;
};

/// Row-at-a-time store with only a primary-key hash index.
class RowStore final : public StorageEngine {
 public:
  explicit RowStore(std::shared_ptr<const ConstellationSchema> schema);

  EngineKind kind() const noexcept override { return EngineKind::Row; }

  /// Direct access for executors; hold read_lock(id) while using.
  const std::vector<Row>& rows(std::size_t id) const noexcept { return tables_[id].rows; }
  /// Row with the given primary key, or null.
  const Row* find(std::size_t id, const Value& key) const noexcept;

 protected:
  void do_append(std::size_t id, const Relation& rel) override;
  void do_scan(std::size_t id, const std::vector<std::size_t>& columns, const sql::Expr* predicate,
               std::vector<Row>& out) const override;
  std::optional<std::size_t> do_find(std::size_t id, const Value& key) const override;
  Row do_row(std::size_t id, std::size_t row) const override { return tables_[id].rows[row]; }
  std::size_t do_count(std::size_t id) const override { return tables_[id].rows.size(); }
  void do_reset(std::size_t id) override;

 private:
  struct Table {
    std::vector<Row> rows;
    std::unordered_map<Value, std::size_t, ValueHash, ValueEq> pk;
  };
  std::vector<Table> tables_;
};

/// One column of a column-store table: a typed value vector plus null flags.
class ColumnSegment {
 public:
  using Storage = std::variant<std::vector<std::int64_t>, std::vector<double>, std::vector<std::string>,
                               std::vector<std::int32_t>, std::vector<std::uint8_t>, std::vector<GeoPoint>,
                               std::vector<GeoPolygon>>;

  ColumnSegment(std::string name, DataType type);

  const std::string& name() const noexcept { return name_; }
  DataType type() const noexcept { return type_; }
  std::size_t size() const noexcept { return nulls_.size(); }
  bool is_null(std::size_t i) const noexcept { return nulls_[i] != 0; }
  bool has_nulls() const noexcept { return null_count_ > 0; }
  const std::vector<std::uint8_t>& nulls() const noexcept { return nulls_; }

  /// Typed views; Date is stored as days, Bool as 0/1.
  const std::vector<std::int64_t>& ints() const { return std::get<0>(data_); }
  const std::vector<double>& doubles() const { return std::get<1>(data_); }
  const std::vector<std::string>& texts() const { return std::get<2>(data_); }
  const std::vector<std::int32_t>& dates() const { return std::get<3>(data_); }
  const std::vector<std::uint8_t>& bools() const { return std::get<4>(data_); }
  const std::vector<GeoPoint>& points() const { return std::get<5>(data_); }
  const std::vector<GeoPolygon>& polygons() const { return std::get<6>(data_); }

  Value value(std::size_t i) const;
  void push(const Value& v);
  void clear();

 private:
  std::string name_;
  DataType type_;
  Storage data_;
  std::vector<std::uint8_t> nulls_;
  std::size_t null_count_ = 0;
};

/// Columnar store: one segment per column, read only on demand.
class ColumnStore final : public StorageEngine {
 public:
  explicit ColumnStore(std::shared_ptr<const ConstellationSchema> schema);

  EngineKind kind() const noexcept override { return EngineKind::Column; }

  /// Segment access for executors; counts as one segment read. Hold
  /// read_lock(id) while using.
  const ColumnSegment& segment(std::size_t id, std::size_t column) const;
  std::optional<std::size_t> find_row(std::size_t id, const Value& key) const { return do_find(id, key); }
  std::size_t rows(std::size_t id) const noexcept { return tables_[id].count; }

  /// Number of segment reads since construction or the last reset_access_counter().
  std::uint64_t segment_accesses() const noexcept { return accesses_.load(); }
  /// Reads of one column since the last reset_access_counter().
  std::uint64_t segment_accesses(std::string_view table, std::string_view column) const;
  void reset_access_counter() noexcept;

 protected:
  void do_append(std::size_t id, const Relation& rel) override;
  void do_scan(std::size_t id, const std::vector<std::size_t>& columns, const sql::Expr* predicate,
               std::vector<Row>& out) const override;
  std::optional<std::size_t> do_find(std::size_t id, const Value& key) const override;
  Row do_row(std::size_t id, std::size_t row) const override;
  std::size_t do_count(std::size_t id) const override { return tables_[id].count; }
  void do_reset(std::size_t id) override;

 private:
  struct Table {
    std::vector<ColumnSegment> segments;
    std::unique_ptr<std::atomic<std::uint64_t>[]> reads;
    std::size_t count = 0;
    std::unordered_map<Value, std::size_t, ValueHash, ValueEq> pk;
  };
  std::vector<Table> tables_;
  mutable std::atomic<std::uint64_t> accesses_{0};
};

}  // namespace adw
