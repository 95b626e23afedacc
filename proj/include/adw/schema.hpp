#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adw/strings.hpp"
#include "adw/value.hpp"

namespace adw {

enum class TableKind : std::uint8_t { Fact, Dimension };

std::string_view to_string(TableKind k) noexcept;

struct ColumnDef {
  std::string name;
  DataType type = DataType::Int64;
  bool nullable = false;

  bool operator==(const ColumnDef&) const = default;
};

struct ForeignKey {
  std::string column;
  std::string ref_table;
  std::string ref_column;

  bool operator==(const ForeignKey&) const = default;
};

struct TableDef {
  std::string name;
  TableKind kind = TableKind::Dimension;
  std::vector<ColumnDef> columns;
  std::string primary_key;
  std::vector<ForeignKey> foreign_keys;

  /// Case-insensitive column lookup.
  std::optional<std::size_t> column_index(std::string_view column) const noexcept;
  const ColumnDef* find_column(std::string_view column) const noexcept;
  /// Index of the primary-key column; throws if it does not resolve.
  std::size_t pk_index() const;
  const ForeignKey* foreign_key_for(std::string_view column) const noexcept;

  bool operator==(const TableDef&) const = default;
};

/// Fact and dimension tables plus the foreign-key links between them.
/// Immutable once built; safe to share between readers.
struct ConstellationSchema {
  std::map<std::string, TableDef, CaseInsensitiveLess> tables;
  std::string version;

  const TableDef* find_table(std::string_view name) const noexcept;
  /// Throws adw::Error when the table is unknown.
  const TableDef& table(std::string_view name) const;

  std::vector<std::string> fact_tables() const;
  std::vector<std::string> dimension_tables() const;
  /// Parents before children; ties broken by name. Cycles are appended last.
  std::vector<std::string> topological_order() const;

  bool operator==(const ConstellationSchema&) const = default;
};

/// The crop-data warehouse: FieldFact, OrderFact and SaleFact over 21
/// dimension tables.
ConstellationSchema builtin_adw_schema();

/// Every violated catalog invariant, one human-readable line each.
std::vector<std::string> validate_schema(const ConstellationSchema& schema);

/// Text form accepted by load_schema (see docs/formats.md).
std::string serialize_schema(const ConstellationSchema& schema);

/// Throws ParseError (with line/column) or ValidationError.
ConstellationSchema load_schema(std::string_view document);

/// FNV-1a 64 over the serialized form.
std::uint64_t schema_hash(const ConstellationSchema& schema);

}  // namespace adw
