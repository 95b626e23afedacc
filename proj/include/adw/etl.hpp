#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "adw/datagen.hpp"
#include "adw/schema.hpp"
#include "adw/storage.hpp"

namespace adw::etl {

using datagen::DefectClass;

/// Untyped rows of one source file, columns already in catalog order.
struct StagingBatch {
  std::string table;
  std::string source;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::int64_t> ordinals;  ///< 1-based data row numbers, strictly increasing
};

enum class Action : std::uint8_t { Rejected, Corrected };

struct ClassReport {
  std::size_t detected = 0;
  std::size_t rejected = 0;
  std::size_t corrected = 0;
  std::vector<std::int64_t> ordinals;
};

struct TableReport {
  std::size_t input_rows = 0;
  std::size_t output_rows = 0;
  std::array<ClassReport, 4> classes;

  const ClassReport& of(DefectClass c) const noexcept { return classes[static_cast<std::size_t>(c)]; }
  ClassReport& of(DefectClass c) noexcept { return classes[static_cast<std::size_t>(c)]; }
  std::size_t rejected_total() const noexcept;
};

struct CleansingReport {
  std::map<std::string, TableReport> tables;

  std::size_t detected(DefectClass c) const noexcept;
  std::string to_json() const;
  static CleansingReport from_json(std::string_view text);
};

struct EtlOptions {
  Date start = make_date(2014, 1, 1);  ///< dates outside [start, end] are inconsistent
  Date end = make_date(2018, 12, 31);
};

/// One batch per catalog table. Throws EtlError on malformed CSV (naming file
/// and line), unknown or missing header columns, wrong cell counts, or a
/// missing table file.
std::vector<StagingBatch> extract(const datagen::RawDataset& files, const ConstellationSchema& schema);

/// Per-table checks (duplicate, missing, inconsistent). Rejected rows are
/// recorded in `report`; survivors are typed.
Relation cleanse(const StagingBatch& batch, const ConstellationSchema& schema, const EtlOptions& options,
                 TableReport& report);

/// Whole-dataset dangling foreign-key pass, parents before children.
void check_foreign_keys(std::map<std::string, Relation>& relations, const ConstellationSchema& schema,
                        CleansingReport& report, std::map<std::string, std::vector<std::int64_t>>& row_ordinals);

/// Derives Season (from the start/order date month) and Nutrient.Year.
/// Throws EtlError when a foreign key does not resolve. Idempotent.
void transform(std::map<std::string, Relation>& relations, const ConstellationSchema& schema);

/// Season of a month: Dec-Feb Winter, Mar-May Spring, Jun-Aug Summer, Sep-Nov Autumn.
std::string_view season_of(unsigned month) noexcept;

struct LoadSummary {
  std::vector<std::string> targets;  ///< engine kinds in load order
  std::map<std::string, std::vector<std::size_t>> rows;
};

/// Loads every relation into every target. Throws EtlError("table not
/// empty: ...") before writing anything if a target already holds rows.
LoadSummary load(const std::map<std::string, Relation>& relations, const std::vector<StorageEngine*>& targets);

struct EtlResult {
  std::map<std::string, Relation> relations;
  CleansingReport report;
};

/// extract -> cleanse -> foreign-key pass -> transform.
EtlResult run(const datagen::RawDataset& files, const ConstellationSchema& schema, const EtlOptions& options = {});

}  // namespace adw::etl
