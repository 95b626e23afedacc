#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "adw/schema.hpp"
#include "adw/value.hpp"

namespace adw::datagen {

enum class DefectClass : std::uint8_t { Duplicate, Missing, Inconsistent, Wrong };

inline constexpr std::array<DefectClass, 4> kDefectClasses = {DefectClass::Duplicate, DefectClass::Missing,
                                                              DefectClass::Inconsistent, DefectClass::Wrong};

std::string_view to_string(DefectClass c) noexcept;
std::optional<DefectClass> parse_defect_class(std::string_view s) noexcept;

struct DefectRates {
  double duplicate = 0;
  double missing = 0;
  double inconsistent = 0;
  double wrong = 0;

  double& operator[](DefectClass c) noexcept;
  double operator[](DefectClass c) const noexcept;
};

struct GenConfig {
  std::uint64_t seed = 42;
  std::int64_t scale = 10000;  ///< FieldFact rows before defects
  DefectRates rates;
  Date start = make_date(2014, 1, 1);
  Date end = make_date(2018, 12, 31);

  /// Throws ConfigError when a rate is outside [0,1], the rates sum above
  /// 0.5, start > end, or scale < 1.
  void validate() const;
};

/// Number of defects of one class: floor(rate * base_rows).
std::size_t defect_count(double rate, std::size_t base_rows) noexcept;

struct DefectEntry {
  std::int64_t ordinal = 0;  ///< 1-based data row in the emitted file (header excluded)
  std::int64_t key = 0;      ///< primary key of the row
  std::string column;        ///< column altered; empty for duplicates
};

struct TableLedger {
  std::size_t base_rows = 0;     ///< rows generated before duplicates were appended
  std::size_t emitted_rows = 0;  ///< data rows in the file
  std::array<std::vector<DefectEntry>, 4> defects;

  std::size_t count(DefectClass c) const noexcept { return defects[static_cast<std::size_t>(c)].size(); }
  const std::vector<DefectEntry>& entries(DefectClass c) const noexcept { return defects[static_cast<std::size_t>(c)]; }
};

/// Ground truth of every injected defect.
struct DefectLedger {
  GenConfig config;
  std::map<std::string, TableLedger> tables;

  std::size_t total(DefectClass c) const noexcept;
  std::string to_json() const;
  static DefectLedger from_json(std::string_view text);
};

/// Raw CSV text per table plus the ledger.
struct RawDataset {
  std::map<std::string, std::string> files;  ///< table name -> CSV document
  DefectLedger ledger;
};

/// Rows generated for `table` at `scale` before defect injection.
std::size_t table_rows(std::string_view table, TableKind kind, std::int64_t scale) noexcept;

/// Fixed value pools keyed by `Table.Column`.
const std::map<std::string, std::vector<std::string>, CaseInsensitiveLess>& vocabularies();

/// Deterministic generation: identical (schema, config) gives byte-identical files.
RawDataset generate(const ConstellationSchema& schema, const GenConfig& cfg);

/// Writes `<table>.csv` per table and `ledger.json` into `dir` (created if needed).
void write_dataset(const RawDataset& data, const std::filesystem::path& dir);

/// Reads the files written by write_dataset. Missing `ledger.json` leaves the ledger empty.
RawDataset read_dataset(const ConstellationSchema& schema, const std::filesystem::path& dir);

}  // namespace adw::datagen
