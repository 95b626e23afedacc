#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace adw {

/// The seven column kinds a warehouse table may declare.
enum class DataType : std::uint8_t { Int64, Float64, Text, Date, Bool, GeoPoint, GeoPolygon };

std::string_view to_string(DataType t) noexcept;
std::optional<DataType> parse_data_type(std::string_view name) noexcept;
inline bool is_numeric(DataType t) noexcept { return t == DataType::Int64 || t == DataType::Float64; }

/// Calendar date as days since 1970-01-01 (proleptic Gregorian).
struct Date {
  std::int32_t days = 0;
  auto operator<=>(const Date&) const = default;
};

struct CivilDate {
  int year;
  unsigned month;
  unsigned day;
};

Date make_date(int year, unsigned month, unsigned day) noexcept;
CivilDate to_civil(Date d) noexcept;
/// Strict ISO-8601 `YYYY-MM-DD`; rejects impossible days.
std::optional<Date> parse_date(std::string_view s) noexcept;
std::string format_date(Date d);

/// WGS84 degrees.
struct GeoPoint {
  double lat = 0;
  double lon = 0;
  auto operator<=>(const GeoPoint&) const = default;
};

struct GeoPolygon {
  std::vector<GeoPoint> points;
  auto operator<=>(const GeoPolygon&) const = default;
};

/// A nullable typed cell. `std::monostate` is SQL NULL.
using Value = std::variant<std::monostate, std::int64_t, double, std::string, Date, bool, GeoPoint, GeoPolygon>;

inline bool is_null(const Value& v) noexcept { return std::holds_alternative<std::monostate>(v); }

/// Type of a non-null value.
std::optional<DataType> type_of(const Value& v) noexcept;

/// Numeric view of int64/double values.
std::optional<double> as_double(const Value& v) noexcept;

/// Total order used for sorting and grouping: NULL sorts first, int64 and
/// double compare numerically, otherwise values of different kinds order by kind.
int compare_total(const Value& a, const Value& b) noexcept;

/// SQL comparison: empty when either side is NULL or the kinds are not comparable.
std::optional<int> compare_sql(const Value& a, const Value& b) noexcept;

bool equal_total(const Value& a, const Value& b) noexcept;

std::size_t hash_value(const Value& v) noexcept;

struct ValueHash {
  std::size_t operator()(const Value& v) const noexcept { return hash_value(v); }
};
struct ValueEq {
  bool operator()(const Value& a, const Value& b) const noexcept { return equal_total(a, b); }
};

struct RowHash {
  std::size_t operator()(const std::vector<Value>& row) const noexcept;
};
struct RowEq {
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const noexcept;
};
struct RowLess {
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const noexcept;
};

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double d);

/// Canonical text form. NULL renders as `null_text`.
std::string format_value(const Value& v, std::string_view null_text = "");

std::optional<std::int64_t> parse_int64(std::string_view s) noexcept;
std::optional<double> parse_double(std::string_view s) noexcept;
std::optional<bool> parse_bool(std::string_view s) noexcept;
/// `lat lon` separated by a single space.
std::optional<GeoPoint> parse_geo_point(std::string_view s) noexcept;
/// Points `lat lon` separated by `;`.
std::optional<GeoPolygon> parse_geo_polygon(std::string_view s) noexcept;

/// Parses one cell of the given type. Empty text yields NULL.
std::optional<Value> parse_value(std::string_view text, DataType type);

/// True when `v` holds the representation `t` requires (NULL conforms to every type).
bool conforms(const Value& v, DataType t) noexcept;

}  // namespace adw
