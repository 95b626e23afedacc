#include "adw/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>

#include "adw/strings.hpp"

namespace adw {

std::string_view to_string(DataType t) noexcept {
  switch (t) {
    case DataType::Int64: return "int64";
    case DataType::Float64: return "float64";
    case DataType::Text: return "text";
    case DataType::Date: return "date";
    case DataType::Bool: return "bool";
    case DataType::GeoPoint: return "geo_point";
    case DataType::GeoPolygon: return "geo_polygon";
  }
  return "?";
}

std::optional<DataType> parse_data_type(std::string_view name) noexcept {
  static constexpr std::pair<std::string_view, DataType> kNames[] = {
      {"int64", DataType::Int64},         {"float64", DataType::Float64}, {"text", DataType::Text},
      {"date", DataType::Date},           {"bool", DataType::Bool},       {"geo_point", DataType::GeoPoint},
      {"geo_polygon", DataType::GeoPolygon},
  };
  for (const auto& [n, t] : kNames) {
    if (iequals(n, name)) return t;
  }
  return std::nullopt;
}

// Days/civil conversions after H. Hinnant's public-domain algorithms.
Date make_date(int year, unsigned month, unsigned day) noexcept {
  const int y = year - (month <= 2 ? 1 : 0);
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return Date{static_cast<std::int32_t>(era * 146097 + static_cast<int>(doe) - 719468)};
}

CivilDate to_civil(Date date) noexcept {
  const int z = date.days + 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return CivilDate{y + (m <= 2 ? 1 : 0), m, d};
}

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(int y, unsigned m) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return (m == 2 && is_leap(y)) ? 29 : kDays[m - 1];
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T out{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || s.empty()) return std::nullopt;
  return out;
}

}  // namespace

std::optional<Date> parse_date(std::string_view s) noexcept {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto y = parse_number<int>(s.substr(0, 4));
  auto m = parse_number<unsigned>(s.substr(5, 2));
  auto d = parse_number<unsigned>(s.substr(8, 2));
  if (!y || !m || !d || *m < 1 || *m > 12 || *d < 1 || *d > days_in_month(*y, *m)) return std::nullopt;
  return make_date(*y, *m, *d);
}

std::string format_date(Date d) {
  const CivilDate c = to_civil(d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", c.year, c.month, c.day);
  return buf;
}

std::optional<DataType> type_of(const Value& v) noexcept {
  switch (v.index()) {
    case 1: return DataType::Int64;
    case 2: return DataType::Float64;
    case 3: return DataType::Text;
    case 4: return DataType::Date;
    case 5: return DataType::Bool;
    case 6: return DataType::GeoPoint;
    case 7: return DataType::GeoPolygon;
    default: return std::nullopt;
  }
}

std::optional<double> as_double(const Value& v) noexcept {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

namespace {

template <typename T>
int three_way(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

int compare_numeric(const Value& a, const Value& b) {
  const auto* ai = std::get_if<std::int64_t>(&a);
  const auto* bi = std::get_if<std::int64_t>(&b);
  if (ai && bi) return three_way(*ai, *bi);
  const double x = *as_double(a);
  const double y = *as_double(b);
  return three_way(x, y);
}

bool numeric_index(std::size_t i) { return i == 1 || i == 2; }

int compare_same_kind(const Value& a, const Value& b) {
  switch (a.index()) {
    case 3: return three_way(std::get<std::string>(a).compare(std::get<std::string>(b)), 0);
    case 4: return three_way(std::get<Date>(a), std::get<Date>(b));
    case 5: return three_way(std::get<bool>(a), std::get<bool>(b));
    case 6: return three_way(std::get<GeoPoint>(a), std::get<GeoPoint>(b));
    case 7: return three_way(std::get<GeoPolygon>(a), std::get<GeoPolygon>(b));
    default: return 0;
  }
}

}  // namespace

int compare_total(const Value& a, const Value& b) noexcept {
  const bool an = is_null(a);
  const bool bn = is_null(b);
  if (an || bn) return an == bn ? 0 : (an ? -1 : 1);
  if (numeric_index(a.index()) && numeric_index(b.index())) return compare_numeric(a, b);
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  return compare_same_kind(a, b);
}

std::optional<int> compare_sql(const Value& a, const Value& b) noexcept {
  if (is_null(a) || is_null(b)) return std::nullopt;
  if (numeric_index(a.index()) && numeric_index(b.index())) return compare_numeric(a, b);
  if (a.index() != b.index()) return std::nullopt;
  return compare_same_kind(a, b);
}

bool equal_total(const Value& a, const Value& b) noexcept { return compare_total(a, b) == 0; }

namespace {

inline std::size_t mix(std::size_t h, std::size_t v) noexcept {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_double(double d) noexcept {
  if (d == 0) return std::hash<std::int64_t>{}(0);
  if (std::trunc(d) == d && std::fabs(d) < 9.0e18) {
    return std::hash<std::int64_t>{}(static_cast<std::int64_t>(d));
  }
  return std::hash<double>{}(d);
}

}  // namespace

std::size_t hash_value(const Value& v) noexcept {
  switch (v.index()) {
    case 0: return 0x51ed270b;
    case 1: return std::hash<std::int64_t>{}(std::get<std::int64_t>(v));
    case 2: return hash_double(std::get<double>(v));
    case 3: return std::hash<std::string_view>{}(std::get<std::string>(v));
    case 4: return mix(4, std::hash<std::int32_t>{}(std::get<Date>(v).days));
    case 5: return std::get<bool>(v) ? 0x2545f491 : 0x4f6cdd1d;
    case 6: {
      const auto& p = std::get<GeoPoint>(v);
      return mix(std::hash<double>{}(p.lat), std::hash<double>{}(p.lon));
    }
    case 7: {
      std::size_t h = 7;
      for (const auto& p : std::get<GeoPolygon>(v).points) {
        h = mix(mix(h, std::hash<double>{}(p.lat)), std::hash<double>{}(p.lon));
      }
      return h;
    }
  }
  return 0;
}

std::size_t RowHash::operator()(const std::vector<Value>& row) const noexcept {
  std::size_t h = row.size();
  for (const auto& v : row) h = mix(h, hash_value(v));
  return h;
}

bool RowEq::operator()(const std::vector<Value>& a, const std::vector<Value>& b) const noexcept {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!equal_total(a[i], b[i])) return false;
  }
  return true;
}

bool RowLess::operator()(const std::vector<Value>& a, const std::vector<Value>& b) const noexcept {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int c = compare_total(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

std::string format_double(double d) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

std::string format_point(const GeoPoint& p) { return format_double(p.lat) + " " + format_double(p.lon); }

}  // namespace

std::string format_value(const Value& v, std::string_view null_text) {
  switch (v.index()) {
    case 0: return std::string(null_text);
    case 1: return std::to_string(std::get<std::int64_t>(v));
    case 2: return format_double(std::get<double>(v));
    case 3: return std::get<std::string>(v);
    case 4: return format_date(std::get<Date>(v));
    case 5: return std::get<bool>(v) ? "true" : "false";
    case 6: return format_point(std::get<GeoPoint>(v));
    case 7: {
      std::string out;
      for (const auto& p : std::get<GeoPolygon>(v).points) {
        if (!out.empty()) out += ';';
        out += format_point(p);
      }
      return out;
    }
  }
  return {};
}

std::optional<std::int64_t> parse_int64(std::string_view s) noexcept { return parse_number<std::int64_t>(s); }

std::optional<double> parse_double(std::string_view s) noexcept {
  auto d = parse_number<double>(s);
  if (!d || !std::isfinite(*d)) return std::nullopt;
  return d;
}

std::optional<bool> parse_bool(std::string_view s) noexcept {
  if (iequals(s, "true") || s == "1") return true;
  if (iequals(s, "false") || s == "0") return false;
  return std::nullopt;
}

std::optional<GeoPoint> parse_geo_point(std::string_view s) noexcept {
  s = trim(s);
  const auto space = s.find(' ');
  if (space == std::string_view::npos) return std::nullopt;
  auto lat = parse_double(trim(s.substr(0, space)));
  auto lon = parse_double(trim(s.substr(space + 1)));
  if (!lat || !lon || *lat < -90 || *lat > 90 || *lon < -180 || *lon > 180) return std::nullopt;
  return GeoPoint{*lat, *lon};
}

std::optional<GeoPolygon> parse_geo_polygon(std::string_view s) noexcept {
  GeoPolygon poly;
  while (!s.empty()) {
    const auto semi = s.find(';');
    auto p = parse_geo_point(s.substr(0, semi));
    if (!p) return std::nullopt;
    poly.points.push_back(*p);
    if (semi == std::string_view::npos) break;
    s.remove_prefix(semi + 1);
  }
  if (poly.points.empty()) return std::nullopt;
  return poly;
}

std::optional<Value> parse_value(std::string_view text, DataType type) {
  if (text.empty()) return Value{};
  switch (type) {
    case DataType::Int64:
      if (auto v = parse_int64(text)) return Value{*v};
      break;
    case DataType::Float64:
      if (auto v = parse_double(text)) return Value{*v};
      break;
    case DataType::Text: return Value{std::string(text)};
    case DataType::Date:
      if (auto v = parse_date(text)) return Value{*v};
      break;
    case DataType::Bool:
      if (auto v = parse_bool(text)) return Value{*v};
      break;
    case DataType::GeoPoint:
      if (auto v = parse_geo_point(text)) return Value{*v};
      break;
    case DataType::GeoPolygon:
      if (auto v = parse_geo_polygon(text)) return Value{std::move(*v)};
      break;
  }
  return std::nullopt;
}

bool conforms(const Value& v, DataType t) noexcept {
  if (is_null(v)) return true;
  return type_of(v) == t;
}

}  // namespace adw
