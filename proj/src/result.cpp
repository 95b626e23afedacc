#include "adw/result.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "adw/csv.hpp"

namespace adw {

std::string to_text(const ResultSet& r) {
  std::string out;
  for (std::size_t i = 0; i < r.headers.size(); ++i) {
    if (i) out += '\t';
    out += r.headers[i];
  }
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += '\t';
      out += format_value(row[i], "NULL");
    }
    out += '\n';
  }
  return out;
}

std::string to_csv(const ResultSet& r) {
  std::string out;
  csv::append_record(out, r.headers);
  std::vector<std::string> fields;
  for (const auto& row : r.rows) {
    fields.clear();
    for (const auto& v : row) fields.push_back(format_value(v));
    csv::append_record(out, fields);
  }
  return out;
}

namespace {

nlohmann::json json_value(const Value& v) {
  if (is_null(v)) return nullptr;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  return format_value(v);
}

std::string canonical_cell(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", *d == 0 ? 0.0 : *d);
    return buf;
  }
  return is_null(v) ? std::string("\x01null") : format_value(v);
}

}  // namespace

std::string to_json(const ResultSet& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& v : row) cells.push_back(json_value(v));
    rows.push_back(std::move(cells));
  }
  nlohmann::json out;
  out["headers"] = r.headers;
  out["rows"] = std::move(rows);
  return out.dump();
}

std::string result_digest(const ResultSet& r) {
  std::vector<std::string> lines;
  lines.reserve(r.rows.size());
  for (const auto& row : r.rows) {
    std::string line;
    for (const auto& v : row) {
      line += canonical_cell(v);
      line += '\x1f';
    }
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  std::uint64_t h = 14695981039346656037ULL;
  auto feed = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& hd : r.headers) {
    feed(hd);
    feed("\x1e");
  }
  for (const auto& l : lines) {
    feed(l);
    feed("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool values_close(const Value& a, const Value& b, double rel_tol) noexcept {
  const bool af = std::holds_alternative<double>(a);
  const bool bf = std::holds_alternative<double>(b);
  if (af || bf) {
    const auto x = as_double(a);
    const auto y = as_double(b);
    if (!x || !y) return false;
    if (*x == *y) return true;
    const double scale = std::max(std::fabs(*x), std::fabs(*y));
    return std::fabs(*x - *y) <= rel_tol * scale;
  }
  return equal_total(a, b);
}

namespace {

// Exact columns first, float columns last, so near-equal floats cannot
// reorder rows that differ elsewhere.
struct CanonicalLess {
  const std::vector<std::size_t>* order;
  bool operator()(const Row& a, const Row& b) const noexcept {
    for (std::size_t c : *order) {
      const int k = compare_total(a[c], b[c]);
      if (k != 0) return k < 0;
    }
    return false;
  }
};

bool same_multiset(std::vector<Row> a, std::vector<Row> b, const std::vector<std::size_t>& order, double tol,
                   std::string* why) {
  std::sort(a.begin(), a.end(), CanonicalLess{&order});
  std::sort(b.begin(), b.end(), CanonicalLess{&order});
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) {
      if (why) *why = "row width differs";
      return false;
    }
    for (std::size_t c = 0; c < a[i].size(); ++c) {
      if (!values_close(a[i][c], b[i][c], tol)) {
        if (why) {
          *why = "row differs at column " + std::to_string(c + 1) + ": expected " + format_value(a[i][c], "NULL") +
                 ", got " + format_value(b[i][c], "NULL");
        }
        return false;
      }
    }
  }
  return true;
}

}  // namespace

bool equivalent_results(const ResultSet& expected, const ResultSet& actual, const sql::QueryPlan& plan,
                        std::string* why, CompareOptions opts) {
  if (expected.rows.size() != actual.rows.size()) {
    if (why) {
      *why = "row count " + std::to_string(actual.rows.size()) + " != expected " +
             std::to_string(expected.rows.size());
    }
    return false;
  }
  const std::size_t width = expected.headers.size();
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < width; ++c) {
    if (c >= expected.types.size() || expected.types[c] != DataType::Float64) order.push_back(c);
  }
  for (std::size_t c = 0; c < width; ++c) {
    if (c < expected.types.size() && expected.types[c] == DataType::Float64) order.push_back(c);
  }
  if (plan.order.empty()) return same_multiset(expected.rows, actual.rows, order, opts.rel_tol, why);

  auto keys_close = [&](const Row& a, const Row& b) {
    for (const auto& k : plan.order) {
      const auto c = static_cast<std::size_t>(k.column);
      if (!values_close(a[c], b[c], opts.rel_tol)) return false;
    }
    return true;
  };
  const auto& e = expected.rows;
  const auto& a = actual.rows;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!keys_close(e[i], a[i])) {
      if (why) *why = "sort keys differ at row " + std::to_string(i + 1);
      return false;
    }
  }
  std::size_t start = 0;
  while (start < e.size()) {
    std::size_t end = start + 1;
    while (end < e.size() && keys_close(e[start], e[end])) ++end;
    std::vector<Row> ge(e.begin() + static_cast<std::ptrdiff_t>(start), e.begin() + static_cast<std::ptrdiff_t>(end));
    std::vector<Row> ga(a.begin() + static_cast<std::ptrdiff_t>(start), a.begin() + static_cast<std::ptrdiff_t>(end));
    if (!same_multiset(std::move(ge), std::move(ga), order, opts.rel_tol, why)) return false;
    start = end;
  }
  return true;
}

}  // namespace adw
