#include "adw/storage.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <mutex>

#include "adw/error.hpp"

namespace adw {

std::optional<std::size_t> Relation::column_index(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (iequals(columns[i].name, name)) return i;
  }
  return std::nullopt;
}

Relation make_relation(const TableDef& def) {
  Relation r;
  r.table = def.name;
  r.columns = def.columns;
  return r;
}

std::vector<std::string> check_relation(const Relation& rel, const TableDef& def) {
  std::vector<std::string> problems;
  if (rel.columns.size() != def.columns.size()) {
    problems.push_back(def.name + ": relation has " + std::to_string(rel.columns.size()) + " columns, table has " +
                       std::to_string(def.columns.size()));
    return problems;
  }
  for (std::size_t c = 0; c < def.columns.size(); ++c) {
    if (!iequals(rel.columns[c].name, def.columns[c].name) || rel.columns[c].type != def.columns[c].type) {
      problems.push_back(def.name + ": column " + std::to_string(c + 1) + " is " + rel.columns[c].name + ":" +
                         std::string(to_string(rel.columns[c].type)) + ", expected " + def.columns[c].name + ":" +
                         std::string(to_string(def.columns[c].type)));
    }
  }
  if (!problems.empty()) return problems;
  const std::size_t pk = def.pk_index();
  std::unordered_map<Value, std::size_t, ValueHash, ValueEq> seen;
  for (std::size_t r = 0; r < rel.rows.size(); ++r) {
    const Row& row = rel.rows[r];
    if (row.size() != def.columns.size()) {
      problems.push_back(def.name + " row " + std::to_string(r + 1) + ": arity " + std::to_string(row.size()));
      continue;
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto& col = def.columns[c];
      if (is_null(row[c]) && !col.nullable) {
        problems.push_back(def.name + " row " + std::to_string(r + 1) + ": null in non-nullable column " + col.name);
      } else if (!conforms(row[c], col.type)) {
        problems.push_back(def.name + " row " + std::to_string(r + 1) + ": type mismatch in column " + col.name);
      }
    }
    if (!seen.emplace(row[pk], r).second) {
      problems.push_back(def.name + " row " + std::to_string(r + 1) + ": duplicate primary key " +
                         format_value(row[pk], "NULL"));
    }
  }
  return problems;
}

std::string_view to_string(EngineKind k) noexcept { return k == EngineKind::Row ? "row" : "column"; }

// StorageEngine ---------------------------------------------------------------

StorageEngine::StorageEngine(std::shared_ptr<const ConstellationSchema> schema) : schema_(std::move(schema)) {
  for (const auto& [name, def] : schema_->tables) {
    defs_.push_back(&def);
    locks_.push_back(std::make_unique<std::shared_mutex>());
  }
}

std::size_t StorageEngine::table_id(std::string_view table) const {
  for (std::size_t i = 0; i < defs_.size(); ++i) {
    if (iequals(defs_[i]->name, table)) return i;
  }
  throw StorageError("unknown table '" + std::string(table) + "'");
}

std::size_t StorageEngine::insert_batch(const Relation& rel) {
  const std::size_t id = table_id(rel.table);
  const TableDef& def = *defs_[id];
  auto problems = check_relation(rel, def);
  std::unique_lock lock(*locks_[id]);
  if (problems.empty()) {
    const std::size_t pk = def.pk_index();
    for (const auto& row : rel.rows) {
      if (do_find(id, row[pk])) {
        problems.push_back(def.name + ": primary key " + format_value(row[pk], "NULL") + " already stored");
        break;
      }
    }
  }
  if (!problems.empty()) {
    std::string msg = "insert into " + def.name + " rejected: " + problems.front();
    if (problems.size() > 1) msg += " (and " + std::to_string(problems.size() - 1) + " more)";
    throw StorageError(msg);
  }
  if (!rel.rows.empty()) do_append(id, rel);
  return rel.rows.size();
}

Relation StorageEngine::scan(std::string_view table, const std::vector<std::string>& columns,
                             const sql::Expr* predicate) const {
  const std::size_t id = table_id(table);
  const TableDef& def = *defs_[id];
  std::vector<std::size_t> idx;
  Relation out;
  out.table = def.name;
  if (columns.empty()) {
    for (std::size_t c = 0; c < def.columns.size(); ++c) idx.push_back(c);
  } else {
    for (const auto& name : columns) {
      auto c = def.column_index(name);
      if (!c) throw StorageError("unknown column '" + name + "' in table " + def.name);
      idx.push_back(*c);
    }
  }
  for (std::size_t c : idx) out.columns.push_back(def.columns[c]);
  if (predicate) {
    sql::for_each_column(*predicate, [&](int s, int c) {
      if (s != 0 || c < 0 || static_cast<std::size_t>(c) >= def.columns.size()) {
        throw StorageError("scan predicate does not address table " + def.name);
      }
    });
  }
  auto lock = read_lock(id);
  do_scan(id, idx, predicate, out.rows);
  return out;
}

std::optional<Row> StorageEngine::lookup_pk(std::string_view table, const Value& key) const {
  const std::size_t id = table_id(table);
  auto lock = read_lock(id);
  auto r = do_find(id, key);
  if (!r) return std::nullopt;
  return do_row(id, *r);
}

std::size_t StorageEngine::row_count(std::string_view table) const {
  const std::size_t id = table_id(table);
  auto lock = read_lock(id);
  return do_count(id);
}

void StorageEngine::reset() {
  for (std::size_t id = 0; id < defs_.size(); ++id) {
    std::unique_lock lock(*locks_[id]);
    do_reset(id);
  }
}

// Snapshot -----------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'A', 'D', 'W', 'S', 'N', 'A', 'P', '\0'};
constexpr std::uint32_t kSnapshotVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  template <typename T>
  void le(T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    os_.write(reinterpret_cast<const char*>(b), sizeof(T));
  }
  void f64(double d) { le(std::bit_cast<std::uint64_t>(d)); }
  void str(std::string_view s) {
    le(static_cast<std::uint32_t>(s.size()));
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void bytes(const std::vector<std::uint8_t>& b) {
    os_.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  Reader(std::istream& is, std::string path) : is_(is), path_(std::move(path)) {}
  template <typename T>
  T le() {
    unsigned char b[sizeof(T)];
    read(reinterpret_cast<char*>(b), sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  std::string str() {
    const auto n = le<std::uint32_t>();
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }
  void read(char* dst, std::size_t n) {
    is_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) throw StorageError("snapshot " + path_ + " is truncated");
  }

 private:
  std::istream& is_;
  std::string path_;
};

void write_value(Writer& w, const Value& v, DataType t) {
  switch (t) {
    case DataType::Int64: w.le(is_null(v) ? std::int64_t{0} : std::get<std::int64_t>(v)); break;
    case DataType::Float64: w.f64(is_null(v) ? 0.0 : std::get<double>(v)); break;
    case DataType::Text: w.str(is_null(v) ? std::string_view{} : std::string_view(std::get<std::string>(v))); break;
    case DataType::Date: w.le(is_null(v) ? std::int32_t{0} : std::get<Date>(v).days); break;
    case DataType::Bool: w.le(static_cast<std::uint8_t>(!is_null(v) && std::get<bool>(v))); break;
    case DataType::GeoPoint: {
      const GeoPoint p = is_null(v) ? GeoPoint{} : std::get<GeoPoint>(v);
      w.f64(p.lat);
      w.f64(p.lon);
      break;
    }
    case DataType::GeoPolygon: {
      static const GeoPolygon empty;
      const GeoPolygon& g = is_null(v) ? empty : std::get<GeoPolygon>(v);
      w.le(static_cast<std::uint32_t>(g.points.size()));
      for (const auto& p : g.points) {
        w.f64(p.lat);
        w.f64(p.lon);
      }
      break;
    }
  }
}

Value read_value(Reader& r, DataType t) {
  switch (t) {
    case DataType::Int64: return r.le<std::int64_t>();
    case DataType::Float64: return r.f64();
    case DataType::Text: return r.str();
    case DataType::Date: return Date{r.le<std::int32_t>()};
    case DataType::Bool: return r.le<std::uint8_t>() != 0;
    case DataType::GeoPoint: {
      GeoPoint p;
      p.lat = r.f64();
      p.lon = r.f64();
      return p;
    }
    case DataType::GeoPolygon: {
      GeoPolygon g;
      const auto n = r.le<std::uint32_t>();
      g.points.resize(n);
      for (auto& p : g.points) {
        p.lat = r.f64();
        p.lon = r.f64();
      }
      return g;
    }
  }
  return {};
}

}  // namespace

void StorageEngine::save_snapshot(const std::string& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw StorageError("cannot open snapshot " + path + " for writing");
  Writer w(os);
  os.write(kMagic, sizeof kMagic);
  w.le(kSnapshotVersion);
  w.le(schema_hash(*schema_));
  w.le(static_cast<std::uint8_t>(kind()));
  w.le(static_cast<std::uint32_t>(defs_.size()));
  for (std::size_t id = 0; id < defs_.size(); ++id) {
    const TableDef& def = *defs_[id];
    auto lock = read_lock(id);
    const std::size_t n = do_count(id);
    w.str(def.name);
    w.le(static_cast<std::uint32_t>(def.columns.size()));
    w.le(static_cast<std::uint64_t>(n));
    std::vector<Row> rows;
    rows.reserve(n);
    for (std::size_t r = 0; r < n; ++r) rows.push_back(do_row(id, r));
    for (std::size_t c = 0; c < def.columns.size(); ++c) {
      w.str(def.columns[c].name);
      w.le(static_cast<std::uint8_t>(def.columns[c].type));
      std::vector<std::uint8_t> bitmap((n + 7) / 8, 0);
      for (std::size_t r = 0; r < n; ++r) {
        if (is_null(rows[r][c])) bitmap[r / 8] |= static_cast<std::uint8_t>(1u << (r % 8));
      }
      w.bytes(bitmap);
      for (std::size_t r = 0; r < n; ++r) write_value(w, rows[r][c], def.columns[c].type);
    }
  }
  if (!os) throw StorageError("write failure on snapshot " + path);
}

void StorageEngine::load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw StorageError("cannot open snapshot " + path);
  Reader r(is, path);
  char magic[8];
  r.read(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw StorageError(path + " is not a snapshot file");
  const auto version = r.le<std::uint32_t>();
  if (version != kSnapshotVersion) throw StorageError("unsupported snapshot version " + std::to_string(version));
  if (r.le<std::uint64_t>() != schema_hash(*schema_)) throw StorageError("snapshot " + path + " was taken from a different schema");
  r.le<std::uint8_t>();
  const auto tables = r.le<std::uint32_t>();
  std::vector<Relation> loaded;
  for (std::uint32_t t = 0; t < tables; ++t) {
    const std::string name = r.str();
    const TableDef& def = *defs_[table_id(name)];
    const auto ncols = r.le<std::uint32_t>();
    const auto nrows = static_cast<std::size_t>(r.le<std::uint64_t>());
    if (ncols != def.columns.size()) throw StorageError("snapshot table " + name + " has a different column count");
    Relation rel = make_relation(def);
    rel.rows.assign(nrows, Row(ncols));
    for (std::uint32_t c = 0; c < ncols; ++c) {
      const std::string cname = r.str();
      const auto type = static_cast<DataType>(r.le<std::uint8_t>());
      if (!iequals(cname, def.columns[c].name) || type != def.columns[c].type) {
        throw StorageError("snapshot column " + name + "." + cname + " does not match the schema");
      }
      std::vector<char> bitmap((nrows + 7) / 8);
      r.read(bitmap.data(), bitmap.size());
      for (std::size_t row = 0; row < nrows; ++row) {
        Value v = read_value(r, type);
        const bool null = (static_cast<unsigned char>(bitmap[row / 8]) >> (row % 8)) & 1u;
        rel.rows[row][c] = null ? Value{} : std::move(v);
      }
    }
    loaded.push_back(std::move(rel));
  }
  reset();
  for (const auto& rel : loaded) insert_batch(rel);
}

// RowStore -------------------------------------------------------------------

RowStore::RowStore(std::shared_ptr<const ConstellationSchema> schema) : StorageEngine(std::move(schema)) {
  tables_.resize(table_count());
}

const Row* RowStore::find(std::size_t id, const Value& key) const noexcept {
  const auto& t = tables_[id];
  auto it = t.pk.find(key);
  return it == t.pk.end() ? nullptr : &t.rows[it->second];
}

void RowStore::do_append(std::size_t id, const Relation& rel) {
  auto& t = tables_[id];
  const std::size_t pk = table_def(id).pk_index();
  t.rows.reserve(t.rows.size() + rel.rows.size());
  for (const auto& row : rel.rows) {
    t.pk.emplace(row[pk], t.rows.size());
    t.rows.push_back(row);
  }
}

void RowStore::do_scan(std::size_t id, const std::vector<std::size_t>& columns, const sql::Expr* predicate,
                       std::vector<Row>& out) const {
  for (const auto& row : tables_[id].rows) {
    if (predicate) {
      auto acc = [&](int, int c) -> const Value& { return row[static_cast<std::size_t>(c)]; };
      if (!sql::eval_predicate(*predicate, acc, nullptr)) continue;
    }
    Row r;
    r.reserve(columns.size());
    for (std::size_t c : columns) r.push_back(row[c]);
    out.push_back(std::move(r));
  }
}

std::optional<std::size_t> RowStore::do_find(std::size_t id, const Value& key) const {
  const auto& t = tables_[id];
  auto it = t.pk.find(key);
  if (it == t.pk.end()) return std::nullopt;
  return it->second;
}

void RowStore::do_reset(std::size_t id) {
  tables_[id].rows.clear();
  tables_[id].rows.shrink_to_fit();
  tables_[id].pk.clear();
}

// ColumnSegment ----------------------------------------------------------------

ColumnSegment::ColumnSegment(std::string name, DataType type) : name_(std::move(name)), type_(type) {
  switch (type) {
    case DataType::Int64: data_.emplace<0>(); break;
    case DataType::Float64: data_.emplace<1>(); break;
    case DataType::Text: data_.emplace<2>(); break;
    case DataType::Date: data_.emplace<3>(); break;
    case DataType::Bool: data_.emplace<4>(); break;
    case DataType::GeoPoint: data_.emplace<5>(); break;
    case DataType::GeoPolygon: data_.emplace<6>(); break;
  }
}

Value ColumnSegment::value(std::size_t i) const {
  if (nulls_[i]) return Value{};
  switch (type_) {
    case DataType::Int64: return std::get<0>(data_)[i];
    case DataType::Float64: return std::get<1>(data_)[i];
    case DataType::Text: return std::get<2>(data_)[i];
    case DataType::Date: return Date{std::get<3>(data_)[i]};
    case DataType::Bool: return std::get<4>(data_)[i] != 0;
    case DataType::GeoPoint: return std::get<5>(data_)[i];
    case DataType::GeoPolygon: return std::get<6>(data_)[i];
  }
  return Value{};
}

void ColumnSegment::push(const Value& v) {
  const bool null = adw::is_null(v);
  nulls_.push_back(null ? 1 : 0);
  null_count_ += null ? 1 : 0;
  switch (type_) {
    case DataType::Int64: std::get<0>(data_).push_back(null ? 0 : std::get<std::int64_t>(v)); break;
    case DataType::Float64: std::get<1>(data_).push_back(null ? 0.0 : std::get<double>(v)); break;
    case DataType::Text: std::get<2>(data_).push_back(null ? std::string{} : std::get<std::string>(v)); break;
    case DataType::Date: std::get<3>(data_).push_back(null ? 0 : std::get<Date>(v).days); break;
    case DataType::Bool: std::get<4>(data_).push_back(!null && std::get<bool>(v) ? 1 : 0); break;
    case DataType::GeoPoint: std::get<5>(data_).push_back(null ? GeoPoint{} : std::get<GeoPoint>(v)); break;
    case DataType::GeoPolygon: std::get<6>(data_).push_back(null ? GeoPolygon{} : std::get<GeoPolygon>(v)); break;
  }
}

void ColumnSegment::clear() {
  std::visit([](auto& vec) {
    vec.clear();
    vec.shrink_to_fit();
  }, data_);
  nulls_.clear();
  nulls_.shrink_to_fit();
  null_count_ = 0;
}

// ColumnStore --------------------------------------------------------------------

ColumnStore::ColumnStore(std::shared_ptr<const ConstellationSchema> schema) : StorageEngine(std::move(schema)) {
  tables_.resize(table_count());
  for (std::size_t id = 0; id < tables_.size(); ++id) {
    const TableDef& def = table_def(id);
    for (const auto& c : def.columns) tables_[id].segments.emplace_back(c.name, c.type);
    tables_[id].reads = std::make_unique<std::atomic<std::uint64_t>[]>(def.columns.size());
    for (std::size_t c = 0; c < def.columns.size(); ++c) tables_[id].reads[c] = 0;
  }
}

const ColumnSegment& ColumnStore::segment(std::size_t id, std::size_t column) const {
  const auto& t = tables_[id];
  if (column >= t.segments.size()) throw StorageError("column index out of range in " + table_def(id).name);
  accesses_.fetch_add(1, std::memory_order_relaxed);
  t.reads[column].fetch_add(1, std::memory_order_relaxed);
  return t.segments[column];
}

std::uint64_t ColumnStore::segment_accesses(std::string_view table, std::string_view column) const {
  const std::size_t id = table_id(table);
  auto c = table_def(id).column_index(column);
  if (!c) throw StorageError("unknown column '" + std::string(column) + "'");
  return tables_[id].reads[*c].load();
}

void ColumnStore::reset_access_counter() noexcept {
  accesses_ = 0;
  for (std::size_t id = 0; id < tables_.size(); ++id) {
    for (std::size_t c = 0; c < tables_[id].segments.size(); ++c) tables_[id].reads[c] = 0;
  }
}

void ColumnStore::do_append(std::size_t id, const Relation& rel) {
  auto& t = tables_[id];
  const std::size_t pk = table_def(id).pk_index();
  for (std::size_t c = 0; c < t.segments.size(); ++c) {
    for (const auto& row : rel.rows) t.segments[c].push(row[c]);
  }
  for (const auto& row : rel.rows) t.pk.emplace(row[pk], t.count++);
}

void ColumnStore::do_scan(std::size_t id, const std::vector<std::size_t>& columns, const sql::Expr* predicate,
                          std::vector<Row>& out) const {
  const auto& t = tables_[id];
  std::vector<const ColumnSegment*> segs(t.segments.size(), nullptr);
  auto touch = [&](std::size_t c) {
    if (!segs[c]) segs[c] = &segment(id, c);
  };
  if (predicate) sql::for_each_column(*predicate, [&](int, int c) { touch(static_cast<std::size_t>(c)); });
  for (std::size_t c : columns) touch(c);

  std::vector<Value> cache(t.segments.size());
  for (std::size_t r = 0; r < t.count; ++r) {
    if (predicate) {
      auto acc = [&](int, int c) -> const Value& {
        cache[static_cast<std::size_t>(c)] = segs[static_cast<std::size_t>(c)]->value(r);
        return cache[static_cast<std::size_t>(c)];
      };
      if (!sql::eval_predicate(*predicate, acc, nullptr)) continue;
    }
    Row row;
    row.reserve(columns.size());
    for (std::size_t c : columns) row.push_back(segs[c]->value(r));
    out.push_back(std::move(row));
  }
}

std::optional<std::size_t> ColumnStore::do_find(std::size_t id, const Value& key) const {
  const auto& t = tables_[id];
  auto it = t.pk.find(key);
  if (it == t.pk.end()) return std::nullopt;
  return it->second;
}

Row ColumnStore::do_row(std::size_t id, std::size_t row) const {
  const auto& t = tables_[id];
  Row out;
  out.reserve(t.segments.size());
  for (const auto& s : t.segments) out.push_back(s.value(row));
  return out;
}

void ColumnStore::do_reset(std::size_t id) {
  auto& t = tables_[id];
  for (auto& s : t.segments) s.clear();
  t.pk.clear();
  t.count = 0;
}

}  // namespace adw
