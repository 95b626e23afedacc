#include "adw/etl.hpp"

#include <unordered_map>
#include <unordered_set>

#include "adw/csv.hpp"
#include "adw/error.hpp"
#include "json.hpp"

namespace adw::etl {

using nlohmann::json;

std::size_t TableReport::rejected_total() const noexcept {
  std::size_t n = 0;
  for (const auto& c : classes) n += c.rejected;
  return n;
}

std::size_t CleansingReport::detected(DefectClass c) const noexcept {
  std::size_t n = 0;
  for (const auto& [name, t] : tables) n += t.of(c).detected;
  return n;
}

std::string CleansingReport::to_json() const {
  json j;
  j["tables"] = json::object();
  json totals;
  for (auto c : datagen::kDefectClasses) totals[std::string(to_string(c))] = detected(c);
  for (const auto& [name, t] : tables) {
    json tj;
    tj["input_rows"] = t.input_rows;
    tj["output_rows"] = t.output_rows;
    for (auto c : datagen::kDefectClasses) {
      const auto& cr = t.of(c);
      tj["classes"][std::string(to_string(c))] = {{"detected", cr.detected},
                                                   {"rejected", cr.rejected},
                                                   {"corrected", cr.corrected},
                                                   {"ordinals", cr.ordinals}};
    }
    j["tables"][name] = std::move(tj);
  }
  j["totals"] = std::move(totals);
  return j.dump(2) + "\n";
}

CleansingReport CleansingReport::from_json(std::string_view text) {
  CleansingReport r;
  try {
    const json j = json::parse(text);
    for (const auto& [name, tj] : j.at("tables").items()) {
      TableReport t;
      t.input_rows = tj.at("input_rows").get<std::size_t>();
      t.output_rows = tj.at("output_rows").get<std::size_t>();
      for (auto c : datagen::kDefectClasses) {
        const auto& cj = tj.at("classes").at(std::string(to_string(c)));
        auto& cr = t.of(c);
        cr.detected = cj.at("detected").get<std::size_t>();
        cr.rejected = cj.at("rejected").get<std::size_t>();
        cr.corrected = cj.at("corrected").get<std::size_t>();
        cr.ordinals = cj.at("ordinals").get<std::vector<std::int64_t>>();
      }
      r.tables.emplace(name, std::move(t));
    }
  } catch (const json::exception& ex) {
    throw EtlError(std::string("malformed cleansing report: ") + ex.what());
  }
  return r;
}

std::string_view season_of(unsigned month) noexcept {
  switch (month) {
    case 12:
    case 1:
    case 2: return "Winter";
    case 3:
    case 4:
    case 5: return "Spring";
    case 6:
    case 7:
    case 8: return "Summer";
    default: return "Autumn";
  }
}

// Extract ------------------------------------------------------------------------

std::vector<StagingBatch> extract(const datagen::RawDataset& files, const ConstellationSchema& schema) {
  std::vector<StagingBatch> out;
  for (const auto& [name, def] : schema.tables) {
    auto it = files.files.find(def.name);
    if (it == files.files.end()) {
      for (auto f = files.files.begin(); f != files.files.end(); ++f) {
        if (iequals(f->first, def.name)) it = f;
      }
    }
    const std::string source = def.name + ".csv";
    if (it == files.files.end()) throw EtlError("missing table file " + source);

    csv::Reader reader(it->second);
    std::vector<std::string> fields;
    StagingBatch batch;
    batch.table = def.name;
    batch.source = source;
    try {
      if (!reader.next(fields)) throw EtlError(source + ": empty file, expected a header row");
      std::vector<std::size_t> target(fields.size());
      std::vector<bool> seen(def.columns.size(), false);
      for (std::size_t i = 0; i < fields.size(); ++i) {
        auto c = def.column_index(trim(fields[i]));
        if (!c) throw EtlError(source + ": unknown column '" + fields[i] + "' in header");
        if (seen[*c]) throw EtlError(source + ": column '" + fields[i] + "' appears twice in header");
        seen[*c] = true;
        target[i] = *c;
      }
      for (std::size_t c = 0; c < def.columns.size(); ++c) {
        if (!seen[c]) throw EtlError(source + ": header lacks column '" + def.columns[c].name + "'");
      }
      std::int64_t ordinal = 0;
      while (reader.next(fields)) {
        ++ordinal;
        if (fields.size() != target.size()) {
          throw EtlError(source + " line " + std::to_string(reader.record_line()) + ": expected " +
                         std::to_string(target.size()) + " cells, found " + std::to_string(fields.size()));
        }
        std::vector<std::string> row(def.columns.size());
        for (std::size_t i = 0; i < fields.size(); ++i) row[target[i]] = std::move(fields[i]);
        batch.rows.push_back(std::move(row));
        batch.ordinals.push_back(ordinal);
      }
    } catch (const ParseError& e) {
      throw EtlError(source + ": " + e.what());
    }
    out.push_back(std::move(batch));
  }
  return out;
}

// Cleanse ------------------------------------------------------------------------

namespace {

struct StringVecHash {
  std::size_t operator()(const std::vector<std::string>& v) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (const auto& s : v) {
      h ^= std::hash<std::string>{}(s) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

bool is_quantity_column(const ColumnDef& c) { return is_numeric(c.type) && icontains(c.name, "quantity"); }

}  // namespace

Relation cleanse(const StagingBatch& batch, const ConstellationSchema& schema, const EtlOptions& options,
                 TableReport& report) {
  const TableDef& def = schema.table(batch.table);
  const std::size_t pk = def.pk_index();
  Relation rel = make_relation(def);
  report.input_rows += batch.rows.size();

  std::unordered_set<std::vector<std::string>, StringVecHash> seen_rows;
  std::unordered_map<Value, std::size_t, ValueHash, ValueEq> keys;
  auto reject = [&](DefectClass c, std::int64_t ordinal) {
    auto& cr = report.of(c);
    ++cr.detected;
    ++cr.rejected;
    cr.ordinals.push_back(ordinal);
  };

  for (std::size_t r = 0; r < batch.rows.size(); ++r) {
    const auto& cells = batch.rows[r];
    const std::int64_t ordinal = batch.ordinals[r];
    if (!seen_rows.insert(cells).second) {
      reject(DefectClass::Duplicate, ordinal);
      continue;
    }
    bool missing = false;
    for (std::size_t c = 0; c < def.columns.size() && !missing; ++c) {
      missing = !def.columns[c].nullable && trim(cells[c]).empty();
    }
    if (missing) {
      reject(DefectClass::Missing, ordinal);
      continue;
    }
    Row row(def.columns.size());
    bool bad = false;
    for (std::size_t c = 0; c < def.columns.size() && !bad; ++c) {
      const auto& col = def.columns[c];
      auto v = parse_value(trim(cells[c]), col.type);
      if (!v) {
        bad = true;
        break;
      }
      if (is_quantity_column(col)) {
        auto d = as_double(*v);
        bad = d && *d < 0;
      } else if (const auto* date = std::get_if<Date>(&*v)) {
        bad = *date < options.start || *date > options.end;
      }
      row[c] = std::move(*v);
    }
    if (!bad && keys.count(row[pk])) bad = true;  // same key, different cells
    if (bad) {
      reject(DefectClass::Inconsistent, ordinal);
      continue;
    }
    keys.emplace(row[pk], rel.rows.size());
    rel.rows.push_back(std::move(row));
  }
  report.output_rows = rel.rows.size();
  return rel;
}

void check_foreign_keys(std::map<std::string, Relation>& relations, const ConstellationSchema& schema,
                        CleansingReport& report, std::map<std::string, std::vector<std::int64_t>>& row_ordinals) {
  std::map<std::string, std::unordered_set<Value, ValueHash, ValueEq>, CaseInsensitiveLess> key_sets;
  for (const auto& name : schema.topological_order()) {
    const TableDef& def = schema.table(name);
    auto rit = relations.find(def.name);
    if (rit == relations.end()) continue;
    Relation& rel = rit->second;
    auto& ordinals = row_ordinals[def.name];
    TableReport& tr = report.tables[def.name];

    struct Check {
      std::size_t column;
      const std::unordered_set<Value, ValueHash, ValueEq>* parent;
      std::size_t parent_col;
    };
    std::vector<Check> checks;
    for (const auto& fk : def.foreign_keys) {
      auto pit = key_sets.find(fk.ref_table);
      if (pit == key_sets.end()) continue;  // parent in a cycle or absent: nothing to check against
      checks.push_back({*def.column_index(fk.column), &pit->second, 0});
    }
    std::vector<Row> kept;
    std::vector<std::int64_t> kept_ord;
    kept.reserve(rel.rows.size());
    for (std::size_t r = 0; r < rel.rows.size(); ++r) {
      bool dangling = false;
      for (const auto& ch : checks) {
        const Value& v = rel.rows[r][ch.column];
        if (!is_null(v) && !ch.parent->count(v)) {
          dangling = true;
          break;
        }
      }
      if (dangling) {
        auto& cr = tr.of(DefectClass::Wrong);
        ++cr.detected;
        ++cr.rejected;
        cr.ordinals.push_back(ordinals[r]);
        continue;
      }
      kept.push_back(std::move(rel.rows[r]));
      kept_ord.push_back(ordinals[r]);
    }
    rel.rows = std::move(kept);
    ordinals = std::move(kept_ord);
    tr.output_rows = rel.rows.size();
    std::sort(tr.of(DefectClass::Wrong).ordinals.begin(), tr.of(DefectClass::Wrong).ordinals.end());

    // Key set of this table for its children: values of every referenced column.
    auto& ks = key_sets[def.name];
    const std::size_t pk = def.pk_index();
    for (const auto& row : rel.rows) ks.insert(row[pk]);
  }
}

// Transform ----------------------------------------------------------------------

namespace {

struct Derivation {
  const char* table;
  const char* target;
  const char* source;
  bool season;  ///< false: calendar year
};

constexpr Derivation kDerivations[] = {
    {"OperationTime", "Season", "StartDate", true},
    {"TransTime", "Season", "OrderDate", true},
    {"Nutrient", "Year", "Date", false},
};

}  // namespace

void transform(std::map<std::string, Relation>& relations, const ConstellationSchema& schema) {
  for (const auto& d : kDerivations) {
    const TableDef* def = schema.find_table(d.table);
    if (!def) continue;
    auto rit = relations.find(def->name);
    if (rit == relations.end()) continue;
    auto target = def->column_index(d.target);
    auto source = def->column_index(d.source);
    if (!target || !source) continue;
    for (auto& row : rit->second.rows) {
      const auto* date = std::get_if<Date>(&row[*source]);
      if (!date) {
        row[*target] = Value{};
        continue;
      }
      const CivilDate c = to_civil(*date);
      if (d.season) {
        row[*target] = std::string(season_of(c.month));
      } else {
        row[*target] = static_cast<std::int64_t>(c.year);
      }
    }
  }

  std::map<std::string, std::unordered_set<Value, ValueHash, ValueEq>, CaseInsensitiveLess> keys;
  for (const auto& [name, rel] : relations) {
    const TableDef& def = schema.table(name);
    auto& ks = keys[def.name];
    const std::size_t pk = def.pk_index();
    for (const auto& row : rel.rows) ks.insert(row[pk]);
  }
  for (const auto& [name, rel] : relations) {
    const TableDef& def = schema.table(name);
    for (const auto& fk : def.foreign_keys) {
      auto pit = keys.find(fk.ref_table);
      if (pit == keys.end()) continue;
      const std::size_t c = *def.column_index(fk.column);
      for (const auto& row : rel.rows) {
        if (!is_null(row[c]) && !pit->second.count(row[c])) {
          throw EtlError("unresolvable key " + format_value(row[c]) + " in " + def.name + "." + fk.column + " -> " +
                         fk.ref_table);
        }
      }
    }
  }
}

// Load ---------------------------------------------------------------------------

LoadSummary load(const std::map<std::string, Relation>& relations, const std::vector<StorageEngine*>& targets) {
  LoadSummary summary;
  for (const auto* t : targets) {
    summary.targets.emplace_back(to_string(t->kind()));
    for (const auto& [name, rel] : relations) {
      if (t->row_count(name) != 0) {
        throw EtlError("table not empty: " + name + " in " + std::string(to_string(t->kind())) + " store");
      }
    }
  }
  for (auto* t : targets) {
    for (const auto& [name, rel] : relations) {
      try {
        summary.rows[name].push_back(t->insert_batch(rel));
      } catch (const StorageError& e) {
        throw EtlError(std::string("load failed: ") + e.what());
      }
    }
  }
  return summary;
}

EtlResult run(const datagen::RawDataset& files, const ConstellationSchema& schema, const EtlOptions& options) {
  EtlResult result;
  auto batches = extract(files, schema);
  std::map<std::string, std::vector<std::int64_t>> ordinals;
  for (auto& batch : batches) {
    TableReport& tr = result.report.tables[batch.table];
    Relation rel = cleanse(batch, schema, options, tr);
    // Ordinals of survivors, in order.
    std::vector<std::int64_t> kept;
    kept.reserve(rel.rows.size());
    {
      std::unordered_set<std::int64_t> rejected;
      for (const auto& cr : tr.classes) rejected.insert(cr.ordinals.begin(), cr.ordinals.end());
      for (auto o : batch.ordinals) {
        if (!rejected.count(o)) kept.push_back(o);
      }
    }
    ordinals[batch.table] = std::move(kept);
    batch.rows.clear();
    batch.rows.shrink_to_fit();
    result.relations.emplace(batch.table, std::move(rel));
  }
  check_foreign_keys(result.relations, schema, result.report, ordinals);
  transform(result.relations, schema);
  return result;
}

}  // namespace adw::etl
