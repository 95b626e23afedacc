#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "adw/olap.hpp"
#include "adw/strings.hpp"

namespace adw::olap {

std::string_view to_string(Transform t) noexcept {
  switch (t) {
    case Transform::Identity: return "identity";
    case Transform::YearMonth: return "year_month";
    case Transform::Year: return "year";
  }
  return "?";
}

std::string_view to_string(Aggregator a) noexcept {
  switch (a) {
    case Aggregator::Sum: return "sum";
    case Aggregator::Count: return "count";
    case Aggregator::Max: return "max";
  }
  return "?";
}

std::optional<std::size_t> DimensionHierarchy::level_index(std::string_view level) const noexcept {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (iequals(levels[i].name, level)) return i;
  }
  if (iequals(level, "ALL")) return levels.size();
  return std::nullopt;
}

void MeasureCell::add_double(double x) noexcept {
  const double t = sum + x;
  if (std::fabs(sum) >= std::fabs(x)) {
    comp += (sum - t) + x;
  } else {
    comp += (x - t) + sum;
  }
  sum = t;
}

void MeasureCell::merge(const MeasureCell& other, Aggregator agg) noexcept {
  count += other.count;
  if (agg == Aggregator::Sum) {
    isum += other.isum;
    add_double(other.sum);
    add_double(other.comp);
  } else if (agg == Aggregator::Max && !is_null(other.best)) {
    if (is_null(best) || compare_total(other.best, best) > 0) best = other.best;
  }
}

Aggregator DataCube::aggregator(std::size_t slot) const noexcept {
  return slot < def_.measures.size() ? def_.measures[slot].agg : Aggregator::Count;
}

std::optional<std::size_t> DataCube::dimension_index(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < def_.dimensions.size(); ++i) {
    if (iequals(def_.dimensions[i].hierarchy.name, name)) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> DataCube::coordinate_slot(std::size_t dim) const noexcept {
  std::size_t slot = 0;
  for (std::size_t i = 0; i < def_.dimensions.size(); ++i) {
    const auto& d = def_.dimensions[i];
    const bool present = d.level < d.hierarchy.all_level();
    if (i == dim) return present ? std::optional<std::size_t>(slot) : std::nullopt;
    if (present) ++slot;
  }
  return std::nullopt;
}

const Value& DataCube::parent_member(std::size_t dim, std::size_t level, const Value& member) const {
  static const Value kUnknown{};
  const auto& maps = parents_.at(dim);
  if (level >= maps.size()) throw CubeError("no parent level above level " + std::to_string(level));
  auto it = maps[level].find(member);
  return it == maps[level].end() ? kUnknown : it->second;
}

Value DataCube::measure_value(std::size_t measure, const MeasureCell& cell) const {
  const auto& m = def_.measures[measure];
  switch (m.agg) {
    case Aggregator::Count: return cell.count;
    case Aggregator::Sum:
      if (cell.count == 0) return Value{};
      if (measure_types_[measure] == DataType::Int64) return cell.isum;
      return cell.sum + cell.comp + static_cast<double>(cell.isum);
    case Aggregator::Max: return cell.best;
  }
  return Value{};
}

std::vector<Value> DataCube::totals() const {
  std::vector<MeasureCell> acc(def_.measures.size());
  for (const auto& [coord, cells] : cells_) {
    for (std::size_t m = 0; m < acc.size(); ++m) acc[m].merge(cells[m], def_.measures[m].agg);
  }
  std::vector<Value> out;
  for (std::size_t m = 0; m < acc.size(); ++m) out.push_back(measure_value(m, acc[m]));
  return out;
}

std::vector<std::pair<Row, std::vector<Value>>> DataCube::sorted_cells() const {
  std::vector<std::pair<Row, std::vector<Value>>> out;
  out.reserve(cells_.size());
  for (const auto& [coord, cells] : cells_) {
    std::vector<Value> values;
    for (std::size_t m = 0; m < def_.measures.size(); ++m) values.push_back(measure_value(m, cells[m]));
    out.emplace_back(coord, std::move(values));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return RowLess{}(a.first, b.first); });
  return out;
}

namespace {

nlohmann::ordered_json json_of(const Value& v) {
  if (is_null(v)) return nullptr;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  return format_value(v);
}

}  // namespace

std::string DataCube::to_json() const {
  nlohmann::ordered_json out;
  out["cube"] = def_.name;
  out["fact"] = def_.fact;
  out["source_rows"] = source_rows_;
  nlohmann::ordered_json dims = nlohmann::ordered_json::array();
  for (const auto& d : def_.dimensions) {
    nlohmann::ordered_json j;
    j["name"] = d.hierarchy.name;
    j["level"] = d.level < d.hierarchy.all_level() ? d.hierarchy.levels[d.level].name : std::string("ALL");
    dims.push_back(std::move(j));
  }
  out["dimensions"] = std::move(dims);
  nlohmann::ordered_json measures = nlohmann::ordered_json::array();
  for (const auto& m : def_.measures) {
    nlohmann::ordered_json j;
    j["name"] = m.name;
    j["aggregator"] = std::string(to_string(m.agg));
    j["column"] = m.column.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(m.column);
    measures.push_back(std::move(j));
  }
  out["measures"] = std::move(measures);
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& [coord, values] : sorted_cells()) {
    nlohmann::ordered_json c;
    nlohmann::ordered_json cj = nlohmann::ordered_json::array();
    for (const auto& v : coord) cj.push_back(json_of(v));
    nlohmann::ordered_json mj = nlohmann::ordered_json::array();
    for (const auto& v : values) mj.push_back(json_of(v));
    c["coordinates"] = std::move(cj);
    c["measures"] = std::move(mj);
    cells.push_back(std::move(c));
  }
  out["cells"] = std::move(cells);
  return out.dump();
}

// Validation ---------------------------------------------------------------

namespace {

/// Table reached by following `path` from `fact`, or null with a message.
const TableDef* walk(const ConstellationSchema& schema, const std::string& fact, const std::vector<std::string>& path,
                     std::string& problem) {
  const TableDef* t = schema.find_table(fact);
  if (!t) {
    problem = "unknown fact table '" + fact + "'";
    return nullptr;
  }
  for (const auto& hop : path) {
    const ForeignKey* fk = t->foreign_key_for(hop);
    if (!fk) {
      problem = "column " + t->name + "." + hop + " is not a foreign key";
      return nullptr;
    }
    t = schema.find_table(fk->ref_table);
    if (!t) {
      problem = "foreign key " + hop + " targets unknown table " + fk->ref_table;
      return nullptr;
    }
  }
  return t;
}

}  // namespace

std::vector<std::string> validate_cube(const CubeDef& def, const ConstellationSchema& schema) {
  std::vector<std::string> problems;
  const TableDef* fact = schema.find_table(def.fact);
  if (!fact) {
    problems.push_back("unknown fact table '" + def.fact + "'");
    return problems;
  }
  if (fact->kind != TableKind::Fact) problems.push_back(def.fact + " is not a fact table");
  std::set<std::string, CaseInsensitiveLess> names;
  for (const auto& d : def.dimensions) {
    if (!names.insert(d.hierarchy.name).second) problems.push_back("duplicate dimension '" + d.hierarchy.name + "'");
    if (d.hierarchy.levels.empty()) problems.push_back("dimension '" + d.hierarchy.name + "' has no levels");
    if (d.level > d.hierarchy.all_level()) problems.push_back("dimension '" + d.hierarchy.name + "' level out of range");
    for (const auto& l : d.hierarchy.levels) {
      std::string problem;
      const TableDef* t = walk(schema, def.fact, l.path, problem);
      if (!t) {
        problems.push_back("dimension '" + d.hierarchy.name + "' level '" + l.name + "': " + problem);
        continue;
      }
      const ColumnDef* c = t->find_column(l.column);
      if (!c) {
        problems.push_back("dimension '" + d.hierarchy.name + "' level '" + l.name + "': unknown column " + t->name +
                           "." + l.column);
      } else if (l.transform != Transform::Identity && c->type != DataType::Date) {
        problems.push_back("dimension '" + d.hierarchy.name + "' level '" + l.name + "': " +
                           std::string(to_string(l.transform)) + " needs a date column");
      }
    }
  }
  if (def.measures.empty()) problems.push_back("cube has no measures");
  std::set<std::string, CaseInsensitiveLess> mnames;
  for (const auto& m : def.measures) {
    if (!mnames.insert(m.name).second) problems.push_back("duplicate measure '" + m.name + "'");
    if (m.column.empty()) {
      if (m.agg != Aggregator::Count) problems.push_back("measure '" + m.name + "' needs a column");
      continue;
    }
    const ColumnDef* c = fact->find_column(m.column);
    if (!c) {
      problems.push_back("measure '" + m.name + "': unknown column " + fact->name + "." + m.column);
    } else if (m.agg != Aggregator::Count && !is_numeric(c->type)) {
      problems.push_back("measure '" + m.name + "': column " + m.column + " is not numeric");
    }
  }
  return problems;
}

// Build --------------------------------------------------------------------

namespace {

Value apply_transform(const Value& v, Transform t) {
  if (t == Transform::Identity || is_null(v)) return v;
  const auto* d = std::get_if<Date>(&v);
  if (!d) return Value{};
  const CivilDate c = to_civil(*d);
  if (t == Transform::Year) return static_cast<std::int64_t>(c.year);
  return static_cast<std::int64_t>(c.year) * 100 + static_cast<std::int64_t>(c.month);
}

/// Dimension tables loaded once per build, indexed by primary key.
class DimensionCache {
 public:
  explicit DimensionCache(const StorageEngine& engine) : engine_(engine) {}

  struct Table {
    const TableDef* def = nullptr;
    Relation rel;
    std::unordered_map<Value, std::size_t, ValueHash, ValueEq> pk;
  };

  const Table& get(const std::string& name) {
    auto it = tables_.find(name);
    if (it != tables_.end()) return it->second;
    Table t;
    t.def = engine_.schema().find_table(name);
    t.rel = engine_.scan(name);
    const std::size_t pk = t.def->pk_index();
    for (std::size_t r = 0; r < t.rel.rows.size(); ++r) t.pk.emplace(t.rel.rows[r][pk], r);
    return tables_.emplace(name, std::move(t)).first->second;
  }

 private:
  const StorageEngine& engine_;
  std::map<std::string, Table> tables_;
};

/// Resolves one level's member for fact rows, memoized on the first hop.
class LevelResolver {
 public:
  LevelResolver(const Level& level, const TableDef& fact, const Relation& fact_rel, DimensionCache& cache)
      : level_(level), cache_(cache) {
    if (level.path.empty()) {
      fact_col_ = *fact_rel.column_index(level.column);
      return;
    }
    fact_col_ = *fact_rel.column_index(level.path[0]);
    const TableDef* t = &fact;
    for (const auto& hop : level.path) {
      const ForeignKey* fk = t->foreign_key_for(hop);
      tables_.push_back(fk->ref_table);
      t = cache.get(fk->ref_table).def;
    }
  }

  /// Member for the fact row, or null; `dangling` is set when the path broke.
  const Value& member(const Row& fact_row, bool& dangling) {
    dangling = false;
    const Value& start = fact_row[fact_col_];
    if (level_.path.empty()) {
      scratch_ = apply_transform(start, level_.transform);
      return scratch_;
    }
    auto it = memo_.find(start);
    if (it == memo_.end()) it = memo_.emplace(start, resolve(start)).first;
    dangling = it->second.second;
    return it->second.first;
  }

 private:
  std::pair<Value, bool> resolve(const Value& start) {
    Value key = start;
    for (std::size_t h = 0; h < tables_.size(); ++h) {
      if (is_null(key)) return {Value{}, true};
      const auto& t = cache_.get(tables_[h]);
      auto it = t.pk.find(key);
      if (it == t.pk.end()) return {Value{}, true};
      const Row& row = t.rel.rows[it->second];
      if (h + 1 < tables_.size()) {
        key = row[*t.def->column_index(level_.path[h + 1])];
      } else {
        return {apply_transform(row[*t.def->column_index(level_.column)], level_.transform), false};
      }
    }
    return {Value{}, true};
  }

  const Level& level_;
  DimensionCache& cache_;
  std::size_t fact_col_ = 0;
  std::vector<std::string> tables_;
  std::unordered_map<Value, std::pair<Value, bool>, ValueHash, ValueEq> memo_;
  Value scratch_;
};

std::string member_text(const Value& v) { return is_null(v) ? "UNKNOWN" : format_value(v); }

}  // namespace

DataCube build_cube(const StorageEngine& engine, const CubeDef& def, const std::vector<Restriction>& restrictions) {
  const auto problems = validate_cube(def, engine.schema());
  if (!problems.empty()) throw CubeError("invalid cube '" + def.name + "': " + join(problems, "; "));
  for (const auto& r : restrictions) {
    CubeDef probe{def.name, def.fact, {{r.hierarchy, r.level}}, def.measures};
    const auto p = validate_cube(probe, engine.schema());
    if (!p.empty()) throw CubeError("invalid restriction: " + join(p, "; "));
  }
  const TableDef& fact = *engine.schema().find_table(def.fact);

  // Fact columns needed: primary key, first hops, fact-level columns, measures.
  std::vector<std::string> columns{fact.primary_key};
  auto need = [&](const std::string& c) {
    for (const auto& x : columns) {
      if (iequals(x, c)) return;
    }
    columns.push_back(fact.find_column(c)->name);
  };
  auto need_level = [&](const Level& l) { need(l.path.empty() ? l.column : l.path[0]); };
  for (const auto& d : def.dimensions) {
    for (const auto& l : d.hierarchy.levels) need_level(l);
  }
  for (const auto& r : restrictions) need_level(r.hierarchy.levels[r.level]);
  for (const auto& m : def.measures) {
    if (!m.column.empty()) need(m.column);
  }
  const Relation rel = engine.scan(def.fact, columns);
  DimensionCache cache(engine);

  DataCube cube;
  cube.def_ = def;
  cube.schema_ = engine.schema_ptr();
  cube.restrictions_ = restrictions;
  const std::size_t nd = def.dimensions.size();
  cube.dangling_.assign(nd, 0);
  cube.parents_.resize(nd);

  // Resolvers for every level from the chosen one upward.
  std::vector<std::vector<std::unique_ptr<LevelResolver>>> resolvers(nd);
  for (std::size_t d = 0; d < nd; ++d) {
    const auto& dim = def.dimensions[d];
    const std::size_t top = dim.hierarchy.all_level();
    cube.parents_[d].resize(top > 0 ? top - 1 : 0);
    for (std::size_t l = 0; l < top; ++l) {
      resolvers[d].push_back(l >= dim.level
                                 ? std::make_unique<LevelResolver>(dim.hierarchy.levels[l], fact, rel, cache)
                                 : nullptr);
    }
  }
  std::vector<std::unique_ptr<LevelResolver>> restriction_resolvers;
  std::vector<sql::ValueSet> restriction_sets;
  for (const auto& r : restrictions) {
    restriction_resolvers.push_back(std::make_unique<LevelResolver>(r.hierarchy.levels[r.level], fact, rel, cache));
    restriction_sets.emplace_back(r.members.begin(), r.members.end());
  }

  std::vector<std::size_t> measure_cols;
  for (const auto& m : def.measures) {
    if (m.column.empty()) {
      measure_cols.push_back(SIZE_MAX);
      cube.measure_types_.push_back(DataType::Int64);
    } else {
      measure_cols.push_back(*rel.column_index(m.column));
      cube.measure_types_.push_back(fact.find_column(m.column)->type);
    }
  }

  // Witness rows for functional-dependency checks: member -> first fact key.
  std::vector<std::vector<std::unordered_map<Value, std::int64_t, ValueHash, ValueEq>>> witness(nd);
  for (std::size_t d = 0; d < nd; ++d) witness[d].resize(cube.parents_[d].size());

  const std::size_t pk_col = 0;
  Row coord;
  std::vector<Value> members;
  for (const Row& row : rel.rows) {
    bool keep = true;
    for (std::size_t r = 0; r < restrictions.size() && keep; ++r) {
      bool dangling = false;
      keep = restriction_sets[r].count(restriction_resolvers[r]->member(row, dangling)) > 0;
    }
    if (!keep) continue;
    ++cube.source_rows_;
    coord.clear();
    const auto* pk = std::get_if<std::int64_t>(&row[pk_col]);
    const std::int64_t row_key = pk ? *pk : 0;
    for (std::size_t d = 0; d < nd; ++d) {
      const auto& dim = def.dimensions[d];
      const std::size_t top = dim.hierarchy.all_level();
      if (dim.level >= top) continue;
      members.clear();
      bool dangling_any = false;
      for (std::size_t l = dim.level; l < top; ++l) {
        bool dangling = false;
        members.push_back(resolvers[d][l]->member(row, dangling));
        dangling_any = dangling_any || dangling;
      }
      if (dangling_any) ++cube.dangling_[d];
      coord.push_back(members[0]);
      for (std::size_t k = 0; k + 1 < members.size(); ++k) {
        const std::size_t l = dim.level + k;
        auto [it, inserted] = cube.parents_[d][l].try_emplace(members[k], members[k + 1]);
        if (inserted) {
          witness[d][l].emplace(members[k], row_key);
        } else if (!equal_total(it->second, members[k + 1])) {
          const std::int64_t first = witness[d][l].at(members[k]);
          throw FunctionalDependencyError(
              "hierarchy '" + dim.hierarchy.name + "': level '" + dim.hierarchy.levels[l].name + "' member " +
                  member_text(members[k]) + " maps to both " + member_text(it->second) + " and " +
                  member_text(members[k + 1]) + " (fact rows " + std::to_string(first) + " and " +
                  std::to_string(row_key) + ")",
              first, row_key);
        }
      }
    }
    auto [it, inserted] = cube.cells_.try_emplace(coord);
    if (inserted) it->second.resize(def.measures.size() + 1);
    ++it->second.back().count;
    for (std::size_t m = 0; m < def.measures.size(); ++m) {
      MeasureCell& cell = it->second[m];
      const auto& md = def.measures[m];
      if (measure_cols[m] == SIZE_MAX) {
        ++cell.count;
        continue;
      }
      const Value& v = row[measure_cols[m]];
      if (is_null(v)) continue;
      ++cell.count;
      if (md.agg == Aggregator::Sum) {
        if (const auto* i = std::get_if<std::int64_t>(&v)) {
          cell.isum += *i;
        } else {
          cell.add_double(std::get<double>(v));
        }
      } else if (md.agg == Aggregator::Max) {
        if (is_null(cell.best) || compare_total(v, cell.best) > 0) cell.best = v;
      }
    }
  }
  return cube;
}

// Operations ---------------------------------------------------------------

namespace {

std::size_t require_dimension(const DataCube& cube, std::string_view name) {
  auto d = cube.dimension_index(name);
  if (!d) throw CubeError("unknown dimension '" + std::string(name) + "' in cube '" + cube.def().name + "'");
  return *d;
}

}  // namespace

DataCube roll_up(const DataCube& cube, std::string_view dimension, std::string_view level) {
  const std::size_t d = require_dimension(cube, dimension);
  const auto& dim = cube.def_.dimensions[d];
  const auto target = dim.hierarchy.level_index(level);
  if (!target) throw CubeError("unknown level '" + std::string(level) + "' of dimension '" + dim.hierarchy.name + "'");
  if (*target <= dim.level) {
    throw CubeError("level '" + std::string(level) + "' is not coarser than the current level of '" +
                    dim.hierarchy.name + "'");
  }
  const std::size_t slot = *cube.coordinate_slot(d);
  DataCube out;
  out.def_ = cube.def_;
  out.def_.dimensions[d].level = *target;
  out.schema_ = cube.schema_;
  out.source_rows_ = cube.source_rows_;
  out.restrictions_ = cube.restrictions_;
  out.dangling_ = cube.dangling_;
  out.measure_types_ = cube.measure_types_;
  out.parents_ = cube.parents_;
  const bool to_all = *target == dim.hierarchy.all_level();
  for (const auto& [coord, cells] : cube.cells_) {
    Row next = coord;
    if (to_all) {
      next.erase(next.begin() + static_cast<std::ptrdiff_t>(slot));
    } else {
      Value m = coord[slot];
      for (std::size_t l = dim.level; l < *target; ++l) m = cube.parent_member(d, l, m);
      next[slot] = std::move(m);
    }
    auto [it, inserted] = out.cells_.try_emplace(std::move(next), cells);
    if (!inserted) {
      for (std::size_t m = 0; m < cells.size(); ++m) it->second[m].merge(cells[m], cube.aggregator(m));
    }
  }
  return out;
}

DataCube drill_down(const DataCube& cube, std::string_view dimension, std::string_view level,
                    const StorageEngine& engine) {
  const std::size_t d = require_dimension(cube, dimension);
  const auto& dim = cube.def().dimensions[d];
  const auto target = dim.hierarchy.level_index(level);
  if (!target) throw CubeError("unknown level '" + std::string(level) + "' of dimension '" + dim.hierarchy.name + "'");
  if (*target >= dim.level) {
    throw CubeError("level '" + std::string(level) + "' is not finer than the current level of '" +
                    dim.hierarchy.name + "'");
  }
  CubeDef def = cube.def();
  def.dimensions[d].level = *target;
  return build_cube(engine, def, cube.restrictions());
}

DataCube slice(const DataCube& cube, std::string_view dimension, const Value& member) {
  const std::size_t d = require_dimension(cube, dimension);
  const auto slot = cube.coordinate_slot(d);
  if (!slot) throw CubeError("dimension '" + std::string(dimension) + "' is rolled up to ALL");
  const auto& dim = cube.def_.dimensions[d];
  DataCube out;
  out.def_ = cube.def_;
  out.def_.dimensions.erase(out.def_.dimensions.begin() + static_cast<std::ptrdiff_t>(d));
  out.schema_ = cube.schema_;
  out.restrictions_ = cube.restrictions_;
  out.restrictions_.push_back({dim.hierarchy, dim.level, {member}});
  out.dangling_ = cube.dangling_;
  out.dangling_.erase(out.dangling_.begin() + static_cast<std::ptrdiff_t>(d));
  out.measure_types_ = cube.measure_types_;
  out.parents_ = cube.parents_;
  out.parents_.erase(out.parents_.begin() + static_cast<std::ptrdiff_t>(d));
  for (const auto& [coord, cells] : cube.cells_) {
    if (!equal_total(coord[*slot], member)) continue;
    Row next = coord;
    next.erase(next.begin() + static_cast<std::ptrdiff_t>(*slot));
    out.source_rows_ += static_cast<std::size_t>(cells.back().count);
    out.cells_.emplace(std::move(next), cells);
  }
  return out;
}

DataCube dice(const DataCube& cube, const std::map<std::string, std::vector<Value>>& members) {
  std::vector<std::pair<std::size_t, sql::ValueSet>> tests;
  DataCube out;
  out.def_ = cube.def_;
  out.schema_ = cube.schema_;
  out.restrictions_ = cube.restrictions_;
  out.dangling_ = cube.dangling_;
  out.measure_types_ = cube.measure_types_;
  out.parents_ = cube.parents_;
  for (const auto& [name, values] : members) {
    const std::size_t d = require_dimension(cube, name);
    const auto slot = cube.coordinate_slot(d);
    if (!slot) throw CubeError("dimension '" + name + "' is rolled up to ALL");
    tests.emplace_back(*slot, sql::ValueSet(values.begin(), values.end()));
    const auto& dim = cube.def_.dimensions[d];
    out.restrictions_.push_back({dim.hierarchy, dim.level, values});
  }
  for (const auto& [coord, cells] : cube.cells_) {
    bool keep = true;
    for (const auto& [slot, set] : tests) {
      if (!set.count(coord[slot])) {
        keep = false;
        break;
      }
    }
    if (!keep) continue;
    out.source_rows_ += static_cast<std::size_t>(cells.back().count);
    out.cells_.emplace(coord, cells);
  }
  return out;
}

const std::vector<Value>* PivotTable::at(std::size_t r, std::size_t c) const {
  auto it = cells.find({r, c});
  return it == cells.end() ? nullptr : &it->second;
}

PivotTable pivot(const DataCube& cube, const std::vector<std::string>& rows, const std::vector<std::string>& columns) {
  std::vector<std::size_t> row_slots;
  std::vector<std::size_t> col_slots;
  std::set<std::size_t> seen;
  auto resolve = [&](const std::vector<std::string>& names, std::vector<std::size_t>& slots) {
    for (const auto& n : names) {
      const std::size_t d = require_dimension(cube, n);
      const auto slot = cube.coordinate_slot(d);
      if (!slot) throw CubeError("dimension '" + n + "' is rolled up to ALL");
      if (!seen.insert(*slot).second) throw CubeError("dimension '" + n + "' appears on both axes or twice");
      slots.push_back(*slot);
    }
  };
  resolve(rows, row_slots);
  resolve(columns, col_slots);
  std::size_t present = 0;
  for (std::size_t d = 0; d < cube.def().dimensions.size(); ++d) {
    if (cube.coordinate_slot(d)) ++present;
  }
  if (seen.size() != present) throw CubeError("pivot axes must cover every dimension of the cube");

  PivotTable out;
  out.row_dimensions = rows;
  out.column_dimensions = columns;
  auto project = [](const Row& coord, const std::vector<std::size_t>& slots) {
    Row key;
    for (std::size_t s : slots) key.push_back(coord[s]);
    return key;
  };
  const auto cells = cube.sorted_cells();
  std::set<Row, RowLess> rk;
  std::set<Row, RowLess> ck;
  for (const auto& [coord, values] : cells) {
    rk.insert(project(coord, row_slots));
    ck.insert(project(coord, col_slots));
  }
  out.row_keys.assign(rk.begin(), rk.end());
  out.column_keys.assign(ck.begin(), ck.end());
  auto index_of = [](const std::vector<Row>& keys, const Row& k) {
    return static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), k, RowLess{}) - keys.begin());
  };
  for (const auto& [coord, values] : cells) {
    out.cells[{index_of(out.row_keys, project(coord, row_slots)), index_of(out.column_keys, project(coord, col_slots))}] =
        values;
  }
  return out;
}

// Built-in hierarchies and cubes -------------------------------------------

std::vector<DimensionHierarchy> builtin_hierarchies() {
  using T = Transform;
  return {
      {"crop", {{"crop_name", {"CropID"}, "CropName", T::Identity}}},
      {"crop_yield", {{"est_yield", {"CropID"}, "EstYield", T::Identity}}},
      {"soil_ph", {{"ph", {"SoildID"}, "PH", T::Identity}}},
      {"field",
       {{"field", {}, "FieldID", T::Identity},
        {"site", {"FieldID"}, "SiteID", T::Identity},
        {"farmer", {"FieldID", "SiteID"}, "FarmerID", T::Identity}}},
      {"operation_date",
       {{"date", {"OperationTimeID"}, "StartDate", T::Identity},
        {"month", {"OperationTimeID"}, "StartDate", T::YearMonth},
        {"year", {"OperationTimeID"}, "StartDate", T::Year}}},
      {"season", {{"season", {"OperationTimeID"}, "Season", T::Identity}}},
      {"pest", {{"common_name", {"PestID"}, "CommonName", T::Identity}}},
      {"fertiliser", {{"fertiliser_name", {"FertiliserID"}, "FertiliserName", T::Identity}}},
      {"fertiliser_group", {{"group_name", {"FertiliserID"}, "FertiliserGroupName", T::Identity}}},
      {"nutrient", {{"nutrient_name", {"NutrientID"}, "NutrientName", T::Identity}}},
      {"spray_quantity", {{"spray_quantity", {}, "SprayQuantity", T::Identity}}},
      {"pest_number", {{"pest_number", {}, "PestNumber", T::Identity}}},
      {"nutrient_quantity", {{"nutrient_quantity", {}, "NutrientQuantity", T::Identity}}},
      {"fertiliser_quantity", {{"fertiliser_quantity", {}, "FertiliserQuantity", T::Identity}}},
      {"sale_date",
       {{"date", {}, "SaleDate", T::Identity},
        {"month", {}, "SaleDate", T::YearMonth},
        {"year", {}, "SaleDate", T::Year}}},
      {"business", {{"business_name", {"BusinessID"}, "BusinessName", T::Identity}}},
      {"farmer", {{"farmer_name", {"FarmerID"}, "FarmerName", T::Identity}}},
      {"order_season", {{"season", {"TransTimeID"}, "Season", T::Identity}}},
  };
}

const DimensionHierarchy& builtin_hierarchy(std::string_view name) {
  static const std::vector<DimensionHierarchy> all = builtin_hierarchies();
  for (const auto& h : all) {
    if (iequals(h.name, name)) return h;
  }
  throw CubeError("unknown hierarchy '" + std::string(name) + "'");
}

std::vector<CubeDef> builtin_cubes() {
  auto dim = [](std::string_view h, std::size_t level = 0) { return CubeDimension{builtin_hierarchy(h), level}; };
  using A = Aggregator;
  return {
      {"ph_by_spray", "FieldFact", {dim("soil_ph"), dim("spray_quantity")}, {{"rows", "", A::Count}}},
      {"crop_pests",
       "FieldFact",
       {dim("crop"), dim("pest_number")},
       {{"rows", "", A::Count}, {"yield", "Yield", A::Sum}}},
      {"season_spray", "FieldFact", {dim("season"), dim("spray_quantity")}, {{"best_yield", "Yield", A::Max}}},
      {"pest_spray", "FieldFact", {dim("pest"), dim("spray_quantity")}, {{"worst", "PestNumber", A::Max}}},
      {"water_by_crop_yield_spray",
       "FieldFact",
       {dim("crop"), dim("crop_yield"), dim("spray_quantity")},
       {{"water", "WaterVolumn", A::Sum}}},
      {"season_pests", "FieldFact", {dim("season"), dim("pest_number")}, {{"yield", "Yield", A::Sum}}},
      {"fertiliser_group_quantity",
       "FieldFact",
       {dim("fertiliser_group"), dim("fertiliser_quantity")},
       {{"rows", "", A::Count}}},
      {"crop_nutrient_water",
       "FieldFact",
       {dim("crop"), dim("nutrient_quantity")},
       {{"peak_water", "WaterVolumn", A::Max}}},
      {"fertiliser_by_crop_yield_nutrient",
       "FieldFact",
       {dim("crop"), dim("crop_yield"), dim("nutrient_quantity")},
       {{"fertiliser", "FertiliserQuantity", A::Sum}}},
      {"sales_by_business_year",
       "SaleFact",
       {dim("business"), dim("sale_date", 2)},
       {{"quantity", "Quantity", A::Sum}}},
  };
}

CubeRegistry build_registry(const StorageEngine& engine, const std::vector<CubeDef>& defs) {
  CubeRegistry reg;
  for (const auto& d : defs) reg.add(std::make_shared<const DataCube>(build_cube(engine, d)));
  return reg;
}

CubeDef builtin_cube(std::string_view name) {
  for (auto& d : builtin_cubes()) {
    if (iequals(d.name, name)) return d;
  }
  throw CubeError("unknown cube '" + std::string(name) + "'");
}

std::string cube_def_to_json(const CubeDef& def) {
  nlohmann::ordered_json j;
  j["name"] = def.name;
  j["fact"] = def.fact;
  j["dimensions"] = nlohmann::ordered_json::array();
  for (const auto& d : def.dimensions) {
    j["dimensions"].push_back({{"hierarchy", d.hierarchy.name},
                               {"level", d.level < d.hierarchy.all_level() ? d.hierarchy.levels[d.level].name
                                                                          : std::string("ALL")}});
  }
  j["measures"] = nlohmann::ordered_json::array();
  for (const auto& m : def.measures) {
    j["measures"].push_back({{"name", m.name},
                             {"aggregator", std::string(to_string(m.agg))},
                             {"column", m.column.empty() ? nlohmann::ordered_json(nullptr)
                                                         : nlohmann::ordered_json(m.column)}});
  }
  return j.dump(2) + "\n";
}

CubeDef cube_def_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid cube definition: ") + e.what(), 1, e.byte);
  }
  try {
    CubeDef def;
    def.name = j.at("name").get<std::string>();
    def.fact = j.at("fact").get<std::string>();
    for (const auto& d : j.at("dimensions")) {
      CubeDimension dim{builtin_hierarchy(d.at("hierarchy").get<std::string>()), 0};
      if (d.contains("level")) {
        const auto name = d.at("level").get<std::string>();
        const auto l = dim.hierarchy.level_index(name);
        if (!l) throw CubeError("unknown level '" + name + "' of hierarchy '" + dim.hierarchy.name + "'");
        dim.level = *l;
      }
      def.dimensions.push_back(std::move(dim));
    }
    for (const auto& m : j.at("measures")) {
      MeasureDef md;
      md.name = m.at("name").get<std::string>();
      const auto agg = m.at("aggregator").get<std::string>();
      if (iequals(agg, "sum")) {
        md.agg = Aggregator::Sum;
      } else if (iequals(agg, "count")) {
        md.agg = Aggregator::Count;
      } else if (iequals(agg, "max")) {
        md.agg = Aggregator::Max;
      } else {
        throw CubeError("unknown aggregator '" + agg + "'");
      }
      if (m.contains("column") && !m.at("column").is_null()) md.column = m.at("column").get<std::string>();
      def.measures.push_back(std::move(md));
    }
    return def;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed cube definition: ") + e.what(), 1, 1);
  }
}

DataType member_type(const ConstellationSchema& schema, const std::string& fact, const Level& level) {
  if (level.transform != Transform::Identity) return DataType::Int64;
  std::string problem;
  const TableDef* t = walk(schema, fact, level.path, problem);
  if (!t) throw CubeError(problem);
  const ColumnDef* c = t->find_column(level.column);
  if (!c) throw CubeError("unknown column " + t->name + "." + level.column);
  return c->type;
}

}  // namespace adw::olap
