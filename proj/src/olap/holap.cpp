#include <algorithm>
#include <unordered_set>

#include "adw/exec.hpp"
#include "adw/olap.hpp"
#include "adw/strings.hpp"

namespace adw::olap {

namespace {

using sql::AggKind;
using sql::CorePlan;
using sql::Expr;
using sql::ExprPtr;
using sql::QueryPlan;

using Path = std::vector<std::string>;

bool same_path(const Path& a, const Path& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!iequals(a[i], b[i])) return false;
  }
  return true;
}

bool is_prefix(const Path& prefix, const Path& full) {
  if (prefix.size() > full.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (!iequals(prefix[i], full[i])) return false;
  }
  return true;
}

struct DimLevel {
  std::size_t dim = 0;
  std::size_t level = 0;
};

/// How one query maps onto one cube.
struct Match {
  std::vector<std::optional<std::size_t>> level;  ///< per cube dimension; empty when unused
  std::vector<bool> grouped;                      ///< dimension appears in GROUP BY
  std::vector<std::vector<ExprPtr>> filters;      ///< per dimension, over Column(0, 0) = member
  std::vector<std::size_t> key_dims;              ///< per group key
  std::vector<std::size_t> measures;              ///< per aggregate
};

class Matcher {
 public:
  Matcher(const CorePlan& core, const DataCube& cube) : core_(core), cube_(cube), def_(cube.def()) {}

  std::optional<Match> run() {
    const std::size_t nd = def_.dimensions.size();
    match_.level.assign(nd, std::nullopt);
    match_.grouped.assign(nd, false);
    match_.filters.assign(nd, {});
    if (!resolve_paths()) return std::nullopt;

    std::vector<ExprPtr> conjuncts;
    for (const auto& s : core_.sources) split(s.filter, conjuncts);
    for (const auto& j : core_.joins) split(j.filter, conjuncts);
    for (const auto& c : conjuncts) {
      std::optional<DimLevel> at;
      bool ok = true;
      ExprPtr rewritten = rewrite(c, at, ok);
      if (!ok || !at || !use(*at)) return std::nullopt;
      match_.filters[at->dim].push_back(std::move(rewritten));
    }
    for (const auto& k : core_.group_keys) {
      auto at = map_term(*k);
      if (!at || !use(*at)) return std::nullopt;
      match_.grouped[at->dim] = true;
      match_.key_dims.push_back(at->dim);
    }
    for (const auto& a : core_.aggs) {
      auto m = map_aggregate(a);
      if (!m) return std::nullopt;
      match_.measures.push_back(*m);
    }
    if (!joins_are_lossless()) return std::nullopt;
    return match_;
  }

 private:
  static void split(const ExprPtr& e, std::vector<ExprPtr>& out) {
    if (!e) return;
    if (e->kind == Expr::Kind::And) {
      for (const auto& a : e->args) split(a, out);
      return;
    }
    out.push_back(e);
  }

  const std::string& column_name(int source, int column) const {
    return core_.sources[static_cast<std::size_t>(source)].columns[static_cast<std::size_t>(column)].name;
  }

  /// Paths from the fact source along inner many-to-one joins.
  bool resolve_paths() {
    const auto& sources = core_.sources;
    const ConstellationSchema& schema = cube_.schema();
    std::optional<std::size_t> fact;
    for (std::size_t s = 0; s < sources.size(); ++s) {
      if (sources[s].derived || sources[s].table.empty()) return false;
      if (iequals(sources[s].table, def_.fact)) {
        if (fact) return false;
        fact = s;
      }
    }
    if (!fact) return false;
    fact_ = *fact;

    struct Edge {
      std::size_t from, to;
      std::string fk;
    };
    std::vector<Edge> edges;
    for (const auto& j : core_.joins) {
      if (j.kind != sql::JoinKind::Inner || j.condition || j.keys.size() != 1) return false;
      const Expr& l = *j.keys[0].left;
      const Expr& r = *j.keys[0].right;
      if (l.kind != Expr::Kind::Column || r.kind != Expr::Kind::Column) return false;
      auto oriented = [&](const Expr& child, const Expr& parent) -> std::optional<Edge> {
        const TableDef* ct = schema.find_table(sources[static_cast<std::size_t>(child.source)].table);
        const TableDef* pt = schema.find_table(sources[static_cast<std::size_t>(parent.source)].table);
        if (!ct || !pt) return std::nullopt;
        const ForeignKey* fk = ct->foreign_key_for(column_name(child.source, child.column));
        if (!fk || !iequals(fk->ref_table, pt->name)) return std::nullopt;
        if (!iequals(fk->ref_column, column_name(parent.source, parent.column))) return std::nullopt;
        if (!iequals(pt->primary_key, fk->ref_column)) return std::nullopt;
        return Edge{static_cast<std::size_t>(child.source), static_cast<std::size_t>(parent.source), fk->column};
      };
      auto e = oriented(l, r);
      if (!e) e = oriented(r, l);
      if (!e) return false;
      edges.push_back(*e);
    }
    paths_.assign(sources.size(), std::nullopt);
    paths_[fact_] = Path{};
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& e : edges) {
        if (paths_[e.from] && !paths_[e.to]) {
          Path p = *paths_[e.from];
          p.push_back(e.fk);
          paths_[e.to] = std::move(p);
          grew = true;
        }
      }
    }
    for (const auto& p : paths_) {
      if (!p) return false;
    }
    return edges.size() + 1 == sources.size();
  }

  /// Maps a column or YEAR(column) term to a cube level at or above the built one.
  std::optional<DimLevel> map_term(const Expr& e) const {
    Transform t = Transform::Identity;
    const Expr* col = &e;
    if (e.kind == Expr::Kind::Year) {
      t = Transform::Year;
      col = e.args[0].get();
    }
    if (col->kind != Expr::Kind::Column) return std::nullopt;
    const Path& path = *paths_[static_cast<std::size_t>(col->source)];
    const std::string& name = column_name(col->source, col->column);
    for (std::size_t d = 0; d < def_.dimensions.size(); ++d) {
      const auto& dim = def_.dimensions[d];
      for (std::size_t l = dim.level; l < dim.hierarchy.all_level(); ++l) {
        const Level& lv = dim.hierarchy.levels[l];
        if (lv.transform == t && iequals(lv.column, name) && same_path(lv.path, path)) return DimLevel{d, l};
      }
    }
    return std::nullopt;
  }

  /// Copy of `e` with every mapped term replaced by the member reference.
  ExprPtr rewrite(const ExprPtr& e, std::optional<DimLevel>& at, bool& ok) const {
    using K = Expr::Kind;
    if (!ok) return e;
    if (e->kind == K::Column || (e->kind == K::Year && e->args[0]->kind == K::Column)) {
      auto m = map_term(*e);
      if (!m || (at && (at->dim != m->dim || at->level != m->level))) {
        ok = false;
        return e;
      }
      at = m;
      auto member = std::make_shared<Expr>();
      member->kind = K::Column;
      member->type = e->type;
      return member;
    }
    if (e->kind == K::InSubquery) {
      ok = false;
      return e;
    }
    auto copy = std::make_shared<Expr>(*e);
    for (auto& a : copy->args) a = rewrite(a, at, ok);
    return copy;
  }

  bool use(const DimLevel& at) {
    auto& slot = match_.level[at.dim];
    if (slot && *slot != at.level) return false;
    slot = at.level;
    return true;
  }

  std::optional<std::size_t> map_aggregate(const sql::AggCall& a) const {
    Aggregator agg = Aggregator::Count;
    std::string column;
    switch (a.kind) {
      case AggKind::CountStar: break;
      case AggKind::Count: agg = Aggregator::Count; break;
      case AggKind::Sum: agg = Aggregator::Sum; break;
      case AggKind::Max: agg = Aggregator::Max; break;
      case AggKind::AnyMin: return std::nullopt;
    }
    if (a.kind != AggKind::CountStar) {
      if (!a.arg || a.arg->kind != Expr::Kind::Column) return std::nullopt;
      if (static_cast<std::size_t>(a.arg->source) != fact_) return std::nullopt;
      column = column_name(a.arg->source, a.arg->column);
    }
    for (std::size_t m = 0; m < def_.measures.size(); ++m) {
      const auto& md = def_.measures[m];
      if (md.agg == agg && iequals(md.column, column)) return m;
    }
    return std::nullopt;
  }

  /// Every joined table must lie on a used level's path whose rows all resolve.
  bool joins_are_lossless() const {
    for (std::size_t s = 0; s < core_.sources.size(); ++s) {
      if (s == fact_) continue;
      bool covered = false;
      for (std::size_t d = 0; d < def_.dimensions.size() && !covered; ++d) {
        if (!match_.level[d] || cube_.dangling_rows(d) != 0) continue;
        const Level& lv = def_.dimensions[d].hierarchy.levels[*match_.level[d]];
        covered = !lv.path.empty() && is_prefix(*paths_[s], lv.path);
      }
      if (!covered) return false;
    }
    return true;
  }

  const CorePlan& core_;
  const DataCube& cube_;
  const CubeDef& def_;
  std::size_t fact_ = 0;
  std::vector<std::optional<Path>> paths_;
  Match match_;
};

bool eligible(const QueryPlan& plan) {
  if (plan.branches.size() != 1 || plan.has_outer_join() || plan.has_subquery()) return false;
  const CorePlan& core = plan.branches[0];
  return core.aggregate && !core.aggs.empty();
}

std::string level_name(const CubeDimension& dim, std::size_t level) {
  return level < dim.hierarchy.all_level() ? dim.hierarchy.levels[level].name : std::string("ALL");
}

struct MemberAcc {
  const Value* member;
  const Value& operator()(int, int) const { return *member; }
};

struct RowAcc {
  const Row* row;
  const Value& operator()(int, int column) const { return (*row)[static_cast<std::size_t>(column)]; }
};

void widen(Value& v, DataType t) {
  if (t == DataType::Float64) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) v = static_cast<double>(*i);
  }
}

bool less_full(const Row& a, const Row& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int c = compare_total(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return false;
}

ResultSet answer(const QueryPlan& plan, const DataCube& base, const Match& match) {
  const CorePlan& core = plan.branches[0];
  const auto& dims = base.def().dimensions;
  DataCube cube = base;
  for (std::size_t d = 0; d < dims.size(); ++d) {
    const std::size_t target = match.level[d] ? *match.level[d] : dims[d].hierarchy.all_level();
    if (target > cube.def().dimensions[d].level) cube = roll_up(cube, dims[d].hierarchy.name, level_name(dims[d], target));
  }
  std::map<std::string, std::vector<Value>> dice_members;
  for (std::size_t d = 0; d < dims.size(); ++d) {
    if (match.filters[d].empty()) continue;
    const std::size_t slot = *cube.coordinate_slot(d);
    std::unordered_set<Value, ValueHash, ValueEq> seen;
    std::vector<Value> keep;
    for (const auto& [coord, cells] : cube.cells()) {
      const Value& m = coord[slot];
      if (!seen.insert(m).second) continue;
      const MemberAcc acc{&m};
      const bool pass = std::all_of(match.filters[d].begin(), match.filters[d].end(),
                                    [&](const ExprPtr& f) { return sql::eval_predicate(*f, acc, nullptr); });
      if (pass) keep.push_back(m);
    }
    dice_members[dims[d].hierarchy.name] = std::move(keep);
  }
  if (!dice_members.empty()) cube = dice(cube, dice_members);
  for (std::size_t d = 0; d < dims.size(); ++d) {
    if (!match.filters[d].empty() && !match.grouped[d]) cube = roll_up(cube, dims[d].hierarchy.name, "ALL");
  }

  std::vector<Row> agg_rows;
  for (const auto& [coord, cells] : cube.cells()) {
    Row r;
    for (std::size_t d : match.key_dims) r.push_back(coord[*cube.coordinate_slot(d)]);
    for (std::size_t m : match.measures) r.push_back(cube.measure_value(m, cells[m]));
    agg_rows.push_back(std::move(r));
  }
  const bool count_only = std::all_of(core.aggs.begin(), core.aggs.end(), [](const sql::AggCall& a) {
    return a.kind == AggKind::Count || a.kind == AggKind::CountStar;
  });
  if (agg_rows.empty() && core.group_keys.empty() && count_only) agg_rows.emplace_back(core.aggs.size(), Value{std::int64_t{0}});

  std::vector<Row> rows;
  for (const Row& ar : agg_rows) {
    const RowAcc acc{&ar};
    if (core.having && !sql::eval_predicate(*core.having, acc, nullptr)) continue;
    Row row;
    for (std::size_t p = 0; p < core.projections.size(); ++p) {
      Value scratch;
      Value v = sql::eval_scalar(*core.projections[p], acc, nullptr, scratch);
      widen(v, plan.types[p]);
      row.push_back(std::move(v));
    }
    rows.push_back(std::move(row));
  }
  if (core.distinct) {
    std::unordered_set<Row, RowHash, RowEq> seen;
    std::vector<Row> unique;
    for (auto& r : rows) {
      if (seen.insert(r).second) unique.push_back(std::move(r));
    }
    rows = std::move(unique);
  }
  if (!plan.order.empty()) {
    std::sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
      for (const auto& k : plan.order) {
        const auto c0 = static_cast<std::size_t>(k.column);
        const int c = compare_total(a[c0], b[c0]);
        if (c != 0) return k.descending ? c > 0 : c < 0;
      }
      return less_full(a, b);
    });
  } else if (plan.limit) {
    std::sort(rows.begin(), rows.end(), less_full);
  }
  if (plan.limit) {
    const auto n = static_cast<std::size_t>(std::max<std::int64_t>(*plan.limit, 0));
    if (n < rows.size()) rows.resize(n);
  }
  ResultSet out;
  out.headers = plan.headers;
  out.types = plan.types;
  out.rows = std::move(rows);
  out.ordered = !plan.order.empty();
  return out;
}

}  // namespace

std::optional<std::size_t> match_cube(const QueryPlan& plan, const CubeRegistry& registry) {
  if (!eligible(plan)) return std::nullopt;
  for (std::size_t i = 0; i < registry.cubes().size(); ++i) {
    if (Matcher(plan.branches[0], *registry.cubes()[i]).run()) return i;
  }
  return std::nullopt;
}

HolapResult route_holap(const QueryPlan& plan, const CubeRegistry& registry, const ColumnStore& store) {
  HolapResult out;
  if (eligible(plan)) {
    for (const auto& cube : registry.cubes()) {
      auto match = Matcher(plan.branches[0], *cube).run();
      if (!match) continue;
      out.path = sql::ExecPath::Molap;
      out.cube = cube->def().name;
      out.result = answer(plan, *cube, *match);
      return out;
    }
  }
  out.path = sql::ExecPath::Rolap;
  out.result = exec::execute_rolap(plan, store);
  return out;
}

}  // namespace adw::olap
