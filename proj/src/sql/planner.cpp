#include <algorithm>
#include <functional>
#include <set>

#include "adw/sql/parser.hpp"
#include "adw/sql/plan.hpp"
#include "adw/strings.hpp"

namespace adw::sql {

std::string_view to_string(AggKind k) noexcept {
  switch (k) {
    case AggKind::Count: return "COUNT";
    case AggKind::CountStar: return "COUNT(*)";
    case AggKind::Sum: return "SUM";
    case AggKind::Max: return "MAX";
    case AggKind::AnyMin: return "ANY";
  }
  return "?";
}

std::string_view to_string(JoinKind k) noexcept {
  switch (k) {
    case JoinKind::Inner: return "HashJoin";
    case JoinKind::LeftOuter: return "LeftOuterJoin";
    case JoinKind::Cross: return "CrossJoin";
  }
  return "?";
}

std::string_view to_string(ExecPath p) noexcept {
  switch (p) {
    case ExecPath::Unset: return "unset";
    case ExecPath::Baseline: return "baseline";
    case ExecPath::Rolap: return "rolap";
    case ExecPath::Molap: return "molap";
  }
  return "?";
}

namespace {

bool expr_has_subquery(const Expr& e) {
  if (e.kind == Expr::Kind::InSubquery) return true;
  return std::any_of(e.args.begin(), e.args.end(), [](const ExprPtr& a) { return expr_has_subquery(*a); });
}

template <typename Fn>
void for_each_row_expr(const CorePlan& core, Fn&& fn) {
  for (const auto& s : core.sources) {
    if (s.filter) fn(*s.filter);
  }
  for (const auto& j : core.joins) {
    for (const auto& k : j.keys) {
      fn(*k.left);
      fn(*k.right);
    }
    if (j.condition) fn(*j.condition);
    if (j.filter) fn(*j.filter);
  }
  for (const auto& g : core.group_keys) fn(*g);
  for (const auto& a : core.aggs) {
    if (a.arg) fn(*a.arg);
  }
  if (core.having) fn(*core.having);
  for (const auto& p : core.projections) fn(*p);
}

}  // namespace

bool QueryPlan::has_outer_join() const noexcept {
  for (const auto& b : branches) {
    for (const auto& j : b.joins) {
      if (j.kind == JoinKind::LeftOuter) return true;
    }
    for (const auto& s : b.sources) {
      if (s.derived && s.derived->has_outer_join()) return true;
    }
  }
  return false;
}

bool QueryPlan::has_subquery() const noexcept {
  for (const auto& b : branches) {
    for (const auto& s : b.sources) {
      if (s.derived) return true;
    }
    bool found = false;
    for_each_row_expr(b, [&](const Expr& e) { found = found || expr_has_subquery(e); });
    if (found) return true;
  }
  return false;
}

namespace {

using AK = AstExpr::Kind;
using EK = Expr::Kind;

[[noreturn]] void bind_fail(const std::string& msg) { throw BindError(msg); }

bool is_aggregate_name(std::string_view n) {
  return iequals(n, "sum") || iequals(n, "count") || iequals(n, "max");
}

bool contains_aggregate(const AstExpr& a) {
  if (a.kind == AK::Call && is_aggregate_name(a.name)) return true;
  if (a.kind == AK::InSubquery) return contains_aggregate(*a.args[0]);
  return std::any_of(a.args.begin(), a.args.end(), [](const AstExprPtr& c) { return contains_aggregate(*c); });
}

std::shared_ptr<Expr> make_expr(EK kind, DataType type) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->type = type;
  return e;
}

ExprPtr make_column(int source, int column, DataType type, std::string label) {
  auto e = make_expr(EK::Column, type);
  e->source = source;
  e->column = column;
  e->label = std::move(label);
  return e;
}

ExprPtr make_and(ExprPtr a, ExprPtr b) {
  if (!a) return b;
  if (!b) return a;
  auto e = make_expr(EK::And, DataType::Bool);
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprPtr and_all(const std::vector<ExprPtr>& parts) {
  ExprPtr out;
  for (const auto& p : parts) out = make_and(out, p);
  return out;
}

void split_conjuncts(const AstExprPtr& a, std::vector<AstExprPtr>& out) {
  if (!a) return;
  if (a->kind == AK::And) {
    split_conjuncts(a->args[0], out);
    split_conjuncts(a->args[1], out);
  } else {
    out.push_back(a);
  }
}

std::optional<Value> coerce_literal(const Value& v, DataType target) {
  if (is_null(v)) return v;
  const auto t = type_of(v);
  if (t == target) return v;
  if (is_numeric(target) && t && is_numeric(*t)) return v;
  if (const auto* s = std::get_if<std::string>(&v)) {
    auto parsed = parse_value(*s, target);
    if (parsed && !is_null(*parsed)) return parsed;
  }
  return std::nullopt;
}

bool comparable(DataType a, DataType b) {
  return a == b || (is_numeric(a) && is_numeric(b));
}

std::string type_name(DataType t) { return std::string(to_string(t)); }

/// Binds one SELECT branch.
class BranchBinder {
 public:
  BranchBinder(const ConstellationSchema& schema, const SelectCore& ast, CorePlan& core)
      : schema_(schema), ast_(ast), core_(core) {}

  void bind_sources() {
    std::set<std::string, CaseInsensitiveLess> aliases;
    for (const auto& ref : ast_.from) {
      Source s;
      if (ref.derived) {
        auto sub = std::make_shared<QueryPlan>(plan(*ref.derived, schema_));
        if (ref.alias.empty()) bind_fail("derived table requires an alias");
        s.alias = ref.alias;
        for (std::size_t i = 0; i < sub->headers.size(); ++i) {
          s.columns.push_back({sub->headers[i], sub->types[i], true});
        }
        s.derived = std::move(sub);
      } else {
        const TableDef* t = schema_.find_table(ref.table);
        if (!t) bind_fail("unknown table '" + ref.table + "'");
        s.table = t->name;
        s.alias = ref.alias.empty() ? ref.table : ref.alias;
        s.fact = t->kind == TableKind::Fact;
        for (const auto& c : t->columns) s.columns.push_back({c.name, c.type, c.nullable});
      }
      if (!aliases.insert(s.alias).second) bind_fail("duplicate table alias '" + s.alias + "'");
      core_.sources.push_back(std::move(s));
    }
    for (const auto& item : ast_.items) {
      if (!item.alias.empty() && item.expr) select_aliases_.emplace_back(item.alias, item.expr.get());
    }
  }

  // Column resolution ------------------------------------------------------

  ExprPtr resolve_column(const AstExpr& a) {
    if (!a.qualifier.empty()) {
      for (std::size_t s = 0; s < core_.sources.size(); ++s) {
        if (!iequals(core_.sources[s].alias, a.qualifier)) continue;
        if (auto c = find_in(static_cast<int>(s), a.name)) return c;
        bind_fail("unknown column '" + a.qualifier + "." + a.name + "'");
      }
      bind_fail("unknown table or alias '" + a.qualifier + "' in '" + a.qualifier + "." + a.name + "'");
    }
    ExprPtr found;
    for (std::size_t s = 0; s < core_.sources.size(); ++s) {
      if (auto c = find_in(static_cast<int>(s), a.name)) {
        if (found) bind_fail("ambiguous column '" + a.name + "'");
        found = c;
      }
    }
    return found;
  }

  ExprPtr find_in(int s, std::string_view name) const {
    const auto& src = core_.sources[static_cast<std::size_t>(s)];
    for (std::size_t c = 0; c < src.columns.size(); ++c) {
      if (iequals(src.columns[c].name, name)) {
        return make_column(s, static_cast<int>(c), src.columns[c].type, src.alias + "." + src.columns[c].name);
      }
    }
    return nullptr;
  }

  const AstExpr* select_alias(std::string_view name) const {
    for (const auto& [alias, expr] : select_aliases_) {
      if (iequals(alias, name)) return expr;
    }
    return nullptr;
  }

  // Expression binding -----------------------------------------------------

  enum class Mode { Row, Agg };

  ExprPtr bind(const AstExpr& a, Mode mode, bool allow_alias = false) {
    if (mode == Mode::Agg) return bind_agg(a, allow_alias);
    return bind_row(a, allow_alias);
  }

  ExprPtr bind_row(const AstExpr& a, bool alias_fallback) {
    switch (a.kind) {
      case AK::Literal: {
        auto e = make_expr(EK::Literal, type_of(a.value).value_or(DataType::Text));
        e->literal = a.value;
        return e;
      }
      case AK::Identifier: {
        if (auto c = resolve_column(a)) return c;
        if (alias_fallback && a.qualifier.empty()) {
          if (const AstExpr* target = select_alias(a.name); target && !contains_aggregate(*target)) {
            return bind_row(*target, false);
          }
        }
        bind_fail("unknown column '" + a.name + "'");
      }
      case AK::Call:
        if (is_aggregate_name(a.name)) bind_fail("aggregate " + render(a) + " is not allowed here");
        return bind_function(a, [&](const AstExpr& c) { return bind_row(c, false); });
      default:
        return combine(a, [&](const AstExpr& c) { return bind_row(c, false); });
    }
  }

  ExprPtr bind_agg(const AstExpr& a, bool allow_alias) {
    if (allow_alias && a.kind == AK::Identifier && a.qualifier.empty()) {
      if (const AstExpr* target = select_alias(a.name)) {
        if (!resolve_column_quiet(a)) return bind_agg(*target, false);
      }
    }
    if (a.kind == AK::Call && is_aggregate_name(a.name)) return bind_aggregate_call(a);
    if (!contains_aggregate(a) && !(allow_alias && refs_alias(a))) {
      ExprPtr row = bind_row(a, false);
      for (std::size_t k = 0; k < core_.group_keys.size(); ++k) {
        if (same_expr(*row, *core_.group_keys[k])) {
          return make_column(0, static_cast<int>(k), row->type, render_expr(*row));
        }
      }
      if (row->kind == EK::Literal) return row;
      if (row->kind == EK::Column) return add_agg(AggKind::AnyMin, row, row->type, render_expr(*row));
    }
    if (a.kind == AK::Call) {
      return bind_function(a, [&](const AstExpr& c) { return bind_agg(c, allow_alias); });
    }
    return combine(a, [&](const AstExpr& c) { return bind_agg(c, allow_alias); });
  }

  bool refs_alias(const AstExpr& a) {
    if (a.kind == AK::Identifier) return a.qualifier.empty() && select_alias(a.name) && !resolve_column_quiet(a);
    for (const auto& c : a.args) {
      if (c && refs_alias(*c)) return true;
    }
    return false;
  }

  bool resolve_column_quiet(const AstExpr& a) {
    try {
      return resolve_column(a) != nullptr;
    } catch (const BindError&) {
      return true;
    }
  }

  ExprPtr bind_aggregate_call(const AstExpr& a) {
    for (const auto& c : a.args) {
      if (contains_aggregate(*c)) bind_fail("nested aggregate in " + render(a));
    }
    const std::string label = render(a);
    if (iequals(a.name, "count")) {
      if (a.star) return add_agg(AggKind::CountStar, nullptr, DataType::Int64, label);
      if (a.args.size() != 1) bind_fail("COUNT takes one argument");
      return add_agg(AggKind::Count, bind_row(*a.args[0], false), DataType::Int64, label);
    }
    if (a.star || a.args.size() != 1) bind_fail(to_lower(a.name) + " takes one argument");
    ExprPtr arg = bind_row(*a.args[0], false);
    if (iequals(a.name, "sum")) {
      if (!is_numeric(arg->type)) bind_fail("type error: SUM over " + type_name(arg->type));
      return add_agg(AggKind::Sum, arg, arg->type, label);
    }
    if (arg->type == DataType::GeoPoint || arg->type == DataType::GeoPolygon) {
      bind_fail("type error: MAX over " + type_name(arg->type));
    }
    return add_agg(AggKind::Max, arg, arg->type, label);
  }

  ExprPtr add_agg(AggKind kind, ExprPtr arg, DataType type, const std::string& label) {
    std::size_t idx = 0;
    for (; idx < core_.aggs.size(); ++idx) {
      const auto& g = core_.aggs[idx];
      if (g.kind != kind) continue;
      if (!g.arg && !arg) break;
      if (g.arg && arg && same_expr(*g.arg, *arg)) break;
    }
    if (idx == core_.aggs.size()) core_.aggs.push_back({kind, arg, type, label});
    return make_column(0, static_cast<int>(core_.group_keys.size() + idx), type, core_.aggs[idx].label);
  }

  template <typename Child>
  ExprPtr bind_function(const AstExpr& a, Child&& child) {
    const bool year = iequals(a.name, "year");
    if (!year && !iequals(a.name, "month")) bind_fail("unknown function '" + a.name + "'");
    if (a.star || a.args.size() != 1) bind_fail(to_lower(a.name) + " takes one argument");
    ExprPtr arg = child(*a.args[0]);
    if (arg->type != DataType::Date) bind_fail("type error: " + to_lower(a.name) + " over " + type_name(arg->type));
    auto e = make_expr(year ? EK::Year : EK::Month, DataType::Int64);
    e->args = {arg};
    return e;
  }

  template <typename Child>
  ExprPtr combine(const AstExpr& a, Child&& child) {
    switch (a.kind) {
      case AK::And:
      case AK::Or: {
        ExprPtr l = child(*a.args[0]);
        ExprPtr r = child(*a.args[1]);
        if (l->type != DataType::Bool || r->type != DataType::Bool) {
          bind_fail("type error: AND/OR over non-boolean operand in " + render(a));
        }
        auto e = make_expr(a.kind == AK::And ? EK::And : EK::Or, DataType::Bool);
        e->args = {l, r};
        return e;
      }
      case AK::Compare: {
        ExprPtr l = child(*a.args[0]);
        ExprPtr r = child(*a.args[1]);
        coerce_pair(l, r, a);
        if ((l->type == DataType::GeoPoint || l->type == DataType::GeoPolygon) && a.op != CompareOp::Eq &&
            a.op != CompareOp::Ne) {
          bind_fail("type error: ordering comparison over " + type_name(l->type));
        }
        auto e = make_expr(EK::Compare, DataType::Bool);
        e->op = a.op;
        e->args = {l, r};
        return e;
      }
      case AK::Like: {
        ExprPtr l = child(*a.args[0]);
        if (l->type != DataType::Text) bind_fail("type error: LIKE on " + type_name(l->type) + " operand " + render(*a.args[0]));
        const AstExpr& p = *a.args[1];
        const auto* pat = std::get_if<std::string>(&p.value);
        if (p.kind != AK::Literal || !pat) bind_fail("LIKE pattern must be a string literal");
        auto e = make_expr(EK::Like, DataType::Bool);
        e->args = {l};
        e->pattern = *pat;
        return e;
      }
      case AK::InList: {
        ExprPtr l = child(*a.args[0]);
        auto e = make_expr(EK::InList, DataType::Bool);
        e->args = {l};
        for (std::size_t i = 1; i < a.args.size(); ++i) {
          if (a.args[i]->kind != AK::Literal) bind_fail("IN list members must be literals");
          auto v = coerce_literal(a.args[i]->value, l->type);
          if (!v) bind_fail("type error: IN member " + render(*a.args[i]) + " is not " + type_name(l->type));
          e->list.push_back(std::move(*v));
        }
        return e;
      }
      case AK::InSubquery: {
        ExprPtr l = child(*a.args[0]);
        auto sub = std::make_shared<QueryPlan>(plan(*a.subquery, schema_));
        if (sub->headers.size() != 1) bind_fail("IN subquery must return exactly one column");
        if (!comparable(l->type, sub->types[0])) {
          bind_fail("type error: IN subquery of " + type_name(sub->types[0]) + " against " + type_name(l->type));
        }
        auto e = make_expr(EK::InSubquery, DataType::Bool);
        e->args = {l};
        e->subquery = std::move(sub);
        return e;
      }
      default:
        bind_fail("cannot bind expression " + render(a));
    }
  }

  void coerce_pair(ExprPtr& l, ExprPtr& r, const AstExpr& a) {
    if (comparable(l->type, r->type)) return;
    auto try_coerce = [](ExprPtr& lit, DataType target) {
      if (lit->kind != EK::Literal) return false;
      auto v = coerce_literal(lit->literal, target);
      if (!v) return false;
      auto e = make_expr(EK::Literal, target);
      e->literal = std::move(*v);
      lit = e;
      return true;
    };
    if (try_coerce(r, l->type) || try_coerce(l, r->type)) return;
    bind_fail("type error: cannot compare " + type_name(l->type) + " with " + type_name(r->type) + " in " + render(a));
  }

  // Planning ---------------------------------------------------------------

  void plan_branch() {
    bind_sources();
    plan_joins();
    plan_aggregation();
    core_.distinct = ast_.distinct;
    compute_needed();
  }

  const std::vector<std::string>& headers() const { return headers_; }

  std::set<int> sources_of(const Expr& e) const {
    std::set<int> s;
    for_each_column(e, [&](int src, int) { s.insert(src); });
    return s;
  }

  void plan_joins() {
    const int n = static_cast<int>(core_.sources.size());
    std::vector<AstExprPtr> where_parts;
    split_conjuncts(ast_.where, where_parts);

    // Join skeleton: order of sources, kind of each step and its ON clause.
    struct Pending {
      int source;
      JoinKind kind;
      bool from_right;
      AstExprPtr on;
    };
    std::vector<Pending> steps;
    std::vector<bool> nullable(static_cast<std::size_t>(n), false);
    bool outer = false;
    for (int i = 1; i < n; ++i) {
      const auto jt = ast_.from[static_cast<std::size_t>(i)].join;
      outer = outer || jt == JoinType::Left || jt == JoinType::Right;
    }
    for (const auto& ref : ast_.from) {
      if (ref.on && (ref.join == JoinType::Inner || ref.join == JoinType::Comma)) split_conjuncts(ref.on, where_parts);
    }

    std::vector<ExprPtr> where;
    for (const auto& w : where_parts) {
      ExprPtr e = bind_row(*w, false);
      if (e->type != DataType::Bool) bind_fail("WHERE condition is not boolean: " + render(*w));
      where.push_back(e);
    }

    auto is_equi = [&](const Expr& e) {
      return e.kind == EK::Compare && e.op == CompareOp::Eq && e.args[0]->kind == EK::Column &&
             e.args[1]->kind == EK::Column && e.args[0]->source != e.args[1]->source;
    };

    if (!outer) {
      int first = 0;
      for (int i = 0; i < n; ++i) {
        if (core_.sources[static_cast<std::size_t>(i)].fact) {
          first = i;
          break;
        }
      }
      std::vector<bool> joined(static_cast<std::size_t>(n), false);
      joined[static_cast<std::size_t>(first)] = true;
      core_.first = first;
      for (int added = 1; added < n; ++added) {
        int next = -1;
        for (int i = 0; i < n && next < 0; ++i) {
          if (joined[static_cast<std::size_t>(i)]) continue;
          for (const auto& e : where) {
            if (!is_equi(*e)) continue;
            const int a = e->args[0]->source, b = e->args[1]->source;
            if ((a == i && joined[static_cast<std::size_t>(b)]) || (b == i && joined[static_cast<std::size_t>(a)])) {
              next = i;
              break;
            }
          }
        }
        if (next < 0) {
          for (int i = 0; i < n; ++i) {
            if (!joined[static_cast<std::size_t>(i)]) {
              next = i;
              break;
            }
          }
        }
        joined[static_cast<std::size_t>(next)] = true;
        steps.push_back({next, JoinKind::Inner, false, nullptr});
      }
    } else {
      core_.first = 0;
      for (int i = 1; i < n; ++i) {
        const auto& ref = ast_.from[static_cast<std::size_t>(i)];
        switch (ref.join) {
          case JoinType::Comma:
          case JoinType::Inner:
            steps.push_back({i, JoinKind::Inner, false, nullptr});
            break;
          case JoinType::Left:
            steps.push_back({i, JoinKind::LeftOuter, false, ref.on});
            nullable[static_cast<std::size_t>(i)] = true;
            break;
          case JoinType::Right:
            if (i != 1) bind_fail("RIGHT JOIN is supported only with a single-table left input");
            core_.first = 1;
            steps.push_back({0, JoinKind::LeftOuter, true, ref.on});
            nullable[0] = true;
            break;
        }
      }
    }

    // Position of each source in the join sequence.
    std::vector<int> pos(static_cast<std::size_t>(n), 0);
    pos[static_cast<std::size_t>(core_.first)] = 0;
    for (std::size_t k = 0; k < steps.size(); ++k) pos[static_cast<std::size_t>(steps[k].source)] = static_cast<int>(k + 1);

    std::vector<std::vector<ExprPtr>> source_filters(static_cast<std::size_t>(n));
    std::vector<JoinStep> out(steps.size());
    std::vector<std::vector<ExprPtr>> step_filters(steps.size());
    std::vector<std::vector<ExprPtr>> step_conditions(steps.size());
    for (std::size_t k = 0; k < steps.size(); ++k) {
      out[k].source = steps[k].source;
      out[k].kind = steps[k].kind;
      out[k].from_right_join = steps[k].from_right;
    }

    // ON clauses of outer joins.
    for (std::size_t k = 0; k < steps.size(); ++k) {
      if (!steps[k].on) continue;
      const int right = steps[k].source;
      std::vector<AstExprPtr> parts;
      split_conjuncts(steps[k].on, parts);
      for (const auto& p : parts) {
        ExprPtr e = bind_row(*p, false);
        if (e->type != DataType::Bool) bind_fail("ON condition is not boolean: " + render(*p));
        const auto srcs = sources_of(*e);
        for (int s : srcs) {
          if (pos[static_cast<std::size_t>(s)] > static_cast<int>(k + 1)) {
            bind_fail("ON condition references a table joined later: " + render(*p));
          }
        }
        if (is_equi(*e) && (e->args[0]->source == right || e->args[1]->source == right)) {
          const bool right_first = e->args[0]->source == right;
          out[k].keys.push_back({right_first ? e->args[1] : e->args[0], right_first ? e->args[0] : e->args[1]});
        } else if (srcs.size() == 1 && *srcs.begin() == right) {
          source_filters[static_cast<std::size_t>(right)].push_back(e);
        } else {
          step_conditions[k].push_back(e);
        }
      }
    }

    // WHERE conjuncts.
    for (const auto& e : where) {
      const auto srcs = sources_of(*e);
      if (srcs.empty()) {
        source_filters[static_cast<std::size_t>(core_.first)].push_back(e);
        continue;
      }
      if (srcs.size() == 1 && !nullable[static_cast<std::size_t>(*srcs.begin())]) {
        source_filters[static_cast<std::size_t>(*srcs.begin())].push_back(e);
        continue;
      }
      int last = 0;
      for (int s : srcs) last = std::max(last, pos[static_cast<std::size_t>(s)]);
      if (last == 0) {
        source_filters[static_cast<std::size_t>(core_.first)].push_back(e);
        continue;
      }
      const std::size_t k = static_cast<std::size_t>(last - 1);
      if (is_equi(*e) && out[k].kind != JoinKind::LeftOuter) {
        const int right = out[k].source;
        const bool right_first = e->args[0]->source == right;
        out[k].keys.push_back({right_first ? e->args[1] : e->args[0], right_first ? e->args[0] : e->args[1]});
        continue;
      }
      step_filters[k].push_back(e);
    }

    for (std::size_t k = 0; k < out.size(); ++k) {
      if (out[k].kind == JoinKind::Inner && out[k].keys.empty()) out[k].kind = JoinKind::Cross;
      out[k].condition = and_all(step_conditions[k]);
      out[k].filter = and_all(step_filters[k]);
    }
    for (int s = 0; s < n; ++s) core_.sources[static_cast<std::size_t>(s)].filter = and_all(source_filters[static_cast<std::size_t>(s)]);
    core_.joins = std::move(out);
  }

  void plan_aggregation() {
    bool any_agg = false;
    for (const auto& item : ast_.items) any_agg = any_agg || (item.expr && contains_aggregate(*item.expr));
    if (ast_.having && contains_aggregate(*ast_.having)) any_agg = true;
    core_.aggregate = any_agg || !ast_.group_by.empty();
    if (ast_.having && !core_.aggregate) bind_fail("HAVING requires GROUP BY or an aggregate");

    for (const auto& g : ast_.group_by) {
      ExprPtr e = bind_row(*g, true);
      bool dup = false;
      for (const auto& k : core_.group_keys) dup = dup || same_expr(*k, *e);
      if (!dup) core_.group_keys.push_back(e);
    }

    const Mode mode = core_.aggregate ? Mode::Agg : Mode::Row;
    for (const auto& item : ast_.items) {
      if (item.star) {
        if (core_.aggregate) bind_fail("SELECT * is not allowed in an aggregate query");
        for (int s = 0; s < static_cast<int>(core_.sources.size()); ++s) {
          const auto& src = core_.sources[static_cast<std::size_t>(s)];
          for (int c = 0; c < static_cast<int>(src.columns.size()); ++c) {
            const auto& col = src.columns[static_cast<std::size_t>(c)];
            core_.projections.push_back(make_column(s, c, col.type, src.alias + "." + col.name));
            headers_.push_back(col.name);
          }
        }
        continue;
      }
      core_.projections.push_back(bind(*item.expr, mode));
      if (!item.alias.empty()) {
        headers_.push_back(item.alias);
      } else if (item.expr->kind == AK::Identifier) {
        headers_.push_back(item.expr->name);
      } else {
        headers_.push_back(render(*item.expr));
      }
    }
    if (ast_.having) {
      core_.having = bind(*ast_.having, Mode::Agg, true);
      if (core_.having->type != DataType::Bool) bind_fail("HAVING condition is not boolean");
    }
    for (const auto& p : core_.projections) core_.types.push_back(p->type);
  }

  /// Binds an ORDER BY expression in this branch's output context and
  /// returns the matching projection index.
  std::optional<int> match_projection(const AstExpr& a) {
    ExprPtr e;
    try {
      e = bind(a, core_.aggregate ? Mode::Agg : Mode::Row);
    } catch (const BindError&) {
      return std::nullopt;
    }
    for (std::size_t i = 0; i < core_.projections.size(); ++i) {
      if (same_expr(*e, *core_.projections[i])) return static_cast<int>(i);
    }
    return std::nullopt;
  }

  void compute_needed() {
    std::vector<std::set<int>> needed(core_.sources.size());
    auto collect = [&](const Expr& e) {
      for_each_column(e, [&](int s, int c) { needed[static_cast<std::size_t>(s)].insert(c); });
    };
    for (const auto& s : core_.sources) {
      if (s.filter) collect(*s.filter);
    }
    for (const auto& j : core_.joins) {
      for (const auto& k : j.keys) {
        collect(*k.left);
        collect(*k.right);
      }
      if (j.condition) collect(*j.condition);
      if (j.filter) collect(*j.filter);
    }
    if (core_.aggregate) {
      for (const auto& g : core_.group_keys) collect(*g);
      for (const auto& a : core_.aggs) {
        if (a.arg) collect(*a.arg);
      }
    } else {
      for (const auto& p : core_.projections) collect(*p);
    }
    for (std::size_t s = 0; s < needed.size(); ++s) {
      core_.sources[s].needed.assign(needed[s].begin(), needed[s].end());
    }
  }

 private:
  const ConstellationSchema& schema_;
  const SelectCore& ast_;
  CorePlan& core_;
  std::vector<std::pair<std::string, const AstExpr*>> select_aliases_;
  std::vector<std::string> headers_;
};

}  // namespace

QueryPlan plan(const QueryAst& ast, const ConstellationSchema& schema) {
  if (ast.branches.empty()) bind_fail("empty query");
  QueryPlan out;
  out.union_all = ast.union_all;
  out.limit = ast.limit;
  out.branches.resize(ast.branches.size());
  std::vector<std::unique_ptr<BranchBinder>> binders;
  for (std::size_t b = 0; b < ast.branches.size(); ++b) {
    binders.push_back(std::make_unique<BranchBinder>(schema, ast.branches[b], out.branches[b]));
    binders.back()->plan_branch();
  }
  out.headers = binders[0]->headers();
  out.types = out.branches[0].types;
  for (std::size_t b = 1; b < out.branches.size(); ++b) {
    const auto& t = out.branches[b].types;
    if (t.size() != out.types.size()) {
      bind_fail("UNION branches have different column counts (" + std::to_string(out.types.size()) + " vs " +
                std::to_string(t.size()) + ")");
    }
    for (std::size_t c = 0; c < t.size(); ++c) {
      if (t[c] == out.types[c]) continue;
      if (is_numeric(t[c]) && is_numeric(out.types[c])) {
        out.types[c] = DataType::Float64;
        continue;
      }
      bind_fail("UNION column " + std::to_string(c + 1) + " has incompatible types " + type_name(out.types[c]) +
                " and " + type_name(t[c]));
    }
  }

  for (const auto& item : ast.order_by) {
    const AstExpr& a = *item.expr;
    std::optional<int> col;
    if (a.kind == AK::Literal) {
      const auto* n = std::get_if<std::int64_t>(&a.value);
      if (!n || *n < 1 || *n > static_cast<std::int64_t>(out.headers.size())) {
        bind_fail("ORDER BY position " + render(a) + " is out of range");
      }
      col = static_cast<int>(*n - 1);
    } else if (a.kind == AK::Identifier && a.qualifier.empty()) {
      for (std::size_t i = 0; i < out.headers.size() && !col; ++i) {
        if (iequals(out.headers[i], a.name)) col = static_cast<int>(i);
      }
    }
    if (!col) col = binders[0]->match_projection(a);
    if (!col) bind_fail("ORDER BY expression " + render(a) + " does not appear in the select list");
    out.order.push_back({*col, item.descending});
  }
  out.ordered = !out.order.empty();
  return out;
}

QueryPlan plan(std::string_view sql, const ConstellationSchema& schema) { return plan(parse(sql), schema); }

ExprPtr bind_table_predicate(std::string_view predicate_sql, const TableDef& table) {
  ConstellationSchema single;
  single.tables.emplace(table.name, table);
  const std::string sql = "SELECT * FROM `" + table.name + "` WHERE " + std::string(predicate_sql);
  QueryPlan p = plan(parse(sql), single);
  return p.branches[0].sources[0].filter;
}

// EXPLAIN ------------------------------------------------------------------

namespace {

void explain_plan(const QueryPlan& p, int depth, std::string& out);

void line(std::string& out, int depth, const std::string& text) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += text;
  out += '\n';
}

void explain_subqueries(const Expr& e, int depth, std::string& out) {
  if (e.kind == EK::InSubquery) {
    line(out, depth, "Subquery for " + render_expr(*e.args[0]));
    explain_plan(*e.subquery, depth + 1, out);
  }
  for (const auto& a : e.args) explain_subqueries(*a, depth, out);
}

void explain_source(const Source& s, int depth, std::string& out) {
  std::string text = s.derived ? "DerivedScan " + s.alias : "Scan " + s.table;
  if (!s.derived && !iequals(s.alias, s.table)) text += " AS " + s.alias;
  if (!s.needed.empty()) {
    text += " cols=[";
    for (std::size_t i = 0; i < s.needed.size(); ++i) {
      if (i) text += ",";
      text += s.columns[static_cast<std::size_t>(s.needed[i])].name;
    }
    text += "]";
  }
  if (s.filter) text += " filter=" + render_expr(*s.filter);
  line(out, depth, text);
  if (s.filter) explain_subqueries(*s.filter, depth + 1, out);
  if (s.derived) explain_plan(*s.derived, depth + 1, out);
}

void explain_join_tree(const CorePlan& c, std::size_t steps, int depth, std::string& out) {
  if (steps == 0) {
    explain_source(c.sources[static_cast<std::size_t>(c.first)], depth, out);
    return;
  }
  const JoinStep& j = c.joins[steps - 1];
  if (j.filter) {
    line(out, depth, "Filter " + render_expr(*j.filter));
    explain_subqueries(*j.filter, depth + 1, out);
    ++depth;
  }
  std::string text(to_string(j.kind));
  if (j.from_right_join) text += " (from RIGHT JOIN)";
  if (!j.keys.empty()) {
    text += " on ";
    for (std::size_t i = 0; i < j.keys.size(); ++i) {
      if (i) text += " AND ";
      text += render_expr(*j.keys[i].left) + " = " + render_expr(*j.keys[i].right);
    }
  }
  if (j.condition) text += " cond=" + render_expr(*j.condition);
  line(out, depth, text);
  explain_join_tree(c, steps - 1, depth + 1, out);
  explain_source(c.sources[static_cast<std::size_t>(j.source)], depth + 1, out);
}

void explain_core(const CorePlan& c, int depth, std::string& out) {
  std::string proj = c.distinct ? "Distinct Project [" : "Project [";
  for (std::size_t i = 0; i < c.projections.size(); ++i) {
    if (i) proj += ", ";
    proj += render_expr(*c.projections[i]);
  }
  line(out, depth++, proj + "]");
  if (c.having) line(out, depth++, "Having " + render_expr(*c.having));
  if (c.aggregate) {
    std::string agg = "Aggregate keys=[";
    for (std::size_t i = 0; i < c.group_keys.size(); ++i) {
      if (i) agg += ", ";
      agg += render_expr(*c.group_keys[i]);
    }
    agg += "] aggs=[";
    for (std::size_t i = 0; i < c.aggs.size(); ++i) {
      if (i) agg += ", ";
      const auto& a = c.aggs[i];
      if (a.kind == AggKind::CountStar) {
        agg += "COUNT(*)";
      } else {
        agg += std::string(to_string(a.kind)) + "(" + render_expr(*a.arg) + ")";
      }
    }
    line(out, depth++, agg + "]");
  }
  explain_join_tree(c, c.joins.size(), depth, out);
}

void explain_plan(const QueryPlan& p, int depth, std::string& out) {
  if (p.limit) line(out, depth++, "Limit " + std::to_string(*p.limit));
  if (!p.order.empty()) {
    std::string s = "Sort [";
    for (std::size_t i = 0; i < p.order.size(); ++i) {
      if (i) s += ", ";
      s += p.headers[static_cast<std::size_t>(p.order[i].column)];
      s += p.order[i].descending ? " DESC" : " ASC";
    }
    line(out, depth++, s + "]");
  }
  if (p.branches.size() > 1) {
    bool all = std::all_of(p.union_all.begin(), p.union_all.end(), [](bool b) { return b; });
    line(out, depth++, all ? "UnionAll" : "Union");
  }
  for (const auto& b : p.branches) explain_core(b, depth, out);
}

}  // namespace

std::string explain(const QueryPlan& p) {
  std::string out = "path=" + std::string(to_string(p.path)) + "\n";
  explain_plan(p, 0, out);
  return out;
}

}  // namespace adw::sql
