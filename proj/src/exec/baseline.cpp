#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "adw/error.hpp"
#include "adw/exec.hpp"

namespace adw::exec {

namespace {

using sql::AggKind;
using sql::CorePlan;
using sql::Expr;
using sql::JoinKind;
using sql::QueryPlan;
using sql::SubqueryResults;

const Value kNull{};

using Tuple = std::vector<const Row*>;

struct TupleAcc {
  const Tuple* t;
  const Value& operator()(int s, int c) const {
    const Row* r = (*t)[static_cast<std::size_t>(s)];
    return r ? (*r)[static_cast<std::size_t>(c)] : kNull;
  }
};

struct RowAcc {
  const Row* r;
  const Value& operator()(int, int c) const { return (*r)[static_cast<std::size_t>(c)]; }
};

struct AggState {
  std::int64_t count = 0;
  std::int64_t isum = 0;
  double dsum = 0;
  bool seen = false;
  Value best;
};

void visit_subqueries(const Expr* e, std::vector<const Expr*>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::InSubquery) out.push_back(e);
  for (const auto& a : e->args) visit_subqueries(a.get(), out);
}

class Runner {
 public:
  explicit Runner(const RowStore& store) : store_(store) {}

  ResultSet run(const QueryPlan& plan) {
    std::vector<Row> rows;
    for (std::size_t b = 0; b < plan.branches.size(); ++b) {
      std::vector<Row> part = run_branch(plan.branches[b]);
      rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
      if (b > 0 && !plan.union_all[b - 1]) rows = distinct(std::move(rows));
    }
    for (auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (plan.types[c] == DataType::Float64) {
          if (const auto* i = std::get_if<std::int64_t>(&row[c])) row[c] = static_cast<double>(*i);
        }
      }
    }
    if (!plan.order.empty()) {
      std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
        for (const auto& k : plan.order) {
          int c = compare_total(a[static_cast<std::size_t>(k.column)], b[static_cast<std::size_t>(k.column)]);
          if (k.descending) c = -c;
          if (c != 0) return c < 0;
        }
        return RowLess{}(a, b);
      });
    } else if (plan.limit) {
      std::stable_sort(rows.begin(), rows.end(), RowLess{});
    }
    if (plan.limit && static_cast<std::size_t>(std::max<std::int64_t>(*plan.limit, 0)) < rows.size()) {
      rows.resize(static_cast<std::size_t>(std::max<std::int64_t>(*plan.limit, 0)));
    }
    ResultSet out;
    out.headers = plan.headers;
    out.types = plan.types;
    out.rows = std::move(rows);
    out.ordered = !plan.order.empty();
    return out;
  }

 private:
  static std::vector<Row> distinct(std::vector<Row> rows) {
    std::set<Row, RowLess> seen;
    std::vector<Row> out;
    for (auto& r : rows) {
      if (seen.insert(r).second) out.push_back(std::move(r));
    }
    return out;
  }

  void prepare_subqueries(const CorePlan& core, SubqueryResults& subs) {
    std::vector<const Expr*> nodes;
    for (const auto& s : core.sources) visit_subqueries(s.filter.get(), nodes);
    for (const auto& j : core.joins) {
      visit_subqueries(j.condition.get(), nodes);
      visit_subqueries(j.filter.get(), nodes);
    }
    visit_subqueries(core.having.get(), nodes);
    for (const auto& p : core.projections) visit_subqueries(p.get(), nodes);
    for (const Expr* e : nodes) {
      if (subs.sets.count(e)) continue;
      Runner inner(store_);
      ResultSet r = inner.run(*e->subquery);
      auto& set = subs.sets[e];
      for (const auto& row : r.rows) {
        if (!row.empty() && !is_null(row[0])) set.insert(row[0]);
      }
    }
  }

  std::vector<Row> run_branch(const CorePlan& core) {
    SubqueryResults subs;
    prepare_subqueries(core, subs);
    const std::size_t n = core.sources.size();

    std::vector<std::shared_lock<std::shared_mutex>> locks;
    std::vector<std::vector<const Row*>> inputs(n);
    std::vector<std::optional<std::size_t>> table_ids(n);
    for (std::size_t s = 0; s < n; ++s) {
      const auto& src = core.sources[s];
      const std::vector<Row>* rows = nullptr;
      if (src.derived) {
        Runner inner(store_);
        derived_.push_back(inner.run(*src.derived).rows);
        rows = &derived_.back();
      } else {
        const std::size_t id = store_.table_id(src.table);
        table_ids[s] = id;
        locks.push_back(store_.read_lock(id));
        rows = &store_.rows(id);
      }
      for (const auto& r : *rows) {
        if (!src.filter || sql::eval_predicate(*src.filter, RowAcc{&r}, &subs)) inputs[s].push_back(&r);
      }
    }

    std::vector<Tuple> tuples;
    for (const Row* r : inputs[static_cast<std::size_t>(core.first)]) {
      Tuple t(n, nullptr);
      t[static_cast<std::size_t>(core.first)] = r;
      tuples.push_back(std::move(t));
    }

    for (const auto& step : core.joins) {
      const auto s = static_cast<std::size_t>(step.source);
      const auto& src = core.sources[s];
      // A key on the inner table's primary key is answered by the PK index.
      const Expr* pk_left = nullptr;
      if (table_ids[s]) {
        const TableDef& def = store_.table_def(*table_ids[s]);
        for (const auto& k : step.keys) {
          if (k.right->kind == Expr::Kind::Column && static_cast<std::size_t>(k.right->column) == def.pk_index()) {
            pk_left = k.left.get();
            break;
          }
        }
      }
      std::vector<Tuple> next;
      std::vector<const Row*> probe;
      for (auto& t : tuples) {
        const std::vector<const Row*>* candidates = &inputs[s];
        if (pk_left) {
          probe.clear();
          Value scratch;
          const Value& key = sql::eval_scalar(*pk_left, TupleAcc{&t}, &subs, scratch);
          if (!is_null(key)) {
            const Row* r = store_.find(*table_ids[s], key);
            if (r && (!src.filter || sql::eval_predicate(*src.filter, RowAcc{r}, &subs))) probe.push_back(r);
          }
          candidates = &probe;
        }
        bool matched = false;
        for (const Row* r : *candidates) {
          t[s] = r;
          const TupleAcc acc{&t};
          bool ok = true;
          for (const auto& k : step.keys) {
            Value s0, s1;
            const auto c = compare_sql(sql::eval_scalar(*k.left, acc, &subs, s0),
                                       sql::eval_scalar(*k.right, acc, &subs, s1));
            if (!c || *c != 0) {
              ok = false;
              break;
            }
          }
          if (ok && step.condition) ok = sql::eval_predicate(*step.condition, acc, &subs);
          if (!ok) continue;
          matched = true;
          if (!step.filter || sql::eval_predicate(*step.filter, acc, &subs)) next.push_back(t);
        }
        if (!matched && step.kind == JoinKind::LeftOuter) {
          t[s] = nullptr;
          if (!step.filter || sql::eval_predicate(*step.filter, TupleAcc{&t}, &subs)) next.push_back(t);
        }
      }
      tuples = std::move(next);
    }

    std::vector<Row> out;
    if (!core.aggregate) {
      for (const auto& t : tuples) {
        Row row;
        row.reserve(core.projections.size());
        for (const auto& p : core.projections) {
          Value scratch;
          row.push_back(sql::eval_scalar(*p, TupleAcc{&t}, &subs, scratch));
        }
        out.push_back(std::move(row));
      }
      return core.distinct ? distinct(std::move(out)) : out;
    }

    std::map<Row, std::vector<AggState>, RowLess> groups;
    for (const auto& t : tuples) {
      const TupleAcc acc{&t};
      Row key;
      for (const auto& g : core.group_keys) {
        Value scratch;
        key.push_back(sql::eval_scalar(*g, acc, &subs, scratch));
      }
      auto [it, inserted] = groups.try_emplace(std::move(key));
      if (inserted) it->second.resize(core.aggs.size());
      for (std::size_t a = 0; a < core.aggs.size(); ++a) {
        const auto& agg = core.aggs[a];
        AggState& st = it->second[a];
        if (agg.kind == AggKind::CountStar) {
          ++st.count;
          continue;
        }
        Value scratch;
        const Value& v = sql::eval_scalar(*agg.arg, acc, &subs, scratch);
        if (is_null(v)) continue;
        switch (agg.kind) {
          case AggKind::Count: ++st.count; break;
          case AggKind::Sum:
            if (const auto* i = std::get_if<std::int64_t>(&v)) {
              st.isum += *i;
              st.dsum += static_cast<double>(*i);
            } else {
              st.dsum += std::get<double>(v);
            }
            st.seen = true;
            break;
          case AggKind::Max:
            if (!st.seen || compare_total(v, st.best) > 0) st.best = v;
            st.seen = true;
            break;
          case AggKind::AnyMin:
            if (!st.seen || compare_total(v, st.best) < 0) st.best = v;
            st.seen = true;
            break;
          case AggKind::CountStar: break;
        }
      }
    }
    const bool count_only = std::all_of(core.aggs.begin(), core.aggs.end(), [](const sql::AggCall& a) {
      return a.kind == AggKind::Count || a.kind == AggKind::CountStar;
    });
    if (groups.empty() && core.group_keys.empty() && count_only) groups[Row{}].resize(core.aggs.size());

    for (const auto& [key, states] : groups) {
      Row agg_row = key;
      for (std::size_t a = 0; a < core.aggs.size(); ++a) {
        const auto& agg = core.aggs[a];
        const AggState& st = states[a];
        switch (agg.kind) {
          case AggKind::Count:
          case AggKind::CountStar: agg_row.emplace_back(st.count); break;
          case AggKind::Sum:
            if (!st.seen) {
              agg_row.emplace_back();
            } else if (agg.type == DataType::Int64) {
              agg_row.emplace_back(st.isum);
            } else {
              agg_row.emplace_back(st.dsum);
            }
            break;
          default: agg_row.push_back(st.seen ? st.best : Value{}); break;
        }
      }
      const RowAcc acc{&agg_row};
      if (core.having && !sql::eval_predicate(*core.having, acc, &subs)) continue;
      Row row;
      for (const auto& p : core.projections) {
        Value scratch;
        row.push_back(sql::eval_scalar(*p, acc, &subs, scratch));
      }
      out.push_back(std::move(row));
    }
    return core.distinct ? distinct(std::move(out)) : out;
  }

  const RowStore& store_;
  std::deque<std::vector<Row>> derived_;
};

}  // namespace

ResultSet execute_baseline(const QueryPlan& plan, const RowStore& store) {
  Runner runner(store);
  return runner.run(plan);
}

}  // namespace adw::exec
