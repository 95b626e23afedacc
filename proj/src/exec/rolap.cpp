#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "adw/error.hpp"
#include "adw/exec.hpp"

namespace adw::exec {

namespace {

using sql::AggKind;
using sql::CompareOp;
using sql::CorePlan;
using sql::Expr;
using sql::JoinKind;
using sql::QueryPlan;
using sql::SubqueryResults;

using Sel = std::vector<std::uint32_t>;
constexpr std::uint32_t kNullRow = std::numeric_limits<std::uint32_t>::max();
const Value kNull{};

/// Columns of one FROM item; only referenced columns are fetched.
struct ColSource {
  std::vector<const ColumnSegment*> cols;
  std::size_t rows = 0;
  std::vector<std::unique_ptr<ColumnSegment>> owned;
};

/// Tuples of the running join as one row-id vector per source.
struct Tuples {
  std::vector<std::vector<std::uint32_t>> ids;
  std::size_t size = 0;
};

/// Value accessor for generic evaluation; caches one Value per column slot.
class SlotAcc {
 public:
  SlotAcc(const std::vector<ColSource>& srcs, const std::vector<std::uint32_t>* row_of)
      : srcs_(srcs), row_of_(row_of) {
    offsets_.push_back(0);
    for (const auto& s : srcs) offsets_.push_back(offsets_.back() + s.cols.size());
    slots_.resize(offsets_.back());
  }
  void set_rows(const std::vector<std::uint32_t>* row_of) { row_of_ = row_of; }
  const Value& operator()(int s, int c) const {
    const auto su = static_cast<std::size_t>(s);
    const std::uint32_t r = (*row_of_)[su];
    if (r == kNullRow) return kNull;
    Value& slot = slots_[offsets_[su] + static_cast<std::size_t>(c)];
    slot = srcs_[su].cols[static_cast<std::size_t>(c)]->value(r);
    return slot;
  }

 private:
  const std::vector<ColSource>& srcs_;
  const std::vector<std::uint32_t>* row_of_;
  std::vector<std::size_t> offsets_;
  mutable std::vector<Value> slots_;
};

struct ValuesAcc {
  const Row* r;
  const Value& operator()(int, int c) const { return (*r)[static_cast<std::size_t>(c)]; }
};

bool op_holds(CompareOp op, int c) noexcept {
  switch (op) {
    case CompareOp::Eq: return c == 0;
    case CompareOp::Ne: return c != 0;
    case CompareOp::Lt: return c < 0;
    case CompareOp::Le: return c <= 0;
    case CompareOp::Gt: return c > 0;
    case CompareOp::Ge: return c >= 0;
  }
  return false;
}

CompareOp flip(CompareOp op) noexcept {
  switch (op) {
    case CompareOp::Lt: return CompareOp::Gt;
    case CompareOp::Le: return CompareOp::Ge;
    case CompareOp::Gt: return CompareOp::Lt;
    case CompareOp::Ge: return CompareOp::Le;
    default: return op;
  }
}

template <typename T>
inline int cmp3(const T& a, const T& b) noexcept {
  return a < b ? -1 : (b < a ? 1 : 0);
}

template <typename Pred>
void keep_if(const ColumnSegment& seg, Sel& sel, Pred&& pred) {
  const auto& nulls = seg.nulls();
  std::size_t w = 0;
  for (std::uint32_t r : sel) {
    if (!nulls[r] && pred(r)) sel[w++] = r;
  }
  sel.resize(w);
}

/// Typed filter kernels over one source's selection vector.
class Filter {
 public:
  Filter(const std::vector<ColSource>& srcs, int source, const SubqueryResults* subs)
      : srcs_(srcs), source_(source), subs_(subs) {}

  void apply(const Expr& e, Sel& sel) const {
    using K = Expr::Kind;
    switch (e.kind) {
      case K::And:
        apply(*e.args[0], sel);
        apply(*e.args[1], sel);
        return;
      case K::Or: {
        Sel left = sel;
        apply(*e.args[0], left);
        Sel rest;
        std::set_difference(sel.begin(), sel.end(), left.begin(), left.end(), std::back_inserter(rest));
        apply(*e.args[1], rest);
        sel.clear();
        std::merge(left.begin(), left.end(), rest.begin(), rest.end(), std::back_inserter(sel));
        return;
      }
      case K::Compare:
        if (compare_kernel(e, sel)) return;
        break;
      case K::Like:
        if (e.args[0]->kind == K::Column) {
          const ColumnSegment& seg = column(*e.args[0]);
          const auto& texts = seg.texts();
          keep_if(seg, sel, [&](std::uint32_t r) { return sql::like_match(texts[r], e.pattern); });
          return;
        }
        break;
      default: break;
    }
    generic(e, sel);
  }

 private:
  const ColumnSegment& column(const Expr& c) const {
    return *srcs_[static_cast<std::size_t>(source_)].cols[static_cast<std::size_t>(c.column)];
  }

  bool compare_kernel(const Expr& e, Sel& sel) const {
    using K = Expr::Kind;
    const Expr* lhs = e.args[0].get();
    const Expr* rhs = e.args[1].get();
    CompareOp op = e.op;
    if (lhs->kind == K::Literal && rhs->kind != K::Literal) {
      std::swap(lhs, rhs);
      op = flip(op);
    }
    if (rhs->kind != K::Literal || is_null(rhs->literal)) return false;
    const Value& lit = rhs->literal;

    if ((lhs->kind == K::Year || lhs->kind == K::Month) && lhs->args[0]->kind == K::Column) {
      const ColumnSegment& seg = column(*lhs->args[0]);
      if (seg.type() != DataType::Date) return false;
      const auto target = as_double(lit);
      if (!target) return false;
      const auto& days = seg.dates();
      const bool year = lhs->kind == K::Year;
      keep_if(seg, sel, [&](std::uint32_t r) {
        const CivilDate c = to_civil(Date{days[r]});
        const double v = year ? c.year : static_cast<double>(c.month);
        return op_holds(op, cmp3(v, *target));
      });
      return true;
    }
    if (lhs->kind != K::Column) return false;
    const ColumnSegment& seg = column(*lhs);
    switch (seg.type()) {
      case DataType::Int64: {
        const auto& v = seg.ints();
        if (const auto* i = std::get_if<std::int64_t>(&lit)) {
          const std::int64_t x = *i;
          keep_if(seg, sel, [&](std::uint32_t r) { return op_holds(op, cmp3(v[r], x)); });
          return true;
        }
        if (const auto* d = std::get_if<double>(&lit)) {
          const double x = *d;
          keep_if(seg, sel, [&](std::uint32_t r) { return op_holds(op, cmp3(static_cast<double>(v[r]), x)); });
          return true;
        }
        return false;
      }
      case DataType::Float64: {
        const auto x = as_double(lit);
        if (!x) return false;
        const auto& v = seg.doubles();
        keep_if(seg, sel, [&](std::uint32_t r) { return op_holds(op, cmp3(v[r], *x)); });
        return true;
      }
      case DataType::Text: {
        const auto* s = std::get_if<std::string>(&lit);
        if (!s) return false;
        const auto& v = seg.texts();
        keep_if(seg, sel, [&](std::uint32_t r) { return op_holds(op, cmp3(v[r].compare(*s), 0)); });
        return true;
      }
      case DataType::Date: {
        const auto* d = std::get_if<Date>(&lit);
        if (!d) return false;
        const auto& v = seg.dates();
        const std::int32_t x = d->days;
        keep_if(seg, sel, [&](std::uint32_t r) { return op_holds(op, cmp3(v[r], x)); });
        return true;
      }
      default: return false;
    }
  }

  void generic(const Expr& e, Sel& sel) const {
    std::vector<std::uint32_t> row_of(srcs_.size(), kNullRow);
    SlotAcc acc(srcs_, &row_of);
    std::size_t w = 0;
    for (std::uint32_t r : sel) {
      row_of[static_cast<std::size_t>(source_)] = r;
      if (sql::eval_predicate(e, acc, subs_)) sel[w++] = r;
    }
    sel.resize(w);
  }

  const std::vector<ColSource>& srcs_;
  int source_;
  const SubqueryResults* subs_;
};

void visit_subqueries(const Expr* e, std::vector<const Expr*>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::InSubquery) out.push_back(e);
  for (const auto& a : e->args) visit_subqueries(a.get(), out);
}

void mark_columns(const Expr* e, std::vector<std::vector<bool>>& used) {
  if (!e) return;
  sql::for_each_column(*e, [&](int s, int c) {
    used[static_cast<std::size_t>(s)][static_cast<std::size_t>(c)] = true;
  });
}

/// Neumaier-compensated running sum.
struct CompSum {
  double sum = 0;
  double comp = 0;
  void add(double x) noexcept {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const noexcept { return sum + comp; }
};

struct AggAcc {
  std::int64_t count = 0;
  std::int64_t isum = 0;
  CompSum dsum;
  bool seen = false;
  Value best;
};

class Runner {
 public:
  Runner(const ColumnStore& store, std::size_t partitions) : store_(store), partitions_(partitions) {}

  ResultSet run(const QueryPlan& plan) {
    std::vector<Row> rows;
    for (std::size_t b = 0; b < plan.branches.size(); ++b) {
      std::vector<Row> part = run_branch(plan.branches[b], plan.types);
      if (rows.empty()) {
        rows = std::move(part);
      } else {
        rows.reserve(rows.size() + part.size());
        for (auto& r : part) rows.push_back(std::move(r));
      }
      if (b > 0 && !plan.union_all[b - 1]) rows = distinct(std::move(rows));
    }
    auto less_full = [](const Row& a, const Row& b) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        const int c = compare_total(a[i], b[i]);
        if (c != 0) return c < 0;
      }
      return false;
    };
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

 private:
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
      Runner inner(store_, partitions_);
      const ResultSet r = inner.run(*e->subquery);
      auto& set = subs.sets[e];
      for (const auto& row : r.rows) {
        if (!is_null(row[0])) set.insert(row[0]);
      }
    }
  }

  void open_sources(const CorePlan& core, std::vector<ColSource>& srcs,
                    std::vector<std::shared_lock<std::shared_mutex>>& locks) {
    const std::size_t n = core.sources.size();
    std::vector<std::vector<bool>> used(n);
    for (std::size_t s = 0; s < n; ++s) used[s].assign(core.sources[s].columns.size(), false);
    for (std::size_t s = 0; s < n; ++s) {
      for (int c : core.sources[s].needed) used[s][static_cast<std::size_t>(c)] = true;
      mark_columns(core.sources[s].filter.get(), used);
    }
    for (const auto& j : core.joins) {
      for (const auto& k : j.keys) {
        mark_columns(k.left.get(), used);
        mark_columns(k.right.get(), used);
      }
      mark_columns(j.condition.get(), used);
      mark_columns(j.filter.get(), used);
    }
    if (core.aggregate) {
      for (const auto& g : core.group_keys) mark_columns(g.get(), used);
      for (const auto& a : core.aggs) mark_columns(a.arg.get(), used);
    } else {
      for (const auto& p : core.projections) mark_columns(p.get(), used);
    }

    srcs.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
      const auto& src = core.sources[s];
      ColSource& cs = srcs[s];
      cs.cols.assign(src.columns.size(), nullptr);
      if (src.derived) {
        Runner inner(store_, partitions_);
        const ResultSet r = inner.run(*src.derived);
        for (std::size_t c = 0; c < src.columns.size(); ++c) {
          auto seg = std::make_unique<ColumnSegment>(src.columns[c].name, src.columns[c].type);
          for (const auto& row : r.rows) seg->push(row[c]);
          cs.cols[c] = seg.get();
          cs.owned.push_back(std::move(seg));
        }
        cs.rows = r.rows.size();
      } else {
        const std::size_t id = store_.table_id(src.table);
        locks.push_back(store_.read_lock(id));
        for (std::size_t c = 0; c < src.columns.size(); ++c) {
          if (used[s][c]) cs.cols[c] = &store_.segment(id, c);
        }
        cs.rows = store_.rows(id);
      }
    }
  }

  std::vector<Row> run_branch(const CorePlan& core, const std::vector<DataType>& out_types) {
    SubqueryResults subs;
    prepare_subqueries(core, subs);
    std::vector<std::shared_lock<std::shared_mutex>> locks;
    std::vector<ColSource> srcs;
    open_sources(core, srcs, locks);
    const std::size_t n = srcs.size();

    std::vector<Sel> selected(n);
    for (std::size_t s = 0; s < n; ++s) {
      Sel& sel = selected[s];
      sel.resize(srcs[s].rows);
      for (std::size_t r = 0; r < sel.size(); ++r) sel[r] = static_cast<std::uint32_t>(r);
      if (core.sources[s].filter) Filter(srcs, static_cast<int>(s), &subs).apply(*core.sources[s].filter, sel);
    }

    Tuples tup;
    tup.ids.resize(n);
    tup.ids[static_cast<std::size_t>(core.first)] = std::move(selected[static_cast<std::size_t>(core.first)]);
    tup.size = tup.ids[static_cast<std::size_t>(core.first)].size();
    std::vector<bool> joined(n, false);
    joined[static_cast<std::size_t>(core.first)] = true;

    for (const auto& step : core.joins) {
      join_step(step, srcs, selected[static_cast<std::size_t>(step.source)], joined, tup, subs);
      joined[static_cast<std::size_t>(step.source)] = true;
    }

    std::vector<Row> out;
    std::vector<std::uint32_t> row_of(n, kNullRow);
    SlotAcc acc(srcs, &row_of);
    auto load = [&](std::size_t i) {
      for (std::size_t s = 0; s < n; ++s) row_of[s] = joined[s] ? tup.ids[s][i] : kNullRow;
    };

    if (!core.aggregate) {
      out.reserve(tup.size);
      for (std::size_t i = 0; i < tup.size; ++i) {
        load(i);
        Row row;
        row.reserve(core.projections.size());
        for (std::size_t p = 0; p < core.projections.size(); ++p) {
          Value scratch;
          Value v = sql::eval_scalar(*core.projections[p], acc, &subs, scratch);
          widen(v, out_types[p]);
          row.push_back(std::move(v));
        }
        out.push_back(std::move(row));
      }
      if (core.distinct) out = distinct(std::move(out));
      return out;
    }

    // Group lookup, memoized per row of the key source when every key is a
    // column of one source.
    int memo_source = -1;
    if (!core.group_keys.empty()) {
      memo_source = core.group_keys[0]->kind == Expr::Kind::Column ? core.group_keys[0]->source : -2;
      for (const auto& g : core.group_keys) {
        if (g->kind != Expr::Kind::Column || g->source != memo_source) memo_source = -2;
      }
    }
    std::vector<std::int32_t> memo;
    if (memo_source >= 0) memo.assign(srcs[static_cast<std::size_t>(memo_source)].rows, -1);

    std::unordered_map<Row, std::size_t, RowHash, RowEq> index;
    std::vector<Row> keys;
    std::vector<AggAcc> states;
    const std::size_t na = core.aggs.size();

    // Each partition aggregates into its own table; partitions then merge
    // in partition order, so the result does not depend on the split.
    const std::size_t parts = std::max<std::size_t>(1, std::min(partitions_, std::max<std::size_t>(tup.size, 1)));
    for (std::size_t part = 0; part < parts; ++part) {
      const std::size_t begin = tup.size * part / parts;
      const std::size_t end = tup.size * (part + 1) / parts;
      std::unordered_map<Row, std::size_t, RowHash, RowEq> local_index;
      std::vector<Row> local_keys;
      std::vector<AggAcc> local_states;
      if (memo_source >= 0) std::fill(memo.begin(), memo.end(), -1);

      auto group_of = [&](std::size_t i) -> std::size_t {
        std::uint32_t mr = kNullRow;
        if (memo_source >= 0) {
          mr = tup.ids[static_cast<std::size_t>(memo_source)][i];
          if (mr != kNullRow && memo[mr] >= 0) return static_cast<std::size_t>(memo[mr]);
        }
        Row key;
        key.reserve(core.group_keys.size());
        for (const auto& g : core.group_keys) {
          Value scratch;
          key.push_back(sql::eval_scalar(*g, acc, &subs, scratch));
        }
        auto [it, inserted] = local_index.try_emplace(key, local_keys.size());
        if (inserted) {
          local_keys.push_back(std::move(key));
          local_states.resize(local_states.size() + na);
        }
        if (mr != kNullRow) memo[mr] = static_cast<std::int32_t>(it->second);
        return it->second;
      };

      for (std::size_t i = begin; i < end; ++i) {
        load(i);
        const std::size_t g = group_of(i);
        AggAcc* st = local_states.data() + g * na;
        for (std::size_t a = 0; a < na; ++a) update(core.aggs[a], st[a], srcs, row_of, acc, subs);
      }

      if (parts == 1) {
        keys = std::move(local_keys);
        states = std::move(local_states);
        break;
      }
      for (std::size_t g = 0; g < local_keys.size(); ++g) {
        auto [it, inserted] = index.try_emplace(local_keys[g], keys.size());
        if (inserted) {
          keys.push_back(local_keys[g]);
          states.resize(states.size() + na);
        }
        for (std::size_t a = 0; a < na; ++a) {
          merge(core.aggs[a], states[it->second * na + a], local_states[g * na + a]);
        }
      }
    }
    if (keys.empty() && core.group_keys.empty() && count_only(core)) {
      keys.emplace_back();
      states.resize(na);
    }

    for (std::size_t g = 0; g < keys.size(); ++g) {
      Row agg_row = keys[g];
      for (std::size_t a = 0; a < na; ++a) agg_row.push_back(finish(core.aggs[a], states[g * na + a]));
      const ValuesAcc vacc{&agg_row};
      if (core.having && !sql::eval_predicate(*core.having, vacc, &subs)) continue;
      Row row;
      for (std::size_t p = 0; p < core.projections.size(); ++p) {
        Value scratch;
        Value v = sql::eval_scalar(*core.projections[p], vacc, &subs, scratch);
        widen(v, out_types[p]);
        row.push_back(std::move(v));
      }
      out.push_back(std::move(row));
    }
    if (core.distinct) out = distinct(std::move(out));
    return out;
  }

  static bool count_only(const CorePlan& core) {
    return std::all_of(core.aggs.begin(), core.aggs.end(), [](const sql::AggCall& a) {
      return a.kind == AggKind::Count || a.kind == AggKind::CountStar;
    });
  }

  static void merge(const sql::AggCall& agg, AggAcc& into, const AggAcc& from) {
    switch (agg.kind) {
      case AggKind::Count:
      case AggKind::CountStar: into.count += from.count; return;
      case AggKind::Sum:
        into.isum += from.isum;
        into.dsum.add(from.dsum.sum);
        into.dsum.add(from.dsum.comp);
        into.seen = into.seen || from.seen;
        return;
      case AggKind::Max:
        if (from.seen && (!into.seen || compare_total(from.best, into.best) > 0)) into.best = from.best;
        into.seen = into.seen || from.seen;
        return;
      case AggKind::AnyMin:
        if (from.seen && (!into.seen || compare_total(from.best, into.best) < 0)) into.best = from.best;
        into.seen = into.seen || from.seen;
        return;
    }
  }

  static void widen(Value& v, DataType t) {
    if (t == DataType::Float64) {
      if (const auto* i = std::get_if<std::int64_t>(&v)) v = static_cast<double>(*i);
    }
  }

  static std::vector<Row> distinct(std::vector<Row> rows) {
    std::unordered_set<Row, RowHash, RowEq> seen;
    std::vector<Row> out;
    for (auto& r : rows) {
      if (seen.insert(r).second) out.push_back(std::move(r));
    }
    return out;
  }

  static void update(const sql::AggCall& agg, AggAcc& st, const std::vector<ColSource>& srcs,
                     const std::vector<std::uint32_t>& row_of, const SlotAcc& acc, const SubqueryResults& subs) {
    if (agg.kind == AggKind::CountStar) {
      ++st.count;
      return;
    }
    const Expr& arg = *agg.arg;
    if (arg.kind == Expr::Kind::Column) {
      const std::uint32_t r = row_of[static_cast<std::size_t>(arg.source)];
      if (r == kNullRow) return;
      const ColumnSegment& seg =
          *srcs[static_cast<std::size_t>(arg.source)].cols[static_cast<std::size_t>(arg.column)];
      if (seg.is_null(r)) return;
      if (agg.kind == AggKind::Count) {
        ++st.count;
        return;
      }
      if (agg.kind == AggKind::Sum) {
        if (seg.type() == DataType::Int64) {
          st.isum += seg.ints()[r];
        } else {
          st.dsum.add(seg.doubles()[r]);
        }
        st.seen = true;
        return;
      }
    }
    Value scratch;
    const Value& v = sql::eval_scalar(arg, acc, &subs, scratch);
    if (is_null(v)) return;
    switch (agg.kind) {
      case AggKind::Count: ++st.count; break;
      case AggKind::Sum:
        if (const auto* i = std::get_if<std::int64_t>(&v)) {
          st.isum += *i;
        } else {
          st.dsum.add(std::get<double>(v));
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

  static Value finish(const sql::AggCall& agg, const AggAcc& st) {
    switch (agg.kind) {
      case AggKind::Count:
      case AggKind::CountStar: return st.count;
      case AggKind::Sum:
        if (!st.seen) return Value{};
        if (agg.type == DataType::Int64) return st.isum;
        return st.dsum.value() + static_cast<double>(st.isum);
      default: return st.seen ? st.best : Value{};
    }
  }

  void join_step(const sql::JoinStep& step, const std::vector<ColSource>& srcs, const Sel& right,
                 const std::vector<bool>& joined, Tuples& tup, const SubqueryResults& subs) {
    const auto rs = static_cast<std::size_t>(step.source);
    const std::size_t n = srcs.size();
    std::vector<std::uint32_t> row_of(n, kNullRow);
    SlotAcc acc(srcs, &row_of);
    const Expr* residual_cond = step.condition.get();
    const Expr* residual_filter = step.filter.get();

    std::vector<std::uint32_t> out_left;
    std::vector<std::uint32_t> out_right;
    auto load = [&](std::size_t i, std::uint32_t r) {
      for (std::size_t s = 0; s < n; ++s) row_of[s] = joined[s] ? tup.ids[s][i] : kNullRow;
      row_of[rs] = r;
    };
    auto emit = [&](std::size_t i, std::uint32_t r, bool& matched) {
      if (residual_cond || residual_filter) load(i, r);
      if (residual_cond && !sql::eval_predicate(*residual_cond, acc, &subs)) return;
      matched = true;
      if (residual_filter && !sql::eval_predicate(*residual_filter, acc, &subs)) return;
      out_left.push_back(static_cast<std::uint32_t>(i));
      out_right.push_back(r);
    };
    auto unmatched = [&](std::size_t i) {
      if (step.kind != JoinKind::LeftOuter) return;
      if (residual_filter) {
        load(i, kNullRow);
        if (!sql::eval_predicate(*residual_filter, acc, &subs)) return;
      }
      out_left.push_back(static_cast<std::uint32_t>(i));
      out_right.push_back(kNullRow);
    };

    bool all_columns = !step.keys.empty();
    for (const auto& k : step.keys) {
      if (k.left->kind != Expr::Kind::Column || k.right->kind != Expr::Kind::Column) all_columns = false;
    }

    if (all_columns && step.keys.size() == 1 &&
        srcs[rs].cols[static_cast<std::size_t>(step.keys[0].right->column)]->type() == DataType::Int64 &&
        srcs[static_cast<std::size_t>(step.keys[0].left->source)]
                .cols[static_cast<std::size_t>(step.keys[0].left->column)]
                ->type() == DataType::Int64) {
      const Expr& lk = *step.keys[0].left;
      const ColumnSegment& rseg = *srcs[rs].cols[static_cast<std::size_t>(step.keys[0].right->column)];
      const ColumnSegment& lseg =
          *srcs[static_cast<std::size_t>(lk.source)].cols[static_cast<std::size_t>(lk.column)];
      std::unordered_map<std::int64_t, std::uint32_t> head;
      head.reserve(right.size() * 2 + 1);
      std::vector<std::uint32_t> next(right.size(), kNullRow);
      for (std::size_t j = right.size(); j-- > 0;) {
        const std::uint32_t r = right[j];
        if (rseg.is_null(r)) continue;
        auto [it, inserted] = head.try_emplace(rseg.ints()[r], static_cast<std::uint32_t>(j));
        if (!inserted) {
          next[j] = it->second;
          it->second = static_cast<std::uint32_t>(j);
        }
      }
      const auto& lrows = tup.ids[static_cast<std::size_t>(lk.source)];
      for (std::size_t i = 0; i < tup.size; ++i) {
        bool matched = false;
        const std::uint32_t lr = lrows[i];
        if (lr != kNullRow && !lseg.is_null(lr)) {
          auto it = head.find(lseg.ints()[lr]);
          if (it != head.end()) {
            for (std::uint32_t j = it->second; j != kNullRow; j = next[j]) emit(i, right[j], matched);
          }
        }
        if (!matched) unmatched(i);
      }
    } else if (all_columns) {
      std::unordered_map<Row, std::vector<std::uint32_t>, RowHash, RowEq> table;
      for (std::uint32_t r : right) {
        Row key;
        bool has_null = false;
        for (const auto& k : step.keys) {
          key.push_back(srcs[rs].cols[static_cast<std::size_t>(k.right->column)]->value(r));
          has_null = has_null || is_null(key.back());
        }
        if (!has_null) table[std::move(key)].push_back(r);
      }
      for (std::size_t i = 0; i < tup.size; ++i) {
        bool matched = false;
        Row key;
        bool has_null = false;
        for (const auto& k : step.keys) {
          const std::uint32_t lr = tup.ids[static_cast<std::size_t>(k.left->source)][i];
          key.push_back(lr == kNullRow ? Value{}
                                       : srcs[static_cast<std::size_t>(k.left->source)]
                                             .cols[static_cast<std::size_t>(k.left->column)]
                                             ->value(lr));
          has_null = has_null || is_null(key.back());
        }
        if (!has_null) {
          auto it = table.find(key);
          if (it != table.end()) {
            for (std::uint32_t r : it->second) emit(i, r, matched);
          }
        }
        if (!matched) unmatched(i);
      }
    } else {
      for (std::size_t i = 0; i < tup.size; ++i) {
        bool matched = false;
        for (std::uint32_t r : right) {
          if (!step.keys.empty()) {
            load(i, r);
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
            if (!ok) continue;
          }
          emit(i, r, matched);
        }
        if (!matched) unmatched(i);
      }
    }

    for (std::size_t s = 0; s < n; ++s) {
      if (!joined[s]) continue;
      std::vector<std::uint32_t> col(out_left.size());
      const auto& src = tup.ids[s];
      for (std::size_t k = 0; k < out_left.size(); ++k) col[k] = src[out_left[k]];
      tup.ids[s] = std::move(col);
    }
    tup.ids[rs] = std::move(out_right);
    tup.size = out_left.size();
  }

  const ColumnStore& store_;
  std::size_t partitions_;
};

}  // namespace

ResultSet execute_rolap(const QueryPlan& plan, const ColumnStore& store, const RolapOptions& options) {
  Runner runner(store, options.partitions);
  return runner.run(plan);
}

}  // namespace adw::exec
