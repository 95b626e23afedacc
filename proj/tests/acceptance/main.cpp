// Acceptance checks. Each criterion prints one line:
//   criterion <id>: PASS|FAIL  <detail>
// Usage: adw_acceptance [id ...]   (default: every criterion)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "adw/benchmark.hpp"
#include "adw/cli.hpp"
#include "adw/exec.hpp"
#include "adw/olap.hpp"
#include "adw/schema.hpp"
#include "adw/workload.hpp"
#include "support/cube_oracle.hpp"
#include "support/fuzz.hpp"
#include "support/reference_schema.hpp"
#include "support/warehouse.hpp"

namespace {

using namespace adw;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fixed(double x, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

const datagen::DefectRates kDefects{0.02, 0.01, 0.01, 0.01};

/// Lean load for large scales: raw files and staging are dropped early.
struct Warehouse {
  std::shared_ptr<const ConstellationSchema> schema;
  std::unique_ptr<RowStore> rows;
  std::unique_ptr<ColumnStore> columns;
  olap::CubeRegistry cubes;
};

Warehouse load_warehouse(std::uint64_t seed, std::int64_t scale, datagen::DefectRates rates) {
  Warehouse w;
  w.schema = std::make_shared<const ConstellationSchema>(builtin_adw_schema());
  datagen::GenConfig cfg;
  cfg.seed = seed;
  cfg.scale = scale;
  cfg.rates = rates;
  auto raw = std::make_unique<datagen::RawDataset>(datagen::generate(*w.schema, cfg));
  auto result = etl::run(*raw, *w.schema);
  raw.reset();
  w.rows = std::make_unique<RowStore>(w.schema);
  w.columns = std::make_unique<ColumnStore>(w.schema);
  etl::load(result.relations, {w.rows.get(), w.columns.get()});
  result.relations.clear();
  w.cubes = olap::build_registry(*w.columns, olap::builtin_cubes());
  return w;
}

// 1 ---------------------------------------------------------------------------

Verdict schema_fidelity() {
  const auto s = builtin_adw_schema();
  std::vector<std::string> missing;
  for (const auto& [table, attrs] : fixture::kReference) {
    const TableDef* t = s.find_table(table);
    if (!t) {
      missing.push_back(table);
      continue;
    }
    for (const auto& a : attrs) {
      const auto alias = fixture::kAliases.find(table + "." + a);
      if (!t->find_column(alias == fixture::kAliases.end() ? a : alias->second)) missing.push_back(table + "." + a);
    }
  }
  const auto problems = validate_schema(s);
  const auto facts = s.fact_tables().size();
  const auto dims = s.dimension_tables().size();
  Verdict v;
  v.pass = facts == 3 && dims == 21 && missing.empty() && problems.empty();
  v.detail = std::to_string(facts) + " facts, " + std::to_string(dims) + " dimensions, " +
             std::to_string(missing.size()) + " missing attributes, " + std::to_string(problems.size()) +
             " validation problems";
  if (!missing.empty()) v.detail += " (first: " + missing[0] + ")";
  return v;
}

// 2 ---------------------------------------------------------------------------

Verdict corpus_executability() {
  const auto start = Clock::now();
  const auto w = load_warehouse(42, 10'000, {});
  std::vector<std::string> failures;
  std::size_t runs = 0;
  for (const auto& [name, text] : corpus_queries()) {
    try {
      const auto p = sql::plan(text, *w.schema);
      const auto base = exec::execute_baseline(p, *w.rows);
      const auto rolap = exec::execute_rolap(p, *w.columns);
      const auto holap = olap::route_holap(p, w.cubes, *w.columns);
      runs += 3;
      if (!equivalent_results(base, rolap, p) || !equivalent_results(base, holap.result, p)) {
        failures.push_back(name + " paths disagree");
      }
      if (name.rfind("example", 0) == 0 && base.rows.empty()) failures.push_back(name + " returned no rows");
    } catch (const std::exception& e) {
      failures.push_back(name + ": " + e.what());
    }
  }
  const double elapsed = seconds_since(start);
  Verdict v;
  v.pass = failures.empty() && corpus_queries().size() == 14 && elapsed < 60;
  v.detail = std::to_string(corpus_queries().size()) + " queries, " + std::to_string(runs) + " executions, " +
             fixed(elapsed) + " s including load";
  if (!failures.empty()) v.detail += "; " + failures[0];
  return v;
}

// 3 ---------------------------------------------------------------------------

Verdict oracle_equivalence() {
  const auto w = load_warehouse(42, 10'000, {});
  std::vector<std::pair<std::string, std::string>> queries;
  for (const auto& q : builtin_workload()) queries.emplace_back(q.id, q.sql);
  fixture::QueryFuzzer fuzz(20240611);
  for (int i = 0; i < 200; ++i) queries.emplace_back("fuzz" + std::to_string(i), fuzz.next());
  std::size_t molap = 0;
  std::vector<std::string> failures;
  for (const auto& [id, text] : queries) {
    try {
      const auto p = sql::plan(text, *w.schema);
      const auto base = exec::execute_baseline(p, *w.rows);
      std::string why;
      for (std::size_t parts : {1u, 4u}) {
        if (!equivalent_results(base, exec::execute_rolap(p, *w.columns, {parts}), p, &why)) {
          failures.push_back(id + " rolap: " + why);
        }
      }
      const auto h = olap::route_holap(p, w.cubes, *w.columns);
      molap += h.path == sql::ExecPath::Molap;
      if (!equivalent_results(base, h.result, p, &why)) failures.push_back(id + " holap: " + why);
    } catch (const std::exception& e) {
      failures.push_back(id + ": " + e.what());
    }
  }
  Verdict v;
  v.pass = failures.empty();
  v.detail = std::to_string(queries.size()) + " queries, " + std::to_string(molap) + " answered from cubes, " +
             std::to_string(failures.size()) + " mismatches";
  if (!failures.empty()) v.detail += "; " + failures[0];
  return v;
}

// 4 ---------------------------------------------------------------------------

std::vector<olap::CubeDef> conservation_cubes() {
  auto defs = olap::builtin_cubes();
  using A = olap::Aggregator;
  defs.push_back({"field_date",
                  "FieldFact",
                  {{olap::builtin_hierarchy("field"), 0}, {olap::builtin_hierarchy("operation_date"), 0}},
                  {{"water", "WaterVolumn", A::Sum}, {"peak", "Yield", A::Max}, {"pests", "PestNumber", A::Sum},
                   {"n", "", A::Count}}});
  defs.push_back({"sales_monthly",
                  "SaleFact",
                  {{olap::builtin_hierarchy("farmer"), 0}, {olap::builtin_hierarchy("sale_date"), 1}},
                  {{"qty", "Quantity", A::Sum}, {"top", "Price", A::Max}, {"n", "", A::Count}}});
  defs.push_back({"orders",
                  "OrderFact",
                  {{olap::builtin_hierarchy("order_season"), 0}},
                  {{"qty", "Quantity", A::Sum}, {"n", "Price", A::Count}}});
  return defs;
}

Verdict cube_conservation() {
  std::vector<std::string> problems;
  std::size_t cubes = 0;
  for (std::int64_t scale : {1'000, 100'000}) {
    const auto w = load_warehouse(42, scale, kDefects);
    for (const auto& def : conservation_cubes()) {
      const auto cube = olap::build_cube(*w.columns, def);
      ++cubes;
      for (auto& p : fixture::conservation_problems(cube, fixture::oracle_totals(def, *w.rows))) {
        problems.push_back("scale " + std::to_string(scale) + " " + p);
      }
    }
  }
  Verdict v;
  v.pass = problems.empty();
  v.detail = std::to_string(cubes) + " cubes at scales 1e3 and 1e5, every roll-up and slice partition, " +
             std::to_string(problems.size()) + " problems";
  if (!problems.empty()) v.detail += "; " + problems[0];
  return v;
}

// 5 ---------------------------------------------------------------------------

Verdict defect_recovery() {
  std::size_t compared = 0;
  std::size_t injected = 0;
  std::vector<std::string> diffs;
  for (std::uint64_t seed : {42u, 7u}) {
    const auto w = fixture::load(seed, 10'000, kDefects);
    for (const auto& [table, ledger] : w.ledger.tables) {
      const auto it = w.report.tables.find(table);
      for (auto c : {datagen::DefectClass::Duplicate, datagen::DefectClass::Missing,
                     datagen::DefectClass::Inconsistent, datagen::DefectClass::Wrong}) {
        ++compared;
        injected += ledger.count(c);
        const std::size_t got = it == w.report.tables.end() ? 0 : it->second.of(c).detected;
        if (got != ledger.count(c)) {
          diffs.push_back("seed " + std::to_string(seed) + " " + table + " " + std::string(datagen::to_string(c)) +
                          ": " + std::to_string(got) + " detected, " + std::to_string(ledger.count(c)) + " injected");
        }
      }
    }
  }
  Verdict v;
  v.pass = diffs.empty() && injected > 0;
  v.detail = std::to_string(compared) + " (seed, table, class) counts, " + std::to_string(injected) +
             " injected defects, " + std::to_string(diffs.size()) + " differences";
  if (!diffs.empty()) v.detail += "; " + diffs[0];
  return v;
}

// 6 ---------------------------------------------------------------------------

bench::Clock scripted(std::vector<double> durations) {
  auto instants = std::make_shared<std::vector<double>>();
  double t = 0;
  for (double d : durations) {
    instants->push_back(t);
    t += d;
    instants->push_back(t);
  }
  auto next = std::make_shared<std::size_t>(0);
  return [instants, next] { return instants->at((*next)++); };
}

Verdict benchmark_formulas() {
  std::vector<std::string> wrong;
  const auto w = fixture::load(42, 500);
  bench::Engines engines{w.rows.get(), w.columns.get(), nullptr};

  bench::BenchmarkOptions opt;
  opt.repetitions = 3;
  opt.clock = scripted({9, 2, 2, 2, 9, 1, 1, 1});
  const auto one = bench::run_benchmark(engines, {builtin_workload()[0]}, opt);
  if (one.queries[0].times != 2.0) wrong.push_back("Times(q) = " + format_double(one.queries[0].times));

  std::vector<WorkloadQuery> g;
  std::vector<double> durations;
  for (const auto& q : builtin_workload()) {
    if (q.group != 2) continue;
    g.push_back(q);
    for (double d : {1.0, 10.0, 10.0, 10.0, 1.0, 2.0, 2.0, 2.0}) durations.push_back(d);
  }
  opt.clock = scripted(durations);
  const auto five = bench::run_benchmark(engines, g, opt);
  if (g.size() != 5) wrong.push_back("group size " + std::to_string(g.size()));
  if (five.groups.at(0).rt_baseline != 10.0 || five.groups[0].rt_adw != 2.0) wrong.push_back("RT(G)");
  if (five.groups[0].times != 5.0) wrong.push_back("Times(G) = " + format_double(five.groups[0].times));
  if (five.mean_rt_baseline != 10.0 || five.mean_rt_adw != 2.0 || five.overall_times != 5.0) {
    wrong.push_back("overall means");
  }

  bench::BenchmarkReport mixed;
  mixed.queries.push_back({"a", 1, {4, 8}, {2, 2}});
  mixed.queries.push_back({"b", 2, {3}, {1}});
  bench::finalize(mixed);
  if (mixed.groups[0].times != 3.0 || mixed.mean_rt_baseline != 4.5 || mixed.mean_rt_adw != 1.5 ||
      mixed.overall_times != 3.0 || mixed.mean_group_times != 3.0) {
    wrong.push_back("two-group means");
  }
  Verdict v;
  v.pass = wrong.empty();
  v.detail = wrong.empty() ? "Times(q)=2, RT(G)=10/2, Times(G)=5, overall means exact" : "wrong: " + wrong[0];
  return v;
}

Verdict headline_ratio() {
  const double overall = bench::times_ratio(687.8, 216.1);
  const std::vector<double> group_times{6.24, 2.92, 1.22, 2.86, 2.27, 4.66, 3.36, 4.63, 3.16, 1.56};
  Verdict v;
  v.pass = std::abs(overall - 3.19) <= 0.005;
  v.detail = "687.8 / 216.1 = " + fixed(overall, 4) + ", target 3.19 +/- 0.005; mean of the ten group ratios is " +
             fixed(bench::mean(group_times), 3);
  return v;
}

// 7 ---------------------------------------------------------------------------

/// Workload queries that read a fact table; on the adw side only those not
/// answered from a cube.
bool reads_fact(const std::string& text, const ConstellationSchema& schema) {
  const auto p = sql::plan(text, schema);
  for (const auto& b : p.branches) {
    for (const auto& s : b.sources) {
      if (s.fact) return true;
    }
  }
  return false;
}

Verdict live_performance() {
  const auto start = Clock::now();
  std::map<std::int64_t, bench::BenchmarkReport> reports;
  double full_seconds = 0;
  for (std::int64_t scale : {10'000, 100'000, 1'000'000}) {
    const auto t0 = Clock::now();
    const auto w = load_warehouse(42, scale, {});
    bench::BenchmarkOptions opt;
    opt.repetitions = 3;
    opt.scale = w.rows->row_count("FieldFact");
    opt.seed = 42;
    bench::Engines engines{w.rows.get(), w.columns.get(), &w.cubes};
    reports[scale] = bench::run_benchmark(engines, builtin_workload(), opt);
    std::cerr << "  scale " << scale << ": " << fixed(seconds_since(t0), 1) << " s, overall times "
              << fixed(reports[scale].overall_times) << "\n";
    if (scale == 1'000'000) full_seconds = seconds_since(t0);
  }
  const auto& big = reports[1'000'000];
  const auto schema = builtin_adw_schema();
  std::vector<std::string> nonmonotonic;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < builtin_workload().size(); ++i) {
    if (!reads_fact(builtin_workload()[i].sql, schema)) continue;
    std::vector<double> base;
    std::vector<double> adw;
    bool scans = true;
    for (const auto& [scale, r] : reports) {
      base.push_back(r.queries[i].rt_baseline);
      adw.push_back(r.queries[i].rt_adw);
      scans = scans && r.queries[i].adw_path != "molap";
    }
    ++checked;
    if (!bench::monotonic_with_slack(base, 0.2)) nonmonotonic.push_back(big.queries[i].id + " baseline");
    if (scans) {
      ++checked;
      if (!bench::monotonic_with_slack(adw, 0.2)) nonmonotonic.push_back(big.queries[i].id + " adw");
    }
  }
  bool mismatched = false;
  for (const auto& [_, r] : reports) {
    for (const auto& q : r.queries) mismatched = mismatched || !q.results_match;
  }
  std::string groups;
  for (const auto& g : big.groups) {
    if (g.group == 1 || g.group == 2 || g.group == 7 || g.group == 8) {
      groups += " G" + std::to_string(g.group) + "=" + fixed(g.times);
    }
  }
  const double total = seconds_since(start);
  Verdict v;
  v.pass = big.scale >= 1'000'000 && big.properties_pass() && nonmonotonic.empty() && !mismatched &&
           full_seconds < 15 * 60;
  v.detail = "at " + std::to_string(big.scale) + " rows:" + groups + ", overall " + fixed(big.overall_times) +
             "; 1e6 run " + fixed(full_seconds, 0) + " s (all scales " + fixed(total, 0) + " s); " +
             std::to_string(checked) + " scan series monotonic within 20%";
  if (!nonmonotonic.empty()) v.detail += ", " + std::to_string(nonmonotonic.size()) + " not (" + nonmonotonic[0] + ")";
  if (mismatched) v.detail += "; result mismatch";
  for (const auto& p : big.properties) {
    if (!p.passed) v.detail += "; " + p.name + " failed (" + p.detail + ")";
  }
  return v;
}

// 8 ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cli_run(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o;
  std::ostringstream e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  if (code != 0) {
    std::cerr << "  adw";
    for (const auto& a : args) std::cerr << " " << a;
    std::cerr << " -> " << code << ": " << e.str();
  }
  return code;
}

/// generate -> etl -> bench -> every corpus and workload query, under `dir`.
std::map<std::string, std::string> pipeline(const fs::path& dir) {
  std::map<std::string, std::string> artifacts;
  const std::vector<std::string> common{"--seed",          "42",   "--scale",         "10000",
                                        "--duplicate-rate", "0.02", "--missing-rate",  "0.01",
                                        "--inconsistent-rate", "0.01", "--wrong-rate", "0.01"};
  auto args = [&](std::vector<std::string> extra) {
    auto a = common;
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };
  const auto raw = (dir / "raw").string();
  const auto wh = (dir / "warehouse").string();
  const auto rep = (dir / "report").string();
  if (cli_run(args({"generate", "--out", raw})) != 0) return {};
  for (const auto& e : fs::directory_iterator(raw)) artifacts["raw/" + e.path().filename().string()] = slurp(e.path());
  if (cli_run(args({"--data", raw, "--warehouse", wh, "--format", "json", "etl"}), &artifacts["etl"]) != 0) return {};
  if (cli_run(args({"--warehouse", wh, "--reps", "1", "bench", "--out", rep})) != 0) return {};
  artifacts["bench"] = bench::deterministic_view(bench::report_from_json(slurp(fs::path(rep) / "report.json")));
  std::vector<std::pair<std::string, std::string>> queries;
  for (const auto& [id, text] : corpus_queries()) queries.emplace_back("corpus/" + id, text);
  for (const auto& q : builtin_workload()) queries.emplace_back("workload/" + q.id, q.sql);
  for (const auto& [id, text] : queries) {
    for (const char* path : {"baseline", "holap"}) {
      std::string out;
      if (cli_run(args({"--warehouse", wh, "--format", "csv", "--path", path, "query", "--sql", text}), &out) != 0) {
        return {};
      }
      artifacts[std::string("query/") + path + "/" + id] = out;
    }
  }
  return artifacts;
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / ("adw_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const auto a = pipeline(root / "a");
  const auto b = pipeline(root / "b");
  fs::remove_all(root);
  std::size_t differing = 0;
  std::string first;
  for (const auto& [k, v] : a) {
    const auto it = b.find(k);
    if (it == b.end() || it->second != v) {
      if (first.empty()) first = k;
      ++differing;
    }
  }
  Verdict v;
  v.pass = !a.empty() && a.size() == b.size() && differing == 0;
  v.detail = std::to_string(a.size()) + " artifacts per run (raw files, etl report, bench report without timings, " +
             "query outputs), " + std::to_string(differing) + " differ";
  if (!first.empty()) v.detail += " (first: " + first + ")";
  if (a.empty()) v.detail = "pipeline failed";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> all = {
      {"1", schema_fidelity},     {"2", corpus_executability}, {"3", oracle_equivalence},
      {"4", cube_conservation},   {"5", defect_recovery},      {"6a", benchmark_formulas},
      {"6b", headline_ratio},     {"7", live_performance},     {"8", determinism},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [id, check] : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), id) == wanted.end()) continue;
    const auto start = Clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << " ["
              << fixed(seconds_since(start), 1) << " s]" << std::endl;
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
