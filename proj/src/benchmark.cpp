#include "adw/benchmark.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "adw/csv.hpp"
#include "adw/exec.hpp"
#include "adw/result.hpp"

namespace adw::bench {

using nlohmann::ordered_json;

Clock steady_clock() {
  return [] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
  };
}

bool BenchmarkReport::properties_pass() const noexcept {
  for (const auto& p : properties) {
    if (p.applicable && !p.passed) return false;
  }
  return true;
}

double mean(const std::vector<double>& xs) noexcept {
  if (xs.empty()) return 0;
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double times_ratio(double rt_baseline, double rt_adw) {
  if (!(rt_baseline > 0) || !(rt_adw > 0)) {
    throw BenchmarkError("runtimes must be positive to form a ratio (baseline " + format_double(rt_baseline) +
                         ", adw " + format_double(rt_adw) + ")");
  }
  return rt_baseline / rt_adw;
}

void finalize(BenchmarkReport& report) {
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_group;
  for (auto& q : report.queries) {
    q.rt_baseline = mean(q.baseline_runs);
    q.rt_adw = mean(q.adw_runs);
    q.times = times_ratio(q.rt_baseline, q.rt_adw);
    by_group[q.group].first.push_back(q.rt_baseline);
    by_group[q.group].second.push_back(q.rt_adw);
  }
  report.groups.clear();
  std::vector<double> gb;
  std::vector<double> ga;
  std::vector<double> gt;
  for (const auto& [g, runs] : by_group) {
    GroupTiming t;
    t.group = g;
    t.rt_baseline = mean(runs.first);
    t.rt_adw = mean(runs.second);
    t.times = times_ratio(t.rt_baseline, t.rt_adw);
    gb.push_back(t.rt_baseline);
    ga.push_back(t.rt_adw);
    gt.push_back(t.times);
    report.groups.push_back(t);
  }
  report.mean_rt_baseline = mean(gb);
  report.mean_rt_adw = mean(ga);
  report.overall_times = report.groups.empty() ? 0 : times_ratio(report.mean_rt_baseline, report.mean_rt_adw);
  report.mean_group_times = mean(gt);
}

void evaluate_properties(BenchmarkReport& report, std::int64_t min_scale) {
  report.properties.clear();
  const bool applicable = report.scale >= min_scale;
  for (int g : {1, 2, 7, 8}) {
    LiveProperty p;
    p.name = "times_G" + std::to_string(g) + "_above_1";
    p.applicable = applicable;
    p.passed = false;
    p.detail = "group missing";
    for (const auto& t : report.groups) {
      if (t.group != g) continue;
      p.passed = t.times > 1.0;
      p.detail = "Times(G" + std::to_string(g) + ") = " + format_double(t.times);
    }
    if (!applicable) p.passed = true;
    report.properties.push_back(std::move(p));
  }
  LiveProperty overall;
  overall.name = "overall_times_above_1.5";
  overall.applicable = applicable;
  overall.passed = !applicable || report.overall_times > 1.5;
  overall.detail = "overall Times = " + format_double(report.overall_times);
  report.properties.push_back(std::move(overall));
}

BenchmarkReport run_benchmark(const Engines& engines, const std::vector<WorkloadQuery>& workload,
                              const BenchmarkOptions& options) {
  if (options.repetitions < 1) throw BenchmarkError("repetitions must be at least 1");
  if (!engines.baseline || !engines.warehouse) throw BenchmarkError("both engines are required");
  const Clock clock = options.clock ? options.clock : steady_clock();
  const olap::CubeRegistry empty;
  const olap::CubeRegistry& cubes = engines.cubes ? *engines.cubes : empty;
  const ConstellationSchema& schema = engines.baseline->schema();

  BenchmarkReport report;
  report.scale = options.scale;
  report.seed = options.seed;
  report.repetitions = options.repetitions;
  for (const auto& q : workload) {
    QueryTiming t;
    t.id = q.id;
    t.group = q.group;
    sql::QueryPlan plan;
    try {
      plan = sql::plan(q.sql, schema);
    } catch (const std::exception& e) {
      throw BenchmarkError(q.id + ": " + e.what());
    }
    auto timed = [&](const char* engine, auto&& body) {
      const double start = clock();
      try {
        body();
      } catch (const std::exception& e) {
        throw BenchmarkError(q.id + " failed on " + engine + ": " + e.what());
      }
      const double elapsed = clock() - start;
      if (elapsed > options.timeout_seconds) {
        throw BenchmarkError(q.id + " exceeded the " + format_double(options.timeout_seconds) + " s timeout on " +
                             engine + " (" + format_double(elapsed) + " s)");
      }
      return elapsed;
    };
    ResultSet base;
    ResultSet adw;
    const int total = options.repetitions + (options.warm_up ? 1 : 0);
    for (int r = 0; r < total; ++r) {
      const double s = timed("baseline", [&] { base = exec::execute_baseline(plan, *engines.baseline); });
      if (r > 0 || !options.warm_up) t.baseline_runs.push_back(s);
    }
    for (int r = 0; r < total; ++r) {
      olap::HolapResult h;
      const double s = timed("adw", [&] { h = olap::route_holap(plan, cubes, *engines.warehouse); });
      if (r > 0 || !options.warm_up) t.adw_runs.push_back(s);
      t.adw_path = std::string(sql::to_string(h.path));
      adw = std::move(h.result);
    }
    t.rows = base.rows.size();
    t.digest = result_digest(base);
    t.results_match = equivalent_results(base, adw, plan);
    report.queries.push_back(std::move(t));
  }
  finalize(report);
  evaluate_properties(report);
  return report;
}

// Rendering ----------------------------------------------------------------

namespace {

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string group_label(int g) { return "G" + std::to_string(g); }

std::string render_text(const BenchmarkReport& r) {
  std::ostringstream out;
  out << "scale " << r.scale << "  seed " << r.seed << "  repetitions " << r.repetitions << "\n\n";
  char line[256];
  out << "Per-query runtimes (seconds)\n";
  std::snprintf(line, sizeof line, "%-6s %-5s %14s %14s %10s  %-6s %s\n", "query", "group", "baseline", "adw", "times",
                "path", "rows");
  out << line;
  for (const auto& q : r.queries) {
    std::snprintf(line, sizeof line, "%-6s %-5s %14s %14s %10s  %-6s %zu%s\n", q.id.c_str(),
                  group_label(q.group).c_str(), fixed(q.rt_baseline, 6).c_str(), fixed(q.rt_adw, 6).c_str(),
                  fixed(q.times, 2).c_str(), q.adw_path.c_str(), q.rows, q.results_match ? "" : "  MISMATCH");
    out << line;
  }
  out << "\nPer-group ratios\n";
  std::snprintf(line, sizeof line, "%-6s %10s\n", "group", "times");
  out << line;
  for (const auto& g : r.groups) {
    std::snprintf(line, sizeof line, "%-6s %10s\n", group_label(g.group).c_str(), fixed(g.times, 2).c_str());
    out << line;
  }
  std::snprintf(line, sizeof line, "%-6s %10s\n", "Mean", fixed(r.mean_group_times, 2).c_str());
  out << line;
  out << "\nPer-group mean runtimes (seconds)\n";
  std::snprintf(line, sizeof line, "%-6s %14s %14s\n", "group", "baseline", "adw");
  out << line;
  for (const auto& g : r.groups) {
    std::snprintf(line, sizeof line, "%-6s %14s %14s\n", group_label(g.group).c_str(), fixed(g.rt_baseline, 6).c_str(),
                  fixed(g.rt_adw, 6).c_str());
    out << line;
  }
  std::snprintf(line, sizeof line, "%-6s %14s %14s\n", "Mean", fixed(r.mean_rt_baseline, 6).c_str(),
                fixed(r.mean_rt_adw, 6).c_str());
  out << line;
  out << "\nOverall times " << fixed(r.overall_times, 2) << "\n";
  for (const auto& p : r.properties) {
    out << "property " << p.name << ": " << (!p.applicable ? "n/a" : p.passed ? "pass" : "FAIL") << " (" << p.detail
        << ")\n";
  }
  return out.str();
}

std::string render_csv(const BenchmarkReport& r) {
  std::string out;
  csv::append_record(out, {"kind", "id", "group", "rt_baseline", "rt_adw", "times", "path", "rows", "digest"});
  for (const auto& q : r.queries) {
    csv::append_record(out, {"query", q.id, group_label(q.group), format_double(q.rt_baseline), format_double(q.rt_adw),
                        format_double(q.times), q.adw_path, std::to_string(q.rows), q.digest});
  }
  for (const auto& g : r.groups) {
    csv::append_record(out, {"group", group_label(g.group), group_label(g.group), format_double(g.rt_baseline),
                        format_double(g.rt_adw), format_double(g.times), "", "", ""});
  }
  csv::append_record(out, {"mean", "Mean", "", format_double(r.mean_rt_baseline), format_double(r.mean_rt_adw),
                      format_double(r.overall_times), "", "", ""});
  return out;
}

ordered_json to_json_doc(const BenchmarkReport& r, bool timings) {
  ordered_json j;
  j["scale"] = r.scale;
  j["seed"] = r.seed;
  j["repetitions"] = r.repetitions;
  ordered_json qs = ordered_json::array();
  for (const auto& q : r.queries) {
    ordered_json e;
    e["id"] = q.id;
    e["group"] = q.group;
    if (timings) {
      e["baseline_runs"] = q.baseline_runs;
      e["adw_runs"] = q.adw_runs;
      e["rt_baseline"] = q.rt_baseline;
      e["rt_adw"] = q.rt_adw;
      e["times"] = q.times;
    }
    e["adw_path"] = q.adw_path;
    e["rows"] = q.rows;
    e["digest"] = q.digest;
    e["results_match"] = q.results_match;
    qs.push_back(std::move(e));
  }
  j["queries"] = std::move(qs);
  ordered_json gs = ordered_json::array();
  for (const auto& g : r.groups) {
    ordered_json e;
    e["group"] = g.group;
    if (timings) {
      e["rt_baseline"] = g.rt_baseline;
      e["rt_adw"] = g.rt_adw;
      e["times"] = g.times;
    }
    gs.push_back(std::move(e));
  }
  j["groups"] = std::move(gs);
  if (timings) {
    j["mean_rt_baseline"] = r.mean_rt_baseline;
    j["mean_rt_adw"] = r.mean_rt_adw;
    j["overall_times"] = r.overall_times;
    j["mean_group_times"] = r.mean_group_times;
    ordered_json ps = ordered_json::array();
    for (const auto& p : r.properties) {
      ordered_json e;
      e["name"] = p.name;
      e["applicable"] = p.applicable;
      e["passed"] = p.passed;
      e["detail"] = p.detail;
      ps.push_back(std::move(e));
    }
    j["properties"] = std::move(ps);
  }
  return j;
}

}  // namespace

std::string render_report(const BenchmarkReport& report, Format format) {
  switch (format) {
    case Format::Text: return render_text(report);
    case Format::Csv: return render_csv(report);
    case Format::Json: return to_json_doc(report, true).dump(2) + "\n";
  }
  return {};
}

BenchmarkReport report_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(std::string("invalid report JSON: ") + e.what(), 1, e.byte);
  }
  try {
    BenchmarkReport r;
    r.scale = j.at("scale").get<std::int64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.repetitions = j.at("repetitions").get<int>();
    for (const auto& e : j.at("queries")) {
      QueryTiming q;
      q.id = e.at("id").get<std::string>();
      q.group = e.at("group").get<int>();
      q.baseline_runs = e.at("baseline_runs").get<std::vector<double>>();
      q.adw_runs = e.at("adw_runs").get<std::vector<double>>();
      q.rt_baseline = e.at("rt_baseline").get<double>();
      q.rt_adw = e.at("rt_adw").get<double>();
      q.times = e.at("times").get<double>();
      q.adw_path = e.at("adw_path").get<std::string>();
      q.rows = e.at("rows").get<std::size_t>();
      q.digest = e.at("digest").get<std::string>();
      q.results_match = e.at("results_match").get<bool>();
      r.queries.push_back(std::move(q));
    }
    for (const auto& e : j.at("groups")) {
      GroupTiming g;
      g.group = e.at("group").get<int>();
      g.rt_baseline = e.at("rt_baseline").get<double>();
      g.rt_adw = e.at("rt_adw").get<double>();
      g.times = e.at("times").get<double>();
      r.groups.push_back(g);
    }
    r.mean_rt_baseline = j.at("mean_rt_baseline").get<double>();
    r.mean_rt_adw = j.at("mean_rt_adw").get<double>();
    r.overall_times = j.at("overall_times").get<double>();
    r.mean_group_times = j.at("mean_group_times").get<double>();
    for (const auto& e : j.at("properties")) {
      LiveProperty p;
      p.name = e.at("name").get<std::string>();
      p.applicable = e.at("applicable").get<bool>();
      p.passed = e.at("passed").get<bool>();
      p.detail = e.at("detail").get<std::string>();
      r.properties.push_back(std::move(p));
    }
    return r;
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("malformed report JSON: ") + e.what(), 1, 1);
  }
}

std::string deterministic_view(const BenchmarkReport& report) { return to_json_doc(report, false).dump(2) + "\n"; }

bool monotonic_with_slack(const std::vector<double>& runtimes, double slack) noexcept {
  for (std::size_t i = 1; i < runtimes.size(); ++i) {
    if (runtimes[i] < (1.0 - slack) * runtimes[i - 1]) return false;
  }
  return true;
}

}  // namespace adw::bench
