#include <gtest/gtest.h>

#include <json.hpp>

#include "adw/benchmark.hpp"
#include "support/warehouse.hpp"

namespace adw {
namespace {

using bench::BenchmarkReport;
using bench::QueryTiming;

/// Returns the given instants in turn.
bench::Clock scripted(std::vector<double> instants) {
  auto state = std::make_shared<std::pair<std::vector<double>, std::size_t>>(std::move(instants), 0);
  return [state] { return state->first.at(state->second++); };
}

/// Clock instants for one query: each run reads the clock at start and end.
std::vector<double> instants_for(const std::vector<double>& durations, double start = 0) {
  std::vector<double> out;
  double t = start;
  for (double d : durations) {
    out.push_back(t);
    t += d;
    out.push_back(t);
  }
  return out;
}

const fixture::Loaded& data() { return fixture::cached(42, 1000); }

std::vector<WorkloadQuery> first_queries(std::size_t n) {
  return {builtin_workload().begin(), builtin_workload().begin() + static_cast<std::ptrdiff_t>(n)};
}

bench::Engines engines() { return {data().rows.get(), data().columns.get(), nullptr}; }

TEST(Benchmark, ScriptedClockGivesExactRatio) {
  bench::BenchmarkOptions opt;
  opt.repetitions = 3;
  opt.clock = scripted(instants_for({100, 2, 2, 2, 50, 1, 1, 1}));
  const auto r = bench::run_benchmark(engines(), first_queries(1), opt);
  ASSERT_EQ(r.queries.size(), 1u);
  const auto& q = r.queries[0];
  EXPECT_EQ(q.baseline_runs, (std::vector<double>{2, 2, 2}));
  EXPECT_EQ(q.adw_runs, (std::vector<double>{1, 1, 1}));
  EXPECT_DOUBLE_EQ(q.times, 2.0);
  ASSERT_EQ(r.groups.size(), 1u);
  EXPECT_DOUBLE_EQ(r.groups[0].times, 2.0);
  EXPECT_DOUBLE_EQ(r.overall_times, 2.0);
  EXPECT_TRUE(q.results_match);
  EXPECT_EQ(q.adw_path, "rolap");
}

TEST(Benchmark, WarmUpCanBeCounted) {
  bench::BenchmarkOptions opt;
  opt.repetitions = 2;
  opt.warm_up = false;
  opt.clock = scripted(instants_for({3, 5, 1, 3}));
  const auto r = bench::run_benchmark(engines(), first_queries(1), opt);
  EXPECT_DOUBLE_EQ(r.queries[0].rt_baseline, 4.0);
  EXPECT_DOUBLE_EQ(r.queries[0].rt_adw, 2.0);
}

TEST(Benchmark, GroupRatioIsRatioOfMeans) {
  BenchmarkReport r;
  r.queries.push_back({"a", 1, {9, 11}, {2, 2}});
  r.queries.push_back({"b", 1, {20}, {2}});
  r.queries.push_back({"c", 2, {3}, {3}});
  bench::finalize(r);
  ASSERT_EQ(r.groups.size(), 2u);
  EXPECT_DOUBLE_EQ(r.groups[0].rt_baseline, 15.0);
  EXPECT_DOUBLE_EQ(r.groups[0].rt_adw, 2.0);
  EXPECT_DOUBLE_EQ(r.groups[0].times, 7.5);
  EXPECT_DOUBLE_EQ(r.groups[1].times, 1.0);
  EXPECT_DOUBLE_EQ(r.mean_rt_baseline, 9.0);
  EXPECT_DOUBLE_EQ(r.mean_rt_adw, 2.5);
  EXPECT_DOUBLE_EQ(r.overall_times, 3.6);
  EXPECT_DOUBLE_EQ(r.mean_group_times, 4.25);
}

TEST(Benchmark, ReferenceGroupRuntimesReproduceReferenceRatios) {
  const std::vector<double> mysql{1081.5, 599.7, 111.7, 790.4, 776.6, 1109.2, 483, 1057.3, 297.9, 571.1};
  const std::vector<double> adw{173.4, 205.2, 91.2, 276.4, 342.8, 238, 143.7, 228.3, 94.2, 366.4};
  const std::vector<double> times{6.24, 2.92, 1.22, 2.86, 2.27, 4.66, 3.36, 4.63, 3.16, 1.56};
  BenchmarkReport r;
  for (int g = 0; g < 10; ++g) {
    r.queries.push_back({"q" + std::to_string(g + 1), g + 1, {mysql[g]}, {adw[g]}});
  }
  bench::finalize(r);
  for (int g = 0; g < 10; ++g) EXPECT_NEAR(r.groups[g].times, times[g], 0.005) << "G" << g + 1;
  EXPECT_NEAR(r.mean_rt_baseline, 687.8, 0.05);
  // 216.1 when rounded per entry; the entries themselves average 215.96.
  EXPECT_NEAR(r.mean_rt_adw, 215.96, 1e-9);
  EXPECT_NEAR(r.overall_times, 6878.4 / 2159.6, 1e-12);
  EXPECT_NEAR(r.mean_group_times, 32.88 / 10, 0.005);
}

TEST(Benchmark, InvalidRatiosAndRepetitionsAreRejected) {
  EXPECT_THROW(bench::times_ratio(1, 0), bench::BenchmarkError);
  EXPECT_THROW(bench::times_ratio(0, 1), bench::BenchmarkError);
  bench::BenchmarkOptions opt;
  opt.repetitions = 0;
  EXPECT_THROW(bench::run_benchmark(engines(), first_queries(1), opt), bench::BenchmarkError);
}

TEST(Benchmark, TimeoutAbortsWithQueryId) {
  bench::BenchmarkOptions opt;
  opt.repetitions = 1;
  opt.timeout_seconds = 10;
  opt.clock = scripted(instants_for({1, 11}));
  try {
    bench::run_benchmark(engines(), first_queries(1), opt);
    FAIL() << "expected a timeout";
  } catch (const bench::BenchmarkError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(builtin_workload()[0].id), std::string::npos) << msg;
    EXPECT_NE(msg.find("timeout"), std::string::npos) << msg;
  }
}

BenchmarkReport small_report(double adw_seconds) {
  bench::BenchmarkOptions opt;
  opt.repetitions = 1;
  opt.scale = 1000;
  opt.seed = 42;
  std::vector<double> durations;
  for (int i = 0; i < 3; ++i) {
    for (double d : {0.5, 0.4, 0.5, adw_seconds}) durations.push_back(d);
  }
  opt.clock = scripted(instants_for(durations));
  return bench::run_benchmark(engines(), first_queries(3), opt);
}

TEST(Benchmark, JsonRoundTripsAndDeterministicViewDropsTimings) {
  const auto a = small_report(0.1);
  const auto b = small_report(0.2);
  const auto json = bench::render_report(a, bench::Format::Json);
  EXPECT_EQ(bench::render_report(bench::report_from_json(json), bench::Format::Json), json);
  EXPECT_NE(json, bench::render_report(b, bench::Format::Json));
  EXPECT_EQ(bench::deterministic_view(a), bench::deterministic_view(b));
  const auto view = nlohmann::json::parse(bench::deterministic_view(a));
  EXPECT_FALSE(view.dump().find("rt_baseline") != std::string::npos);
  EXPECT_THROW(bench::report_from_json("[1,"), ParseError);
}

TEST(Benchmark, RenderingsCoverQueriesAndGroups) {
  const auto r = small_report(0.2);
  const auto text = bench::render_report(r, bench::Format::Text);
  for (const auto& q : r.queries) EXPECT_NE(text.find(q.id), std::string::npos);
  EXPECT_NE(text.find("G1"), std::string::npos);
  EXPECT_NE(text.find("Mean"), std::string::npos);
  EXPECT_NE(text.find("2.00"), std::string::npos);
  const auto csv = bench::render_report(r, bench::Format::Csv);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), 1 + r.queries.size() + r.groups.size() + 1);
  EXPECT_EQ(csv.rfind("kind,id,group", 0), 0u);
}

TEST(Benchmark, LivePropertiesApplyOnlyAtScale) {
  BenchmarkReport r;
  for (int g = 1; g <= 10; ++g) r.queries.push_back({"q" + std::to_string(g), g, {1.0}, {g == 7 ? 2.0 : 0.5}});
  bench::finalize(r);
  r.scale = 1000;
  bench::evaluate_properties(r);
  EXPECT_TRUE(r.properties_pass());
  for (const auto& p : r.properties) EXPECT_FALSE(p.applicable);
  r.scale = 1'000'000;
  bench::evaluate_properties(r);
  EXPECT_FALSE(r.properties_pass());
  for (const auto& p : r.properties) {
    EXPECT_TRUE(p.applicable);
    EXPECT_EQ(p.passed, p.name != "times_G7_above_1") << p.name;
  }
}

TEST(Benchmark, MonotonicityAllowsSlack) {
  EXPECT_TRUE(bench::monotonic_with_slack({1, 2, 3}, 0.2));
  EXPECT_TRUE(bench::monotonic_with_slack({1, 0.85, 2}, 0.2));
  EXPECT_FALSE(bench::monotonic_with_slack({1, 0.7, 2}, 0.2));
  EXPECT_TRUE(bench::monotonic_with_slack({}, 0.2));
}

TEST(Benchmark, RealClockAgreesOnResults) {
  bench::BenchmarkOptions opt;
  opt.repetitions = 1;
  const auto reg = olap::build_registry(*data().columns, olap::builtin_cubes());
  bench::Engines e{data().rows.get(), data().columns.get(), &reg};
  const auto r = bench::run_benchmark(e, builtin_workload(), opt);
  ASSERT_EQ(r.queries.size(), 50u);
  EXPECT_EQ(r.groups.size(), 10u);
  int molap = 0;
  for (const auto& q : r.queries) {
    EXPECT_TRUE(q.results_match) << q.id;
    EXPECT_GT(q.rt_baseline, 0);
    EXPECT_GT(q.rt_adw, 0);
    molap += q.adw_path == "molap";
  }
  EXPECT_GE(molap, 10);
}

}  // namespace
}  // namespace adw
