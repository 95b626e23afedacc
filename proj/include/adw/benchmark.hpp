#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "adw/error.hpp"
#include "adw/olap.hpp"
#include "adw/storage.hpp"
#include "adw/workload.hpp"

namespace adw::bench {

/// A query failed or ran past the timeout; the message names the query.
class BenchmarkError : public Error {
 public:
  using Error::Error;
};

/// Monotonic seconds. Injected in tests to make timings deterministic.
using Clock = std::function<double()>;

/// Process-wide steady clock.
Clock steady_clock();

struct Engines {
  const RowStore* baseline = nullptr;      ///< row store, row-at-a-time executor
  const ColumnStore* warehouse = nullptr;  ///< column store behind HOLAP routing
  const olap::CubeRegistry* cubes = nullptr;
};

struct BenchmarkOptions {
  int repetitions = 3;
  bool warm_up = true;         ///< one untimed execution per query and engine
  double timeout_seconds = 120;
  std::int64_t scale = 0;
  std::uint64_t seed = 0;
  Clock clock;                 ///< defaults to steady_clock()
};

struct QueryTiming {
  std::string id;
  int group = 0;
  std::vector<double> baseline_runs;
  std::vector<double> adw_runs;
  double rt_baseline = 0;  ///< mean of baseline_runs
  double rt_adw = 0;
  double times = 0;        ///< rt_baseline / rt_adw
  std::string adw_path;    ///< rolap or molap
  std::size_t rows = 0;
  std::string digest;      ///< result_digest of the baseline output
  bool results_match = true;
};

struct GroupTiming {
  int group = 0;
  double rt_baseline = 0;  ///< mean of member rt_baseline
  double rt_adw = 0;
  double times = 0;        ///< rt_baseline / rt_adw
};

struct LiveProperty {
  std::string name;
  bool applicable = false;
  bool passed = true;
  std::string detail;
};

struct BenchmarkReport {
  std::int64_t scale = 0;
  std::uint64_t seed = 0;
  int repetitions = 0;
  std::vector<QueryTiming> queries;
  std::vector<GroupTiming> groups;
  double mean_rt_baseline = 0;  ///< mean of group runtimes
  double mean_rt_adw = 0;
  double overall_times = 0;     ///< mean_rt_baseline / mean_rt_adw
  double mean_group_times = 0;  ///< arithmetic mean of per-group Times
  std::vector<LiveProperty> properties;

  bool properties_pass() const noexcept;
};

/// Arithmetic mean; zero for an empty list.
double mean(const std::vector<double>& xs) noexcept;

/// baseline / adw. Throws BenchmarkError unless both are positive.
double times_ratio(double rt_baseline, double rt_adw);

/// Fills per-query means and ratios, per-group stats and overall means from
/// the raw runs already in `report.queries`.
void finalize(BenchmarkReport& report);

/// Evaluates the live performance properties; they apply from `min_scale` rows.
void evaluate_properties(BenchmarkReport& report, std::int64_t min_scale = 1'000'000);

/// Runs every query on both engines, serially, and returns the finalized report.
BenchmarkReport run_benchmark(const Engines& engines, const std::vector<WorkloadQuery>& workload,
                              const BenchmarkOptions& options);

enum class Format : std::uint8_t { Text, Csv, Json };

/// Text renders three tables: per-query ratios, per-group ratios, and
/// per-group mean runtimes with a final Mean row. CSV has one record per
/// query and one per group. JSON holds the full report.
std::string render_report(const BenchmarkReport& report, Format format);

/// Inverse of render_report(..., Format::Json). Throws ParseError.
BenchmarkReport report_from_json(const std::string& text);

/// JSON of the report with every timing-derived field removed.
std::string deterministic_view(const BenchmarkReport& report);

/// True when each runtime is at least (1 - slack) times the previous one.
bool monotonic_with_slack(const std::vector<double>& runtimes, double slack) noexcept;

}  // namespace adw::bench
