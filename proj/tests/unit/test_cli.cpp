#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adw/cli.hpp"

namespace adw {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir() {
    static int n = 0;
    path_ = fs::temp_directory_path() / ("adw_cli_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string str(const std::string& sub = {}) const { return (sub.empty() ? path_ : path_ / sub).string(); }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const std::vector<std::string> kDefects = {"--duplicate-rate", "0.02", "--missing-rate",  "0.01",
                                           "--inconsistent-rate", "0.01", "--wrong-rate", "0.01"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, cli::kUsageError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsageError);
  EXPECT_EQ(run({"--reps", "0", "bench"}).code, cli::kUsageError);
  EXPECT_EQ(run({"--format", "xml", "query", "--sql", "SELECT 1"}).code, cli::kUsageError);
  EXPECT_EQ(run({"--path", "gpu", "query", "--sql", "SELECT 1"}).code, cli::kUsageError);
  EXPECT_EQ(run({"--scale", "-5", "generate", "--out", "x"}).code, cli::kUsageError);
  EXPECT_EQ(run({"--duplicate-rate", "1.5", "--scale", "100", "generate", "--out", TempDir().str()}).code,
            cli::kUsageError);
  EXPECT_EQ(run({"--help"}).code, cli::kOk);
}

TEST(Cli, SyntaxErrorReportsPosition) {
  const auto r = run({"--scale", "200", "query", "--sql", "SELECT FROM\nWHERE"});
  EXPECT_EQ(r.code, cli::kUsageError);
  EXPECT_NE(r.err.find("line"), std::string::npos) << r.err;
  EXPECT_EQ(run({"--scale", "200", "query", "--sql", "SELECT Nope.X FROM Nope"}).code, cli::kUsageError);
}

TEST(Cli, MissingInputsAreRuntimeErrors) {
  TempDir t;
  const auto r = run({"--data", t.str("absent"), "etl"});
  EXPECT_EQ(r.code, cli::kRuntimeError);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run({"--warehouse", t.str("absent"), "query", "--sql", "SELECT COUNT(*) FROM Crop"}).code,
            cli::kRuntimeError);
}

TEST(Cli, GenerateIsByteIdenticalAcrossRuns) {
  TempDir a;
  TempDir b;
  ASSERT_EQ(run(with({"--scale", "400", "generate", "--out", a.str()}, kDefects)).code, cli::kOk);
  ASSERT_EQ(run(with({"--scale", "400", "generate", "--out", b.str()}, kDefects)).code, cli::kOk);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a.str())) {
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(fs::path(b.str()) / e.path().filename())) << e.path().filename();
  }
  EXPECT_EQ(files, 25u);
}

TEST(Cli, FlagsOverrideEnvironment) {
  TempDir a;
  TempDir b;
  ::setenv("ADW_SCALE", "150", 1);
  const int env_code = run({"generate", "--out", a.str()}).code;
  const int flag_code = run({"--scale", "250", "generate", "--out", b.str()}).code;
  ::unsetenv("ADW_SCALE");
  ASSERT_EQ(env_code, cli::kOk);
  ASSERT_EQ(flag_code, cli::kOk);
  EXPECT_EQ(lines(slurp(fs::path(a.str()) / "FieldFact.csv")), 151u);
  EXPECT_EQ(lines(slurp(fs::path(b.str()) / "FieldFact.csv")), 251u);
}

TEST(Cli, EtlReportMatchesLedger) {
  TempDir t;
  ASSERT_EQ(run(with({"--scale", "600", "generate", "--out", t.str("raw")}, kDefects)).code, cli::kOk);
  const auto r = run({"--data", t.str("raw"), "--warehouse", t.str("wh"), "--format", "json", "etl"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto report = nlohmann::json::parse(r.out);
  const auto ledger = nlohmann::json::parse(slurp(fs::path(t.str("raw")) / "ledger.json"));
  std::int64_t total = 0;
  for (const auto& [table, entry] : ledger["tables"].items()) {
    for (const auto& [cls, d] : entry["defects"].items()) {
      EXPECT_EQ(report["tables"][table]["classes"][cls]["detected"], d["count"]) << table << " " << cls;
      total += d["count"].get<std::int64_t>();
    }
  }
  EXPECT_GT(total, 0);
  EXPECT_TRUE(fs::exists(t.str("wh/warehouse.snap")));
  EXPECT_EQ(nlohmann::json::parse(slurp(t.str("wh/cleansing_report.json"))), report);

  const auto q = run({"--warehouse", t.str("wh"), "--format", "csv", "query", "--sql",
                      "SELECT Crop.CropName, COUNT(*) FROM FieldFact, Crop WHERE FieldFact.CropID = Crop.CropID "
                      "GROUP BY Crop.CropName ORDER BY Crop.CropName"});
  ASSERT_EQ(q.code, cli::kOk) << q.err;
  EXPECT_EQ(q.out.rfind("CropName,", 0), 0u);
}

TEST(Cli, ExampleQueryHasExpectedColumns) {
  const auto r = run({"--scale", "500", "--format", "csv", "query", "--sql",
                      "SELECT Crop.CropName, Field.FieldName, FieldFact.Yield FROM FieldFact, Crop, Field "
                      "WHERE FieldFact.CropID = Crop.CropID AND FieldFact.FieldID = Field.FieldID LIMIT 3"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "CropName,FieldName,Yield");
  EXPECT_EQ(lines(r.out), 4u);
}

TEST(Cli, ExplainShowsChosenPath) {
  const std::string q10 =
      "SELECT Soil.PH, COUNT(*) FROM FieldFact, Soil WHERE FieldFact.SoildID = Soil.SoilID "
      "AND FieldFact.SprayQuantity = 3 GROUP BY Soil.PH";
  EXPECT_EQ(run({"--scale", "300", "query", "--explain", "--sql", q10}).out.rfind("path=molap", 0), 0u);
  EXPECT_EQ(run({"--scale", "300", "query", "--explain", "--no-cubes", "--sql", q10}).out.rfind("path=rolap", 0), 0u);
  EXPECT_EQ(run({"--scale", "300", "--path", "baseline", "query", "--explain", "--sql", q10}).out.rfind("path=baseline", 0),
            0u);
}

TEST(Cli, PathsAgreeOnOutput) {
  const std::string sql =
      "SELECT Pest.CommonName, MAX(FieldFact.PestNumber) AS w FROM FieldFact, Pest "
      "WHERE FieldFact.PestID = Pest.PestID GROUP BY Pest.CommonName ORDER BY Pest.CommonName";
  const auto a = run({"--scale", "300", "--path", "baseline", "query", "--sql", sql});
  const auto b = run({"--scale", "300", "--path", "rolap", "query", "--sql", sql});
  const auto c = run({"--scale", "300", "--path", "holap", "query", "--sql", sql});
  ASSERT_EQ(a.code, cli::kOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
}

TEST(Cli, CubeOperationsCheckConservation) {
  const std::vector<std::string> base{"--scale", "300", "cube"};
  EXPECT_EQ(run(with(base, {"build", "--cube", "crop_pests", "--check-conservation"})).code, cli::kOk);
  EXPECT_EQ(run(with(base, {"op", "roll_up", "--cube", "crop_pests", "--dim", "crop", "--level", "ALL",
                            "--check-conservation"}))
                .code,
            cli::kOk);
  EXPECT_EQ(run(with(base, {"op", "slice", "--cube", "crop_pests", "--dim", "pest_number", "--member", "3",
                            "--check-conservation"}))
                .code,
            cli::kOk);
  EXPECT_EQ(run(with(base, {"op", "roll_up", "--cube", "crop_pests", "--dim", "crop", "--level", "crop_name"})).code,
            cli::kRuntimeError);
  const auto j = run({"--scale", "300", "--format", "json", "cube", "export", "--cube", "season_spray"});
  ASSERT_EQ(j.code, cli::kOk);
  EXPECT_EQ(nlohmann::json::parse(j.out)["cube"], "season_spray");
}

TEST(Cli, CubeDefinitionFileRoundTrips) {
  TempDir t;
  const auto d = run({"cube", "define", "--name", "water", "--fact", "FieldFact", "--dim", "crop", "--dim",
                      "operation_date:month", "--measure", "water=sum(WaterVolumn)", "--measure", "n=count(*)"});
  ASSERT_EQ(d.code, cli::kOk) << d.err;
  {
    std::ofstream f(t.str("water.json"));
    f << d.out;
  }
  const auto b = run({"--scale", "300", "cube", "build", "--def", t.str("water.json"), "--check-conservation"});
  EXPECT_EQ(b.code, cli::kOk) << b.err;
}

TEST(Cli, BenchWritesAllFormats) {
  TempDir t;
  const auto r = run({"--scale", "300", "--reps", "1", "bench", "--queries", "q1,q10,q21", "--out", t.str()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("Overall times"), std::string::npos);
  for (const char* f : {"report.txt", "report.csv", "report.json"}) EXPECT_TRUE(fs::exists(t.str(f))) << f;
  const auto j = nlohmann::json::parse(slurp(t.str("report.json")));
  EXPECT_EQ(j["queries"].size(), 3u);
  EXPECT_EQ(run({"--scale", "300", "bench", "--queries", "q99"}).code, cli::kUsageError);
}

}  // namespace
}  // namespace adw
