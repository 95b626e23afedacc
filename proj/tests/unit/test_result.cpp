#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "adw/result.hpp"
#include "adw/schema.hpp"

namespace adw {
namespace {

const ConstellationSchema& schema() {
  static const ConstellationSchema s = builtin_adw_schema();
  return s;
}

ResultSet make(std::vector<Row> rows) {
  ResultSet r;
  r.headers = {"CropName", "EstYield"};
  r.types = {DataType::Text, DataType::Float64};
  r.rows = std::move(rows);
  return r;
}

Row row(const char* name, Value v) { return Row{Value{std::string(name)}, std::move(v)}; }

TEST(Result, UnorderedComparisonIsMultiset) {
  const auto p = sql::plan("SELECT Crop.CropName, Crop.EstYield FROM Crop", schema());
  const auto a = make({row("a", 1.0), row("b", 2.0), row("a", 1.0)});
  EXPECT_TRUE(equivalent_results(a, make({row("b", 2.0), row("a", 1.0), row("a", 1.0)}), p));
  std::string why;
  EXPECT_FALSE(equivalent_results(a, make({row("b", 2.0), row("a", 1.0), row("b", 2.0)}), p, &why));
  EXPECT_FALSE(why.empty());
  EXPECT_FALSE(equivalent_results(a, make({row("b", 2.0), row("a", 1.0)}), p));
}

TEST(Result, FloatsMatchWithinRelativeTolerance) {
  const auto p = sql::plan("SELECT Crop.CropName, Crop.EstYield FROM Crop", schema());
  const auto a = make({row("a", 1e6)});
  EXPECT_TRUE(equivalent_results(a, make({row("a", 1e6 * (1 + 5e-10))}), p));
  EXPECT_FALSE(equivalent_results(a, make({row("a", 1e6 * (1 + 5e-9))}), p));
  EXPECT_TRUE(values_close(Value{0.0}, Value{0.0}, 1e-9));
  EXPECT_TRUE(values_close(Value{std::int64_t{3}}, Value{3.0}, 1e-9));
  EXPECT_TRUE(values_close(Value{}, Value{}, 1e-9));
  EXPECT_FALSE(values_close(Value{}, Value{0.0}, 1e-9));
}

TEST(Result, OrderedComparisonAllowsPermutationWithinTies) {
  const auto p = sql::plan("SELECT Crop.CropName, Crop.EstYield FROM Crop ORDER BY Crop.EstYield", schema());
  const auto a = make({row("a", 1.0), row("b", 1.0), row("c", 2.0)});
  EXPECT_TRUE(equivalent_results(a, make({row("b", 1.0), row("a", 1.0), row("c", 2.0)}), p));
  EXPECT_FALSE(equivalent_results(a, make({row("c", 2.0), row("a", 1.0), row("b", 1.0)}), p));
  EXPECT_FALSE(equivalent_results(a, make({row("a", 1.0), row("c", 1.0), row("c", 2.0)}), p));
}

TEST(Result, RandomTieShufflesStayEquivalent) {
  const auto p = sql::plan("SELECT Crop.CropName, Crop.EstYield FROM Crop ORDER BY Crop.EstYield DESC", schema());
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Row> rows;
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      rows.push_back(row(i % 2 ? "x" : "y", static_cast<double>(rng() % 5)));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return compare_total(a[1], b[1]) > 0; });
    auto shuffled = rows;
    for (std::size_t i = 0; i < shuffled.size();) {
      std::size_t j = i;
      while (j < shuffled.size() && equal_total(shuffled[j][1], shuffled[i][1])) ++j;
      std::shuffle(shuffled.begin() + static_cast<std::ptrdiff_t>(i), shuffled.begin() + static_cast<std::ptrdiff_t>(j),
                   rng);
      i = j;
    }
    EXPECT_TRUE(equivalent_results(make(rows), make(shuffled), p));
    if (rows.size() > 1 && !equal_total(rows.front()[1], rows.back()[1])) {
      std::reverse(shuffled.begin(), shuffled.end());
      EXPECT_FALSE(equivalent_results(make(rows), make(shuffled), p));
    }
  }
}

TEST(Result, DigestIgnoresRowOrder) {
  const auto a = make({row("a", 1.0), row("b", Value{})});
  const auto b = make({row("b", Value{}), row("a", 1.0)});
  EXPECT_EQ(result_digest(a), result_digest(b));
  EXPECT_EQ(result_digest(a).size(), 16u);
  EXPECT_NE(result_digest(a), result_digest(make({row("a", 1.5), row("b", Value{})})));
}

TEST(Result, RenderingsShowNulls) {
  const auto r = make({row("a,b", Value{})});
  EXPECT_EQ(to_text(r), "CropName\tEstYield\na,b\tNULL\n");
  EXPECT_EQ(to_csv(r), "CropName,EstYield\n\"a,b\",\n");
  EXPECT_EQ(to_json(r), R"({"headers":["CropName","EstYield"],"rows":[["a,b",null]]})");
}

}  // namespace
}  // namespace adw
