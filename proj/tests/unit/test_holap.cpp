#include <gtest/gtest.h>

#include <set>

#include "adw/exec.hpp"
#include "adw/olap.hpp"
#include "adw/workload.hpp"
#include "support/warehouse.hpp"

namespace adw {
namespace {

const fixture::Loaded& data() { return fixture::cached(42, 2000); }

const olap::CubeRegistry& registry() {
  static const olap::CubeRegistry r = olap::build_registry(*data().columns, olap::builtin_cubes());
  return r;
}

const WorkloadQuery& query(const std::string& id) {
  for (const auto& q : builtin_workload()) {
    if (q.id == id) return q;
  }
  throw std::out_of_range(id);
}

sql::QueryPlan plan_of(const std::string& text) { return sql::plan(text, *data().schema); }

TEST(Holap, CubeShapedQueryRoutesToMolap) {
  const auto p = plan_of(query("q10").sql);
  const auto hit = olap::match_cube(p, registry());
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(registry().cubes()[*hit]->def().name, "ph_by_spray");
  const auto h = olap::route_holap(p, registry(), *data().columns);
  EXPECT_EQ(h.path, sql::ExecPath::Molap);
  EXPECT_EQ(h.cube, "ph_by_spray");
  EXPECT_TRUE(equivalent_results(exec::execute_baseline(p, *data().rows), h.result, p));
}

TEST(Holap, OtherQueriesFallBackToRolap) {
  const auto p = plan_of(query("q15").sql);
  EXPECT_FALSE(olap::match_cube(p, registry()).has_value());
  const auto h = olap::route_holap(p, registry(), *data().columns);
  EXPECT_EQ(h.path, sql::ExecPath::Rolap);
  EXPECT_TRUE(h.cube.empty());
}

TEST(Holap, EmptyRegistryAlwaysUsesRolap) {
  const olap::CubeRegistry none;
  for (const auto& q : builtin_workload()) {
    const auto p = plan_of(q.sql);
    EXPECT_EQ(olap::route_holap(p, none, *data().columns).path, sql::ExecPath::Rolap) << q.id;
  }
}

TEST(Holap, EachBuiltinCubeServesAWorkloadQuery) {
  std::set<std::string> used;
  for (const auto& q : builtin_workload()) {
    const auto p = plan_of(q.sql);
    const auto h = olap::route_holap(p, registry(), *data().columns);
    if (h.path != sql::ExecPath::Molap) continue;
    used.insert(h.cube);
    std::string why;
    EXPECT_TRUE(equivalent_results(exec::execute_baseline(p, *data().rows), h.result, p, &why)) << q.id << ": " << why;
  }
  for (const auto& def : olap::builtin_cubes()) EXPECT_TRUE(used.count(def.name)) << def.name;
}

TEST(Holap, ExplainCarriesMolapTag) {
  auto p = plan_of(query("q10").sql);
  p.path = sql::ExecPath::Molap;
  EXPECT_EQ(sql::explain(p).rfind("path=molap", 0), 0u);
}

TEST(Holap, FiltersOutsideTheCubeAreNotRouted) {
  const auto shapes = {
      "SELECT Soil.PH, COUNT(*) FROM FieldFact, Soil WHERE FieldFact.SoildID = Soil.SoilID "
      "AND FieldFact.Yield > 3 GROUP BY Soil.PH",
      "SELECT Soil.PH, SUM(FieldFact.Yield) FROM FieldFact, Soil WHERE FieldFact.SoildID = Soil.SoilID "
      "GROUP BY Soil.PH",
      "SELECT Soil.PH, COUNT(*) FROM FieldFact LEFT JOIN Soil ON FieldFact.SoildID = Soil.SoilID GROUP BY Soil.PH",
      "SELECT Soil.PH FROM FieldFact, Soil WHERE FieldFact.SoildID = Soil.SoilID",
  };
  for (const char* text : shapes) EXPECT_FALSE(olap::match_cube(plan_of(text), registry()).has_value()) << text;
}

TEST(Holap, CoarserGroupingAndSubsetFiltersAreRouted) {
  const auto shapes = {
      "SELECT COUNT(*) FROM FieldFact, Soil WHERE FieldFact.SoildID = Soil.SoilID AND Soil.PH > 6",
      "SELECT FieldFact.SprayQuantity, COUNT(*) FROM FieldFact GROUP BY FieldFact.SprayQuantity",
      "SELECT YEAR(SaleFact.SaleDate), SUM(SaleFact.Quantity) FROM SaleFact GROUP BY YEAR(SaleFact.SaleDate)",
  };
  for (const char* text : shapes) {
    const auto p = plan_of(text);
    const auto h = olap::route_holap(p, registry(), *data().columns);
    EXPECT_EQ(h.path, sql::ExecPath::Molap) << text;
    std::string why;
    EXPECT_TRUE(equivalent_results(exec::execute_baseline(p, *data().rows), h.result, p, &why)) << text << why;
  }
}

}  // namespace
}  // namespace adw
