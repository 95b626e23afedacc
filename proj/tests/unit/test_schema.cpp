#include <gtest/gtest.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "adw/schema.hpp"
#include "adw/sql/plan.hpp"
#include "adw/workload.hpp"
#include "support/reference_schema.hpp"

using namespace adw;

using fixture::kAliases;
using fixture::kReference;

TEST(SchemaCatalog, CountsFactAndDimensionTables) {
  const auto s = builtin_adw_schema();
  EXPECT_EQ(s.fact_tables().size(), 3u);
  EXPECT_EQ(s.dimension_tables().size(), 21u);
  EXPECT_EQ(s.tables.size(), kReference.size());
}

TEST(SchemaCatalog, EveryReferenceAttributeIsPresent) {
  const auto s = builtin_adw_schema();
  for (const auto& [table, attrs] : kReference) {
    const TableDef* t = s.find_table(table);
    ASSERT_NE(t, nullptr) << table;
    for (const auto& a : attrs) {
      auto alias = kAliases.find(table + "." + a);
      const std::string name = alias == kAliases.end() ? a : alias->second;
      EXPECT_NE(t->find_column(name), nullptr) << table << "." << a;
    }
  }
}

TEST(SchemaCatalog, FactKindsAndMeasures) {
  const auto s = builtin_adw_schema();
  for (const char* f : {"FieldFact", "OrderFact", "SaleFact"}) EXPECT_EQ(s.table(f).kind, TableKind::Fact) << f;
  EXPECT_EQ(s.table("FieldFact").find_column("PestNumber")->type, DataType::Int64);
  EXPECT_EQ(s.table("FieldFact").find_column("Yield")->type, DataType::Float64);
  EXPECT_EQ(s.table("SaleFact").find_column("SaleDate")->type, DataType::Date);
}

TEST(SchemaCatalog, SoilForeignKeyKeepsReferenceSpelling) {
  const auto s = builtin_adw_schema();
  const ForeignKey* fk = s.table("FieldFact").foreign_key_for("SoildID");
  ASSERT_NE(fk, nullptr);
  EXPECT_EQ(fk->ref_table, "Soil");
  EXPECT_EQ(fk->ref_column, "SoilID");
}

TEST(SchemaCatalog, ValidatesClean) { EXPECT_TRUE(validate_schema(builtin_adw_schema()).empty()); }

TEST(SchemaCatalog, SerializeRoundTrip) {
  const auto s = builtin_adw_schema();
  const auto text = serialize_schema(s);
  const auto back = load_schema(text);
  EXPECT_EQ(back, s);
  EXPECT_EQ(schema_hash(back), schema_hash(s));
}

TEST(SchemaCatalog, ValidationReportsBrokenForeignKey) {
  auto s = builtin_adw_schema();
  s.tables.at("FieldFact").foreign_keys[0].ref_table = "Nowhere";
  EXPECT_FALSE(validate_schema(s).empty());
}

TEST(SchemaCatalog, ValidationReportsMissingPrimaryKey) {
  auto s = builtin_adw_schema();
  s.tables.at("Crop").primary_key = "NoSuchColumn";
  EXPECT_FALSE(validate_schema(s).empty());
}

TEST(SchemaCatalog, TopologicalOrderPutsParentsFirst) {
  const auto s = builtin_adw_schema();
  const auto order = s.topological_order();
  std::map<std::string, std::size_t, CaseInsensitiveLess> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  for (const auto& [name, t] : s.tables) {
    for (const auto& fk : t.foreign_keys) EXPECT_LT(pos.at(fk.ref_table), pos.at(name)) << name << "." << fk.column;
  }
}

TEST(SchemaCatalog, EveryWorkloadQueryBinds) {
  const auto s = builtin_adw_schema();
  for (const auto& q : builtin_workload()) EXPECT_NO_THROW(sql::plan(q.sql, s)) << q.id;
  for (const auto& e : decision_examples()) EXPECT_NO_THROW(sql::plan(e.sql, s)) << e.name;
}
