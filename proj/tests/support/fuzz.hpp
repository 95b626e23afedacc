#pragma once

#include <random>
#include <string>
#include <vector>

namespace adw::fixture {

/// Random queries in the supported subset over the built-in schema.
class QueryFuzzer {
 public:
  explicit QueryFuzzer(std::uint64_t seed) : rng_(seed) {}

  std::string next() {
    switch (pick(9)) {
      case 0: return filter_select();
      case 1:
      case 2: return grouped();
      case 3: return cube_shaped();
      case 4: return outer_join();
      case 5: return union_query();
      case 6: return scalar_aggregate();
      case 7: return in_subquery();
      default: return distinct_select();
    }
  }

 private:
  struct Measure {
    const char* name;
    int lo, hi;
  };
  struct Dim {
    const char* fk;
    const char* table;
    const char* pk;
    std::vector<const char*> attrs;
  };
  struct Fact {
    const char* name;
    const char* pk;
    std::vector<Measure> measures;
    std::vector<Dim> dims;
    const char* date;
  };

  const std::vector<Fact>& facts() const {
    static const std::vector<Fact> f = {
        {"FieldFact",
         "FieldFactID",
         {{"Yield", 0, 15},
          {"WaterVolumn", 0, 30},
          {"FertiliserQuantity", 0, 20},
          {"NutrientQuantity", 0, 10},
          {"SprayQuantity", 0, 10},
          {"PestNumber", 0, 20}},
         {{"CropID", "Crop", "CropID", {"CropName", "EstYield"}},
          {"SoildID", "Soil", "SoilID", {"TextureLabel", "PH"}},
          {"OperationTimeID", "OperationTime", "OperationTimeID", {"Season"}},
          {"PestID", "Pest", "PestID", {"CommonName", "PestType"}},
          {"FertiliserID", "Fertiliser", "FertiliserID", {"FertiliserName", "FertiliserGroupName"}},
          {"NutrientID", "Nutrient", "NutrientID", {"NutrientName"}},
          {"SprayID", "Spray", "SprayID", {"SprayProductName"}},
          {"TreatmentID", "Treatment", "TreatmentID", {"TreatmentName", "Type"}},
          {"FieldID", "Field", "FieldID", {"FieldName"}}},
         nullptr},
        {"SaleFact",
         "SaleID",
         {{"Quantity", 0, 50}, {"Price", 100, 300}},
         {{"BusinessID", "Business", "BusinessID", {"BusinessName"}},
          {"CropID", "Crop", "CropID", {"CropName"}},
          {"FarmerID", "Farmer", "FarmerID", {"FarmerName"}}},
         "SaleDate"},
        {"OrderFact",
         "OrderID",
         {{"Quantity", 0, 20}, {"Price", 0, 500}},
         {{"SupplierID", "Supplier", "SupplierID", {"SupplierName"}},
          {"ProductID", "Product", "ProductID", {"ProductName", "GroupName"}},
          {"TransTimeID", "TransTime", "TransTimeID", {"Season"}},
          {"FarmerID", "Farmer", "FarmerID", {"FarmerName"}}},
         nullptr},
    };
    return f;
  }

  int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }
  bool coin() { return pick(2) == 0; }
  template <typename T>
  const T& any(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(pick(static_cast<int>(v.size())))];
  }
  const Fact& fact() { return pick(5) < 3 ? facts()[0] : any(facts()); }

  static std::string q(const char* table, const char* col) { return std::string(table) + "." + col; }

  std::string op() {
    static const std::vector<std::string> ops{"=", "<>", "<", "<=", ">", ">="};
    return any(ops);
  }

  std::string number(const Measure& m) {
    const int v = m.lo + pick(m.hi - m.lo + 1);
    if (coin()) return std::to_string(v);
    return std::to_string(v) + ".5";
  }

  std::string measure_pred(const Fact& f) {
    const Measure& m = any(f.measures);
    const std::string lhs = q(f.name, m.name);
    switch (pick(4)) {
      case 0: return lhs + " IN (" + std::to_string(m.lo + pick(5)) + ", " + std::to_string(m.lo + pick(9)) + ")";
      default: return lhs + " " + op() + " " + number(m);
    }
  }

  std::string fact_pred(const Fact& f) {
    std::string p = measure_pred(f);
    if (f.date && pick(3) == 0) {
      if (coin()) {
        p = "YEAR(" + q(f.name, f.date) + ") " + op() + " " + std::to_string(2014 + pick(5));
      } else {
        p = "MONTH(" + q(f.name, f.date) + ") " + op() + " " + std::to_string(1 + pick(12));
      }
    }
    switch (pick(4)) {
      case 0: return p + " AND " + measure_pred(f);
      case 1: return "(" + p + " OR " + measure_pred(f) + ")";
      default: return p;
    }
  }

  std::string dim_pred(const Dim& d) {
    const char* attr = any(d.attrs);
    const std::string col = q(d.table, attr);
    const std::string a(attr);
    if (a == "EstYield" || a == "PH") return col + " " + op() + " " + std::to_string(a == "PH" ? 5 + pick(4) : pick(15));
    static const std::vector<std::string> patterns{"%a%", "%e%", "P%", "%N%", "S%", "%o%", "_a%", "%r"};
    return col + " LIKE '" + any(patterns) + "'";
  }

  std::string join_cond(const Fact& f, const Dim& d) { return q(f.name, d.fk) + " = " + q(d.table, d.pk); }

  std::string filter_select() {
    const Fact& f = fact();
    const Measure& m = any(f.measures);
    std::string sql = "SELECT " + q(f.name, f.pk) + ", " + q(f.name, m.name);
    std::string from = " FROM " + std::string(f.name);
    std::string where = " WHERE " + fact_pred(f);
    if (coin()) {
      const Dim& d = any(f.dims);
      sql += ", " + q(d.table, any(d.attrs));
      from += ", " + std::string(d.table);
      where += " AND " + join_cond(f, d);
      if (coin()) where += " AND " + dim_pred(d);
    }
    sql += from + where;
    if (coin()) {
      sql += " ORDER BY " + q(f.name, m.name) + (coin() ? " DESC" : "");
      if (coin()) sql += " LIMIT " + std::to_string(1 + pick(30));
    } else if (pick(4) == 0) {
      sql += " LIMIT " + std::to_string(1 + pick(30));
    }
    return sql;
  }

  std::string aggregate(const Fact& f, const Dim* d, std::string& having_expr) {
    const Measure& m = any(f.measures);
    switch (pick(5)) {
      case 0: having_expr = "COUNT(*)"; return "COUNT(*)";
      case 1: having_expr = "COUNT(" + q(f.name, m.name) + ")"; return having_expr;
      case 2: having_expr = "MAX(" + q(f.name, m.name) + ")"; return having_expr;
      case 3:
        if (d) {
          having_expr = "MAX(" + q(d->table, any(d->attrs)) + ")";
          return having_expr;
        }
        [[fallthrough]];
      default: having_expr = "SUM(" + q(f.name, m.name) + ")"; return having_expr;
    }
  }

  std::string grouped() {
    const Fact& f = fact();
    const Dim& d = any(f.dims);
    const std::string key = q(d.table, any(d.attrs));
    std::string second;
    if (pick(3) == 0) second = q(f.name, any(f.measures).name);
    std::string h1;
    std::string h2;
    const std::string a1 = aggregate(f, &d, h1);
    const std::string a2 = aggregate(f, nullptr, h2);
    std::string sql = "SELECT " + key + (second.empty() ? "" : ", " + second) + ", " + a1 + " AS v1, " + a2 + " AS v2";
    sql += " FROM " + std::string(f.name) + ", " + d.table + " WHERE " + join_cond(f, d);
    if (coin()) sql += " AND " + fact_pred(f);
    if (pick(3) == 0) sql += " AND " + dim_pred(d);
    sql += " GROUP BY " + key + (second.empty() ? "" : ", " + second);
    if (coin()) sql += " HAVING v2 > " + std::to_string(pick(20));
    if (coin()) {
      sql += coin() ? " ORDER BY v2 DESC" : " ORDER BY " + key;
      if (pick(3) == 0) sql += " LIMIT " + std::to_string(1 + pick(10));
    }
    return sql;
  }

  std::string cube_shaped() {
    struct Shape {
      const char* select;
      const char* from;
      const char* join;
      const char* key;
      std::vector<std::string> preds;
    };
    static const std::vector<Shape> shapes = {
        {"Soil.PH, COUNT(*)", "FieldFact, Soil", "FieldFact.SoildID = Soil.SoilID", "Soil.PH",
         {"FieldFact.SprayQuantity = 3", "FieldFact.SprayQuantity >= 6", "Soil.PH > 6.5"}},
        {"Crop.CropName, SUM(FieldFact.Yield), COUNT(*)", "FieldFact, Crop", "FieldFact.CropID = Crop.CropID",
         "Crop.CropName", {"FieldFact.PestNumber < 7", "FieldFact.PestNumber IN (1, 2, 20)"}},
        {"Crop.CropName, SUM(FieldFact.WaterVolumn) AS s", "FieldFact, Crop", "FieldFact.CropID = Crop.CropID",
         "Crop.CropName", {"FieldFact.SprayQuantity = 4", "Crop.EstYield >= 3 AND Crop.EstYield <= 12"}},
        {"OperationTime.Season, MAX(FieldFact.Yield) AS m", "FieldFact, OperationTime",
         "FieldFact.OperationTimeID = OperationTime.OperationTimeID", "OperationTime.Season",
         {"FieldFact.SprayQuantity > 2", "OperationTime.Season LIKE 'S%'"}},
        {"Pest.CommonName, MAX(FieldFact.PestNumber) AS w", "FieldFact, Pest", "FieldFact.PestID = Pest.PestID",
         "Pest.CommonName", {"FieldFact.SprayQuantity = 1", "FieldFact.SprayQuantity <> 5"}},
        {"Business.BusinessName, SUM(SaleFact.Quantity) AS s", "SaleFact, Business",
         "SaleFact.BusinessID = Business.BusinessID", "Business.BusinessName",
         {"YEAR(SaleFact.SaleDate) = 2015", "YEAR(SaleFact.SaleDate) >= 2017"}},
        {"FieldFact.SprayQuantity, COUNT(*)", "FieldFact, Soil", "FieldFact.SoildID = Soil.SoilID",
         "FieldFact.SprayQuantity", {"Soil.PH < 7"}},
        {"COUNT(*)", "FieldFact, Soil", "FieldFact.SoildID = Soil.SoilID", "", {"FieldFact.SprayQuantity = 99"}},
    };
    const Shape& s = any(shapes);
    std::string sql = std::string("SELECT ") + s.select + " FROM " + s.from + " WHERE " + s.join;
    for (const auto& p : s.preds) {
      if (coin()) sql += " AND " + p;
    }
    if (*s.key) {
      sql += std::string(" GROUP BY ") + s.key;
      if (coin()) sql += " ORDER BY " + std::string(s.key) + (coin() ? " DESC" : "");
    }
    return sql;
  }

  std::string outer_join() {
    const Fact& f = facts()[0];
    const Dim& d = any(f.dims);
    const Measure& m = any(f.measures);
    const std::string attr = q(d.table, any(d.attrs));
    std::string sql;
    if (coin()) {
      sql = "SELECT " + attr + ", " + q(f.name, m.name) + " FROM " + f.name + " RIGHT JOIN " + d.table + " ON " +
            join_cond(f, d) + " WHERE " + measure_pred(f);
    } else if (coin()) {
      sql = "SELECT " + attr + ", COUNT(" + q(f.name, f.pk) + ") AS n FROM " + d.table + " LEFT JOIN " + f.name +
            " ON " + q(d.table, d.pk) + " = " + q(f.name, d.fk) + " AND " + measure_pred(f) + " GROUP BY " + attr;
      if (coin()) sql += " HAVING n >= " + std::to_string(pick(3));
    } else {
      sql = "SELECT " + q(f.name, f.pk) + ", " + attr + " FROM " + f.name + " LEFT JOIN " + d.table + " ON " +
            join_cond(f, d) + " WHERE " + measure_pred(f);
    }
    if (coin()) sql += " ORDER BY " + attr;
    return sql;
  }

  std::string union_query() {
    const Fact& f = fact();
    const Dim& d1 = any(f.dims);
    const Dim& d2 = any(f.dims);
    auto branch = [&](const Dim& d) {
      return "SELECT " + q(d.table, d.attrs[0]) + " FROM " + f.name + ", " + d.table + " WHERE " + join_cond(f, d) +
             " AND " + fact_pred(f);
    };
    std::string sql = branch(d1) + (coin() ? " UNION ALL " : " UNION ") + branch(d2);
    if (coin()) sql += " ORDER BY 1";
    return sql;
  }

  std::string scalar_aggregate() {
    const Fact& f = fact();
    const Measure& m = any(f.measures);
    std::string sql;
    switch (pick(3)) {
      case 0: sql = "SELECT COUNT(*) FROM " + std::string(f.name); break;
      case 1: sql = "SELECT COUNT(*), SUM(" + q(f.name, m.name) + ") FROM " + std::string(f.name); break;
      default:
        sql = "SELECT MAX(" + q(f.name, m.name) + "), SUM(" + q(f.name, any(f.measures).name) + ") FROM " +
              std::string(f.name);
    }
    if (coin()) {
      sql += " WHERE " + q(f.name, m.name) + " > " + std::to_string(m.hi + 1);
    } else {
      sql += " WHERE " + fact_pred(f);
    }
    return sql;
  }

  std::string in_subquery() {
    const Fact& f = fact();
    const Dim& d = any(f.dims);
    return "SELECT " + q(f.name, f.pk) + " FROM " + f.name + " WHERE " + q(f.name, d.fk) + " IN (SELECT " +
           q(d.table, d.pk) + " FROM " + d.table + " WHERE " + dim_pred(d) + ") AND " + measure_pred(f);
  }

  std::string distinct_select() {
    const Fact& f = fact();
    const Dim& d = any(f.dims);
    std::string sql = "SELECT DISTINCT " + q(d.table, any(d.attrs)) + " FROM " + f.name + ", " + d.table + " WHERE " +
                      join_cond(f, d) + " AND " + fact_pred(f);
    if (coin()) sql += " ORDER BY 1";
    return sql;
  }

  std::mt19937_64 rng_;
};

}  // namespace adw::fixture
