#include "adw/schema.hpp"

#include <cctype>
#include <set>

#include "adw/error.hpp"

namespace adw {

std::string_view to_string(TableKind k) noexcept { return k == TableKind::Fact ? "fact" : "dimension"; }

std::optional<std::size_t> TableDef::column_index(std::string_view column) const noexcept {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (iequals(columns[i].name, column)) return i;
  }
  return std::nullopt;
}

const ColumnDef* TableDef::find_column(std::string_view column) const noexcept {
  auto idx = column_index(column);
  return idx ? &columns[*idx] : nullptr;
}

std::size_t TableDef::pk_index() const {
  auto idx = column_index(primary_key);
  if (!idx) throw Error("table " + name + " has no primary key column " + primary_key);
  return *idx;
}

const ForeignKey* TableDef::foreign_key_for(std::string_view column) const noexcept {
  for (const auto& fk : foreign_keys) {
    if (iequals(fk.column, column)) return &fk;
  }
  return nullptr;
}

const TableDef* ConstellationSchema::find_table(std::string_view name) const noexcept {
  auto it = tables.find(name);
  return it == tables.end() ? nullptr : &it->second;
}

const TableDef& ConstellationSchema::table(std::string_view name) const {
  if (const auto* t = find_table(name)) return *t;
  throw Error("unknown table " + std::string(name));
}

std::vector<std::string> ConstellationSchema::fact_tables() const {
  std::vector<std::string> out;
  for (const auto& [name, t] : tables) {
    if (t.kind == TableKind::Fact) out.push_back(t.name);
  }
  return out;
}

std::vector<std::string> ConstellationSchema::dimension_tables() const {
  std::vector<std::string> out;
  for (const auto& [name, t] : tables) {
    if (t.kind == TableKind::Dimension) out.push_back(t.name);
  }
  return out;
}

std::vector<std::string> ConstellationSchema::topological_order() const {
  std::vector<std::string> order;
  std::set<std::string, CaseInsensitiveLess> placed;
  bool progress = true;
  while (progress && placed.size() < tables.size()) {
    progress = false;
    for (const auto& [name, t] : tables) {
      if (placed.count(name)) continue;
      bool ready = true;
      for (const auto& fk : t.foreign_keys) {
        if (!iequals(fk.ref_table, name) && find_table(fk.ref_table) && !placed.count(fk.ref_table)) {
          ready = false;
          break;
        }
      }
      if (ready) {
        order.push_back(t.name);
        placed.insert(name);
        progress = true;
      }
    }
  }
  for (const auto& [name, t] : tables) {
    if (!placed.count(name)) order.push_back(t.name);
  }
  return order;
}

// ---------------------------------------------------------------------------
// Built-in catalog

namespace {

class TableBuilder {
 public:
  TableBuilder(std::string name, TableKind kind) {
    def_.name = std::move(name);
    def_.kind = kind;
  }
  TableBuilder& col(std::string name, DataType type, bool nullable = false) {
    def_.columns.push_back({std::move(name), type, nullable});
    return *this;
  }
  TableBuilder& id(std::string name) {
    def_.primary_key = name;
    return col(std::move(name), DataType::Int64);
  }
  TableBuilder& fk(std::string column, std::string table, std::string ref_column = {}) {
    if (ref_column.empty()) ref_column = column;
    col(column, DataType::Int64);
    def_.foreign_keys.push_back({std::move(column), std::move(table), std::move(ref_column)});
    return *this;
  }
  TableDef build() { return std::move(def_); }

 private:
  TableDef def_;
};

constexpr auto I = DataType::Int64;
constexpr auto F = DataType::Float64;
constexpr auto T = DataType::Text;
constexpr auto D = DataType::Date;
constexpr auto P = DataType::GeoPoint;
constexpr auto G = DataType::GeoPolygon;
constexpr bool kNullable = true;

}  // namespace

ConstellationSchema builtin_adw_schema() {
  std::vector<TableDef> defs;

  // Facts. Column spellings WaterVolumn and SoildID follow the reference queries.
  defs.push_back(TableBuilder("FieldFact", TableKind::Fact)
                     .id("FieldFactID")
                     .fk("CropID", "Crop")
                     .fk("FieldID", "Field")
                     .fk("PestID", "Pest")
                     .fk("FertiliserID", "Fertiliser")
                     .fk("SoildID", "Soil", "SoilID")
                     .fk("OperationTimeID", "OperationTime")
                     .fk("TreatmentID", "Treatment")
                     .fk("NutrientID", "Nutrient")
                     .fk("SprayID", "Spray")
                     .col("Yield", F)
                     .col("WaterVolumn", F)
                     .col("FertiliserQuantity", F)
                     .col("NutrientQuantity", F)
                     .col("SprayQuantity", F)
                     .col("PestNumber", I)
                     .build());
  defs.push_back(TableBuilder("OrderFact", TableKind::Fact)
                     .id("OrderID")
                     .fk("FarmerID", "Farmer")
                     .fk("SupplierID", "Supplier")
                     .fk("ProductID", "Product")
                     .fk("TransTimeID", "TransTime")
                     .col("Quantity", F)
                     .col("Price", F)
                     .build());
  defs.push_back(TableBuilder("SaleFact", TableKind::Fact)
                     .id("SaleID")
                     .fk("FarmerID", "Farmer")
                     .fk("BusinessID", "Business")
                     .fk("CropID", "Crop")
                     .col("SaleDate", D)
                     .col("Unit", T)
                     .col("Quantity", F)
                     .col("Price", F)
                     .build());

  // Core dimensions.
  defs.push_back(TableBuilder("Field", TableKind::Dimension)
                     .id("FieldID")
                     .col("FieldName", T)
                     .col("FieldArea", F)
                     .col("FieldGPS", P)
                     .col("FieldGeometric", G)
                     .fk("SiteID", "Site")
                     .build());
  defs.push_back(TableBuilder("Crop", TableKind::Dimension)
                     .id("CropID")
                     .col("CropName", T)
                     .col("EstYield", F)
                     .col("BbchScale", I)
                     .col("HarvestEquipment", T)
                     .col("HarvestEquipmentWeight", F)
                     .build());
  defs.push_back(TableBuilder("Soil", TableKind::Dimension)
                     .id("SoilID")
                     .col("PH", F)
                     .col("Nitrogen", F)
                     .col("Phosphorus", F)
                     .col("Potassium", F)
                     .col("Magnesium", F)
                     .col("Calcium", F)
                     .col("TextureLabel", T)
                     .col("Silt", F)
                     .col("Clay", F)
                     .col("Sand", F)
                     .col("CEC", F)
                     .col("OrganicMatter", F)
                     .col("RecommendedNutrient", T)
                     .col("TestingDate", D)
                     .build());
  defs.push_back(TableBuilder("Pest", TableKind::Dimension)
                     .id("PestID")
                     .col("CommonName", T)
                     .col("PestType", T)
                     .col("Description", T, kNullable)
                     .col("Density", F)
                     .col("Coverage", F)
                     .col("DetectedDate", D)
                     .build());

  // Supporting dimensions.
  defs.push_back(TableBuilder("Business", TableKind::Dimension)
                     .id("BusinessID")
                     .col("BusinessName", T)
                     .col("Address", T)
                     .col("Phone", T)
                     .col("Mobile", T, kNullable)
                     .col("Email", T, kNullable)
                     .build());
  defs.push_back(TableBuilder("CropState", TableKind::Dimension)
                     .id("CropStateID")
                     .fk("CropID", "Crop")
                     .col("StageScale", I)
                     .col("Height", F)
                     .col("MajorStage", I)
                     .col("MinStage", I)
                     .col("MaxStage", I)
                     .col("Diameter", F)
                     .col("MinHeight", F)
                     .col("MaxHeight", F)
                     .col("CropCoveragePercent", F)
                     .build());
  defs.push_back(TableBuilder("Farmer", TableKind::Dimension)
                     .id("FarmerID")
                     .col("FarmerName", T)
                     .col("Address", T)
                     .col("Phone", T)
                     .col("Mobile", T, kNullable)
                     .col("Email", T, kNullable)
                     .build());
  defs.push_back(TableBuilder("Fertiliser", TableKind::Dimension)
                     .id("FertiliserID")
                     .col("FertiliserName", T)
                     .col("Unit", T)
                     .col("Status", T)
                     .col("Description", T, kNullable)
                     .col("FertiliserGroupName", T)
                     .build());
  defs.push_back(TableBuilder("Inspection", TableKind::Dimension)
                     .id("InspectionID")
                     .fk("CropID", "Crop")
                     .col("Description", T)
                     .col("ProblemType", T)
                     .col("Severity", T)
                     .col("ProblemNotes", T, kNullable)
                     .col("AreaValue", F)
                     .col("AreaUnit", T)
                     .col("Order", I)
                     .col("Date", D)
                     .col("Notes", T, kNullable)
                     .col("GrowthStage", I)
                     .build());
  defs.push_back(TableBuilder("Nutrient", TableKind::Dimension)
                     .id("NutrientID")
                     .col("NutrientName", T)
                     .col("Date", D)
                     .col("Quantity", F)
                     .col("Year", I, kNullable)
                     .build());
  defs.push_back(TableBuilder("OperationTime", TableKind::Dimension)
                     .id("OperationTimeID")
                     .col("StartDate", D)
                     .col("EndDate", D)
                     .col("Season", T, kNullable)
                     .build());
  defs.push_back(TableBuilder("Plan", TableKind::Dimension)
                     .id("PlanID")
                     .col("PName", T)
                     .col("RegisNo", T)
                     .col("ProductName", T)
                     .col("ProductRate", F)
                     .col("Date", D)
                     .col("WaterVolume", F)
                     .build());
  defs.push_back(TableBuilder("Product", TableKind::Dimension)
                     .id("ProductID")
                     .col("ProductName", T)
                     .col("GroupName", T)
                     .build());
  defs.push_back(TableBuilder("Site", TableKind::Dimension)
                     .id("SiteID")
                     .fk("FarmerID", "Farmer")
                     .col("SiteName", T)
                     .col("Reference", T)
                     .col("Country", T)
                     .col("Address", T)
                     .col("GPS", P)
                     .col("CreatedBy", T, kNullable)
                     .build());
  defs.push_back(TableBuilder("Spray", TableKind::Dimension)
                     .id("SprayID")
                     .col("SprayProductName", T)
                     .col("ProductRate", F)
                     .col("Area", F)
                     .col("Date", D)
                     .col("WaterVol", F)
                     .col("ConfDuration", F)
                     .col("ConfWindSpeed", F)
                     .col("ConfDirection", T)
                     .col("ConfHumidity", F)
                     .col("ConfTemp", F)
                     .col("ActivityType", T)
                     .build());
  defs.push_back(TableBuilder("Supplier", TableKind::Dimension)
                     .id("SupplierID")
                     .col("SupplierName", T)
                     .col("ContactName", T)
                     .col("Address", T)
                     .col("Phone", T)
                     .col("Mobile", T, kNullable)
                     .col("Email", T, kNullable)
                     .build());
  defs.push_back(TableBuilder("Task", TableKind::Dimension)
                     .id("TaskID")
                     .col("Desc", T)
                     .col("Status", T)
                     .col("TaskDate", D)
                     .col("TaskInterval", I)
                     .col("CompDate", D)
                     .col("AppCode", T)
                     .build());
  defs.push_back(TableBuilder("TransTime", TableKind::Dimension)
                     .id("TransTimeID")
                     .col("OrderDate", D)
                     .col("DeliverDate", D)
                     .col("ReceivedDate", D)
                     .col("Season", T, kNullable)
                     .build());
  defs.push_back(TableBuilder("Treatment", TableKind::Dimension)
                     .id("TreatmentID")
                     .col("TreatmentName", T)
                     .col("FormType", T)
                     .col("LotCode", T)
                     .col("Rate", F)
                     .col("ApplCode", T)
                     .col("LevlNo", I)
                     .col("Type", T)
                     .col("Description", T)
                     .col("ApplDesc", T)
                     .col("TreatmentComment", T, kNullable)
                     .build());
  defs.push_back(TableBuilder("WeatherReading", TableKind::Dimension)
                     .id("WeatherReadingID")
                     .fk("WeatherStationID", "WeatherStation")
                     .col("ReadingDate", D)
                     .col("ReadingTime", T)
                     .col("AirTemperature", F)
                     .col("Rainfall", F)
                     .col("SPLite", F)
                     .col("RelativeHumidity", F)
                     .col("WindSpeed", F)
                     .col("WindDirection", F)
                     .col("SoilTemperature", F)
                     .col("LeafWetness", F)
                     .build());
  defs.push_back(TableBuilder("WeatherStation", TableKind::Dimension)
                     .id("WeatherStationID")
                     .col("StationName", T)
                     .col("Latitude", F)
                     .col("Longitude", F)
                     .col("Region", T)
                     .build());

  ConstellationSchema schema;
  schema.version = "adw-1.0";
  for (auto& d : defs) {
    std::string key = d.name;
    schema.tables.emplace(std::move(key), std::move(d));
  }
  return schema;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate_schema(const ConstellationSchema& schema) {
  std::vector<std::string> out;
  std::map<std::string, std::set<std::string>, CaseInsensitiveLess> referenced_by;
  bool any_fact = false;

  for (const auto& [key, t] : schema.tables) {
    std::set<std::string, CaseInsensitiveLess> seen;
    for (const auto& c : t.columns) {
      if (!seen.insert(c.name).second) out.push_back("table " + t.name + ": duplicate column " + c.name);
    }
    const ColumnDef* pk = t.find_column(t.primary_key);
    if (!pk) {
      out.push_back("table " + t.name + ": primary key " + t.primary_key + " is not a column");
    } else if (pk->nullable) {
      out.push_back("table " + t.name + ": primary key " + t.primary_key + " is nullable");
    }
    if (t.kind == TableKind::Fact) {
      any_fact = true;
      if (t.foreign_keys.empty()) out.push_back("fact table " + t.name + " has no foreign key");
    }
    for (const auto& fk : t.foreign_keys) {
      const std::string label = t.name + "." + fk.column + "->" + fk.ref_table + "." + fk.ref_column;
      const ColumnDef* local = t.find_column(fk.column);
      if (!local) {
        out.push_back("foreign key " + label + ": local column missing");
        continue;
      }
      const TableDef* target = schema.find_table(fk.ref_table);
      if (!target) {
        out.push_back("foreign key " + label + ": target table missing");
        continue;
      }
      const ColumnDef* ref = target->find_column(fk.ref_column);
      if (!ref) {
        out.push_back("foreign key " + label + ": target column missing");
        continue;
      }
      if (ref->type != local->type) out.push_back("foreign key " + label + ": type mismatch");
      if (t.kind == TableKind::Fact && target->kind == TableKind::Dimension) {
        referenced_by[target->name].insert(t.name);
      }
    }
  }

  if (!any_fact) {
    out.push_back("no fact table");
  } else {
    bool shared = false;
    for (const auto& [dim, facts] : referenced_by) {
      if (facts.size() >= 2) shared = true;
    }
    if (!shared) out.push_back("constellation property: no dimension table is referenced by two or more fact tables");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text form

std::string serialize_schema(const ConstellationSchema& schema) {
  std::string out;
  out += "schema \"" + schema.version + "\"\n";
  for (const auto& [key, t] : schema.tables) {
    out += "\n";
    out += std::string(to_string(t.kind)) + " " + t.name + " (\n";
    for (const auto& c : t.columns) {
      out += "  " + c.name + ":" + std::string(to_string(c.type)) + (c.nullable ? "?" : "") + ",\n";
    }
    out += "  pk=" + t.primary_key;
    for (const auto& fk : t.foreign_keys) {
      out += ",\n  fk=" + fk.column + "->" + fk.ref_table + "." + fk.ref_column;
    }
    out += "\n)\n";
  }
  return out;
}

namespace {

class SchemaParser {
 public:
  explicit SchemaParser(std::string_view text) : text_(text) {}

  ConstellationSchema parse() {
    ConstellationSchema schema;
    skip_space();
    if (peek_word() == "schema") {
      read_ident();
      schema.version = read_string();
    }
    std::vector<std::string> duplicates;
    while (true) {
      skip_space();
      if (at_end()) break;
      TableDef t = parse_table();
      std::string name = t.name;
      if (!schema.tables.emplace(name, std::move(t)).second) duplicates.push_back("duplicate table " + name);
    }
    if (!duplicates.empty()) throw ValidationError(duplicates);
    return schema;
  }

 private:
  TableDef parse_table() {
    TableDef t;
    const std::string kind = read_ident();
    if (kind == "fact") {
      t.kind = TableKind::Fact;
    } else if (kind == "dimension") {
      t.kind = TableKind::Dimension;
    } else {
      fail("expected 'fact' or 'dimension', found '" + kind + "'");
    }
    t.name = read_ident();
    expect('(');
    while (true) {
      skip_space();
      if (peek() == ')') break;
      const std::string word = read_ident();
      skip_space();
      if (peek() == ':') {
        ++pos_;
        ColumnDef c;
        c.name = word;
        const std::string type_name = read_ident();
        auto type = parse_data_type(type_name);
        if (!type) fail("unknown type '" + type_name + "'");
        c.type = *type;
        skip_space();
        if (peek() == '?') {
          ++pos_;
          c.nullable = true;
        }
        t.columns.push_back(std::move(c));
      } else if (word == "pk") {
        expect('=');
        t.primary_key = read_ident();
      } else if (word == "fk") {
        expect('=');
        ForeignKey fk;
        fk.column = read_ident();
        expect('-');
        if (peek() != '>') fail("expected '->'");
        ++pos_;
        fk.ref_table = read_ident();
        expect('.');
        fk.ref_column = read_ident();
        t.foreign_keys.push_back(std::move(fk));
      } else {
        fail("expected column definition, pk= or fk=");
      }
      skip_space();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() != ')') fail("expected ',' or ')'");
    }
    expect(')');
    if (t.primary_key.empty()) fail("table " + t.name + " declares no pk");
    return t;
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_space() {
    while (!at_end()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (!at_end() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view peek_word() {
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) ++end;
    return text_.substr(pos_, end - pos_);
  }

  std::string read_ident() {
    skip_space();
    if (at_end() || !(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) fail("expected identifier");
    std::string_view w = peek_word();
    pos_ += w.size();
    return std::string(w);
  }

  std::string read_string() {
    skip_space();
    if (peek() != '"') fail("expected quoted string");
    ++pos_;
    const std::size_t start = pos_;
    while (!at_end() && text_[pos_] != '"' && text_[pos_] != '\n') ++pos_;
    if (peek() != '"') fail("unterminated string");
    std::string s(text_.substr(start, pos_ - start));
    ++pos_;
    return s;
  }

  void expect(char c) {
    skip_space();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, line, col);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

ConstellationSchema load_schema(std::string_view document) {
  ConstellationSchema schema = SchemaParser(document).parse();
  auto violations = validate_schema(schema);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return schema;
}

std::uint64_t schema_hash(const ConstellationSchema& schema) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize_schema(schema)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace adw
