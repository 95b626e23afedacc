#include "adw/datagen.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "adw/csv.hpp"
#include "adw/error.hpp"
#include "json.hpp"

namespace adw::datagen {

using nlohmann::json;

std::string_view to_string(DefectClass c) noexcept {
  switch (c) {
    case DefectClass::Duplicate: return "duplicate";
    case DefectClass::Missing: return "missing";
    case DefectClass::Inconsistent: return "inconsistent";
    case DefectClass::Wrong: return "wrong";
  }
  return "?";
}

std::optional<DefectClass> parse_defect_class(std::string_view s) noexcept {
  for (auto c : kDefectClasses) {
    if (iequals(to_string(c), s)) return c;
  }
  return std::nullopt;
}

double& DefectRates::operator[](DefectClass c) noexcept {
  switch (c) {
    case DefectClass::Duplicate: return duplicate;
    case DefectClass::Missing: return missing;
    case DefectClass::Inconsistent: return inconsistent;
    case DefectClass::Wrong: break;
  }
  return wrong;
}

double DefectRates::operator[](DefectClass c) const noexcept { return const_cast<DefectRates&>(*this)[c]; }

void GenConfig::validate() const {
  double sum = 0;
  for (auto c : kDefectClasses) {
    const double r = rates[c];
    if (!(r >= 0.0 && r <= 1.0)) {
      throw ConfigError(std::string(to_string(c)) + " rate " + format_double(r) + " is outside [0,1]");
    }
    sum += r;
  }
  if (sum > 0.5 + 1e-12) throw ConfigError("defect rates sum to " + format_double(sum) + ", above 0.5");
  if (start > end) throw ConfigError("date range start " + format_date(start) + " is after end " + format_date(end));
  if (scale < 1) throw ConfigError("scale must be at least 1, got " + std::to_string(scale));
}

std::size_t defect_count(double rate, std::size_t base_rows) noexcept {
  return static_cast<std::size_t>(std::floor(rate * static_cast<double>(base_rows) + 1e-9));
}

std::size_t DefectLedger::total(DefectClass c) const noexcept {
  std::size_t n = 0;
  for (const auto& [name, t] : tables) n += t.count(c);
  return n;
}

std::size_t table_rows(std::string_view table, TableKind kind, std::int64_t scale) noexcept {
  const std::int64_t s = std::max<std::int64_t>(scale, 1);
  struct Ratio {
    const char* name;
    std::int64_t min;
    std::int64_t per;
  };
  static constexpr Ratio kRatios[] = {
      {"FieldFact", 1, 1},         {"OrderFact", 1, 2},        {"SaleFact", 1, 2},
      {"Crop", 16, 500},           {"Field", 20, 50},          {"Site", 5, 500},
      {"Farmer", 20, 200},         {"Soil", 20, 100},          {"Pest", 30, 10000},
      {"Fertiliser", 24, 20000},   {"Nutrient", 24, 20000},    {"Treatment", 20, 5000},
      {"Spray", 30, 2000},         {"OperationTime", 60, 100}, {"TransTime", 60, 200},
      {"Product", 20, 5000},       {"Supplier", 10, 5000},     {"Business", 10, 5000},
      {"CropState", 20, 200},      {"Inspection", 40, 100},    {"WeatherStation", 5, 10000},
      {"WeatherReading", 50, 20},  {"Plan", 10, 1000},         {"Task", 10, 1000},
  };
  for (const auto& r : kRatios) {
    if (iequals(r.name, table)) return static_cast<std::size_t>(std::max(r.min, s / r.per));
  }
  return static_cast<std::size_t>(kind == TableKind::Fact ? s : std::max<std::int64_t>(10, s / 100));
}

const std::map<std::string, std::vector<std::string>, CaseInsensitiveLess>& vocabularies() {
  static const std::map<std::string, std::vector<std::string>, CaseInsensitiveLess> pools = {
      {"Crop.CropName",
       {"Winter Wheat", "Spring Barley", "Winter Barley", "Spring Wheat", "Oilseed Rape", "Potatoes", "Maize", "Oats",
        "Peas", "Rye", "Grass", "Beans", "Sugar Beet", "Linseed", "Triticale", "Red Clover"}},
      {"Crop.HarvestEquipment", {"Combine Harvester", "Potato Harvester", "Forage Harvester", "Beet Harvester"}},
      {"Fertiliser.FertiliserName",
       {"urea", "SO3", "P2O5", "CAN", "Nitram", "NPK 10-10-20", "NPK 18-6-12", "NPK 24-2-12", "Sulphate of Ammonia",
        "Muriate of Potash", "Triple Superphosphate", "Diammonium Phosphate", "Kieserite", "Ground Limestone",
        "Granulated Lime", "Cattle Slurry", "Pig Slurry", "Farmyard Manure", "Boron", "Manganese",
        "Magnesium Sulphate", "Potassium Nitrate", "Calcium Nitrate", "Sulphur"}},
      {"Fertiliser.FertiliserGroupName",
       {"Nitrogen", "Phosphate", "Potash", "Compound", "Organic", "Trace Element", "Lime"}},
      {"Fertiliser.Unit", {"kg/ha", "t/ha", "l/ha"}},
      {"Fertiliser.Status", {"Active", "Discontinued"}},
      {"Nutrient.NutrientName",
       {"Nitrogen", "Phosphorus", "Potassium", "Sulphur", "Magnesium", "Calcium", "Boron", "Copper", "Manganese",
        "Zinc", "Molybdenum", "Iron", "Chlorine", "Nickel", "Sodium", "Selenium", "Cobalt", "Silicon", "NPK"}},
      {"Pest.CommonName",
       {"Black twitch", "Aphids", "Slugs", "Wireworm", "Leatherjackets", "Wild Oats", "Blackgrass", "Cleavers",
        "Chickweed", "Frit Fly", "Bean Weevil", "Cabbage Stem Flea Beetle"}},
      {"Pest.PestType", {"Weed", "Insect", "Mollusc", "Fungus"}},
      {"Inspection.Description",
       {"Yellow Rust", "Brown Rust", "Septoria", "Mildew", "Take-all", "Eyespot", "Rhynchosporium", "Net Blotch"}},
      {"Inspection.ProblemType", {"Disease", "Pest", "Weed", "Nutrient Deficiency"}},
      {"Inspection.Severity", {"Low", "Medium", "High"}},
      {"Inspection.AreaUnit", {"ha", "m2"}},
      {"OperationTime.Season", {"Spring", "Summer", "Autumn", "Winter"}},
      {"TransTime.Season", {"Spring", "Summer", "Autumn", "Winter"}},
      {"Business.BusinessName",
       {"Ori Agro", "Goldcrop", "Dairygold Agribusiness", "Glanbia Agribusiness", "Grassland Agro", "Tirlan Grain",
        "Boortmalt", "Drummonds", "Quinns of Baltinglass", "Liffey Mills"}},
      {"Supplier.SupplierName",
       {"Agri Supplies Ltd", "Farm Direct", "Harvest Inputs", "Green Field Supplies", "Tillage Solutions",
        "Country Crest Inputs", "Midland Agri", "Southern Seeds", "Atlantic Agrochem", "Eastern Farm Stores"}},
      {"Product.ProductName",
       {"Roundup", "Axial Pro", "Zypar", "Pixxaro", "Liberator", "Firebird", "Proline", "Elatus Era", "Revystar",
        "Ascra Xpro", "Decis", "Biscaya", "Karate Zeon", "Comet 200", "Cortez", "Medax Max", "Moddus", "Bravo 500",
        "Folicur", "Hallmark Zeon"}},
      {"Spray.SprayProductName",
       {"Roundup", "Axial Pro", "Zypar", "Pixxaro", "Liberator", "Firebird", "Proline", "Elatus Era", "Revystar",
        "Ascra Xpro", "Decis", "Biscaya", "Karate Zeon", "Comet 200", "Cortez", "Medax Max", "Moddus", "Bravo 500",
        "Folicur", "Hallmark Zeon", "Amistar", "Siltra Xpro", "Priori Gold", "Tracker", "Starane XL"}},
      {"Plan.ProductName", {"Roundup", "Axial Pro", "Zypar", "Proline", "Revystar", "Decis", "Moddus"}},
      {"Product.GroupName", {"Herbicide", "Fungicide", "Insecticide", "Growth Regulator", "Seed"}},
      {"Spray.ActivityType", {"Spraying", "Fertilising", "Drilling", "Harvesting"}},
      {"Spray.ConfDirection", {"N", "NE", "E", "SE", "S", "SW", "W", "NW"}},
      {"Treatment.TreatmentName",
       {"Seed Dressing", "Fungicide T0", "Fungicide T1", "Fungicide T2", "Herbicide Pre-emergence",
        "Herbicide Post-emergence", "Growth Regulator", "Insecticide"}},
      {"Treatment.FormType", {"EC", "SC", "WG", "SL"}},
      {"Treatment.Type", {"Chemical", "Biological"}},
      {"Soil.TextureLabel", {"Clay Loam", "Sandy Loam", "Silt Loam", "Loam", "Clay", "Sandy Clay"}},
      {"Soil.RecommendedNutrient", {"Nitrogen", "Phosphorus", "Potassium", "Sulphur", "Magnesium", "Lime"}},
      {"Site.Country", {"Ireland", "United Kingdom"}},
      {"WeatherStation.Region", {"Leinster", "Munster", "Connacht", "Ulster"}},
      {"Task.Status", {"Planned", "In Progress", "Completed"}},
      {"SaleFact.Unit", {"t", "kg"}},
      {"Farmer.FarmerName",
       {"Murphy", "Kelly", "Byrne", "Ryan", "O'Brien", "Walsh", "O'Sullivan", "Doyle", "McCarthy", "Gallagher",
        "O'Connor", "Kennedy", "Lynch", "Murray", "Quinn", "Moore", "McLoughlin", "Carroll", "Connolly", "Daly"}},
  };
  return pools;
}

namespace {

// Deterministic randomness ------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::string_view table, std::string_view purpose) noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : to_lower(table)) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  h = (h ^ '/') * 1099511628211ULL;
  for (char c : purpose) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  return splitmix64(seed ^ splitmix64(h));
}

/// Uniform draws built directly on the engine's output so results do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  /// Uniform integer in [lo, hi].
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform real in [lo, hi] rounded to `decimals` places.
  double real(double lo, double hi, int decimals) {
    const double scale = std::pow(10.0, decimals);
    const std::int64_t a = static_cast<std::int64_t>(std::ceil(lo * scale));
    const std::int64_t b = static_cast<std::int64_t>(std::floor(hi * scale));
    return static_cast<double>(range(a, b)) / scale;
  }

  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 eng_;
};

// Cell rules ---------------------------------------------------------------------

struct RowContext {
  const TableDef& def;
  std::int64_t index;  ///< 1-based row number == surrogate key
  const std::vector<std::string>& cells;
  const GenConfig& cfg;
};

using Rule = std::function<std::string(Rng&, const RowContext&)>;

std::string pad(std::int64_t n, int width) {
  std::string s = std::to_string(n);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

Rule real_rule(double lo, double hi, int decimals) {
  return [=](Rng& r, const RowContext&) { return format_double(r.real(lo, hi, decimals)); };
}

Rule int_rule(std::int64_t lo, std::int64_t hi) {
  return [=](Rng& r, const RowContext&) { return std::to_string(r.range(lo, hi)); };
}

Rule pool_rule(std::string key) {
  return [key = std::move(key)](Rng& r, const RowContext&) {
    const auto& pool = vocabularies().at(key);
    return pool[static_cast<std::size_t>(r.range(0, static_cast<std::int64_t>(pool.size()) - 1))];
  };
}

/// Pool member chosen by row number so every member appears once before any repeats.
Rule cycle_rule(std::string key) {
  return [key = std::move(key)](Rng&, const RowContext& ctx) {
    const auto& pool = vocabularies().at(key);
    return pool[static_cast<std::size_t>(ctx.index - 1) % pool.size()];
  };
}

Rule label_rule(std::string prefix, int width) {
  return [=](Rng&, const RowContext& ctx) { return prefix + pad(ctx.index, width); };
}

Date random_date(Rng& r, const GenConfig& cfg) { return Date{static_cast<std::int32_t>(r.range(cfg.start.days, cfg.end.days))}; }

Rule date_rule() {
  return [](Rng& r, const RowContext& ctx) { return format_date(random_date(r, ctx.cfg)); };
}

/// Date a bounded number of days after an earlier column of the same row, clamped to the range.
Rule date_after_rule(std::string column, std::int64_t lo, std::int64_t hi) {
  return [=](Rng& r, const RowContext& ctx) {
    const auto base = parse_date(ctx.cells[*ctx.def.column_index(column)]);
    const std::int64_t d = std::min<std::int64_t>(base->days + r.range(lo, hi), ctx.cfg.end.days);
    return format_date(Date{static_cast<std::int32_t>(d)});
  };
}

std::string point_text(double lat, double lon) { return format_double(lat) + " " + format_double(lon); }

Rule point_rule() {
  return [](Rng& r, const RowContext&) { return point_text(r.real(51.5, 55.3, 5), r.real(-10.5, -6.0, 5)); };
}

Rule polygon_rule() {
  return [](Rng& r, const RowContext&) {
    const double lat = r.real(51.5, 55.3, 5);
    const double lon = r.real(-10.5, -6.0, 5);
    const double d = r.real(0.001, 0.01, 4);
    std::string s;
    const double pts[4][2] = {{lat, lon}, {lat + d, lon}, {lat + d, lon + d}, {lat, lon + d}};
    for (int i = 0; i < 4; ++i) {
      if (i) s += ';';
      s += point_text(std::round(pts[i][0] * 1e5) / 1e5, std::round(pts[i][1] * 1e5) / 1e5);
    }
    return s;
  };
}

Rule phone_rule() {
  return [](Rng& r, const RowContext&) {
    return "+353 " + pad(r.range(1, 99), 2) + " " + pad(r.range(0, 999), 3) + " " + pad(r.range(0, 9999), 4);
  };
}

Rule mobile_rule() {
  return [](Rng& r, const RowContext&) { return "+353 8" + std::to_string(r.range(3, 9)) + " " + pad(r.range(0, 9999999), 7); };
}

Rule email_rule(std::string domain) {
  return [domain = std::move(domain)](Rng&, const RowContext& ctx) {
    return "contact" + std::to_string(ctx.index) + "@" + domain;
  };
}

Rule address_rule() {
  static const std::vector<std::string> towns = {"Carlow", "Kilkenny", "Wexford", "Naas", "Athy", "Cashel",
                                                 "Mallow", "Tullamore", "Navan", "Ennis", "Galway", "Sligo"};
  return [](Rng& r, const RowContext&) {
    return std::to_string(r.range(1, 200)) + " Main Street, " +
           towns[static_cast<std::size_t>(r.range(0, static_cast<std::int64_t>(towns.size()) - 1))];
  };
}

Rule empty_rule() {
  return [](Rng&, const RowContext&) { return std::string(); };
}

const std::map<std::string, Rule, CaseInsensitiveLess>& rules() {
  static const std::map<std::string, Rule, CaseInsensitiveLess> r = [] {
    std::map<std::string, Rule, CaseInsensitiveLess> m;
    // Facts.
    m["FieldFact.Yield"] = real_rule(1, 15, 2);
    m["FieldFact.WaterVolumn"] = real_rule(0, 30, 1);
    m["FieldFact.FertiliserQuantity"] = int_rule(0, 20);
    m["FieldFact.NutrientQuantity"] = int_rule(0, 10);
    m["FieldFact.SprayQuantity"] = int_rule(0, 10);
    m["FieldFact.PestNumber"] = int_rule(0, 20);
    m["OrderFact.Quantity"] = int_rule(1, 20);
    m["OrderFact.Price"] = real_rule(5, 500, 2);
    m["SaleFact.SaleDate"] = date_rule();
    m["SaleFact.Unit"] = pool_rule("SaleFact.Unit");
    m["SaleFact.Quantity"] = int_rule(1, 50);
    m["SaleFact.Price"] = real_rule(100, 300, 2);
    // Dimensions.
    m["Field.FieldName"] = label_rule("Field ", 4);
    m["Field.FieldArea"] = real_rule(0.5, 50, 2);
    m["Field.FieldGPS"] = point_rule();
    m["Field.FieldGeometric"] = polygon_rule();
    m["Crop.CropName"] = cycle_rule("Crop.CropName");
    m["Crop.EstYield"] = real_rule(0, 15, 1);
    m["Crop.BbchScale"] = int_rule(0, 99);
    m["Crop.HarvestEquipment"] = pool_rule("Crop.HarvestEquipment");
    m["Crop.HarvestEquipmentWeight"] = real_rule(2, 20, 1);
    m["Soil.PH"] = real_rule(4.5, 8.5, 1);
    for (const char* c : {"Nitrogen", "Phosphorus", "Potassium", "Magnesium", "Calcium"}) {
      m[std::string("Soil.") + c] = real_rule(0, 300, 1);
    }
    m["Soil.TextureLabel"] = pool_rule("Soil.TextureLabel");
    for (const char* c : {"Silt", "Clay", "Sand"}) m[std::string("Soil.") + c] = real_rule(0, 100, 1);
    m["Soil.CEC"] = real_rule(5, 40, 1);
    m["Soil.OrganicMatter"] = real_rule(1, 15, 1);
    m["Soil.RecommendedNutrient"] = pool_rule("Soil.RecommendedNutrient");
    m["Pest.CommonName"] = cycle_rule("Pest.CommonName");
    m["Pest.PestType"] = pool_rule("Pest.PestType");
    m["Pest.Density"] = real_rule(0, 100, 1);
    m["Pest.Coverage"] = real_rule(0, 100, 1);
    m["Business.BusinessName"] = cycle_rule("Business.BusinessName");
    m["Supplier.SupplierName"] = cycle_rule("Supplier.SupplierName");
    m["Supplier.ContactName"] = pool_rule("Farmer.FarmerName");
    for (const char* t : {"Business", "Farmer", "Supplier"}) {
      m[std::string(t) + ".Address"] = address_rule();
      m[std::string(t) + ".Phone"] = phone_rule();
      m[std::string(t) + ".Mobile"] = mobile_rule();
      m[std::string(t) + ".Email"] = email_rule(to_lower(t) + ".example.ie");
    }
    m["Farmer.FarmerName"] = [](Rng&, const RowContext& ctx) {
      const auto& pool = vocabularies().at("Farmer.FarmerName");
      return pool[static_cast<std::size_t>(ctx.index - 1) % pool.size()] + " Farms " + std::to_string(ctx.index);
    };
    m["CropState.StageScale"] = int_rule(0, 99);
    m["CropState.Height"] = real_rule(0, 200, 1);
    m["CropState.MajorStage"] = int_rule(0, 9);
    m["CropState.MinStage"] = int_rule(0, 49);
    m["CropState.MaxStage"] = int_rule(50, 99);
    m["CropState.Diameter"] = real_rule(0, 30, 1);
    m["CropState.MinHeight"] = real_rule(0, 50, 1);
    m["CropState.MaxHeight"] = real_rule(50, 200, 1);
    m["CropState.CropCoveragePercent"] = real_rule(0, 100, 1);
    m["Fertiliser.FertiliserName"] = cycle_rule("Fertiliser.FertiliserName");
    m["Fertiliser.Unit"] = pool_rule("Fertiliser.Unit");
    m["Fertiliser.Status"] = pool_rule("Fertiliser.Status");
    m["Fertiliser.FertiliserGroupName"] = pool_rule("Fertiliser.FertiliserGroupName");
    m["Inspection.Description"] = pool_rule("Inspection.Description");
    m["Inspection.ProblemType"] = pool_rule("Inspection.ProblemType");
    m["Inspection.Severity"] = pool_rule("Inspection.Severity");
    m["Inspection.AreaValue"] = real_rule(0.1, 50, 1);
    m["Inspection.AreaUnit"] = pool_rule("Inspection.AreaUnit");
    m["Inspection.Order"] = int_rule(1, 10);
    m["Inspection.GrowthStage"] = int_rule(0, 99);
    m["Nutrient.NutrientName"] = cycle_rule("Nutrient.NutrientName");
    m["Nutrient.Quantity"] = real_rule(0, 10, 1);
    m["Nutrient.Year"] = empty_rule();
    m["OperationTime.EndDate"] = date_after_rule("StartDate", 0, 60);
    m["OperationTime.Season"] = empty_rule();
    m["Plan.PName"] = label_rule("Plan ", 3);
    m["Plan.RegisNo"] = [](Rng& r, const RowContext&) { return "PCS " + pad(r.range(0, 99999), 5); };
    m["Plan.ProductName"] = pool_rule("Plan.ProductName");
    m["Plan.ProductRate"] = real_rule(0.1, 5, 2);
    m["Plan.WaterVolume"] = real_rule(50, 400, 0);
    m["Product.ProductName"] = cycle_rule("Product.ProductName");
    m["Product.GroupName"] = pool_rule("Product.GroupName");
    m["Site.SiteName"] = label_rule("Site ", 3);
    m["Site.Reference"] = label_rule("REF-", 5);
    m["Site.Country"] = pool_rule("Site.Country");
    m["Site.Address"] = address_rule();
    m["Site.GPS"] = point_rule();
    m["Site.CreatedBy"] = [](Rng& r, const RowContext&) { return "agronomist" + std::to_string(r.range(1, 5)); };
    m["Spray.SprayProductName"] = cycle_rule("Spray.SprayProductName");
    m["Spray.ProductRate"] = real_rule(0.1, 5, 2);
    m["Spray.Area"] = real_rule(1, 50, 1);
    m["Spray.WaterVol"] = real_rule(50, 400, 0);
    m["Spray.ConfDuration"] = real_rule(0.5, 8, 1);
    m["Spray.ConfWindSpeed"] = real_rule(0, 30, 1);
    m["Spray.ConfDirection"] = pool_rule("Spray.ConfDirection");
    m["Spray.ConfHumidity"] = real_rule(30, 100, 0);
    m["Spray.ConfTemp"] = real_rule(-2, 28, 1);
    m["Spray.ActivityType"] = pool_rule("Spray.ActivityType");
    m["Task.Desc"] = label_rule("Task ", 3);
    m["Task.Status"] = pool_rule("Task.Status");
    m["Task.TaskInterval"] = int_rule(1, 30);
    m["Task.CompDate"] = date_after_rule("TaskDate", 0, 30);
    m["Task.AppCode"] = [](Rng& r, const RowContext&) { return "A" + pad(r.range(0, 99), 2); };
    m["TransTime.DeliverDate"] = date_after_rule("OrderDate", 1, 14);
    m["TransTime.ReceivedDate"] = date_after_rule("DeliverDate", 0, 3);
    m["TransTime.Season"] = empty_rule();
    m["Treatment.TreatmentName"] = cycle_rule("Treatment.TreatmentName");
    m["Treatment.FormType"] = pool_rule("Treatment.FormType");
    m["Treatment.LotCode"] = [](Rng& r, const RowContext&) { return "LOT" + pad(r.range(0, 999999), 6); };
    m["Treatment.Rate"] = real_rule(0.1, 5, 2);
    m["Treatment.ApplCode"] = [](Rng& r, const RowContext&) { return "AP" + pad(r.range(0, 999), 3); };
    m["Treatment.LevlNo"] = int_rule(1, 5);
    m["Treatment.Type"] = pool_rule("Treatment.Type");
    m["Treatment.Description"] = label_rule("Treatment programme ", 3);
    m["Treatment.ApplDesc"] = label_rule("Application ", 3);
    m["Treatment.TreatmentComment"] = label_rule("Comment ", 3);
    m["WeatherReading.ReadingTime"] = [](Rng& r, const RowContext&) {
      return pad(r.range(0, 23), 2) + ":" + pad(r.range(0, 3) * 15, 2);
    };
    m["WeatherReading.AirTemperature"] = real_rule(-5, 30, 1);
    m["WeatherReading.Rainfall"] = real_rule(0, 50, 1);
    m["WeatherReading.SPLite"] = real_rule(0, 1000, 0);
    m["WeatherReading.RelativeHumidity"] = real_rule(30, 100, 0);
    m["WeatherReading.WindSpeed"] = real_rule(0, 30, 1);
    m["WeatherReading.WindDirection"] = real_rule(0, 359, 0);
    m["WeatherReading.SoilTemperature"] = real_rule(0, 25, 1);
    m["WeatherReading.LeafWetness"] = real_rule(0, 15, 0);
    m["WeatherStation.StationName"] = label_rule("Station ", 3);
    m["WeatherStation.Latitude"] = real_rule(51.5, 55.3, 4);
    m["WeatherStation.Longitude"] = real_rule(-10.5, -6.0, 4);
    m["WeatherStation.Region"] = pool_rule("WeatherStation.Region");
    return m;
  }();
  return r;
}

Rule fallback_rule(const ColumnDef& col) {
  switch (col.type) {
    case DataType::Int64: return int_rule(0, 100);
    case DataType::Float64: return real_rule(0, 100, 1);
    case DataType::Date: return date_rule();
    case DataType::Bool: return [](Rng& r, const RowContext&) { return std::string(r.chance(0.5) ? "true" : "false"); };
    case DataType::GeoPoint: return point_rule();
    case DataType::GeoPolygon: return polygon_rule();
    case DataType::Text: break;
  }
  return label_rule(col.name + " ", 1);
}

/// Derived columns are filled by the ETL transform, never by the generator.
bool is_derived(const TableDef& def, const ColumnDef& col) {
  return (iequals(def.name, "OperationTime") && iequals(col.name, "Season")) ||
         (iequals(def.name, "TransTime") && iequals(col.name, "Season")) ||
         (iequals(def.name, "Nutrient") && iequals(col.name, "Year"));
}

struct ParentKeys {
  std::vector<std::int64_t> clean;  ///< keys safe to reference
  std::int64_t max_key = 0;
};

std::string format_csv_line(const std::vector<std::string>& cells) {
  std::string line;
  csv::append_record(line, cells);
  return line;
}

}  // namespace

RawDataset generate(const ConstellationSchema& schema, const GenConfig& cfg) {
  cfg.validate();
  auto violations = validate_schema(schema);
  if (!violations.empty()) throw ValidationError(violations);

  RawDataset out;
  out.ledger.config = cfg;
  std::map<std::string, ParentKeys, CaseInsensitiveLess> keys;

  for (const auto& name : schema.topological_order()) {
    const TableDef& def = schema.table(name);
    const std::size_t n = table_rows(def.name, def.kind, cfg.scale);
    const std::size_t pk = def.pk_index();
    Rng rng(stream_seed(cfg.seed, def.name, "rows"));
    Rng drng(stream_seed(cfg.seed, def.name, "defects"));

    // Defect candidates per class.
    std::vector<std::size_t> missing_cols, inconsistent_cols, fk_cols;
    for (std::size_t c = 0; c < def.columns.size(); ++c) {
      const auto& col = def.columns[c];
      if (c == pk || is_derived(def, col)) continue;
      if (!col.nullable) missing_cols.push_back(c);
      if (col.type == DataType::Date || (is_numeric(col.type) && icontains(col.name, "quantity"))) {
        inconsistent_cols.push_back(c);
      }
      if (def.foreign_key_for(col.name)) fk_cols.push_back(c);
    }
    std::array<std::size_t, 4> counts{};
    for (auto c : kDefectClasses) counts[static_cast<std::size_t>(c)] = defect_count(cfg.rates[c], n);
    if (missing_cols.empty()) counts[1] = 0;
    if (inconsistent_cols.empty()) counts[2] = 0;
    if (fk_cols.empty()) counts[3] = 0;

    // Disjoint row selection by partial Fisher-Yates over row indices.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    const std::size_t picked = counts[0] + counts[1] + counts[2] + counts[3];
    for (std::size_t i = 0; i < picked && i < n; ++i) {
      const auto j = static_cast<std::size_t>(drng.range(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n) - 1));
      std::swap(order[i], order[j]);
    }
    // 0 = clean, otherwise 1 + class index.
    std::vector<std::uint8_t> mark(n, 0);
    std::vector<std::size_t> dup_sources;
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      for (std::size_t i = 0; i < counts[k]; ++i) {
        const std::size_t row = order[cursor++];
        if (k == 0) {
          dup_sources.push_back(row);
        } else {
          mark[row] = static_cast<std::uint8_t>(k + 1);
        }
      }
    }
    std::vector<std::uint8_t> is_dup_source(n, 0);
    for (std::size_t r : dup_sources) is_dup_source[r] = 1;

    std::vector<Rule> col_rules;
    std::vector<const ParentKeys*> parents(def.columns.size(), nullptr);
    for (std::size_t c = 0; c < def.columns.size(); ++c) {
      const auto& col = def.columns[c];
      if (const auto* fk = def.foreign_key_for(col.name)) parents[c] = &keys.at(fk->ref_table);
      auto it = rules().find(def.name + "." + col.name);
      col_rules.push_back(it != rules().end() ? it->second : fallback_rule(col));
    }

    TableLedger ledger;
    ledger.base_rows = n;
    std::string text = format_csv_line([&] {
      std::vector<std::string> h;
      for (const auto& c : def.columns) h.push_back(c.name);
      return h;
    }());
    std::map<std::size_t, std::string> dup_lines;
    ParentKeys mine;
    mine.max_key = static_cast<std::int64_t>(n);
    std::vector<std::string> cells(def.columns.size());

    for (std::size_t i = 0; i < n; ++i) {
      const auto key = static_cast<std::int64_t>(i + 1);
      std::fill(cells.begin(), cells.end(), std::string());
      RowContext ctx{def, key, cells, cfg};
      for (std::size_t c = 0; c < def.columns.size(); ++c) {
        const auto& col = def.columns[c];
        if (c == pk) {
          cells[c] = std::to_string(key);
        } else if (parents[c]) {
          const auto& pool = parents[c]->clean;
          if (pool.empty()) throw ConfigError("no clean keys available in " + def.foreign_key_for(col.name)->ref_table);
          cells[c] = std::to_string(pool[static_cast<std::size_t>(rng.range(0, static_cast<std::int64_t>(pool.size()) - 1))]);
        } else {
          std::string v = col_rules[c](rng, ctx);
          if (col.nullable && !is_derived(def, col) && rng.chance(0.15)) v.clear();
          cells[c] = std::move(v);
        }
      }
      const auto ordinal = static_cast<std::int64_t>(i + 1);
      switch (mark[i]) {
        case 2: {
          const std::size_t c = missing_cols[static_cast<std::size_t>(drng.range(0, static_cast<std::int64_t>(missing_cols.size()) - 1))];
          cells[c].clear();
          ledger.defects[1].push_back({ordinal, key, def.columns[c].name});
          break;
        }
        case 3: {
          const std::size_t c =
              inconsistent_cols[static_cast<std::size_t>(drng.range(0, static_cast<std::int64_t>(inconsistent_cols.size()) - 1))];
          if (def.columns[c].type == DataType::Date) {
            const std::int64_t shift = drng.range(1, 3650);
            const std::int64_t d = drng.chance(0.5) ? cfg.start.days - shift : cfg.end.days + shift;
            cells[c] = format_date(Date{static_cast<std::int32_t>(d)});
          } else {
            cells[c] = std::to_string(-drng.range(1, 20));
          }
          ledger.defects[2].push_back({ordinal, key, def.columns[c].name});
          break;
        }
        case 4: {
          const std::size_t c = fk_cols[static_cast<std::size_t>(drng.range(0, static_cast<std::int64_t>(fk_cols.size()) - 1))];
          cells[c] = std::to_string(parents[c]->max_key + 1 + drng.range(0, 999));
          ledger.defects[3].push_back({ordinal, key, def.columns[c].name});
          break;
        }
        default:
          mine.clean.push_back(key);
          break;
      }
      std::string line = format_csv_line(cells);
      if (is_dup_source[i]) dup_lines.emplace(i, line);
      text += line;
    }

    // Duplicates are appended in random source order.
    std::size_t ordinal = n;
    for (std::size_t r : dup_sources) {
      text += dup_lines.at(r);
      ledger.defects[0].push_back({static_cast<std::int64_t>(++ordinal), static_cast<std::int64_t>(r + 1), {}});
    }
    ledger.emitted_rows = ordinal;
    out.files.emplace(def.name, std::move(text));
    out.ledger.tables.emplace(def.name, std::move(ledger));
    keys.emplace(def.name, std::move(mine));
  }
  return out;
}

// Ledger JSON --------------------------------------------------------------------

std::string DefectLedger::to_json() const {
  json j;
  j["seed"] = config.seed;
  j["scale"] = config.scale;
  j["date_range"] = {format_date(config.start), format_date(config.end)};
  for (auto c : kDefectClasses) j["rates"][std::string(to_string(c))] = config.rates[c];
  j["disjoint"] = true;
  j["tables"] = json::object();
  for (const auto& [name, t] : tables) {
    json tj;
    tj["base_rows"] = t.base_rows;
    tj["emitted_rows"] = t.emitted_rows;
    for (auto c : kDefectClasses) {
      json entries = json::array();
      for (const auto& e : t.entries(c)) {
        json ej{{"ordinal", e.ordinal}, {"key", e.key}};
        if (!e.column.empty()) ej["column"] = e.column;
        entries.push_back(std::move(ej));
      }
      tj["defects"][std::string(to_string(c))] = {{"count", t.count(c)}, {"rows", std::move(entries)}};
    }
    j["tables"][name] = std::move(tj);
  }
  return j.dump(2) + "\n";
}

DefectLedger DefectLedger::from_json(std::string_view text) {
  DefectLedger l;
  try {
    const json j = json::parse(text);
    l.config.seed = j.at("seed").get<std::uint64_t>();
    l.config.scale = j.at("scale").get<std::int64_t>();
    const auto& dr = j.at("date_range");
    auto s = parse_date(dr.at(0).get<std::string>());
    auto e = parse_date(dr.at(1).get<std::string>());
    if (!s || !e) throw ConfigError("ledger date_range is not ISO dates");
    l.config.start = *s;
    l.config.end = *e;
    for (auto c : kDefectClasses) l.config.rates[c] = j.at("rates").at(std::string(to_string(c))).get<double>();
    for (const auto& [name, tj] : j.at("tables").items()) {
      TableLedger t;
      t.base_rows = tj.at("base_rows").get<std::size_t>();
      t.emitted_rows = tj.at("emitted_rows").get<std::size_t>();
      for (auto c : kDefectClasses) {
        const auto& cj = tj.at("defects").at(std::string(to_string(c)));
        for (const auto& ej : cj.at("rows")) {
          DefectEntry e2;
          e2.ordinal = ej.at("ordinal").get<std::int64_t>();
          e2.key = ej.at("key").get<std::int64_t>();
          if (ej.contains("column")) e2.column = ej.at("column").get<std::string>();
          t.defects[static_cast<std::size_t>(c)].push_back(std::move(e2));
        }
        if (cj.at("count").get<std::size_t>() != t.count(c)) {
          throw ConfigError("ledger count for " + name + "." + std::string(to_string(c)) + " disagrees with its rows");
        }
      }
      l.tables.emplace(name, std::move(t));
    }
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("malformed ledger.json: ") + ex.what());
  }
  return l;
}

// Files --------------------------------------------------------------------------

void write_dataset(const RawDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + p.string());
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!os) throw Error("write failure on " + p.string());
  };
  for (const auto& [name, text] : data.files) write(dir / (name + ".csv"), text);
  write(dir / "ledger.json", data.ledger.to_json());
}

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw EtlError("missing input file " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

RawDataset read_dataset(const ConstellationSchema& schema, const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw EtlError("data directory " + dir.string() + " does not exist");
  RawDataset data;
  for (const auto& [name, def] : schema.tables) data.files.emplace(def.name, slurp(dir / (def.name + ".csv")));
  if (std::filesystem::exists(dir / "ledger.json")) data.ledger = DefectLedger::from_json(slurp(dir / "ledger.json"));
  return data;
}

}  // namespace adw::datagen
