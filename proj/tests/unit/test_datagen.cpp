#include <gtest/gtest.h>

#include <filesystem>

#include "adw/datagen.hpp"
#include "adw/error.hpp"
#include "adw/schema.hpp"

using namespace adw;
using namespace adw::datagen;

TEST(Datagen, IdenticalConfigGivesIdenticalFiles) {
  const auto s = builtin_adw_schema();
  GenConfig cfg;
  cfg.scale = 500;
  cfg.rates = {0.02, 0.01, 0.01, 0.01};
  const auto a = generate(s, cfg);
  const auto b = generate(s, cfg);
  EXPECT_EQ(a.files, b.files);
  EXPECT_EQ(a.ledger.to_json(), b.ledger.to_json());
  cfg.seed = 43;
  EXPECT_NE(generate(s, cfg).files, a.files);
}

TEST(Datagen, OneFilePerTableAndFactRowCount) {
  const auto s = builtin_adw_schema();
  GenConfig cfg;
  cfg.scale = 700;
  const auto d = generate(s, cfg);
  EXPECT_EQ(d.files.size(), s.tables.size());
  EXPECT_EQ(d.ledger.tables.at("FieldFact").base_rows, 700u);
  EXPECT_EQ(d.ledger.tables.at("FieldFact").emitted_rows, 700u);
  for (auto c : kDefectClasses) EXPECT_EQ(d.ledger.total(c), 0u);
}

TEST(Datagen, DefectCountIsFloorOfRateTimesRows) {
  EXPECT_EQ(defect_count(0.02, 1000), 20u);
  EXPECT_EQ(defect_count(0.01, 999), 9u);
  EXPECT_EQ(defect_count(0.07, 100), 7u);  // 0.07 * 100 is 7.000000000000001 or 6.99...
  EXPECT_EQ(defect_count(0.0, 1000), 0u);
}

TEST(Datagen, LedgerCountsFollowRates) {
  const auto s = builtin_adw_schema();
  GenConfig cfg;
  cfg.scale = 2000;
  cfg.rates = {0.02, 0.01, 0.01, 0.01};
  const auto d = generate(s, cfg);
  const auto& f = d.ledger.tables.at("FieldFact");
  EXPECT_EQ(f.count(DefectClass::Duplicate), 40u);
  EXPECT_EQ(f.count(DefectClass::Missing), 20u);
  EXPECT_EQ(f.emitted_rows, 2040u);
}

TEST(Datagen, LedgerJsonRoundTrip) {
  const auto s = builtin_adw_schema();
  GenConfig cfg;
  cfg.scale = 300;
  cfg.rates = {0.05, 0.02, 0.02, 0.02};
  const auto d = generate(s, cfg);
  EXPECT_EQ(DefectLedger::from_json(d.ledger.to_json()).to_json(), d.ledger.to_json());
}

TEST(Datagen, InvalidConfigsAreRejected) {
  GenConfig cfg;
  cfg.rates.duplicate = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.rates = {0.2, 0.2, 0.2, 0.2};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.scale = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.start = make_date(2019, 1, 1);
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Datagen, WriteThenReadIsLossless) {
  const auto s = builtin_adw_schema();
  GenConfig cfg;
  cfg.scale = 200;
  cfg.rates = {0.02, 0.01, 0.01, 0.01};
  const auto d = generate(s, cfg);
  const auto dir = std::filesystem::temp_directory_path() / "adw_datagen_rt";
  std::filesystem::remove_all(dir);
  write_dataset(d, dir);
  const auto back = read_dataset(s, dir);
  EXPECT_EQ(back.files, d.files);
  EXPECT_EQ(back.ledger.to_json(), d.ledger.to_json());
  std::filesystem::remove_all(dir);
}

TEST(Datagen, VocabulariesCoverCorpusLiterals) {
  const auto& v = vocabularies();
  auto has = [&](const char* key, const char* value) {
    auto it = v.find(key);
    if (it == v.end()) return false;
    return std::find(it->second.begin(), it->second.end(), value) != it->second.end();
  };
  EXPECT_TRUE(has("Supplier.SupplierName", "Farm Direct"));
  EXPECT_TRUE(has("Business.BusinessName", "Ori Agro"));
  EXPECT_TRUE(has("Site.Country", "Ireland"));
}
