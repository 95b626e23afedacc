#pragma once

#include <map>
#include <memory>
#include <tuple>

#include "adw/datagen.hpp"
#include "adw/etl.hpp"
#include "adw/schema.hpp"
#include "adw/storage.hpp"

namespace adw::fixture {

/// Generated, cleansed and loaded data held in both engines.
struct Loaded {
  std::shared_ptr<const ConstellationSchema> schema;
  std::unique_ptr<RowStore> rows;
  std::unique_ptr<ColumnStore> columns;
  datagen::DefectLedger ledger;
  etl::CleansingReport report;
};

inline Loaded load(std::uint64_t seed, std::int64_t scale, datagen::DefectRates rates = {}) {
  Loaded l;
  l.schema = std::make_shared<const ConstellationSchema>(builtin_adw_schema());
  datagen::GenConfig cfg;
  cfg.seed = seed;
  cfg.scale = scale;
  cfg.rates = rates;
  auto raw = datagen::generate(*l.schema, cfg);
  l.ledger = raw.ledger;
  auto r = etl::run(raw, *l.schema);
  l.report = r.report;
  l.rows = std::make_unique<RowStore>(l.schema);
  l.columns = std::make_unique<ColumnStore>(l.schema);
  etl::load(r.relations, {l.rows.get(), l.columns.get()});
  return l;
}

/// Shared instance per (seed, scale); built on first use.
inline const Loaded& cached(std::uint64_t seed, std::int64_t scale) {
  static std::map<std::pair<std::uint64_t, std::int64_t>, Loaded> cache;
  auto key = std::make_pair(seed, scale);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, load(seed, scale)).first;
  return it->second;
}

}  // namespace adw::fixture
