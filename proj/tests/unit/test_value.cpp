#include <gtest/gtest.h>

#include <random>

#include "adw/value.hpp"

using namespace adw;

TEST(Date, CivilRoundTripAcrossRange) {
  for (int d = -800000; d <= 800000; d += 97) {
    const CivilDate c = to_civil(Date{d});
    EXPECT_EQ(make_date(c.year, c.month, c.day).days, d);
  }
}

TEST(Date, KnownEpochs) {
  EXPECT_EQ(make_date(1970, 1, 1).days, 0);
  EXPECT_EQ(make_date(2000, 3, 1).days, 11017);
  EXPECT_EQ(format_date(make_date(2016, 2, 29)), "2016-02-29");
}

TEST(Date, ParseRejectsImpossibleDays) {
  EXPECT_TRUE(parse_date("2016-02-29"));
  EXPECT_FALSE(parse_date("2017-02-29"));
  EXPECT_FALSE(parse_date("2017-13-01"));
  EXPECT_FALSE(parse_date("17-01-01"));
}

TEST(Value, NullSortsFirstAndNumericKindsMix) {
  EXPECT_LT(compare_total(Value{}, Value{std::int64_t{-5}}), 0);
  EXPECT_EQ(compare_total(Value{std::int64_t{3}}, Value{3.0}), 0);
  EXPECT_LT(compare_total(Value{2.5}, Value{std::int64_t{3}}), 0);
  EXPECT_FALSE(compare_sql(Value{}, Value{std::int64_t{1}}));
}

TEST(Value, EqualValuesHashEqually) {
  EXPECT_EQ(hash_value(Value{std::int64_t{7}}), hash_value(Value{7.0}));
  EXPECT_EQ(hash_value(Value{std::string("a")}), hash_value(Value{std::string("a")}));
}

TEST(Value, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double d = dist(rng);
    EXPECT_EQ(*parse_double(format_double(d)), d);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(Value, ParseValueByType) {
  EXPECT_TRUE(is_null(*parse_value("", DataType::Int64)));
  EXPECT_EQ(std::get<std::int64_t>(*parse_value("42", DataType::Int64)), 42);
  EXPECT_FALSE(parse_value("4x", DataType::Int64));
  EXPECT_EQ(std::get<GeoPoint>(*parse_value("53.1 -6.2", DataType::GeoPoint)).lon, -6.2);
  EXPECT_EQ(std::get<GeoPolygon>(*parse_value("1 2;3 4;5 6", DataType::GeoPolygon)).points.size(), 3u);
}
