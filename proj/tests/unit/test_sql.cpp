#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "adw/schema.hpp"
#include "adw/sql/expr.hpp"
#include "adw/sql/parser.hpp"
#include "adw/sql/plan.hpp"
#include "adw/workload.hpp"

using namespace adw;
using namespace adw::sql;

namespace {

// Dynamic-programming reference for LIKE over code points.
std::vector<std::u32string::value_type> decode(const std::string& s) {
  std::vector<char32_t> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    const std::size_t n = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
    char32_t cp = n == 1 ? c : n == 2 ? (c & 0x1F) : n == 3 ? (c & 0x0F) : (c & 0x07);
    for (std::size_t k = 1; k < n; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += n;
  }
  return out;
}

bool like_reference(const std::string& text, const std::string& pattern) {
  const auto t = decode(text);
  const auto p = decode(pattern);
  std::vector<std::vector<bool>> dp(p.size() + 1, std::vector<bool>(t.size() + 1, false));
  dp[0][0] = true;
  for (std::size_t i = 1; i <= p.size(); ++i) {
    if (p[i - 1] == U'%') dp[i][0] = dp[i - 1][0];
    for (std::size_t j = 1; j <= t.size(); ++j) {
      if (p[i - 1] == U'%') {
        dp[i][j] = dp[i - 1][j] || dp[i][j - 1];
      } else if (p[i - 1] == U'_' || p[i - 1] == t[j - 1]) {
        dp[i][j] = dp[i - 1][j - 1];
      }
    }
  }
  return dp[p.size()][t.size()];
}

}  // namespace

TEST(Like, MatchesReferenceOnRandomInputs) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> text_atoms{"a", "b", "N", "é", "%", "_"};
  const std::vector<std::string> pat_atoms{"a", "b", "N", "é", "%", "_", "%", "_"};
  for (int iter = 0; iter < 20000; ++iter) {
    std::string text;
    std::string pattern;
    const int tl = static_cast<int>(rng() % 8);
    const int pl = static_cast<int>(rng() % 6);
    for (int i = 0; i < tl; ++i) text += text_atoms[rng() % text_atoms.size()];
    for (int i = 0; i < pl; ++i) pattern += pat_atoms[rng() % pat_atoms.size()];
    ASSERT_EQ(like_match(text, pattern), like_reference(text, pattern)) << "'" << text << "' LIKE '" << pattern << "'";
  }
}

TEST(Like, Examples) {
  EXPECT_TRUE(like_match("Nitrogen", "%N%"));
  EXPECT_TRUE(like_match("Potato", "P%"));
  EXPECT_FALSE(like_match("potato", "P%"));
  EXPECT_TRUE(like_match("", "%"));
  EXPECT_FALSE(like_match("", "_"));
  EXPECT_TRUE(like_match("é", "_"));
}

TEST(Parser, SyntaxErrorCarriesPosition) {
  try {
    parse("SELECT a FROM t WHERE");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_GT(e.column(), 1u);
  }
  try {
    parse("SELECT a\nFROM t\nWHERE x = = 1");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 11u);
  }
}

TEST(Parser, RejectsUnsupportedConstructs) {
  EXPECT_THROW(parse("INSERT INTO t VALUES (1)"), SyntaxError);
  EXPECT_THROW(parse("SELECT a FROM t; SELECT b FROM t"), SyntaxError);
}

TEST(Parser, KeywordsAreCaseInsensitive) {
  const auto a = parse("select CropName from crop where EstYield > 1 order by CropName");
  const auto b = parse("SELECT CropName FROM crop WHERE EstYield > 1 ORDER BY CropName");
  EXPECT_EQ(commands_used(a), commands_used(b));
}

TEST(Planner, BindErrors) {
  const auto s = builtin_adw_schema();
  EXPECT_THROW(plan("SELECT Nope FROM crop", s), BindError);
  EXPECT_THROW(plan("SELECT CropName FROM nowhere", s), BindError);
  EXPECT_THROW(plan("SELECT CropID FROM crop, salefact", s), BindError);  // ambiguous
  EXPECT_THROW(plan("SELECT crop.CropName FROM crop WHERE crop.CropName > 1 AND x.y = 2", s), BindError);
}

TEST(Planner, ExplainIsDeterministicAndTagged) {
  const auto s = builtin_adw_schema();
  for (const auto& q : builtin_workload()) {
    auto p1 = plan(q.sql, s);
    auto p2 = plan(q.sql, s);
    EXPECT_EQ(explain(p1), explain(p2)) << q.id;
    EXPECT_EQ(explain(p1).rfind("path=", 0), 0u);
  }
}

TEST(Planner, OuterJoinAndSubqueryFlags) {
  const auto s = builtin_adw_schema();
  EXPECT_TRUE(plan("SELECT crop.CropName FROM crop LEFT JOIN inspection ON crop.CropID = inspection.CropID", s)
                  .has_outer_join());
  EXPECT_FALSE(plan("SELECT CropName FROM crop", s).has_outer_join());
}

TEST(Workload, FiftyQueriesFivePerGroup) {
  const auto& w = builtin_workload();
  ASSERT_EQ(w.size(), 50u);
  std::vector<int> per_group(11, 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_EQ(w[i].number, static_cast<int>(i) + 1);
    EXPECT_EQ(w[i].id, "q" + std::to_string(i + 1));
    ASSERT_GE(w[i].group, 1);
    ASSERT_LE(w[i].group, 10);
    ++per_group[static_cast<std::size_t>(w[i].group)];
    EXPECT_EQ(w[i].representative, w[i].number % 5 == 0);
  }
  for (int g = 1; g <= 10; ++g) EXPECT_EQ(per_group[static_cast<std::size_t>(g)], 5) << g;
}

TEST(Workload, CommandSetsMatchGroupRows) {
  for (const auto& q : builtin_workload()) EXPECT_EQ(commands_used(parse(q.sql)), group_commands(q.group)) << q.id;
}

TEST(Workload, GroupRows) {
  using C = Command;
  EXPECT_EQ(group_commands(3), (std::vector<C>{C::Where, C::OuterJoin}));
  EXPECT_EQ(group_commands(10), (std::vector<C>{C::Where, C::GroupBy, C::Having, C::Union, C::OrderBy}));
  EXPECT_EQ(builtin_workload()[49].group, 10);
}

TEST(Workload, CorpusHoldsRepresentativesThenExamples) {
  const auto c = corpus_queries();
  ASSERT_EQ(c.size(), 14u);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(c[static_cast<std::size_t>(i)].first, "q" + std::to_string(5 * (i + 1)));
  EXPECT_EQ(c[10].first, "example1");
  EXPECT_EQ(c[13].first, "example4");
}
