#include "adw/sql/parser.hpp"

#include <cctype>
#include <set>

#include "adw/strings.hpp"

namespace adw::sql {

std::string_view to_string(CompareOp op) noexcept {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "<>";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::Where: return "Where";
    case Command::GroupBy: return "Group by";
    case Command::Having: return "Having";
    case Command::OuterJoin: return "Left (right) Join";
    case Command::Union: return "Union";
    case Command::OrderBy: return "Order by";
  }
  return "?";
}

std::vector<Command> commands_used(const QueryAst& q) {
  bool where = false, group = false, having = false, join = false;
  for (const auto& b : q.branches) {
    where = where || b.where != nullptr;
    group = group || !b.group_by.empty();
    having = having || b.having != nullptr;
    for (const auto& t : b.from) {
      join = join || t.join == JoinType::Left || t.join == JoinType::Right;
    }
  }
  std::vector<Command> out;
  if (where) out.push_back(Command::Where);
  if (group) out.push_back(Command::GroupBy);
  if (having) out.push_back(Command::Having);
  if (join) out.push_back(Command::OuterJoin);
  if (q.branches.size() > 1) out.push_back(Command::Union);
  if (!q.order_by.empty()) out.push_back(Command::OrderBy);
  return out;
}

std::string render(const AstExpr& e) {
  using K = AstExpr::Kind;
  switch (e.kind) {
    case K::Literal:
      if (const auto* s = std::get_if<std::string>(&e.value)) return "'" + *s + "'";
      return format_value(e.value, "NULL");
    case K::Identifier: return e.qualifier.empty() ? e.name : e.qualifier + "." + e.name;
    case K::Call: {
      std::string out = to_lower(e.name);
      for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      out += "(";
      if (e.star) out += "*";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        out += render(*e.args[i]);
      }
      return out + ")";
    }
    case K::Compare: return render(*e.args[0]) + " " + std::string(to_string(e.op)) + " " + render(*e.args[1]);
    case K::And: return render(*e.args[0]) + " AND " + render(*e.args[1]);
    case K::Or: return "(" + render(*e.args[0]) + " OR " + render(*e.args[1]) + ")";
    case K::Like: return render(*e.args[0]) + " LIKE " + render(*e.args[1]);
    case K::InList: {
      std::string out = render(*e.args[0]) + " IN (";
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        if (i > 1) out += ", ";
        out += render(*e.args[i]);
      }
      return out + ")";
    }
    case K::InSubquery: return render(*e.args[0]) + " IN (<subquery>)";
  }
  return "?";
}

namespace {

enum class Tok : std::uint8_t { End, Ident, Keyword, Int, Float, String, Symbol };

struct Token {
  Tok kind = Tok::End;
  std::string text;  ///< keywords upper-cased; symbols verbatim
  std::size_t offset = 0;
  bool quoted = false;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "SELECT", "DISTINCT", "FROM", "WHERE", "GROUP", "BY",    "HAVING", "ORDER", "ASC",   "DESC",
      "LIMIT",  "UNION",    "ALL",  "AND",   "OR",    "LIKE",  "IN",     "AS",    "JOIN",  "LEFT",
      "RIGHT",  "INNER",    "OUTER", "ON",   "TRUE",  "FALSE", "NOT",    "IS",    "NULL",  "BETWEEN",
      "EXISTS", "CASE",     "WITH", "INSERT", "UPDATE", "DELETE", "CREATE", "DROP", "FULL", "CROSS",
      "OFFSET", "INTERSECT", "EXCEPT", "OVER", "NATURAL", "USING",
  };
  return k;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.offset = pos_;
      if (pos_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      const char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          ++pos_;
        }
        t.text = std::string(text_.substr(start, pos_ - start));
        std::string upper = t.text;
        for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (keywords().count(upper)) {
          t.kind = Tok::Keyword;
          t.text = upper;
        } else {
          t.kind = Tok::Ident;
        }
      } else if (c == '`') {
        ++pos_;
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != '`') ++pos_;
        if (pos_ >= text_.size()) fail("unterminated backquoted identifier", t.offset);
        t.kind = Tok::Ident;
        t.quoted = true;
        t.text = std::string(text_.substr(start, pos_ - start));
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '.' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
        const std::size_t start = pos_;
        bool is_float = false;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
          is_float = true;
          ++pos_;
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
          is_float = true;
          ++pos_;
          if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        t.kind = is_float ? Tok::Float : Tok::Int;
        t.text = std::string(text_.substr(start, pos_ - start));
      } else if (c == '\'' || c == '"') {
        const char quote = c;
        ++pos_;
        std::string s;
        bool closed = false;
        while (pos_ < text_.size()) {
          if (text_[pos_] == quote) {
            if (pos_ + 1 < text_.size() && text_[pos_ + 1] == quote) {
              s += quote;
              pos_ += 2;
              continue;
            }
            ++pos_;
            closed = true;
            break;
          }
          s += text_[pos_++];
        }
        if (!closed) fail("unterminated string literal", t.offset);
        t.kind = Tok::String;
        t.text = std::move(s);
      } else {
        static constexpr std::string_view kTwo[] = {"<>", "<=", ">=", "!="};
        t.kind = Tok::Symbol;
        for (auto two : kTwo) {
          if (text_.substr(pos_, 2) == two) t.text = std::string(two);
        }
        if (t.text.empty()) {
          if (std::string_view(",.()*=<>;+-/%").find(c) == std::string_view::npos) {
            fail(std::string("unexpected character '") + c + "'", pos_);
          }
          t.text = std::string(1, c);
        }
        pos_ += t.text.size();
      }
      out.push_back(std::move(t));
    }
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t offset) const;

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_.substr(pos_, 2) == "--") {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void Lexer::fail(const std::string& msg, std::size_t offset) const {
  auto [line, col] = line_col(text_, offset);
  throw SyntaxError(msg, line, col, offset);
}

class Parser {
 public:
  Parser(std::string_view text, std::vector<Token> tokens) : text_(text), toks_(std::move(tokens)) {}

  QueryAst parse_top() {
    QueryAst q = parse_query();
    accept_symbol(";");
    if (cur().kind != Tok::End) fail("unexpected '" + describe(cur()) + "' after end of query");
    return q;
  }

 private:
  // -- token helpers -------------------------------------------------------
  const Token& cur() const { return toks_[i_]; }
  const Token& ahead(std::size_t n = 1) const { return toks_[std::min(i_ + n, toks_.size() - 1)]; }
  void advance() {
    if (i_ + 1 < toks_.size()) ++i_;
  }
  bool is_kw(const char* kw) const { return cur().kind == Tok::Keyword && cur().text == kw; }
  bool is_symbol(std::string_view s) const { return cur().kind == Tok::Symbol && cur().text == s; }
  bool accept_kw(const char* kw) {
    if (!is_kw(kw)) return false;
    advance();
    return true;
  }
  bool accept_symbol(std::string_view s) {
    if (!is_symbol(s)) return false;
    advance();
    return true;
  }
  void expect_kw(const char* kw) {
    if (!accept_kw(kw)) fail(std::string("expected ") + kw + ", found '" + describe(cur()) + "'");
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s)) fail("expected '" + std::string(s) + "', found '" + describe(cur()) + "'");
  }
  static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }

  [[noreturn]] void fail(const std::string& msg) const {
    auto [line, col] = line_col(text_, cur().offset);
    throw SyntaxError(msg, line, col, cur().offset);
  }
  [[noreturn]] void unsupported(const std::string& construct) const {
    auto [line, col] = line_col(text_, cur().offset);
    throw UnsupportedError(construct, line, col, cur().offset);
  }

  void reject_unsupported_keyword() const {
    if (cur().kind != Tok::Keyword) return;
    static const std::set<std::string> k = {"NOT",    "IS",     "NULL",   "BETWEEN", "EXISTS",    "CASE",
                                            "WITH",   "INSERT", "UPDATE", "DELETE",  "CREATE",    "DROP",
                                            "FULL",   "CROSS",  "OFFSET", "INTERSECT", "EXCEPT", "OVER",
                                            "NATURAL", "USING"};
    if (k.count(cur().text)) unsupported(cur().text);
  }

  std::string expect_ident(const char* what) {
    if (cur().kind != Tok::Ident) {
      reject_unsupported_keyword();
      fail(std::string("expected ") + what + ", found '" + describe(cur()) + "'");
    }
    std::string s = cur().text;
    advance();
    return s;
  }

  // -- grammar -------------------------------------------------------------
  QueryAst parse_query() {
    reject_unsupported_keyword();
    QueryAst q;
    q.branches.push_back(parse_core());
    while (accept_kw("UNION")) {
      q.union_all.push_back(accept_kw("ALL"));
      q.branches.push_back(parse_core());
    }
    if (accept_kw("ORDER")) {
      expect_kw("BY");
      do {
        OrderItem item;
        item.expr = parse_expr();
        if (accept_kw("DESC")) {
          item.descending = true;
        } else {
          accept_kw("ASC");
        }
        q.order_by.push_back(std::move(item));
      } while (accept_symbol(","));
    }
    if (accept_kw("LIMIT")) {
      if (cur().kind != Tok::Int) fail("expected integer after LIMIT");
      q.limit = *parse_int64(cur().text);
      advance();
      if (is_symbol(",") || is_kw("OFFSET")) unsupported("LIMIT offset");
    }
    reject_unsupported_keyword();
    return q;
  }

  SelectCore parse_core() {
    expect_kw("SELECT");
    SelectCore core;
    if (accept_kw("DISTINCT")) core.distinct = true;
    if (accept_kw("ALL")) {
    }
    do {
      SelectItem item;
      if (accept_symbol("*")) {
        item.star = true;
      } else {
        item.expr = parse_expr();
        if (accept_kw("AS")) {
          item.alias = expect_ident("alias");
        } else if (cur().kind == Tok::Ident) {
          item.alias = cur().text;
          advance();
        }
      }
      core.items.push_back(std::move(item));
    } while (accept_symbol(","));

    expect_kw("FROM");
    core.from.push_back(parse_table_ref(JoinType::Comma));
    while (true) {
      if (accept_symbol(",")) {
        core.from.push_back(parse_table_ref(JoinType::Comma));
        continue;
      }
      JoinType jt;
      if (accept_kw("LEFT")) {
        accept_kw("OUTER");
        jt = JoinType::Left;
      } else if (accept_kw("RIGHT")) {
        accept_kw("OUTER");
        jt = JoinType::Right;
      } else if (accept_kw("INNER")) {
        jt = JoinType::Inner;
      } else if (is_kw("JOIN")) {
        jt = JoinType::Inner;
      } else {
        reject_unsupported_keyword();
        break;
      }
      expect_kw("JOIN");
      TableRef ref = parse_table_ref(jt);
      expect_kw("ON");
      ref.on = parse_expr();
      core.from.push_back(std::move(ref));
    }

    if (accept_kw("WHERE")) core.where = parse_expr();
    if (accept_kw("GROUP")) {
      expect_kw("BY");
      do {
        core.group_by.push_back(parse_expr());
      } while (accept_symbol(","));
    }
    if (accept_kw("HAVING")) core.having = parse_expr();
    return core;
  }

  TableRef parse_table_ref(JoinType jt) {
    TableRef ref;
    ref.join = jt;
    ref.position = cur().offset;
    if (accept_symbol("(")) {
      if (!is_kw("SELECT")) fail("expected SELECT in derived table");
      ref.derived = std::make_shared<QueryAst>(parse_query());
      expect_symbol(")");
      accept_kw("AS");
      ref.alias = expect_ident("derived table alias");
      return ref;
    }
    ref.table = expect_ident("table name");
    if (accept_kw("AS")) {
      ref.alias = expect_ident("table alias");
    } else if (cur().kind == Tok::Ident) {
      ref.alias = cur().text;
      advance();
    }
    return ref;
  }

  AstExprPtr make(AstExpr::Kind k, std::size_t pos) {
    auto e = std::make_shared<AstExpr>();
    e->kind = k;
    e->position = pos;
    return e;
  }

  AstExprPtr parse_expr() { return parse_or(); }

  AstExprPtr parse_or() {
    auto left = parse_and();
    while (is_kw("OR")) {
      const std::size_t pos = cur().offset;
      advance();
      auto e = make(AstExpr::Kind::Or, pos);
      e->args = {left, parse_and()};
      left = e;
    }
    return left;
  }

  AstExprPtr parse_and() {
    auto left = parse_predicate();
    while (is_kw("AND")) {
      const std::size_t pos = cur().offset;
      advance();
      auto e = make(AstExpr::Kind::And, pos);
      e->args = {left, parse_predicate()};
      left = e;
    }
    return left;
  }

  AstExprPtr parse_predicate() {
    if (is_kw("NOT")) unsupported("NOT");
    auto left = parse_operand();
    const std::size_t pos = cur().offset;
    static const std::pair<std::string_view, CompareOp> kOps[] = {
        {"=", CompareOp::Eq},  {"<>", CompareOp::Ne}, {"!=", CompareOp::Ne}, {"<", CompareOp::Lt},
        {"<=", CompareOp::Le}, {">", CompareOp::Gt},  {">=", CompareOp::Ge},
    };
    for (const auto& [sym, op] : kOps) {
      if (is_symbol(sym)) {
        advance();
        auto e = make(AstExpr::Kind::Compare, pos);
        e->op = op;
        e->args = {left, parse_operand()};
        return e;
      }
    }
    if (accept_kw("LIKE")) {
      auto e = make(AstExpr::Kind::Like, pos);
      e->args = {left, parse_operand()};
      return e;
    }
    if (accept_kw("IN")) {
      expect_symbol("(");
      if (is_kw("SELECT")) {
        auto e = make(AstExpr::Kind::InSubquery, pos);
        e->args = {left};
        e->subquery = std::make_shared<QueryAst>(parse_query());
        expect_symbol(")");
        return e;
      }
      auto e = make(AstExpr::Kind::InList, pos);
      e->args = {left};
      do {
        e->args.push_back(parse_operand());
      } while (accept_symbol(","));
      expect_symbol(")");
      return e;
    }
    if (is_kw("NOT") || is_kw("IS") || is_kw("BETWEEN")) unsupported(cur().text);
    if (is_symbol("+") || is_symbol("-") || is_symbol("/") || is_symbol("%") || is_symbol("*")) {
      unsupported("arithmetic");
    }
    return left;
  }

  AstExprPtr parse_operand() {
    const Token& t = cur();
    const std::size_t pos = t.offset;
    if (is_symbol("-") && (ahead().kind == Tok::Int || ahead().kind == Tok::Float)) {
      advance();
      auto e = parse_number_literal(pos);
      if (auto* i = std::get_if<std::int64_t>(&e->value)) *i = -*i;
      if (auto* d = std::get_if<double>(&e->value)) *d = -*d;
      return e;
    }
    if (t.kind == Tok::Int || t.kind == Tok::Float) return parse_number_literal(pos);
    if (t.kind == Tok::String) {
      auto e = make(AstExpr::Kind::Literal, pos);
      e->value = t.text;
      advance();
      return e;
    }
    if (is_kw("TRUE") || is_kw("FALSE")) {
      auto e = make(AstExpr::Kind::Literal, pos);
      e->value = is_kw("TRUE");
      advance();
      return e;
    }
    if (is_symbol("(")) {
      advance();
      if (is_kw("SELECT")) unsupported("scalar subquery");
      auto e = parse_expr();
      expect_symbol(")");
      return e;
    }
    if (t.kind == Tok::Ident) {
      const std::string first = t.text;
      const bool quoted = t.quoted;
      advance();
      if (!quoted && is_symbol("(")) {
        advance();
        auto e = make(AstExpr::Kind::Call, pos);
        e->name = first;
        if (accept_symbol("*")) {
          e->star = true;
        } else if (!is_symbol(")")) {
          if (accept_kw("DISTINCT")) unsupported("DISTINCT aggregate");
          do {
            e->args.push_back(parse_expr());
          } while (accept_symbol(","));
        }
        expect_symbol(")");
        return e;
      }
      auto e = make(AstExpr::Kind::Identifier, pos);
      if (accept_symbol(".")) {
        e->qualifier = first;
        if (is_symbol("*")) unsupported("qualified *");
        e->name = expect_ident("column name");
      } else {
        e->name = first;
      }
      return e;
    }
    reject_unsupported_keyword();
    fail("expected expression, found '" + describe(t) + "'");
  }

  AstExprPtr parse_number_literal(std::size_t pos) {
    auto e = make(AstExpr::Kind::Literal, pos);
    if (cur().kind == Tok::Int) {
      auto v = parse_int64(cur().text);
      if (!v) fail("integer literal out of range");
      e->value = *v;
    } else {
      auto v = parse_double(cur().text);
      if (!v) fail("bad numeric literal");
      e->value = *v;
    }
    advance();
    return e;
  }

  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace

QueryAst parse(std::string_view text) {
  Lexer lexer(text);
  return Parser(text, lexer.run()).parse_top();
}

}  // namespace adw::sql
