#include "adw/sql/expr.hpp"

namespace adw::sql {

namespace {

std::size_t utf8_length(unsigned char lead) noexcept {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

}  // namespace

bool like_match(std::string_view text, std::string_view pattern) noexcept {
  std::size_t t = 0, p = 0;
  std::size_t star_p = std::string_view::npos, star_t = 0;
  while (t < text.size()) {
    if (p < pattern.size() && pattern[p] == '%') {
      star_p = ++p;
      star_t = t;
      continue;
    }
    if (p < pattern.size() && pattern[p] == '_') {
      t += utf8_length(static_cast<unsigned char>(text[t]));
      ++p;
      continue;
    }
    if (p < pattern.size() && pattern[p] == text[t]) {
      ++p;
      ++t;
      continue;
    }
    if (star_p == std::string_view::npos) return false;
    star_t += utf8_length(static_cast<unsigned char>(text[star_t]));
    t = star_t;
    p = star_p;
  }
  while (p < pattern.size() && pattern[p] == '%') ++p;
  return p == pattern.size() && t == text.size();
}

bool same_expr(const Expr& a, const Expr& b) noexcept {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Literal:
      if (a.literal.index() != b.literal.index() || !equal_total(a.literal, b.literal)) return false;
      break;
    case Expr::Kind::Column:
      if (a.source != b.source || a.column != b.column) return false;
      break;
    case Expr::Kind::Compare:
      if (a.op != b.op) return false;
      break;
    case Expr::Kind::Like:
      if (a.pattern != b.pattern) return false;
      break;
    case Expr::Kind::InList:
      if (a.list.size() != b.list.size()) return false;
      for (std::size_t i = 0; i < a.list.size(); ++i) {
        if (!equal_total(a.list[i], b.list[i])) return false;
      }
      break;
    case Expr::Kind::InSubquery:
      if (a.subquery != b.subquery) return false;
      break;
    default:
      break;
  }
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!same_expr(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

namespace {

std::string quote(const Value& v) {
  if (is_null(v)) return "NULL";
  if (std::holds_alternative<std::string>(v) || std::holds_alternative<Date>(v)) {
    std::string s = "'";
    for (char c : format_value(v)) {
      s += c;
      if (c == '\'') s += '\'';
    }
    return s + "'";
  }
  return format_value(v);
}

}  // namespace

std::string render_expr(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::Literal: return quote(e.literal);
    case K::Column:
      return e.label.empty() ? "#" + std::to_string(e.source) + "." + std::to_string(e.column) : e.label;
    case K::Compare:
      return render_expr(*e.args[0]) + " " + std::string(to_string(e.op)) + " " + render_expr(*e.args[1]);
    case K::And: return "(" + render_expr(*e.args[0]) + " AND " + render_expr(*e.args[1]) + ")";
    case K::Or: return "(" + render_expr(*e.args[0]) + " OR " + render_expr(*e.args[1]) + ")";
    case K::Like: return render_expr(*e.args[0]) + " LIKE " + quote(Value{e.pattern});
    case K::InList: {
      std::string s = render_expr(*e.args[0]) + " IN (";
      for (std::size_t i = 0; i < e.list.size(); ++i) {
        if (i) s += ", ";
        s += quote(e.list[i]);
      }
      return s + ")";
    }
    case K::InSubquery: return render_expr(*e.args[0]) + " IN (subquery)";
    case K::Year: return "YEAR(" + render_expr(*e.args[0]) + ")";
    case K::Month: return "MONTH(" + render_expr(*e.args[0]) + ")";
  }
  return {};
}

}  // namespace adw::sql
