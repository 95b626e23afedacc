#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "adw/error.hpp"
#include "adw/sql/ast.hpp"

namespace adw::sql {

/// Syntax error in query text. `offset` is the byte position of the
/// offending token.
class SyntaxError : public ParseError {
 public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t column, std::size_t offset)
      : ParseError(what, line, column), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Query uses SQL outside the supported subset.
class UnsupportedError : public SyntaxError {
 public:
  UnsupportedError(const std::string& construct, std::size_t line, std::size_t column, std::size_t offset)
      : SyntaxError("unsupported construct: " + construct, line, column, offset), construct_(construct) {}
  const std::string& construct() const noexcept { return construct_; }

 private:
  std::string construct_;
};

/// Parses the supported SELECT subset. Keywords are case-insensitive and
/// identifiers may be backquoted. A trailing `;` is accepted.
QueryAst parse(std::string_view text);

}  // namespace adw::sql
