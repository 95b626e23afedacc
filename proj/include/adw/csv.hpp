#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace adw::csv {

/// Incremental RFC-4180 reader over an in-memory document.
///
/// Fields may be quoted with `"`; a doubled quote inside a quoted field is a
/// literal quote. Records end at LF or CRLF. Line numbers are 1-based and
/// refer to the physical line on which a record starts.
class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  /// Throws ParseError on an unterminated quote or stray characters after a
  /// closing quote.
  bool next(std::vector<std::string>& fields);

  std::size_t record_line() const noexcept { return record_line_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

/// Appends one record, quoting fields that contain separators, quotes or line breaks.
void append_record(std::string& out, const std::vector<std::string>& fields);
void append_field(std::string& out, std::string_view field);

std::vector<std::vector<std::string>> parse(std::string_view text);

}  // namespace adw::csv
