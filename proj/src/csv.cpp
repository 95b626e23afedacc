#include "adw/csv.hpp"

#include "adw/error.hpp"

namespace adw::csv {

bool Reader::next(std::vector<std::string>& fields) {
  fields.clear();
  if (pos_ >= text_.size()) return false;
  record_line_ = line_;

  std::string field;
  std::size_t col = 1;
  while (true) {
    if (pos_ < text_.size() && text_[pos_] == '"') {
      const std::size_t quote_line = line_;
      const std::size_t quote_col = col;
      ++pos_;
      ++col;
      bool closed = false;
      while (pos_ < text_.size()) {
        const char c = text_[pos_];
        if (c == '"') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            field += '"';
            pos_ += 2;
            col += 2;
            continue;
          }
          ++pos_;
          ++col;
          closed = true;
          break;
        }
        if (c == '\n') {
          ++line_;
          col = 0;
        }
        field += c;
        ++pos_;
        ++col;
      }
      if (!closed) throw ParseError("unterminated quoted field", quote_line, quote_col);
      if (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '\n' && text_[pos_] != '\r') {
        throw ParseError("unexpected character after closing quote", line_, col);
      }
    } else {
      while (pos_ < text_.size()) {
        const char c = text_[pos_];
        if (c == ',' || c == '\n' || c == '\r') break;
        if (c == '"') throw ParseError("quote inside unquoted field", line_, col);
        field += c;
        ++pos_;
        ++col;
      }
    }
    fields.push_back(std::move(field));
    field.clear();

    if (pos_ >= text_.size()) break;
    const char c = text_[pos_];
    if (c == ',') {
      ++pos_;
      ++col;
      continue;
    }
    if (c == '\r') ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
    ++line_;
    break;
  }
  return true;
}

void append_field(std::string& out, std::string_view field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) {
    out += field;
    return;
  }
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

void append_record(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    append_field(out, fields[i]);
  }
  out += '\n';
}

std::vector<std::vector<std::string>> parse(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  Reader reader(text);
  std::vector<std::string> fields;
  while (reader.next(fields)) out.push_back(fields);
  return out;
}

}  // namespace adw::csv
