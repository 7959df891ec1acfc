#include "ingest/csv_reader.hpp"

#include <algorithm>

#include "earlywarn/error.hpp"

namespace earlywarn::detail {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

CsvReader::CsvReader(const std::filesystem::path& path)
    : file_name_(path.filename().string()), buffer_(1 << 20) {
  stream_.rdbuf()->pubsetbuf(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  stream_.open(path, std::ios::binary);
  if (!stream_) throw Error(ErrorCode::MissingFile, path.string());

  if (!std::getline(stream_, line_)) {
    throw Error(ErrorCode::SchemaError, file_name_ + ": empty file, header row expected");
  }
  line_number_ = 1;
  if (line_.size() >= 3 && static_cast<unsigned char>(line_[0]) == 0xEF &&
      static_cast<unsigned char>(line_[1]) == 0xBB && static_cast<unsigned char>(line_[2]) == 0xBF) {
    line_.erase(0, 3);
  }
  split_line();
  for (auto f : fields_) header_.emplace_back(trim(f));
}

std::size_t CsvReader::column(std::string_view name) const {
  const auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) {
    throw Error(ErrorCode::SchemaError,
                file_name_ + ": missing column '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - header_.begin());
}

void CsvReader::require_columns(std::initializer_list<std::string_view> names) const {
  for (auto n : names) column(n);
}

bool CsvReader::next() {
  while (std::getline(stream_, line_)) {
    ++line_number_;
    if (trim(line_).empty()) continue;
    split_line();
    if (fields_.size() != header_.size()) {
      throw Error(ErrorCode::ParseError, file_name_ + ":" + std::to_string(line_number_) +
                                             ": expected " + std::to_string(header_.size()) +
                                             " fields, found " + std::to_string(fields_.size()));
    }
    return true;
  }
  return false;
}

std::string_view CsvReader::field(std::size_t index) const { return trim(fields_.at(index)); }

std::int32_t CsvReader::integer(std::size_t index) const {
  const std::string_view text = field(index);
  std::int32_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ParseError, file_name_ + ":" + std::to_string(line_number_) +
                                           ": column '" + header_.at(index) +
                                           "' is not an integer: '" + std::string(text) + "'");
  }
  return value;
}

void CsvReader::split_line() {
  fields_.clear();
  if (line_.find('"') == std::string::npos) {
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line_.find(',', start);
      if (comma == std::string::npos) {
        fields_.emplace_back(line_.data() + start, line_.size() - start);
        break;
      }
      fields_.emplace_back(line_.data() + start, comma - start);
      start = comma + 1;
    }
    return;
  }

  // Quoted path: unquote into a side buffer, then take views into it.
  unquoted_.clear();
  unquoted_.reserve(line_.size());
  spans_.clear();
  std::size_t field_start = 0;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line_.size(); ++i) {
    const char ch = line_[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < line_.size() && line_[i + 1] == '"') {
          unquoted_.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        unquoted_.push_back(ch);
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      spans_.emplace_back(field_start, unquoted_.size() - field_start);
      field_start = unquoted_.size();
    } else {
      unquoted_.push_back(ch);
    }
  }
  spans_.emplace_back(field_start, unquoted_.size() - field_start);
  for (auto [offset, length] : spans_) fields_.emplace_back(unquoted_.data() + offset, length);
}

}  // namespace earlywarn::detail
