#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace earlywarn::detail {

// Streaming reader for comma-separated files with a header row. Handles
// double-quoted fields (with "" escapes), CRLF line endings and a UTF-8 BOM.
class CsvReader {
 public:
  // Throws MissingFile when the path cannot be opened.
  explicit CsvReader(const std::filesystem::path& path);

  const std::vector<std::string>& header() const { return header_; }
  // Column index by header name; throws SchemaError when absent.
  std::size_t column(std::string_view name) const;
  // Throws SchemaError unless every name is present.
  void require_columns(std::initializer_list<std::string_view> names) const;

  // Next data row; false at end of file. Blank lines are skipped.
  bool next();
  std::string_view field(std::size_t index) const;
  std::size_t field_count() const { return fields_.size(); }
  std::size_t line_number() const { return line_number_; }
  const std::string& file_name() const { return file_name_; }

  // Integer field; throws ParseError naming the file, line and column.
  std::int32_t integer(std::size_t index) const;

 private:
  void split_line();

  std::ifstream stream_;
  std::string file_name_;
  std::string line_;
  std::string unquoted_;
  std::vector<std::string> header_;
  std::vector<std::string_view> fields_;
  std::vector<std::pair<std::size_t, std::size_t>> spans_;
  std::size_t line_number_ = 0;
  std::vector<char> buffer_;
};

}  // namespace earlywarn::detail
