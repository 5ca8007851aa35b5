#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "citefair/error.hpp"

namespace citefair {

/// Streaming reader for delimiter-separated text with a mandatory header.
/// Columns are addressed by header name. Lines starting with '#' before the
/// header are kept as comments. Blank lines are skipped; every other line
/// must carry exactly as many fields as the header.
class TabularReader {
 public:
  TabularReader(const std::filesystem::path& path, char delimiter);

  /// Advances to the next data row. Returns false at end of file.
  bool next();

  /// Index of a named header column; ParseError (line 1) when missing.
  [[nodiscard]] std::size_t column(std::string_view name) const;
  [[nodiscard]] bool has_column(std::string_view name) const;

  [[nodiscard]] std::string_view field(std::size_t column) const { return fields_[column]; }
  [[nodiscard]] std::size_t line() const noexcept { return line_no_; }
  [[nodiscard]] const std::string& path() const noexcept { return path_; }
  [[nodiscard]] const std::vector<std::string>& header() const noexcept { return header_; }
  [[nodiscard]] const std::vector<std::string>& comments() const noexcept { return comments_; }

  /// ParseError located at the current line.
  [[nodiscard]] ParseError error(const std::string& message) const;

  [[nodiscard]] std::int64_t integer(std::size_t column) const;
  [[nodiscard]] double real(std::size_t column) const;

 private:
  void split(std::string_view line);

  std::string path_;
  char delim_;
  std::ifstream in_;
  std::string buf_;
  std::vector<std::string> header_;
  std::vector<std::string> comments_;
  std::vector<std::string_view> fields_;
  std::size_t line_no_ = 0;
};

/// Buffered row writer; rejects fields that would break the line format.
class TabularWriter {
 public:
  TabularWriter(const std::filesystem::path& path, char delimiter);
  ~TabularWriter();

  TabularWriter(const TabularWriter&) = delete;
  TabularWriter& operator=(const TabularWriter&) = delete;

  void row(std::initializer_list<std::string_view> fields);
  void row(const std::vector<std::string>& fields);
  /// Writes a raw line (comment/provenance lines).
  void raw_line(std::string_view line);
  void close();

 private:
  void field(std::string_view f, bool first);
  void flush_if_large();

  std::string path_;
  char delim_;
  std::ofstream out_;
  std::string buf_;
};

}  // namespace citefair
