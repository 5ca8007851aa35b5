#include "citefair/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <system_error>

#include <fmt/format.h>

namespace citefair {

TabularReader::TabularReader(const std::filesystem::path& path, char delimiter)
    : path_(path.string()), delim_(delimiter) {
  in_.open(path, std::ios::binary);
  if (!in_) throw Error(fmt::format("{}: cannot open file", path_));
  static constexpr std::size_t kBufferSize = 1 << 20;
  std::string header_line;
  do {
    if (!std::getline(in_, header_line)) throw ParseError(path_, 1, "missing header row");
    ++line_no_;
    if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();
    if (line_no_ == 1 && header_line.starts_with("\xEF\xBB\xBF")) header_line.erase(0, 3);
    if (header_line.starts_with('#')) {
      comments_.push_back(header_line);
      header_line.clear();
    }
  } while (header_line.empty());
  buf_.reserve(kBufferSize);
  split(header_line);
  for (auto f : fields_) header_.emplace_back(f);
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i].empty()) throw ParseError(path_, line_no_, "empty column name in header");
    for (std::size_t j = 0; j < i; ++j) {
      if (header_[j] == header_[i]) {
        throw ParseError(path_, line_no_, fmt::format("duplicate column '{}'", header_[i]));
      }
    }
  }
  fields_.clear();
}

void TabularReader::split(std::string_view line) {
  fields_.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim_, start);
    if (pos == std::string_view::npos) {
      fields_.push_back(line.substr(start));
      break;
    }
    fields_.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

bool TabularReader::next() {
  while (std::getline(in_, buf_)) {
    ++line_no_;
    if (!buf_.empty() && buf_.back() == '\r') buf_.pop_back();
    if (buf_.empty()) continue;
    split(buf_);
    if (fields_.size() != header_.size()) {
      throw error(fmt::format("expected {} columns, found {}", header_.size(), fields_.size()));
    }
    return true;
  }
  fields_.clear();
  return false;
}

bool TabularReader::has_column(std::string_view name) const {
  return std::find(header_.begin(), header_.end(), name) != header_.end();
}

std::size_t TabularReader::column(std::string_view name) const {
  auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) throw ParseError(path_, 1, fmt::format("missing column '{}'", name));
  return static_cast<std::size_t>(it - header_.begin());
}

ParseError TabularReader::error(const std::string& message) const {
  return ParseError(path_, line_no_, message);
}

std::int64_t TabularReader::integer(std::size_t column) const {
  const std::string_view s = fields_[column];
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw error(fmt::format("column '{}': '{}' is not an integer", header_[column], s));
  }
  return v;
}

double TabularReader::real(std::size_t column) const {
  const std::string_view s = fields_[column];
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw error(fmt::format("column '{}': '{}' is not a number", header_[column], s));
  }
  return v;
}

TabularWriter::TabularWriter(const std::filesystem::path& path, char delimiter)
    : path_(path.string()), delim_(delimiter) {
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error(fmt::format("{}: cannot open file for writing", path_));
  buf_.reserve(1 << 20);
}

TabularWriter::~TabularWriter() {
  try {
    close();
  } catch (...) {
  }
}

void TabularWriter::field(std::string_view f, bool first) {
  if (f.find(delim_) != std::string_view::npos || f.find('\n') != std::string_view::npos) {
    throw Error(fmt::format("{}: field '{}' contains the delimiter or a newline", path_, f));
  }
  if (!first) buf_.push_back(delim_);
  buf_.append(f);
}

void TabularWriter::row(std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (auto f : fields) {
    field(f, first);
    first = false;
  }
  buf_.push_back('\n');
  flush_if_large();
}

void TabularWriter::row(const std::vector<std::string>& fields) {
  bool first = true;
  for (const auto& f : fields) {
    field(f, first);
    first = false;
  }
  buf_.push_back('\n');
  flush_if_large();
}

void TabularWriter::raw_line(std::string_view line) {
  buf_.append(line);
  buf_.push_back('\n');
  flush_if_large();
}

void TabularWriter::flush_if_large() {
  if (buf_.size() >= (1 << 20)) {
    out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    buf_.clear();
  }
}

void TabularWriter::close() {
  if (!out_.is_open()) return;
  out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  buf_.clear();
  out_.close();
  if (out_.fail()) throw Error(fmt::format("{}: write failed", path_));
}

}  // namespace citefair
