#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "citefair/model.hpp"

namespace citefair {

/// Base for problems with user-supplied input or data (as opposed to bugs).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& message);

  [[nodiscard]] const std::string& file() const noexcept { return file_; }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);

  [[nodiscard]] const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

}  // namespace citefair
