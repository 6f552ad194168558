#pragma once

#include <stdexcept>
#include <string>

namespace lbm {

/// Sufficient statistics that cannot have come from valid data.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A closed-form quantity left its domain (non-positive log argument, non-finite result).
class NumericalDegeneracy : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input text. Row and column are 1-based; 0 means "not applicable".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int row = 0, int col = 0)
      : std::runtime_error(format(what, row, col)), row_(row), col_(col) {}

  int row() const { return row_; }
  int col() const { return col_; }

 private:
  static std::string format(const std::string& what, int row, int col) {
    if (row == 0) return what;
    std::string at = "line " + std::to_string(row);
    if (col > 0) at += ", field " + std::to_string(col);
    return at + ": " + what;
  }

  int row_;
  int col_;
};

}  // namespace lbm
