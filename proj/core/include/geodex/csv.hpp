#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace geodex {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// Comma-separated rows with a header line. Doubles use format_double, so
/// identical inputs give byte-identical files.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  void row(std::span<const double> values);
  void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }
  int columns() const noexcept { return static_cast<int>(header_.size()); }

 private:
  std::ostream& out_;
  std::vector<std::string> header_;
  std::string line_;
};

}  // namespace geodex
