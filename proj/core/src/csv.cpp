#include "geodex/csv.hpp"

#include <array>
#include <charconv>

#include "geodex/errors.hpp"

namespace geodex {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return {buf.data(), r.ptr};
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), header_(std::move(header)) {
  if (header_.empty()) throw ConfigError("CSV header is empty");
  std::string line;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) line += ',';
    line += header_[i];
  }
  out_ << line << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  if (static_cast<int>(values.size()) != columns()) throw ConfigError("CSV row width does not match the header");
  line_.clear();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line_ += ',';
    line_ += format_double(values[i]);
  }
  out_ << line_ << '\n';
}

}  // namespace geodex
