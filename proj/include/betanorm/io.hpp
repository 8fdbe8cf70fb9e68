#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "betanorm/series.hpp"
#include "json.hpp"

// Serialization helpers: JSON dumps of coefficient vectors and a CSV writer
// with round-trip (17 significant digit) formatting.
namespace betanorm::io {

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// JSON value for a double; non-finite values become null.
inline nlohmann::json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

template <class T>
nlohmann::json to_json(const series::SeriesCoeffs<T>& c) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const T& v : c.coeffs) coeffs.push_back(number(static_cast<double>(v)));
  return {{"kind", std::string(series::to_string(c.kind))},
          {"order", c.truncation_order},
          {"coefficients", coeffs}};
}

// A CSV cell: a number (printed with 17 significant digits) or a label.
using Cell = std::variant<double, std::string>;

inline std::string format_cell(const Cell& c) {
  if (const auto* x = std::get_if<double>(&c)) return format_number(*x);
  return std::get<std::string>(c);
}

// Comma-separated rows with a header line and LF endings.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), width_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << '\n';
  }

  void row(const std::vector<Cell>& cells) {
    if (cells.size() != width_) throw std::invalid_argument("CsvWriter: row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << format_cell(cells[i]);
    os_ << '\n';
  }

 private:
  std::ostream& os_;
  std::size_t width_;
};

}  // namespace betanorm::io
