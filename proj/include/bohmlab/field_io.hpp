#ifndef BOHMLAB_FIELD_IO_HPP
#define BOHMLAB_FIELD_IO_HPP

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "bohmlab/grid.hpp"

namespace bohmlab::io {

// CSV layouts:
//   real field     x,value
//   complex field  x,re,im
// All numbers are written with 17 significant digits so a read-back is exact.

namespace detail {
inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}
}  // namespace detail

inline void write_csv(std::ostream& out, const RealField1D& f) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "x,value\n";
  for (std::size_t j = 0; j < f.size(); ++j) out << f.grid().x(j) << ',' << f[j] << '\n';
}

inline void write_csv(std::ostream& out, const ComplexField1D& f) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "x,re,im\n";
  for (std::size_t j = 0; j < f.size(); ++j) out << f.grid().x(j) << ',' << f[j].real() << ',' << f[j].imag() << '\n';
}

/// Generic table with a named header; every row must match the header width.
inline void write_table(const std::string& path, const std::vector<std::string>& header,
                        const std::vector<std::vector<double>>& rows) {
  auto out = detail::open_out(path);
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw Error(ErrorKind::io, "row width does not match header in " + path);
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
    out << '\n';
  }
}

template <class T>
void write_csv(const std::string& path, const Field1D<T>& f) {
  auto out = detail::open_out(path);
  write_csv(out, f);
}

/// Reads the table written by write_csv / write_table. Returns the header and rows.
inline std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::io, "empty CSV");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != header.size()) throw Error(ErrorKind::io, "ragged CSV row");
    rows.push_back(std::move(row));
  }
  return {header, rows};
}

/// Rebuilds a field from x,value or x,re,im CSV. The grid is reconstructed from
/// the first and last x.
template <class T>
Field1D<T> read_csv(std::istream& in) {
  auto [header, rows] = read_table(in);
  constexpr bool is_complex = std::is_same_v<T, complex>;
  if (header.size() != (is_complex ? 3u : 2u)) throw Error(ErrorKind::io, "unexpected CSV header width");
  if (rows.size() < 3) throw Error(ErrorKind::invalid_grid, "CSV holds fewer than 3 nodes");
  Grid1D grid(rows.front()[0], rows.back()[0], rows.size());
  std::vector<T> values(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if constexpr (is_complex)
      values[j] = complex(rows[j][1], rows[j][2]);
    else
      values[j] = rows[j][1];
  }
  return Field1D<T>(grid, std::move(values));
}

}  // namespace bohmlab::io

#endif  // BOHMLAB_FIELD_IO_HPP
