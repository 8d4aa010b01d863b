#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"

namespace czkit {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// CSV layout: header `axis0,...,axis{n-1},value`, one sample per line in
// row-major order (axis 0 slowest), values with 17 significant digits.
inline void write_csv(const grid_function& u, std::ostream& out) {
  const int n = u.g.dim();
  for (int d = 0; d < n; ++d) out << "axis" << d << ",";
  out << "value\n";
  const std::int64_t total = u.g.total();
  for (std::int64_t i = 0; i < total; ++i) {
    vec3 x = u.g.midpoint(i);
    for (int d = 0; d < n; ++d) out << format_double(x[d]) << ",";
    out << format_double(u.values[i]) << "\n";
  }
}

inline void write_csv(const grid_function& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  write_csv(u, out);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

} // namespace detail

// Reads a sample table back into a grid_function, reconstructing the grid.
// The samples must form a complete row-major midpoint lattice with one
// spacing on every axis.
inline grid_function read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty input");
  auto header = detail::split_csv_line(line);
  if (header.size() < 2 || header.back() != "value")
    throw std::runtime_error("read_csv: expected header axis0,...,value");
  const int n = static_cast<int>(header.size()) - 1;
  if (n > 3) throw std::runtime_error("read_csv: dimension must be 1..3");
  for (int d = 0; d < n; ++d)
    if (header[d] != "axis" + std::to_string(d))
      throw std::runtime_error("read_csv: bad header column " + header[d]);

  std::vector<std::array<double, 3>> coords;
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (static_cast<int>(cells.size()) != n + 1)
      throw std::runtime_error("read_csv: row with wrong column count");
    std::array<double, 3> x{};
    for (int d = 0; d < n; ++d) x[d] = std::stod(cells[d]);
    coords.push_back(x);
    vals.push_back(std::stod(cells[n]));
  }
  if (vals.empty()) throw std::runtime_error("read_csv: no samples");

  // Distinct sorted coordinates per axis give the lattice; spacing comes from
  // the densest axis (all axes share it).
  std::array<std::vector<double>, 3> axes;
  for (int d = 0; d < n; ++d) {
    std::vector<double> c;
    c.reserve(coords.size());
    for (auto& x : coords) c.push_back(x[d]);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end(),
                        [](double a, double b) { return std::fabs(a - b) < 1e-12 * (1 + std::fabs(a)); }),
            c.end());
    axes[d] = std::move(c);
  }
  double h = 0;
  for (int d = 0; d < n; ++d)
    for (std::size_t i = 1; i < axes[d].size(); ++i) {
      double step = axes[d][i] - axes[d][i - 1];
      if (h == 0 || step < h) h = step;
    }
  if (h == 0) throw std::runtime_error("read_csv: cannot infer spacing from a single sample");

  grid g;
  g.domain.dim = n;
  g.spacing = h;
  std::int64_t expected = 1;
  for (int d = 0; d < n; ++d) {
    double lo = axes[d].front() - 0.5 * h;
    double len = axes[d].back() + 0.5 * h - lo;
    std::int64_t m = static_cast<std::int64_t>(std::llround(len / h));
    if (static_cast<std::size_t>(m) != axes[d].size())
      throw std::runtime_error("read_csv: axis " + std::to_string(d) + " is not a uniform lattice");
    g.domain.lower[d] = lo;
    g.domain.upper[d] = lo + static_cast<double>(m) * h;
    g.cells[d] = m;
    expected *= m;
  }
  if (expected != static_cast<std::int64_t>(vals.size()))
    throw std::runtime_error("read_csv: sample count does not fill the lattice");

  grid_function u = make_grid_function(g);
  for (std::int64_t i = 0; i < expected; ++i) {
    vec3 want = g.midpoint(i);
    for (int d = 0; d < n; ++d)
      if (std::fabs(coords[i][d] - want[d]) > 1e-9 * std::max(1.0, std::fabs(want[d])))
        throw std::runtime_error("read_csv: rows are not in row-major midpoint order");
    u.values[i] = vals[i];
  }
  check_finite(u, "read_csv");
  return u;
}

inline grid_function read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  return read_csv(in);
}

} // namespace czkit
