#include "sigsde/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sigsde {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_paths_csv(std::ostream& os, const std::vector<PiecewiseLinearPath>& paths) {
  if (paths.empty()) throw std::invalid_argument("write_paths_csv: nothing to write");
  const std::size_t dim = paths.front().dim();
  os << "sample,t";
  for (std::size_t k = 0; k < dim; ++k) os << ",y" << k;
  os << '\n';
  for (std::size_t p = 0; p < paths.size(); ++p) {
    if (paths[p].dim() != dim) throw std::invalid_argument("write_paths_csv: paths differ in dimension");
    for (std::size_t i = 0; i < paths[p].num_points(); ++i) {
      os << p << ',' << format_double(paths[p].times()[i]);
      for (double v : paths[p].point(i)) os << ',' << format_double(v);
      os << '\n';
    }
  }
}

void write_paths_csv(const std::string& file, const std::vector<PiecewiseLinearPath>& paths) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file);
  write_paths_csv(os, paths);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

std::vector<PiecewiseLinearPath> read_paths_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("read_paths_csv: empty input");
  const auto header = split(line);
  const bool grouped = !header.empty() && header[0] == "sample";
  const std::size_t tcol = grouped ? 1 : 0;
  if (header.size() < tcol + 2) throw std::runtime_error("read_paths_csv: need a time column and at least one value");
  // y0 present: the columns already hold the time coordinate
  const bool has_y0 = header[tcol + 1] == "y0";
  const std::size_t first = has_y0 ? tcol + 1 : tcol;
  const std::size_t dim = header.size() - first;

  std::vector<PiecewiseLinearPath> paths;
  std::vector<double> times, values;
  std::string current;
  std::size_t lineno = 1;
  auto flush = [&] {
    if (!times.empty()) paths.emplace_back(times, values, dim);
    times.clear();
    values.clear();
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("read_paths_csv: line " + std::to_string(lineno) + " has " +
                               std::to_string(cells.size()) + " cells, expected " + std::to_string(header.size()));
    }
    if (grouped && cells[0] != current) {
      flush();
      current = cells[0];
    }
    try {
      times.push_back(std::stod(cells[tcol]));
      for (std::size_t k = first; k < cells.size(); ++k) values.push_back(std::stod(cells[k]));
    } catch (const std::exception&) {
      throw std::runtime_error("read_paths_csv: bad number on line " + std::to_string(lineno));
    }
  }
  flush();
  if (paths.empty()) throw std::runtime_error("read_paths_csv: no rows");
  return paths;
}

std::vector<PiecewiseLinearPath> read_paths_csv(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot open " + file);
  return read_paths_csv(is);
}

}  // namespace sigsde
