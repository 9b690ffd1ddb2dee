#include "dphase/field_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/core.h>

namespace dphase {

std::string format_double(double v) { return fmt::format("{}", v); }

void write_field_csv(std::ostream& os, const SampledField& u, const std::vector<std::string>& metadata) {
  for (const auto& line : metadata) os << "# " << line << '\n';
  const Grid& g = u.grid();
  const int n = g.dim();
  for (int i = 0; i < n; ++i) os << (i ? "," : "") << 'i' << (i + 1);
  for (int a = 0; a < u.target_dim(); ++a) os << ",u" << (a + 1);
  os << '\n';
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const auto m = g.multi_index(node);
    for (int i = 0; i < n; ++i) os << (i ? "," : "") << m[static_cast<std::size_t>(i)];
    for (double v : u.value(node)) os << ',' << format_double(v);
    os << '\n';
  }
}

SampledField read_field_csv(std::istream& is, const Grid& grid, int target_dim) {
  const int n = grid.dim();
  std::vector<double> values;
  values.reserve(grid.node_count() * static_cast<std::size_t>(target_dim));
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t expected_node = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      std::stringstream hs(line);
      std::string col;
      int count = 0;
      while (std::getline(hs, col, ',')) ++count;
      if (count != n + target_dim || line.rfind("i1", 0) != 0) {
        throw PreconditionError(fmt::format("line {}: header must list {} index and {} value columns",
                                            line_no, n, target_dim));
      }
      header_seen = true;
      continue;
    }
    std::stringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != n + target_dim) {
      throw PreconditionError(fmt::format("line {}: expected {} columns, got {}", line_no,
                                          n + target_dim, cells.size()));
    }
    if (expected_node >= grid.node_count()) {
      throw PreconditionError(fmt::format("line {}: more rows than grid nodes", line_no));
    }
    const auto m = grid.multi_index(expected_node);
    try {
      for (int i = 0; i < n; ++i) {
        if (std::stoi(cells[static_cast<std::size_t>(i)]) != m[static_cast<std::size_t>(i)]) {
          throw PreconditionError(fmt::format("line {}: node indices out of row-major order", line_no));
        }
      }
      for (int a = 0; a < target_dim; ++a) values.push_back(std::stod(cells[static_cast<std::size_t>(n + a)]));
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const PreconditionError*>(&e)) throw;
      throw PreconditionError(fmt::format("line {}: unparseable number", line_no));
    }
    ++expected_node;
  }
  if (!header_seen) throw PreconditionError("field CSV: missing header row");
  if (expected_node != grid.node_count()) {
    throw PreconditionError(fmt::format("field CSV: {} rows for {} grid nodes", expected_node, grid.node_count()));
  }
  return SampledField(grid, target_dim, std::move(values));
}

}  // namespace dphase
