#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dphase/fields.hpp"

namespace dphase {

/// Writes `i1,...,in,u1,...,uN` rows in row-major node order after a mandatory header row.
/// Lines in `metadata` are emitted first, each prefixed with '#'.
void write_field_csv(std::ostream& os, const SampledField& u,
                     const std::vector<std::string>& metadata = {});

/// Reads the format above for a known grid. '#' lines are skipped; rows must cover every node
/// exactly once in row-major order.
SampledField read_field_csv(std::istream& is, const Grid& grid, int target_dim);

/// Shortest round-trip decimal representation used by every CSV writer in the project.
std::string format_double(double v);

}  // namespace dphase
