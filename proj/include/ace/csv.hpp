#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ace/domain.hpp"

namespace ace {

/// Shortest round-trip-exact decimal form of a double.
std::string format_double(double value);

/// Design CSV: `# key: value` metadata lines, a `run,x1,...,xv` header, then
/// one row per run.
void write_design_csv(std::ostream& out, const Design& design,
                      const std::vector<std::pair<std::string, std::string>>& metadata);

/// Parse a design CSV written by write_design_csv (metadata ignored).
/// Throws std::runtime_error on malformed input.
Design read_design_csv(std::istream& in);

Design read_design_csv_file(const std::string& path);

} // namespace ace
