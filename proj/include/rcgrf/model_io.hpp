#pragma once

#include <string>

#include "rcgrf/cells.hpp"

namespace rcgrf {

/// Self-describing binary container: magic, version, cell kind, then
/// (d, k, C) and every parameter block in declaration order as
/// little-endian 64-bit reals (row-major matrices).
void save_model(const CellParams& params, const std::string& path);
CellParams load_model(const std::string& path);

}  // namespace rcgrf
