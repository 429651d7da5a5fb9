#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omegalab/census.hpp"

namespace omegalab {

/// Exact integer from decimal or scientific notation ("1e7", "2.5e6", "1000000"); rejects
/// values that are not whole numbers or exceed 2^63.
std::uint64_t parse_x(const std::string& text);

/// "5" or "0,3,3".
KVector parse_k(const std::string& text);

/// Cartesian grid "2..6 x 2..6 x 3" (ranges inclusive, single values allowed).
std::vector<KVector> parse_k_grid(const std::string& text);

}  // namespace omegalab
