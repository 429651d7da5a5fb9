#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "omegalab/partition.hpp"
#include "omegalab/primes.hpp"

namespace omegalab {

using KVector = std::vector<int>;

struct CensusOptions {
  int threads = 1;
  int max_cells = 8;
  std::uint64_t max_x = 2'000'000'000ULL;
  std::uint64_t segment_size = 1ULL << 15;
  std::size_t dense_limit = 1ULL << 22;  ///< largest dense k-lattice before hashing
};

/// Exact counts π(x; E, k) for all realised k-vectors.
class CensusTable {
 public:
  std::uint64_t x = 0;
  int cells = 0;
  std::string partition_id;
  std::map<KVector, std::uint64_t> counts;  ///< lexicographic order

  std::uint64_t total() const;
  std::uint64_t count(const KVector& k) const;
  int max_k(int cell) const;
  void write_csv(std::ostream& out) const;
};

CensusTable census(std::uint64_t x, const Partition& partition, const CensusOptions& opt = {});

/// Sum out every coordinate not in kept_cells (kept order is preserved).
CensusTable marginal(const CensusTable& table, const std::vector<int>& kept_cells);

/// Largest r with the product of the r smallest primes of the cell ≤ x.
/// Sets *empty when the cell has no prime ≤ x.
int k_max(std::uint64_t x, const Partition& partition, int cell, bool* empty = nullptr);

/// Σ log p over the k_j smallest primes of each cell; +inf if a cell has fewer primes ≤ bound.
double smallest_product_log(const Partition& partition, const KVector& k, std::uint64_t bound = 1ULL << 31);

}  // namespace omegalab
