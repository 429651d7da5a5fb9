#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace omegalab {

struct SieveOptions {
  std::uint64_t max_limit = 2'000'000'000ULL;  ///< hard capacity
  std::uint64_t spf_budget = 1ULL << 25;       ///< largest limit with a monolithic spf array
  bool segmented = true;                       ///< allow limits above spf_budget (primes only)
  std::uint64_t segment_size = 1ULL << 20;
};

/// Primes ≤ limit, and (when within budget) the smallest-prime-factor table.
class PrimeTable {
 public:
  PrimeTable() = default;

  std::uint64_t limit() const { return limit_; }
  std::span<const std::uint32_t> primes() const { return primes_; }
  std::size_t size() const { return primes_.size(); }
  std::uint32_t operator[](std::size_t i) const { return primes_[i]; }

  bool has_spf() const { return !spf_.empty(); }
  /// Smallest prime factor of 2 ≤ m ≤ limit; requires has_spf().
  std::uint32_t spf(std::uint64_t m) const;
  /// π(t) for t ≤ limit.
  std::size_t count_upto(double t) const;

  friend PrimeTable sieve(std::uint64_t limit, const SieveOptions& opt);

 private:
  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> primes_;
  std::vector<std::uint32_t> spf_;
};

PrimeTable sieve(std::uint64_t limit, const SieveOptions& opt = {});

/// Block [lo, hi] (inclusive) with spf[m - lo] for every m in the block.
struct SpfBlock {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::vector<std::uint32_t> spf;
};

/// Stream of spf blocks covering [2, limit] in order.
class SegmentedSieve {
 public:
  SegmentedSieve(std::uint64_t limit, std::uint64_t segment_size);
  std::optional<SpfBlock> next();
  /// Block with index i (random access; blocks can be produced out of order).
  SpfBlock block(std::uint64_t index) const;
  std::uint64_t block_count() const;

 private:
  std::uint64_t limit_;
  std::uint64_t size_;
  std::uint64_t cursor_ = 0;
  std::vector<std::uint32_t> base_;
};

/// Deterministic primality by trial division (for checks, not speed).
bool is_prime_trial(std::uint64_t n);

/// Small primes ≤ limit by a plain sieve.
std::vector<std::uint32_t> small_primes(std::uint64_t limit);

}  // namespace omegalab
