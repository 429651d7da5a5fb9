#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "omegalab/primes.hpp"
#include "omegalab/sums.hpp"

namespace testing {

/// One sieve per test binary.
inline std::shared_ptr<const omegalab::PrimeTable> table(std::uint64_t limit = 10'000'000) {
  static std::shared_ptr<const omegalab::PrimeTable> t;
  if (!t || t->limit() < limit) t = std::make_shared<omegalab::PrimeTable>(omegalab::sieve(limit));
  return t;
}

inline std::shared_ptr<omegalab::SumCache> cache(const omegalab::Partition& p, std::uint64_t cutoff = 10'000'000) {
  omegalab::SumCacheOptions opt;
  opt.cutoff = cutoff;
  return omegalab::make_sum_cache(table(cutoff), p, opt);
}

/// Prime factors of n by trial division.
inline std::vector<std::uint64_t> distinct_prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> f;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) {
      f.push_back(d);
      while (n % d == 0) n /= d;
    }
  if (n > 1) f.push_back(n);
  return f;
}

inline bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

}  // namespace testing
