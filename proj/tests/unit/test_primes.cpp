#include "common.hpp"
#include "doctest.h"
#include "omegalab/error.hpp"
#include "omegalab/primes.hpp"

using namespace omegalab;

TEST_CASE("sieve agrees with trial division") {
  PrimeTable t = sieve(100000);
  std::size_t idx = 0;
  for (std::uint64_t n = 2; n <= 100000; ++n) {
    const bool p = is_prime_trial(n);
    if (p) {
      REQUIRE(idx < t.size());
      CHECK(t[idx] == n);
      ++idx;
    }
  }
  CHECK(idx == t.size());
  CHECK(t.size() == 9592);
}

TEST_CASE("smallest prime factors") {
  PrimeTable t = sieve(20000);
  REQUIRE(t.has_spf());
  for (std::uint64_t m = 2; m <= 20000; ++m) CHECK(t.spf(m) == testing::distinct_prime_factors(m).front());
}

TEST_CASE("prime counting function") {
  PrimeTable t = sieve(1000000);
  CHECK(t.count_upto(10) == 4);
  CHECK(t.count_upto(1e6) == 78498);
  CHECK(t.count_upto(1.5) == 0);
}

TEST_CASE("segmented blocks reproduce the spf table") {
  PrimeTable t = sieve(50000);
  SegmentedSieve s(50000, 4096);
  std::uint64_t covered = 1;
  while (auto b = s.next()) {
    CHECK(b->lo == covered + 1);
    for (std::uint64_t m = b->lo; m <= b->hi; ++m) CHECK(b->spf[m - b->lo] == t.spf(m));
    covered = b->hi;
  }
  CHECK(covered == 50000);
}

TEST_CASE("capacity limit") { CHECK_THROWS_AS(sieve(1ULL << 40), CapacityError); }
