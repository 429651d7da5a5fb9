#include <cmath>

#include "common.hpp"
#include "doctest.h"
#include "omegalab/appendix.hpp"
#include "omegalab/error.hpp"

using namespace omegalab;

TEST_CASE("digit growth stays in a narrow band") {
  auto c = testing::cache(Partition::load(OMEGALAB_CONFIG_DIR "/digit.json"));
  DigitGrowth g = digit_growth(*c, {1e6, 1e7});
  REQUIRE(g.rows.size() == 2);
  for (const auto& r : g.rows) {
    CHECK(r.E == doctest::Approx(c->reciprocal_sum(2, r.x)));
    CHECK(r.scaled == doctest::Approx(r.E * r.log3x / r.log2x));
  }
  CHECK(g.band >= 1.0);
  CHECK(g.band < 4.0);
  CHECK_THROWS_AS(digit_growth(*c, {1e9}), CapacityError);
}

TEST_CASE("adversarial witness") {
  auto fam = testing::cache(Partition::load(OMEGALAB_CONFIG_DIR "/adversarial.json"));
  auto ref = testing::cache(Partition::ap(4, {{1}, {3}}));
  AdversarialWitness w = adversarial_witness(*fam, *ref, 3);
  CHECK(w.found);
  CHECK(!w.family.H1);
  CHECK(w.reference.H1);
  CHECK(w.sigma == doctest::Approx(1 + 1 / fam->partition().adversarial_meta().log_y(w.L)));
  CHECK(!w.intervals.empty());
  // interval sums over exact primes
  for (const auto& r : w.intervals) {
    if (r.log_hi > std::log(1e7)) break;
    KahanSum s;
    for (std::uint32_t p : fam->table().primes())
      if (std::log(double(p)) >= r.log_lo && std::log(double(p)) < r.log_hi) s += 1.0 / p;
    CHECK(r.recip_sum == doctest::Approx(s.value()).epsilon(1e-10));
  }
}
