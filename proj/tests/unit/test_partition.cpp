#include <cmath>

#include "common.hpp"
#include "doctest.h"
#include "omegalab/error.hpp"
#include "omegalab/partition.hpp"

using namespace omegalab;

namespace {
std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  a %= m;
  for (; e; e >>= 1, a = a * a % m)
    if (e & 1) r = r * a % m;
  return r;
}
}  // namespace

TEST_CASE("single cell") {
  Partition p = Partition::single();
  CHECK(p.cells() == 1);
  for (std::uint64_t n : {2, 3, 97, 1000003}) CHECK(p.classify(n) == 0);
}

TEST_CASE("progressions mod 4") {
  Partition p = Partition::ap(4, {{1}, {3}});
  CHECK(p.cells() == 3);
  CHECK(p.classify(2) == 0);
  CHECK(p.classify(5) == 1);
  CHECK(p.classify(13) == 1);
  CHECK(p.classify(7) == 2);
  CHECK(p.ap_meta().phi_q == 2);
  CHECK(p.ap_meta().m == std::vector<int>{0, 1, 1});
}

TEST_CASE("quadratic residues mod 5 follow the Legendre symbol") {
  Partition p = Partition::load(OMEGALAB_CONFIG_DIR "/ap_q5_qr.json");
  REQUIRE(p.cells() == 3);
  auto t = testing::table(100000);
  for (std::uint32_t q : t->primes()) {
    if (q == 5) {
      CHECK(p.classify(q) == 0);
      continue;
    }
    const int expected = powmod(q, 2, 5) == 1 ? 1 : 2;  // Euler's criterion
    CHECK(p.classify(q) == expected);
  }
  CHECK(p.classify(19) == 1);
}

TEST_CASE("digit family membership") {
  Partition p = Partition::load(OMEGALAB_CONFIG_DIR "/digit.json");
  CHECK(p.cells() == 3);
  CHECK(p.classify(13) == 1);    // excluded class wins
  CHECK(p.classify(103) == 1);
  CHECK(p.classify(101) == 2);
  CHECK(p.classify(1009) == 2);
  CHECK(p.classify(11) == 0);    // too few digits
  CHECK(p.classify(1117) == 0);
}

TEST_CASE("adversarial family membership") {
  AdversarialMeta m{2.0, 2.0};
  Partition p = Partition::adversarial(m);
  // y_l = 2^{2^l}; B = ∪_m [2^{m+1} − m, 2^{m+1})
  auto in_b = [](std::int64_t l) {
    for (std::int64_t k = 0; k < 62; ++k) {
      const std::int64_t hi = std::int64_t(1) << (k + 1);
      if (l >= hi - k && l < hi) return true;
    }
    return false;
  };
  for (std::int64_t l = 1; l < 40; ++l) CHECK(m.in_b(l) == in_b(l));
  auto t = testing::table(100000);
  for (std::uint32_t q : t->primes()) {
    std::int64_t l = 0;
    while (std::pow(2.0, std::pow(2.0, double(l))) <= q) ++l;  // q ∈ [y_{l−1}, y_l)
    CHECK(p.classify(q) == (in_b(l) ? 1 : 0));
  }
}

TEST_CASE("JSON round trip") {
  for (const char* f : {"all.json", "ap_q4.json", "ap_q10.json", "ap_q5_qr.json", "digit.json", "adversarial.json"}) {
    Partition p = Partition::load(std::string(OMEGALAB_CONFIG_DIR "/") + f);
    Partition q = Partition::from_json(p.to_json());
    CHECK(p.id() == q.id());
    for (std::uint64_t n = 2; n < 3000; ++n) CHECK(p.classify(n) == q.classify(n));
  }
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(Partition::ap(4, {{1}, {1}}), ValidationError);
  CHECK_THROWS_AS(Partition::ap(4, {{5}}), ValidationError);
  CHECK_THROWS_AS(Partition::ap(4, {{1, 2, 3}}), ValidationError);
  CHECK_THROWS_AS(Partition::from_json(nlohmann::json::parse(R"({"q": 4})")), ValidationError);
  CHECK_THROWS_AS(Partition::adversarial({2.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(Partition::load("/nonexistent/partition.json"), ValidationError);
}

TEST_CASE("fitted constant of the full cell is the Mertens constant") {
  Partition p = Partition::single();
  double res = 0;
  const double c = fit_ap_constant(p, 0, *testing::table(), &res);
  CHECK(std::abs(c - kMertens) < 2e-3);
  CHECK(res < 5e-3);
  // the two classes mod 4 share the constant up to the prime 2 and the 1/2 slope
  Partition q = Partition::ap(4, {{1}, {3}});
  fit_ap_constants(q, *testing::table());
  const auto& cs = q.ap_meta().c;
  CHECK(cs[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(cs[1] + cs[2] + 0.5 - kMertens) < 3e-3);
}

TEST_CASE("euler phi") {
  CHECK(euler_phi(1) == 1);
  CHECK(euler_phi(10) == 4);
  CHECK(euler_phi(36) == 12);
  CHECK(euler_phi(97) == 96);
}
