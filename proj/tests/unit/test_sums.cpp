#include <cmath>
#include <numbers>

#include "common.hpp"
#include "doctest.h"
#include "omegalab/error.hpp"
#include "omegalab/sums.hpp"

using namespace omegalab;

namespace {
double direct(const SumCache& c, int cell, int l, double sigma, double lo, double hi) {
  KahanSum s;
  for (std::uint32_t p : c.table().primes()) {
    if (p > hi) break;
    if (p <= lo || (cell >= 0 && c.partition().classify(p) != cell)) continue;
    s += std::pow(std::log(double(p)), l) * std::pow(double(p), -sigma);
  }
  return s.value();
}
}  // namespace

TEST_CASE("reciprocal sums") {
  auto c = testing::cache(Partition::single());
  CHECK(c->reciprocal_sum(0, 10) == doctest::Approx(247.0 / 210.0).epsilon(1e-15));
  CHECK(c->reciprocal_sum(-1, 1e6) == doctest::Approx(direct(*c, 0, 0, 1.0, 0, 1e6)).epsilon(1e-13));
  // E(x) − log log x → Mertens constant
  CHECK(std::abs(c->reciprocal_sum(0, 1e7) - std::log(std::log(1e7)) - kMertens) < 1e-3);
}

TEST_CASE("truncated sums match direct loops") {
  auto c = testing::cache(Partition::ap(4, {{1}, {3}}));
  for (int cell : {-1, 0, 1, 2})
    for (int l : {0, 1, 2, 3})
      for (double sigma : {1.0, 1.05, 1.5})
        for (double Y : {50.0, 2e5, 9e6}) {
          const double d = direct(*c, cell, l, sigma, 0, Y);
          CHECK(c->truncated_sum(cell, l, sigma, Y) == doctest::Approx(d).epsilon(1e-11));
          CHECK(c->sum_model(cell, l, sigma, Y).value == doctest::Approx(d).epsilon(1e-11));
        }
}

TEST_CASE("tail model brackets the prime zeta function") {
  auto c = testing::cache(Partition::single(), 1'000'000);
  // P(2) = Σ p^{-2}
  Estimate e = c->weighted_sum(0, 0, 2.0);
  CHECK(std::abs(e.value - 0.45224742004106549850) <= e.uncertainty + 1e-12);
  // tail over (1e6, 1e7] against the exact sum
  Estimate t = c->tail(0, 1, 1.1, std::log(1e6), std::log(1e7));
  const double exact = direct(*testing::cache(Partition::single()), 0, 1, 1.1, 1e6, 1e7);
  CHECK(std::abs(t.value - exact) <= t.uncertainty);
  CHECK(std::abs(t.value - exact) < 0.01 * exact);
  // complex tail on the real axis agrees with the real tail
  const double v0 = std::log(1e6);
  CHECK(std::abs(c->tail_complex(0, cplx(1.3, 0), v0) - c->tail(0, 0, 1.3, v0, INFINITY).value) < 1e-12);
}

TEST_CASE("binned power sums") {
  auto c = testing::cache(Partition::ap(10, {{3}}));
  const double sigma = 1.07;
  auto b = c->body_power_sums(1, sigma);
  for (int k = 1; k <= kMaxPower; ++k)
    for (int a = 0; a <= kMaxLog; ++a) {
      const double d = direct(*c, 1, a, k * sigma, c->head_limit(), c->cutoff());
      CHECK(b[k - 1][a] == doctest::Approx(d).epsilon(1e-9));
    }
  const cplx s(1.07, 3.0);
  auto cs = c->power_sums_complex(1, s, 5000.0);
  KahanSumC d1, d2;
  for (std::uint32_t p : c->table().primes()) {
    if (p <= 5000 || c->partition().classify(p) != 1) continue;
    d1 += std::pow(double(p), -s);
    d2 += std::pow(double(p), -2.0 * s);
  }
  CHECK(std::abs(cs[0] - d1.value()) < 1e-10);
  CHECK(std::abs(cs[1] - d2.value()) < 1e-12);
}

TEST_CASE("ratios and hypotheses are well formed") {
  auto c = testing::cache(Partition::ap(4, {{1}, {3}}));
  RatioSet r = ratios(*c, 1.05, 1e6);
  REQUIRE(r.cells.size() == 3);
  for (const auto& cr : r.cells) {
    CHECK(cr.alpha_Y <= cr.alpha.value + cr.alpha.uncertainty);
    CHECK(cr.alpha_Y * cr.alpha_Y <= 12 * cr.beta_Y);
  }
  HypothesisReport h = check_hypotheses(*c, 1.0 + 1.0 / std::log(1e6), {0, 2, 2});
  CHECK(h.E_Z.size() == 3);
  CHECK(h.Z == doctest::Approx(1e6).epsilon(1e-9));
  CHECK(h.c1 == doctest::Approx(1.0 / 6));  // 1/(2(n+1)) with n = 2
  // every residue class carries half the weight: H1 holds
  CHECK(h.H1);
}

TEST_CASE("Ein and the uniformity check") {
  // Ein(x) = Σ (−1)^{n+1}x^n/(n·n!)
  for (double x : {0.01, 0.5, 2.0}) {
    double s = 0, term = 1;
    for (int n = 1; n < 40; ++n) {
      term *= x / n;
      s += (n % 2 ? 1 : -1) * term / n;
    }
    CHECK(ein(x) == doctest::Approx(s).epsilon(1e-13));
  }
  auto c = testing::cache(Partition::single());
  LemUnifReport r = lemunif_check(*c, -1, 1e5, 0.5);
  const double sigma = 1 + 0.5 / std::log(1e5);
  CHECK(r.sigma == doctest::Approx(sigma));
  CHECK(r.R == doctest::Approx(direct(*c, 0, 0, 1.0, 0, 1e5) - direct(*c, 0, 0, sigma, 0, 1e5)).epsilon(1e-12));
}

TEST_CASE("angular sum against direct loop") {
  auto t = testing::table();
  AngularReport a = angular_sum(*t, 1e6, 7.0, 0.2, 0.5);
  KahanSum s;
  for (std::uint32_t p : t->primes()) {
    if (p > 1e6) break;
    double f = 7.0 * std::log(double(p)) / (2 * std::numbers::pi);
    f -= std::floor(f);
    if (f >= 0.2 && f <= 0.5) s += 1.0 / p;
  }
  CHECK(a.value == doctest::Approx(s.value()).epsilon(1e-12));
  CHECK(a.predicted == doctest::Approx(0.3 * std::log(7.0 * std::log(1e6))));
}

TEST_CASE("Mertens fit and progressions") {
  MertensFit m = fit_mertens(*testing::table());
  CHECK(std::abs(m.M - kMertens) < 2e-3);
  ApSumReport ap = ap_weighted_sum_check(*testing::table(), 4, 1, 1.1);
  CHECK(!ap.values.empty());
  CHECK(!ap.growing);
}
