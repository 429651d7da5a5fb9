#include <cmath>

#include "common.hpp"
#include "doctest.h"
#include "omegalab/properties.hpp"

using namespace omegalab;

TEST_CASE("ratio inequality holds on the grid") {
  auto c = testing::cache(Partition::ap(4, {{1}, {3}}));
  RatioSweep r = ratio_sweep(*c);
  CHECK(r.points == 300);
  CHECK(r.violations == 0);
  CHECK(r.worst <= 1.0);
}

TEST_CASE("trigonometric inequalities") {
  TrigPropSweep t = trigprop_sweep(7, 20000);
  CHECK(t.samples == 20000);
  CHECK(t.prop1_violations == 0);
  CHECK(t.prop2_half_period_violations == 0);
  CHECK(t.prop2_general_violations > 0);  // false off a common half-period
}

TEST_CASE("generalised integral bound") {
  GenIntSweep g = genint_sweep(11, 2000);
  CHECK(g.violations == 0);
  CHECK(g.worst <= 1.0);
}

TEST_CASE("M shifts") {
  auto c = testing::cache(Partition::single());
  MShiftSweep m = mshift_sweep(*c, 0, 1.05, 10.0, 3, 100);
  CHECK(m.samples == 100);
  CHECK(m.subadditive_violations == 0);
}

TEST_CASE("uniformity lemma with the corrected constant") {
  auto c = testing::cache(Partition::single());
  LemUnifSweep l = lemunif_sweep(*c, 1e5);
  CHECK(l.points == 40);
  CHECK(l.corrected_violations == 0);
  CHECK(l.tail_violations == 0);
}

TEST_CASE("angular statistic within its envelope") {
  AngularSweep a = angular_sweep(*testing::table(), {1e5, 1e6}, {3.0, 20.0}, 4, 5);
  CHECK(a.points == 16);
  CHECK(a.slack > 0);
  CHECK(a.slack < 1.0);
}

TEST_CASE("truncation bound") {
  auto c = testing::cache(Partition::single());
  SaddlePoint sp = solve_saddle(*c, std::log(1e6), {4});
  std::vector<double> taus;
  for (int i = 1; i <= 8; ++i) taus.push_back(i * 0.5 * (sp.sigma - 1));
  TruncationSweep t = truncation_sweep(sp, *c, taus, {0.0, 0.5});
  CHECK(t.points == 16);
  CHECK(t.fitted_C >= 1.0);
  CHECK(t.fitted_C <= 4.0);
}
