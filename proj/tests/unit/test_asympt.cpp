#include <cmath>
#include <sstream>

#include "common.hpp"
#include "doctest.h"
#include "omegalab/asympt.hpp"
#include "omegalab/census.hpp"

using namespace omegalab;

namespace {
// Minimal RFC-4180 field splitter.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool q = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (q) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (ch == '"') {
        q = false;
      } else {
        out.back() += ch;
      }
    } else if (ch == '"') {
      q = true;
    } else if (ch == ',') {
      out.emplace_back();
    } else {
      out.back() += ch;
    }
  }
  return out;
}
}  // namespace

TEST_CASE("Poisson heuristic formula") {
  auto c = testing::cache(Partition::ap(4, {{1}, {3}}));
  const double lx = std::log(1e6);
  const KVector k{1, 2, 2};
  double want = lx;
  for (int j = 0; j < 3; ++j) {
    const double E = c->reciprocal_sum(j, 1e6);
    want += k[j] * std::log(E) - E - std::lgamma(k[j] + 1.0);
  }
  CHECK(log_poisson_heuristic(*c, lx, k) == doctest::Approx(want).epsilon(1e-12));
  double tq = lx;
  for (int j = 0; j < 3; ++j) {
    const double E = c->reciprocal_sum(j, 1e6);
    tq += k[j] * std::log(E + 2.0) - E - std::lgamma(k[j] + 1.0);
  }
  CHECK(log_tudesq_bound(*c, lx, k, 2.0) == doctest::Approx(tq).epsilon(1e-12));
}

TEST_CASE("zero vector is evaluated at z = x") {
  auto c = testing::cache(Partition::ap(4, {{1}, {3}}));
  const double lx = std::log(1e6);
  EstimateReport r = theorem1_estimate(*c, lx, {0, 0, 0});
  CHECK(r.zero_vector);
  double want = lx;
  for (int j = 0; j < 3; ++j) want -= c->reciprocal_sum(j, 1e6);
  CHECK(r.log_estimate == doctest::Approx(want).epsilon(1e-12));
  CHECK(!r.flags.empty());
}

TEST_CASE("theorem 1 on the full set tracks the census") {
  auto c = testing::cache(Partition::single());
  CensusTable t = census(1'000'000, Partition::single());
  for (int k : {3, 4}) {
    EstimateReport r = theorem1_estimate(*c, std::log(1e6), {k});
    CHECK(std::isfinite(r.log_estimate));
    const double ratio = t.count({k}) / r.estimate();
    CHECK(ratio > 0.2);
    CHECK(ratio < 5.0);
    CHECK(r.flags.front() == kRangeNote);
  }
}

TEST_CASE("theorem 2 requires a progression partition and agrees in order of magnitude") {
  Partition p = Partition::ap(4, {{1}, {3}});
  fit_ap_constants(p, *testing::table());
  auto c = testing::cache(p);
  const double lx = std::log(1e7);
  EstimateReport a = theorem1_estimate(*c, lx, {0, 2, 2});
  EstimateReport b = theorem2_estimate(*c, lx, {0, 2, 2});
  CHECK(std::abs(a.log_estimate - b.log_estimate) < std::log(10.0));
  auto d = testing::cache(Partition::load(OMEGALAB_CONFIG_DIR "/digit.json"));
  CHECK_THROWS(theorem2_estimate(*d, lx, {0, 1, 1}));
}

TEST_CASE("Selberg product oracle values") {
  auto c = testing::cache(Partition::single());
  // (1 + 1/(p−1))(1 − 1/p) = 1 for every p
  CHECK(std::abs(log_selberg_product(*c, 1.0)) < 1e-12);
  CHECK(std::abs(log_selberg_product(*c, 0.0)) < 1e-15);
  // y = 2: ∏ (1 + 1/(p−1)... ) computed directly
  KahanSum s;
  for (std::uint32_t p : c->table().primes()) s += std::log1p(2.0 / (p - 1.0)) + 2.0 * std::log1p(-1.0 / p);
  CHECK(log_selberg_product(*c, 2.0) == doctest::Approx(s.value()).epsilon(1e-6));
}

TEST_CASE("classical baselines near the count of 3-factor integers") {
  auto c = testing::cache(Partition::single());
  CensusTable t = census(1'000'000, Partition::single());
  ClassicalBaselines b = classical_baselines(*c, std::log(1e6), 3);
  const double n = std::log(double(t.count({3})));
  CHECK(std::abs(b.log_selberg_sathe - n) < std::log(2.0));
  CHECK(std::abs(b.log_selberg_sathe_km1 - n) < std::log(2.0));
  CHECK(std::abs(b.log_halasz - n) < std::log(3.0));
}

TEST_CASE("comparison CSV") {
  Partition p = Partition::ap(4, {{1}, {3}});
  auto c = testing::cache(p);
  CensusTable t = census(100000, p);
  std::vector<ComparisonRow> rows = compare(t, *c, {{0, 2, 2}, {1, 1, 3}, {0, 40, 0}});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].census == t.count({0, 2, 2}));
  CHECK(rows[2].census == 0);
  std::ostringstream os;
  write_comparison_csv(os, rows);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,k,census,theorem1,theorem2,heuristic,tudesq,ratio_theorem1,ratio_theorem2,ratio_heuristic,"
                "ratio_tudesq,flags");
  int n = 0;
  while (std::getline(is, line)) {
    auto f = split_csv(line);
    CHECK(f.size() == 12);
    CHECK(f[0] == "100000");
    ++n;
  }
  CHECK(n == 3);
  CHECK(split_csv(os.str().substr(os.str().find('\n') + 1))[1] == "0,2,2");
}
