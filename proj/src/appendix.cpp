#include "omegalab/appendix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "omegalab/error.hpp"

namespace omegalab {

namespace {

std::vector<IntervalRow> interval_rows(const SumCache& cache, std::int64_t L) {
  const AdversarialMeta& meta = cache.partition().adversarial_meta();
  std::vector<IntervalRow> rows;
  const auto primes = cache.table().primes();
  const double logP = std::log(cache.cutoff());
  std::size_t i = 0;
  for (std::int64_t l = 1; l <= L; ++l) {
    IntervalRow r;
    r.l = l;
    r.log_lo = meta.log_y(l - 1);
    r.log_hi = meta.log_y(l);
    r.cell = meta.in_b(l) ? 1 : 0;
    const double lo = std::exp(r.log_lo), hi = std::exp(r.log_hi);
    while (i < primes.size() && primes[i] < lo) ++i;
    for (; i < primes.size() && primes[i] < hi && primes[i] <= cache.cutoff(); ++i) {
      const double p = primes[i];
      r.recip_sum += 1.0 / p;
      r.log_sum += std::log(p) / p;
    }
    if (r.log_hi > logP) {
      const double v0 = std::max(r.log_lo, logP);
      r.recip_sum += cache.tail(r.cell, 0, 1.0, v0, r.log_hi).value;
      r.log_sum += cache.tail(r.cell, 1, 1.0, v0, r.log_hi).value;
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

nlohmann::json AdversarialWitness::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : intervals)
    rows.push_back({{"l", r.l}, {"log_lo", r.log_lo}, {"log_hi", r.log_hi}, {"cell", r.cell},
                    {"recip_sum", r.recip_sum}, {"log_sum", r.log_sum}});
  return {{"b", b},           {"c", c},   {"M", M},
          {"L", L},           {"sigma", sigma},
          {"found", found},   {"family", family.to_json()},
          {"reference", reference.to_json()}, {"intervals", rows}};
}

AdversarialWitness adversarial_witness(const SumCache& family, const SumCache& reference, int M) {
  if (family.partition().kind() != PartitionKind::adversarial)
    throw ValidationError("adversarial_witness: family must be an adversarial partition");
  if (M < 1) throw ValidationError("adversarial_witness: M must be positive");
  const AdversarialMeta& meta = family.partition().adversarial_meta();
  AdversarialWitness w;
  w.b = meta.b;
  w.c = meta.c;
  w.M = M;
  // beyond the cutoff the sums come from the (exact-membership) tail model
  std::int64_t l_max = 1;
  while (meta.log_y(l_max + 1) <= 1e12) ++l_max;
  const std::int64_t start = std::clamp<std::int64_t>(std::int64_t(std::ceil(std::pow(meta.c, M))) - 1, 1, l_max);
  std::vector<std::int64_t> order{start};
  for (std::int64_t d = 1; start + d <= l_max || start - d >= 1; ++d) {
    if (start - d >= 1) order.push_back(start - d);
    if (start + d <= l_max) order.push_back(start + d);
  }
  const std::vector<int> kf(family.cells(), 1), kr(reference.cells(), 1);
  bool first = true;
  for (std::int64_t L : order) {
    const double sigma = 1.0 + 1.0 / meta.log_y(L);
    HypothesisReport hf = check_hypotheses(family, sigma, kf);
    HypothesisReport hr = check_hypotheses(reference, sigma, kr);
    const bool ok = !hf.H1 && hr.H1;
    if (first || ok) {
      w.L = L;
      w.sigma = sigma;
      w.family = hf;
      w.reference = hr;
      w.found = ok;
      first = false;
    }
    if (ok) break;
  }
  w.intervals = interval_rows(family, w.L);
  return w;
}

nlohmann::json DigitGrowth::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"x", r.x}, {"E", r.E}, {"log2x", r.log2x}, {"log3x", r.log3x}, {"scaled", r.scaled}});
  return {{"rows", out}, {"band", band}};
}

DigitGrowth digit_growth(const SumCache& cache, const std::vector<double>& xs) {
  if (cache.partition().kind() != PartitionKind::digit)
    throw ValidationError("digit_growth: partition must be of digit kind");
  DigitGrowth g;
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (double x : xs) {
    if (x > cache.cutoff()) throw CapacityError("digit_growth: x exceeds the exact-sum cutoff");
    DigitGrowthRow r;
    r.x = x;
    r.E = cache.reciprocal_sum(2, x);
    r.log2x = std::log(std::log(x));
    r.log3x = std::log(r.log2x);
    if (!(r.log3x > 0)) throw DomainError("digit_growth: need log log log x > 0");
    r.scaled = r.E * r.log3x / r.log2x;
    lo = std::min(lo, r.scaled);
    hi = std::max(hi, r.scaled);
    g.rows.push_back(r);
  }
  g.band = hi / lo;
  return g;
}

}  // namespace omegalab
