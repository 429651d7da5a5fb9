#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "omegalab/sums.hpp"

namespace omegalab {

/// Reciprocal and log-weighted sums over one interval I_l = [y_{l−1}, y_l) of the interval family.
struct IntervalRow {
  std::int64_t l = 0;
  double log_lo = 0, log_hi = 0;
  int cell = 0;
  double recip_sum = 0;  ///< Σ 1/p
  double log_sum = 0;    ///< Σ log p/p
};

struct AdversarialWitness {
  double b = 0, c = 0;
  int M = 0;
  std::int64_t L = 0;     ///< interval index defining σ = 1 + 1/log y_L
  double sigma = 0;
  bool found = false;     ///< H1 fails for the family and holds for the reference partition
  HypothesisReport family, reference;
  std::vector<IntervalRow> intervals;
  nlohmann::json to_json() const;
};

/// Starts at L = ⌈c^M⌉ − 1 and scans the other interval ends below the exact-sum cutoff
/// until H1 fails for every cell of `family` while holding for `reference`.
AdversarialWitness adversarial_witness(const SumCache& family, const SumCache& reference, int M);

struct DigitGrowthRow {
  double x = 0, E = 0, log2x = 0, log3x = 0;
  double scaled = 0;  ///< E·log₃x/log₂x
};

struct DigitGrowth {
  std::vector<DigitGrowthRow> rows;
  double band = 0;  ///< max/min of the scaled values
  nlohmann::json to_json() const;
};

/// Scaled reciprocal sums of the digit-prefix cell (cell 2) on the given x values.
DigitGrowth digit_growth(const SumCache& cache, const std::vector<double>& xs);

}  // namespace omegalab
