#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "omegalab/numeric.hpp"
#include "omegalab/partition.hpp"
#include "omegalab/primes.hpp"

namespace omegalab {

/// Value with a symmetric uncertainty (tail half-width plus model error).
struct Estimate {
  double value = 0.0;
  double uncertainty = 0.0;
};

struct SumCacheOptions {
  std::uint64_t cutoff = 100'000'000ULL;  ///< P: primes summed exactly up to here
  std::uint64_t head_limit = 1ULL << 17;  ///< primes kept individually
  double bin_width = 0.02;                ///< log-scale width of the large-prime bins
};

constexpr int kMaxPower = 6;      ///< largest k in Σ p^{-ks} kept in the bins
constexpr int kTaylorTerms = 10;  ///< Taylor terms per bin
constexpr int kMaxLog = 3;        ///< largest l in Σ log^l p · p^{-ks}

/// Per-(partition, cutoff) prime sums with an explicit tail model.
/// Cell index −1 denotes the union of all cells.
class SumCache {
 public:
  SumCache(std::shared_ptr<const PrimeTable> table, Partition partition, SumCacheOptions opt = {});

  const Partition& partition() const { return partition_; }
  const PrimeTable& table() const { return *table_; }
  std::shared_ptr<const PrimeTable> table_ptr() const { return table_; }
  double cutoff() const { return static_cast<double>(cutoff_); }
  double head_limit() const { return static_cast<double>(head_); }
  int cells() const { return partition_.cells(); }
  int cell_of_prime(std::size_t index) const { return cell_[index]; }

  /// E_j(t) = Σ_{p∈E_j, p≤t} 1/p exactly; t ≤ cutoff.
  double reciprocal_sum(int cell, double t) const;
  /// Σ_{p∈E_j, p≤Y} log^l p / p^σ exactly; σ ≥ 1, Y ≤ cutoff.
  double truncated_sum(int cell, int l, double sigma, double Y) const;
  /// Exact part up to min(Y, P) plus the tail model on (P, Y] (Y may be +inf).
  Estimate sum_model(int cell, int l, double sigma, double Y) const;
  /// Σ_{p∈E_j} log^l p / p^σ: exact up to P, plus the tail model when with_tail.
  Estimate weighted_sum(int cell, int l, double sigma, bool with_tail = true) const;
  /// Same with the upper limit given as log Y (for astronomically large Y).
  Estimate sum_model_log(int cell, int l, double sigma, double logY) const;
  /// E_j(t) for any t (tail-modelled above P).
  Estimate reciprocal_model(int cell, double t) const { return sum_model(cell, 0, 1.0, t); }

  /// Tail model Σ_{p∈E_j, e^{v0}<p≤e^{v1}} log^l p / p^σ.
  Estimate tail(int cell, int l, double sigma, double v0, double v1) const;
  /// Complex tail Σ_{p∈E_j, p>e^{v0}} p^{-s} (density midpoint) and its half-width bound.
  cplx tail_complex(int cell, cplx s, double v0, double* halfwidth = nullptr) const;

  /// Σ_{p∈E_j, head<p≤P} log^a p · p^{-k s} for k = 1..kMaxPower, a = 0..kMaxLog (real s).
  /// Result indexed [k-1][a].
  std::array<std::array<double, kMaxLog + 1>, kMaxPower> body_power_sums(int cell, double sigma) const;
  /// Complex version, a = 0 only, restricted to primes in (p_lo, P]; p_lo ≥ head or the
  /// head primes above p_lo are summed directly. Indexed [k-1].
  std::array<cplx, kMaxPower> power_sums_complex(int cell, cplx s, double p_lo) const;

  /// Primes of a cell up to the head limit (as doubles) and their logs.
  const std::vector<double>& head_primes(int cell) const { return head_p_[cell]; }
  const std::vector<double>& head_logs(int cell) const { return head_l_[cell]; }

  using PowerBlock = std::array<std::array<double, kMaxLog + 1>, kMaxPower>;
  /// Per-bin Σ log^a p · p^{-kσ} over the cell's body primes; bins cover (head, P] in order.
  std::vector<PowerBlock> bin_power_sums(int cell, double sigma) const;
  std::size_t bin_count() const { return nbins_; }
  /// Table index of the first prime of bin b (b = bin_count() gives body_end()).
  std::size_t bin_first(std::size_t b) const { return bin_start_[b]; }
  /// Bin holding log-scale v (clamped).
  std::size_t bin_of_log(double v) const { return bin_index(v); }
  /// Number of primes ≤ P in the cell.
  std::size_t prime_count(int cell) const { return cell < 0 ? body_end_ : count_[cell]; }
  /// True when the tail model puts no primes of the cell above P.
  bool finite_cell(int cell) const;

  /// Index range of table primes in (head, P].
  std::size_t body_begin() const { return body_begin_; }
  std::size_t body_end() const { return body_end_; }

  /// Relative uncertainty applied to every tail integral starting at log-scale v0.
  static double pnt_relative_error(double v0) { return 1.0 / (v0 * v0); }

 private:
  double body_taylor(int cell, int k, int a, double eps, double v_hi) const;
  double body_direct(int cell, int k, int a, double sigma, double y_lo, double y_hi) const;
  bool taylor_ok(double eps_abs) const { return eps_abs <= 4.0; }
  std::size_t bin_index(double v) const;

  std::shared_ptr<const PrimeTable> table_;
  Partition partition_;
  std::uint64_t cutoff_;
  std::uint64_t head_;
  double bin_width_;
  double v0_;  // log of head limit
  std::size_t nbins_ = 0;
  std::size_t body_begin_ = 0, body_end_ = 0;
  std::vector<std::uint8_t> cell_;                  // per table prime up to P
  std::vector<std::vector<double>> head_p_, head_l_;  // per cell
  std::vector<std::size_t> bin_start_;              // table index of first prime per bin
  // moments[cell][((bin*kMaxPower + k-1)*(kMaxLog+1) + a)*kTaylorTerms + i]
  std::vector<std::vector<double>> moments_;
  std::vector<std::size_t> count_;
};

std::shared_ptr<SumCache> make_sum_cache(std::shared_ptr<const PrimeTable> table, const Partition& partition,
                                         SumCacheOptions opt = {});

// ------------------------------------------------------------------ ratios

struct CellRatios {
  Estimate alpha, beta, gamma;  ///< full (σ−1)ΣlogP/p^σ, (σ−1)²Σlog², ½(σ−1)³Σlog³
  double alpha_Y = 0, beta_Y = 0, gamma_Y = 0;  ///< same normalisation, truncated at Y
};

struct RatioSet {
  double sigma = 0, Y = 0;
  std::vector<CellRatios> cells;
  nlohmann::json to_json() const;
};

RatioSet ratios(const SumCache& cache, double sigma, double Y);

// ------------------------------------------------------------------ hypotheses

struct HConstants {
  double c1 = -1, c2 = -1;  ///< negative: default 1/(2(n+1))
  double c3 = 10.0;
};

struct HypothesisReport {
  double sigma = 0, Z = 0;
  bool tail_dominated = false;
  bool H1 = false, H2 = false, H3 = false;
  int h1_witness = -1;  ///< cell satisfying both H1 conditions
  int j_dd = -1;        ///< index j'' of H2/H3
  double c1 = 0, c2 = 0, c3 = 0;
  std::vector<Estimate> E_Z;        ///< E_j(Z)
  std::vector<Estimate> logsum_Z;   ///< Σ_{p≤Z} log p/p
  std::vector<bool> h1_cond1, h1_cond2;
  double h1_rhs1 = 0, h1_rhs2 = 0;  ///< c1 log(1/(σ−1)), c2/(σ−1)
  double h2_lhs = 0, h2_rhs = 0, h3_lhs = 0, h3_rhs = 0;
  nlohmann::json to_json() const;
};

HypothesisReport check_hypotheses(const SumCache& cache, double sigma, const std::vector<int>& k,
                                  HConstants constants = {});

// ------------------------------------------------------------------ angular statistic

struct AngularReport {
  double value = 0, predicted = 0, envelope = 0, rel_err = 0;
};

/// Σ_{p≤y, {t log p/2π}∈[a,b]} 1/p against (b−a)log(|t| log y).
AngularReport angular_sum(const PrimeTable& table, double y, double t, double a, double b);

// ------------------------------------------------------------------ uniformity lemma

struct LemUnifReport {
  double z = 0, eta = 0, sigma = 0;
  double R = 0;           ///< Σ_{p≤z}(1/p − 1/p^σ)
  double bound = 0;       ///< (e^η−1−η)/η + slack/log z
  double corrected = 0;   ///< Ein(η) + slack/log z
  double tail = 0;        ///< Σ_{p>z} p^{-σ} (model beyond P)
  double tail_bound = 0;  ///< 2/η
  bool ok = false, corrected_ok = false, tail_ok = false;
};

LemUnifReport lemunif_check(const SumCache& cache, int cell, double z, double eta, double slack = 1.0);

/// Ein(x) = ∫_0^x (1 − e^{-u})/u du.
double ein(double x);

// ------------------------------------------------------------------ progressions, Mertens

struct ApSumReport {
  std::uint64_t q = 1, a = 0;
  double sigma = 0, predicted = 0;
  std::vector<double> cutoffs, values, deviations;
  bool growing = false;
};

ApSumReport ap_weighted_sum_check(const PrimeTable& table, std::uint64_t q, std::uint64_t a, double sigma,
                                  std::vector<double> cutoffs = {});

struct MertensFit {
  double M = 0;
  std::vector<double> t, deviation;  ///< Σ_{p≤t}1/p − log log t on a geometric grid
};

MertensFit fit_mertens(const PrimeTable& table);

/// Mertens constant (reference value) used in the estimates.
constexpr double kMertens = 0.26149721284764278375;

}  // namespace omegalab
