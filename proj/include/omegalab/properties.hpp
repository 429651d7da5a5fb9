#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "omegalab/saddle.hpp"
#include "omegalab/sums.hpp"

namespace omegalab {

/// α_j(Y)² ≤ 12β_j(Y) on a 10×10 (σ, Y) grid per cell.
struct RatioSweep {
  int points = 0, violations = 0;
  double worst = 0;  ///< max α²/(12β)
  nlohmann::json to_json() const;
};
RatioSweep ratio_sweep(const SumCache& cache);

/// sin²(Σa) ≤ mΣsin²a on all tuples; sin²(mean) ≥ (∏sin²a)^{1/m} both on tuples drawn from
/// one half-period (kπ, (k+1)π) and on unrestricted tuples in [−2π, 2π].
struct TrigPropSweep {
  int samples = 0;
  int prop1_violations = 0;
  int prop2_half_period_violations = 0;
  int prop2_general_violations = 0;
  nlohmann::json to_json() const;
};
TrigPropSweep trigprop_sweep(std::uint64_t seed, int samples, int max_m = 6);

/// ∫_u^∞(1+t²)^{−γ} ≤ sqrt(π²/(2γ))(1+u²)^{−γ/2} for γ ∈ [2, 50], u ∈ (0, 10].
struct GenIntSweep {
  int samples = 0, violations = 0;
  double worst = 0;  ///< max integral/bound
  nlohmann::json to_json() const;
};
GenIntSweep genint_sweep(std::uint64_t seed, int samples);

/// M_j(τ₁,t₁)+M_j(τ₂,t₂) ≥ ½M_j(τ₁+τ₂,t₁+t₂) and M_j(τ,t) ≥ M_j(2τ,0)sin²t on random (τ, t).
struct MShiftSweep {
  int samples = 0;
  int subadditive_violations = 0;
  int doubling_violations = 0;
  nlohmann::json to_json() const;
};
MShiftSweep mshift_sweep(const SumCache& cache, int cell, double sigma, double p_lo, std::uint64_t seed, int samples);

/// R(η) against (e^η−1−η)/η + slack/log z and against Ein(η) + slack/log z on a log grid of η.
struct LemUnifSweep {
  double z = 0, slack = 1;
  int points = 0;
  int violations = 0, corrected_violations = 0, tail_violations = 0;
  double worst_eta = 0, worst_excess = 0;  ///< largest R − bound
  nlohmann::json to_json() const;
};
LemUnifSweep lemunif_sweep(const SumCache& cache, double z, double eta_lo = 1e-3, double eta_hi = 3.0, int points = 40,
                           double slack = 1.0);

/// |value − predicted| against the angular envelope for y, t and random intervals.
struct AngularSweep {
  int points = 0;
  double slack = 0;  ///< smallest global factor making every point fit the envelope
  std::vector<AngularReport> rows;
  nlohmann::json to_json() const;
};
AngularSweep angular_sweep(const PrimeTable& table, const std::vector<double>& ys, const std::vector<double>& ts,
                           int intervals, std::uint64_t seed);

/// Smallest C with log|F(z;s)|/F(ρ;σ) ≤ log C − ¼Σρ_jM_j over a τ sweep (t on a small grid).
struct TruncationSweep {
  int points = 0;
  double fitted_C = 0;
  double min_G_margin = 0;  ///< min of Σρ_jM_j − G over |τ| < 2/(σ−1)
  nlohmann::json to_json() const;
};
TruncationSweep truncation_sweep(const SaddlePoint& sp, const SumCache& cache, const std::vector<double>& taus,
                                 const std::vector<double>& ts);

}  // namespace omegalab
