#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "omegalab/census.hpp"
#include "omegalab/saddle.hpp"
#include "omegalab/sums.hpp"

namespace omegalab {

/// φ = Σ_{l≥2} 1/(l·2^{l−1}) = 2 log 2 − 1.
inline const double kPhiConst = 2.0 * 0.69314718055994530942 - 1.0;

struct AsymptOptions {
  double eps = 0.1;            ///< ε in the error scales E_j(y)^{−1/2+ε}, ψ_j
  double quad_eta = 0.1;       ///< η in θ_j = k_j^{−1/2}E_j(z)^η
  double quad_eps = 0.1;       ///< ε in δ = E_{j0}(z)^ε(Σρβ)^{−1/2}
  bool closed_form = false;    ///< Theorem 2 with the closed-form (σ, ρ) instead of the solved saddle
  HConstants hypotheses{};
  SaddleOptions saddle{};
};

struct EstimateReport {
  std::string formula;  ///< "theorem1" or "theorem2"
  double log_x = 0;
  KVector k;
  bool zero_vector = false;
  SaddlePoint saddle;
  double log_main = 0;       ///< log of the main product term
  double R = 0;              ///< 𝓡 = log F(ρ;σ) − Σ k_j(1 + log(1+η_j))
  double R_lower = 0;        ///< Σ k_j(φ − log(1+η_j))
  double C_rho = 0;          ///< Σ ρ_jα_j (Theorem 1) or (σ−1)log x (Theorem 2)
  double log_F_factor = 0;   ///< log 𝓕(k,σ)
  double log_estimate = 0;   ///< log(main · 𝓕); NaN when the formula is undefined
  std::vector<double> error_scales;  ///< S_j = E_j(y(x))^{−1/2+ε} or ψ_j
  std::vector<double> lemint_R;      ///< R_j of the Gaussian box integral
  bool H1 = false, H2 = false, H3 = false;
  std::vector<std::string> flags;
  std::optional<double> exact;
  double estimate() const;
  nlohmann::json to_json() const;
};

EstimateReport theorem1_estimate(const SumCache& cache, double log_x, const KVector& k, const AsymptOptions& opt = {});

/// Requires an AP partition; fitted constants are computed from the cache's table when absent.
EstimateReport theorem2_estimate(const SumCache& cache, double log_x, const KVector& k, const AsymptOptions& opt = {});

/// log of x ∏ E_j(x)^{k_j}e^{−E_j(x)}/k_j!.
double log_poisson_heuristic(const SumCache& cache, double log_x, const KVector& k);

/// log of x e^{−ΣE_j(x)} ∏ (E_j(x)+μ)^{k_j}/k_j!.
double log_tudesq_bound(const SumCache& cache, double log_x, const KVector& k, double mu);

struct ClassicalBaselines {
  double log_hardy_ramanujan = 0;   ///< log C₁ x/log x (log₂x + C₂)^{k−1}/(k−1)!
  double log_selberg_sathe = 0;     ///< y = k/log₂x
  double log_selberg_sathe_km1 = 0; ///< y = (k−1)/log₂x
  double log_halasz = 0;            ///< log x E(x)^k e^{−E(x)}/k!
  nlohmann::json to_json() const;
};

/// Single-set baselines over all primes (the union of the cache's cells).
ClassicalBaselines classical_baselines(const SumCache& cache, double log_x, int k, double C1 = 1.0, double C2 = 2.0);

/// log of ∏_p (1 + y/(p−1))(1 − 1/p)^y.
double log_selberg_product(const SumCache& cache, double y);

// ------------------------------------------------------------------ comparison

struct ComparisonRow {
  std::uint64_t x = 0;
  KVector k;
  std::uint64_t census = 0;
  double theorem1 = 0, theorem2 = 0, heuristic = 0, tudesq = 0;  ///< values (NaN when undefined)
  std::vector<std::string> flags;
  double ratio(double est) const { return est > 0 ? static_cast<double>(census) / est : std::nan(""); }
};

struct CompareOptions {
  AsymptOptions asympt{};
  double mu = 2.0;
  bool theorem2 = true;  ///< evaluate Theorem 2 when the partition is of AP kind
};

std::vector<ComparisonRow> compare(const CensusTable& table, const SumCache& cache, const std::vector<KVector>& grid,
                                   const CompareOptions& opt = {});

/// Header: x,k,census,theorem1,theorem2,heuristic,tudesq,ratio_theorem1,ratio_theorem2,ratio_heuristic,ratio_tudesq,flags
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

/// Range note attached to every theorem report.
inline constexpr const char* kRangeNote =
    "log^{2/3-mu} x range of k is not attainable at desk scale; values are trend checks only";

}  // namespace omegalab
