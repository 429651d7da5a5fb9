#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "omegalab/numeric.hpp"
#include "omegalab/saddle.hpp"
#include "omegalab/sums.hpp"

namespace omegalab {

/// Box of the Gaussian integral around a solved saddle point.
struct QuadPlan {
  double eta_exp = 0.1, eps_exp = 0.1;
  std::vector<int> active;        ///< cells with k_j ≥ 1
  std::vector<double> theta;      ///< θ_j = k_j^{−1/2}E_j(z)^η (0 for inactive cells)
  int j0 = -1;                    ///< argmax ρ_j²β_jθ_j²
  double delta = 0, T = 0;        ///< δ = E_{j0}(z)^ε(Σρβ)^{−1/2}, T = δ(σ−1)
  std::vector<double> R;          ///< R_j of the closed-form error
  std::vector<double> Q;          ///< Q_j of the quadratic h-model
  int nodes = 33, nodes_fine = 65;
  bool valid = false;             ///< δ < 1 and every θ_j > 0
  nlohmann::json to_json() const;
};

QuadPlan make_quad_plan(const SaddlePoint& sp, double eta = 0.1, double eps = 0.1);

/// f(z;s) = Σ_j Σ_{p∈E_j} log(1 + z_j/(p^s−1)) at complex (z, s), per-τ precomputation.
class ComplexSlice {
 public:
  ComplexSlice(const SumCache& cache, cplx s, const std::vector<double>& rho_max);
  cplx s() const { return s_; }
  /// Cell contribution at z (|z| ≤ the ρ_max given at construction for the series to be valid).
  cplx cell_f(int cell, cplx z) const;
  cplx f(const std::vector<cplx>& z) const;
  /// Σ_{p∈E_j, p>p_lo} p^{-s} (including the tail model) — used by M_j.
  cplx power_sum(int cell, double p_lo) const;

 private:
  struct Cell {
    std::vector<cplx> u;      // p^s − 1 for primes ≤ p_split
    std::array<cplx, kMaxPower> S{};  // Σ_{p>p_split} p^{-ks} up to P
    cplx tail = 0.0;          // Σ_{p>P} p^{-s}
    double p_split = 0;
  };
  const SumCache* cache_;
  cplx s_;
  std::vector<Cell> cells_;
};

/// h(z;s) = f(z;s) − f(ρ;σ) − Σk_j(e^{it_j}−1) + iτ log x, from direct f evaluations.
cplx h_expand(const SaddlePoint& sp, const SumCache& cache, const std::vector<double>& t, double tau);
/// Quadratic model −(τ²/2) Σ ρ_j Σ log²p/p^σ.
double h_quadratic_model(const SaddlePoint& sp, const SumCache& cache, double tau);

struct BoxIntegral {
  cplx value = 0.0, coarse = 0.0;
  double rel_change = 0;      ///< |fine − coarse|/|fine|
  double closed_form = 0;     ///< (2π/Σρβ)^{1/2}(σ−1)∏(2π/k_j)^{1/2}
  double ratio = 0;           ///< Re(value)/closed_form
  double gaussian_reference = 0;  ///< exact integral with H ≡ 1
  bool converged = false;
  bool forced_unit_h = false;
  nlohmann::json to_json() const;
};

/// Tensor Gauss–Legendre integral of e^{f(ρe^{it};σ+iτ) − f(ρ;σ) + iτ log x − ik·t}/(σ+iτ) over the plan box.
/// unit_h replaces the integrand by its Gaussian model e^{−½Σρβτ²/(σ−1)² − ½Σk_jt_j²} (checks the rule).
BoxIntegral box_integral(const SaddlePoint& sp, const SumCache& cache, const QuadPlan& plan, bool unit_h = false);

// ------------------------------------------------------------------ truncation diagnostics

struct TruncationDiagnostics {
  double log_ratio = 0;          ///< log |F(z;s)|/F(ρ;σ)
  double log_bound = 0;          ///< −¼ Σ ρ_jM_j(τ,t_j)
  std::vector<double> M;         ///< M_j(τ,t_j) over p > ρ_j^{1/σ}
  double sum_rho_M = 0;
  double G = 0;                  ///< small-τ G-piece (|τ| < 2/(σ−1)); NaN otherwise
  double G_margin = 0;           ///< Σρ_jM_j − G
  std::vector<double> nu;
  nlohmann::json to_json() const;
};

TruncationDiagnostics ratio_bound_check(const SaddlePoint& sp, const SumCache& cache, const std::vector<double>& t,
                                        double tau);

struct ExtraDecayReport {
  double tau = 0, lhs = 0, rhs = 0;
  bool in_range = true;          ///< 1 < |τ|/(σ−1) ≤ e^{min E_j(z)}
  bool holds = false;
  nlohmann::json to_json() const;
};

ExtraDecayReport extradecay_check(const SaddlePoint& sp, const SumCache& cache, double tau);

/// M_j(τ,t) = Σ_{p∈E_j, p>p_lo} (1 − cos(τ log p − t))/p^σ.
double M_sum(const SumCache& cache, int cell, double sigma, double tau, double t, double p_lo);

// ------------------------------------------------------------------ elementary inequalities

/// sin²(Σa) ≤ m Σ sin²a.
bool trig_prop1(const std::vector<double>& a);
/// sin²(mean a) ≥ (∏ sin²a)^{1/m}; returns the margin lhs − rhs.
double trig_prop2_margin(const std::vector<double>& a);

/// ∫_u^∞ (1+t²)^{−γ} dt and the bound sqrt(π²/(2γ))(1+u²)^{−γ/2}.
std::pair<double, double> gen_int_est(double gamma, double u);

}  // namespace omegalab
