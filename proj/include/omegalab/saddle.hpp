#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "omegalab/census.hpp"
#include "omegalab/numeric.hpp"
#include "omegalab/sums.hpp"

namespace omegalab {

/// Per-cell prime sums at (ρ, σ); u = p^σ−1, a = p^σ, λ = log p.
struct CellTerms {
  double A = 0;     ///< Σ 1/(u+ρ)                       = f_z
  double B = 0;     ///< Σ 1/(u+ρ)²                      = −f_zz
  double L = 0;     ///< Σ aλ/(u(u+ρ))                   (f_s = −ρL)
  double D = 0;     ///< Σ aλ/(u+ρ)²                     = −f_sz
  double Fss = 0;   ///< ρ Σ λ²a(a²+ρ−1)/(u²(u+ρ)²)      (cell part of f_ss)
  double logF = 0;  ///< Σ log(1+ρ/u)                    (cell part of f)
  double ajj = 0;   ///< Σ u/(u+ρ)²                      (Jacobian diagonal)
  double A_unc = 0, L_unc = 0, logF_unc = 0;  ///< tail-model half-widths
};

/// Everything at a fixed real σ that does not depend on ρ.
class SigmaSlice {
 public:
  SigmaSlice(const SumCache& cache, double sigma);

  double sigma() const { return sigma_; }
  const SumCache& cache() const { return *cache_; }
  int cells() const { return static_cast<int>(cells_.size()); }

  /// Full set of sums; when !full only A and L are filled.
  CellTerms eval(int cell, double rho, bool full = true) const;
  /// ρ·Σ 1/(p^σ−1+ρ), the inner map (strictly increasing in ρ).
  double inner(int cell, double rho) const { return rho * eval(cell, rho, false).A; }
  /// sup over ρ of the inner map (number of primes in the cell, or +inf).
  double inner_sup(int cell) const;
  /// True when some prime p of the cell has 0 < p^σ − ρ < 1.
  bool guard_zone(int cell, double rho) const;

 private:
  struct Cell {
    std::vector<double> u, lam;                    // head primes
    std::vector<SumCache::PowerBlock> suffix;      // suffix sums of bin blocks
    Estimate T0, T1, T2;                           // tail beyond P
  };
  void add_direct(CellTerms& t, double u, double lam, double rho, bool full) const;

  const SumCache* cache_;
  double sigma_;
  std::vector<Cell> cells_;
};

// ------------------------------------------------------------------ derivatives

struct FDerivatives {
  double f = 0;
  std::vector<double> fz, fzz, fsz;
  double fs = 0, fss = 0;
  double fs_unc = 0;  ///< tail half-width of f_s
};

/// f = log F(ρ;σ) and its first/second partial derivatives.
FDerivatives f_derivatives(const SumCache& cache, const std::vector<double>& rho, double sigma);
FDerivatives f_derivatives(const SigmaSlice& slice, const std::vector<double>& rho);

// ------------------------------------------------------------------ solvers

struct SaddleOptions {
  double tol_outer = 1e-9;  ///< relative to log x
  double tol_inner = 1e-10; ///< relative to k_j
  double tail_tol = 1e-3;   ///< refuse when tail half-width of f_s exceeds tail_tol·log x
  double sigma_max = 40.0;  ///< largest σ tried when the bracket must be widened (p^σ stays finite)
};

/// ρ_j solving ρ Σ 1/(p^σ−1+ρ) = k (0 for k = 0).
double solve_inner(const SigmaSlice& slice, int cell, int k, double tol = 1e-15);

struct Jacobian {
  std::vector<int> active;              ///< cells with k_j ≥ 1 (matrix order)
  std::vector<std::vector<double>> m;   ///< (m+1)×(m+1) arrow matrix
  double det = 0;                       ///< arrow expansion
  int sign = 0;
};

Jacobian jacobian(const SigmaSlice& slice, const std::vector<double>& rho, const std::vector<int>& active);
Jacobian jacobian(const SumCache& cache, const std::vector<double>& rho, double sigma);

struct SaddlePoint {
  double log_x = 0;
  KVector k;
  double sigma = 0;
  std::vector<double> rho;
  double log_z = 0;                 ///< 1/(σ−1)
  double residual_logx = 0;         ///< Σρ_jL_j − log x
  std::vector<double> residual_k;   ///< ρ_jA_j − k_j
  std::vector<Estimate> E_z;        ///< E_j(z)
  std::vector<double> eta;          ///< ρ_jE_j(z)/k_j − 1
  std::vector<double> alpha, beta, gamma;
  double logF = 0;
  double sum_rho_beta = 0;          ///< Σ ρ_jβ_j (σ−1)-normalised
  double det = 0;
  int det_sign = 0;
  double bracket_lo = 0, bracket_hi = 0;
  bool in_bracket = true;           ///< root found in (σ₂, σ₁]
  double tail_unc = 0;              ///< Σ ρ_j·half-width of the L tail
  bool tail_ok = true;
  bool guard_flag = false;
  int iterations = 0;
  nlohmann::json to_json() const;
};

SaddlePoint solve_saddle(const SumCache& cache, double log_x, const KVector& k, SaddleOptions opt = {});

/// Outer map σ ↦ Σ_j ρ_j(σ)L_j − log x.
double outer_map(const SumCache& cache, double log_x, const KVector& k, double sigma);

struct DirichletParams {
  double sigma = 0;
  std::vector<double> rho;
};

/// Closed-form leading terms for unions of progressions.
DirichletParams dirichlet_params(double log_x, const KVector& k, const Partition& ap);

/// Lower end of the σ bracket, 1 + 1/(log x·(log log x)²).
double sigma_lower(double log_x);

}  // namespace omegalab
