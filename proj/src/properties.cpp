#include "omegalab/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "omegalab/error.hpp"
#include "omegalab/quad.hpp"

namespace omegalab {

namespace {
constexpr double kPi = std::numbers::pi;
}

nlohmann::json RatioSweep::to_json() const {
  return {{"points", points}, {"violations", violations}, {"worst", worst}};
}

RatioSweep ratio_sweep(const SumCache& cache) {
  RatioSweep s;
  const double logP = std::log(cache.cutoff());
  for (int a = 0; a < 10; ++a) {
    const double sigma = 1.0 + std::pow(10.0, -2.0 + 2.0 * a / 9.0);  // 1.01 … 2
    for (int b = 0; b < 10; ++b) {
      const double Y = std::exp(std::log(10.0) + (logP - std::log(10.0)) * b / 9.0);
      RatioSet r = ratios(cache, sigma, Y);
      for (const auto& c : r.cells) {
        ++s.points;
        if (c.beta_Y <= 0) continue;
        const double q = c.alpha_Y * c.alpha_Y / (12.0 * c.beta_Y);
        s.worst = std::max(s.worst, q);
        if (q > 1.0) ++s.violations;
      }
    }
  }
  return s;
}

nlohmann::json TrigPropSweep::to_json() const {
  return {{"samples", samples},
          {"prop1_violations", prop1_violations},
          {"prop2_half_period_violations", prop2_half_period_violations},
          {"prop2_general_violations", prop2_general_violations}};
}

TrigPropSweep trigprop_sweep(std::uint64_t seed, int samples, int max_m) {
  if (max_m < 1) throw ValidationError("trigprop_sweep: max_m must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> mdist(1, max_m);
  std::uniform_real_distribution<double> wide(-2 * kPi, 2 * kPi), unit(0.0, 1.0);
  std::uniform_int_distribution<int> kdist(-2, 1);
  TrigPropSweep s;
  s.samples = samples;
  for (int i = 0; i < samples; ++i) {
    const int m = mdist(rng);
    std::vector<double> a(m), h(m);
    for (auto& v : a) v = wide(rng);
    const double base = kdist(rng) * kPi;
    for (auto& v : h) v = base + kPi * (1e-9 + (1 - 2e-9) * unit(rng));
    if (!trig_prop1(a)) ++s.prop1_violations;
    if (trig_prop2_margin(h) < -1e-12) ++s.prop2_half_period_violations;
    if (trig_prop2_margin(a) < -1e-12) ++s.prop2_general_violations;
  }
  return s;
}

nlohmann::json GenIntSweep::to_json() const {
  return {{"samples", samples}, {"violations", violations}, {"worst", worst}};
}

GenIntSweep genint_sweep(std::uint64_t seed, int samples) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> g(2.0, 50.0), u(0.0, 10.0);
  GenIntSweep s;
  s.samples = samples;
  for (int i = 0; i < samples; ++i) {
    double uu = u(rng);
    if (uu == 0.0) uu = 1e-12;
    auto [val, bound] = gen_int_est(g(rng), uu);
    s.worst = std::max(s.worst, val / bound);
    if (val > bound) ++s.violations;
  }
  return s;
}

nlohmann::json MShiftSweep::to_json() const {
  return {{"samples", samples},
          {"subadditive_violations", subadditive_violations},
          {"doubling_violations", doubling_violations}};
}

MShiftSweep mshift_sweep(const SumCache& cache, int cell, double sigma, double p_lo, std::uint64_t seed, int samples) {
  std::mt19937_64 rng(seed);
  // |τ| ≤ 1 keeps every evaluation on the binned expansion
  std::uniform_real_distribution<double> tau(-1.0, 1.0), t(-kPi, kPi);
  MShiftSweep s;
  s.samples = samples;
  auto M = [&](double ta, double tt) { return M_sum(cache, cell, sigma, ta, tt, p_lo); };
  for (int i = 0; i < samples; ++i) {
    const double t1 = tau(rng) / 2, t2 = tau(rng) / 2, a1 = t(rng), a2 = t(rng);
    const double lhs = M(t1, a1) + M(t2, a2), rhs = 0.5 * M(t1 + t2, a1 + a2);
    if (lhs < rhs * (1 - 1e-10) - 1e-14) ++s.subadditive_violations;
    const double d = M(t1, a1), r2 = M(2 * t1, 0.0) * std::sin(a1) * std::sin(a1);
    if (d < r2 * (1 - 1e-10) - 1e-14) ++s.doubling_violations;
  }
  return s;
}

nlohmann::json LemUnifSweep::to_json() const {
  return {{"z", z},
          {"slack", slack},
          {"points", points},
          {"violations", violations},
          {"corrected_violations", corrected_violations},
          {"tail_violations", tail_violations},
          {"worst_eta", worst_eta},
          {"worst_excess", worst_excess}};
}

LemUnifSweep lemunif_sweep(const SumCache& cache, double z, double eta_lo, double eta_hi, int points, double slack) {
  if (points < 2) throw ValidationError("lemunif_sweep: need at least 2 points");
  LemUnifSweep s;
  s.z = z;
  s.slack = slack;
  s.points = points;
  s.worst_excess = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double eta = eta_lo * std::pow(eta_hi / eta_lo, double(i) / (points - 1));
    LemUnifReport r = lemunif_check(cache, -1, z, eta, slack);
    if (!r.ok) ++s.violations;
    if (!r.corrected_ok) ++s.corrected_violations;
    if (!r.tail_ok) ++s.tail_violations;
    if (r.R - r.bound > s.worst_excess) {
      s.worst_excess = r.R - r.bound;
      s.worst_eta = eta;
    }
  }
  return s;
}

nlohmann::json AngularSweep::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"value", r.value}, {"predicted", r.predicted}, {"envelope", r.envelope}, {"rel_err", r.rel_err}});
  return {{"points", points}, {"slack", slack}, {"rows", out}};
}

AngularSweep angular_sweep(const PrimeTable& table, const std::vector<double>& ys, const std::vector<double>& ts,
                           int intervals, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, double>> iv;
  for (int i = 0; i < intervals; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 0.05) b = std::min(1.0, a + 0.05), a = b - 0.05;
    iv.emplace_back(a, b);
  }
  AngularSweep s;
  for (double y : ys)
    for (double t : ts)
      for (auto [a, b] : iv) {
        AngularReport r = angular_sum(table, y, t, a, b);
        s.slack = std::max(s.slack, std::abs(r.value - r.predicted) / r.envelope);
        s.rows.push_back(r);
        ++s.points;
      }
  return s;
}

nlohmann::json TruncationSweep::to_json() const {
  return {{"points", points}, {"fitted_C", fitted_C}, {"min_G_margin", min_G_margin}};
}

TruncationSweep truncation_sweep(const SaddlePoint& sp, const SumCache& cache, const std::vector<double>& taus,
                                 const std::vector<double>& ts) {
  TruncationSweep s;
  double worst = -std::numeric_limits<double>::infinity();
  s.min_G_margin = std::numeric_limits<double>::infinity();
  for (double tau : taus)
    for (double t : ts) {
      std::vector<double> tv(sp.k.size(), t);
      TruncationDiagnostics d = ratio_bound_check(sp, cache, tv, tau);
      worst = std::max(worst, d.log_ratio - d.log_bound);
      if (!std::isnan(d.G_margin)) s.min_G_margin = std::min(s.min_G_margin, d.G_margin);
      ++s.points;
    }
  s.fitted_C = std::exp(std::max(worst, 0.0));
  return s;
}

}  // namespace omegalab
