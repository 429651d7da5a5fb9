#include "omegalab/sums.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "omegalab/error.hpp"

namespace omegalab {

namespace {

constexpr int kA = kMaxLog + 1;

std::size_t moment_index(std::size_t bin, int k, int a, int i) {
  return ((bin * kMaxPower + (k - 1)) * kA + a) * kTaylorTerms + i;
}

}  // namespace

SumCache::SumCache(std::shared_ptr<const PrimeTable> table, Partition partition, SumCacheOptions opt)
    : table_(std::move(table)), partition_(std::move(partition)) {
  if (!table_) throw ValidationError("SumCache: missing prime table");
  cutoff_ = std::min<std::uint64_t>(opt.cutoff, table_->limit());
  if (cutoff_ < 2) throw ValidationError("SumCache: cutoff below 2");
  head_ = std::min<std::uint64_t>(opt.head_limit, cutoff_);
  bin_width_ = opt.bin_width;
  const auto primes = table_->primes();
  const int nc = partition_.cells();
  body_end_ = table_->count_upto(static_cast<double>(cutoff_));
  body_begin_ = table_->count_upto(static_cast<double>(head_));
  cell_.resize(body_end_);
  count_.assign(nc, 0);
  head_p_.assign(nc, {});
  head_l_.assign(nc, {});
  for (std::size_t i = 0; i < body_end_; ++i) {
    int c = partition_.classify(primes[i]);
    cell_[i] = static_cast<std::uint8_t>(c);
    ++count_[c];
    if (i < body_begin_) {
      head_p_[c].push_back(primes[i]);
      head_l_[c].push_back(std::log(static_cast<double>(primes[i])));
    }
  }
  v0_ = std::log(static_cast<double>(head_));
  moments_.assign(nc, {});
  if (body_end_ <= body_begin_) return;
  const double v1 = std::log(static_cast<double>(cutoff_));
  nbins_ = static_cast<std::size_t>(std::ceil((v1 - v0_) / bin_width_)) + 1;
  bin_start_.assign(nbins_ + 1, body_end_);
  for (int c = 0; c < nc; ++c) moments_[c].assign(nbins_ * kMaxPower * kA * kTaylorTerms, 0.0);
  std::size_t b = 0;
  bin_start_[0] = body_begin_;
  double pw[kTaylorTerms];
  for (std::size_t i = body_begin_; i < body_end_; ++i) {
    const double p = primes[i];
    const double lp = std::log(p);
    while (b + 1 < nbins_ && lp >= v0_ + (b + 1) * bin_width_) bin_start_[++b] = i;
    const double d = lp - (v0_ + (b + 0.5) * bin_width_);
    pw[0] = 1.0;
    for (int t = 1; t < kTaylorTerms; ++t) pw[t] = pw[t - 1] * d / t;
    double* m = moments_[cell_[i]].data();
    double pk = 1.0;
    for (int k = 1; k <= kMaxPower; ++k) {
      pk /= p;
      double base = pk;
      for (int a = 0; a < kA; ++a) {
        double* dst = m + moment_index(b, k, a, 0);
        for (int t = 0; t < kTaylorTerms; ++t) dst[t] += base * pw[t];
        base *= lp;
      }
    }
  }
  for (std::size_t bb = b + 1; bb <= nbins_; ++bb) bin_start_[bb] = body_end_;
}

std::shared_ptr<SumCache> make_sum_cache(std::shared_ptr<const PrimeTable> table, const Partition& partition,
                                         SumCacheOptions opt) {
  return std::make_shared<SumCache>(std::move(table), partition, opt);
}

std::size_t SumCache::bin_index(double v) const {
  if (v <= v0_) return 0;
  return std::min(nbins_ - 1, static_cast<std::size_t>((v - v0_) / bin_width_));
}

// Σ over body primes of the cell with p ≤ e^{v_hi}: log^a p · p^{-k(1+eps)}.
double SumCache::body_taylor(int cell, int k, int a, double eps, double v_hi) const {
  if (nbins_ == 0) return 0.0;
  const auto primes = table_->primes();
  std::size_t idx_hi = body_end_;
  if (v_hi < std::log(static_cast<double>(cutoff_)) + 1e-12) {
    double Y = std::exp(v_hi);
    idx_hi = std::max(body_begin_, std::min(body_end_, table_->count_upto(Y)));
  }
  if (!taylor_ok(std::abs(eps))) return body_direct(cell, k, a, 1.0 + eps, 0, static_cast<double>(primes[idx_hi - 1]));
  KahanSum acc;
  const double* m = moments_[cell].data();
  std::size_t b = 0;
  for (; b < nbins_ && bin_start_[b + 1] <= idx_hi; ++b) {
    if (bin_start_[b + 1] == bin_start_[b]) continue;
    const double c = v0_ + (b + 0.5) * bin_width_;
    const double x = -k * eps;
    const double* src = m + moment_index(b, k, a, 0);
    double poly = src[kTaylorTerms - 1];
    for (int t = kTaylorTerms - 2; t >= 0; --t) poly = poly * x + src[t];
    acc += std::exp(x * c) * poly;
  }
  if (b < nbins_) {
    for (std::size_t i = bin_start_[b]; i < idx_hi; ++i) {
      if (cell_[i] != cell) continue;
      const double lp = std::log(static_cast<double>(primes[i]));
      acc += std::pow(lp, a) * std::exp(-k * (1.0 + eps) * lp);
    }
  }
  return acc.value();
}

double SumCache::body_direct(int cell, int k, int a, double sigma, double, double y_hi) const {
  const auto primes = table_->primes();
  KahanSum acc;
  for (std::size_t i = body_begin_; i < body_end_ && primes[i] <= y_hi; ++i) {
    if (cell_[i] != cell) continue;
    const double lp = std::log(static_cast<double>(primes[i]));
    acc += std::pow(lp, a) * std::exp(-k * sigma * lp);
  }
  return acc.value();
}

double SumCache::truncated_sum(int cell, int l, double sigma, double Y) const {
  if (l < 0 || l > kMaxLog) throw ValidationError("truncated_sum: l must be in 0..3");
  if (sigma < 1.0) throw DomainError("truncated_sum: sigma must be at least 1");
  if (Y > static_cast<double>(cutoff_) * (1 + 1e-12)) throw DomainError("truncated_sum: Y exceeds the cutoff");
  if (cell < 0) {
    double s = 0;
    for (int c = 0; c < cells(); ++c) s += truncated_sum(c, l, sigma, Y);
    return s;
  }
  if (cell >= cells()) throw ValidationError("truncated_sum: cell out of range");
  KahanSum acc;
  const auto& hp = head_p_[cell];
  const auto& hl = head_l_[cell];
  for (std::size_t i = 0; i < hp.size() && hp[i] <= Y; ++i) acc += std::pow(hl[i], l) * std::exp(-sigma * hl[i]);
  if (Y > static_cast<double>(head_)) acc += body_taylor(cell, 1, l, sigma - 1.0, std::log(Y));
  return acc.value();
}

double SumCache::reciprocal_sum(int cell, double t) const { return truncated_sum(cell, 0, 1.0, t); }

Estimate SumCache::tail(int cell, int l, double sigma, double v0, double v1) const {
  Estimate e;
  if (!(v1 > v0)) return e;
  if (std::isinf(v1) && sigma <= 1.0) throw DomainError("tail: divergent tail at sigma <= 1");
  if (cell < 0) {
    double I = log_moment_integral(l, sigma - 1.0, v0, v1);
    e.value = I;
    e.uncertainty = std::abs(I) * pnt_relative_error(v0);
    return e;
  }
  double half = 0;
  for (const auto& piece : partition_.tail_density(cell, v0, v1)) {
    double I = log_moment_integral(l, sigma - 1.0, piece.v0, piece.v1);
    e.value += 0.5 * (piece.lo + piece.hi) * I;
    half += 0.5 * (piece.hi - piece.lo) * std::abs(I);
  }
  e.uncertainty = half + std::abs(e.value) * pnt_relative_error(v0);
  return e;
}

cplx SumCache::tail_complex(int cell, cplx s, double v0, double* halfwidth) const {
  cplx mid = 0.0;
  double half = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  if (cell < 0) {
    mid = log_moment_integral(0, s - 1.0, v0, inf);
  } else {
    for (const auto& piece : partition_.tail_density(cell, v0, inf)) {
      cplx I = log_moment_integral(0, s - 1.0, piece.v0, piece.v1);
      mid += 0.5 * (piece.lo + piece.hi) * I;
      // |∫ density·e^{-(s-1)v}/v| ≤ ∫ e^{-(σ-1)v}/v
      half += 0.5 * (piece.hi - piece.lo) * log_moment_integral(0, std::real(s) - 1.0, piece.v0, piece.v1);
    }
  }
  if (halfwidth) *halfwidth = half + std::abs(mid) * pnt_relative_error(v0);
  return mid;
}

Estimate SumCache::sum_model_log(int cell, int l, double sigma, double logY) const {
  const double lP = std::log(static_cast<double>(cutoff_));
  Estimate e;
  if (logY <= lP) {
    e.value = truncated_sum(cell, l, sigma, std::min(std::exp(logY), static_cast<double>(cutoff_)));
    return e;
  }
  e = tail(cell, l, sigma, lP, logY);
  e.value += truncated_sum(cell, l, sigma, static_cast<double>(cutoff_));
  return e;
}

Estimate SumCache::sum_model(int cell, int l, double sigma, double Y) const {
  return sum_model_log(cell, l, sigma, std::log(Y));
}

Estimate SumCache::weighted_sum(int cell, int l, double sigma, bool with_tail) const {
  if (!(sigma > 1.0)) throw DomainError("weighted_sum: sigma must exceed 1");
  Estimate e;
  if (with_tail) e = tail(cell, l, sigma, std::log(static_cast<double>(cutoff_)), std::numeric_limits<double>::infinity());
  e.value += truncated_sum(cell, l, sigma, static_cast<double>(cutoff_));
  return e;
}

std::array<std::array<double, kMaxLog + 1>, kMaxPower> SumCache::body_power_sums(int cell, double sigma) const {
  std::array<std::array<double, kA>, kMaxPower> out{};
  if (cell < 0) {
    for (int c = 0; c < cells(); ++c) {
      auto part = body_power_sums(c, sigma);
      for (int k = 0; k < kMaxPower; ++k)
        for (int a = 0; a < kA; ++a) out[k][a] += part[k][a];
    }
    return out;
  }
  const double vmax = std::log(static_cast<double>(cutoff_)) + 1.0;
  for (int k = 1; k <= kMaxPower; ++k)
    for (int a = 0; a < kA; ++a) out[k - 1][a] = body_taylor(cell, k, a, sigma - 1.0, vmax);
  return out;
}

std::array<cplx, kMaxPower> SumCache::power_sums_complex(int cell, cplx s, double p_lo) const {
  std::array<cplx, kMaxPower> out{};
  if (cell < 0) {
    for (int c = 0; c < cells(); ++c) {
      auto part = power_sums_complex(c, s, p_lo);
      for (int k = 0; k < kMaxPower; ++k) out[k] += part[k];
    }
    return out;
  }
  const auto& hp = head_p_[cell];
  const auto& hl = head_l_[cell];
  for (std::size_t i = 0; i < hp.size(); ++i) {
    if (hp[i] <= p_lo) continue;
    cplx w = std::exp(-s * hl[i]);
    cplx wk = 1.0;
    for (int k = 0; k < kMaxPower; ++k) {
      wk *= w;
      out[k] += wk;
    }
  }
  if (nbins_ == 0) return out;
  const cplx eps = s - 1.0;
  const auto primes = table_->primes();
  if (!taylor_ok(std::abs(eps))) {
    for (std::size_t i = body_begin_; i < body_end_; ++i) {
      if (cell_[i] != cell || primes[i] <= p_lo) continue;
      cplx w = std::exp(-s * std::log(static_cast<double>(primes[i])));
      cplx wk = 1.0;
      for (int k = 0; k < kMaxPower; ++k) {
        wk *= w;
        out[k] += wk;
      }
    }
    return out;
  }
  const double* m = moments_[cell].data();
  std::size_t first_bin = 0;
  if (p_lo >= static_cast<double>(cutoff_)) return out;
  if (p_lo > static_cast<double>(head_)) {
    // primes in the bin containing p_lo are summed directly above p_lo
    first_bin = bin_index(std::log(p_lo));
    std::size_t idx = std::max(bin_start_[first_bin], table_->count_upto(p_lo));
    for (std::size_t i = idx; i < bin_start_[first_bin + 1]; ++i) {
      if (cell_[i] != cell) continue;
      cplx w = std::exp(-s * std::log(static_cast<double>(primes[i])));
      cplx wk = 1.0;
      for (int k = 0; k < kMaxPower; ++k) {
        wk *= w;
        out[k] += wk;
      }
    }
    ++first_bin;
  }
  for (std::size_t b = first_bin; b < nbins_; ++b) {
    if (bin_start_[b + 1] == bin_start_[b]) continue;
    const double c = v0_ + (b + 0.5) * bin_width_;
    for (int k = 1; k <= kMaxPower; ++k) {
      const cplx x = -static_cast<double>(k) * eps;
      const double* src = m + moment_index(b, k, 0, 0);
      cplx poly = src[kTaylorTerms - 1];
      for (int t = kTaylorTerms - 2; t >= 0; --t) poly = poly * x + src[t];
      out[k - 1] += std::exp(x * c) * poly;
    }
  }
  return out;
}

std::vector<SumCache::PowerBlock> SumCache::bin_power_sums(int cell, double sigma) const {
  std::vector<PowerBlock> out(nbins_);
  if (cell < 0 || cell >= cells()) throw ValidationError("bin_power_sums: cell out of range");
  const double eps = sigma - 1.0;
  const auto primes = table_->primes();
  const double* m = moments_.empty() || moments_[cell].empty() ? nullptr : moments_[cell].data();
  for (std::size_t b = 0; b < nbins_; ++b) {
    if (bin_start_[b + 1] == bin_start_[b]) continue;
    auto& blk = out[b];
    if (!taylor_ok(std::abs(eps))) {
      for (std::size_t i = bin_start_[b]; i < bin_start_[b + 1]; ++i) {
        if (cell_[i] != cell) continue;
        const double lp = std::log(static_cast<double>(primes[i]));
        const double w = std::exp(-sigma * lp);
        double wk = 1.0;
        for (int k = 0; k < kMaxPower; ++k) {
          wk *= w;
          double la = 1.0;
          for (int a = 0; a < kA; ++a, la *= lp) blk[k][a] += la * wk;
        }
      }
      continue;
    }
    const double c = v0_ + (b + 0.5) * bin_width_;
    for (int k = 1; k <= kMaxPower; ++k) {
      const double x = -k * eps;
      const double e = std::exp(x * c);
      for (int a = 0; a < kA; ++a) {
        const double* src = m + moment_index(b, k, a, 0);
        double poly = src[kTaylorTerms - 1];
        for (int t = kTaylorTerms - 2; t >= 0; --t) poly = poly * x + src[t];
        blk[k - 1][a] = e * poly;
      }
    }
  }
  return out;
}

bool SumCache::finite_cell(int cell) const {
  if (cell < 0) return false;
  const double v0 = std::log(static_cast<double>(cutoff_));
  for (const auto& piece : partition_.tail_density(cell, v0, std::numeric_limits<double>::infinity()))
    if (piece.hi > 0.0) return false;
  return true;
}

// ------------------------------------------------------------------ ratios

nlohmann::json RatioSet::to_json() const {
  nlohmann::json j;
  j["sigma"] = sigma;
  j["Y"] = Y;
  auto cellsj = nlohmann::json::array();
  for (const auto& c : cells) {
    cellsj.push_back({{"alpha", {{"value", c.alpha.value}, {"uncertainty", c.alpha.uncertainty}}},
                      {"beta", {{"value", c.beta.value}, {"uncertainty", c.beta.uncertainty}}},
                      {"gamma", {{"value", c.gamma.value}, {"uncertainty", c.gamma.uncertainty}}},
                      {"alpha_Y", c.alpha_Y},
                      {"beta_Y", c.beta_Y},
                      {"gamma_Y", c.gamma_Y}});
  }
  j["cells"] = cellsj;
  return j;
}

RatioSet ratios(const SumCache& cache, double sigma, double Y) {
  if (!(sigma > 1.0)) throw DomainError("ratios: sigma must exceed 1");
  RatioSet r;
  r.sigma = sigma;
  r.Y = Y;
  const double e = sigma - 1.0;
  const double scale[4] = {1.0, e, e * e, 0.5 * e * e * e};
  for (int j = 0; j < cache.cells(); ++j) {
    CellRatios c;
    Estimate w[4];
    for (int l = 1; l <= 3; ++l) {
      w[l] = cache.weighted_sum(j, l, sigma);
      w[l].value *= scale[l];
      w[l].uncertainty *= scale[l];
    }
    c.alpha = w[1];
    c.beta = w[2];
    c.gamma = w[3];
    c.alpha_Y = scale[1] * cache.sum_model(j, 1, sigma, Y).value;
    c.beta_Y = scale[2] * cache.sum_model(j, 2, sigma, Y).value;
    c.gamma_Y = scale[3] * cache.sum_model(j, 3, sigma, Y).value;
    r.cells.push_back(c);
  }
  return r;
}

// ------------------------------------------------------------------ hypotheses

nlohmann::json HypothesisReport::to_json() const {
  nlohmann::json j;
  j["sigma"] = sigma;
  j["log_Z"] = 1.0 / (sigma - 1.0);
  j["tail_dominated"] = tail_dominated;
  j["H1"] = H1;
  j["H2"] = H2;
  j["H3"] = H3;
  j["h1_witness"] = h1_witness;
  j["j_double_prime"] = j_dd;
  j["constants"] = {{"c1", c1}, {"c2", c2}, {"c3", c3}};
  j["h1_rhs"] = {h1_rhs1, h1_rhs2};
  auto cellsj = nlohmann::json::array();
  for (std::size_t i = 0; i < E_Z.size(); ++i)
    cellsj.push_back({{"E_Z", E_Z[i].value},
                      {"E_Z_uncertainty", E_Z[i].uncertainty},
                      {"logsum_Z", logsum_Z[i].value},
                      {"logsum_Z_uncertainty", logsum_Z[i].uncertainty},
                      {"cond1", static_cast<bool>(h1_cond1[i])},
                      {"cond2", static_cast<bool>(h1_cond2[i])}});
  j["cells"] = cellsj;
  j["H2_sides"] = {h2_lhs, h2_rhs};
  j["H3_sides"] = {h3_lhs, h3_rhs};
  return j;
}

HypothesisReport check_hypotheses(const SumCache& cache, double sigma, const std::vector<int>& k,
                                  HConstants constants) {
  if (!(sigma > 1.0)) throw DomainError("check_hypotheses: sigma must exceed 1");
  const int n = cache.cells();
  if (static_cast<int>(k.size()) != n) throw ValidationError("check_hypotheses: k has wrong length");
  HypothesisReport r;
  r.sigma = sigma;
  const double e = sigma - 1.0;
  const double logZ = 1.0 / e;
  r.Z = logZ < 700 ? std::exp(logZ) : std::numeric_limits<double>::infinity();
  r.tail_dominated = logZ > std::log(cache.cutoff());
  r.c1 = constants.c1 > 0 ? constants.c1 : 1.0 / (2.0 * n);
  r.c2 = constants.c2 > 0 ? constants.c2 : 1.0 / (2.0 * n);
  r.c3 = constants.c3;
  r.h1_rhs1 = r.c1 * std::log(1.0 / e);
  r.h1_rhs2 = r.c2 / e;
  for (int j = 0; j < n; ++j) {
    r.E_Z.push_back(cache.sum_model_log(j, 0, 1.0, logZ));
    r.logsum_Z.push_back(cache.sum_model_log(j, 1, 1.0, logZ));
    bool c1 = r.E_Z[j].value >= r.h1_rhs1;
    bool c2 = r.logsum_Z[j].value >= r.h1_rhs2;
    r.h1_cond1.push_back(c1);
    r.h1_cond2.push_back(c2);
    if (c1 && c2 && r.h1_witness < 0) r.h1_witness = j;
  }
  r.H1 = r.h1_witness >= 0;
  double best = -1;
  std::vector<double> w2(n), w3(n);
  for (int j = 0; j < n; ++j) {
    w2[j] = cache.weighted_sum(j, 2, sigma).value;
    w3[j] = cache.weighted_sum(j, 3, sigma).value;
    double ez = r.E_Z[j].value;
    double score = ez > 0 ? e * e * e * (k[j] / ez) * w3[j] : 0.0;
    if (score > best) {
      best = score;
      r.j_dd = j;
    }
  }
  const int jd = r.j_dd;
  r.h2_lhs = e * e * e * w3[jd];
  r.h2_rhs = r.c3 * e * e * w2[jd];
  r.H2 = r.h2_lhs <= r.h2_rhs;
  const double sp = 1.0 + 0.5 * e;
  double full = cache.weighted_sum(jd, 2, sp).value;
  double below = cache.sum_model_log(jd, 2, sp, 1.0 / (sp - 1.0)).value;
  r.h3_lhs = full - below;
  r.h3_rhs = r.c3 * w2[jd];
  r.H3 = r.h3_lhs <= r.h3_rhs;
  return r;
}

// ------------------------------------------------------------------ angular statistic

AngularReport angular_sum(const PrimeTable& table, double y, double t, double a, double b) {
  if (y > static_cast<double>(table.limit())) throw DomainError("angular_sum: y exceeds the table limit");
  if (!(std::abs(t) * std::log(y) > 1.0)) throw DomainError("angular_sum: need |t| log y > 1");
  if (!(0.0 <= a && a < b && b <= 1.0)) throw DomainError("angular_sum: need 0 <= a < b <= 1");
  KahanSum acc;
  const double c = t / (2.0 * std::numbers::pi);
  for (std::uint32_t p : table.primes()) {
    if (p > y) break;
    double v = c * std::log(static_cast<double>(p));
    double th = v - std::floor(v);
    if (th >= a && th <= b) acc += 1.0 / p;
  }
  AngularReport r;
  r.value = acc.value();
  const double L = std::abs(t) * std::log(y);
  r.predicted = (b - a) * std::log(L);
  r.envelope = r.predicted * (1.0 / std::log(y) + 7.0 / std::log(L) * (1.0 / L + 1.0));
  r.rel_err = std::abs(r.value - r.predicted) / r.predicted;
  return r;
}

// ------------------------------------------------------------------ uniformity lemma

double ein(double x) {
  if (x == 0.0) return 0.0;
  if (std::abs(x) < 10.0) {
    double term = 1.0, acc = 0.0;
    for (int k = 1; k < 200; ++k) {
      term *= -x / k;
      double add = -term / k;
      acc += add;
      if (std::abs(add) < 1e-18 * std::abs(acc)) break;
    }
    return acc;
  }
  return expint_e1(x) + std::log(x) + 0.57721566490153286061;
}

LemUnifReport lemunif_check(const SumCache& cache, int cell, double z, double eta, double slack) {
  if (z < 3.0) throw DomainError("lemunif_check: z must be at least 3");
  if (!(eta > 0.0)) throw DomainError("lemunif_check: eta must be positive");
  if (z > cache.cutoff()) throw DomainError("lemunif_check: z exceeds the cutoff");
  LemUnifReport r;
  r.z = z;
  r.eta = eta;
  const double lz = std::log(z);
  r.sigma = 1.0 + eta / lz;
  const double e = r.sigma - 1.0;
  const auto primes = cache.table().primes();
  KahanSum R, T;
  const std::size_t n = cache.table().count_upto(cache.cutoff());
  for (std::size_t i = 0; i < n; ++i) {
    if (cell >= 0 && cache.cell_of_prime(i) != cell) continue;
    const double p = primes[i];
    const double lp = std::log(p);
    if (p <= z)
      R += -std::expm1(-e * lp) / p;
    else
      T += std::exp(-r.sigma * lp);
  }
  r.R = R.value();
  Estimate tail = cache.tail(cell, 0, r.sigma, std::log(cache.cutoff()), std::numeric_limits<double>::infinity());
  r.tail = T.value() + tail.value + tail.uncertainty;
  r.tail_bound = 2.0 / eta;
  r.bound = (std::expm1(eta) - eta) / eta + slack / lz;
  r.corrected = ein(eta) + slack / lz;
  r.ok = r.R >= 0.0 && r.R <= r.bound;
  r.corrected_ok = r.R >= 0.0 && r.R <= r.corrected;
  r.tail_ok = r.tail <= r.tail_bound;
  return r;
}

// ------------------------------------------------------------------ progressions, Mertens

ApSumReport ap_weighted_sum_check(const PrimeTable& table, std::uint64_t q, std::uint64_t a, double sigma,
                                  std::vector<double> cutoffs) {
  if (!(sigma > 1.0)) throw DomainError("ap_weighted_sum_check: sigma must exceed 1");
  if (q < 1) throw ValidationError("ap_weighted_sum_check: q must be positive");
  a %= q;
  if (cutoffs.empty())
    for (double c : {1e6, 1e7, 1e8})
      if (c <= table.limit()) cutoffs.push_back(c);
  if (cutoffs.empty()) cutoffs.push_back(static_cast<double>(table.limit()));
  std::sort(cutoffs.begin(), cutoffs.end());
  ApSumReport r;
  r.q = q;
  r.a = a;
  r.sigma = sigma;
  const bool coprime = std::gcd(a, q) == 1;
  const double dens = coprime ? 1.0 / euler_phi(q) : 0.0;
  r.predicted = dens / (sigma - 1.0);
  KahanSum acc;
  std::size_t ci = 0;
  for (std::uint32_t p : table.primes()) {
    while (ci < cutoffs.size() && p > cutoffs[ci]) {
      double tl = dens * log_moment_integral(1, sigma - 1.0, std::log(cutoffs[ci]), std::numeric_limits<double>::infinity());
      r.values.push_back(acc.value() + tl);
      ++ci;
    }
    if (ci >= cutoffs.size()) break;
    if (p % q == a) acc += std::log(static_cast<double>(p)) * std::exp(-sigma * std::log(static_cast<double>(p)));
  }
  while (ci < cutoffs.size()) {
    double tl = dens * log_moment_integral(1, sigma - 1.0, std::log(cutoffs[ci]), std::numeric_limits<double>::infinity());
    r.values.push_back(acc.value() + tl);
    ++ci;
  }
  r.cutoffs = cutoffs;
  for (double v : r.values) r.deviations.push_back(v - r.predicted);
  bool increasing = r.deviations.size() >= 2;
  for (std::size_t i = 1; i < r.deviations.size(); ++i)
    if (std::abs(r.deviations[i]) <= std::abs(r.deviations[i - 1]) + 1e-9) increasing = false;
  r.growing = increasing && std::abs(r.deviations.back()) > 2.0 * std::abs(r.deviations.front()) + 0.05;
  return r;
}

MertensFit fit_mertens(const PrimeTable& table) {
  MertensFit f;
  const double lim = static_cast<double>(table.limit());
  std::vector<double> grid;
  for (double t = 1e3; t < lim; t *= std::sqrt(10.0)) grid.push_back(t);
  grid.push_back(lim);
  KahanSum acc;
  std::size_t gi = 0;
  for (std::uint32_t p : table.primes()) {
    while (gi < grid.size() && p > grid[gi]) {
      f.t.push_back(grid[gi]);
      f.deviation.push_back(acc.value() - std::log(std::log(grid[gi])));
      ++gi;
    }
    acc += 1.0 / p;
  }
  while (gi < grid.size()) {
    f.t.push_back(grid[gi]);
    f.deviation.push_back(acc.value() - std::log(std::log(grid[gi])));
    ++gi;
  }
  f.M = f.deviation.back();
  return f;
}

}  // namespace omegalab
