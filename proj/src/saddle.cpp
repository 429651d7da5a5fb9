#include "omegalab/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "omegalab/error.hpp"

namespace omegalab {

namespace {

constexpr double kSeriesLimit = 0.05;  // largest ρ·p^{-σ} handled by the w-series
constexpr int kOrder = kMaxPower;

double log_p_of(const SumCache& c, std::size_t i) { return std::log(static_cast<double>(c.table().primes()[i])); }

}  // namespace

// ------------------------------------------------------------------ slice

SigmaSlice::SigmaSlice(const SumCache& cache, double sigma) : cache_(&cache), sigma_(sigma) {
  if (!(sigma > 1.0)) throw DomainError("sigma must exceed 1");
  const int nc = cache.cells();
  const double vP = std::log(cache.cutoff());
  const double inf = std::numeric_limits<double>::infinity();
  cells_.resize(nc);
  for (int j = 0; j < nc; ++j) {
    Cell& c = cells_[j];
    const auto& hl = cache.head_logs(j);
    c.lam = hl;
    c.u.resize(hl.size());
    for (std::size_t i = 0; i < hl.size(); ++i) c.u[i] = std::expm1(sigma * hl[i]);
    auto bins = cache.bin_power_sums(j, sigma);
    c.suffix.assign(bins.size() + 1, SumCache::PowerBlock{});
    for (std::size_t b = bins.size(); b-- > 0;)
      for (int k = 0; k < kMaxPower; ++k)
        for (int a = 0; a <= kMaxLog; ++a) c.suffix[b][k][a] = c.suffix[b + 1][k][a] + bins[b][k][a];
    c.T0 = cache.tail(j, 0, sigma, vP, inf);
    c.T1 = cache.tail(j, 1, sigma, vP, inf);
    c.T2 = cache.tail(j, 2, sigma, vP, inf);
  }
}

void SigmaSlice::add_direct(CellTerms& t, double u, double lam, double rho, bool full) const {
  const double a = u + 1.0;
  const double d = u + rho;
  const double id = 1.0 / d;
  t.A += id;
  t.L += a * lam / u * id;
  if (!full) return;
  const double id2 = id * id;
  t.B += id2;
  t.D += a * lam * id2;
  t.Fss += rho * lam * lam * a * (a * a + rho - 1.0) / (u * u) * id2;
  t.logF += std::log1p(rho / u);
  t.ajj += u * id2;
}

CellTerms SigmaSlice::eval(int cell, double rho, bool full) const {
  if (cell < 0 || cell >= cells()) throw ValidationError("eval: cell out of range");
  if (rho < 0) throw DomainError("eval: rho must be nonnegative");
  const Cell& c = cells_[cell];
  CellTerms t;
  KahanSum A, L, B, D, Fss, logF, ajj;
  auto flush = [&](const CellTerms& x) {
    A += x.A;
    L += x.L;
    B += x.B;
    D += x.D;
    Fss += x.Fss;
    logF += x.logF;
    ajj += x.ajj;
  };
  for (std::size_t i = 0; i < c.u.size(); ++i) {
    CellTerms x;
    add_direct(x, c.u[i], c.lam[i], rho, full);
    flush(x);
  }
  // Body: direct below the series threshold, w-series above it.
  const SumCache& sc = *cache_;
  const std::size_t nb = sc.bin_count();
  std::size_t first_series_bin = 0;
  if (nb > 0) {
    const double vthr = std::log(std::max(rho, 1e-300) / kSeriesLimit) / sigma_;
    if (vthr > std::log(sc.head_limit())) {
      first_series_bin = vthr >= std::log(sc.cutoff()) ? nb : sc.bin_of_log(vthr) + 1;
      const std::size_t end = sc.bin_first(first_series_bin);
      for (std::size_t i = sc.body_begin(); i < end; ++i) {
        if (sc.cell_of_prime(i) != cell) continue;
        const double lam = log_p_of(sc, i);
        CellTerms x;
        add_direct(x, std::expm1(sigma_ * lam), lam, rho, full);
        flush(x);
      }
    }
  }
  if (nb > 0 && first_series_bin < nb) {
    const auto& S = c.suffix[first_series_bin];
    const double r = rho - 1.0;
    Series one(kOrder, 1.0);
    Series w(kOrder);
    w.c[1] = 1.0;
    const Series g = geometric(kOrder, r);           // 1/(1+rw)
    const Series g2 = g * g;
    const Series inv1mw = geometric(kOrder, -1.0);   // 1/(1−w)
    auto apply = [&](const Series& s, int a) {
      double v = 0;
      for (int k = 1; k <= kOrder; ++k) v += s.c[k] * S[k - 1][a];
      return v;
    };
    A += apply(w * g, 0);
    L += apply(w * g * inv1mw, 1);
    if (full) {
      B += apply(w * w * g2, 0);
      D += apply(w * g2, 1);
      Series q(kOrder, 1.0);
      q.c[2] = r;  // 1 + r w²
      Fss += rho * apply(w * q * g2 * inv1mw * inv1mw, 2);
      Series lf(kOrder);
      double pw = 1.0;
      for (int k = 1; k <= kOrder; ++k) {
        pw *= -r;
        lf.c[k] = (1.0 - pw) / k;  // log(1+rw) − log(1−w)
      }
      logF += apply(lf, 0);
      Series om(kOrder, 1.0);
      om.c[1] = -1.0;
      ajj += apply(w * om * g2, 0);
    }
  }
  t.A = A.value() + c.T0.value;
  t.L = L.value() + c.T1.value;
  t.A_unc = c.T0.uncertainty;
  t.L_unc = c.T1.uncertainty;
  if (full) {
    t.B = B.value();
    t.D = D.value() + c.T1.value;
    t.Fss = Fss.value() + rho * c.T2.value;
    t.logF = logF.value() + rho * c.T0.value;
    t.ajj = ajj.value() + c.T0.value;
    t.logF_unc = rho * c.T0.uncertainty;
  }
  return t;
}

double SigmaSlice::inner_sup(int cell) const {
  if (!cache_->finite_cell(cell)) return std::numeric_limits<double>::infinity();
  return static_cast<double>(cache_->prime_count(cell));
}

bool SigmaSlice::guard_zone(int cell, double rho) const {
  const Cell& c = cells_[cell];
  for (double u : c.u) {
    double gap = (u + 1.0) - rho;
    if (gap > 0 && gap < 1) return true;
  }
  const SumCache& sc = *cache_;
  const auto primes = sc.table().primes();
  for (std::size_t i = sc.body_begin(); i < sc.body_end(); ++i) {
    if (sc.cell_of_prime(i) != cell) continue;
    double a = std::exp(sigma_ * std::log(static_cast<double>(primes[i])));
    if (a > rho + 1) break;
    if (a > rho) return true;
  }
  return false;
}

// ------------------------------------------------------------------ derivatives

FDerivatives f_derivatives(const SigmaSlice& slice, const std::vector<double>& rho) {
  const int n = slice.cells();
  if (static_cast<int>(rho.size()) != n) throw ValidationError("f_derivatives: rho has wrong length");
  FDerivatives d;
  d.fz.resize(n);
  d.fzz.resize(n);
  d.fsz.resize(n);
  for (int j = 0; j < n; ++j) {
    CellTerms t = slice.eval(j, rho[j]);
    d.f += t.logF;
    d.fz[j] = t.A;
    d.fzz[j] = -t.B;
    d.fsz[j] = -t.D;
    d.fs -= rho[j] * t.L;
    d.fss += t.Fss;
    d.fs_unc += rho[j] * t.L_unc;
  }
  return d;
}

FDerivatives f_derivatives(const SumCache& cache, const std::vector<double>& rho, double sigma) {
  return f_derivatives(SigmaSlice(cache, sigma), rho);
}

// ------------------------------------------------------------------ inner solve

double solve_inner(const SigmaSlice& slice, int cell, int k, double tol) {
  if (k < 0) throw ValidationError("solve_inner: k must be nonnegative");
  if (k == 0) return 0.0;
  if (static_cast<double>(k) >= slice.inner_sup(cell))
    throw InfeasibleError("solve_inner: cell " + std::to_string(cell) + " has fewer than " + std::to_string(k + 1) +
                          " primes, so rho*A(rho) = k has no solution");
  auto h = [&](double r) { return slice.inner(cell, r) - k; };
  const double A0 = slice.eval(cell, 0.0, false).A;
  double lo = k / A0;
  double flo = h(lo);
  if (flo >= 0) return lo;
  double hi = 4.0 * lo, fhi = h(hi);
  for (int i = 0; fhi <= 0; ++i) {
    if (i > 200) throw NumericError("solve_inner: failed to bracket");
    lo = hi;
    flo = fhi;
    hi *= 4.0;
    fhi = h(hi);
  }
  RootOptions opt;
  opt.xtol_rel = tol;
  return bracketed_root(h, lo, hi, flo, fhi, opt).x;
}

// ------------------------------------------------------------------ Jacobian

Jacobian jacobian(const SigmaSlice& slice, const std::vector<double>& rho, const std::vector<int>& active) {
  Jacobian J;
  J.active = active;
  const std::size_t m = active.size();
  J.m.assign(m + 1, std::vector<double>(m + 1, 0.0));
  double fss = 0;
  std::vector<CellTerms> terms(slice.cells());
  for (int j = 0; j < slice.cells(); ++j) {
    terms[j] = slice.eval(j, rho[j]);
    fss += terms[j].Fss;
  }
  double prod = 1.0, schur = fss;
  int sign = 1;
  for (std::size_t i = 0; i < m; ++i) {
    const CellTerms& t = terms[active[i]];
    const double r = rho[active[i]];
    if (!(t.ajj > 0)) throw NumericError("jacobian: degenerate cell (a_jj = 0)");
    J.m[i][i] = t.ajj;
    J.m[i][m] = -r * t.D;
    J.m[m][i] = -t.D;
    schur -= J.m[i][m] * J.m[m][i] / t.ajj;
    prod *= t.ajj;
  }
  J.m[m][m] = fss;
  J.det = prod * schur;
  sign = J.det > 0 ? 1 : (J.det < 0 ? -1 : 0);
  J.sign = sign;
  return J;
}

Jacobian jacobian(const SumCache& cache, const std::vector<double>& rho, double sigma) {
  std::vector<int> active;
  for (std::size_t j = 0; j < rho.size(); ++j)
    if (rho[j] > 0) active.push_back(static_cast<int>(j));
  return jacobian(SigmaSlice(cache, sigma), rho, active);
}

// ------------------------------------------------------------------ saddle

double sigma_lower(double log_x) {
  const double ll = std::log(log_x);
  return 1.0 + 1.0 / (log_x * ll * ll);
}

double outer_map(const SumCache& cache, double log_x, const KVector& k, double sigma) {
  SigmaSlice slice(cache, sigma);
  KahanSum s;
  for (int j = 0; j < slice.cells(); ++j) {
    if (k[j] == 0) continue;
    double r = solve_inner(slice, j, k[j]);
    s += r * slice.eval(j, r, false).L;
  }
  return s.value() - log_x;
}

SaddlePoint solve_saddle(const SumCache& cache, double log_x, const KVector& k, SaddleOptions opt) {
  const int n = cache.cells();
  if (static_cast<int>(k.size()) != n) throw ValidationError("solve_saddle: k has wrong length");
  if (!(log_x >= std::log(100.0))) throw ValidationError("solve_saddle: x must be at least 100");
  bool any = false;
  for (int v : k) {
    if (v < 0) throw ValidationError("solve_saddle: negative k entry");
    any = any || v > 0;
  }
  if (!any) throw ValidationError("solve_saddle: at least one k_j must be positive");

  SaddlePoint sp;
  sp.log_x = log_x;
  sp.k = k;
  sp.bracket_lo = sigma_lower(log_x);
  sp.bracket_hi = 2.0;
  auto phi = [&](double s) { return outer_map(cache, log_x, k, s); };
  double lo = sp.bracket_lo, hi = sp.bracket_hi;
  double flo = phi(lo), fhi = phi(hi);
  while (flo < 0 && lo - 1.0 > 1e-12) {
    sp.in_bracket = false;
    hi = lo;
    fhi = flo;
    lo = 1.0 + (lo - 1.0) / 16.0;
    flo = phi(lo);
  }
  while (fhi > 0 && hi < opt.sigma_max) {
    sp.in_bracket = false;
    lo = hi;
    flo = fhi;
    hi = std::min(opt.sigma_max, 1.0 + 2.0 * (hi - 1.0));
    fhi = phi(hi);
  }
  if (flo < 0 || fhi > 0)
    throw BracketError("solve_saddle: no sign change of the outer map (k outside the realisable range)", lo, hi,
                       flo, fhi);
  RootOptions ro;
  ro.xtol_rel = 1e-16;
  ro.ftol = 0.25 * opt.tol_outer * log_x;
  RootResult rr = bracketed_root(phi, lo, hi, flo, fhi, ro);
  sp.sigma = rr.x;
  sp.iterations = rr.iterations;

  SigmaSlice slice(cache, sp.sigma);
  const double e = sp.sigma - 1.0;
  sp.log_z = 1.0 / e;
  sp.rho.assign(n, 0.0);
  sp.residual_k.assign(n, 0.0);
  sp.eta.assign(n, 0.0);
  std::vector<int> active;
  KahanSum logx_sum;
  for (int j = 0; j < n; ++j) {
    sp.rho[j] = solve_inner(slice, j, k[j]);
    CellTerms t = slice.eval(j, sp.rho[j]);
    sp.logF += t.logF;
    sp.E_z.push_back(cache.sum_model_log(j, 0, 1.0, sp.log_z));
    sp.alpha.push_back(e * cache.weighted_sum(j, 1, sp.sigma).value);
    sp.beta.push_back(e * e * cache.weighted_sum(j, 2, sp.sigma).value);
    sp.gamma.push_back(0.5 * e * e * e * cache.weighted_sum(j, 3, sp.sigma).value);
    sp.sum_rho_beta += sp.rho[j] * sp.beta[j];
    if (k[j] > 0) {
      active.push_back(j);
      sp.residual_k[j] = sp.rho[j] * t.A - k[j];
      sp.eta[j] = sp.rho[j] * sp.E_z[j].value / k[j] - 1.0;
      logx_sum += sp.rho[j] * t.L;
      sp.tail_unc += sp.rho[j] * t.L_unc;
      sp.guard_flag = sp.guard_flag || slice.guard_zone(j, sp.rho[j]);
    }
  }
  sp.residual_logx = logx_sum.value() - log_x;
  sp.tail_ok = sp.tail_unc <= opt.tail_tol * log_x;
  Jacobian J = jacobian(slice, sp.rho, active);
  sp.det = J.det;
  sp.det_sign = J.sign;
  if (std::abs(sp.residual_logx) > opt.tol_outer * log_x)
    throw NumericError("solve_saddle: outer residual above tolerance");
  for (int j : active)
    if (std::abs(sp.residual_k[j]) > opt.tol_inner * k[j]) throw NumericError("solve_saddle: inner residual above tolerance");
  return sp;
}

nlohmann::json SaddlePoint::to_json() const {
  nlohmann::json j;
  j["log_x"] = log_x;
  j["k"] = k;
  j["sigma"] = sigma;
  j["rho"] = rho;
  j["log_z"] = log_z;
  j["residual_logx"] = residual_logx;
  j["residual_k"] = residual_k;
  std::vector<double> ez, ezu;
  for (const auto& e : E_z) {
    ez.push_back(e.value);
    ezu.push_back(e.uncertainty);
  }
  j["E_z"] = ez;
  j["E_z_uncertainty"] = ezu;
  j["eta"] = eta;
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["gamma"] = gamma;
  j["logF"] = logF;
  j["jacobian_det"] = det;
  j["jacobian_det_sign"] = det_sign;
  j["bracket"] = {bracket_lo, bracket_hi};
  j["in_bracket"] = in_bracket;
  j["tail_uncertainty"] = tail_unc;
  j["tail_ok"] = tail_ok;
  j["guard_zone"] = guard_flag;
  j["iterations"] = iterations;
  return j;
}

// ------------------------------------------------------------------ closed form

DirichletParams dirichlet_params(double log_x, const KVector& k, const Partition& ap) {
  const ApMeta& m = ap.ap_meta();
  if (static_cast<int>(k.size()) != ap.cells()) throw ValidationError("dirichlet_params: k has wrong length");
  double K = 0;
  for (int v : k) {
    if (v < 0) throw ValidationError("dirichlet_params: negative k entry");
    K += v;
  }
  if (K <= 0 || K >= log_x) throw DomainError("dirichlet_params: need 0 < K < log x");
  const double l1 = std::log(log_x / K);
  if (l1 <= 1.0) throw DomainError("dirichlet_params: log(log x / K) <= 1");
  DirichletParams d;
  d.sigma = 1.0 + K / (log_x * l1);
  const double denom = std::log((log_x / K) * l1);
  for (int j = 0; j < ap.cells(); ++j) {
    if (k[j] == 0) {
      d.rho.push_back(0.0);
      continue;
    }
    if (m.m[j] == 0) throw DomainError("dirichlet_params: cell " + std::to_string(j) + " has no progression");
    d.rho.push_back(static_cast<double>(m.phi_q) * k[j] / (m.m[j] * denom));
  }
  return d;
}

}  // namespace omegalab
