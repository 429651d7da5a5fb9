// Acceptance run: one PASS/FAIL line per criterion. Exit 0 iff every failing sub-check is a
// documented known defect (see README, "Known defects").
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "omegalab/appendix.hpp"
#include "omegalab/asympt.hpp"
#include "omegalab/census.hpp"
#include "omegalab/error.hpp"
#include "omegalab/partition.hpp"
#include "omegalab/primes.hpp"
#include "omegalab/properties.hpp"
#include "omegalab/quad.hpp"
#include "omegalab/saddle.hpp"
#include "omegalab/sums.hpp"

using namespace omegalab;

namespace {

// Pinned tolerances.
constexpr double kCensusSeconds = 60.0;
constexpr double kResidualRel = 1e-9;
constexpr double kSandwich = 1.1;
constexpr double kDerivRel = 1e-6;
constexpr double kAngularSlack = 2.0;
constexpr double kBoxWindow = 5.0;
constexpr double kRichardson = 0.01;
constexpr double kBoundConstant = 10.0;
constexpr double kTruncC = 4.0;
constexpr double kHalaszLo = 0.5, kHalaszHi = 2.0;
constexpr double kTrendLog = 0.5;
constexpr double kDigitBand = 4.0;
constexpr std::uint64_t kSeed = 20240601;

// Sub-checks allowed to fail; each is a statement that is false as written (see README).
const std::set<std::string> kKnownDefects = {
    "det_negative",     // det J_g > 0 for the correctly differentiated f_ss
    "sandwich",         // norm sandwich needs the asymptotic regime
    "prop2_general",    // concavity argument only covers one half-period
    "mshift_doubling",  // consequence of prop2_general
    "lemunif_bound",    // Σ η^l/(l·l!) is not bounded by (e^η−1−η)/η
    "theorem2_finite",  // mod-5 QR saddle has E_QR(z) = 0 at desk scale
    "theorem2_trend",   // same cause
};

struct Sub {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id = 0;
  std::string title;
  std::vector<Sub> subs;
  void add(const std::string& name, bool pass, const std::string& detail) { subs.push_back({name, pass, detail}); }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Shared {
  std::shared_ptr<const PrimeTable> table;
  std::map<std::string, std::shared_ptr<SumCache>> caches;
  std::map<std::uint64_t, CensusTable> single_census;

  std::shared_ptr<SumCache> cache(const std::string& key, const Partition& p, std::uint64_t cutoff = 10'000'000) {
    auto& c = caches[key];
    if (!c) {
      SumCacheOptions o;
      o.cutoff = cutoff;
      c = make_sum_cache(table, p, o);
    }
    return c;
  }
};

std::map<KVector, std::uint64_t> trial_census(std::uint64_t x, const Partition& p) {
  std::map<KVector, std::uint64_t> out;
  for (std::uint64_t n = 1; n <= x; ++n) {
    KVector k(p.cells(), 0);
    std::uint64_t m = n;
    for (std::uint64_t d = 2; d * d <= m; ++d)
      if (m % d == 0) {
        ++k[p.classify(d)];
        while (m % d == 0) m /= d;
      }
    if (m > 1) ++k[p.classify(m)];
    ++out[k];
  }
  return out;
}

// ---------------------------------------------------------------- 1
Criterion census_correctness(Shared& S) {
  Criterion c{1, "census correctness"};
  const std::vector<std::pair<std::string, Partition>> parts = {
      {"single", Partition::single()}, {"mod4", Partition::ap(4, {{1}, {3}})}, {"mod10", Partition::ap(10, {{3}})}};
  bool exact = true;
  for (const auto& [name, p] : parts)
    for (std::uint64_t x : {1000ULL, 10000ULL}) exact = exact && census(x, p).counts == trial_census(x, p);
  c.add("trial_division", exact, "x in {1e3,1e4}, 3 partitions");

  CensusOptions opt;
  opt.threads = static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 8u));
  bool totals = true;
  double secs = 0;
  for (std::uint64_t x = 1000; x <= 100'000'000; x *= 10) {
    auto t0 = std::chrono::steady_clock::now();
    CensusTable t = census(x, Partition::single(), opt);
    secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    totals = totals && t.total() == x;
    S.single_census[x] = std::move(t);
  }
  totals = totals && census(100'000'000, Partition::ap(4, {{1}, {3}}), opt).total() == 100'000'000ULL;
  c.add("totals", totals, "sum = x up to 1e8");
  c.add("runtime", secs <= kCensusSeconds,
        fmt("%.1f s", secs) + " at 1e8 on " + std::to_string(opt.threads) + " thread(s)");
  return c;
}

// ---------------------------------------------------------------- 2
Criterion saddle_solver(Shared& S) {
  Criterion c{2, "saddle solver"};
  const std::vector<Partition> parts = {Partition::single(), Partition::ap(4, {{1}}), Partition::ap(5, {{1}, {2}})};
  std::vector<std::shared_ptr<SumCache>> caches;
  for (std::size_t i = 0; i < parts.size(); ++i) caches.push_back(S.cache("c2_" + std::to_string(i), parts[i]));
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> ux(std::log(1e4), std::log(1e8));
  std::uniform_int_distribution<int> un(0, 2), uk(1, 12);
  int instances = 0, solved = 0, resid_ok = 0, det_neg = 0, sandwich_ok = 0, draws = 0;
  double worst_x = 0, worst_k = 0;
  while (instances < 50 && draws < 100000) {
    ++draws;
    const int n = un(rng);
    const double lx = ux(rng);
    KVector k(n + 1);
    for (int& v : k) v = uk(rng);
    if (!(smallest_product_log(parts[n], k) < lx)) continue;  // not realisable
    ++instances;
    try {
      SaddlePoint sp = solve_saddle(*caches[n], lx, k);
      ++solved;
      double rx = std::abs(sp.residual_logx) / lx, rk = 0;
      for (std::size_t j = 0; j < k.size(); ++j) rk = std::max(rk, std::abs(sp.residual_k[j]) / k[j]);
      worst_x = std::max(worst_x, rx);
      worst_k = std::max(worst_k, rk);
      resid_ok += rx <= kResidualRel && rk <= kResidualRel;
      det_neg += sp.det < 0;
      double nr = 0, ninv = 0;
      for (double r : sp.rho) nr += r * r, ninv += 1 / (r * r);
      const double v = (sp.sigma - 1) * lx;
      sandwich_ok += 1 / std::sqrt(ninv) <= kSandwich * v && v <= kSandwich * std::sqrt(nr);
    } catch (const Error& e) {
      std::string kv;
      for (int v : k) kv += std::to_string(v) + " ";
      std::fprintf(stderr, "saddle n=%d logx=%.3f k=%s: %s\n", n, lx, kv.c_str(), e.what());
    }
  }
  c.add("solved", solved == 50, std::to_string(solved) + "/50");
  c.add("residuals", resid_ok == 50,
        std::to_string(resid_ok) + "/50, worst " + fmt("%.1e", worst_x) + " (x), " + fmt("%.1e", worst_k) + " (k)");
  c.add("det_negative", det_neg == 50, std::to_string(det_neg) + "/50 with det < 0");
  c.add("sandwich", sandwich_ok == 50, std::to_string(sandwich_ok) + "/50");
  return c;
}

// ---------------------------------------------------------------- 3
// Directly summed f(ρ;σ) over p ≤ P plus the linear tail ρ·Σ_{p>P}p^{-σ}.
struct DirectF {
  const SumCache* cache;
  std::vector<double> logp;
  std::vector<int> cell;
  DirectF(const SumCache& c) : cache(&c) {
    for (std::uint32_t p : c.table().primes()) {
      if (p > c.cutoff()) break;
      logp.push_back(std::log(double(p)));
      cell.push_back(c.partition().classify(p));
    }
  }
  double operator()(const std::vector<double>& rho, double sigma) const {
    KahanSum s;
    for (std::size_t i = 0; i < logp.size(); ++i) {
      const double r = rho[cell[i]];
      if (r != 0) s += std::log1p(r / std::expm1(sigma * logp[i]));
    }
    for (int j = 0; j < cache->cells(); ++j)
      if (rho[j] != 0) s += rho[j] * cache->tail(j, 0, sigma, std::log(cache->cutoff()), INFINITY).value;
    return s.value();
  }
};

// Richardson-extrapolated central differences.
double d1(const std::function<double(double)>& g, double h) {
  auto D = [&](double e) { return (g(e) - g(-e)) / (2 * e); };
  return (4 * D(h / 2) - D(h)) / 3;
}
double d2(const std::function<double(double)>& g, double h) {
  const double g0 = g(0);
  auto D = [&](double e) { return (g(e) - 2 * g0 + g(-e)) / (e * e); };
  return (4 * D(h / 2) - D(h)) / 3;
}
double d11(const std::function<double(double, double)>& g, double ha, double hb) {
  auto D = [&](double a, double b) { return (g(a, b) - g(a, -b) - g(-a, b) + g(-a, -b)) / (4 * a * b); };
  return (4 * D(ha / 2, hb / 2) - D(ha, hb)) / 3;
}

Criterion derivative_fidelity(Shared& S) {
  Criterion c{3, "derivative fidelity"};
  auto cache = S.cache("c3", Partition::ap(4, {{1}, {3}}), 1'000'000);
  DirectF f(*cache);
  std::mt19937_64 rng(kSeed + 3);
  std::uniform_real_distribution<double> us(1.02, 1.6), ur(0.2, 10.0);
  std::map<std::string, double> worst = {{"f_z", 0}, {"f_zz", 0}, {"f_s", 0}, {"f_sz", 0}, {"f_ss", 0}, {"a_jj", 0}};
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };
  for (int pt = 0; pt < 20; ++pt) {
    const double sigma = us(rng);
    std::vector<double> rho(3);
    for (double& r : rho) r = ur(rng);
    FDerivatives d = f_derivatives(*cache, rho, sigma);
    SigmaSlice sl(*cache, sigma);
    const double hs = 1e-3 * (sigma - 1);
    auto fs = [&](double e) { return f(rho, sigma + e); };
    worst["f_s"] = std::max(worst["f_s"], rel(d.fs, d1(fs, hs)));
    worst["f_ss"] = std::max(worst["f_ss"], rel(d.fss, d2(fs, hs)));
    for (int j = 0; j < 3; ++j) {
      const double hr = 1e-3 * rho[j];
      auto fz = [&](double e) {
        auto r = rho;
        r[j] += e;
        return f(r, sigma);
      };
      auto fsz = [&](double e, double es) {
        auto r = rho;
        r[j] += e;
        return f(r, sigma + es);
      };
      const double z1 = d1(fz, hr), z2 = d2(fz, hr);
      worst["f_z"] = std::max(worst["f_z"], rel(d.fz[j], z1));
      worst["f_zz"] = std::max(worst["f_zz"], rel(d.fzz[j], z2));
      worst["f_sz"] = std::max(worst["f_sz"], rel(d.fsz[j], d11(fsz, hr, hs)));
      // d(ρ f_z)/dρ = f_z + ρ f_zz
      worst["a_jj"] = std::max(worst["a_jj"], rel(sl.eval(j, rho[j]).ajj, z1 + rho[j] * z2));
    }
  }
  for (const auto& [name, w] : worst) c.add(name, w <= kDerivRel, fmt("%.1e", w));
  return c;
}

// ---------------------------------------------------------------- 4
Criterion lemma_suite(Shared& S) {
  Criterion c{4, "lemma property suite"};
  auto ap = S.cache("mod4", Partition::ap(4, {{1}, {3}}));
  auto single = S.cache("single", Partition::single());
  RatioSweep r = ratio_sweep(*ap);
  c.add("ratio", r.violations == 0,
        std::to_string(r.violations) + "/" + std::to_string(r.points) + ", worst " + fmt("%.3f", r.worst));
  TrigPropSweep t = trigprop_sweep(kSeed + 4, 100000);
  c.add("prop1", t.prop1_violations == 0, std::to_string(t.prop1_violations));
  c.add("prop2_half_period", t.prop2_half_period_violations == 0, std::to_string(t.prop2_half_period_violations));
  c.add("prop2_general", t.prop2_general_violations == 0, std::to_string(t.prop2_general_violations) + "/100000");
  MShiftSweep m = mshift_sweep(*single, 0, 1.05, 10.0, kSeed + 5, 200);
  c.add("mshift_subadditive", m.subadditive_violations == 0, std::to_string(m.subadditive_violations));
  c.add("mshift_doubling", m.doubling_violations == 0, std::to_string(m.doubling_violations) + "/200");
  GenIntSweep g = genint_sweep(kSeed + 6, 1000);
  c.add("genint", g.violations == 0, std::to_string(g.violations) + ", worst " + fmt("%.3f", g.worst));
  LemUnifSweep l = lemunif_sweep(*single, 1e6);
  c.add("lemunif_bound", l.violations == 0,
        std::to_string(l.violations) + "/" + std::to_string(l.points) + ", worst eta " + fmt("%.2f", l.worst_eta));
  c.add("lemunif_corrected", l.corrected_violations == 0, std::to_string(l.corrected_violations));
  c.add("lemunif_tail", l.tail_violations == 0, std::to_string(l.tail_violations));
  return c;
}

// ---------------------------------------------------------------- 5
Criterion angular(Shared& S) {
  Criterion c{5, "angular distribution"};
  AngularSweep a = angular_sweep(*S.table, {1e5, 1e6}, {0.5, 1.0, 2.0, 5.0}, 8, kSeed + 7);
  c.add("slack", a.points == 64 && a.slack <= kAngularSlack,
        std::to_string(a.points) + " points, slack " + fmt("%.3f", a.slack));
  return c;
}

// ---------------------------------------------------------------- 6
Criterion gaussian(Shared& S) {
  Criterion c{6, "Gaussian closed form"};
  auto single = S.cache("single", Partition::single());
  auto two = S.cache("mod4_two", Partition::ap(4, {{1}}));
  struct Inst {
    SumCache* cache;
    double x;
    KVector k;
  };
  const std::vector<Inst> inst = {{single.get(), 1e6, {4}},
                                  {single.get(), 1e7, {5}},
                                  {single.get(), 1e8, {5}},
                                  {two.get(), 1e6, {2, 2}},
                                  {two.get(), 1e7, {3, 2}}};
  int in_window = 0, richardson = 0;
  std::string ratios;
  for (const auto& I : inst) {
    SaddlePoint sp = solve_saddle(*I.cache, std::log(I.x), I.k);
    QuadPlan plan = make_quad_plan(sp);
    BoxIntegral b = box_integral(sp, *I.cache, plan);
    const double R = *std::max_element(plan.R.begin(), plan.R.end());
    in_window += std::abs(b.ratio - 1) <= kBoxWindow * R;
    richardson += b.rel_change <= kRichardson;
    ratios += (ratios.empty() ? "" : " ") + fmt("%.3f", b.ratio) + "(R=" + fmt("%.2f", R) + ")";
  }
  c.add("closed_form", in_window == 5, std::to_string(in_window) + "/5: " + ratios);
  c.add("richardson", richardson == 5, std::to_string(richardson) + "/5 within 1%");
  return c;
}

// ---------------------------------------------------------------- 7
Criterion bounds(Shared& S) {
  Criterion c{7, "bound suite"};
  const double lx = std::log(1e6);
  double ct = 0, chr = 0;
  {
    auto cache = S.cache("single", Partition::single());
    const CensusTable& t = S.single_census.at(1'000'000);
    for (const auto& [k, n] : t.counts) {
      if (n == 0) continue;
      ct = std::max(ct, n / std::exp(log_tudesq_bound(*cache, lx, k, 2.0)));
      if (k[0] >= 1)
        chr = std::max(chr, n / std::exp(classical_baselines(*cache, lx, k[0], 1.0, 2.0).log_hardy_ramanujan));
    }
    auto ap = S.cache("mod4", Partition::ap(4, {{1}, {3}}));
    CensusTable ta = census(1'000'000, ap->partition());
    for (const auto& [k, n] : ta.counts) ct = std::max(ct, n / std::exp(log_tudesq_bound(*ap, lx, k, 2.0)));
  }
  c.add("tudesq", ct <= kBoundConstant, "fitted C " + fmt("%.3f", ct));
  c.add("hardy_ramanujan", chr <= kBoundConstant, "fitted C1 " + fmt("%.3f", chr));
  double worst = 0;
  auto single = S.cache("single", Partition::single());
  auto two = S.cache("mod4_two", Partition::ap(4, {{1}}));
  for (auto [cache, x, k] : std::vector<std::tuple<SumCache*, double, KVector>>{
           {single.get(), 1e6, {4}}, {single.get(), 1e7, {5}}, {two.get(), 1e7, {3, 2}}}) {
    SaddlePoint sp = solve_saddle(*cache, std::log(x), k);
    std::vector<double> taus;
    for (int i = 1; i <= 24; ++i) taus.push_back(0.25 * i * (sp.sigma - 1));
    worst = std::max(worst, truncation_sweep(sp, *cache, taus, {0.0, 0.3, 1.0}).fitted_C);
  }
  c.add("truest1", worst <= kTruncC, "fitted C " + fmt("%.3f", worst));
  return c;
}

// ---------------------------------------------------------------- 8
Criterion halasz(Shared& S) {
  Criterion c{8, "Halasz regime"};
  std::vector<double> r;
  std::string detail;
  for (std::uint64_t x : {1'000'000ULL, 10'000'000ULL, 100'000'000ULL}) {
    KahanSum e;
    for (std::uint32_t p : S.table->primes()) {
      if (p > x) break;
      e += 1.0 / p;
    }
    const double E = e.value();
    const int k = static_cast<int>(std::lround(E));
    const double pred = std::exp(std::log(double(x)) + k * std::log(E) - E - std::lgamma(k + 1.0));
    r.push_back(S.single_census.at(x).count({k}) / pred);
    detail += (detail.empty() ? "" : " ") + ("k=" + std::to_string(k) + ":") + fmt("%.4f", r.back());
  }
  bool band = true, mono = true;
  for (std::size_t i = 0; i < r.size(); ++i) {
    band = band && r[i] >= kHalaszLo && r[i] <= kHalaszHi;
    if (i) mono = mono && std::abs(r[i] - 1) <= std::abs(r[i - 1] - 1);
  }
  c.add("band", band, detail);
  c.add("monotone", mono, "distance to 1 non-increasing");
  return c;
}

// ---------------------------------------------------------------- 9
Criterion theorem_trend(Shared& S) {
  Criterion c{9, "theorem-range trend"};
  Partition p = Partition::ap(5, {{1, 4}, {2, 3}});
  fit_ap_constants(p, *S.table);
  auto cache = S.cache("qr5", p);
  const std::vector<std::uint64_t> xs = {1'000'000ULL, 10'000'000ULL, 100'000'000ULL};
  std::vector<CensusTable> tables;
  for (auto x : xs) tables.push_back(census(x, p));
  int rows = 0, finite = 0, trend = 0, pairs = 0;
  bool flagged = true;
  for (int a = 3; a <= 5; ++a)
    for (int b = 3; b <= 5; ++b) {
      const KVector k{0, a, b};
      if (tables[0].count(k) == 0) continue;  // not realised at the first decade
      std::vector<double> lr;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        ++rows;
        double ratio = NAN;
        try {
          EstimateReport e = theorem2_estimate(*cache, std::log(double(xs[i])), k);
          flagged = flagged && std::find(e.flags.begin(), e.flags.end(), kRangeNote) != e.flags.end();
          ratio = tables[i].count(k) / e.estimate();
        } catch (const Error&) {
        }
        const bool ok = std::isfinite(ratio) && ratio > 0;
        finite += ok;
        lr.push_back(ok ? std::log(ratio) : NAN);
      }
      for (std::size_t i = 1; i < lr.size(); ++i) {
        ++pairs;
        trend += std::abs(lr[i] - lr[i - 1]) <= kTrendLog * std::max(1.0, std::abs(lr[i - 1]));
      }
    }
  c.add("theorem2_finite", rows > 0 && finite == rows, std::to_string(finite) + "/" + std::to_string(rows));
  c.add("theorem2_trend", pairs > 0 && trend == pairs, std::to_string(trend) + "/" + std::to_string(pairs));
  c.add("range_flag", flagged, "range note attached");
  return c;
}

// ---------------------------------------------------------------- 10
Criterion appendix(Shared& S) {
  Criterion c{10, "appendix demonstrations"};
  auto fam = S.cache("adv", Partition::adversarial({2.0, 1.3}));
  auto ref = S.cache("mod4", Partition::ap(4, {{1}, {3}}));
  AdversarialWitness w = adversarial_witness(*fam, *ref, 3);
  bool both = w.found;
  for (std::size_t j = 0; j < w.family.h1_cond1.size(); ++j)
    both = both && !(w.family.h1_cond1[j] && w.family.h1_cond2[j]);
  c.add("adversarial", both && w.reference.H1, "L=" + std::to_string(w.L) + ", log Z " + fmt("%.2e", 1 / (w.sigma - 1)));
  SumCacheOptions o;
  o.cutoff = 100'000'000;
  auto digit = make_sum_cache(S.table, Partition::digit({}), o);
  DigitGrowth g = digit_growth(*digit, {1e7, 3e7, 1e8});
  c.add("digit_band", g.band <= kDigitBand, "band " + fmt("%.3f", g.band) + " over 1e7..1e8");
  return c;
}

}  // namespace

int main() {
  Shared S;
  S.table = std::make_shared<PrimeTable>(sieve(100'000'000));
  const std::vector<std::function<Criterion(Shared&)>> runs = {
      census_correctness, saddle_solver, derivative_fidelity, lemma_suite, angular,
      gaussian,           bounds,        halasz,              theorem_trend, appendix};
  int unexpected = 0, known = 0;
  for (const auto& run : runs) {
    Criterion c;
    std::string error;
    try {
      c = run(S);
    } catch (const std::exception& e) {
      c.add("run", false, std::string("error: ") + e.what());
    }
    std::vector<std::string> defects, failures;
    std::ostringstream detail;
    for (const auto& s : c.subs) {
      detail << " " << s.name << "=" << (s.pass ? "ok" : "FAIL") << "[" << s.detail << "]";
      if (!s.pass) (kKnownDefects.count(s.name) ? defects : failures).push_back(s.name);
    }
    const bool pass = defects.empty() && failures.empty();
    std::string tag;
    if (!pass && failures.empty()) {
      tag = " (known defect:";
      for (const auto& d : defects) tag += " " + d;
      tag += ")";
      ++known;
    }
    unexpected += !failures.empty();
    std::printf("criterion %d %s: %s%s |%s\n", c.id, c.title.c_str(), pass ? "PASS" : "FAIL", tag.c_str(),
                detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("summary: %d criteria failing only on known defects, %d with unexpected failures\n", known, unexpected);
  return unexpected == 0 ? 0 : 1;
}
