#include "omegalab/asympt.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "omegalab/error.hpp"
#include "omegalab/quad.hpp"

namespace omegalab {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

bool all_zero(const KVector& k) {
  for (int v : k)
    if (v != 0) return false;
  return true;
}

void check_k(const SumCache& cache, const KVector& k) {
  if (static_cast<int>(k.size()) != cache.cells()) throw ValidationError("k has wrong length");
  for (int v : k)
    if (v < 0) throw ValidationError("negative k entry");
}

std::vector<double> cell_E(const SumCache& cache, double log_t) {
  std::vector<double> e(cache.cells());
  for (int j = 0; j < cache.cells(); ++j) e[j] = cache.sum_model_log(j, 0, 1.0, log_t).value;
  return e;
}

// Zero vector: no saddle exists; the main term is evaluated at z = x.
void fill_zero_vector(EstimateReport& r, const SumCache& cache) {
  r.zero_vector = true;
  r.log_main = r.log_x;
  for (double e : cell_E(cache, r.log_x)) r.log_main -= e;
  r.log_F_factor = 0;
  r.log_estimate = r.log_main;
  r.flags.push_back("zero k-vector: outside k_j >= 1, main term evaluated at z = x with F = 1");
}

void common_flags(EstimateReport& r, const SumCache& cache, const AsymptOptions& opt) {
  const SaddlePoint& sp = r.saddle;
  r.flags.push_back(kRangeNote);
  auto Ex = cell_E(cache, r.log_x);
  for (std::size_t j = 0; j < r.k.size(); ++j)
    if (r.k[j] > 0 && r.k[j] < Ex[j] * Ex[j])
      r.flags.push_back("cell " + std::to_string(j) + ": k_j < E_j(x)^2 (below theorem range)");
  if (!sp.in_bracket) r.flags.push_back("saddle sigma outside the bracket (sigma_2, sigma_1]");
  if (!sp.tail_ok) r.flags.push_back("saddle tail uncertainty above tolerance");
  if (sp.guard_flag) r.flags.push_back("guard zone: some prime has 0 < p^sigma - rho_j < 1");
  if (sp.log_z > std::log(cache.cutoff())) r.flags.push_back("tail-dominated: z beyond the exact-sum cutoff");
  HypothesisReport h = check_hypotheses(cache, sp.sigma, r.k, opt.hypotheses);
  r.H1 = h.H1;
  r.H2 = h.H2;
  r.H3 = h.H3;
  if (!(h.H1 || h.H2 || h.H3)) r.flags.push_back("none of H1, H2, H3 holds at sigma");
  if (r.R < r.R_lower) r.flags.push_back("R below sum k_j(phi - log(1+eta_j))");
  QuadPlan plan = make_quad_plan(sp, opt.quad_eta, opt.quad_eps);
  r.lemint_R = plan.R;
}

}  // namespace

double EstimateReport::estimate() const { return std::exp(log_estimate); }

nlohmann::json EstimateReport::to_json() const {
  nlohmann::json j;
  j["formula"] = formula;
  j["log_x"] = log_x;
  j["k"] = k;
  j["zero_vector"] = zero_vector;
  if (!zero_vector) j["saddle"] = saddle.to_json();
  j["log_main_term"] = log_main;
  j["R"] = R;
  j["R_lower"] = R_lower;
  j["C_rho"] = C_rho;
  j["log_F_factor"] = log_F_factor;
  j["log_estimate"] = log_estimate;
  j["estimate"] = estimate();
  j["error_scales"] = error_scales;
  j["lemint_R"] = lemint_R;
  j["H1"] = H1;
  j["H2"] = H2;
  j["H3"] = H3;
  j["flags"] = flags;
  if (exact) {
    j["exact"] = *exact;
    j["ratio"] = *exact / estimate();
  }
  return j;
}

EstimateReport theorem1_estimate(const SumCache& cache, double log_x, const KVector& k, const AsymptOptions& opt) {
  check_k(cache, k);
  EstimateReport r;
  r.formula = "theorem1";
  r.log_x = log_x;
  r.k = k;
  const int n = cache.cells();
  const double log_y = std::cbrt(log_x);
  for (int j = 0; j < n; ++j)
    r.error_scales.push_back(std::pow(cache.sum_model_log(j, 0, 1.0, log_y).value, -0.5 + opt.eps));
  if (all_zero(k)) {
    fill_zero_vector(r, cache);
    return r;
  }
  r.saddle = solve_saddle(cache, log_x, k, opt.saddle);
  const SaddlePoint& sp = r.saddle;
  r.log_main = log_x;
  double sum_rho_beta = 0;
  for (int j = 0; j < n; ++j) {
    const double Ez = sp.E_z[j].value;
    if (k[j] > 0) {
      if (Ez <= 0) {
        r.log_main = -std::numeric_limits<double>::infinity();
        r.flags.push_back("cell " + std::to_string(j) + ": E_j(z) = 0, main term vanishes");
      } else {
        r.log_main += k[j] * std::log(Ez);
      }
      r.R -= k[j] * (1.0 + std::log1p(sp.eta[j]));
      r.R_lower += k[j] * (kPhiConst - std::log1p(sp.eta[j]));
    }
    r.log_main -= Ez + std::lgamma(k[j] + 1.0);
    r.C_rho += sp.rho[j] * sp.alpha[j];
    sum_rho_beta += sp.rho[j] * sp.beta[j];
  }
  r.R += sp.logF;
  r.log_F_factor = -0.5 * std::log(2.0 * std::numbers::pi * sum_rho_beta) + r.C_rho + r.R + kMertens;
  r.log_estimate = std::isinf(r.log_main) ? kNaN : r.log_main + r.log_F_factor;
  common_flags(r, cache, opt);
  return r;
}

EstimateReport theorem2_estimate(const SumCache& cache, double log_x, const KVector& k, const AsymptOptions& opt) {
  check_k(cache, k);
  const Partition& part = cache.partition();
  const ApMeta& meta = part.ap_meta();
  const int n = cache.cells();
  EstimateReport r;
  r.formula = "theorem2";
  r.log_x = log_x;
  r.k = k;
  const double ll = std::log(log_x);
  for (int j = 0; j < n; ++j)
    r.error_scales.push_back(meta.m[j] > 0 ? std::pow(double(meta.phi_q) / (meta.m[j] * ll), 0.5 - opt.eps)
                                           : std::numeric_limits<double>::infinity());
  if (all_zero(k)) {
    fill_zero_vector(r, cache);
    return r;
  }
  std::vector<double> c(n);
  if (part.has_ap_constants()) {
    c = meta.c;
  } else {
    for (int j = 0; j < n; ++j) c[j] = fit_ap_constant(part, j, cache.table());
  }
  if (opt.closed_form) {
    DirichletParams dp = dirichlet_params(log_x, k, part);
    SaddlePoint& sp = r.saddle;
    sp.log_x = log_x;
    sp.k = k;
    sp.sigma = dp.sigma;
    sp.rho = dp.rho;
    sp.log_z = 1.0 / (dp.sigma - 1.0);
    SigmaSlice slice(cache, dp.sigma);
    const double e = dp.sigma - 1.0;
    for (int j = 0; j < n; ++j) {
      sp.logF += slice.eval(j, dp.rho[j]).logF;
      sp.E_z.push_back(cache.sum_model_log(j, 0, 1.0, sp.log_z));
      sp.eta.push_back(k[j] > 0 ? dp.rho[j] * sp.E_z[j].value / k[j] - 1.0 : 0.0);
      sp.alpha.push_back(e * cache.weighted_sum(j, 1, dp.sigma).value);
      sp.beta.push_back(e * e * cache.weighted_sum(j, 2, dp.sigma).value);
      sp.gamma.push_back(0.5 * e * e * e * cache.weighted_sum(j, 3, dp.sigma).value);
    }
    r.flags.push_back("closed-form saddle parameters");
  } else {
    r.saddle = solve_saddle(cache, log_x, k, opt.saddle);
  }
  const SaddlePoint& sp = r.saddle;
  const double e = sp.sigma - 1.0;
  r.log_main = log_x - ll;
  double mrho = 0;
  for (int j = 0; j < n; ++j) {
    const double base = double(meta.m[j]) / meta.phi_q * std::log(1.0 / e) + c[j];
    if (k[j] > 0) {
      if (base <= 0) {
        r.log_main = kNaN;
        r.flags.push_back("cell " + std::to_string(j) + ": (m_j/phi(q))log(1/(sigma-1)) + c_j <= 0, formula undefined");
      } else {
        r.log_main += k[j] * std::log(base);
      }
      r.R -= k[j] * (1.0 + std::log1p(sp.eta[j]));
      r.R_lower += k[j] * (kPhiConst - std::log1p(sp.eta[j]));
    }
    r.log_main -= std::lgamma(k[j] + 1.0);
    mrho += sp.rho[j] * meta.m[j] / meta.phi_q;
  }
  r.R += sp.logF;
  r.C_rho = e * log_x;
  r.log_F_factor = 0.5 * std::log(mrho / (2.0 * std::numbers::pi)) + r.C_rho + r.R;
  r.log_estimate = r.log_main + r.log_F_factor;
  common_flags(r, cache, opt);
  return r;
}

double log_poisson_heuristic(const SumCache& cache, double log_x, const KVector& k) {
  check_k(cache, k);
  auto E = cell_E(cache, log_x);
  double v = log_x;
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (k[j] > 0) v += E[j] > 0 ? k[j] * std::log(E[j]) : -std::numeric_limits<double>::infinity();
    v -= E[j] + std::lgamma(k[j] + 1.0);
  }
  return v;
}

double log_tudesq_bound(const SumCache& cache, double log_x, const KVector& k, double mu) {
  check_k(cache, k);
  if (!(mu > 0)) throw ValidationError("tudesq bound: mu must be positive");
  auto E = cell_E(cache, log_x);
  double v = log_x;
  for (std::size_t j = 0; j < k.size(); ++j) v += k[j] * std::log(E[j] + mu) - E[j] - std::lgamma(k[j] + 1.0);
  return v;
}

double log_selberg_product(const SumCache& cache, double y) {
  KahanSum s;
  const double P = cache.cutoff();
  for (std::uint32_t p : cache.table().primes()) {
    if (p > P) break;
    const double dp = p;
    s += std::log1p(y / (dp - 1.0)) + y * std::log1p(-1.0 / dp);
  }
  // beyond P each factor is 1 + y(1−y)/(2p²) + O(p^{-3})
  Estimate t = cache.tail(-1, 0, 2.0, std::log(P), std::numeric_limits<double>::infinity());
  return s.value() + 0.5 * y * (1.0 - y) * t.value;
}

nlohmann::json ClassicalBaselines::to_json() const {
  return {{"hardy_ramanujan", std::exp(log_hardy_ramanujan)},
          {"selberg_sathe", std::exp(log_selberg_sathe)},
          {"selberg_sathe_k_minus_1", std::exp(log_selberg_sathe_km1)},
          {"halasz", std::exp(log_halasz)}};
}

ClassicalBaselines classical_baselines(const SumCache& cache, double log_x, int k, double C1, double C2) {
  if (k < 0) throw ValidationError("classical_baselines: k must be nonnegative");
  ClassicalBaselines b;
  const double E = cache.sum_model_log(-1, 0, 1.0, log_x).value;
  const double L2 = std::log(log_x);
  b.log_halasz = log_x + k * std::log(E) - E - std::lgamma(k + 1.0);
  if (k == 0) {
    b.log_hardy_ramanujan = b.log_selberg_sathe = b.log_selberg_sathe_km1 = kNaN;
    return b;
  }
  const double base = log_x - L2 + (k - 1) * std::log(L2) - std::lgamma(double(k));
  b.log_hardy_ramanujan = std::log(C1) + log_x - L2 + (k - 1) * std::log(L2 + C2) - std::lgamma(double(k));
  const double y = k / L2;
  b.log_selberg_sathe = -std::lgamma(y + 1.0) + log_selberg_product(cache, y) + base;
  const double y1 = (k - 1) / L2;
  b.log_selberg_sathe_km1 = -std::lgamma(y1 + 1.0) + log_selberg_product(cache, y1) + base;
  return b;
}

// ------------------------------------------------------------------ comparison

std::vector<ComparisonRow> compare(const CensusTable& table, const SumCache& cache, const std::vector<KVector>& grid,
                                   const CompareOptions& opt) {
  std::vector<ComparisonRow> rows;
  const double log_x = std::log(static_cast<double>(table.x));
  const bool ap = cache.partition().kind() == PartitionKind::ap;
  for (const KVector& k : grid) {
    ComparisonRow row;
    row.x = table.x;
    row.k = k;
    row.census = table.count(k);
    try {
      EstimateReport r = theorem1_estimate(cache, log_x, k, opt.asympt);
      row.theorem1 = r.estimate();
      for (auto& f : r.flags) row.flags.push_back("theorem1: " + f);
    } catch (const NumericError& e) {
      row.theorem1 = kNaN;
      row.flags.push_back(std::string("theorem1: ") + e.what());
    }
    if (ap && opt.theorem2) {
      try {
        EstimateReport r = theorem2_estimate(cache, log_x, k, opt.asympt);
        row.theorem2 = r.estimate();
        for (auto& f : r.flags)
          if (f != kRangeNote) row.flags.push_back("theorem2: " + f);
      } catch (const NumericError& e) {
        row.theorem2 = kNaN;
        row.flags.push_back(std::string("theorem2: ") + e.what());
      }
    } else {
      row.theorem2 = kNaN;
    }
    row.heuristic = std::exp(log_poisson_heuristic(cache, log_x, k));
    row.tudesq = std::exp(log_tudesq_bound(cache, log_x, k, opt.mu));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "x,k,census,theorem1,theorem2,heuristic,tudesq,ratio_theorem1,ratio_theorem2,ratio_heuristic,ratio_tudesq,"
         "flags\n";
  for (const auto& r : rows) {
    std::string kv;
    for (std::size_t j = 0; j < r.k.size(); ++j) kv += (j ? "," : "") + std::to_string(r.k[j]);
    std::string flags;
    for (std::size_t i = 0; i < r.flags.size(); ++i) flags += (i ? "; " : "") + r.flags[i];
    out << r.x << ',' << csv_quote(kv) << ',' << r.census << ',' << num(r.theorem1) << ',' << num(r.theorem2) << ','
        << num(r.heuristic) << ',' << num(r.tudesq) << ',' << num(r.ratio(r.theorem1)) << ','
        << num(r.ratio(r.theorem2)) << ',' << num(r.ratio(r.heuristic)) << ',' << num(r.ratio(r.tudesq)) << ','
        << csv_quote(flags) << '\n';
  }
}

}  // namespace omegalab
