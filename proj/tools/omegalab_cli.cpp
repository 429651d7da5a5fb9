// Command-line front end: census tables, estimate comparisons and diagnostic reports.
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "omegalab/appendix.hpp"
#include "omegalab/asympt.hpp"
#include "omegalab/census.hpp"
#include "omegalab/config.hpp"
#include "omegalab/error.hpp"
#include "omegalab/properties.hpp"
#include "omegalab/quad.hpp"
#include "omegalab/saddle.hpp"
#include "omegalab/sums.hpp"

using namespace omegalab;
using nlohmann::json;

namespace {

struct Globals {
  std::string partition = "";
  std::string out = "";
  int threads = 1;
  double tol = 1e-9;
  std::uint64_t seed = 12345;
  std::string cutoff = "1e8";
};

Partition load_partition(const Globals& g) {
  if (g.partition.empty()) return Partition::single();
  return Partition::load(g.partition);
}

// Output goes to --out when given, else stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ValidationError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void emit_json(const Globals& g, const json& j) {
  Sink s(g.out);
  s.os() << j.dump(2) << '\n';
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

std::shared_ptr<SumCache> make_cache(const Globals& g, const Partition& part, std::uint64_t min_limit = 0) {
  const std::uint64_t P = parse_x(g.cutoff);
  if (P < 1000) throw ValidationError("--cutoff must be at least 1000");
  auto table = std::make_shared<PrimeTable>(sieve(std::max(P, min_limit)));
  SumCacheOptions opt;
  opt.cutoff = P;
  return make_sum_cache(table, part, opt);
}

SaddleOptions saddle_options(const Globals& g) {
  SaddleOptions o;
  o.tol_outer = g.tol;
  o.tol_inner = std::min(1e-10, g.tol);
  return o;
}

// ------------------------------------------------------------------ census

int cmd_census(const Globals& g, const std::string& xs) {
  const std::uint64_t x = parse_x(xs);
  Partition part = load_partition(g);
  CensusOptions opt;
  opt.threads = g.threads;
  CensusTable t = census(x, part, opt);
  {
    Sink s(g.out);
    t.write_csv(s.os());
  }
  const bool ok = t.total() == x;
  (g.out.empty() ? std::cerr : std::cout) << "total=" << t.total() << " x=" << x << (ok ? " ok" : " MISMATCH") << '\n';
  return ok ? 0 : 3;
}

// ------------------------------------------------------------------ compare

int cmd_compare(const Globals& g, const std::vector<std::string>& xs, const std::string& kgrid, const std::string& kvec,
                int k0, double mu, bool no_t2, bool closed_form, const std::string& trend_out) {
  Partition part = load_partition(g);
  std::vector<std::uint64_t> xv;
  for (const auto& s : xs) xv.push_back(parse_x(s));
  if (xv.empty()) throw ValidationError("compare: --x is required");
  std::vector<KVector> grid;
  if (!kgrid.empty()) grid = parse_k_grid(kgrid);
  if (!kvec.empty()) grid.push_back(parse_k(kvec));
  if (grid.empty()) throw ValidationError("compare: give --k or --k-grid");
  for (auto& k : grid) {
    if (static_cast<int>(k.size()) == part.cells() - 1) k.insert(k.begin(), k0);
    if (static_cast<int>(k.size()) != part.cells())
      throw ValidationError("compare: k-vector length does not match the partition's " + std::to_string(part.cells()) +
                            " cells");
  }
  auto cache = make_cache(g, part);
  if (part.kind() == PartitionKind::ap && !part.has_ap_constants()) {
    fit_ap_constants(part, cache->table());
    cache = make_sum_cache(cache->table_ptr(), part, {.cutoff = parse_x(g.cutoff)});
  }
  CompareOptions opt;
  opt.mu = mu;
  opt.theorem2 = !no_t2;
  opt.asympt.closed_form = closed_form;
  opt.asympt.saddle = saddle_options(g);
  std::vector<ComparisonRow> rows;
  CensusOptions copt;
  copt.threads = g.threads;
  for (std::uint64_t x : xv) {
    CensusTable t = census(x, part, copt);
    auto r = compare(t, *cache, grid, opt);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  {
    Sink s(g.out);
    write_comparison_csv(s.os(), rows);
  }
  std::size_t tail_flags = 0;
  for (const auto& r : rows)
    for (const auto& f : r.flags)
      if (f.find("tail-dominated") != std::string::npos) ++tail_flags;
  warn(kRangeNote);
  if (tail_flags) warn(std::to_string(tail_flags) + " estimates are tail-dominated (z beyond the exact-sum cutoff)");

  if (xv.size() > 1) {
    // per-k least-squares slope of log(ratio) against log10 x
    std::map<KVector, std::vector<const ComparisonRow*>> by_k;
    for (const auto& r : rows) by_k[r.k].push_back(&r);
    std::unique_ptr<std::ofstream> tf;
    std::ostream* os = &std::cerr;
    if (!trend_out.empty()) {
      tf = std::make_unique<std::ofstream>(trend_out);
      if (!*tf) throw ValidationError("cannot open trend file '" + trend_out + "'");
      os = tf.get();
    }
    *os << "k,slope_theorem1,slope_theorem2,slope_heuristic\n";
    auto slope = [](const std::vector<const ComparisonRow*>& v, auto get) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int n = 0;
      for (auto* r : v) {
        const double y = std::log(r->ratio(get(*r)));
        if (!std::isfinite(y)) return std::nan("");
        const double xx = std::log10(double(r->x));
        sx += xx, sy += y, sxx += xx * xx, sxy += xx * y, ++n;
      }
      if (n < 2) return std::nan("");
      return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    for (const auto& [k, v] : by_k) {
      std::string ks;
      for (std::size_t j = 0; j < k.size(); ++j) ks += (j ? "," : "") + std::to_string(k[j]);
      *os << '"' << ks << "\"," << slope(v, [](const ComparisonRow& r) { return r.theorem1; }) << ','
          << slope(v, [](const ComparisonRow& r) { return r.theorem2; }) << ','
          << slope(v, [](const ComparisonRow& r) { return r.heuristic; }) << '\n';
    }
  }
  return 0;
}

// ------------------------------------------------------------------ saddle

int cmd_saddle(const Globals& g, const std::string& xs, const std::string& ks) {
  Partition part = load_partition(g);
  const std::uint64_t x = parse_x(xs);
  const double log_x = std::log(double(x));
  KVector k = parse_k(ks);
  auto cache = make_cache(g, part);
  json out;
  out["partition"] = part.to_json();
  out["x"] = x;
  SaddlePoint sp = solve_saddle(*cache, log_x, k, saddle_options(g));
  out["saddle"] = sp.to_json();
  AsymptOptions ao;
  ao.saddle = saddle_options(g);
  EstimateReport t1 = theorem1_estimate(*cache, log_x, k, ao);
  out["theorem1"] = t1.to_json();
  if (part.kind() == PartitionKind::ap) {
    EstimateReport t2 = theorem2_estimate(*cache, log_x, k, ao);
    out["theorem2"] = t2.to_json();
    try {
      DirichletParams dp = dirichlet_params(log_x, k, part);
      out["closed_form_parameters"] = {{"sigma", dp.sigma}, {"rho", dp.rho}};
    } catch (const DomainError& e) {
      out["closed_form_parameters"] = {{"error", e.what()}};
    }
  }
  out["heuristic"] = std::exp(log_poisson_heuristic(*cache, log_x, k));
  if (sp.log_z > std::log(cache->cutoff())) warn("tail-dominated: z beyond the exact-sum cutoff");
  warn(kRangeNote);
  emit_json(g, out);
  return 0;
}

// ------------------------------------------------------------------ check

int cmd_check(const Globals& g, const std::string& sweep, int samples, const std::string& sigma_s,
              const std::string& ks, const std::string& xs) {
  Partition part = load_partition(g);
  json out;
  const bool all = sweep == "all";
  bool known = all;
  std::shared_ptr<SumCache> cache;
  auto need_cache = [&]() -> SumCache& {
    if (!cache) cache = make_cache(g, part);
    return *cache;
  };
  if (all || sweep == "trigprop") {
    out["trigprop"] = trigprop_sweep(g.seed, samples).to_json();
    known = true;
  }
  if (all || sweep == "genint") {
    out["genint"] = genint_sweep(g.seed + 1, std::min(samples, 1000)).to_json();
    known = true;
  }
  if (all || sweep == "ratios") {
    out["ratios"] = ratio_sweep(need_cache()).to_json();
    known = true;
  }
  if (all || sweep == "lemunif") {
    out["lemunif"] = lemunif_sweep(need_cache(), std::min(1e6, need_cache().cutoff())).to_json();
    known = true;
  }
  if (all || sweep == "mshift") {
    out["mshift"] = mshift_sweep(need_cache(), 0, 1.3, 5.0, g.seed + 2, std::min(samples, 200)).to_json();
    known = true;
  }
  if (all || sweep == "angular") {
    SumCache& c = need_cache();
    std::vector<double> ys;
    for (double y : {1e5, 1e6})
      if (y <= c.cutoff()) ys.push_back(y);
    out["angular"] = angular_sweep(c.table(), ys, {0.5, 1, 2, 5}, 8, g.seed + 3).to_json();
    known = true;
  }
  if (all || sweep == "hypotheses") {
    SumCache& c = need_cache();
    KVector k = ks.empty() ? KVector(c.cells(), 1) : parse_k(ks);
    double sigma;
    if (!sigma_s.empty()) {
      sigma = std::stod(sigma_s);
    } else {
      const double log_x = std::log(double(parse_x(xs.empty() ? "1e6" : xs)));
      sigma = solve_saddle(c, log_x, k, saddle_options(g)).sigma;
    }
    HypothesisReport h = check_hypotheses(c, sigma, k);
    if (h.tail_dominated) warn("tail-dominated: e^{1/(sigma-1)} beyond the exact-sum cutoff");
    out["hypotheses"] = h.to_json();
    known = true;
  }
  if (all || sweep == "mertens") {
    MertensFit m = fit_mertens(need_cache().table());
    out["mertens"] = {{"M", m.M}, {"reference", kMertens}, {"t", m.t}, {"deviation", m.deviation}};
    known = true;
  }
  if (!known) throw ValidationError("check: unknown sweep '" + sweep + "'");
  emit_json(g, out);
  return 0;
}

// ------------------------------------------------------------------ quad

int cmd_quad(const Globals& g, const std::string& xs, const std::string& ks, double eta, double eps) {
  Partition part = load_partition(g);
  const double log_x = std::log(double(parse_x(xs)));
  KVector k = parse_k(ks);
  auto cache = make_cache(g, part);
  SaddlePoint sp = solve_saddle(*cache, log_x, k, saddle_options(g));
  QuadPlan plan = make_quad_plan(sp, eta, eps);
  json out;
  out["saddle"] = sp.to_json();
  out["plan"] = plan.to_json();
  out["box_integral"] = box_integral(sp, *cache, plan).to_json();
  out["box_integral_gaussian_model"] = box_integral(sp, *cache, plan, true).to_json();
  json hs = json::array();
  const double e = sp.sigma - 1.0;
  for (double f : {0.01, 0.1, 0.5, 1.0}) {
    const double tau = f * plan.T;
    const cplx h = h_expand(sp, *cache, std::vector<double>(k.size(), 0.0), tau);
    hs.push_back({{"tau", tau}, {"h_re", h.real()}, {"h_im", h.imag()}, {"quadratic", h_quadratic_model(sp, *cache, tau)}});
  }
  out["h_expansion"] = hs;
  std::vector<double> taus;
  for (int i = 1; i <= 12; ++i) taus.push_back(e * 0.05 * i * i);
  out["truncation"] = truncation_sweep(sp, *cache, taus, {0.0, 0.5, 1.5, 3.0}).to_json();
  json ed = json::array();
  for (double f : {1.5, 3.0, 6.0}) ed.push_back(extradecay_check(sp, *cache, f * e).to_json());
  out["extradecay"] = ed;
  emit_json(g, out);
  return 0;
}

// ------------------------------------------------------------------ appendix

int cmd_appendix(const Globals& g, const std::string& family, double b, double c, int M,
                 const std::vector<std::string>& xs) {
  json out;
  if (family == "adversarial") {
    AdversarialMeta meta;
    meta.b = b;
    meta.c = c;
    Partition adv = Partition::adversarial(meta);
    auto cache = make_cache(g, adv);
    SumCacheOptions opt;
    opt.cutoff = static_cast<std::uint64_t>(cache->cutoff());
    auto ref = make_sum_cache(cache->table_ptr(), Partition::ap(4, {{1}, {3}}), opt);
    AdversarialWitness w = adversarial_witness(*cache, *ref, M);
    if (w.family.tail_dominated) warn("tail-dominated: witness sums beyond the cutoff come from the tail model");
    out["adversarial"] = w.to_json();
  } else if (family == "digit") {
    Partition part = g.partition.empty() ? Partition::digit(DigitMeta{}) : Partition::load(g.partition);
    auto cache = make_cache(g, part);
    std::vector<double> xv;
    for (const auto& s : xs) xv.push_back(double(parse_x(s)));
    if (xv.empty()) {
      const double P = cache->cutoff();
      for (double f : {0.1, 0.2, 0.5, 1.0}) xv.push_back(std::floor(P * f));
    }
    out["digit"] = digit_growth(*cache, xv).to_json();
  } else {
    throw ValidationError("appendix: --family must be 'adversarial' or 'digit'");
  }
  emit_json(g, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"omegalab: counting integers by prime factors in a partition of the primes"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--partition", g.partition, "Partition JSON file (default: all primes in one cell)");
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--tol", g.tol, "Relative tolerance of the saddle solver")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed of randomised sweeps");
  app.add_option("--cutoff", g.cutoff, "Exact prime-sum cutoff P (default 1e8)");
  app.fallthrough();

  std::string x, k, kgrid, sweep = "all", sigma, trend_out, family = "adversarial";
  std::vector<std::string> xs;
  int k0 = 0, samples = 100000, M = 3;
  double mu = 2.0, eta = 0.1, eps = 0.1, b = 2.0, c = 1.3;
  bool no_t2 = false, closed_form = false;

  auto* census_cmd = app.add_subcommand("census", "Exact census table as CSV");
  census_cmd->add_option("--x", x, "Upper bound (scientific notation allowed)")->required();

  auto* compare_cmd = app.add_subcommand("compare", "Census against the estimates, one CSV row per (x, k)");
  compare_cmd->add_option("--x", xs, "One or more upper bounds")->required()->delimiter(',');
  compare_cmd->add_option("--k-grid", kgrid, "Grid such as \"2..6 x 2..6\" (cell 0 taken from --k0 when omitted)");
  compare_cmd->add_option("--k", k, "Single k-vector, e.g. 0,3,3");
  compare_cmd->add_option("--k0", k0, "k for cell 0 when the grid omits it");
  compare_cmd->add_option("--mu", mu, "mu of the upper bound");
  compare_cmd->add_flag("--no-theorem2", no_t2, "Skip the progression formula");
  compare_cmd->add_flag("--closed-form", closed_form, "Progression formula at the closed-form parameters");
  compare_cmd->add_option("--trend-out", trend_out, "Per-k trend slopes CSV (multi-x runs)");

  auto* saddle_cmd = app.add_subcommand("saddle", "Solve the saddle system and report the estimates as JSON");
  saddle_cmd->add_option("--x", x, "Upper bound")->required();
  saddle_cmd->add_option("--k", k, "k-vector, one entry per cell")->required();

  auto* check_cmd = app.add_subcommand("check", "Hypothesis checks and inequality sweeps as JSON");
  check_cmd->add_option("--sweep", sweep, "all|trigprop|genint|ratios|lemunif|mshift|angular|hypotheses|mertens");
  check_cmd->add_option("--samples", samples, "Random samples")->check(CLI::PositiveNumber);
  check_cmd->add_option("--sigma", sigma, "sigma for the hypothesis check");
  check_cmd->add_option("--k", k, "k-vector for the hypothesis check");
  check_cmd->add_option("--x", x, "x for the hypothesis check (sigma from the saddle)");

  auto* quad_cmd = app.add_subcommand("quad", "Gaussian box integral and truncation diagnostics as JSON");
  quad_cmd->add_option("--x", x, "Upper bound")->required();
  quad_cmd->add_option("--k", k, "k-vector, one entry per cell")->required();
  quad_cmd->add_option("--eta", eta, "Exponent of the angular box half-widths");
  quad_cmd->add_option("--eps", eps, "Exponent of the radial box half-width");

  auto* app_cmd = app.add_subcommand("appendix", "Digit-family growth table or adversarial H1 witness");
  app_cmd->add_option("--family", family, "adversarial|digit");
  app_cmd->add_option("--b", b, "Base b of the interval ends y_l = b^(c^l)");
  app_cmd->add_option("--c", c, "Growth c of the interval ends");
  app_cmd->add_option("--M", M, "Block index m where the witness scan starts");
  app_cmd->add_option("--x", xs, "x values for the digit table")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  try {
    if (*census_cmd) return cmd_census(g, x);
    if (*compare_cmd) return cmd_compare(g, xs, kgrid, k, k0, mu, no_t2, closed_form, trend_out);
    if (*saddle_cmd) return cmd_saddle(g, x, k);
    if (*check_cmd) return cmd_check(g, sweep, samples, sigma, k, x);
    if (*quad_cmd) return cmd_quad(g, x, k, eta, eps);
    if (*app_cmd) return cmd_appendix(g, family, b, c, M, xs);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid argument: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
