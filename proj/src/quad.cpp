#include "omegalab/quad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "omegalab/error.hpp"

namespace omegalab {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

std::vector<int> active_cells(const KVector& k) {
  std::vector<int> a;
  for (std::size_t j = 0; j < k.size(); ++j)
    if (k[j] > 0) a.push_back(static_cast<int>(j));
  return a;
}

// Σ_{p∈cell, p>p_lo} p^{-s}, exact to P plus the tail model.
cplx power_sum_above(const SumCache& cache, int cell, cplx s, double p_lo) {
  cplx v = cache.power_sums_complex(cell, s, p_lo)[0];
  const double P = cache.cutoff();
  v += cache.tail_complex(cell, s, std::log(std::max(P, p_lo)));
  return v;
}

}  // namespace

// ------------------------------------------------------------------ plan

nlohmann::json QuadPlan::to_json() const {
  return {{"eta", eta_exp}, {"eps", eps_exp}, {"active", active}, {"theta", theta}, {"j0", j0},
          {"delta", delta}, {"T", T},         {"R", R},           {"Q", Q},         {"valid", valid}};
}

QuadPlan make_quad_plan(const SaddlePoint& sp, double eta, double eps) {
  QuadPlan plan;
  plan.eta_exp = eta;
  plan.eps_exp = eps;
  plan.active = active_cells(sp.k);
  const std::size_t n = sp.k.size();
  plan.theta.assign(n, 0.0);
  plan.R.assign(n, 0.0);
  plan.Q.assign(n, 0.0);
  if (plan.active.empty()) return plan;
  bool theta_ok = true;
  double best = -1;
  for (int j : plan.active) {
    const double Ez = sp.E_z[j].value;
    plan.theta[j] = Ez > 0 ? std::min(kPi, std::pow(sp.k[j], -0.5) * std::pow(Ez, eta)) : 0.0;
    if (!(plan.theta[j] > 0)) theta_ok = false;
    const double score = sp.rho[j] * sp.rho[j] * sp.beta[j] * plan.theta[j] * plan.theta[j];
    if (score > best) {
      best = score;
      plan.j0 = j;
    }
  }
  const double Ej0 = sp.E_z[plan.j0].value;
  plan.delta = std::pow(std::max(Ej0, 0.0), eps) / std::sqrt(sp.sum_rho_beta);
  plan.T = plan.delta * (sp.sigma - 1.0);
  const double d = plan.delta, T = plan.T;
  for (int j : plan.active) {
    const double th = plan.theta[j], k = sp.k[j], rho = sp.rho[j];
    const double lr = std::log(rho + 1.0);
    const double inner = th * th / lr + T * (T + th) * lr + d * d * d * sp.gamma[j] + th * sp.alpha[j] * d;
    plan.Q[j] = rho * inner;
    plan.R[j] = th * std::sqrt(k) * std::exp(-k * th * th / 2) + k * th * th * th + plan.Q[j];
  }
  plan.valid = theta_ok && d < 1.0;
  return plan;
}

// ------------------------------------------------------------------ complex slice

ComplexSlice::ComplexSlice(const SumCache& cache, cplx s, const std::vector<double>& rho_max)
    : cache_(&cache), s_(s), cells_(cache.cells()) {
  if (static_cast<int>(rho_max.size()) != cache.cells()) throw ValidationError("ComplexSlice: rho_max size");
  const double sigma = s.real();
  const double head = cache.head_limit();
  const auto primes = cache.table().primes();
  for (int j = 0; j < cache.cells(); ++j) {
    Cell& c = cells_[j];
    c.p_split = std::max(1000.0, std::pow(20.0 * (rho_max[j] + 1.0), 1.0 / sigma));
    c.p_split = std::min(c.p_split, cache.cutoff());
    const auto& hp = cache.head_primes(j);
    const auto& hl = cache.head_logs(j);
    for (std::size_t i = 0; i < hp.size() && hp[i] <= c.p_split; ++i) c.u.push_back(std::exp(s * hl[i]) - 1.0);
    if (c.p_split > head) {
      const std::size_t end = std::min(cache.body_end(), cache.table().count_upto(c.p_split));
      for (std::size_t i = cache.body_begin(); i < end; ++i)
        if (cache.cell_of_prime(i) == j) c.u.push_back(std::exp(s * std::log(double(primes[i]))) - 1.0);
    }
    c.S = cache.power_sums_complex(j, s, c.p_split);
    c.tail = cache.tail_complex(j, s, std::log(cache.cutoff()));
  }
}

cplx ComplexSlice::cell_f(int cell, cplx z) const {
  const Cell& c = cells_[cell];
  if (z == 0.0) return 0.0;
  KahanSumC acc;
  for (const cplx& u : c.u) acc += std::log(1.0 + z / u);
  // log(1 + z/(p^s−1)) = log(1+(z−1)w) − log(1−w), w = p^{-s}
  const cplx zm = z - 1.0;
  cplx zk = 1.0;
  for (int k = 1; k <= kMaxPower; ++k) {
    zk *= -zm;
    acc += (-zk + 1.0) / double(k) * c.S[k - 1];
  }
  acc += z * c.tail;
  return acc.value();
}

cplx ComplexSlice::f(const std::vector<cplx>& z) const {
  cplx v = 0.0;
  for (int j = 0; j < static_cast<int>(cells_.size()); ++j) v += cell_f(j, z[j]);
  return v;
}

cplx ComplexSlice::power_sum(int cell, double p_lo) const { return power_sum_above(*cache_, cell, s_, p_lo); }

// ------------------------------------------------------------------ h

cplx h_expand(const SaddlePoint& sp, const SumCache& cache, const std::vector<double>& t, double tau) {
  const std::size_t n = sp.k.size();
  if (t.size() != n) throw ValidationError("h_expand: t has wrong length");
  ComplexSlice at(cache, cplx(sp.sigma, tau), sp.rho);
  ComplexSlice base(cache, cplx(sp.sigma, 0.0), sp.rho);
  cplx h = kI * tau * sp.log_x;
  for (std::size_t j = 0; j < n; ++j) {
    if (sp.rho[j] == 0) continue;
    const int c = static_cast<int>(j);
    h += at.cell_f(c, sp.rho[j] * std::exp(kI * t[j])) - base.cell_f(c, sp.rho[j]);
    h -= double(sp.k[j]) * (std::exp(kI * t[j]) - 1.0);
  }
  return h;
}

double h_quadratic_model(const SaddlePoint& sp, const SumCache& cache, double tau) {
  double s = 0;
  for (std::size_t j = 0; j < sp.k.size(); ++j)
    if (sp.rho[j] > 0) s += sp.rho[j] * cache.weighted_sum(static_cast<int>(j), 2, sp.sigma).value;
  return -0.5 * tau * tau * s;
}

// ------------------------------------------------------------------ box integral

nlohmann::json BoxIntegral::to_json() const {
  return {{"value_re", value.real()},
          {"value_im", value.imag()},
          {"coarse_re", coarse.real()},
          {"rel_change", rel_change},
          {"closed_form", closed_form},
          {"ratio", ratio},
          {"gaussian_reference", gaussian_reference},
          {"converged", converged},
          {"unit_h", forced_unit_h}};
}

BoxIntegral box_integral(const SaddlePoint& sp, const SumCache& cache, const QuadPlan& plan, bool unit_h) {
  if (plan.active.empty()) throw ValidationError("box_integral: zero k-vector");
  BoxIntegral out;
  out.forced_unit_h = unit_h;
  const double e = sp.sigma - 1.0;
  const double srb = sp.sum_rho_beta;
  const double T = plan.T;

  // The integrand factorises over cells once τ is fixed.
  std::vector<double> base(sp.k.size(), 0.0);
  if (!unit_h) {
    ComplexSlice s0(cache, cplx(sp.sigma, 0.0), sp.rho);
    for (int j : plan.active) base[j] = s0.cell_f(j, sp.rho[j]).real();
  }
  auto integrate = [&](int n) {
    GaussRule g = gauss_legendre(n);
    KahanSumC total;
    for (int a = 0; a < n; ++a) {
      const double tau = T * g.nodes[a];
      cplx val;
      if (unit_h) {
        val = std::exp(-0.5 * srb * tau * tau / (e * e));
        for (int j : plan.active) {
          double acc = 0;
          for (int b = 0; b < n; ++b) {
            const double t = plan.theta[j] * g.nodes[b];
            acc += g.weights[b] * plan.theta[j] * std::exp(-0.5 * sp.k[j] * t * t);
          }
          val *= acc;
        }
      } else {
        ComplexSlice cs(cache, cplx(sp.sigma, tau), sp.rho);
        val = std::exp(kI * tau * sp.log_x) / cplx(sp.sigma, tau);
        for (int j : plan.active) {
          cplx acc = 0.0;
          for (int b = 0; b < n; ++b) {
            const double t = plan.theta[j] * g.nodes[b];
            const cplx ex = cs.cell_f(j, sp.rho[j] * std::exp(kI * t)) - base[j] - kI * double(sp.k[j]) * t;
            acc += g.weights[b] * plan.theta[j] * std::exp(ex);
          }
          val *= acc;
        }
      }
      total += g.weights[a] * T * val;
    }
    return total.value();
  };
  out.coarse = integrate(plan.nodes);
  out.value = integrate(plan.nodes_fine);
  out.rel_change = std::abs(out.value - out.coarse) / std::abs(out.value);
  out.converged = out.rel_change < 1e-6;
  out.closed_form = std::sqrt(2 * kPi / srb) * e;
  out.gaussian_reference = std::sqrt(2 * kPi / srb) * e * std::erf(T / e * std::sqrt(srb / 2));
  for (int j : plan.active) {
    const double k = sp.k[j];
    out.closed_form *= std::sqrt(2 * kPi / k);
    out.gaussian_reference *= std::sqrt(2 * kPi / k) * std::erf(plan.theta[j] * std::sqrt(k / 2));
  }
  out.ratio = out.value.real() / out.closed_form;
  return out;
}

// ------------------------------------------------------------------ truncation diagnostics

double M_sum(const SumCache& cache, int cell, double sigma, double tau, double t, double p_lo) {
  const double re = power_sum_above(cache, cell, cplx(sigma, 0.0), p_lo).real();
  // cos(τλ − t) = Re(e^{−it} p^{iτ})
  const cplx osc = power_sum_above(cache, cell, cplx(sigma, -tau), p_lo);
  return re - (std::exp(-kI * t) * osc).real();
}

nlohmann::json TruncationDiagnostics::to_json() const {
  return {{"log_ratio", log_ratio}, {"log_bound", log_bound}, {"M", M},     {"sum_rho_M", sum_rho_M},
          {"G", G},                 {"G_margin", G_margin},   {"nu", nu}};
}

TruncationDiagnostics ratio_bound_check(const SaddlePoint& sp, const SumCache& cache, const std::vector<double>& t,
                                        double tau) {
  const std::size_t n = sp.k.size();
  if (t.size() != n) throw ValidationError("ratio_bound_check: t has wrong length");
  TruncationDiagnostics d;
  ComplexSlice at(cache, cplx(sp.sigma, tau), sp.rho);
  ComplexSlice base(cache, cplx(sp.sigma, 0.0), sp.rho);
  const double e = sp.sigma - 1.0;
  const double nu_cut = 1.0 / (192.0 * std::numbers::e);
  double kt2 = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const int c = static_cast<int>(j);
    double Mj = 0;
    if (sp.rho[j] > 0) {
      d.log_ratio += (at.cell_f(c, sp.rho[j] * std::exp(kI * t[j])) - base.cell_f(c, sp.rho[j])).real();
      Mj = M_sum(cache, c, sp.sigma, tau, t[j], std::pow(sp.rho[j], 1.0 / sp.sigma));
    }
    d.M.push_back(Mj);
    d.sum_rho_M += sp.rho[j] * Mj;
    const double at_ = std::abs(t[j]);
    d.nu.push_back(at_ < nu_cut || kPi - at_ < nu_cut ? 1.0 : nu_cut);
    kt2 += sp.k[j] * t[j] * t[j];
  }
  d.log_bound = -0.25 * d.sum_rho_M;
  if (std::abs(tau) < 2.0 / e) {
    d.G = (sp.sum_rho_beta * tau * tau / (e * e) + kt2) / 250.0;
    d.G_margin = d.sum_rho_M - d.G;
  } else {
    d.G = d.G_margin = std::nan("");
  }
  return d;
}

nlohmann::json ExtraDecayReport::to_json() const {
  return {{"tau", tau}, {"lhs", lhs}, {"rhs", rhs}, {"in_range", in_range}, {"holds", holds}};
}

ExtraDecayReport extradecay_check(const SaddlePoint& sp, const SumCache& cache, double tau) {
  ExtraDecayReport r;
  r.tau = tau;
  const double e = sp.sigma - 1.0;
  const double ratio = std::abs(tau) / e;
  double minE = std::numeric_limits<double>::infinity();
  const double L = std::log(ratio);
  for (std::size_t j = 0; j < sp.k.size(); ++j) {
    if (sp.k[j] == 0) continue;
    const int c = static_cast<int>(j);
    const double Ez = sp.E_z[j].value;
    minE = std::min(minE, Ez);
    r.lhs += sp.rho[j] * M_sum(cache, c, sp.sigma, tau, 0.0, std::pow(sp.rho[j], 1.0 / sp.sigma));
    const double m = L > 0 ? std::min(1.0, Ez / (6.0 * L)) : 1.0;
    r.rhs += sp.k[j] * m * m / 24.0;
  }
  r.in_range = ratio > 1.0 && L <= minE;
  r.holds = r.lhs >= r.rhs;
  return r;
}

// ------------------------------------------------------------------ elementary inequalities

bool trig_prop1(const std::vector<double>& a) {
  double sum = 0, s2 = 0;
  for (double v : a) {
    sum += v;
    s2 += std::sin(v) * std::sin(v);
  }
  const double l = std::sin(sum) * std::sin(sum);
  return l <= a.size() * s2 * (1 + 1e-12) + 1e-300;
}

double trig_prop2_margin(const std::vector<double>& a) {
  if (a.empty()) throw ValidationError("trig_prop2_margin: empty input");
  double mean = 0, logprod = 0;
  for (double v : a) {
    mean += v;
    logprod += std::log(std::sin(v) * std::sin(v));
  }
  mean /= a.size();
  return std::sin(mean) * std::sin(mean) - std::exp(logprod / a.size());
}

std::pair<double, double> gen_int_est(double gamma, double u) {
  if (!(gamma > 0.5)) throw ValidationError("gen_int_est: gamma must exceed 1/2");
  if (u < 0) throw ValidationError("gen_int_est: u must be nonnegative");
  // t = cot φ gives ∫_0^{φmax} sin^{2γ−2}φ dφ; φ = v^{1/(2γ−1)} removes the endpoint singularity
  const double a = 2 * gamma - 1;
  const double phimax = std::atan2(1.0, u);
  const double vmax = std::pow(phimax, a);
  GaussRule g = gauss_legendre(64);
  double s = 0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double v = 0.5 * vmax * (g.nodes[i] + 1.0);
    const double phi = std::pow(v, 1.0 / a);
    const double r = phi > 0 ? std::sin(phi) / phi : 1.0;
    s += g.weights[i] * std::pow(r, 2 * gamma - 2) / a;
  }
  s *= 0.5 * vmax;
  const double bound = std::sqrt(kPi * kPi / (2 * gamma)) * std::pow(1 + u * u, -gamma / 2);
  return {s, bound};
}

}  // namespace omegalab
