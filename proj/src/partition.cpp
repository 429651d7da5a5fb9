#include "omegalab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

#include "omegalab/error.hpp"
#include "omegalab/numeric.hpp"

namespace omegalab {

using nlohmann::json;

int euler_phi(std::uint64_t q) {
  std::uint64_t r = q, n = q;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    r -= r / p;
  }
  if (n > 1) r -= r / n;
  return static_cast<int>(r);
}

std::string to_string(PartitionKind k) {
  switch (k) {
    case PartitionKind::ap: return "ap";
    case PartitionKind::digit: return "digit";
    case PartitionKind::adversarial: return "adversarial";
    case PartitionKind::custom: return "custom";
  }
  return "?";
}

// ---------------------------------------------------------------- metadata helpers

const std::string& DigitMeta::prefix(int digits) const {
  auto it = prefix_by_digits.find(digits);
  return it == prefix_by_digits.end() ? default_prefix : it->second;
}

bool AdversarialMeta::in_b(std::int64_t l) const {
  if (l < 1) return false;
  for (int m = 0; m < 100000; ++m) {
    double v = std::pow(c, m + 1);
    if (v - m <= static_cast<double>(l) && static_cast<double>(l) < v) return true;
    if (v - m > static_cast<double>(l) && v * (c - 1.0) > 1.0) return false;
  }
  return false;
}

double AdversarialMeta::log_y(std::int64_t l) const {
  return static_cast<double>(std::pow(static_cast<long double>(c), l) * std::log(static_cast<long double>(b)));
}

std::int64_t AdversarialMeta::interval_index(double p) const {
  long double lp = std::log(static_cast<long double>(p));
  long double lb = std::log(static_cast<long double>(b));
  long double lc = std::log(static_cast<long double>(c));
  if (lp < lb) return 0;
  auto l = static_cast<std::int64_t>(std::floor(std::log(lp / lb) / lc)) + 1;
  auto ly = [&](std::int64_t i) { return std::pow(static_cast<long double>(c), i) * lb; };
  while (l > 1 && ly(l - 1) > lp) --l;
  while (ly(l) <= lp) ++l;
  return l;
}

// ---------------------------------------------------------------- constructors

Partition Partition::single() { return ap(1, {}); }

Partition Partition::ap(std::uint64_t q, std::vector<std::vector<std::uint64_t>> cell_residues) {
  if (q < 1) throw ValidationError("ap partition: modulus must be positive");
  if (q > (1ULL << 26)) throw ValidationError("ap partition: modulus too large");
  if (cell_residues.size() + 1 > 255) throw ValidationError("ap partition: too many cells");
  Partition P;
  P.kind_ = PartitionKind::ap;
  P.cells_ = static_cast<int>(cell_residues.size()) + 1;
  P.ap_table_.assign(q, 0);
  std::vector<bool> claimed(q, false);
  for (std::size_t j = 0; j < cell_residues.size(); ++j) {
    for (std::uint64_t r : cell_residues[j]) {
      if (r >= q) throw ValidationError("ap partition: residue " + std::to_string(r) + " not reduced mod q");
      if (claimed[r]) throw ValidationError("ap partition: residue " + std::to_string(r) + " claimed twice");
      claimed[r] = true;
      P.ap_table_[r] = static_cast<std::uint8_t>(j + 1);
    }
  }
  // cell 0 must contain at least one prime
  bool nonempty = false;
  for (std::uint64_t r = 0; r < q && !nonempty; ++r) {
    if (claimed[r]) continue;
    const std::uint64_t g = std::gcd(r, q);  // a non-coprime class holds at most the prime g
    if (g == 1 || (is_prime_trial(g) && g % q == r)) nonempty = true;
  }
  if (q == 1) nonempty = true;
  if (!nonempty) throw ValidationError("ap partition: complement cell contains no primes");
  P.ap_.q = q;
  P.ap_.residues = std::move(cell_residues);
  P.ap_.phi_q = euler_phi(q);
  P.ap_.m.assign(P.cells_, 0);
  for (std::uint64_t r = 0; r < q; ++r)
    if (std::gcd(r, q) == 1) P.ap_.m[P.ap_table_[r]]++;
  if (q == 1) P.ap_.m[0] = 1;
  P.ap_.c.assign(P.cells_, std::numeric_limits<double>::quiet_NaN());
  P.ap_.c_residual.assign(P.cells_, std::numeric_limits<double>::quiet_NaN());
  return P;
}

Partition Partition::digit(DigitMeta meta) {
  if (meta.start_digits < 2) throw ValidationError("digit partition: start_digits must be at least 2");
  if (meta.modulus < 2 || meta.residue >= meta.modulus)
    throw ValidationError("digit partition: bad excluded residue class");
  auto check = [&](const std::string& s, int digits) {
    if (s.empty() || s[0] == '0' || !std::all_of(s.begin(), s.end(), ::isdigit))
      throw ValidationError("digit partition: prefix '" + s + "' is not a digit string");
    // prefix of length r+1 on numbers of digits = k+1; r ≥ k is rejected
    if (static_cast<int>(s.size()) >= digits)
      throw ValidationError("digit partition: prefix '" + s + "' not shorter than " +
                            std::to_string(digits) + "-digit numbers");
  };
  for (int d = meta.start_digits; d <= 20; ++d) check(meta.prefix(d), d);
  for (auto& [d, s] : meta.prefix_by_digits)
    if (d >= meta.start_digits) check(s, d);
  Partition P;
  P.kind_ = PartitionKind::digit;
  P.cells_ = 3;
  P.digit_ = std::move(meta);
  return P;
}

Partition Partition::adversarial(AdversarialMeta meta) {
  if (!(meta.b > 1.0) || !(meta.c > 1.0)) throw ValidationError("adversarial partition: need b > 1 and c > 1");
  Partition P;
  P.kind_ = PartitionKind::adversarial;
  P.cells_ = 2;
  P.adv_ = meta;
  return P;
}

Partition Partition::custom(CustomMeta meta) {
  if (meta.cells < 1 || meta.cells > 255) throw ValidationError("custom partition: bad cell count");
  for (auto& r : meta.rules) {
    if (r.cell < 0 || r.cell >= meta.cells) throw ValidationError("custom partition: rule cell out of range");
    for (auto res : r.residues)
      if (r.modulus == 0 || res >= r.modulus) throw ValidationError("custom partition: bad residue rule");
    if (r.min > r.max) throw ValidationError("custom partition: empty range rule");
  }
  Partition P;
  P.kind_ = PartitionKind::custom;
  P.cells_ = meta.cells;
  P.custom_ = std::move(meta);
  return P;
}

// ---------------------------------------------------------------- classification

int Partition::classify_slow(std::uint64_t p) const {
  switch (kind_) {
    case PartitionKind::ap: return ap_table_[p % ap_.q];
    case PartitionKind::digit: {
      if (p % digit_.modulus == digit_.residue) return 1;
      char buf[24];
      int len = std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(p));
      if (len < digit_.start_digits) return 0;
      const std::string& pre = digit_.prefix(len);
      return std::equal(pre.begin(), pre.end(), buf) ? 2 : 0;
    }
    case PartitionKind::adversarial: {
      auto l = adv_.interval_index(static_cast<double>(p));
      return (l >= 1 && adv_.in_b(l)) ? 1 : 0;
    }
    case PartitionKind::custom:
      for (const auto& r : custom_.rules) {
        if (p < r.min || p > r.max) continue;
        if (r.modulus != 0 &&
            std::find(r.residues.begin(), r.residues.end(), p % r.modulus) == r.residues.end())
          continue;
        return r.cell;
      }
      return 0;
  }
  return 0;
}

// ---------------------------------------------------------------- tail densities

std::vector<DensityPiece> Partition::tail_density(int cell, double v0, double v1) const {
  if (cell < 0 || cell >= cells_) throw ValidationError("tail_density: cell out of range");
  std::vector<DensityPiece> out;
  if (!(v1 > v0)) return out;
  switch (kind_) {
    case PartitionKind::ap: {
      double d = static_cast<double>(ap_.m[cell]) / ap_.phi_q;
      out.push_back({v0, v1, d, d});
      break;
    }
    case PartitionKind::digit: {
      double d1 = std::gcd(digit_.residue, digit_.modulus) == 1 ? 1.0 / euler_phi(digit_.modulus) : 0.0;
      if (cell == 1)
        out.push_back({v0, v1, d1, d1});
      else
        out.push_back({v0, v1, 0.0, 1.0 - d1});
      break;
    }
    case PartitionKind::adversarial: {
      double lb = std::log(adv_.b);
      if (v0 < lb) {
        double e = std::min(v1, lb);
        double d = cell == 0 ? 1.0 : 0.0;
        out.push_back({v0, e, d, d});
        v0 = e;
      }
      if (!(v1 > v0)) break;
      std::int64_t l = adv_.interval_index(std::exp(std::min(v0, 700.0)));
      if (v0 > 700.0) {
        // locate l from v0 directly
        l = static_cast<std::int64_t>(std::floor(std::log(v0 / lb) / std::log(adv_.c))) + 1;
        while (l > 1 && adv_.log_y(l - 1) > v0) --l;
        while (adv_.log_y(l) <= v0) ++l;
      }
      double cur = v0;
      for (int guard = 0; guard < 4096 && cur < v1; ++guard, ++l) {
        double e = std::min(v1, adv_.log_y(l));
        bool mine = (adv_.in_b(l) ? 1 : 0) == cell;
        double d = mine ? 1.0 : 0.0;
        if (e > cur) out.push_back({cur, e, d, d});
        cur = e;
        if (std::isinf(e)) break;
      }
      break;
    }
    case PartitionKind::custom: {
      if (cells_ == 1)
        out.push_back({v0, v1, 1.0, 1.0});
      else
        out.push_back({v0, v1, 0.0, 1.0});
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------- accessors

const ApMeta& Partition::ap_meta() const {
  if (kind_ != PartitionKind::ap) throw ValidationError("partition is not of kind ap");
  return ap_;
}
const DigitMeta& Partition::digit_meta() const {
  if (kind_ != PartitionKind::digit) throw ValidationError("partition is not of kind digit");
  return digit_;
}
const AdversarialMeta& Partition::adversarial_meta() const {
  if (kind_ != PartitionKind::adversarial) throw ValidationError("partition is not of kind adversarial");
  return adv_;
}
const CustomMeta& Partition::custom_meta() const {
  if (kind_ != PartitionKind::custom) throw ValidationError("partition is not of kind custom");
  return custom_;
}

void Partition::set_ap_constants(std::vector<double> c, std::vector<double> residual) {
  if (kind_ != PartitionKind::ap) throw ValidationError("partition is not of kind ap");
  if (c.size() != static_cast<std::size_t>(cells_)) throw ValidationError("set_ap_constants: size mismatch");
  ap_.c = std::move(c);
  ap_.c_residual = std::move(residual);
  ap_.c_residual.resize(cells_, std::numeric_limits<double>::quiet_NaN());
}

bool Partition::has_ap_constants() const {
  return kind_ == PartitionKind::ap &&
         std::none_of(ap_.c.begin(), ap_.c.end(), [](double v) { return std::isnan(v); });
}

std::vector<std::string> Partition::notes() const {
  std::vector<std::string> n;
  if (kind_ == PartitionKind::adversarial) n.push_back("primes below y_0 = b are routed to cell 0 (E_1)");
  if (kind_ == PartitionKind::ap) n.push_back("primes dividing q go to cell 0 unless their residue is claimed");
  return n;
}

// ---------------------------------------------------------------- JSON

namespace {

template <class T>
T get_or(const json& j, const char* key, T def) {
  return j.contains(key) ? j.at(key).get<T>() : def;
}

}  // namespace

Partition Partition::from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("kind")) throw ValidationError("partition JSON: missing \"kind\"");
    std::string kind = j.at("kind").get<std::string>();
    Partition P;
    if (kind == "ap") {
      auto q = get_or<std::uint64_t>(j, "q", 1);
      auto cells = get_or<std::vector<std::vector<std::uint64_t>>>(j, "cells", {});
      P = ap(q, cells);
      if (j.contains("c")) {
        auto c = j.at("c").get<std::vector<double>>();
        P.set_ap_constants(c, get_or<std::vector<double>>(j, "c_residual", {}));
      }
    } else if (kind == "digit") {
      DigitMeta m;
      m.start_digits = get_or<int>(j, "start_digits", m.start_digits);
      m.default_prefix = get_or<std::string>(j, "prefix", m.default_prefix);
      if (j.contains("prefix_by_digits"))
        for (auto& [k, v] : j.at("prefix_by_digits").items()) m.prefix_by_digits[std::stoi(k)] = v.get<std::string>();
      if (j.contains("excluded_residue")) {
        const auto& e = j.at("excluded_residue");
        m.modulus = e.at("modulus").get<std::uint64_t>();
        m.residue = e.at("residue").get<std::uint64_t>();
      }
      P = digit(m);
    } else if (kind == "adversarial") {
      AdversarialMeta m;
      m.b = get_or<double>(j, "b", m.b);
      m.c = get_or<double>(j, "c", m.c);
      P = adversarial(m);
    } else if (kind == "custom") {
      CustomMeta m;
      m.cells = get_or<int>(j, "cells", 1);
      for (const auto& r : get_or<json>(j, "rules", json::array())) {
        CustomRule cr;
        cr.cell = r.at("cell").get<int>();
        cr.modulus = get_or<std::uint64_t>(r, "modulus", 0);
        cr.residues = get_or<std::vector<std::uint64_t>>(r, "residues", {});
        cr.min = get_or<std::uint64_t>(r, "min", 0);
        cr.max = get_or<std::uint64_t>(r, "max", UINT64_MAX);
        m.rules.push_back(cr);
      }
      P = custom(m);
    } else {
      throw ValidationError("partition JSON: unknown kind '" + kind + "'");
    }
    return P;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("partition JSON: ") + e.what());
  }
}

json Partition::to_json() const {
  json j;
  j["kind"] = to_string(kind_);
  switch (kind_) {
    case PartitionKind::ap:
      j["q"] = ap_.q;
      j["cells"] = ap_.residues;
      if (has_ap_constants()) j["c"] = ap_.c;
      break;
    case PartitionKind::digit: {
      j["start_digits"] = digit_.start_digits;
      j["prefix"] = digit_.default_prefix;
      json by = json::object();
      for (auto& [d, s] : digit_.prefix_by_digits) by[std::to_string(d)] = s;
      j["prefix_by_digits"] = by;
      j["excluded_residue"] = {{"modulus", digit_.modulus}, {"residue", digit_.residue}};
      break;
    }
    case PartitionKind::adversarial:
      j["b"] = adv_.b;
      j["c"] = adv_.c;
      break;
    case PartitionKind::custom: {
      j["cells"] = custom_.cells;
      json rules = json::array();
      for (const auto& r : custom_.rules) {
        json jr{{"cell", r.cell}};
        if (r.modulus) {
          jr["modulus"] = r.modulus;
          jr["residues"] = r.residues;
        }
        if (r.min) jr["min"] = r.min;
        if (r.max != UINT64_MAX) jr["max"] = r.max;
        rules.push_back(jr);
      }
      j["rules"] = rules;
      break;
    }
  }
  return j;
}

Partition Partition::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open partition file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("partition file '" + path + "': " + e.what());
  }
  return from_json(j);
}

void Partition::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write partition file '" + path + "'");
  out << to_json().dump(2) << "\n";
}

// ---------------------------------------------------------------- AP constants

double fit_ap_constant(const Partition& partition, int cell, const PrimeTable& table, double* residual) {
  const ApMeta& meta = partition.ap_meta();
  if (cell < 0 || cell >= partition.cells()) throw ValidationError("fit_ap_constant: cell out of range");
  if (table.limit() < 100000) throw InsufficientDataError("fit_ap_constant: table limit below 1e5");
  const double lim = static_cast<double>(table.limit());
  const int npts = 24;
  std::vector<double> grid(npts);
  for (int i = 0; i < npts; ++i) grid[i] = std::exp(0.5 * std::log(lim) * (1.0 + double(i) / (npts - 1)));
  grid.back() = lim;
  const double slope = static_cast<double>(meta.m[cell]) / meta.phi_q;
  std::vector<double> dev;
  KahanSum e;
  std::size_t gi = 0;
  bool any = false;
  for (std::uint32_t p : table.primes()) {
    while (gi < grid.size() && p > grid[gi]) {
      dev.push_back(e.value() - slope * std::log(std::log(grid[gi])));
      ++gi;
    }
    if (partition.classify(p) == cell) {
      e += 1.0 / p;
      any = true;
    }
  }
  while (gi < grid.size()) dev.push_back(e.value() - slope * std::log(std::log(grid[gi++])));
  if (!any) throw InsufficientDataError("fit_ap_constant: cell has no primes below the table limit");
  double c = std::accumulate(dev.begin(), dev.end(), 0.0) / dev.size();
  if (residual) {
    double r = 0;
    for (double d : dev) r = std::max(r, std::abs(d - c));
    *residual = r;
  }
  return c;
}

void fit_ap_constants(Partition& partition, const PrimeTable& table) {
  std::vector<double> c(partition.cells()), r(partition.cells());
  for (int j = 0; j < partition.cells(); ++j) c[j] = fit_ap_constant(partition, j, table, &r[j]);
  partition.set_ap_constants(c, r);
}

}  // namespace omegalab
