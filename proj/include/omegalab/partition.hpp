#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "omegalab/primes.hpp"

namespace omegalab {

enum class PartitionKind { ap, digit, adversarial, custom };

/// Arithmetic-progression partition mod q. Cell 0 is the complement of cells 1..n.
struct ApMeta {
  std::uint64_t q = 1;
  std::vector<std::vector<std::uint64_t>> residues;  ///< residue sets of cells 1..n
  std::vector<int> m;                                ///< coprime residue classes per cell 0..n
  int phi_q = 1;
  std::vector<double> c;           ///< fitted constants (NaN until fitted)
  std::vector<double> c_residual;  ///< max |E_j(t) − (m_j/φ)loglog t − c_j| on the fit grid
};

/// Digit-prefix family: cell 1 = excluded residue class, cell 2 = primes with at least
/// start_digits digits whose leading digits match the prefix for their digit count.
struct DigitMeta {
  int start_digits = 3;
  std::string default_prefix = "10";
  std::map<int, std::string> prefix_by_digits;
  std::uint64_t modulus = 10;
  std::uint64_t residue = 3;

  const std::string& prefix(int digits) const;
};

/// Interval family y_l = b^{c^l}, I_l = [y_{l−1}, y_l); cell 1 collects I_l with l ∈ B,
/// B = ∪_m [c^{m+1} − m, c^{m+1}); cell 0 the rest, including primes below y_0 = b.
struct AdversarialMeta {
  double b = 2.0;
  double c = 2.0;

  bool in_b(std::int64_t l) const;
  /// Interval index l ≥ 1 of p ≥ b (0 for p < b).
  std::int64_t interval_index(double p) const;
  /// log y_l.
  double log_y(std::int64_t l) const;
};

struct CustomRule {
  int cell = 0;
  std::uint64_t modulus = 0;  ///< 0: no residue condition
  std::vector<std::uint64_t> residues;
  std::uint64_t min = 0;
  std::uint64_t max = UINT64_MAX;
};

struct CustomMeta {
  int cells = 1;
  std::vector<CustomRule> rules;  ///< first matching rule wins; default cell 0
};

/// Asymptotic density bracket of a cell on a log-scale range [v0, v1) (v = log p).
struct DensityPiece {
  double v0, v1;
  double lo, hi;
};

class Partition {
 public:
  static Partition single();
  static Partition ap(std::uint64_t q, std::vector<std::vector<std::uint64_t>> cell_residues);
  static Partition digit(DigitMeta meta);
  static Partition adversarial(AdversarialMeta meta);
  static Partition custom(CustomMeta meta);

  static Partition from_json(const nlohmann::json& j);
  static Partition load(const std::string& path);
  nlohmann::json to_json() const;
  void save(const std::string& path) const;

  int cells() const { return cells_; }
  PartitionKind kind() const { return kind_; }
  std::string id() const { return to_json().dump(); }

  int classify(std::uint64_t p) const {
    if (kind_ == PartitionKind::ap) return ap_table_[p % ap_.q];
    return classify_slow(p);
  }

  /// Density brackets for the tail of a cell over [v0, v1) (v1 may be +inf).
  std::vector<DensityPiece> tail_density(int cell, double v0, double v1) const;

  const ApMeta& ap_meta() const;
  const DigitMeta& digit_meta() const;
  const AdversarialMeta& adversarial_meta() const;
  const CustomMeta& custom_meta() const;

  /// Store fitted AP constants (see fit_ap_constants).
  void set_ap_constants(std::vector<double> c, std::vector<double> residual);
  bool has_ap_constants() const;

  /// Conventions recorded with the partition (e.g. routing of small primes).
  std::vector<std::string> notes() const;

 private:
  int classify_slow(std::uint64_t p) const;

  PartitionKind kind_ = PartitionKind::ap;
  int cells_ = 1;
  ApMeta ap_;
  std::vector<std::uint8_t> ap_table_{0};
  DigitMeta digit_;
  AdversarialMeta adv_;
  CustomMeta custom_;
};

std::string to_string(PartitionKind k);

/// Least-squares constant c_j in E_j(t) = (m_j/φ(q)) log log t + c_j on a geometric
/// grid over [√limit, limit]. Throws InsufficientDataError for cells without primes.
double fit_ap_constant(const Partition& partition, int cell, const PrimeTable& table,
                       double* residual = nullptr);

/// Fits every cell and stores the constants in the partition.
void fit_ap_constants(Partition& partition, const PrimeTable& table);

int euler_phi(std::uint64_t q);

}  // namespace omegalab
