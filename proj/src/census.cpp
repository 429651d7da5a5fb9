#include "omegalab/census.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>

#include "omegalab/error.hpp"

namespace omegalab {

std::uint64_t CensusTable::total() const {
  std::uint64_t t = 0;
  for (const auto& [k, c] : counts) t += c;
  return t;
}

std::uint64_t CensusTable::count(const KVector& k) const {
  auto it = counts.find(k);
  return it == counts.end() ? 0 : it->second;
}

int CensusTable::max_k(int cell) const {
  int m = 0;
  for (const auto& [k, c] : counts) m = std::max(m, k.at(cell));
  return m;
}

void CensusTable::write_csv(std::ostream& out) const {
  for (int j = 0; j < cells; ++j) out << "k_" << j << ",";
  out << "count\n";
  for (const auto& [k, c] : counts) {
    for (int v : k) out << v << ",";
    out << c << "\n";
  }
}

namespace {

// Iterates primes in increasing order without an upfront bound.
class PrimeWalker {
 public:
  std::uint64_t next() {
    while (true) {
      if (idx_ < buf_.size()) return buf_[idx_++];
      std::uint64_t lim = std::max<std::uint64_t>(1024, hi_ * 4);
      auto all = small_primes(lim);
      buf_.assign(std::upper_bound(all.begin(), all.end(), hi_), all.end());
      idx_ = 0;
      hi_ = lim;
    }
  }

 private:
  std::vector<std::uint32_t> buf_;
  std::size_t idx_ = 0;
  std::uint64_t hi_ = 1;
};

struct Lattice {
  std::vector<int> kmax;
  std::vector<std::uint64_t> stride;  // dense strides or 8-bit packed shifts
  bool dense = true;
  std::uint64_t size = 1;
};

template <bool Dense>
void census_range(std::uint64_t x, const Partition& P, const Lattice& L, const std::vector<std::uint32_t>& base,
                  const std::vector<std::uint8_t>& base_cell, std::uint64_t seg, std::uint64_t first_block,
                  std::uint64_t step, std::vector<std::uint64_t>& dense_counts,
                  std::unordered_map<std::uint64_t, std::uint64_t>& hashed) {
  std::vector<std::uint32_t> prod(seg);
  std::vector<std::uint64_t> key(seg);
  const std::uint64_t nblocks = (x + seg - 1) / seg;
  for (std::uint64_t b = first_block; b < nblocks; b += step) {
    const std::uint64_t lo = 1 + b * seg;
    const std::uint64_t hi = std::min(x, lo + seg - 1);
    const std::uint64_t n = hi - lo + 1;
    std::fill_n(prod.begin(), n, 1u);
    std::fill_n(key.begin(), n, 0u);
    for (std::size_t i = 0; i < base.size(); ++i) {
      const std::uint64_t p = base[i];
      const std::uint64_t inc = L.stride[base_cell[i]];
      std::uint64_t m = (lo + p - 1) / p * p;
      for (; m <= hi; m += p) {
        key[m - lo] += inc;
        prod[m - lo] *= static_cast<std::uint32_t>(p);
      }
      for (std::uint64_t pk = p * p; pk <= hi; pk *= p) {
        for (m = (lo + pk - 1) / pk * pk; m <= hi; m += pk) prod[m - lo] *= static_cast<std::uint32_t>(p);
        if (pk > hi / p) break;
      }
    }
    for (std::uint64_t i = 0; i < n; ++i) {
      std::uint64_t m = lo + i;
      std::uint64_t cof = static_cast<std::uint32_t>(m) / prod[i];
      std::uint64_t k = key[i];
      if (cof > 1) k += L.stride[P.classify(cof)];
      if constexpr (Dense)
        dense_counts[k]++;
      else
        hashed[k]++;
    }
  }
}

}  // namespace

int k_max(std::uint64_t x, const Partition& partition, int cell, bool* empty) {
  if (cell < 0 || cell >= partition.cells()) throw ValidationError("k_max: cell out of range");
  PrimeWalker w;
  long double prod = 1.0L;
  int r = 0;
  bool found = false;
  while (true) {
    std::uint64_t p = w.next();
    if (p > x) break;
    if (partition.classify(p) != cell) continue;
    found = true;
    if (prod * p > static_cast<long double>(x)) break;
    prod *= p;
    ++r;
  }
  if (empty) *empty = !found;
  return r;
}

double smallest_product_log(const Partition& partition, const KVector& k, std::uint64_t bound) {
  std::vector<int> need(k.begin(), k.end());
  double acc = 0.0;
  int remaining = 0;
  for (int v : need) remaining += v;
  // an AP cell without coprime classes holds only primes dividing q
  std::uint64_t finite_end = UINT64_MAX;
  std::vector<char> finite(need.size(), 0);
  if (partition.kind() == PartitionKind::ap) {
    const auto& m = partition.ap_meta();
    for (std::size_t j = 0; j < need.size(); ++j)
      if (m.m[j] == 0) {
        finite[j] = 1;
        finite_end = m.q;
      }
  }
  PrimeWalker w;
  while (remaining > 0) {
    std::uint64_t p = w.next();
    if (p > bound) return std::numeric_limits<double>::infinity();
    if (p > finite_end)
      for (std::size_t j = 0; j < need.size(); ++j)
        if (finite[j] && need[j] > 0) return std::numeric_limits<double>::infinity();
    int c = partition.classify(p);
    if (c < static_cast<int>(need.size()) && need[c] > 0) {
      need[c]--;
      remaining--;
      acc += std::log(static_cast<double>(p));
    }
  }
  return acc;
}

CensusTable census(std::uint64_t x, const Partition& partition, const CensusOptions& opt) {
  if (x < 1) throw ValidationError("census: x must be at least 1");
  if (x > opt.max_x || x > 0xFFFFFFFFULL) throw CapacityError("census: x exceeds capacity");
  const int n = partition.cells();
  if (n > opt.max_cells)
    throw CapacityError("census: partition has " + std::to_string(n) + " cells, limit is " +
                        std::to_string(opt.max_cells));
  Lattice L;
  L.kmax.resize(n);
  long double size = 1;
  for (int j = 0; j < n; ++j) {
    L.kmax[j] = x >= 2 ? k_max(x, partition, j) : 0;
    size *= (L.kmax[j] + 1);
  }
  L.dense = size <= static_cast<long double>(opt.dense_limit);
  L.stride.resize(n);
  if (L.dense) {
    std::uint64_t s = 1;
    for (int j = 0; j < n; ++j) {
      L.stride[j] = s;
      s *= (L.kmax[j] + 1);
    }
    L.size = s;
  } else {
    for (int j = 0; j < n; ++j) L.stride[j] = 1ULL << (8 * j);
  }

  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x)));
  while (root * root > x) --root;
  while ((root + 1) * (root + 1) <= x) ++root;
  std::vector<std::uint32_t> base = small_primes(root);
  std::vector<std::uint8_t> base_cell(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) base_cell[i] = static_cast<std::uint8_t>(partition.classify(base[i]));

  const std::uint64_t seg = std::min<std::uint64_t>(opt.segment_size, x);
  const int threads = std::max(1, opt.threads);
  std::vector<std::vector<std::uint64_t>> dense(threads);
  std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> hashed(threads);
  auto work = [&](int t) {
    if (L.dense) {
      dense[t].assign(L.size, 0);
      census_range<true>(x, partition, L, base, base_cell, seg, t, threads, dense[t], hashed[t]);
    } else {
      census_range<false>(x, partition, L, base, base_cell, seg, t, threads, dense[t], hashed[t]);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  CensusTable table;
  table.x = x;
  table.cells = n;
  table.partition_id = partition.id();
  auto decode = [&](std::uint64_t key) {
    KVector k(n);
    for (int j = 0; j < n; ++j) {
      if (L.dense) {
        k[j] = static_cast<int>(key % (L.kmax[j] + 1));
        key /= (L.kmax[j] + 1);
      } else {
        k[j] = static_cast<int>((key >> (8 * j)) & 0xFF);
      }
    }
    return k;
  };
  if (L.dense) {
    for (std::uint64_t key = 0; key < L.size; ++key) {
      std::uint64_t c = 0;
      for (int t = 0; t < threads; ++t) c += dense[t][key];
      if (c) table.counts[decode(key)] += c;
    }
  } else {
    for (int t = 0; t < threads; ++t)
      for (auto& [key, c] : hashed[t]) table.counts[decode(key)] += c;
  }
  return table;
}

CensusTable marginal(const CensusTable& table, const std::vector<int>& kept_cells) {
  for (int c : kept_cells)
    if (c < 0 || c >= table.cells) throw ValidationError("marginal: cell out of range");
  CensusTable out;
  out.x = table.x;
  out.cells = static_cast<int>(kept_cells.size());
  out.partition_id = table.partition_id;
  for (const auto& [k, c] : table.counts) {
    KVector kk;
    kk.reserve(kept_cells.size());
    for (int j : kept_cells) kk.push_back(k[j]);
    out.counts[kk] += c;
  }
  return out;
}

}  // namespace omegalab
