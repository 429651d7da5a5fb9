#include "omegalab/primes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "omegalab/error.hpp"

namespace omegalab {

std::vector<std::uint32_t> small_primes(std::uint64_t limit) {
  std::vector<std::uint32_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

bool is_prime_trial(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

namespace {

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Odd-only segmented sieve of primes in [2, limit].
std::vector<std::uint32_t> segmented_primes(std::uint64_t limit, std::uint64_t seg) {
  std::vector<std::uint32_t> out;
  if (limit < 2) return out;
  out.reserve(static_cast<std::size_t>(1.1 * limit / std::max(1.0, std::log(double(limit)) - 1.1)) + 16);
  out.push_back(2);
  const std::uint64_t root = isqrt(limit);
  std::vector<std::uint32_t> base = small_primes(root);
  std::vector<std::uint64_t> next;  // next odd multiple index per base prime
  std::vector<char> mark(seg / 2 + 1);
  for (std::uint64_t lo = 3; lo <= limit; lo += seg) {
    std::uint64_t hi = std::min(limit, lo + seg - 1);
    // odd numbers lo|1 .. hi
    std::uint64_t first = lo | 1;
    if (first > hi) continue;
    std::uint64_t n = (hi - first) / 2 + 1;
    std::fill(mark.begin(), mark.begin() + n, 0);
    for (std::size_t i = 1; i < base.size(); ++i) {
      std::uint64_t p = base[i];
      if (p * p > hi) break;
      std::uint64_t start = std::max(p * p, (first + p - 1) / p * p);
      if (start % 2 == 0) start += p;
      for (std::uint64_t m = start; m <= hi; m += 2 * p) mark[(m - first) / 2] = 1;
    }
    for (std::uint64_t i = 0; i < n; ++i)
      if (!mark[i]) out.push_back(static_cast<std::uint32_t>(first + 2 * i));
  }
  return out;
}

}  // namespace

PrimeTable sieve(std::uint64_t limit, const SieveOptions& opt) {
  if (limit < 2) throw ValidationError("sieve: limit must be at least 2");
  if (limit > opt.max_limit)
    throw CapacityError("sieve: limit " + std::to_string(limit) + " exceeds capacity " +
                        std::to_string(opt.max_limit));
  if (limit > opt.spf_budget && !opt.segmented)
    throw CapacityError("sieve: limit exceeds the spf memory budget and segmented mode is off");
  PrimeTable t;
  t.limit_ = limit;
  if (limit <= opt.spf_budget) {
    t.spf_.assign(limit + 1, 0);
    for (std::uint64_t i = 2; i <= limit; ++i) {
      if (t.spf_[i] != 0) continue;
      t.spf_[i] = static_cast<std::uint32_t>(i);
      t.primes_.push_back(static_cast<std::uint32_t>(i));
      if (i * i > limit) continue;
      for (std::uint64_t j = i * i; j <= limit; j += i)
        if (t.spf_[j] == 0) t.spf_[j] = static_cast<std::uint32_t>(i);
    }
  } else {
    t.primes_ = segmented_primes(limit, opt.segment_size);
  }
  return t;
}

std::uint32_t PrimeTable::spf(std::uint64_t m) const {
  if (spf_.empty()) throw CapacityError("PrimeTable: spf array not materialised (use segments)");
  if (m < 2 || m > limit_) throw DomainError("PrimeTable::spf: argument out of range");
  return spf_[m];
}

std::size_t PrimeTable::count_upto(double t) const {
  if (t < 2) return 0;
  if (t >= 4294967295.0) return primes_.size();
  auto v = static_cast<std::uint32_t>(std::floor(t));
  return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), v) - primes_.begin());
}

SegmentedSieve::SegmentedSieve(std::uint64_t limit, std::uint64_t segment_size)
    : limit_(limit), size_(segment_size) {
  if (segment_size < 2) throw ValidationError("segments: segment_size must be at least 2");
  if (limit < 2) throw ValidationError("segments: limit must be at least 2");
  base_ = small_primes(isqrt(limit));
}

std::uint64_t SegmentedSieve::block_count() const { return (limit_ - 2) / size_ + 1; }

SpfBlock SegmentedSieve::block(std::uint64_t index) const {
  SpfBlock b;
  b.lo = 2 + index * size_;
  if (b.lo > limit_) throw DomainError("segments: block index out of range");
  b.hi = std::min(limit_, b.lo + size_ - 1);
  b.spf.assign(b.hi - b.lo + 1, 0);
  for (std::uint64_t p : base_) {
    if (p * p > b.hi) break;
    std::uint64_t start = std::max(p * p, (b.lo + p - 1) / p * p);
    for (std::uint64_t m = start; m <= b.hi; m += p)
      if (b.spf[m - b.lo] == 0) b.spf[m - b.lo] = static_cast<std::uint32_t>(p);
  }
  for (std::uint64_t m = b.lo; m <= b.hi; ++m)
    if (b.spf[m - b.lo] == 0) b.spf[m - b.lo] = static_cast<std::uint32_t>(m);
  return b;
}

std::optional<SpfBlock> SegmentedSieve::next() {
  if (cursor_ >= block_count()) return std::nullopt;
  return block(cursor_++);
}

}  // namespace omegalab
