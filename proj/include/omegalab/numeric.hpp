#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace omegalab {

using cplx = std::complex<double>;

/// Neumaier compensated accumulator.
template <class T>
class CompensatedSum {
 public:
  CompensatedSum& operator+=(T v) {
    T t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
    return *this;
  }
  CompensatedSum& operator-=(T v) { return *this += -v; }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{};
  T comp_{};
};

using KahanSum = CompensatedSum<double>;
using KahanSumC = CompensatedSum<cplx>;

/// Exponential integral E1(z) for Re z > 0 or real z > 0.
cplx expint_e1(cplx z);
double expint_e1(double x);

/// ∫_a^b v^{l-1} e^{-eps v} dv for integer l ≥ 0, 0 < a ≤ b ≤ inf (b = inf allowed
/// when Re eps > 0). Real and complex eps.
double log_moment_integral(int l, double eps, double a, double b);
cplx log_moment_integral(int l, cplx eps, double a, double b);

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

struct RootOptions {
  double xtol_rel = 1e-15;
  double xtol_abs = 0.0;
  double ftol = 0.0;
  int max_iter = 400;
};

struct RootResult {
  double x;
  double fx;
  int iterations;
};

/// Bracketed root of a continuous function: Illinois steps guarded by bisection.
/// Requires f(lo), f(hi) of opposite sign (or zero); throws BracketError otherwise.
RootResult bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                          const RootOptions& opt = {});

/// Same, with function values at the endpoints already known.
RootResult bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                          double f_lo, double f_hi, const RootOptions& opt = {});

/// Truncated power series in one variable (coefficients c[0..K]).
struct Series {
  std::vector<double> c;
  explicit Series(int order, double c0 = 0.0) : c(order + 1, 0.0) { c[0] = c0; }
  int order() const { return static_cast<int>(c.size()) - 1; }
};
Series operator*(const Series& a, const Series& b);
Series operator+(const Series& a, const Series& b);
Series operator*(double s, const Series& a);
/// 1/(1 + q w) as a series in w.
Series geometric(int order, double q);

}  // namespace omegalab
