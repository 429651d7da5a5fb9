#include "omegalab/numeric.hpp"

#include <limits>
#include <numbers>

#include "omegalab/error.hpp"

namespace omegalab {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

cplx e1_series(cplx z) {
  cplx term = 1.0;
  cplx acc = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= -z / static_cast<double>(k);
    cplx add = term / static_cast<double>(k);
    acc += add;
    if (std::abs(add) < 1e-18 * std::abs(acc)) break;
  }
  return -kEulerGamma - std::log(z) - acc;
}

// Modified Lentz on E1(z) = e^{-z} / (z+1 - 1/(z+3 - 4/(z+5 - ...))).
cplx e1_fraction(cplx z) {
  const double tiny = 1e-300;
  cplx b = z + 1.0;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < 20000; ++i) {
    double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    cplx del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-z);
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Γ(l, x) for integer l ≥ 1.
template <class T>
T upper_gamma_int(int l, T x) {
  T sum = 0.0, term = 1.0;
  for (int i = 0; i < l; ++i) {
    if (i > 0) term *= x / static_cast<double>(i);
    sum += term;
  }
  return factorial(l - 1) * std::exp(-x) * sum;
}

template <class T>
T moment_integral(int l, T eps, double a, double b) {
  if (!(a > 0.0) || b < a) throw DomainError("log_moment_integral: need 0 < a <= b");
  const bool infinite = std::isinf(b);
  if (std::abs(eps) == 0.0) {
    if (infinite) throw DomainError("log_moment_integral: divergent integral");
    return l == 0 ? T(std::log(b / a)) : T(-std::pow(b, l) * std::expm1(l * std::log(a / b)) / l);
  }
  if (!infinite && std::abs(eps) * b <= 1.0) {
    // Σ_m (-eps)^m/m! ∫_a^b v^{l+m-1} dv, written in units of b to avoid overflow
    T acc = 0.0, coef = 1.0;
    const double bl = std::pow(b, l);
    const double la = std::log(a / b);
    for (int m = 0; m < 200; ++m) {
      if (m > 0) coef *= -eps * b / static_cast<double>(m);
      int n = l + m;
      double j = n == 0 ? -la : -std::expm1(n * la) / n;
      T add = coef * (bl * j);
      acc += add;
      if (m > 2 && std::abs(add) <= 1e-18 * std::abs(acc)) break;
    }
    return acc;
  }
  if (infinite && std::real(eps) <= 0.0)
    throw DomainError("log_moment_integral: divergent tail");
  if (l == 0) {
    T lo = expint_e1(eps * a);
    return infinite ? lo : lo - expint_e1(eps * b);
  }
  T lo = upper_gamma_int<T>(l, eps * a);
  T hi = infinite ? T(0.0) : upper_gamma_int<T>(l, eps * b);
  return (lo - hi) / std::pow(eps, l);
}

}  // namespace

cplx expint_e1(cplx z) {
  if (std::abs(z) <= 2.0) return e1_series(z);
  if (std::real(z) <= 0.0 && std::abs(std::imag(z)) < 1e-300)
    throw DomainError("expint_e1: argument on the branch cut");
  return e1_fraction(z);
}

double expint_e1(double x) {
  if (!(x > 0.0)) throw DomainError("expint_e1: argument must be positive");
  return std::real(expint_e1(cplx(x, 0.0)));
}

double log_moment_integral(int l, double eps, double a, double b) {
  return moment_integral<double>(l, eps, a, b);
}

cplx log_moment_integral(int l, cplx eps, double a, double b) {
  return moment_integral<cplx>(l, eps, a, b);
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

RootResult bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                          const RootOptions& opt) {
  return bracketed_root(f, lo, hi, f(lo), f(hi), opt);
}

RootResult bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                          double f_lo, double f_hi, const RootOptions& opt) {
  if (f_lo == 0.0) return {lo, 0.0, 0};
  if (f_hi == 0.0) return {hi, 0.0, 0};
  if (std::isnan(f_lo) || std::isnan(f_hi) || (f_lo > 0) == (f_hi > 0))
    throw BracketError("bracketed_root: no sign change", lo, hi, f_lo, f_hi);
  int side = 0;
  double width = std::abs(hi - lo);
  for (int it = 1; it <= opt.max_iter; ++it) {
    double x;
    bool bisect = std::abs(hi - lo) > 0.5 * width;
    width = std::abs(hi - lo);
    if (bisect || it % 8 == 0) {
      x = 0.5 * (lo + hi);
    } else {
      x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
      if (!(x > std::min(lo, hi) && x < std::max(lo, hi))) x = 0.5 * (lo + hi);
    }
    double fx = f(x);
    if (fx == 0.0 || std::abs(fx) <= opt.ftol) return {x, fx, it};
    if ((fx > 0) == (f_lo > 0)) {
      lo = x;
      f_lo = fx;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = x;
      f_hi = fx;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    }
    double tol = opt.xtol_abs + opt.xtol_rel * std::abs(x);
    if (std::abs(hi - lo) <= tol) {
      double best = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
      return {best, f(best), it};
    }
  }
  double mid = 0.5 * (lo + hi);
  return {mid, f(mid), opt.max_iter};
}

Series operator*(const Series& a, const Series& b) {
  int k = std::min(a.order(), b.order());
  Series r(k);
  for (int i = 0; i <= k; ++i)
    for (int j = 0; i + j <= k; ++j) r.c[i + j] += a.c[i] * b.c[j];
  return r;
}

Series operator+(const Series& a, const Series& b) {
  int k = std::min(a.order(), b.order());
  Series r(k);
  for (int i = 0; i <= k; ++i) r.c[i] = a.c[i] + b.c[i];
  return r;
}

Series operator*(double s, const Series& a) {
  Series r = a;
  for (double& v : r.c) v *= s;
  return r;
}

Series geometric(int order, double q) {
  Series r(order);
  double t = 1.0;
  for (int i = 0; i <= order; ++i) {
    r.c[i] = t;
    t *= -q;
  }
  return r;
}

}  // namespace omegalab
