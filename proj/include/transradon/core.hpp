#pragma once
// Shared numerics: error type, deterministic threading, summation,
// gamma functions, Gauss-Legendre rules and the normalizing constants.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace transradon {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error(what);
}

// ---------------------------------------------------------------- threads

inline std::atomic<int>& thread_setting() {
  static std::atomic<int> n{1};
  return n;
}

inline void set_threads(int n) { thread_setting() = std::max(1, n); }

inline int threads() { return thread_setting().load(); }

// Runs fn(i) for i in [0, n). Every index is handled by exactly one call,
// so results never depend on the thread count as long as fn writes only
// to slots owned by i.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t nt = std::min<std::size_t>(threads(), n);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  const std::size_t chunk = std::max<std::size_t>(1, n / (8 * nt));
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      try {
        for (;;) {
          std::size_t lo = next.fetch_add(chunk);
          if (lo >= n) break;
          std::size_t hi = std::min(n, lo + chunk);
          for (std::size_t i = lo; i < hi; ++i) fn(i);
        }
      } catch (...) {
        std::lock_guard<std::mutex> g(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

// --------------------------------------------------------------- summation

// Pairwise summation of term(i), i in [lo, hi). Fixed tree, fixed result.
template <class T, class Term>
T pairwise_sum(std::size_t lo, std::size_t hi, const Term& term) {
  if (hi - lo <= 16) {
    T s{};
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum<T>(lo, mid, term) + pairwise_sum<T>(mid, hi, term);
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum<T>(0, v.size(), [&](std::size_t i) { return v[i]; });
}

// ------------------------------------------------------------------ gamma

// Lanczos approximation (g = 7, 9 terms) with reflection, ~1e-15 relative.
inline cplx gamma_c(cplx z) {
  static const double c[9] = {0.99999999999980993,  676.5203681218851,
                              -1259.1392167224028,  771.32342877765313,
                              -176.61502916214059,  12.507343278686905,
                              -0.13857109526572012, 9.9843695780195716e-6,
                              1.5056327351493116e-7};
  if (z.real() < 0.5) return pi / (std::sin(pi * z) * gamma_c(1.0 - z));
  z -= 1.0;
  cplx x = c[0];
  for (int i = 1; i < 9; ++i) x += c[i] / (z + double(i));
  cplx t = z + 7.5;
  return std::sqrt(2 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

inline bool is_real(cplx z) { return z.imag() == 0.0; }

inline cplx gamma_fn(cplx z) {
  if (is_real(z)) return std::tgamma(z.real());
  return gamma_c(z);
}

// 1/Gamma, zero at the poles 0, -1, -2, ...
inline cplx rgamma(cplx z) {
  if (is_real(z) && z.real() <= 0 && z.real() == std::floor(z.real()))
    return 0.0;
  return 1.0 / gamma_fn(z);
}

inline bool near_int(double x, double tol = 1e-12) {
  return std::abs(x - std::round(x)) < tol;
}

// Area of the unit sphere S^{k} in R^{k+1}: 2 pi^{(k+1)/2} / Gamma((k+1)/2).
// sphere_area(0) = 2 (two points).
inline double sphere_area(int k) {
  return 2 * std::pow(pi, (k + 1) / 2.0) / std::tgamma((k + 1) / 2.0);
}

// gamma_m(alpha) = 2^alpha pi^{m/2} Gamma(alpha/2) / Gamma((m - alpha)/2)
inline cplx riesz_constant(int m, cplx alpha) {
  return std::pow(cplx(2.0), alpha) * std::pow(pi, m / 2.0) *
         gamma_fn(alpha / 2.0) * rgamma((double(m) - alpha) / 2.0);
}

// Rejects orders where gamma_m(alpha) has a pole or vanishes:
// alpha in {0, -2, ...} (Gamma(alpha/2) pole) or alpha - m in {0, 2, 4, ...}.
inline void check_riesz_order(int m, cplx alpha) {
  require(alpha.real() > 0, "potential regime needs Re(alpha) > 0");
  if (is_real(alpha)) {
    double d = alpha.real() - m;
    if (d >= -1e-12 && near_int(d / 2.0))
      throw Error("alpha - " + std::to_string(m) +
                  " is a nonnegative even integer: Gamma((m - alpha)/2) has a "
                  "pole, gamma_" + std::to_string(m) + "(alpha) is undefined");
  }
}

// ------------------------------------------------------- Gauss-Legendre

struct Rule {
  std::vector<double> x, w;
};

inline const Rule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> g(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1, p1 = 0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * k - 1) * z * p1 - (k - 1) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1, p1 = 0;
    for (int k = 1; k <= n; ++k) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2 * k - 1) * z * p1 - (k - 1) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2 / ((1 - z * z) * dp * dp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

// Nodes and weights of an n-point rule mapped to [a, b].
inline Rule gauss_legendre(int n, double a, double b) {
  const Rule& r = gauss_legendre(n);
  Rule o;
  o.x.resize(n);
  o.w.resize(n);
  double h = (b - a) / 2, c = (a + b) / 2;
  for (int i = 0; i < n; ++i) {
    o.x[i] = c + h * r.x[i];
    o.w[i] = h * r.w[i];
  }
  return o;
}

// Composite rule on geometric panels [0, s0], [s0, 2 s0], ... up to smax,
// for integrands with structure at scale s0 and slow tails.
inline Rule graded_rule(double s0, double smax, int per_panel = 12) {
  Rule o;
  double lo = 0, hi = s0;
  while (lo < smax) {
    hi = std::min(hi, smax);
    Rule p = gauss_legendre(per_panel, lo, hi);
    o.x.insert(o.x.end(), p.x.begin(), p.x.end());
    o.w.insert(o.w.end(), p.w.begin(), p.w.end());
    lo = hi;
    hi = 2 * hi;
  }
  return o;
}

// Adaptive Gauss-Kronrod-free integration: composite GL on [a,b] refined by
// doubling panels until two successive estimates agree.
template <class T, class F>
T integrate_1d(const F& f, double a, double b, double rtol = 1e-12,
               int order = 20, int max_panels = 1 << 14) {
  auto est = [&](int panels) {
    T s{};
    double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      Rule r = gauss_legendre(order, a + p * h, a + (p + 1) * h);
      for (int i = 0; i < order; ++i) s += r.w[i] * f(r.x[i]);
    }
    return s;
  };
  T prev = est(1);
  for (int panels = 2; panels <= max_panels; panels *= 2) {
    T cur = est(panels);
    if (std::abs(cur - prev) <= rtol * std::max(std::abs(cur), 1e-300))
      return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace transradon
