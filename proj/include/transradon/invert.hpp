#pragma once

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "frac.hpp"
#include "slice.hpp"

namespace transradon {

// ------------------------------------------------- spectral backprojection

// Multiplier in the dual variable eta of b (or x_m).
using EtaMultiplier = std::function<cplx(double)>;

namespace detail {

inline std::size_t fft_size(std::size_t n) {
  for (;; ++n) {
    std::size_t r = n;
    for (std::size_t p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1 && n % 2 == 0) return n;
  }
}

// out(x) = sum_a weight(a) trap(a) g(a, x_m - a.x'), computed in the Fourier
// domain of b. The b-axis is zero-padded so that every shift a.x' stays in
// one period, so the result is the exact band-limited interpolant of the
// rows. `pre` multiplies each row spectrum before the a-sum, `post` the
// spectrum of the result. The output x_m axis must be a run of b-nodes.
inline ScalarField backproject_spectral(const Sinogram& g, const UniformGrid& out,
                                        const std::function<double(const double*)>& weight,
                                        const EtaMultiplier& pre,
                                        const EtaMultiplier& post) {
  const std::size_t m = g.dim();
  require(out.dim() == m, "backprojection: dimension mismatch");
  const double db = g.db();
  require(std::abs(out.spacing[m - 1] - db) <= 1e-12 * db,
          "spectral backprojection: output x_m spacing must equal the b spacing");
  const double off = (out.origin[m - 1] - g.b0()) / db;
  require(std::abs(off - std::round(off)) <= 1e-9,
          "spectral backprojection: output x_m nodes must lie on the b grid");

  // range of a.x' over the a-grid and the output x'
  double shift = 0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    double amax = std::max(std::abs(g.grid.origin[k]), std::abs(g.grid.last(k)));
    double xmax = std::max(std::abs(out.origin[k]), std::abs(out.last(k)));
    shift += amax * xmax;
  }
  const double lo = std::min(g.b0(), out.origin[m - 1] - shift) - 4 * db;
  const double hi = std::max(g.b0() + double(g.nb() - 1) * db, out.last(m - 1) + shift) + 4 * db;
  const long k0 = long(std::ceil((g.b0() - lo) / db - 1e-9));
  const double p0 = g.b0() - double(k0) * db;
  const std::size_t L = fft_size(std::size_t(std::ceil((hi - p0) / db)) + 1);
  const std::size_t rows = g.rows(), nb = g.nb();

  // weighted row spectra on the padded axis
  std::vector<cplx> S(rows * L, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    double a[16];
    g.a_node(r, a);
    double w = weight(a);
    std::size_t rest = r;
    for (std::size_t k = m - 1; k-- > 0;) {
      w *= trap_weight(g.grid, k, rest % g.grid.shape[k]);
      rest /= g.grid.shape[k];
    }
    for (std::size_t j = 0; j < nb; ++j) S[r * L + std::size_t(k0) + j] = w * g.row(r)[j];
  }
  std::vector<std::size_t> sshape{rows, L};
  forward_axis(S, sshape, 1, db, p0);
  const double deta = 2 * pi / (double(L) * db);
  std::vector<double> eta(L);
  for (std::size_t j = 0; j < L; ++j) eta[j] = (double(j) - double(L / 2)) * deta;
  if (pre)
    parallel_for(rows, [&](std::size_t r) {
      for (std::size_t j = 1; j < L; ++j) S[r * L + j] *= pre(eta[j]);
      S[r * L] = 0;  // unpaired Nyquist node
    });

  // G(x', eta) = sum_a S(a, eta) exp(i eta a.x'), one a-axis at a time
  std::vector<std::size_t> oshape(out.shape.begin(), out.shape.end() - 1);
  std::size_t cols = 1;
  for (auto s : oshape) cols *= s;
  std::vector<cplx> G(cols * L, 0);
  parallel_for(L, [&](std::size_t j) {
    if (j == 0) return;
    std::vector<cplx> H(rows);
    for (std::size_t r = 0; r < rows; ++r) H[r] = S[r * L + j];
    std::vector<std::size_t> shape(g.grid.shape.begin(), g.grid.shape.end() - 1);
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const std::size_t na = g.grid.shape[k], nx = out.shape[k];
      std::vector<cplx> E(nx * na);
      for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t q = 0; q < na; ++q)
          E[i * na + q] = std::polar(1.0, eta[j] * g.grid.node(k, q) * out.node(k, i));
      H = contract_axis(H, shape, k, E, nx);
    }
    cplx p = post ? post(eta[j]) : cplx(1);
    for (std::size_t c = 0; c < cols; ++c) G[c * L + j] = p * H[c];
  });
  std::vector<std::size_t> gshape{cols, L};
  inverse_axis(G, gshape, 1, db, p0);
  ScalarField f(out);
  const std::size_t j0 = std::size_t(std::llround((out.origin[m - 1] - p0) / db));
  const std::size_t nm = out.shape[m - 1];
  require(j0 + nm <= L, "spectral backprojection: padding too short");
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t j = 0; j < nm; ++j) f.values[c * nm + j] = G[c * L + j0 + j];
  double er = a_edge_ratio(g, 0.0);
  if (er > 1e-8)
    f.notes.push_back("sinogram does not decay within the a-extent (edge/max = " +
                      std::to_string(er) + ")");
  return f;
}

inline EtaMultiplier eta_power(cplx p) {
  return [p](double e) { return abs_power(std::abs(e), p); };
}

inline EtaMultiplier eta_derivative(int k) {
  return [k](double e) { return std::pow(cplx(0, -e), k); };
}

}  // namespace detail

// (R~_T g)(x) = \int g(a, x_m - x'.a) da, evaluated in the Fourier domain of b.
inline ScalarField backprojection_fourier(const Sinogram& g, const UniformGrid& out) {
  return detail::backproject_spectral(g, out, [](const double*) { return 1.0; }, {}, {});
}

// ------------------------------------------- Semyanistyi-family inversion

// f = (2 pi)^{1-m} I_2^alpha R~_T I_2^beta phi, alpha + beta = 1 - m.
inline ScalarField invert_semyanistyi(const Sinogram& phi, const UniformGrid& out,
                                      cplx alpha, cplx beta) {
  const double m = double(phi.dim());
  require(std::abs(alpha + beta - (1 - m)) <= 1e-12,
          "invert_semyanistyi: alpha + beta must equal 1 - m");
  ScalarField f = detail::backproject_spectral(
      phi, out, [](const double*) { return 1.0; }, detail::eta_power(-beta),
      detail::eta_power(-alpha));
  const double c = std::pow(2 * pi, 1 - m);
  for (auto& v : f.values) v *= c;
  return f;
}

enum class Placement { pre, post, split };

// Odd m = 2n + 1: f = (2 pi)^{-2n} (-1)^n d_m^{2n} R~_T phi, with the 2n
// derivatives before, after, or split n + n around the backprojection.
inline ScalarField invert_derivative_odd(const Sinogram& phi, const UniformGrid& out,
                                         Placement where = Placement::split) {
  const std::size_t m = phi.dim();
  require(m % 2 == 1 && m >= 3, "invert_derivative_odd: dimension must be odd");
  const int n = int(m - 1) / 2;
  EtaMultiplier pre, post;
  if (where == Placement::pre) pre = detail::eta_derivative(2 * n);
  if (where == Placement::post) post = detail::eta_derivative(2 * n);
  if (where == Placement::split) {
    pre = detail::eta_derivative(n);
    post = detail::eta_derivative(n);
  }
  ScalarField f = detail::backproject_spectral(
      phi, out, [](const double*) { return 1.0; }, pre, post);
  const double c = (n % 2 ? -1.0 : 1.0) * std::pow(2 * pi, -2.0 * n);
  for (auto& v : f.values) v *= c;
  return f;
}

// --------------------------------------------------- Laplacian inversion

namespace detail {
inline ScalarField minus_laplacian_power(const ScalarField& g, int k) {
  SpectralField G = fourier_forward(g);
  const std::size_t m = g.grid.dim();
  apply_multiplier(G, [&](const double* y) {
    double r2 = 0;
    for (std::size_t i = 0; i < m; ++i) r2 += y[i] * y[i];
    return cplx(std::pow(r2, k));
  });
  ScalarField f = fourier_inverse(G);
  f.notes = g.notes;
  return f;
}

// -Delta by central differences of order 6 in the interior, lower order near
// the faces and one-sided on the boundary node (no periodic wrap).
inline ScalarField minus_laplacian_fd(const ScalarField& g) {
  const UniformGrid& G = g.grid;
  const std::size_t m = G.dim();
  ScalarField out(G);
  auto strides = G.strides();
  static const double c6[4] = {-49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
  static const double c4[3] = {-5.0 / 2, 4.0 / 3, -1.0 / 12};
  parallel_for(G.size(), [&](std::size_t i) {
    std::size_t rest = i;
    cplx acc = 0;
    for (std::size_t k = m; k-- > 0;) {
      const std::size_t n = G.shape[k], j = rest % n, s = strides[k];
      rest /= n;
      const cplx* p = g.values.data() + i;
      const double h2 = G.spacing[k] * G.spacing[k];
      cplx d2;
      const std::size_t e = std::min(j, n - 1 - j);
      if (e >= 3) {
        d2 = c6[0] * p[0];
        for (std::size_t q = 1; q <= 3; ++q) d2 += c6[q] * (p[q * s] + *(p - q * s));
      } else if (e == 2) {
        d2 = c4[0] * p[0] + c4[1] * (p[s] + *(p - s)) + c4[2] * (p[2 * s] + *(p - 2 * s));
      } else if (e == 1) {
        d2 = p[s] - 2.0 * p[0] + *(p - s);
      } else {
        const std::ptrdiff_t d = j == 0 ? std::ptrdiff_t(s) : -std::ptrdiff_t(s);
        d2 = 2.0 * p[0] - 5.0 * p[d] + 4.0 * p[2 * d] - p[3 * d];
      }
      acc -= d2 / h2;
    }
    out.values[i] = acc;
  });
  out.notes = g.notes;
  return out;
}
}  // namespace detail

// spectral: exact for decaying g (Phi inputs). finite_difference: for g with
// slowly decaying tails (g = c I^{m-1} f ~ |x|^{-1} for f of non-zero mean),
// whose periodic wrap would corrupt a spectral Laplacian.
enum class LaplacianMode { spectral, finite_difference };

inline ScalarField minus_laplacian_power(const ScalarField& g, int k, LaplacianMode mode) {
  if (mode == LaplacianMode::spectral) return detail::minus_laplacian_power(g, k);
  ScalarField f = g;
  for (int i = 0; i < k; ++i) f = detail::minus_laplacian_fd(f);
  return f;
}

// g = (2 pi)^{1-m} *R_T(sqrt(1+|a|^2) phi). For phi = R_T f this is
// I^{m-1} f. The ray form covers every direction; the sinogram form
// truncates |a|.
inline ScalarField dual_potential(RaySinogram phi, const UniformGrid& out) {
  const std::size_t m = phi.m;
  require(out.dim() == m, "dual_potential: dimension mismatch");
  const double c = std::pow(2 * pi, 1 - double(m));
  for (std::size_t i = 0; i < phi.rays(); ++i) {
    double s = c * phi.scale(i);
    for (std::size_t j = 0; j < phi.nt; ++j) phi.row(i)[j] *= s;
  }
  return dual_transversal(phi, out);
}

inline ScalarField dual_potential(Sinogram phi, const UniformGrid& out) {
  const std::size_t m = phi.dim();
  const double c = std::pow(2 * pi, 1 - double(m));
  for (std::size_t r = 0; r < phi.rows(); ++r) {
    double a[16];
    phi.a_node(r, a);
    double s = c * std::sqrt(1 + norm2(a, m - 1));
    for (std::size_t j = 0; j < phi.nb(); ++j) phi.row(r)[j] *= s;
  }
  return dual_transversal(phi, out);
}

// Odd m: f = (-Delta)^{(m-1)/2} g with g = dual_potential(phi).
template <class S>
ScalarField invert_laplacian_odd(const S& phi, const UniformGrid& out,
                                 LaplacianMode mode = LaplacianMode::spectral) {
  require(out.dim() % 2 == 1, "invert_laplacian_odd: dimension must be odd");
  return minus_laplacian_power(dual_potential(phi, out), int(out.dim() - 1) / 2, mode);
}

// -------------------------------------------------- Heisenberg inversion

enum class HeisenbergMethod { fourier, derivative };

struct HeisenbergOptions {
  HeisenbergMethod method = HeisenbergMethod::derivative;
  Placement placement = Placement::split;
  bool flip_sign = false;  // negates the (-1)^n factor (regression guard)
  MixingConfig mixing;     // fourier method
};

// f on (xi, eta, tau) from phi = R_H f on (u, v, t). Both methods run the
// transversal formula on Q~ phi; Q^{-1} is the identity on arrays.
//   derivative: f = (-1)^n (4 pi)^{-2n} d_tau^n R_H d_t^n phi
//               = (-1)^n (2 pi)^{-2n} d^n R~_T d^n Q~ phi
//   fourier:    f = F^{-1} Lambda^{-1} F_2 Q~ phi
inline ScalarField invert_heisenberg(const HeisenbergSinogram& phi, const UniformGrid& out,
                                     const HeisenbergOptions& o = {}) {
  require(phi.n() >= 1, "invert_heisenberg: n must be at least 1");
  Sinogram s = q_tilde(phi);
  ScalarField f = o.method == HeisenbergMethod::derivative
                      ? invert_derivative_odd(s, out, o.placement)
                      : invert_fourier(s, out, o.mixing).f;
  if (o.flip_sign)
    for (auto& v : f.values) v = -v;
  return f;
}


// ----------------------------------------------------------- kappa wavelets

struct WaveletSpec {
  int ell = 1;         // l >= 1 and l > (m - 1)/2
  double alpha = 0.5;  // (m - 1)/2 for cbp, (m + 1)/2 for cbpx
  std::size_t m = 2;
};

inline WaveletSpec cbp_wavelet(std::size_t m, int ell = 1) {
  return {ell, (double(m) - 1) / 2, m};
}
inline WaveletSpec cbpx_wavelet(std::size_t m, int ell = 1) {
  return {ell, (double(m) + 1) / 2, m};
}

// kappa(s) = (d/ds)^l s^l (s + i)^{-1-alpha}
//          = sum_j C(l,j) l!/(l-j)! (-1-alpha)_{l-j} s^{l-j} (s + i)^{-1-alpha-(l-j)}
// with the falling factorial (x)_k; w(s) = s kappa(s^2) and
// lambda = I_{0+}^alpha kappa = i^{l-alpha} l!/Gamma(1+alpha) t^alpha (t + i)^{-l-1}.
struct KappaWavelet {
  WaveletSpec spec;
  std::vector<double> coef;  // coef[j] multiplies s^{l-j} (s + i)^{-1-alpha-(l-j)}

  cplx kappa(double s) const {
    const cplx lz = std::log(cplx(s, 1));
    cplx sum = 0;
    for (int j = 0; j <= spec.ell; ++j) {
      const int p = spec.ell - j;
      sum += coef[std::size_t(j)] * std::pow(s, p) * std::exp(-(1 + spec.alpha + p) * lz);
    }
    return sum;
  }
  cplx w(double s) const { return s * kappa(s * s); }
  cplx lambda(double t) const {
    const double l = spec.ell, a = spec.alpha;
    const cplx c = std::exp(cplx(0, pi / 2 * (l - a))) * std::tgamma(l + 1) / std::tgamma(1 + a);
    return c * std::pow(t, a) * std::exp(-(l + 1) * std::log(cplx(t, 1)));
  }
};

inline KappaWavelet kappa_wavelet(const WaveletSpec& spec) {
  require(spec.ell >= 1, "kappa_wavelet: l must be a positive integer");
  require(spec.alpha > 0, "kappa_wavelet: alpha must be positive");
  require(spec.m >= 2, "kappa_wavelet: m must be at least 2");
  require(2 * spec.ell > int(spec.m) - 1, "kappa_wavelet: l must exceed (m-1)/2");
  KappaWavelet W;
  W.spec = spec;
  const int l = spec.ell;
  for (int j = 0; j <= l; ++j) {
    double c = std::tgamma(l + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(l - j + 1.0));
    c *= std::tgamma(l + 1.0) / std::tgamma(l - j + 1.0);
    for (int q = 0; q < l - j; ++q) c *= -1 - spec.alpha - q;
    W.coef.push_back(c);
  }
  return W;
}

// int_0^inf lambda(t) dt = Gamma(l - alpha), finite for l > alpha.
inline double lambda_integral(const WaveletSpec& spec) {
  require(spec.ell > spec.alpha, "lambda_integral: needs l > alpha");
  return std::tgamma(spec.ell - spec.alpha);
}

// gamma = pi^{m-1/2} Gamma(l - (m-1)/2) / Gamma(m/2); gamma_1 = gamma / (i (m+1)).
inline double cbp_gamma(std::size_t m, int ell) {
  require(2 * ell > int(m) - 1, "cbp_gamma: l must exceed (m-1)/2");
  const double md = double(m);
  return std::pow(pi, md - 0.5) * std::tgamma(ell - (md - 1) / 2) / std::tgamma(md / 2);
}
inline cplx cbpx_gamma(std::size_t m, int ell) {
  return cbp_gamma(m, ell) / cplx(0, double(m) + 1);
}

namespace detail {

// int_0^{pi/2} cos^p(th) h(r sin th) dth on panels halving toward th = 0.
template <class H>
cplx theta_integral(const H& h, double r, int p) {
  const Rule& g = gauss_legendre(16);
  const double stop = 1e-9 / std::max(r, 1.0);
  cplx s = 0;
  double hi = pi / 2;
  while (hi > stop) {
    const double lo = hi / 2, c = (lo + hi) / 2, d = (hi - lo) / 2;
    for (int i = 0; i < 16; ++i) {
      const double th = c + d * g.x[i];
      s += d * g.w[i] * std::pow(std::cos(th), p) * h(r * std::sin(th));
    }
    hi = lo;
  }
  return s;
}

}  // namespace detail

// Radial profile k(r) = sigma_{m-2} r^{2-m} int_0^r (r^2 - s^2)^{(m-3)/2} w(s) ds.
inline cplx cbp_kernel(const KappaWavelet& W, double r) {
  const int m = int(W.spec.m);
  return sphere_area(m - 2) *
         detail::theta_integral([&](double s) { return W.w(s); }, r, m - 2);
}

// Radial profile g(r) = sigma_{m-2} / ((m-1) r^m) int_0^r (r^2 - s^2)^{(m-1)/2} w(s) ds.
inline cplx cbpx_kernel(const KappaWavelet& W, double r) {
  const int m = int(W.spec.m);
  return sphere_area(m - 2) / (m - 1) *
         detail::theta_integral([&](double s) { return W.w(s); }, r, m);
}

// w1(s) = s^{-m} int_0^s u^{m-1} w(u) du: integrating W~(x, t) dt/t over
// t > eps equals W~ at scale eps with profile w1. For s > 1 the integral is
// taken as M - int_s^inf with M = int_0^inf u^{m-1} w(u) du.
class CumulativeProfile {
 public:
  explicit CumulativeProfile(KappaWavelet W) : W_(std::move(W)) {
    total_ = head(1) + tail(1);
  }
  cplx operator()(double s) const {
    if (s <= 0) return 0.0;
    const cplx c = s <= 1 ? head(s) : total_ - tail(s);
    return c / std::pow(s, double(W_.spec.m));
  }
  cplx total() const { return total_; }

 private:
  cplx term(double u) const { return std::pow(u, double(W_.spec.m) - 1) * W_.w(u); }
  cplx head(double s) const {
    const Rule& g = gauss_legendre(32);
    cplx sum = 0;
    for (int i = 0; i < 32; ++i) sum += 0.5 * s * g.w[i] * term(0.5 * s * (g.x[i] + 1));
    return sum;
  }
  // u = s / v, v in (0, 1]
  cplx tail(double s) const {
    const Rule& g = gauss_legendre(24);
    cplx sum = 0;
    for (double lo : {0.0, 0.5})
      for (int i = 0; i < 24; ++i) {
        const double v = lo + 0.25 * (g.x[i] + 1);
        sum += 0.25 * g.w[i] * term(s / v) * s / (v * v);
      }
    return sum;
  }
  KappaWavelet W_;
  cplx total_;
};

// (f * k_t)(x) in m = 2, k_t(y) = t^{-2} k(|y| / t), by polar quadrature
// about x: radial panels graded at scale t, n_ang uniform angles, f taken
// to vanish beyond radius R.
template <class F, class K>
cplx radial_convolution_at(const F& f, const K& k, const double* x, double t, double R,
                           int n_ang = 128) {
  auto ring = [&](double u) {
    cplx s = 0;
    for (int j = 0; j < n_ang; ++j) {
      const double p = 2 * pi * (j + 0.5) / n_ang;
      const double y[2] = {x[0] + u * std::cos(p), x[1] + u * std::sin(p)};
      s += f(y);
    }
    return s * (2 * pi / n_ang) * (u / (t * t)) * k(u / t);
  };
  return singular_radial(ring, 1.0, R, t / 8, std::min(0.25, t));
}

// ---------------------------------------------- wavelet transform of rows

namespace detail {

// W_k = int beta_3(u) prof(|k - u| rho) du for lags k in wrap order over 2n.
template <class P>
std::vector<cplx> profile_weights(std::size_t n, double rho, const P& prof) {
  const auto& B = bspline_pieces();
  const Rule& g = gauss_legendre(16);
  std::vector<cplx> ker(2 * n, 0);
  parallel_for(2 * n, [&](std::size_t k) {
    if (k == n) return;
    const double kk = k < n ? double(k) : double(k) - double(2 * n);
    cplx s = 0;
    for (int piece = -2; piece <= 1; ++piece) {
      const double* c = B[piece + 2];
      for (int i = 0; i < 16; ++i) {
        const double u = piece + 0.5 * (g.x[i] + 1);
        const double b = c[0] + u * (c[1] + u * (c[2] + u * c[3]));
        s += 0.5 * g.w[i] * b * prof(std::abs(kk - u) * rho);
      }
    }
    ker[k] = s;
  });
  return ker;
}

// Unfiltered rows with the d~a = da / (1+|a|^2)^{m/2} quadrature weights.
inline RowSet raw_rows(const RaySinogram& s) {
  RowSet R;
  R.m = s.m;
  R.nb = s.nt;
  for (std::size_t i = 0; i < s.rays(); ++i) {
    double c[16];
    const double* a = s.a_node(i);
    for (std::size_t k = 0; k + 1 < s.m; ++k) c[k] = -a[k];
    c[s.m - 1] = 1;
    const double sc = s.scale(i);
    R.add(c, s.w_dta[i], sc * s.t0, sc * s.dt, s.row(i));
  }
  return R;
}

inline RowSet raw_rows(const Sinogram& s) {
  RowSet R;
  const std::size_t m = s.dim();
  R.m = m;
  R.nb = s.nb();
  for (std::size_t r = 0; r < s.rows(); ++r) {
    double a[16], c[16];
    s.a_node(r, a);
    double w = std::pow(1 + norm2(a, m - 1), -double(m) / 2);
    std::size_t rest = r;
    for (std::size_t k = m - 1; k-- > 0;) {
      w *= trap_weight(s.grid, k, rest % s.grid.shape[k]);
      rest /= s.grid.shape[k];
    }
    for (std::size_t k = 0; k + 1 < m; ++k) c[k] = -a[k];
    c[m - 1] = 1;
    R.add(c, w, s.b0(), s.db(), s.row(r));
  }
  return R;
}

inline double row_scale(const RowSet& R, std::size_t r) {
  return std::sqrt(norm2(R.c.data() + r * R.m, R.m));
}

// Smallest t sqrt(1+|a|^2) / db over the rows: the profile scale in cells.
inline double wavelet_resolution(const RowSet& R, double t) {
  double q = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < R.rows(); ++r) q = std::min(q, t * row_scale(R, r) / R.db[r]);
  return q;
}

// Rows of W~ at scale t: row r convolved with prof(|b - b'| / (t s_r)),
// weights times t^{-m}. Rows sharing db / (t s_r) share one kernel.
template <class P>
RowSet wavelet_rows(RowSet R, const P& prof, double t) {
  std::map<long long, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < R.rows(); ++r) {
    const double rho = R.db[r] / (t * row_scale(R, r));
    groups[std::llround(rho * 1e9)].push_back(r);
  }
  const std::size_t nb = R.nb;
  for (const auto& [key, rows] : groups) {
    const double rho = R.db[rows[0]] / (t * row_scale(R, rows[0]));
    std::vector<cplx> ker = profile_weights(nb, rho, prof);
    std::vector<cplx> vals(rows.size() * nb);
    for (std::size_t i = 0; i < rows.size(); ++i)
      std::copy_n(R.coef.begin() + std::ptrdiff_t(rows[i] * nb), nb,
                  vals.begin() + std::ptrdiff_t(i * nb));
    vals = convolve_rows(vals, nb, ker);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double h = R.db[rows[i]];
      for (std::size_t j = 0; j < nb; ++j) R.coef[rows[i] * nb + j] = h * vals[i * nb + j];
    }
  }
  const double tm = std::pow(t, -double(R.m));
  for (auto& w : R.weight) w *= tm;
  R.prepare();
  return R;
}

}  // namespace detail

using Profile = std::function<cplx(double)>;

// (W~ phi)(x, t) = t^{-m} int phi(a, b) prof(dist(x, h) / t) d~a db, each
// row filtered along b and backprojected.
template <class S>
ScalarField wavelet_transform(const S& phi, const UniformGrid& out, const Profile& prof,
                              double t) {
  require(t > 0, "wavelet_transform: t must be positive");
  return backproject_rows(detail::wavelet_rows(detail::raw_rows(phi), prof, t), out);
}

template <class S>
cplx wavelet_transform_at(const S& phi, const double* x, const Profile& prof, double t) {
  require(t > 0, "wavelet_transform_at: t must be positive");
  return backproject_at(detail::wavelet_rows(detail::raw_rows(phi), prof, t), x);
}

// ------------------------------------------- convolution-backprojection

enum class CbpMode { cbp, cbpx };

struct CbpOptions {
  CbpMode mode = CbpMode::cbp;
  int ell = 1;
  double t0 = 1;              // first scale (t for cbp, eps for cbpx)
  int levels = 6;             // t_k = t0 2^{-k}
  double plateau_tol = 0.01;  // relative L2 change between successive levels
  double min_cells = 1;       // t sqrt(1+|a|^2) / db below this is flagged
};

struct CbpLevel {
  double t = 0;
  double cells = 0;        // profile scale in sinogram cells
  double change = -1;      // relative L2 change from the previous level
  double imag_fraction = 0;  // |Im| / |.| in L2 after dividing by the constant
};

struct CbpResult {
  ScalarField f;  // real part at the plateau (or finest computed) level
  cplx gamma;
  std::vector<CbpLevel> levels;
  std::vector<ScalarField> fields;  // W~ phi / gamma (complex) per level
  int plateau = -1;
  bool flagged = false;  // schedule reached scales below the sinogram resolution
  std::vector<std::string> notes;
};

// cbp: W~ phi(x, t) / gamma -> f(x) as t -> 0 (w = s kappa_{(m-1)/2,l}(s^2)).
// cbpx: int_eps^inf W~ phi(x, t) dt/t / gamma_1 -> f(x) as eps -> 0
// (w = s kappa_{(m+1)/2,l}(s^2), complex gamma_1; the real part is kept).
template <class S>
CbpResult cbp_reconstruct(const S& phi, const UniformGrid& out, const CbpOptions& o = {}) {
  require(o.levels >= 1 && o.t0 > 0, "cbp_reconstruct: bad schedule");
  require(out.dim() >= 2, "cbp_reconstruct: m must be at least 2");
  const std::size_t m = out.dim();
  const bool x = o.mode == CbpMode::cbpx;
  KappaWavelet W = kappa_wavelet(x ? cbpx_wavelet(m, o.ell) : cbp_wavelet(m, o.ell));
  Profile prof;
  if (x) {
    auto cum = std::make_shared<CumulativeProfile>(W);
    prof = [cum](double s) { return (*cum)(s); };
  } else {
    prof = [W](double s) { return W.w(s); };
  }
  CbpResult res;
  res.gamma = x ? cbpx_gamma(m, o.ell) : cplx(cbp_gamma(m, o.ell));
  const RowSet raw = detail::raw_rows(phi);
  for (int k = 0; k < o.levels; ++k) {
    CbpLevel L;
    L.t = o.t0 * std::ldexp(1.0, -k);
    L.cells = detail::wavelet_resolution(raw, L.t);
    if (L.cells < o.min_cells * (1 - 1e-9)) {
      res.flagged = true;
      res.notes.push_back("cbp: t = " + std::to_string(L.t) +
                          " is below the sinogram resolution; schedule stopped");
      break;
    }
    ScalarField F = backproject_rows(detail::wavelet_rows(raw, prof, L.t), out);
    for (auto& v : F.values) v /= res.gamma;
    double im = 0, all = 0;
    for (const auto& v : F.values) {
      im += v.imag() * v.imag();
      all += std::norm(v);
    }
    L.imag_fraction = all > 0 ? std::sqrt(im / all) : 0.0;
    if (!res.fields.empty()) {
      L.change = rel_l2(F.values, res.fields.back().values);
      if (res.plateau < 0 && L.change < o.plateau_tol) res.plateau = k;
    }
    res.levels.push_back(L);
    res.fields.push_back(std::move(F));
  }
  require(!res.fields.empty(), "cbp_reconstruct: first scale is below the sinogram resolution");
  const int pick = res.plateau >= 0 ? res.plateau : int(res.fields.size()) - 1;
  res.f = res.fields[std::size_t(pick)];
  for (auto& v : res.f.values) v = v.real();
  if (res.plateau < 0) res.notes.push_back("cbp: no plateau within the schedule");
  if (x)
    res.notes.push_back("cbpx: divided by complex gamma_1 = " +
                        std::to_string(res.gamma.real()) + " + " +
                        std::to_string(res.gamma.imag()) + "i, real part kept");
  return res;
}

// ------------------------------------------------ hypersingular inversion

enum class DifferenceKind { plain, sqrt };

struct HypersingularSpec {
  DifferenceKind variant = DifferenceKind::plain;
  int order = 1;         // l (plain) or k (sqrt)
  double eps = 0.125;    // inner cutoff
  double Y = 16;         // outer cutoff
  double panel = 0.5;    // radial panel width in log r (16-point rules)
  double arc_cells = 4;  // angular step on a circle, in grid cells
};

inline void check_hypersingular(std::size_t m, const HypersingularSpec& s) {
  require(m == 2, "hypersingular: implemented for m = 2");
  require(s.order >= 1, "hypersingular: order must be positive");
  if (s.variant == DifferenceKind::plain) {
    if (m % 2 == 0)
      require(s.order == int(m) - 1, "hypersingular: plain differences need l = m - 1 for even m");
    else
      require(s.order > int(m) - 1, "hypersingular: plain differences need l > m - 1 for odd m");
  } else {
    require(2 * s.order > int(m) - 1, "hypersingular: sqrt differences need k > (m-1)/2");
  }
  require(s.eps > 0 && s.eps < s.Y, "hypersingular: need 0 < eps < Y");
}

namespace detail {

// (1 - e^{i y_1})^l over a circle of radius r, by the trapezoid rule on
// angles placed symmetrically under y -> -y.
inline cplx plain_ring(double r, int l) {
  const int n = 2 * int(std::ceil((r + 40) / 2));
  cplx s = 0;
  for (int j = 0; j < n; ++j) {
    const double p = 2 * pi * (j + 0.5) / n;
    s += std::pow(1.0 - std::exp(cplx(0, r * std::cos(p))), l);
  }
  return s * (2 * pi / n);
}

// d_{2,l}(1) = int (1 - e^{i y_1})^l |y|^{-3} dy: panels geometric in r on
// [1e-12, 1], unit panels on [1, R]. Beyond R the term e^{i j y_1} contributes
// 2 pi int_R^inf J_0(j r) r^{-2} dr, taken from the leading asymptotics of J_0.
inline cplx plain_constant(int l) {
  const Rule& g = gauss_legendre(16);
  const double R = 400;
  cplx s = 0;
  auto panel = [&](double lo, double hi) {
    const double c = (lo + hi) / 2, d = (hi - lo) / 2;
    for (int i = 0; i < 16; ++i) {
      const double r = c + d * g.x[i];
      s += d * g.w[i] * plain_ring(r, l) / (r * r);
    }
  };
  for (double lo = 1e-12; lo < 1; lo *= 2) panel(lo, std::min(2 * lo, 1.0));
  for (double lo = 1; lo < R; lo += 1) panel(lo, lo + 1);
  s += 2 * pi / R;
  for (int j = 1; j <= l; ++j) {
    double c = std::tgamma(l + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(l - j + 1.0));
    if (j % 2) c = -c;
    s -= c * 2 * pi * std::sqrt(2 / (pi * j)) * std::sin(j * R - pi / 4) /
         (j * std::pow(R, 2.5));
  }
  return s;
}

// d~_{2,k}(1) = (pi/2) / Gamma(3/2) int_0^inf (1 - e^{-t})^k t^{-3/2} dt;
// the tail beyond T = 60 is 2/sqrt(T).
inline double sqrt_constant(int k) {
  const double T = 60;
  cplx v = singular_radial(
      [&](double t) {
        return cplx(std::pow(t > 1e-8 ? -std::expm1(-t) / t : 1 - t / 2, k));
      },
      k - 0.5, T, 1e-3, 0.5);
  return 0.5 * pi / std::tgamma(1.5) * (v.real() + 2 / std::sqrt(T));
}

}  // namespace detail

// Normalizing constant of the plain (d_{m,l}(m-1)) or sqrt (d~_{m,k}(m-1))
// stencil, computed once per (variant, order).
inline cplx hypersingular_constant(std::size_t m, DifferenceKind v, int order) {
  require(m == 2, "hypersingular_constant: implemented for m = 2");
  static std::mutex mu;
  static std::map<std::pair<int, int>, cplx> cache;
  const auto key = std::make_pair(int(v), order);
  {
    std::lock_guard<std::mutex> g(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const cplx d = v == DifferenceKind::plain ? detail::plain_constant(order)
                                            : cplx(detail::sqrt_constant(order));
  std::lock_guard<std::mutex> g(mu);
  return cache.emplace(key, d).first->second;
}

// f(x) = (1/d) int_{eps < |y| < Y} (Delta_y g)(x) |y|^{-3} dy
//        + (1/d) g(x) int_{|y| > Y} |y|^{-3} dy,
// Delta_y g(x) = sum_j C(l,j) (-1)^j g(x - c_j y), c_j = j (plain) or sqrt(j).
// Radii: Gauss-Legendre panels in log r; angles: uniform, symmetric under
// y -> -y, with arc step arc_cells * h.
template <class G>
cplx hypersingular_at(const G& g, const double* x, const HypersingularSpec& s, double h) {
  check_hypersingular(2, s);
  const int l = s.order;
  std::vector<double> coef, shift;
  for (int j = 1; j <= l; ++j) {
    double c = std::tgamma(l + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(l - j + 1.0));
    coef.push_back(j % 2 ? -c : c);
    shift.push_back(s.variant == DifferenceKind::plain ? double(j) : std::sqrt(double(j)));
  }
  const cplx g0 = g(x);
  const Rule& rule = gauss_legendre(16);
  const double u0 = std::log(s.eps), u1 = std::log(s.Y);
  const int panels = std::max(1, int(std::ceil((u1 - u0) / s.panel)));
  const double du = (u1 - u0) / panels;
  cplx acc = 0;
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < 16; ++i) {
      const double u = u0 + du * (p + 0.5 * (rule.x[i] + 1));
      const double r = std::exp(u);
      const int n = std::max(32, 2 * int(std::ceil(pi * r / (s.arc_cells * h))));
      cplx ring = 0;
      for (int j = 0; j < n; ++j) {
        const double a = 2 * pi * (j + 0.5) / n;
        const double c = std::cos(a), sn = std::sin(a);
        cplx d = g0;
        for (std::size_t q = 0; q < coef.size(); ++q) {
          const double y[2] = {x[0] - shift[q] * r * c, x[1] - shift[q] * r * sn};
          d += coef[q] * g(y);
        }
        ring += d;
      }
      // |y|^{-3} dy = r^{-2} dr dpsi = r^{-1} du dpsi
      acc += 0.5 * du * rule.w[i] * ring * (2 * pi / n) / r;
    }
  acc += g0 * (2 * pi / s.Y);
  return acc / hypersingular_constant(2, s.variant, s.order);
}

namespace detail {

// Tensor cubic B-spline interpolant of a field, zero outside the grid.
class FieldSampler {
 public:
  explicit FieldSampler(const ScalarField& f) : g_(f.grid), c_(f.values) {
    for (std::size_t k = 0; k < g_.dim(); ++k) prefilter_axis(c_, g_.shape, k);
  }
  cplx operator()(const double* x) const {
    const std::size_t m = g_.dim();
    std::ptrdiff_t base[16];
    double w[16][4];
    for (std::size_t k = 0; k < m; ++k) {
      const double u = (x[k] - g_.origin[k]) / g_.spacing[k];
      const double n = double(g_.shape[k]);
      if (!(u >= 0 && u <= n - 1)) return 0.0;
      std::ptrdiff_t i = std::ptrdiff_t(std::floor(u));
      if (i >= std::ptrdiff_t(n) - 1) i = std::ptrdiff_t(n) - 2;
      bspline_weights(u - double(i), w[k]);
      base[k] = i - 1;
    }
    cplx s = 0;
    std::size_t taps = std::size_t(1) << (2 * m);
    for (std::size_t t = 0; t < taps; ++t) {
      double wt = 1;
      std::size_t idx = 0;
      for (std::size_t k = 0; k < m; ++k) {
        const int j = int((t >> (2 * k)) & 3);
        wt *= w[k][j];
        const std::ptrdiff_t q = mirror_index(base[k] + j, std::ptrdiff_t(g_.shape[k]));
        idx = idx * g_.shape[k] + std::size_t(q);
      }
      s += wt * c_[idx];
    }
    return s;
  }

 private:
  UniformGrid g_;
  std::vector<cplx> c_;
};

}  // namespace detail

// Hypersingular inversion of g = dual_potential(R_T f) on the output grid;
// g is interpolated from its grid and taken as zero outside it.
inline ScalarField hypersingular_invert(const ScalarField& g, const HypersingularSpec& s,
                                        const UniformGrid& out) {
  require(g.grid.dim() == 2 && out.dim() == 2, "hypersingular_invert: implemented for m = 2");
  check_hypersingular(2, s);
  detail::FieldSampler S(g);
  const double h = std::min(g.grid.spacing[0], g.grid.spacing[1]);
  hypersingular_constant(2, s.variant, s.order);
  ScalarField f(out);
  parallel_for(out.size(), [&](std::size_t i) {
    double x[2];
    out.coords(i, x);
    f.values[i] = hypersingular_at(S, x, s, h);
  });
  return f;
}

inline ScalarField hypersingular_invert(const ScalarField& g, const HypersingularSpec& s) {
  return hypersingular_invert(g, s, g.grid);
}

}  // namespace transradon
