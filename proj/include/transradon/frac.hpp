#pragma once
// Riesz potentials (full and in the last variable), Riesz derivatives, the
// Hilbert transform in the last variable and the Semyanistyi fractional
// integrals built from the transversal transform.
//
// Every operator is a Fourier multiplier under F f(y) = int f(x) e^{i x.y} dx:
//   I^alpha      |y|^{-alpha}        I_2^alpha  |y_m|^{-alpha}
//   D_2^alpha    |y_m|^{alpha}       H_2        sgn y_m
//   d/dx_m       -i y_m
// Complex powers use the principal logarithm.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "core.hpp"
#include "fields.hpp"
#include "interp.hpp"
#include "xform.hpp"

namespace transradon {

enum class Regime { potential, multiplier };

struct FracOrder {
  cplx alpha = 0;
  Regime regime = Regime::multiplier;
};

inline cplx gamma_1(cplx alpha) { return riesz_constant(1, alpha); }
inline cplx gamma_m(int m, cplx alpha) { return riesz_constant(m, alpha); }

// Orders admitted by the one-dimensional normalization gamma_1.
inline void check_semyanistyi_order(cplx alpha) {
  require(alpha.real() > 0, "fractional order needs Re(alpha) > 0");
  if (is_real(alpha)) {
    double a = alpha.real();
    if (near_int((a - 1) / 2.0) && a >= 1 - 1e-12)
      throw Error("alpha is an odd integer: Gamma((1 - alpha)/2) has a pole, "
                  "gamma_1(alpha) is undefined");
  }
}

inline void validate(const FracOrder& o, int m) {
  if (o.regime == Regime::potential) check_riesz_order(m, o.alpha);
}

// Handling of the zero frequency where |y|^{-alpha} is singular:
//   zero          the node is set to 0 (inputs in Phi)
//   cell_average  the node takes the multiplier's mean over its cell
//                 (integrable singularities)
//   kernel        no multiplier at all: non-periodic convolution with the
//                 kernel |b|^{alpha-1} / gamma_1(alpha) against the cubic
//                 B-spline interpolant of each row (I_1^alpha only)
enum class Singularity { zero, cell_average, kernel };

namespace detail {

inline cplx abs_power(double r, cplx p) {
  if (p == cplx(0)) return 1.0;
  if (r == 0) return 0.0;
  return std::exp(p * std::log(r));
}

// Applies mult(y_m) along the last axis of (grid, values).
inline std::vector<cplx> last_axis_multiplier(const UniformGrid& g,
                                              const std::vector<cplx>& values,
                                              const std::function<cplx(double)>& mult,
                                              bool odd = false) {
  const std::size_t d = g.dim() - 1;
  SpectralField F = fourier_forward(ScalarField(g, values), {d});
  if (odd) zero_nyquist(F, d);
  std::vector<cplx> tab(F.grid.shape[d]);
  for (std::size_t k = 0; k < tab.size(); ++k) tab[k] = mult(F.grid.node(d, k));
  const std::size_t n = tab.size();
  parallel_for(F.values.size() / n, [&](std::size_t r) {
    for (std::size_t k = 0; k < n; ++k) F.values[r * n + k] *= tab[k];
  });
  SpectralField G = fourier_inverse_partial(F, {d});
  return std::move(G.values);
}

// Share of (2 pi)^{-1} int |F_2 f(x', 0)|^2 in the total spectral energy.
inline double zero_row_fraction(const UniformGrid& g, const std::vector<cplx>& values) {
  const std::size_t d = g.dim() - 1;
  SpectralField F = fourier_forward(ScalarField(g, values), {d});
  const std::size_t n = F.grid.shape[d], k0 = n / 2;
  double tot = 0, zero = 0;
  for (std::size_t i = 0; i < F.values.size(); ++i) {
    double e = std::norm(F.values[i]);
    tot += e;
    if (i % n == k0) zero += e;
  }
  return tot > 0 ? zero / tot : 0.0;
}

inline cplx partial_origin_value(cplx alpha, double dy, Singularity o) {
  if (alpha == cplx(0)) return 1.0;
  if (o == Singularity::zero) return 0.0;
  require(alpha.real() < 1, "cell-average origin needs Re(alpha) < 1");
  return abs_power(dy / 2, -alpha) / (1.0 - alpha);
}

// Cubic B-spline on [-2, 2] as polynomial pieces on [n, n+1], n = -2..1,
// coefficients of 1, u, u^2, u^3.
inline const double (&bspline_pieces())[4][4] {
  static const double P[4][4] = {
      {8.0 / 6, 12.0 / 6, 6.0 / 6, 1.0 / 6},     // (2 + u)^3 / 6
      {4.0 / 6, 0, -1, -0.5},                    // 2/3 - u^2 - u^3/2
      {4.0 / 6, 0, -1, 0.5},                     // 2/3 - u^2 + u^3/2
      {8.0 / 6, -12.0 / 6, 6.0 / 6, -1.0 / 6}};  // (2 - u)^3 / 6
  return P;
}

// W_k = int beta_3(u) |k - u|^{alpha-1} du. Near k the pieces are integrated
// exactly in v = |k - u|; far away Gauss-Legendre is used to avoid
// cancellation.
inline cplx bspline_power_weight(long k, cplx alpha) {
  const auto& P = bspline_pieces();
  cplx s = 0;
  for (int n = -2; n <= 1; ++n) {
    const double* c = P[n + 2];
    if (std::abs(double(k)) <= 8) {
      // u = k + sgn v, v in [v0, v1]
      double sg = k <= n ? 1.0 : -1.0;
      double v0 = std::abs(double(n - k)), v1 = std::abs(double(n + 1 - k));
      if (v0 > v1) std::swap(v0, v1);
      // P(k + sg v) = sum_p d_p v^p
      double d[4] = {0, 0, 0, 0};
      for (int q = 0; q < 4; ++q) {
        double binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
        for (int p = 0; p <= q; ++p)
          d[p] += c[q] * binom[q][p] * std::pow(double(k), q - p) * std::pow(sg, p);
      }
      for (int p = 0; p < 4; ++p)
        s += d[p] * (abs_power(v1, alpha + double(p)) - abs_power(v0, alpha + double(p))) /
             (alpha + double(p));
    } else {
      const Rule& r = gauss_legendre(12);
      for (int i = 0; i < 12; ++i) {
        double u = n + 0.5 * (r.x[i] + 1);
        double b = c[0] + u * (c[1] + u * (c[2] + u * c[3]));
        s += 0.5 * r.w[i] * b * abs_power(std::abs(double(k) - u), alpha - 1.0);
      }
    }
  }
  return s;
}

// Linear (zero-padded) convolution of the cubic B-spline coefficients of
// each length-n row with ker (length 2n, wrap order: ker[k] for lag k,
// ker[2n - k] for lag -k), sampled back on the row nodes.
inline std::vector<cplx> convolve_rows(const std::vector<cplx>& values, std::size_t n,
                                       const std::vector<cplx>& ker) {
  const std::size_t rows = values.size() / n, L = 2 * n;
  require(ker.size() == L, "convolve_rows: kernel length must be 2n");
  std::vector<cplx> K = ker;
  dft_axis(K, {L}, 0, -1);
  std::vector<cplx> buf(rows * L, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(values.begin() + std::ptrdiff_t(r * n),
              values.begin() + std::ptrdiff_t((r + 1) * n), buf.begin() + std::ptrdiff_t(r * L));
    prefilter_line(buf.data() + r * L, n, 1);
  }
  std::vector<std::size_t> shape{rows, L};
  dft_axis(buf, shape, 1, -1);
  parallel_for(rows, [&](std::size_t r) {
    for (std::size_t k = 0; k < L; ++k) buf[r * L + k] *= K[k] / double(L);
  });
  dft_axis(buf, shape, 1, +1);
  std::vector<cplx> out(values.size());
  for (std::size_t r = 0; r < rows; ++r)
    std::copy(buf.begin() + std::ptrdiff_t(r * L), buf.begin() + std::ptrdiff_t(r * L + n),
              out.begin() + std::ptrdiff_t(r * n));
  return out;
}

// I_1^alpha along the last axis: rows convolved with h^alpha W_k / gamma_1.
inline std::vector<cplx> last_axis_kernel(const UniformGrid& g,
                                          const std::vector<cplx>& values,
                                          cplx alpha) {
  const std::size_t d = g.dim() - 1, n = g.shape[d];
  const std::size_t L = 2 * n;
  const double h = g.spacing[d];
  const cplx scale = abs_power(h, alpha) / riesz_constant(1, alpha);
  std::vector<cplx> ker(L, 0);
  for (std::size_t k = 0; k < L; ++k) {
    long kk = k < n ? long(k) : long(k) - long(L);
    if (k == n) continue;
    ker[k] = scale * bspline_power_weight(kk, alpha);
  }
  return convolve_rows(values, n, ker);
}

}  // namespace detail

// I_2^alpha on a field (multiplier |y_m|^{-alpha}). Inputs with a non-zero
// y_m = 0 row are flagged when that row is discarded.
inline ScalarField riesz_partial(const ScalarField& f, cplx alpha,
                                 Singularity origin = Singularity::zero) {
  if (origin == Singularity::kernel && alpha != cplx(0)) {
    check_semyanistyi_order(alpha);
    ScalarField out(f.grid, detail::last_axis_kernel(f.grid, f.values, alpha));
    out.notes = f.notes;
    return out;
  }
  const std::size_t d = f.grid.dim() - 1;
  const double dy = dual_spacing(f.grid, d);
  const cplx at0 = detail::partial_origin_value(alpha, dy, origin);
  ScalarField out(f.grid, detail::last_axis_multiplier(
                              f.grid, f.values, [&](double y) {
                                return y == 0 ? at0 : detail::abs_power(std::abs(y), -alpha);
                              }));
  out.notes = f.notes;
  if (alpha.real() > 0 && origin == Singularity::zero) {
    double z = detail::zero_row_fraction(f.grid, f.values);
    if (z > 1e-12)
      out.notes.push_back("riesz_partial: input not in Phi, discarded y_m = 0 "
                          "energy fraction " + std::to_string(z));
  }
  return out;
}

inline Sinogram riesz_partial(const Sinogram& phi, cplx alpha,
                              Singularity origin = Singularity::zero) {
  ScalarField r = riesz_partial(phi.as_field(), alpha, origin);
  Sinogram s(phi.grid, std::move(r.values));
  s.warnings = phi.warnings;
  s.warnings.insert(s.warnings.end(), r.notes.begin(), r.notes.end());
  return s;
}

// D_2^alpha (multiplier |y_m|^{alpha}).
inline ScalarField riesz_partial_derivative(const ScalarField& f, cplx alpha) {
  ScalarField out(f.grid, detail::last_axis_multiplier(f.grid, f.values, [&](double y) {
                    return detail::abs_power(std::abs(y), alpha);
                  }));
  out.notes = f.notes;
  return out;
}

inline Sinogram riesz_partial_derivative(const Sinogram& phi, cplx alpha) {
  Sinogram s(phi.grid, riesz_partial_derivative(phi.as_field(), alpha).values);
  s.warnings = phi.warnings;
  return s;
}

// H_2 (multiplier sgn y_m, 0 at y_m = 0 and on the unpaired Nyquist node).
inline ScalarField hilbert_last(const ScalarField& f) {
  ScalarField out(f.grid, detail::last_axis_multiplier(
                              f.grid, f.values,
                              [](double y) { return cplx(y > 0 ? 1.0 : y < 0 ? -1.0 : 0.0); },
                              true));
  out.notes = f.notes;
  return out;
}

inline Sinogram hilbert_last(const Sinogram& phi) {
  Sinogram s(phi.grid, hilbert_last(phi.as_field()).values);
  s.warnings = phi.warnings;
  return s;
}

// d^k / dx_m^k (multiplier (-i y_m)^k); odd orders drop the Nyquist node.
inline ScalarField derivative_last(const ScalarField& f, int k) {
  require(k >= 0, "derivative_last: order must be nonnegative");
  if (k == 0) return f;
  ScalarField out(f.grid, detail::last_axis_multiplier(
                              f.grid, f.values,
                              [&](double y) { return std::pow(cplx(0, -y), k); },
                              k % 2 == 1));
  out.notes = f.notes;
  return out;
}

inline Sinogram derivative_last(const Sinogram& phi, int k) {
  Sinogram s(phi.grid, derivative_last(phi.as_field(), k).values);
  s.warnings = phi.warnings;
  return s;
}

// I^alpha (multiplier |y|^{-alpha}). With Singularity::cell_average the y = 0
// node takes the mean of |y|^{-alpha} over the ball of the cell's volume.
inline ScalarField riesz_potential(const ScalarField& f, const FracOrder& o,
                                   Singularity origin = Singularity::zero) {
  const int m = int(f.grid.dim());
  validate(o, m);
  const cplx alpha = o.alpha;
  SpectralField F = fourier_forward(f);
  cplx at0 = 0;
  if (alpha == cplx(0)) {
    at0 = 1;
  } else if (origin == Singularity::cell_average) {
    require(alpha.real() < m, "cell-average origin needs Re(alpha) < m");
    double ball = std::pow(pi, m / 2.0) / std::tgamma(m / 2.0 + 1);
    double rho = std::pow(F.grid.cell() / ball, 1.0 / m);
    at0 = double(m) / (double(m) - alpha) * detail::abs_power(rho, -alpha);
  }
  apply_multiplier(F, [&](const double* y) {
    double r2 = 0;
    for (int k = 0; k < m; ++k) r2 += y[k] * y[k];
    return r2 == 0 ? at0 : detail::abs_power(std::sqrt(r2), -alpha);
  });
  ScalarField out = fourier_inverse(F);
  out.notes = f.notes;
  return out;
}

// ------------------------------------------------------------ point modes

// int_0^R g(r) r^{alpha-1} dr for Re alpha > 0: the first panel [0, s0] is
// mapped by r = s0 t^{1/alpha}, then geometric panels up to h and panels of
// width h up to R.
template <class G>
cplx singular_radial(const G& g, cplx alpha, double R, double s0 = 1e-6,
                     double h = 0.25, int order = 16) {
  require(alpha.real() > 0, "singular_radial: Re(alpha) must be positive");
  const Rule& r = gauss_legendre(order);
  cplx s = 0;
  s0 = std::min(s0, R);
  // first panel: r^{alpha-1} dr = (s0^alpha / alpha) dt
  {
    cplx sum = 0;
    const double ar = 1.0 / alpha.real();
    for (int i = 0; i < order; ++i) {
      double t = 0.5 * (r.x[i] + 1);
      double rr = s0 * std::pow(t, ar);
      // correction for complex alpha: r^{alpha-1} dr with r = s0 t^{1/Re alpha}
      cplx jac = detail::abs_power(rr, alpha - alpha.real()) ;
      sum += 0.5 * r.w[i] * g(rr) * jac;
    }
    s += sum * std::pow(s0, alpha.real()) / alpha.real();
  }
  auto panel = [&](double lo, double hi) {
    cplx sum = 0;
    double c = 0.5 * (lo + hi), w = 0.5 * (hi - lo);
    for (int i = 0; i < order; ++i) {
      double x = c + w * r.x[i];
      sum += w * r.w[i] * g(x) * detail::abs_power(x, alpha - 1.0);
    }
    return sum;
  };
  double lo = s0;
  while (lo < std::min(h, R)) {
    double hi = std::min({2 * lo, h, R});
    s += panel(lo, hi);
    lo = hi;
  }
  while (lo < R) {
    double hi = std::min(lo + h, R);
    s += panel(lo, hi);
    lo = hi;
  }
  return s;
}

// Direct quadrature of (I^alpha f)(x) = gamma_m(alpha)^{-1} int f(y)
// |x - y|^{alpha - m} dy in polar coordinates about x; f is integrated up to
// radius R. m = 2 uses n_ang uniform angles, m = 3 n_ang Gauss-Legendre
// nodes in cos times 2 n_ang azimuths.
inline cplx riesz_potential_at(const std::function<cplx(const double*)>& f, int m,
                               const double* x, cplx alpha, double R,
                               int n_ang = 64) {
  require(m == 2 || m == 3, "riesz_potential_at: dimension 2 or 3");
  check_riesz_order(m, alpha);
  std::vector<std::vector<double>> dirs;
  std::vector<double> w;
  if (m == 2) {
    for (int j = 0; j < n_ang; ++j) {
      double t = 2 * pi * (j + 0.5) / n_ang;
      dirs.push_back({std::cos(t), std::sin(t)});
      w.push_back(2 * pi / n_ang);
    }
  } else {
    const Rule& r = gauss_legendre(n_ang);
    for (int i = 0; i < n_ang; ++i)
      for (int j = 0; j < 2 * n_ang; ++j) {
        double c = r.x[i], s = std::sqrt(1 - c * c), p = pi * (j + 0.5) / n_ang;
        dirs.push_back({s * std::cos(p), s * std::sin(p), c});
        w.push_back(r.w[i] * pi / n_ang);
      }
  }
  std::vector<cplx> part(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t k) {
    part[k] = w[k] * singular_radial(
                         [&](double r) {
                           double y[3];
                           for (int i = 0; i < m; ++i) y[i] = x[i] + r * dirs[k][std::size_t(i)];
                           return f(y);
                         },
                         alpha, R);
  });
  return pairwise_sum(part) / riesz_constant(m, alpha);
}

// Same on a sampled field (cubic B-spline interpolation, 0 off the grid).
inline cplx riesz_potential_at(const ScalarField& f, const double* x, cplx alpha,
                               int n_ang = 64) {
  const UniformGrid& g = f.grid;
  const int m = int(g.dim());
  std::vector<cplx> coef = f.values;
  for (int k = 0; k < m; ++k) prefilter_axis(coef, g.shape, std::size_t(k));
  auto strides = g.strides();
  double R = 0;
  for (int k = 0; k < m; ++k)
    R += std::pow(std::max(std::abs(g.origin[k] - x[k]), std::abs(g.last(k) - x[k])), 2);
  R = std::sqrt(R);
  auto fn = [&](const double* y) {
    double u[16];
    for (int k = 0; k < m; ++k) u[k] = (y[k] - g.origin[k]) / g.spacing[k];
    return detail::interp_nd(coef, g.shape, strides, u, Interp::bspline);
  };
  return riesz_potential_at(fn, m, x, alpha, R, n_ang);
}

// ------------------------------------------------------------ Semyanistyi

// psi_alpha(a) = (1 + |a|^2)^{(1 - alpha)/2} applied to every sinogram row.
inline void apply_psi(Sinogram& s, cplx alpha) {
  const std::size_t nb = s.nb();
  parallel_for(s.rows(), [&](std::size_t r) {
    double a[16];
    s.a_node(r, a);
    cplx w = std::pow(1 + norm2(a, s.dim() - 1), (1.0 - alpha) / 2.0);
    cplx* row = s.row(r);
    for (std::size_t j = 0; j < nb; ++j) row[j] *= w;
  });
}

// Data from arbitrary fields are not in Phi: I_1^alpha along b runs as a
// real-space kernel.
inline Singularity semyanistyi_origin(cplx) { return Singularity::kernel; }

// R_T^alpha f = psi_alpha I_1^alpha R_T f.
inline Sinogram semyanistyi_forward(const ScalarField& f, const UniformGrid& out,
                                    cplx alpha, RadonOptions opt = {}) {
  check_semyanistyi_order(alpha);
  Sinogram s = riesz_partial(radon_transversal(f, out, opt), alpha,
                             semyanistyi_origin(alpha));
  apply_psi(s, alpha);
  return s;
}

// *R_T^alpha phi = *R_T psi_alpha I_1^alpha phi.
inline ScalarField semyanistyi_dual(const Sinogram& phi, cplx alpha,
                                    const UniformGrid& out) {
  check_semyanistyi_order(alpha);
  Sinogram s = riesz_partial(phi, alpha, semyanistyi_origin(alpha));
  apply_psi(s, alpha);
  ScalarField r = dual_transversal(s, out);
  r.notes.insert(r.notes.begin(), s.warnings.begin(), s.warnings.end());
  return r;
}

// Direct quadrature of
//   (*R_T^alpha phi)(x) = gamma_1(alpha)^{-1} int phi(a, b)
//                         (|a.x' + b - x_m| / sqrt(1+|a|^2))^{alpha-1} d~a db
// with phi given pointwise. The a-integral uses the compactified nodes of a
// ray geometry; the b-integral is split at the singular point and each half
// is integrated over [0, half_width sqrt(1+|a|^2)].
inline cplx semyanistyi_dual_at(const std::function<cplx(const double*, double)>& phi,
                                const RaySinogram& geo, const double* x, cplx alpha,
                                double half_width) {
  check_semyanistyi_order(alpha);
  const std::size_t m = std::size_t(geo.m);
  std::vector<cplx> part(geo.rays());
  parallel_for(geo.rays(), [&](std::size_t i) {
    const double* a = &geo.a[i * (m - 1)];
    double ax = 0;
    for (std::size_t k = 0; k + 1 < m; ++k) ax += a[k] * x[k];
    const double b0 = x[m - 1] - ax;
    const double q = 1 + norm2(a, m - 1);
    const double W = half_width * std::sqrt(q);
    cplx s = singular_radial([&](double v) { return phi(a, b0 + v) + phi(a, b0 - v); },
                             alpha, W, 1e-6, 0.25 * std::sqrt(q));
    part[i] = geo.w_dta[i] * std::pow(q, (1.0 - alpha) / 2.0) * s;
  });
  return pairwise_sum(part) / gamma_1(alpha);
}

}  // namespace transradon
