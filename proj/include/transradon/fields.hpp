#pragma once
// Uniform grids, sampled fields and Fourier transforms with the convention
// (Ff)(y) = \int f(x) e^{+i x.y} dx, inverse carrying (2 pi)^{-k}.
//
// Dual axis for N samples of step dx: y_k = (k - N/2) dy, dy = 2 pi/(N dx).

#include <fftw3.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"
#include "interp.hpp"

namespace transradon {

struct UniformGrid {
  std::vector<std::size_t> shape;
  std::vector<double> origin;
  std::vector<double> spacing;

  UniformGrid() = default;
  UniformGrid(std::vector<std::size_t> s, std::vector<double> o,
              std::vector<double> h)
      : shape(std::move(s)), origin(std::move(o)), spacing(std::move(h)) {
    validate();
  }

  // N nodes per axis at -L + j (2L/N): symmetric, contains the origin for
  // even N, natural for FFTs.
  static UniformGrid centered(std::size_t m, std::size_t n, double L) {
    return UniformGrid(std::vector<std::size_t>(m, n),
                       std::vector<double>(m, -L),
                       std::vector<double>(m, 2 * L / double(n)));
  }

  // N nodes per axis spanning [lo, hi] inclusive.
  static UniformGrid closed(std::size_t m, std::size_t n, double lo,
                            double hi) {
    return UniformGrid(std::vector<std::size_t>(m, n),
                       std::vector<double>(m, lo),
                       std::vector<double>(m, (hi - lo) / double(n - 1)));
  }

  void validate() const {
    require(!shape.empty(), "grid: dimension must be positive");
    require(origin.size() == shape.size() && spacing.size() == shape.size(),
            "grid: shape/origin/spacing lengths differ");
    for (std::size_t k = 0; k < shape.size(); ++k) {
      require(shape[k] >= 2, "grid: every axis needs at least 2 samples");
      require(spacing[k] > 0 && std::isfinite(spacing[k]),
              "grid: spacings must be strictly positive");
      require(std::isfinite(origin[k]), "grid: origin must be finite");
    }
  }

  std::size_t dim() const { return shape.size(); }
  std::size_t size() const {
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    return n;
  }
  double node(std::size_t axis, std::size_t i) const {
    return origin[axis] + double(i) * spacing[axis];
  }
  double extent(std::size_t axis) const {
    return spacing[axis] * double(shape[axis] - 1);
  }
  double last(std::size_t axis) const { return node(axis, shape[axis] - 1); }
  double cell() const {
    double v = 1;
    for (double h : spacing) v *= h;
    return v;
  }
  std::vector<std::size_t> strides() const {
    std::vector<std::size_t> s(dim(), 1);
    for (std::size_t k = dim() - 1; k-- > 0;) s[k] = s[k + 1] * shape[k + 1];
    return s;
  }
  void unravel(std::size_t flat, std::size_t* idx) const {
    for (std::size_t k = dim(); k-- > 0;) {
      idx[k] = flat % shape[k];
      flat /= shape[k];
    }
  }
  void coords(std::size_t flat, double* x) const {
    for (std::size_t k = dim(); k-- > 0;) {
      x[k] = node(k, flat % shape[k]);
      flat /= shape[k];
    }
  }
  // Sub-grid of the given axes (in order).
  UniformGrid sub(std::size_t lo, std::size_t hi) const {
    return UniformGrid({shape.begin() + lo, shape.begin() + hi},
                       {origin.begin() + lo, origin.begin() + hi},
                       {spacing.begin() + lo, spacing.begin() + hi});
  }
  bool operator==(const UniformGrid&) const = default;
};

inline double dual_spacing(const UniformGrid& g, std::size_t axis) {
  return 2 * pi / (double(g.shape[axis]) * g.spacing[axis]);
}

inline double dual_origin(const UniformGrid& g, std::size_t axis) {
  return -double(g.shape[axis] / 2) * dual_spacing(g, axis);
}

struct ScalarField {
  UniformGrid grid;
  std::vector<cplx> values;
  std::vector<std::string> notes;  // warnings raised while computing it

  ScalarField() = default;
  explicit ScalarField(UniformGrid g)
      : grid(std::move(g)), values(grid.size(), cplx(0)) {}
  ScalarField(UniformGrid g, std::vector<cplx> v)
      : grid(std::move(g)), values(std::move(v)) {
    require(values.size() == grid.size(),
            "field: value count does not match grid shape");
  }

  double max_abs() const {
    double m = 0;
    for (auto& v : values) m = std::max(m, std::abs(v));
    return m;
  }
  double max_imag() const {
    double m = 0;
    for (auto& v : values) m = std::max(m, std::abs(v.imag()));
    return m;
  }
  bool is_real(double tol = 1e-12) const {
    return max_imag() <= tol * std::max(max_abs(), 1e-300);
  }
};

// Samples over a grid whose axes are partly (or fully) Fourier transformed.
// grid holds the dual axes for transformed entries and the untouched source
// axes elsewhere; source remembers the real-space grid.
struct SpectralField {
  UniformGrid grid;
  UniformGrid source;
  std::vector<bool> transformed;
  std::vector<cplx> values;

  std::size_t dim() const { return grid.dim(); }
};

// ----------------------------------------------------------------- FFT

namespace detail {

inline std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// Unnormalized in-place DFT along one axis, sign +1 or -1 in the exponent.
inline void dft_axis(std::vector<cplx>& v, const std::vector<std::size_t>& shape,
                     std::size_t axis, int sign) {
  std::size_t inner = 1, outer = 1;
  for (std::size_t k = axis + 1; k < shape.size(); ++k) inner *= shape[k];
  for (std::size_t k = 0; k < axis; ++k) outer *= shape[k];
  const int n = int(shape[axis]);
  fftw_iodim dim{n, int(inner), int(inner)};
  fftw_iodim loops[2] = {{int(outer), int(n * inner), int(n * inner)},
                         {int(inner), 1, 1}};
  auto* p = reinterpret_cast<fftw_complex*>(v.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> g(fftw_mutex());
    plan = fftw_plan_guru_dft(1, &dim, 2, loops, p, p,
                              sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD,
                              FFTW_ESTIMATE);
  }
  require(plan != nullptr, "fftw: plan creation failed");
  fftw_execute(plan);
  std::lock_guard<std::mutex> g(fftw_mutex());
  fftw_destroy_plan(plan);
}

template <class Fn>
void for_axis(const std::vector<std::size_t>& shape, std::size_t axis,
              Fn&& fn) {
  std::size_t inner = 1;
  for (std::size_t k = axis + 1; k < shape.size(); ++k) inner *= shape[k];
  std::size_t total = 1;
  for (auto s : shape) total *= s;
  const std::size_t n = shape[axis];
  for (std::size_t f = 0; f < total; ++f) fn(f, (f / inner) % n);
}

// Forward transform of one axis: x-grid (n, dx, o) -> dual grid.
inline void forward_axis(std::vector<cplx>& v,
                         const std::vector<std::size_t>& shape,
                         std::size_t axis, double dx, double o) {
  const std::size_t n = shape[axis];
  const std::size_t c = n / 2;
  const double dy = 2 * pi / (double(n) * dx);
  std::vector<cplx> pre(n), post(n);
  for (std::size_t j = 0; j < n; ++j) {
    pre[j] = std::polar(1.0, -2 * pi * double((j * c) % n) / double(n));
    double y = (double(j) - double(c)) * dy;
    post[j] = dx * std::polar(1.0, o * y);
  }
  for_axis(shape, axis, [&](std::size_t f, std::size_t j) { v[f] *= pre[j]; });
  dft_axis(v, shape, axis, +1);
  for_axis(shape, axis, [&](std::size_t f, std::size_t k) { v[f] *= post[k]; });
}

inline void inverse_axis(std::vector<cplx>& v,
                         const std::vector<std::size_t>& shape,
                         std::size_t axis, double dx, double o) {
  const std::size_t n = shape[axis];
  const std::size_t c = n / 2;
  const double dy = 2 * pi / (double(n) * dx);
  std::vector<cplx> pre(n), post(n);
  for (std::size_t k = 0; k < n; ++k) {
    double y = (double(k) - double(c)) * dy;
    pre[k] = std::polar(dy / (2 * pi), -o * y);
    post[k] = std::polar(1.0, 2 * pi * double((k * c) % n) / double(n));
  }
  for_axis(shape, axis, [&](std::size_t f, std::size_t k) { v[f] *= pre[k]; });
  dft_axis(v, shape, axis, -1);
  for_axis(shape, axis, [&](std::size_t f, std::size_t j) { v[f] *= post[j]; });
}

inline void check_finite(const std::vector<cplx>& v, const char* what) {
  for (auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(std::string(what) + ": non-finite sample");
}

}  // namespace detail

inline std::vector<std::size_t> all_axes(std::size_t m) {
  std::vector<std::size_t> a(m);
  for (std::size_t k = 0; k < m; ++k) a[k] = k;
  return a;
}

// Transforms the selected axes of f. Axes may be given in any order.
inline SpectralField fourier_forward(const ScalarField& f,
                                     std::vector<std::size_t> axes) {
  const std::size_t m = f.grid.dim();
  require(!axes.empty(), "fourier_forward: empty axis subset");
  SpectralField F;
  F.source = f.grid;
  F.grid = f.grid;
  F.transformed.assign(m, false);
  F.values = f.values;
  detail::check_finite(F.values, "fourier_forward");
  for (auto a : axes) {
    require(a < m, "fourier_forward: axis index out of range");
    require(!F.transformed[a], "fourier_forward: axis listed twice");
    detail::forward_axis(F.values, f.grid.shape, a, f.grid.spacing[a],
                         f.grid.origin[a]);
    F.transformed[a] = true;
    F.grid.origin[a] = dual_origin(f.grid, a);
    F.grid.spacing[a] = dual_spacing(f.grid, a);
  }
  return F;
}

// Transforms further axes of an already partially transformed field.
inline SpectralField fourier_forward(const SpectralField& G,
                                     std::vector<std::size_t> axes) {
  SpectralField F = G;
  for (auto a : axes) {
    require(a < F.dim(), "fourier_forward: axis index out of range");
    require(!F.transformed[a], "fourier_forward: axis already transformed");
    detail::forward_axis(F.values, F.grid.shape, a, F.source.spacing[a],
                         F.source.origin[a]);
    F.transformed[a] = true;
    F.grid.origin[a] = dual_origin(F.source, a);
    F.grid.spacing[a] = dual_spacing(F.source, a);
  }
  return F;
}

inline SpectralField fourier_forward(const ScalarField& f) {
  return fourier_forward(f, all_axes(f.grid.dim()));
}

// Inverts the given transformed axes; the result keeps any others.
inline SpectralField fourier_inverse_partial(const SpectralField& F,
                                             std::vector<std::size_t> axes) {
  SpectralField G = F;
  detail::check_finite(G.values, "fourier_inverse");
  for (auto a : axes) {
    require(a < F.dim(), "fourier_inverse: axis index out of range");
    require(G.transformed[a], "fourier_inverse: axis is not transformed");
    detail::inverse_axis(G.values, F.grid.shape, a, F.source.spacing[a],
                         F.source.origin[a]);
    G.transformed[a] = false;
    G.grid.origin[a] = F.source.origin[a];
    G.grid.spacing[a] = F.source.spacing[a];
  }
  return G;
}

inline ScalarField fourier_inverse(const SpectralField& F) {
  std::vector<std::size_t> axes;
  for (std::size_t a = 0; a < F.dim(); ++a)
    if (F.transformed[a]) axes.push_back(a);
  require(!axes.empty(), "fourier_inverse: nothing to invert");
  SpectralField G = fourier_inverse_partial(F, axes);
  return ScalarField(G.source, std::move(G.values));
}

// Multiplies every spectral sample by m(y), y the coordinates of the
// sample (dual coordinates on transformed axes).
inline void apply_multiplier(SpectralField& F,
                             const std::function<cplx(const double*)>& mult) {
  const std::size_t d = F.dim();
  parallel_for(F.values.size(), [&](std::size_t i) {
    double y[16];
    F.grid.coords(i, y);
    F.values[i] *= mult(y);
  });
  (void)d;
}

// Zeroes the unpaired lowest dual node of even-length transformed axes so
// Hermitian symmetry (and real inverses) survive odd multipliers.
inline void zero_nyquist(SpectralField& F, std::size_t axis) {
  if (!F.transformed[axis] || F.grid.shape[axis] % 2) return;
  detail::for_axis(F.grid.shape, axis, [&](std::size_t f, std::size_t k) {
    if (k == 0) F.values[f] = 0;
  });
}

// ----------------------------------------------------------- quadrature

// Trapezoid rule; weight(x) is an optional pointwise factor.
inline cplx integrate(const ScalarField& f,
                      const std::function<cplx(const double*)>& weight = {}) {
  const UniformGrid& g = f.grid;
  const std::size_t m = g.dim();
  const double cell = g.cell();
  auto term = [&](std::size_t i) {
    std::size_t idx[16];
    g.unravel(i, idx);
    double w = cell;
    for (std::size_t k = 0; k < m; ++k)
      if (idx[k] == 0 || idx[k] + 1 == g.shape[k]) w *= 0.5;
    cplx v = f.values[i] * w;
    if (weight) {
      double x[16];
      g.coords(i, x);
      cplx wt = weight(x);
      if (!std::isfinite(wt.real()) || !std::isfinite(wt.imag()))
        throw Error("integrate: non-finite weight value");
      v *= wt;
    }
    return v;
  };
  return pairwise_sum<cplx>(0, g.size(), term);
}

// Discrete L2 norm with the grid cell volume.
inline double l2_norm(const std::vector<cplx>& v, double cell) {
  double s = pairwise_sum<double>(0, v.size(),
                                  [&](std::size_t i) { return std::norm(v[i]); });
  return std::sqrt(s * cell);
}

inline double rel_l2(const std::vector<cplx>& a, const std::vector<cplx>& ref) {
  require(a.size() == ref.size(), "rel_l2: size mismatch");
  double num = pairwise_sum<double>(
      0, a.size(), [&](std::size_t i) { return std::norm(a[i] - ref[i]); });
  double den = pairwise_sum<double>(
      0, a.size(), [&](std::size_t i) { return std::norm(ref[i]); });
  return std::sqrt(num / std::max(den, 1e-300));
}

inline double rel_max(const std::vector<cplx>& a, const std::vector<cplx>& ref) {
  require(a.size() == ref.size(), "rel_max: size mismatch");
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - ref[i]));
    den = std::max(den, std::abs(ref[i]));
  }
  return num / std::max(den, 1e-300);
}

// ------------------------------------------------------------- phantoms

inline ScalarField gaussian_phantom(const UniformGrid& g,
                                    std::vector<double> center, double width) {
  require(width > 0, "gaussian_phantom: width must be positive");
  g.validate();
  if (center.empty()) center.assign(g.dim(), 0.0);
  require(center.size() == g.dim(), "gaussian_phantom: center dimension");
  ScalarField f(g);
  parallel_for(g.size(), [&](std::size_t i) {
    double x[16], r2 = 0;
    g.coords(i, x);
    for (std::size_t k = 0; k < g.dim(); ++k)
      r2 += (x[k] - center[k]) * (x[k] - center[k]);
    f.values[i] = std::exp(-r2 / (width * width));
  });
  return f;
}

// Spectral window of the Phi-space phantom:
//   W(y) = G(|y_m|) B(|y|),
//   G(t) = (1 - exp(-(t - delta)/tau))^K for t > delta, exactly 0 otherwise,
//   B(r) = exp(-((r - rc)/s)^2), rc, s from the band [rho_lo, rho_hi] with
//   the band edges at rc -/+ 2s.
// A large tau makes G flat near the slab edge, so its kink is buried under
// a factor ((t - delta)/tau)^K and the spatial tails stay tiny.
struct PhiWindow {
  double rho_lo = 1, rho_hi = 9;
  double delta = 0.5;
  double tau = 8;
  double power = 32;
  int copies = 3;         // seeded superposition of shifted copies
  double max_shift = 0.75;

  // Same window for the phantom dilated by 1/s in space.
  PhiWindow dilated(double s) const {
    PhiWindow w = *this;
    w.rho_lo *= s;
    w.rho_hi *= s;
    w.delta *= s;
    w.tau *= s;
    w.max_shift /= s;
    return w;
  }

  double center() const { return 0.5 * (rho_lo + rho_hi); }
  double width() const { return 0.25 * (rho_hi - rho_lo); }

  double operator()(const double* y, std::size_t m) const {
    double ym = std::abs(y[m - 1]);
    if (ym <= delta) return 0.0;
    double r2 = 0;
    for (std::size_t k = 0; k < m; ++k) r2 += y[k] * y[k];
    double g = std::pow(-std::expm1(-(ym - delta) / tau), power);
    double u = (std::sqrt(r2) - center()) / width();
    return g * std::exp(-u * u);
  }
};

// Deterministic uniform in [0,1) from a 64-bit engine (portable, unlike
// std::uniform_real_distribution).
inline double unit_uniform(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

// f = F^{-1}[W(y) * sum_j c_j e^{i y.p_j}] normalized to max |f| = 1; the
// spectrum vanishes identically on |y_m| <= delta.
inline ScalarField phi_space_phantom(const UniformGrid& g, const PhiWindow& w,
                                     std::uint64_t seed) {
  g.validate();
  const std::size_t m = g.dim();
  require(w.delta > 0, "phi_space_phantom: gap must be positive");
  require(w.rho_hi > w.rho_lo && w.rho_lo >= 0, "phi_space_phantom: bad band");
  double ymax = -dual_origin(g, m - 1) - dual_spacing(g, m - 1);
  require(w.delta < ymax, "phi_space_phantom: gap exceeds dual-grid extent");
  double nyq = 1e300;
  for (std::size_t k = 0; k < m; ++k)
    nyq = std::min(nyq, -dual_origin(g, k) - dual_spacing(g, k));
  require(w.rho_hi < nyq, "phi_space_phantom: band exceeds Nyquist radius");

  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> shifts(w.copies, std::vector<double>(m));
  std::vector<double> coef(w.copies);
  for (int j = 0; j < w.copies; ++j) {
    coef[j] = 0.5 + unit_uniform(rng);
    for (std::size_t k = 0; k < m; ++k)
      shifts[j][k] = w.max_shift * (2 * unit_uniform(rng) - 1);
  }

  SpectralField F;
  F.source = g;
  F.grid = g;
  F.transformed.assign(m, true);
  for (std::size_t k = 0; k < m; ++k) {
    F.grid.origin[k] = dual_origin(g, k);
    F.grid.spacing[k] = dual_spacing(g, k);
  }
  F.values.assign(g.size(), 0);
  double wmax = 0, wedge = 0;
  std::vector<double> wabs(g.size());
  parallel_for(g.size(), [&](std::size_t i) {
    double y[16];
    std::size_t idx[16];
    F.grid.coords(i, y);
    F.grid.unravel(i, idx);
    bool unpaired = false;
    for (std::size_t k = 0; k < m; ++k)
      if (g.shape[k] % 2 == 0 && idx[k] == 0) unpaired = true;
    double wv = unpaired ? 0.0 : w(y, m);
    wabs[i] = wv;
    if (wv == 0) return;
    cplx s = 0;
    for (int j = 0; j < w.copies; ++j) {
      double ph = 0;
      for (std::size_t k = 0; k < m; ++k) ph += y[k] * shifts[j][k];
      s += coef[j] * std::polar(1.0, ph);
    }
    F.values[i] = wv * s;
  });
  for (std::size_t i = 0; i < g.size(); ++i) {
    wmax = std::max(wmax, wabs[i]);
    std::size_t idx[16];
    F.grid.unravel(i, idx);
    for (std::size_t k = 0; k < m; ++k)
      if (idx[k] <= 1 || idx[k] + 1 == g.shape[k]) wedge = std::max(wedge, wabs[i]);
  }
  require(wmax > 0, "phi_space_phantom: window is empty on this grid");
  require(wedge <= 1e-10 * wmax,
          "phi_space_phantom: window support exceeds dual grid");
  ScalarField f = fourier_inverse(F);
  double mx = f.max_abs();
  for (auto& v : f.values) v /= mx;
  return f;
}

// -------------------------------------------------- spectral resampling

struct Resampled {
  std::vector<cplx> values;
  std::vector<bool> extrapolated;
  std::size_t n_extrapolated = 0;
};

namespace detail {

// Separable cubic (or linear) interpolation of row-major data at
// index-space position u (one coordinate per axis).
template <class T>
T interp_nd(const std::vector<T>& data, const std::vector<std::size_t>& shape,
            const std::vector<std::size_t>& strides, const double* u, Interp k) {
  const std::size_t m = shape.size();
  std::ptrdiff_t base[16];
  double w[16][4];
  for (std::size_t a = 0; a < m; ++a) {
    if (!(u[a] >= 0 && u[a] <= double(shape[a] - 1))) return T{};
    std::ptrdiff_t i = std::ptrdiff_t(std::floor(u[a]));
    if (i >= std::ptrdiff_t(shape[a]) - 1) i = std::ptrdiff_t(shape[a]) - 2;
    base[a] = i - 1;
    cubic_weights(k, u[a] - double(i), w[a]);
  }
  std::size_t taps = std::size_t(1) << (2 * m);
  T r{};
  for (std::size_t t = 0; t < taps; ++t) {
    double wt = 1;
    std::size_t off = 0;
    bool skip = false;
    for (std::size_t a = 0; a < m; ++a) {
      int j = int((t >> (2 * a)) & 3);
      wt *= w[a][j];
      std::ptrdiff_t q = base[a] + j;
      std::ptrdiff_t n = std::ptrdiff_t(shape[a]);
      if (k == Interp::bspline)
        q = mirror_index(q, n);
      else if (q < 0 || q >= n) {
        skip = true;
        break;
      }
      off += std::size_t(q) * strides[a];
    }
    if (skip || wt == 0) continue;
    r += wt * data[off];
  }
  return r;
}

}  // namespace detail

// Off-grid samples of a spectrum. Points outside the dual-grid extent give
// 0 with the extrapolated flag. Interp::trigonometric evaluates the exact
// band-limited interpolant (the DTFT of the underlying samples); it needs
// every axis transformed.
inline Resampled sample_spectrum(const SpectralField& F,
                                 const std::vector<std::vector<double>>& points,
                                 Interp kind = Interp::catmull_rom) {
  const std::size_t m = F.dim();
  Resampled out;
  out.values.assign(points.size(), 0);
  out.extrapolated.assign(points.size(), false);
  for (std::size_t p = 0; p < points.size(); ++p) {
    require(points[p].size() == m, "sample_spectrum: point dimension");
    for (double c : points[p])
      if (std::isnan(c)) throw Error("sample_spectrum: NaN point coordinate");
    for (std::size_t a = 0; a < m; ++a) {
      double lo = F.grid.origin[a], hi = F.grid.last(a);
      if (points[p][a] < lo - 1e-12 * std::abs(lo) ||
          points[p][a] > hi + 1e-12 * std::abs(hi))
        out.extrapolated[p] = true;
    }
    if (out.extrapolated[p]) ++out.n_extrapolated;
  }
  if (kind == Interp::trigonometric) {
    for (std::size_t a = 0; a < m; ++a)
      require(F.transformed[a],
              "sample_spectrum: trigonometric mode needs a full spectrum");
    ScalarField f = fourier_inverse(F);
    const UniformGrid& g = f.grid;
    const double cell = g.cell();
    parallel_for(points.size(), [&](std::size_t p) {
      if (out.extrapolated[p]) return;
      // separable phase tables
      std::vector<std::vector<cplx>> e(m);
      for (std::size_t a = 0; a < m; ++a) {
        e[a].resize(g.shape[a]);
        for (std::size_t j = 0; j < g.shape[a]; ++j)
          e[a][j] = std::polar(1.0, g.node(a, j) * points[p][a]);
      }
      cplx s = pairwise_sum<cplx>(0, g.size(), [&](std::size_t i) {
        std::size_t idx[16];
        g.unravel(i, idx);
        cplx ph = 1;
        for (std::size_t a = 0; a < m; ++a) ph *= e[a][idx[a]];
        return f.values[i] * ph;
      });
      out.values[p] = s * cell;
    });
    return out;
  }
  std::vector<cplx> coef = F.values;
  if (kind == Interp::bspline)
    for (std::size_t a = 0; a < m; ++a) prefilter_axis(coef, F.grid.shape, a);
  auto strides = F.grid.strides();
  parallel_for(points.size(), [&](std::size_t p) {
    if (out.extrapolated[p]) return;
    double u[16];
    for (std::size_t a = 0; a < m; ++a)
      u[a] = (points[p][a] - F.grid.origin[a]) / F.grid.spacing[a];
    out.values[p] = detail::interp_nd(coef, F.grid.shape, strides, u, kind);
  });
  return out;
}

}  // namespace transradon
