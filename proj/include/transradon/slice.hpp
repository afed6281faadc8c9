#pragma once
// The mixing map (Lambda u)(a, xi) = u(-a xi, xi), its inverse, the
// projection-slice identity F_2 R_T f = Lambda F f, Fourier inversion of the
// transversal transform and the moment test for the space Phi.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "core.hpp"
#include "fields.hpp"
#include "interp.hpp"
#include "xform.hpp"

namespace transradon {

struct MixingConfig {
  // Half-width of the zeroed slab |y_m| <= delta; negative selects two dual
  // cells of the y_m axis.
  double delta = -1;
  // Interpolation across a: 2 linear, 4 cubic B-spline, even p >= 6 p-point
  // Lagrange.
  int order = 4;
  // Only frequencies with |y| <= radius are requested; the rest are set to
  // 0 and do not count towards coverage.
  double radius = std::numeric_limits<double>::infinity();
  // Largest tolerated fraction of requested samples outside the source
  // extent; above it the map throws.
  double max_uncovered = 0.10;
  // Diagnostic: keep the slab values instead of zeroing them (the slab
  // energy is still reported).
  bool keep_slab = false;
};

struct MixingResult {
  SpectralField field;
  std::vector<bool> covered;  // requested and inside the source extent
  std::size_t requested = 0, uncovered = 0;
  double delta = 0;
  // Energy of the values the slab convention zeroed, and how many slab nodes
  // could not be evaluated at all (inverse map only).
  double slab_energy = 0;
  std::size_t slab_unrecoverable = 0;
  double uncovered_fraction() const {
    return requested ? double(uncovered) / double(requested) : 0.0;
  }
};

namespace detail {

inline bool same_axis(const UniformGrid& g, std::size_t a, const UniformGrid& h,
                      std::size_t b) {
  auto close = [](double x, double y) {
    return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
  };
  return g.shape[a] == h.shape[b] && close(g.origin[a], h.origin[b]) &&
         close(g.spacing[a], h.spacing[b]);
}

inline UniformGrid dual_grid(const UniformGrid& g) {
  UniformGrid d = g;
  for (std::size_t k = 0; k < g.dim(); ++k) {
    d.origin[k] = dual_origin(g, k);
    d.spacing[k] = dual_spacing(g, k);
  }
  return d;
}

// Contracts axis k of a row-major array: out[.., a, ..] = sum_x E[a][x] in[.., x, ..].
inline std::vector<cplx> contract_axis(const std::vector<cplx>& in,
                                       std::vector<std::size_t>& shape,
                                       std::size_t k,
                                       const std::vector<cplx>& E,
                                       std::size_t na) {
  std::size_t inner = 1, outer = 1;
  for (std::size_t i = k + 1; i < shape.size(); ++i) inner *= shape[i];
  for (std::size_t i = 0; i < k; ++i) outer *= shape[i];
  const std::size_t nx = shape[k];
  std::vector<cplx> out(outer * na * inner, 0);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t a = 0; a < na; ++a) {
      cplx* dst = out.data() + (o * na + a) * inner;
      for (std::size_t x = 0; x < nx; ++x) {
        const cplx e = E[a * nx + x];
        const cplx* src = in.data() + (o * nx + x) * inner;
        for (std::size_t i = 0; i < inner; ++i) dst[i] += e * src[i];
      }
    }
  shape[k] = na;
  return out;
}

// Interpolates one (m-1)-dimensional row at index-space position u.
inline cplx interp_row(const std::vector<cplx>& row,
                       const std::vector<std::size_t>& shape,
                       const std::vector<std::size_t>& strides, const double* u,
                       int order) {
  if (order == 2) return interp_nd(row, shape, strides, u, Interp::linear);
  if (order == 4) return interp_nd(row, shape, strides, u, Interp::bspline);
  const std::size_t d = shape.size();
  const int p = order;
  std::size_t start[16];
  double w[16][32];
  for (std::size_t k = 0; k < d; ++k) {
    const std::ptrdiff_t n = std::ptrdiff_t(shape[k]);
    std::ptrdiff_t s = std::ptrdiff_t(std::floor(u[k])) - p / 2 + 1;
    s = std::clamp<std::ptrdiff_t>(s, 0, n - p);
    start[k] = std::size_t(s);
    double xs[32];
    for (int q = 0; q < p; ++q) xs[q] = double(s + q);
    lagrange(xs, p, u[k], w[k]);
  }
  std::size_t taps = 1;
  for (std::size_t k = 0; k < d; ++k) taps *= std::size_t(p);
  cplx r = 0;
  for (std::size_t t = 0; t < taps; ++t) {
    std::size_t rem = t, off = 0;
    double wt = 1;
    for (std::size_t k = d; k-- > 0;) {
      std::size_t q = rem % std::size_t(p);
      rem /= std::size_t(p);
      wt *= w[k][q];
      off += (start[k] + q) * strides[k];
    }
    r += wt * row[off];
  }
  return r;
}

inline double resolve_delta(const MixingConfig& cfg, double dy) {
  return cfg.delta < 0 ? 2 * dy : cfg.delta;
}

inline void check_order(int order) {
  require(order == 2 || order == 4 || (order >= 6 && order <= 16 && order % 2 == 0),
          "mixing: interpolation order must be 2, 4 or an even number in [6, 16]");
}

}  // namespace detail

// (Lambda u)(a, xi) on the a-nodes of a sinogram grid and the xi-nodes dual
// to its b axis. U must be a full spectrum; it is evaluated through its
// exact band-limited interpolant (the DTFT of the underlying samples).
// enforce = false only flags uncovered samples.
inline MixingResult mixing_apply(const SpectralField& U, const UniformGrid& sino,
                                 const MixingConfig& cfg = {},
                                 bool enforce = true) {
  const std::size_t m = U.dim();
  require(sino.dim() == m, "mixing_apply: sinogram dimension must equal the field's");
  for (std::size_t k = 0; k < m; ++k)
    require(U.transformed[k], "mixing_apply: input must be a full spectrum");
  const ScalarField f = fourier_inverse(U);
  const UniformGrid& g = f.grid;
  const std::size_t d = m - 1;

  MixingResult R;
  R.field.source = sino;
  R.field.grid = sino;
  R.field.grid.origin[d] = dual_origin(sino, d);
  R.field.grid.spacing[d] = dual_spacing(sino, d);
  R.field.transformed.assign(m, false);
  R.field.transformed[d] = true;
  R.field.values.assign(sino.size(), 0);
  R.covered.assign(sino.size(), false);
  const UniformGrid& out = R.field.grid;
  const std::size_t nxi = out.shape[d];
  const std::size_t rows = sino.size() / nxi;

  // requested / covered flags
  std::vector<bool> requested(sino.size(), false);
  for (std::size_t i = 0; i < sino.size(); ++i) {
    double c[16];
    out.coords(i, c);
    const double xi = c[d];
    double r2 = xi * xi;
    double lo_m = U.grid.origin[d], hi_m = U.grid.last(d);
    bool in = xi >= lo_m - 1e-12 * std::abs(lo_m) && xi <= hi_m + 1e-12 * std::abs(hi_m);
    for (std::size_t k = 0; k < d; ++k) {
      double y = -c[k] * xi;
      r2 += y * y;
      double lo = U.grid.origin[k], hi = U.grid.last(k);
      if (y < lo - 1e-12 * std::abs(lo) || y > hi + 1e-12 * std::abs(hi)) in = false;
    }
    if (std::sqrt(r2) > cfg.radius) continue;
    requested[i] = true;
    ++R.requested;
    if (in)
      R.covered[i] = true;
    else
      ++R.uncovered;
  }
  if (enforce)
    require(R.uncovered_fraction() <= cfg.max_uncovered,
            "mixing_apply: " + std::to_string(R.uncovered) + " of " +
                std::to_string(R.requested) +
                " requested samples fall outside the spectrum extent");

  std::vector<std::size_t> xshape(g.shape.begin(), g.shape.end() - 1);
  std::size_t nxp = 1;
  for (auto s : xshape) nxp *= s;
  const std::size_t nm = g.shape[d];
  parallel_for(nxi, [&](std::size_t j) {
    const double xi = out.node(d, j);
    bool any = false;
    for (std::size_t r = 0; r < rows && !any; ++r) any = R.covered[r * nxi + j];
    if (!any) return;
    // H(x') = sum_{x_m} f(x', x_m) e^{i xi x_m} dx_m
    std::vector<cplx> ph(nm);
    for (std::size_t q = 0; q < nm; ++q)
      ph[q] = std::polar(g.spacing[d], xi * g.node(d, q));
    std::vector<cplx> H(nxp);
    for (std::size_t p = 0; p < nxp; ++p) {
      const cplx* src = f.values.data() + p * nm;
      cplx s = 0;
      for (std::size_t q = 0; q < nm; ++q) s += src[q] * ph[q];
      H[p] = s;
    }
    std::vector<std::size_t> shape = xshape;
    for (std::size_t k = 0; k < d; ++k) {
      const std::size_t na = out.shape[k], nx = g.shape[k];
      std::vector<cplx> E(na * nx);
      for (std::size_t a = 0; a < na; ++a)
        for (std::size_t x = 0; x < nx; ++x)
          E[a * nx + x] =
              std::polar(g.spacing[k], -out.node(k, a) * xi * g.node(k, x));
      H = detail::contract_axis(H, shape, k, E, na);
    }
    for (std::size_t r = 0; r < rows; ++r)
      if (R.covered[r * nxi + j]) R.field.values[r * nxi + j] = H[r];
  });
  return R;
}

// (Lambda^{-1} v)(y) = v(-y'/y_m, y_m) on the full dual grid of `out`, with
// the slab |y_m| <= delta set to 0. V holds (a, xi) samples whose xi axis
// must coincide with the y_m axis of the dual grid.
inline MixingResult mixing_invert(const SpectralField& V, const UniformGrid& out,
                                  const MixingConfig& cfg = {}) {
  const std::size_t m = V.dim();
  const std::size_t d = m - 1;
  require(out.dim() == m, "mixing_invert: dimension mismatch");
  require(V.transformed[d], "mixing_invert: last axis must be transformed");
  for (std::size_t k = 0; k < d; ++k)
    require(!V.transformed[k], "mixing_invert: a axes must not be transformed");
  detail::check_order(cfg.order);
  const UniformGrid dual = detail::dual_grid(out);
  require(detail::same_axis(V.grid, d, dual, d),
          "mixing_invert: xi axis differs from the output y_m axis");
  const double dy = dual.spacing[d];
  const double delta = detail::resolve_delta(cfg, dy);
  require(delta >= dy * (1 - 1e-12),
          "mixing_invert: gap must be at least one dual cell");
  require(delta < dual.last(d), "mixing_invert: gap exceeds the dual extent");

  MixingResult R;
  R.delta = delta;
  R.field.source = out;
  R.field.grid = dual;
  R.field.transformed.assign(m, true);
  R.field.values.assign(out.size(), 0);
  R.covered.assign(out.size(), false);

  // one (m-1)-dimensional array per xi row
  const std::size_t nxi = V.grid.shape[d];
  const std::size_t rows = V.grid.size() / nxi;
  std::vector<std::size_t> ashape(V.grid.shape.begin(), V.grid.shape.end() - 1);
  std::vector<std::size_t> astr(d, 1);
  for (std::size_t k = d - 1; k-- > 0;) astr[k] = astr[k + 1] * ashape[k + 1];
  std::vector<std::vector<cplx>> row(nxi, std::vector<cplx>(rows));
  parallel_for(nxi, [&](std::size_t j) {
    for (std::size_t r = 0; r < rows; ++r) row[j][r] = V.values[r * nxi + j];
    if (cfg.order == 4)
      for (std::size_t k = 0; k < d; ++k) prefilter_axis(row[j], ashape, k);
  });

  enum State : unsigned char { unrequested, slab, slab_lost, hit, miss };
  std::vector<unsigned char> state(out.size(), unrequested);
  std::vector<cplx> slab_value(out.size(), 0);
  auto strides = dual.strides();
  parallel_for(out.size(), [&](std::size_t i) {
    double y[16];
    dual.coords(i, y);
    double r2 = 0;
    for (std::size_t k = 0; k < m; ++k) r2 += y[k] * y[k];
    if (std::sqrt(r2) > cfg.radius) return;
    const std::size_t j = (i / strides[d]) % nxi;
    const double ym = y[d];
    double u[16];
    bool in = true;
    bool origin_row = std::abs(ym) < 0.5 * dy;
    for (std::size_t k = 0; k < d; ++k) {
      double a = origin_row ? 0.0 : -y[k] / ym;
      if (origin_row && y[k] != 0) in = false;
      u[k] = (a - V.grid.origin[k]) / V.grid.spacing[k];
      if (!(u[k] >= -1e-9 && u[k] <= double(ashape[k] - 1) + 1e-9)) in = false;
      u[k] = std::clamp(u[k], 0.0, double(ashape[k] - 1));
    }
    cplx v = in ? detail::interp_row(row[j], ashape, astr, u, cfg.order) : cplx(0);
    if (std::abs(ym) <= delta) {
      state[i] = in ? slab : slab_lost;
      slab_value[i] = v;
      if (cfg.keep_slab) R.field.values[i] = v;
      return;
    }
    state[i] = in ? hit : miss;
    R.field.values[i] = v;
  });
  const double cell = dual.cell() / std::pow(2 * pi, double(m));
  std::vector<double> e(out.size(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (state[i]) {
      case hit: ++R.requested; R.covered[i] = true; break;
      case miss: ++R.requested; ++R.uncovered; break;
      case slab: e[i] = std::norm(slab_value[i]) * cell; break;
      case slab_lost: ++R.slab_unrecoverable; break;
      default: break;
    }
  }
  R.slab_energy = pairwise_sum(e);
  require(R.uncovered_fraction() <= cfg.max_uncovered,
          "mixing_invert: " + std::to_string(R.uncovered) + " of " +
              std::to_string(R.requested) +
              " requested nodes need a = -y'/y_m outside the sinogram extent");
  return R;
}

// F_2 of a sinogram: the b axis transformed row by row.
inline SpectralField fourier_b(const Sinogram& phi) {
  return fourier_forward(phi.as_field(), {phi.dim() - 1});
}

struct SliceReport {
  double max_rel = 0;  // max |F_2 phi - Lambda F f| / max |Lambda F f|
  double l2_rel = 0;
  std::size_t compared = 0, uncovered = 0;
};

// Residual of F_2 phi = Lambda F f over the covered (a, xi) samples.
inline SliceReport slice_residual(const ScalarField& f, const Sinogram& phi,
                                  const MixingConfig& cfg = {}) {
  require(f.grid.dim() == phi.dim(), "slice_residual: geometry mismatch");
  SpectralField lhs = fourier_b(phi);
  MixingResult rhs = mixing_apply(fourier_forward(f), phi.grid, cfg, false);
  SliceReport r;
  r.uncovered = rhs.uncovered;
  double num2 = 0, den2 = 0, nmax = 0, dmax = 0;
  for (std::size_t i = 0; i < lhs.values.size(); ++i) {
    if (!rhs.covered[i]) continue;
    ++r.compared;
    double e = std::abs(lhs.values[i] - rhs.field.values[i]);
    double v = std::abs(rhs.field.values[i]);
    num2 += e * e;
    den2 += v * v;
    nmax = std::max(nmax, e);
    dmax = std::max(dmax, v);
  }
  r.max_rel = dmax > 0 ? nmax / dmax : nmax;
  r.l2_rel = den2 > 0 ? std::sqrt(num2 / den2) : std::sqrt(num2);
  return r;
}

struct FourierInversion {
  ScalarField f;
  double delta = 0;
  double kept_energy = 0;    // (2 pi)^{-m} sum |U|^2 dy of the spectrum used
  double slab_energy = 0;    // energy of the recoverable slab content removed
  double slab_fraction = 0;  // slab_energy / (slab_energy + kept energy)
  std::size_t slab_unrecoverable = 0;
  std::size_t requested = 0, uncovered = 0;
};

// f = F^{-1} Lambda^{-1} F_2 phi on the grid `out`, whose x_m axis must
// match the sinogram b axis.
inline FourierInversion invert_fourier(const Sinogram& phi, const UniformGrid& out,
                                       const MixingConfig& cfg = {}) {
  require(out.dim() == phi.dim(), "invert_fourier: dimension mismatch");
  MixingResult U = mixing_invert(fourier_b(phi), out, cfg);
  FourierInversion r;
  r.delta = U.delta;
  r.slab_energy = U.slab_energy;
  r.slab_unrecoverable = U.slab_unrecoverable;
  r.requested = U.requested;
  r.uncovered = U.uncovered;
  const double cell = U.field.grid.cell() / std::pow(2 * pi, double(out.dim()));
  double kept = pairwise_sum<double>(0, U.field.values.size(), [&](std::size_t i) {
    return std::norm(U.field.values[i]) * cell;
  });
  r.kept_energy = kept;
  double tot = cfg.keep_slab ? kept : kept + r.slab_energy;
  r.slab_fraction = tot > 0 ? r.slab_energy / tot : 0.0;
  r.f = fourier_inverse(U.field);
  if (r.slab_fraction > 1e-8)
    r.f.notes.push_back("invert_fourier: " + std::to_string(r.slab_fraction) +
                        " of the spectral energy lies in the zeroed slab");
  if (U.uncovered)
    r.f.notes.push_back("invert_fourier: " + std::to_string(U.uncovered) +
                        " spectral nodes outside the sinogram a-extent set to 0");
  return r;
}

struct MomentReport {
  bool member = true;
  // normalized[k] = max over rows x' of
  //   |sum_j f(x', x_j) x_j^k dx| / (max|f| sum_j |x_j|^k dx)
  std::vector<double> normalized;
};

// Vanishing of the x_m-moments of order 0..k_max on every row x'.
inline MomentReport phi_membership(const ScalarField& f, int k_max, double tol) {
  require(k_max >= 0 && k_max <= 12, "phi_membership: k_max must lie in [0, 12]");
  const UniformGrid& g = f.grid;
  const std::size_t d = g.dim() - 1, n = g.shape[d];
  const std::size_t rows = g.size() / n;
  const double h = g.spacing[d];
  const double fmax = f.max_abs();
  MomentReport r;
  r.normalized.assign(std::size_t(k_max) + 1, 0);
  for (int k = 0; k <= k_max; ++k) {
    std::vector<double> xk(n);
    for (std::size_t j = 0; j < n; ++j) xk[j] = std::pow(g.node(d, j), k);
    double scale = pairwise_sum<double>(0, n, [&](std::size_t j) {
      return std::abs(xk[j]) * h;
    });
    std::vector<double> worst(rows, 0);
    parallel_for(rows, [&](std::size_t row) {
      const cplx* v = f.values.data() + row * n;
      cplx s = pairwise_sum<cplx>(0, n, [&](std::size_t j) { return v[j] * xk[j] * h; });
      worst[row] = std::abs(s);
    });
    double w = *std::max_element(worst.begin(), worst.end());
    r.normalized[std::size_t(k)] = fmax > 0 ? w / (fmax * scale) : 0.0;
    if (r.normalized[std::size_t(k)] > tol) r.member = false;
  }
  return r;
}

}  // namespace transradon
