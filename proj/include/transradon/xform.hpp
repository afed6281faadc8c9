#pragma once
// Transversal, classical and Heisenberg Radon transforms, their duals and
// the unweighted backprojection.
//
// A hyperplane is written c.x = beta. The transversal plane x_m = a.x' + b
// is c = (-a, 1), beta = b; the classical plane theta.x = t is c = theta.
// Line integrals pick the free axis k with the largest |c_k|, solve for x_k,
// sum over the remaining grid nodes with trapezoid weights and interpolate
// along axis k. The measure dx' of the transversal plane and the surface
// measure of a unit-normal plane both equal dx_{others} / |c_k|.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "core.hpp"
#include "fields.hpp"
#include "interp.hpp"

namespace transradon {

// --------------------------------------------------------------- sinogram

// Samples over (a_1..a_{m-1}, b). The grid holds the a axes first, b last.
struct Sinogram {
  UniformGrid grid;
  std::vector<cplx> values;
  std::vector<std::string> warnings;

  Sinogram() = default;
  explicit Sinogram(UniformGrid g) : grid(std::move(g)), values(grid.size()) {}
  Sinogram(UniformGrid g, std::vector<cplx> v)
      : grid(std::move(g)), values(std::move(v)) {
    require(values.size() == grid.size(),
            "sinogram: value count does not match grid shape");
  }

  std::size_t dim() const { return grid.dim(); }
  std::size_t nb() const { return grid.shape.back(); }
  std::size_t rows() const { return grid.size() / nb(); }
  double b0() const { return grid.origin.back(); }
  double db() const { return grid.spacing.back(); }
  void a_node(std::size_t row, double* a) const {
    for (std::size_t k = dim() - 1; k-- > 0;) {
      a[k] = grid.node(k, row % grid.shape[k]);
      row /= grid.shape[k];
    }
  }
  // Largest |a_k| covered by the grid.
  double a_extent() const {
    double e = 0;
    for (std::size_t k = 0; k + 1 < dim(); ++k)
      e = std::max({e, std::abs(grid.origin[k]), std::abs(grid.last(k))});
    return e;
  }
  ScalarField as_field() const { return ScalarField(grid, values); }
  const cplx* row(std::size_t r) const { return values.data() + r * nb(); }
  cplx* row(std::size_t r) { return values.data() + r * nb(); }
};

// a axes: na nodes spanning [-A, A]; b axis: nb nodes at -B + j 2B/nb.
inline UniformGrid sinogram_grid(std::size_t m, std::size_t na, double A,
                                 std::size_t nb, double B) {
  require(m >= 2, "sinogram: dimension must be at least 2");
  require(A > 0 && B > 0, "sinogram: extents must be positive");
  std::vector<std::size_t> shape(m, na);
  std::vector<double> origin(m, -A), step(m, 2 * A / double(na - 1));
  shape[m - 1] = nb;
  origin[m - 1] = -B;
  step[m - 1] = 2 * B / double(nb);
  return UniformGrid(shape, origin, step);
}

inline double norm2(const double* v, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += v[i] * v[i];
  return s;
}

// Largest boundary magnitude relative to the maximum.
inline double edge_ratio(const ScalarField& f) {
  const UniformGrid& g = f.grid;
  double edge = 0, mx = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = std::abs(f.values[i]);
    mx = std::max(mx, v);
    std::size_t idx[16];
    g.unravel(i, idx);
    for (std::size_t k = 0; k < g.dim(); ++k)
      if (idx[k] == 0 || idx[k] + 1 == g.shape[k]) {
        edge = std::max(edge, v);
        break;
      }
  }
  return mx > 0 ? edge / mx : 0.0;
}

// --------------------------------------------------------- line sampler

struct RadonOptions {
  Interp interp = Interp::bspline;
  // Band-limited upsampling of the interpolation axis before the cubic
  // interpolant is built; 1 disables it.
  int oversample = 2;
  // Columns whose largest sample is below skip * max|f| are skipped.
  double skip = 1e-17;
};

namespace detail {

// Band-limited resampling of one axis to q times as many samples (the DFT
// interpolant of the periodized data). The Nyquist bin of even lengths is
// split symmetrically so real data stays real.
inline std::vector<cplx> oversample_axis(const std::vector<cplx>& v,
                                         const std::vector<std::size_t>& shape,
                                         std::size_t axis, std::size_t q,
                                         std::vector<std::size_t>& shape2) {
  shape2 = shape;
  const std::size_t n = shape[axis], n2 = n * q;
  shape2[axis] = n2;
  std::vector<cplx> s = v;
  dft_axis(s, shape, axis, -1);
  std::size_t inner = 1, outer = 1;
  for (std::size_t k = axis + 1; k < shape.size(); ++k) inner *= shape[k];
  for (std::size_t k = 0; k < axis; ++k) outer *= shape[k];
  std::vector<cplx> w(outer * n2 * inner, 0);
  const double sc = 1.0 / double(n);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t i = 0; i < inner; ++i) {
        cplx z = s[(o * n + p) * inner + i] * sc;
        auto put = [&](std::ptrdiff_t freq, cplx val) {
          std::size_t p2 = freq >= 0 ? std::size_t(freq)
                                     : std::size_t(freq + std::ptrdiff_t(n2));
          w[(o * n2 + p2) * inner + i] += val;
        };
        if (n % 2 == 0 && p == n / 2) {
          put(std::ptrdiff_t(n / 2), 0.5 * z);
          put(-std::ptrdiff_t(n / 2), 0.5 * z);
        } else if (p < (n + 1) / 2) {
          put(std::ptrdiff_t(p), z);
        } else {
          put(std::ptrdiff_t(p) - std::ptrdiff_t(n), z);
        }
      }
  dft_axis(w, shape2, axis, +1);
  return w;
}

inline double trap_weight(const UniformGrid& g, std::size_t axis,
                          std::size_t i) {
  double h = g.spacing[axis];
  return (i == 0 || i + 1 == g.shape[axis]) ? 0.5 * h : h;
}

}  // namespace detail

// Hyperplane integrals of one sampled field. Construction prepares, per
// axis, the (optionally upsampled) interpolation coefficients; queries are
// thread-safe.
class LineSampler {
 public:
  explicit LineSampler(const ScalarField& f, RadonOptions opt = {})
      : grid_(f.grid), opt_(opt) {
    grid_.validate();
    require(opt.oversample >= 1, "radon: oversample must be >= 1");
    detail::check_finite(f.values, "radon");
    real_ = f.is_real(1e-12);
    fmax_ = f.max_abs();
    const std::size_t m = grid_.dim();
    axes_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      Axis& A = axes_[k];
      std::vector<cplx> data;
      if (opt.oversample > 1) {
        data = detail::oversample_axis(f.values, grid_.shape, k,
                                       std::size_t(opt.oversample), A.shape);
      } else {
        data = f.values;
        A.shape = grid_.shape;
      }
      A.origin = grid_.origin[k];
      A.step = grid_.spacing[k] / double(opt.oversample);
      A.strides.assign(m, 1);
      for (std::size_t i = m - 1; i-- > 0;)
        A.strides[i] = A.strides[i + 1] * A.shape[i + 1];
      if (real_) {
        A.re.resize(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) A.re[i] = data[i].real();
        if (opt.interp == Interp::bspline) prefilter_axis(A.re, A.shape, k);
      } else {
        A.cx = std::move(data);
        if (opt.interp == Interp::bspline) prefilter_axis(A.cx, A.shape, k);
      }
      // column maxima of the original samples, columns ordered over the
      // remaining axes with the last one fastest
      std::size_t cols = grid_.size() / grid_.shape[k];
      A.colmax.assign(cols, 0);
      auto st = grid_.strides();
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        std::size_t idx[16];
        grid_.unravel(i, idx);
        std::size_t col = 0;
        for (std::size_t a = 0; a < m; ++a)
          if (a != k) col = col * grid_.shape[a] + idx[a];
        A.colmax[col] = std::max(A.colmax[col], std::abs(f.values[i]));
      }
      (void)st;
    }
  }

  std::size_t dim() const { return grid_.dim(); }
  bool real() const { return real_; }
  const UniformGrid& grid() const { return grid_; }

  // out[j] = integral of f over {c.x = beta0 + j dbeta}, divided into the
  // measure dx_{others}/|c_k|.
  void row(const double* c, double beta0, double dbeta, std::size_t nb,
           cplx* out) const {
    if (real_) {
      std::vector<double> acc(nb, 0.0);
      row_impl<double>(c, beta0, dbeta, nb, acc.data());
      for (std::size_t j = 0; j < nb; ++j) out[j] = acc[j];
    } else {
      std::vector<cplx> acc(nb, 0.0);
      row_impl<cplx>(c, beta0, dbeta, nb, acc.data());
      for (std::size_t j = 0; j < nb; ++j) out[j] = acc[j];
    }
  }

  cplx at(const double* c, double beta) const {
    cplx v;
    row(c, beta, 0.0, 1, &v);
    return v;
  }

  // (R_T f)(a, b)
  cplx transversal(const double* a, double b) const {
    double c[16];
    const std::size_t m = dim();
    for (std::size_t k = 0; k + 1 < m; ++k) c[k] = -a[k];
    c[m - 1] = 1;
    return at(c, b);
  }

 private:
  struct Axis {
    std::vector<std::size_t> shape, strides;
    double origin = 0, step = 1;
    std::vector<double> re;
    std::vector<cplx> cx;
    std::vector<double> colmax;
  };

  template <class T>
  const std::vector<T>& data(const Axis& A) const {
    if constexpr (std::is_same_v<T, double>)
      return A.re;
    else
      return A.cx;
  }

  template <class T>
  void row_impl(const double* c, double beta0, double dbeta, std::size_t nb,
                T* acc) const {
    const std::size_t m = dim();
    std::size_t k = m - 1;
    double ck = std::abs(c[m - 1]);
    for (std::size_t i = m - 1; i-- > 0;)
      if (std::abs(c[i]) > ck) {
        k = i;
        ck = std::abs(c[i]);
      }
    require(ck > 0 && std::isfinite(ck), "radon: degenerate hyperplane normal");
    const Axis& A = axes_[k];
    const std::vector<T>& d = data<T>(A);
    const std::size_t nk = A.shape[k];
    const std::size_t sk = A.strides[k];
    std::size_t oth[16], no = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (i != k) oth[no++] = i;
    const std::size_t cols = A.colmax.size();
    const double skip = opt_.skip * fmax_;
    const double du = dbeta / (c[k] * A.step);
    const double hi = double(nk - 1);
    for (std::size_t col = 0; col < cols; ++col) {
      if (A.colmax[col] <= skip) continue;
      std::size_t rest = col, off = 0;
      double w = 1.0 / ck, s = 0;
      for (std::size_t q = no; q-- > 0;) {
        std::size_t ax = oth[q];
        std::size_t id = rest % grid_.shape[ax];
        rest /= grid_.shape[ax];
        w *= detail::trap_weight(grid_, ax, id);
        s += c[ax] * grid_.node(ax, id);
        off += id * A.strides[ax];
      }
      const double u0 = ((beta0 - s) / c[k] - A.origin) / A.step;
      std::size_t jlo = 0, jhi = nb;
      if (du != 0) {
        double ja = (0 - u0) / du, jb = (hi - u0) / du;
        if (ja > jb) std::swap(ja, jb);
        ja = std::max(0.0, std::ceil(ja - 1e-9));
        jb = std::min(double(nb) - 1, std::floor(jb + 1e-9));
        if (jb < ja) continue;
        jlo = std::size_t(ja);
        jhi = std::size_t(jb) + 1;
      }
      const T* base = d.data() + off;
      for (std::size_t j = jlo; j < jhi; ++j) {
        double u = u0 + double(j) * du;
        if (!(u >= 0 && u <= hi)) continue;
        acc[j] += w * interp_line(base, nk, sk, u, opt_.interp);
      }
    }
  }

  UniformGrid grid_;
  RadonOptions opt_;
  bool real_ = false;
  double fmax_ = 0;
  std::vector<Axis> axes_;
};

// ------------------------------------------------------ forward transforms

// (R_T f)(a, b) = \int f(x', a.x' + b) dx' on the nodes of the given
// sinogram grid.
inline Sinogram radon_transversal(const ScalarField& f, const UniformGrid& out,
                                  RadonOptions opt = {}) {
  const std::size_t m = f.grid.dim();
  require(out.dim() == m, "radon_transversal: sinogram a-dimension must be m-1");
  Sinogram s(out);
  double er = edge_ratio(f);
  if (er > 1e-10)
    s.warnings.push_back("field does not decay at the grid boundary (edge/max = " +
                         std::to_string(er) + ")");
  LineSampler L(f, opt);
  parallel_for(s.rows(), [&](std::size_t r) {
    double a[16], c[16];
    s.a_node(r, a);
    for (std::size_t k = 0; k + 1 < m; ++k) c[k] = -a[k];
    c[m - 1] = 1;
    L.row(c, s.b0(), s.db(), s.nb(), s.row(r));
  });
  return s;
}

// ------------------------------------------------------------ ray layout

// Transversal data on a compactified direction set: the a-plane is mapped
// to the upper hemisphere theta = (-a, 1)/sqrt(1+|a|^2) and integrated with
// a Gauss-Legendre rule in the polar angle (times uniform azimuth for
// m = 3). Rows are sampled in the normalized offset t = b / sqrt(1+|a|^2),
// so one t-range covers every hyperplane through a bounded region.
struct RaySinogram {
  std::size_t m = 2;
  std::vector<double> a;      // rays x (m-1)
  std::vector<double> w_dta;  // weights for da / (1+|a|^2)^{m/2}
  std::vector<double> w_da;   // weights for da
  double t0 = 0, dt = 1;
  std::size_t nt = 0;
  std::vector<cplx> values;   // rays x nt

  std::size_t rays() const { return w_da.size(); }
  const double* a_node(std::size_t i) const { return a.data() + i * (m - 1); }
  double scale(std::size_t i) const {
    return std::sqrt(1 + norm2(a_node(i), m - 1));
  }
  cplx* row(std::size_t i) { return values.data() + i * nt; }
  const cplx* row(std::size_t i) const { return values.data() + i * nt; }
};

// m = 2: a = tan(w), w Gauss-Legendre on (-pi/2, pi/2) with n_polar nodes.
// m = 3: a = tan(w)(cos p, sin p), w Gauss-Legendre on (0, pi/2), p uniform
// with n_azimuth nodes. t covers [-T, T) with nt nodes.
inline RaySinogram ray_geometry(std::size_t m, int n_polar, int n_azimuth,
                                double T, std::size_t nt) {
  require(m == 2 || m == 3, "ray_geometry: m must be 2 or 3");
  require(n_polar >= 2 && nt >= 2 && T > 0, "ray_geometry: bad sizes");
  RaySinogram R;
  R.m = m;
  R.t0 = -T;
  R.dt = 2 * T / double(nt);
  R.nt = nt;
  if (m == 2) {
    Rule g = gauss_legendre(n_polar, -pi / 2, pi / 2);
    for (int i = 0; i < n_polar; ++i) {
      double c = std::cos(g.x[i]);
      R.a.push_back(std::tan(g.x[i]));
      R.w_dta.push_back(g.w[i]);
      R.w_da.push_back(g.w[i] / (c * c));
    }
  } else {
    require(n_azimuth >= 3, "ray_geometry: need at least 3 azimuth nodes");
    Rule g = gauss_legendre(n_polar, 0, pi / 2);
    for (int i = 0; i < n_polar; ++i)
      for (int j = 0; j < n_azimuth; ++j) {
        double p = 2 * pi * j / n_azimuth, t = std::tan(g.x[i]);
        double c = std::cos(g.x[i]);
        double w = g.w[i] * std::sin(g.x[i]) * 2 * pi / n_azimuth;
        R.a.push_back(t * std::cos(p));
        R.a.push_back(t * std::sin(p));
        R.w_dta.push_back(w);
        R.w_da.push_back(w / (c * c * c));
      }
  }
  R.values.assign(R.rays() * nt, 0);
  return R;
}

inline RaySinogram radon_rays(const ScalarField& f, RaySinogram R,
                              RadonOptions opt = {}) {
  require(f.grid.dim() == R.m, "radon_rays: dimension mismatch");
  LineSampler L(f, opt);
  const std::size_t m = R.m;
  parallel_for(R.rays(), [&](std::size_t i) {
    double c[16];
    const double* a = R.a_node(i);
    for (std::size_t k = 0; k + 1 < m; ++k) c[k] = -a[k];
    c[m - 1] = 1;
    double s = R.scale(i);
    L.row(c, s * R.t0, s * R.dt, R.nt, R.row(i));
  });
  return R;
}

// ----------------------------------------------------- generic backprojector

// A family of sampled rows phi_r(beta) on beta = b0_r + j db_r, combined as
//   out(x) = sum_r weight_r phi_r(c_r . x).
struct RowSet {
  std::size_t m = 0, nb = 0;
  std::vector<double> c, weight, b0, db;
  std::vector<cplx> coef;  // rows x nb interpolation coefficients
  Interp interp = Interp::bspline;

  std::size_t rows() const { return weight.size(); }

  void add(const double* cr, double w, double beta0, double dbeta,
           const cplx* data) {
    c.insert(c.end(), cr, cr + m);
    weight.push_back(w);
    b0.push_back(beta0);
    db.push_back(dbeta);
    coef.insert(coef.end(), data, data + nb);
  }
  void prepare() {
    if (interp == Interp::bspline)
      parallel_for(rows(), [&](std::size_t r) {
        prefilter_line(coef.data() + r * nb, nb, 1);
      });
  }
};

inline cplx backproject_at(const RowSet& R, const double* x) {
  cplx acc = 0;
  for (std::size_t r = 0; r < R.rows(); ++r) {
    if (R.weight[r] == 0) continue;
    double beta = 0;
    for (std::size_t k = 0; k < R.m; ++k) beta += R.c[r * R.m + k] * x[k];
    double u = (beta - R.b0[r]) / R.db[r];
    acc += R.weight[r] *
           interp_line(R.coef.data() + r * R.nb, R.nb, 1, u, R.interp);
  }
  return acc;
}

inline ScalarField backproject_rows(const RowSet& R, const UniformGrid& out) {
  require(out.dim() == R.m, "backprojection: dimension mismatch");
  const std::size_t m = R.m, nm = out.shape[m - 1];
  const std::size_t cols = out.size() / nm;
  ScalarField f(out);
  parallel_for(cols, [&](std::size_t col) {
    double xp[16];
    std::size_t rest = col;
    for (std::size_t k = m - 1; k-- > 0;) {
      xp[k] = out.node(k, rest % out.shape[k]);
      rest /= out.shape[k];
    }
    std::vector<cplx> acc(nm, 0.0);
    for (std::size_t r = 0; r < R.rows(); ++r) {
      const double w = R.weight[r];
      if (w == 0) continue;
      const double* cr = R.c.data() + r * m;
      double base = 0;
      for (std::size_t k = 0; k + 1 < m; ++k) base += cr[k] * xp[k];
      const double u0 =
          (base + cr[m - 1] * out.origin[m - 1] - R.b0[r]) / R.db[r];
      const double du = cr[m - 1] * out.spacing[m - 1] / R.db[r];
      const cplx* d = R.coef.data() + r * R.nb;
      for (std::size_t j = 0; j < nm; ++j) {
        double u = u0 + double(j) * du;
        if (!(u >= 0 && u <= double(R.nb - 1))) continue;
        acc[j] += w * interp_line(d, R.nb, 1, u, R.interp);
      }
    }
    std::copy(acc.begin(), acc.end(), f.values.begin() + col * nm);
  });
  return f;
}

namespace detail {

// Rows of a sinogram grid with b = x_m - a.x', weight(a) times the
// trapezoid weight of the a-node.
template <class W>
RowSet sinogram_rows(const Sinogram& s, W&& weight) {
  RowSet R;
  const std::size_t m = s.dim();
  R.m = m;
  R.nb = s.nb();
  for (std::size_t r = 0; r < s.rows(); ++r) {
    double a[16], c[16];
    s.a_node(r, a);
    double w = weight(a);
    std::size_t rest = r;
    for (std::size_t k = m - 1; k-- > 0;) {
      w *= trap_weight(s.grid, k, rest % s.grid.shape[k]);
      rest /= s.grid.shape[k];
    }
    for (std::size_t k = 0; k + 1 < m; ++k) c[k] = -a[k];
    c[m - 1] = 1;
    R.add(c, w, s.b0(), s.db(), s.row(r));
  }
  R.prepare();
  return R;
}

template <class W>
RowSet ray_rows(const RaySinogram& s, const std::vector<double>& w, W&& extra) {
  RowSet R;
  const std::size_t m = s.m;
  R.m = m;
  R.nb = s.nt;
  for (std::size_t i = 0; i < s.rays(); ++i) {
    double c[16];
    const double* a = s.a_node(i);
    for (std::size_t k = 0; k + 1 < m; ++k) c[k] = -a[k];
    c[m - 1] = 1;
    double sc = s.scale(i);
    R.add(c, w[i] * extra(a), sc * s.t0, sc * s.dt, s.row(i));
  }
  R.prepare();
  return R;
}

// Fraction of the weighted mass sitting on the outermost a-rows.
inline double a_edge_ratio(const Sinogram& s, double weight_power) {
  const std::size_t m = s.dim();
  double edge = 0, mx = 0;
  for (std::size_t r = 0; r < s.rows(); ++r) {
    double a[16];
    s.a_node(r, a);
    double w = std::pow(1 + norm2(a, m - 1), weight_power);
    double v = 0;
    for (std::size_t j = 0; j < s.nb(); ++j) v = std::max(v, std::abs(s.row(r)[j]));
    v *= w;
    mx = std::max(mx, v);
    std::size_t rest = r;
    for (std::size_t k = m - 1; k-- > 0;) {
      std::size_t id = rest % s.grid.shape[k];
      rest /= s.grid.shape[k];
      if (id == 0 || id + 1 == s.grid.shape[k]) edge = std::max(edge, v);
    }
  }
  return mx > 0 ? edge / mx : 0.0;
}

}  // namespace detail

// ------------------------------------------------------------------ duals

// (*R_T phi)(x) = \int phi(a, x_m - a.x') da / (1+|a|^2)^{m/2} over the
// truncated a-grid.
inline ScalarField dual_transversal(const Sinogram& phi, const UniformGrid& out) {
  const std::size_t m = phi.dim();
  require(out.dim() == m, "dual_transversal: dimension mismatch");
  RowSet R = detail::sinogram_rows(phi, [&](const double* a) {
    return std::pow(1 + norm2(a, m - 1), -0.5 * double(m));
  });
  ScalarField f = backproject_rows(R, out);
  double er = detail::a_edge_ratio(phi, -0.5 * double(m));
  f.notes.push_back("a-extent " + std::to_string(phi.a_extent()) +
                    ", weighted edge/max " + std::to_string(er));
  return f;
}

// (R~_T g)(x) = \int g(a, x_m - x'.a) da, no weight.
inline ScalarField backprojection(const Sinogram& g, const UniformGrid& out) {
  require(out.dim() == g.dim(), "backprojection: dimension mismatch");
  RowSet R = detail::sinogram_rows(g, [](const double*) { return 1.0; });
  ScalarField f = backproject_rows(R, out);
  double er = detail::a_edge_ratio(g, 0.0);
  if (er > 1e-8)
    f.notes.push_back("sinogram does not decay within the a-extent (edge/max = " +
                      std::to_string(er) + ")");
  return f;
}

// Dual transform and backprojection over the compactified ray set; the
// optional factor multiplies each row (e.g. sqrt(1+|a|^2)).
inline ScalarField dual_transversal(const RaySinogram& phi, const UniformGrid& out) {
  RowSet R = detail::ray_rows(phi, phi.w_dta, [](const double*) { return 1.0; });
  return backproject_rows(R, out);
}

inline cplx dual_transversal_at(const RaySinogram& phi, const double* x) {
  RowSet R = detail::ray_rows(phi, phi.w_dta, [](const double*) { return 1.0; });
  return backproject_at(R, x);
}

inline ScalarField backprojection(const RaySinogram& g, const UniformGrid& out) {
  RowSet R = detail::ray_rows(g, g.w_da, [](const double*) { return 1.0; });
  return backproject_rows(R, out);
}

// ------------------------------------------------------ sphere layout

// Samples over (theta, t) in S^{m-1} x R. m = 2: theta = (sin w, cos w), w
// uniform. m = 3: theta = (sin w cos p, sin w sin p, cos w) with cos w on
// Gauss-Legendre nodes and p uniform. Nodes with |theta_m| < theta_min are
// left out; the weights then integrate over the remaining zones.
struct SphereSinogram {
  std::size_t m = 2;
  std::vector<double> theta;   // nodes x m
  std::vector<double> weight;
  std::vector<double> polar;   // w of each polar ring (sorted ascending)
  std::size_t n_azimuth = 1;   // nodes per ring
  double theta_min = 0;
  double t0 = 0, dt = 1;
  std::size_t nt = 0;
  std::vector<cplx> values;    // nodes x nt
  std::vector<bool> covered;   // nodes x nt

  std::size_t nodes() const { return weight.size(); }
  const double* node(std::size_t i) const { return theta.data() + i * m; }
  cplx* row(std::size_t i) { return values.data() + i * nt; }
  const cplx* row(std::size_t i) const { return values.data() + i * nt; }
  double t(std::size_t j) const { return t0 + double(j) * dt; }
};

inline SphereSinogram sphere_geometry(std::size_t m, int n_polar, int n_azimuth,
                                      double T, std::size_t nt,
                                      double theta_min = 0) {
  require(m == 2 || m == 3, "sphere_geometry: m must be 2 or 3");
  require(theta_min >= 0 && theta_min < 1, "sphere_geometry: bad theta_min");
  require(n_polar >= 2 && nt >= 2 && T > 0, "sphere_geometry: bad sizes");
  SphereSinogram S;
  S.m = m;
  S.theta_min = theta_min;
  S.t0 = -T;
  S.dt = 2 * T / double(nt);
  S.nt = nt;
  if (m == 2) {
    S.n_azimuth = 1;
    for (int j = 0; j < n_polar; ++j) {
      double w = -pi + 2 * pi * (j + 0.5) / n_polar;
      if (std::abs(std::cos(w)) < theta_min) continue;
      S.polar.push_back(w);
      S.theta.push_back(std::sin(w));
      S.theta.push_back(std::cos(w));
      S.weight.push_back(2 * pi / n_polar);
    }
  } else {
    require(n_azimuth >= 4 && n_azimuth % 2 == 0,
            "sphere_geometry: azimuth count must be even and >= 4");
    S.n_azimuth = std::size_t(n_azimuth);
    Rule c;
    if (theta_min == 0) {
      c = gauss_legendre(n_polar, -1, 1);
    } else {
      Rule lo = gauss_legendre(n_polar / 2, -1, -theta_min);
      Rule hi = gauss_legendre(n_polar - n_polar / 2, theta_min, 1);
      c.x = lo.x;
      c.w = lo.w;
      c.x.insert(c.x.end(), hi.x.begin(), hi.x.end());
      c.w.insert(c.w.end(), hi.w.begin(), hi.w.end());
    }
    // ascending polar angle = descending cos
    for (std::size_t i = c.x.size(); i-- > 0;) {
      double w = std::acos(c.x[i]), sw = std::sin(w);
      S.polar.push_back(w);
      for (int j = 0; j < n_azimuth; ++j) {
        double p = 2 * pi * j / n_azimuth;
        S.theta.push_back(sw * std::cos(p));
        S.theta.push_back(sw * std::sin(p));
        S.theta.push_back(c.x[i]);
        S.weight.push_back(c.w[i] * 2 * pi / n_azimuth);
      }
    }
  }
  S.values.assign(S.nodes() * nt, 0);
  S.covered.assign(S.nodes() * nt, true);
  return S;
}

// Classical Radon transform (Rf)(theta, t) = \int_{theta.x = t} f.
inline SphereSinogram radon_classical(const ScalarField& f, SphereSinogram S,
                                      RadonOptions opt = {}) {
  require(f.grid.dim() == S.m, "radon_classical: dimension mismatch");
  LineSampler L(f, opt);
  parallel_for(S.nodes(), [&](std::size_t i) {
    L.row(S.node(i), S.t0, S.dt, S.nt, S.row(i));
  });
  return S;
}

// (T phi)(theta, t) = phi(-theta'/theta_m, t/theta_m), by cubic B-spline
// interpolation on the sinogram grid; samples outside it are 0 and flagged.
inline SphereSinogram transfer_to_sphere(const Sinogram& phi, SphereSinogram S) {
  const std::size_t m = phi.dim();
  require(S.m == m, "transfer_to_sphere: dimension mismatch");
  const double tmin = std::max(S.theta_min, 0.05);
  for (std::size_t i = 0; i < S.nodes(); ++i)
    require(std::abs(S.node(i)[m - 1]) >= tmin - 1e-15,
            "transfer_to_sphere: node with |theta_m| below theta_min = " +
                std::to_string(tmin));
  std::vector<cplx> coef = phi.values;
  for (std::size_t k = 0; k < m; ++k) prefilter_axis(coef, phi.grid.shape, k);
  auto strides = phi.grid.strides();
  parallel_for(S.nodes(), [&](std::size_t i) {
    const double* th = S.node(i);
    double u[16];
    for (std::size_t k = 0; k + 1 < m; ++k)
      u[k] = (-th[k] / th[m - 1] - phi.grid.origin[k]) / phi.grid.spacing[k];
    for (std::size_t j = 0; j < S.nt; ++j) {
      double b = S.t(j) / th[m - 1];
      u[m - 1] = (b - phi.grid.origin[m - 1]) / phi.grid.spacing[m - 1];
      bool in = true;
      double uc[16];
      for (std::size_t k = 0; k < m; ++k) {
        double top = double(phi.grid.shape[k] - 1);
        if (!(u[k] >= -1e-9 && u[k] <= top + 1e-9)) in = false;
        uc[k] = std::clamp(u[k], 0.0, top);
      }
      S.covered[i * S.nt + j] = in;
      S.row(i)[j] = in ? detail::interp_nd(coef, phi.grid.shape, strides, uc,
                                           Interp::bspline)
                       : cplx(0);
    }
  });
  return S;
}

namespace detail {

// p-point Lagrange weights at x over nodes xs.
inline void lagrange(const double* xs, int p, double x, double* w) {
  for (int i = 0; i < p; ++i) {
    double v = 1;
    for (int j = 0; j < p; ++j)
      if (j != i) v *= (x - xs[j]) / (xs[i] - xs[j]);
    w[i] = v;
  }
}

struct PolarTap {
  std::size_t ring;
  bool flip;  // azimuth shifted by pi (reflection through the pole)
  double w;
};

// Stencil in the polar angle around w*, honouring the node gaps at
// |cos w| < theta_min. Returns false if no same-side stencil exists.
inline bool polar_stencil(const SphereSinogram& S, double w, int p,
                          std::vector<PolarTap>& taps) {
  struct Ext {
    double w;
    std::size_t ring;
    bool flip;
  };
  std::vector<Ext> ext;
  const std::size_t n = S.polar.size();
  if (S.m == 2) {
    for (int s = -1; s <= 1; ++s)
      for (std::size_t i = 0; i < n; ++i)
        ext.push_back({S.polar[i] + 2 * pi * s, i, false});
  } else {
    for (std::size_t i = n; i-- > 0;) ext.push_back({-S.polar[i], i, true});
    for (std::size_t i = 0; i < n; ++i) ext.push_back({S.polar[i], i, false});
    for (std::size_t i = n; i-- > 0;)
      ext.push_back({2 * pi - S.polar[i], i, true});
  }
  std::size_t hi = std::size_t(
      std::lower_bound(ext.begin(), ext.end(), w,
                       [](const Ext& e, double v) { return e.w < v; }) -
      ext.begin());
  std::ptrdiff_t lo = std::ptrdiff_t(hi) - p / 2;
  lo = std::clamp<std::ptrdiff_t>(lo, 0, std::ptrdiff_t(ext.size()) - p);
  double side = std::cos(w);
  double xs[16], ws[16];
  taps.clear();
  for (int q = 0; q < p; ++q) {
    const Ext& e = ext[std::size_t(lo + q)];
    if (std::cos(e.w) * side < 0) return false;
    xs[q] = e.w;
  }
  lagrange(xs, p, w, ws);
  for (int q = 0; q < p; ++q) {
    const Ext& e = ext[std::size_t(lo + q)];
    taps.push_back({e.ring, e.flip, ws[q]});
  }
  return true;
}

}  // namespace detail

// (T^{-1} psi)(a, b) = psi((a, -1)/sqrt(1+|a|^2), -b/sqrt(1+|a|^2)) on the
// nodes of a sinogram grid; psi is interpolated by p-point Lagrange in the
// sphere coordinates and cubic B-splines in t.
inline Sinogram transfer_from_sphere(const SphereSinogram& S, const UniformGrid& out,
                                     int p = 6) {
  const std::size_t m = S.m;
  require(out.dim() == m, "transfer_from_sphere: dimension mismatch");
  require(p >= 2 && p <= 16, "transfer_from_sphere: stencil size");
  Sinogram phi(out);
  std::vector<cplx> coef = S.values;
  parallel_for(S.nodes(), [&](std::size_t i) {
    prefilter_line(coef.data() + i * S.nt, S.nt, 1);
  });
  const std::size_t na = S.n_azimuth;
  const int pa = m == 3 ? std::min<int>(p, int(na)) : 1;
  std::size_t uncovered = 0;
  std::vector<char> miss(phi.rows(), 0);
  parallel_for(phi.rows(), [&](std::size_t r) {
    double a[16];
    phi.a_node(r, a);
    double s = std::sqrt(1 + norm2(a, m - 1));
    // theta = (a, -1)/s in polar coordinates
    double w, az = 0;
    if (m == 2) {
      w = std::atan2(a[0] / s, -1 / s);
    } else {
      w = std::acos(-1 / s);
      az = std::atan2(a[1], a[0]);
    }
    std::vector<detail::PolarTap> taps;
    if (!detail::polar_stencil(S, w, p, taps)) {
      miss[r] = 1;
      return;
    }
    // azimuth stencil (uniform periodic)
    auto az_taps = [&](double ang, std::vector<std::pair<std::size_t, double>>& out2) {
      out2.clear();
      if (m == 2) {
        out2.push_back({0, 1.0});
        return;
      }
      double h = 2 * pi / double(na);
      double u = ang / h;
      std::ptrdiff_t i0 = std::ptrdiff_t(std::floor(u)) - (pa - 1) / 2;
      double xs[16], ws[16];
      for (int q = 0; q < pa; ++q) xs[q] = double(i0 + q);
      detail::lagrange(xs, pa, u, ws);
      for (int q = 0; q < pa; ++q) {
        std::ptrdiff_t id = (i0 + q) % std::ptrdiff_t(na);
        if (id < 0) id += std::ptrdiff_t(na);
        out2.push_back({std::size_t(id), ws[q]});
      }
    };
    std::vector<std::pair<std::size_t, double>> at0, at1;
    az_taps(az, at0);
    az_taps(az + pi, at1);
    for (std::size_t j = 0; j < phi.nb(); ++j) {
      double b = out.node(m - 1, j);
      double u = (-b / s - S.t0) / S.dt;
      if (!(u >= 0 && u <= double(S.nt - 1))) continue;
      cplx v = 0;
      for (auto& tp : taps) {
        const auto& az_list = tp.flip ? at1 : at0;
        for (auto& [id, wa] : az_list) {
          std::size_t node = tp.ring * na + id;
          v += tp.w * wa *
               interp_line(coef.data() + node * S.nt, S.nt, 1, u, Interp::bspline);
        }
      }
      phi.row(r)[j] = v;
    }
  });
  for (auto c : miss) uncovered += c;
  if (uncovered)
    phi.warnings.push_back(std::to_string(uncovered) +
                           " a-rows fall into the excluded |theta_m| band");
  return phi;
}

// (R* psi)(x) = \int_{S^{m-1}} psi(theta, x.theta) dtheta.
inline ScalarField dual_sphere(const SphereSinogram& S, const UniformGrid& out) {
  require(out.dim() == S.m, "dual_sphere: dimension mismatch");
  RowSet R;
  R.m = S.m;
  R.nb = S.nt;
  for (std::size_t i = 0; i < S.nodes(); ++i)
    R.add(S.node(i), S.weight[i], S.t0, S.dt, S.row(i));
  R.prepare();
  return backproject_rows(R, out);
}

// ------------------------------------------------------------ Heisenberg

// Data on H_n indexed by (u_1..u_n, v_1..v_n, t), z = u + i v.
struct HeisenbergSinogram {
  UniformGrid grid;
  std::vector<cplx> values;

  HeisenbergSinogram() = default;
  explicit HeisenbergSinogram(UniformGrid g)
      : grid(std::move(g)), values(grid.size()) {}
  std::size_t n() const { return (grid.dim() - 1) / 2; }
  std::size_t nt() const { return grid.shape.back(); }
  std::size_t rows() const { return grid.size() / nt(); }
  void z_node(std::size_t row, double* uv) const {
    for (std::size_t k = grid.dim() - 1; k-- > 0;) {
      uv[k] = grid.node(k, row % grid.shape[k]);
      row /= grid.shape[k];
    }
  }
  cplx* row(std::size_t r) { return values.data() + r * nt(); }
  const cplx* row(std::size_t r) const { return values.data() + r * nt(); }
  // value at node (u index..., v index..., t index)
  cplx at(const std::vector<std::size_t>& idx) const {
    std::size_t f = 0;
    for (std::size_t k = 0; k < grid.dim(); ++k) f = f * grid.shape[k] + idx[k];
    return values[f];
  }
};

// u and v axes: nz nodes spanning [-Z, Z]; t axis: nt nodes at -T + j 2T/nt.
inline UniformGrid heisenberg_grid(std::size_t n, std::size_t nz, double Z,
                                   std::size_t nt, double T) {
  return sinogram_grid(2 * n + 1, nz, Z, nt, T);
}

// a = (-v, u)/2 of the point z = u + i v.
inline void heisenberg_a(const double* uv, std::size_t n, double* a) {
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = -0.5 * uv[n + k];
    a[n + k] = 0.5 * uv[k];
  }
}

// (R_H f)(u + i v, t) = \int f(xi, eta, t - (v.xi - u.eta)/2) dxi deta,
// each row evaluated as the transversal integral at a = (-v, u)/2.
inline HeisenbergSinogram radon_heisenberg(const ScalarField& f,
                                           const UniformGrid& out,
                                           RadonOptions opt = {}) {
  const std::size_t m = f.grid.dim();
  require(m % 2 == 1 && m >= 3, "radon_heisenberg: dimension must be odd (2n+1)");
  require(out.dim() == m, "radon_heisenberg: dimension mismatch");
  const std::size_t n = (m - 1) / 2;
  HeisenbergSinogram H(out);
  LineSampler L(f, opt);
  parallel_for(H.rows(), [&](std::size_t r) {
    double uv[16], a[16], c[16];
    H.z_node(r, uv);
    heisenberg_a(uv, n, a);
    for (std::size_t k = 0; k + 1 < m; ++k) c[k] = -a[k];
    c[m - 1] = 1;
    L.row(c, out.origin[m - 1], out.spacing[m - 1], H.nt(), H.row(r));
  });
  return H;
}

namespace detail {
inline void require_symmetric(const UniformGrid& g, std::size_t lo,
                              std::size_t hi, const char* what) {
  for (std::size_t k = lo; k < hi; ++k)
    require(std::abs(g.origin[k] + g.last(k)) <= 1e-12 * std::abs(g.origin[k]),
            std::string(what) + ": axes must be symmetric about 0");
}
}  // namespace detail

// (Q~ phi)(a, b) = phi(2 a_(2) - 2 i a_(1), b): relabels the (u, v, t)
// array on the (a, b) grid with a_(1) = -v/2, a_(2) = u/2. Exact (a pure
// permutation) for symmetric axes.
inline Sinogram q_tilde(const HeisenbergSinogram& H) {
  const std::size_t m = H.grid.dim(), n = H.n();
  detail::require_symmetric(H.grid, 0, m - 1, "q_tilde");
  std::vector<std::size_t> shape(m);
  std::vector<double> origin(m), step(m);
  for (std::size_t k = 0; k < n; ++k) {
    shape[k] = H.grid.shape[n + k];  // from v
    origin[k] = 0.5 * H.grid.origin[n + k];
    step[k] = 0.5 * H.grid.spacing[n + k];
    shape[n + k] = H.grid.shape[k];  // from u
    origin[n + k] = 0.5 * H.grid.origin[k];
    step[n + k] = 0.5 * H.grid.spacing[k];
  }
  shape[m - 1] = H.grid.shape[m - 1];
  origin[m - 1] = H.grid.origin[m - 1];
  step[m - 1] = H.grid.spacing[m - 1];
  Sinogram s(UniformGrid(shape, origin, step));
  for (std::size_t r = 0; r < s.rows(); ++r) {
    std::size_t ia[16], rest = r;
    for (std::size_t k = m - 1; k-- > 0;) {
      ia[k] = rest % shape[k];
      rest /= shape[k];
    }
    std::vector<std::size_t> src(m, 0);
    for (std::size_t k = 0; k < n; ++k) {
      src[n + k] = shape[k] - 1 - ia[k];  // v = -2 a_(1)
      src[k] = ia[n + k];                 // u = 2 a_(2)
    }
    std::size_t hr = 0;
    for (std::size_t k = 0; k + 1 < m; ++k) hr = hr * H.grid.shape[k] + src[k];
    std::copy(H.row(hr), H.row(hr) + H.nt(), s.row(r));
  }
  return s;
}

inline HeisenbergSinogram q_tilde_inverse(const Sinogram& s) {
  const std::size_t m = s.dim();
  require(m % 2 == 1 && m >= 3, "q_tilde_inverse: dimension must be odd");
  detail::require_symmetric(s.grid, 0, m - 1, "q_tilde_inverse");
  const std::size_t n = (m - 1) / 2;
  std::vector<std::size_t> shape(m);
  std::vector<double> origin(m), step(m);
  for (std::size_t k = 0; k < n; ++k) {
    shape[k] = s.grid.shape[n + k];
    origin[k] = 2 * s.grid.origin[n + k];
    step[k] = 2 * s.grid.spacing[n + k];
    shape[n + k] = s.grid.shape[k];
    origin[n + k] = 2 * s.grid.origin[k];
    step[n + k] = 2 * s.grid.spacing[k];
  }
  shape[m - 1] = s.nb();
  origin[m - 1] = s.b0();
  step[m - 1] = s.db();
  HeisenbergSinogram H(UniformGrid(shape, origin, step));
  for (std::size_t r = 0; r < s.rows(); ++r) {
    std::size_t ia[16], rest = r;
    for (std::size_t k = m - 1; k-- > 0;) {
      ia[k] = rest % s.grid.shape[k];
      rest /= s.grid.shape[k];
    }
    std::vector<std::size_t> dst(m, 0);
    for (std::size_t k = 0; k < n; ++k) {
      dst[n + k] = s.grid.shape[k] - 1 - ia[k];
      dst[k] = ia[n + k];
    }
    std::size_t hr = 0;
    for (std::size_t k = 0; k + 1 < m; ++k) hr = hr * shape[k] + dst[k];
    std::copy(s.row(r), s.row(r) + s.nb(), H.row(hr));
  }
  return H;
}

// Q^{-1} *R_T Q~ phi. Q identifies f(xi + i eta, tau) with f(x) on R^{2n+1}
// (an identity on arrays), so the output grid is read as (xi, eta, tau).
inline ScalarField dual_heisenberg(const HeisenbergSinogram& phi,
                                   const UniformGrid& out) {
  return dual_transversal(q_tilde(phi), out);
}

// (*R_H phi)(zeta, tau) = \int phi(z, tau - Im(zeta . conj z)/2) d~z,
// d~z = 2 dz/(4+|z|^2)^{n+1/2}, trapezoid over the (u, v) nodes.
inline ScalarField dual_heisenberg_direct(const HeisenbergSinogram& phi,
                                          const UniformGrid& out) {
  const std::size_t m = phi.grid.dim(), n = phi.n();
  require(out.dim() == m, "dual_heisenberg: dimension mismatch");
  RowSet R;
  R.m = m;
  R.nb = phi.nt();
  for (std::size_t r = 0; r < phi.rows(); ++r) {
    double uv[16], c[16];
    phi.z_node(r, uv);
    double z2 = norm2(uv, m - 1);
    double w = 2 / std::pow(4 + z2, double(n) + 0.5);
    std::size_t rest = r;
    for (std::size_t k = m - 1; k-- > 0;) {
      w *= detail::trap_weight(phi.grid, k, rest % phi.grid.shape[k]);
      rest /= phi.grid.shape[k];
    }
    // tau - (eta.u - xi.v)/2  =  c . (xi, eta, tau)
    for (std::size_t k = 0; k < n; ++k) {
      c[k] = 0.5 * uv[n + k];
      c[n + k] = -0.5 * uv[k];
    }
    c[m - 1] = 1;
    R.add(c, w, phi.grid.origin[m - 1], phi.grid.spacing[m - 1], phi.row(r));
  }
  R.prepare();
  return backproject_rows(R, out);
}

}  // namespace transradon
