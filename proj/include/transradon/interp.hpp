#pragma once
// 1-D cubic interpolation kernels on uniform samples.
//
// Keys (Catmull-Rom) interpolates the samples directly. The cubic B-spline
// path needs coefficients from prefilter() first and is markedly more
// accurate for smooth data (error ~h^4 with a small constant).

#include <cmath>
#include <cstddef>
#include <vector>

#include "core.hpp"

namespace transradon {

enum class Interp { linear, catmull_rom, bspline, trigonometric };

inline const char* interp_name(Interp k) {
  switch (k) {
    case Interp::linear: return "linear";
    case Interp::catmull_rom: return "catmull_rom";
    case Interp::bspline: return "bspline";
    case Interp::trigonometric: return "trigonometric";
  }
  return "?";
}

// Weights for taps i-1, i, i+1, i+2 at fractional offset t in [0,1).
inline void keys_weights(double t, double w[4]) {
  double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2 * t2 - t);
  w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
  w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

inline void bspline_weights(double t, double w[4]) {
  double s = 1 - t;
  w[0] = s * s * s / 6;
  w[3] = t * t * t / 6;
  w[1] = 2.0 / 3 - t * t * (1 - t / 2);
  w[2] = 1 - w[0] - w[1] - w[3];
}

inline void linear_weights(double t, double w[4]) {
  w[0] = 0;
  w[1] = 1 - t;
  w[2] = t;
  w[3] = 0;
}

inline void cubic_weights(Interp k, double t, double w[4]) {
  switch (k) {
    case Interp::bspline: bspline_weights(t, w); break;
    case Interp::linear: linear_weights(t, w); break;
    default: keys_weights(t, w); break;
  }
}

inline std::ptrdiff_t mirror_index(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (n == 1) return 0;
  std::ptrdiff_t p = 2 * (n - 1);
  i %= p;
  if (i < 0) i += p;
  return i < n ? i : p - i;
}

// In-place conversion of n samples (stride s) to cubic B-spline
// coefficients, mirror boundary conditions.
template <class T>
void prefilter_line(T* d, std::size_t n, std::size_t s) {
  if (n < 2) return;
  const double z = std::sqrt(3.0) - 2;
  for (std::size_t i = 0; i < n; ++i) d[i * s] *= 6.0;
  // causal initialization, truncated mirror sum
  std::size_t horizon = std::min<std::size_t>(n, 40);
  T sum = d[0];
  double zk = z;
  for (std::size_t k = 1; k < horizon; ++k) {
    sum += zk * d[k * s];
    zk *= z;
  }
  d[0] = sum;
  for (std::size_t k = 1; k < n; ++k) d[k * s] += z * d[(k - 1) * s];
  d[(n - 1) * s] = (z / (z * z - 1)) * (d[(n - 1) * s] + z * d[(n - 2) * s]);
  for (std::size_t k = n - 1; k-- > 0;)
    d[k * s] = z * (d[(k + 1) * s] - d[k * s]);
}

// Prefilters a row-major array of the given shape along one axis.
template <class T>
void prefilter_axis(std::vector<T>& v, const std::vector<std::size_t>& shape,
                    std::size_t axis) {
  std::size_t inner = 1, outer = 1;
  for (std::size_t k = axis + 1; k < shape.size(); ++k) inner *= shape[k];
  for (std::size_t k = 0; k < axis; ++k) outer *= shape[k];
  std::size_t n = shape[axis];
  parallel_for(outer * inner, [&](std::size_t idx) {
    std::size_t o = idx / inner, i = idx % inner;
    prefilter_line(v.data() + o * n * inner + i, n, inner);
  });
}

// Evaluates the interpolant of a strided line at index-space position u.
// Positions outside [0, n-1] return zero.
template <class T>
T interp_line(const T* d, std::size_t n, std::size_t s, double u, Interp k) {
  if (!(u >= 0 && u <= double(n - 1))) return T{};
  std::ptrdiff_t i = std::ptrdiff_t(std::floor(u));
  if (i >= std::ptrdiff_t(n) - 1) i = std::ptrdiff_t(n) - 2;
  double t = u - double(i);
  double w[4];
  cubic_weights(k, t, w);
  T r{};
  const std::ptrdiff_t nn = std::ptrdiff_t(n);
  if (i >= 1 && i + 2 < nn) {
    const T* p = d + (i - 1) * s;
    r = w[0] * p[0] + w[1] * p[s] + w[2] * p[2 * s] + w[3] * p[3 * s];
  } else {
    for (int j = 0; j < 4; ++j) {
      std::ptrdiff_t q = i - 1 + j;
      if (k == Interp::bspline)
        q = mirror_index(q, nn);
      else if (q < 0 || q >= nn)
        continue;
      r += w[j] * d[q * s];
    }
  }
  return r;
}

}  // namespace transradon
