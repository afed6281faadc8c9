#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "transradon/xform.hpp"

using namespace transradon;

namespace {

// (R_T e^{-|x|^2})(a, b) = pi^{(m-1)/2} (1+|a|^2)^{-1/2} e^{-b^2/(1+|a|^2)}
double gauss_rt(std::size_t m, const double* a, double b) {
  double s2 = 1 + norm2(a, m - 1);
  return std::pow(pi, (m - 1) / 2.0) / std::sqrt(s2) * std::exp(-b * b / s2);
}

double sino_err(const Sinogram& s) {
  double err = 0, mx = 0;
  for (std::size_t r = 0; r < s.rows(); ++r) {
    double a[16];
    s.a_node(r, a);
    for (std::size_t j = 0; j < s.nb(); ++j) {
      double ref = gauss_rt(s.dim(), a, s.grid.node(s.dim() - 1, j));
      err = std::max(err, std::abs(s.row(r)[j] - ref));
      mx = std::max(mx, ref);
    }
  }
  return err / mx;
}

}  // namespace

TEST(Radon, GaussianOracleM2) {
  auto g = UniformGrid::centered(2, 256, 8);
  auto f = gaussian_phantom(g, {}, 1);
  auto t0 = std::chrono::steady_clock::now();
  auto s = radon_transversal(f, sinogram_grid(2, 257, 8, 256, 8));
  double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LE(sino_err(s), 1e-4);
  EXPECT_LE(sec, 30.0);
  EXPECT_TRUE(s.warnings.empty());
  EXPECT_DOUBLE_EQ(s.a_extent(), 8.0);
}

TEST(Radon, GaussianOracleM3) {
  auto g = UniformGrid::centered(3, 48, 6);
  auto f = gaussian_phantom(g, {}, 1);
  auto s = radon_transversal(f, sinogram_grid(3, 9, 2, 64, 8));
  EXPECT_LE(sino_err(s), 1e-4);
}

TEST(Radon, ZeroDirectionIsRowQuadrature) {
  auto g = UniformGrid::centered(2, 128, 8);
  auto f = gaussian_phantom(g, {0.3, -0.2}, 1.3);
  auto s = radon_transversal(f, sinogram_grid(2, 3, 1, 128, 8));
  // middle a-row is a = 0; b nodes coincide with x_2 nodes
  double worst = 0;
  for (std::size_t j = 0; j < 128; ++j) {
    cplx ref = 0;
    for (std::size_t i = 0; i < 128; ++i)
      ref += f.values[i * 128 + j] * ((i == 0 || i == 127) ? 0.5 : 1.0) * g.spacing[0];
    worst = std::max(worst, std::abs(s.row(1)[j] - ref));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Radon, ShiftCovariance) {
  auto g = UniformGrid::centered(2, 128, 8);
  // f_x(y) = f(x + y) with x = (1, 0.5): the Gaussian centered at -x
  auto f = gaussian_phantom(g, {0.2, 0}, 1);
  auto fx = gaussian_phantom(g, {-0.8, -0.5}, 1);
  // a-nodes are multiples of the b-step, so b - a.x' + x_m stays on nodes
  auto G = sinogram_grid(2, 33, 2, 256, 8);  // da = 1/8, db = 1/16
  auto s = radon_transversal(f, G), sx = radon_transversal(fx, G);
  double worst = 0, mx = 0;
  for (std::size_t r = 0; r < s.rows(); ++r) {
    double a;
    s.a_node(r, &a);
    long shift = std::lround((-a * 1.0 + 0.5) / s.db());
    for (long j = 0; j < long(s.nb()); ++j) {
      long k = j + shift;
      if (k < 0 || k >= long(s.nb())) continue;
      worst = std::max(worst, std::abs(sx.row(r)[j] - s.row(r)[k]));
      mx = std::max(mx, std::abs(s.row(r)[k]));
    }
  }
  EXPECT_LE(worst, 1e-10 * mx);
}

TEST(Radon, LinearityAndRealness) {
  auto g = UniformGrid::centered(2, 64, 6);
  auto f = gaussian_phantom(g, {0.5, 0}, 1);
  auto h = gaussian_phantom(g, {-1, 1}, 0.8);
  cplx al(0.7, -0.3), be(-1.1, 0.4);
  ScalarField c(g);
  for (std::size_t i = 0; i < g.size(); ++i) c.values[i] = al * f.values[i] + be * h.values[i];
  auto G = sinogram_grid(2, 21, 3, 96, 9);
  auto sf = radon_transversal(f, G), sh = radon_transversal(h, G), sc = radon_transversal(c, G);
  std::vector<cplx> lin(sf.values.size());
  for (std::size_t i = 0; i < lin.size(); ++i) lin[i] = al * sf.values[i] + be * sh.values[i];
  EXPECT_LE(rel_l2(sc.values, lin), 1e-12);
  double im = 0;
  for (auto v : sf.values) im = std::max(im, std::abs(v.imag()));
  EXPECT_EQ(im, 0.0);
}

TEST(Radon, BoundaryWarning) {
  auto g = UniformGrid::centered(2, 32, 2);
  auto f = gaussian_phantom(g, {}, 1);
  auto s = radon_transversal(f, sinogram_grid(2, 5, 1, 32, 4));
  EXPECT_FALSE(s.warnings.empty());
  EXPECT_THROW(radon_transversal(f, sinogram_grid(3, 5, 1, 32, 4)), Error);
}

TEST(Heisenberg, GaussianOracleAndIdentification) {
  auto g = UniformGrid::centered(3, 48, 6);
  auto f = gaussian_phantom(g, {}, 1);
  auto HG = heisenberg_grid(1, 9, 4, 64, 8);
  auto H = radon_heisenberg(f, HG);
  // a = (-v, u)/2, b = t
  double err = 0, mx = 0;
  for (std::size_t r = 0; r < H.rows(); ++r) {
    double uv[2], a[2];
    H.z_node(r, uv);
    heisenberg_a(uv, 1, a);
    for (std::size_t j = 0; j < H.nt(); ++j) {
      double ref = gauss_rt(3, a, HG.node(2, j));
      err = std::max(err, std::abs(H.row(r)[j] - ref));
      mx = std::max(mx, ref);
    }
  }
  EXPECT_LE(err / mx, 1e-4);
  // Q~ R_H f = R_T Q f as arrays
  Sinogram lhs = q_tilde(H);
  Sinogram rhs = radon_transversal(f, lhs.grid);
  EXPECT_LE(rel_max(lhs.values, rhs.values), 1e-12);
  // round trip of the relabeling
  auto back = q_tilde_inverse(lhs);
  EXPECT_EQ(back.values, H.values);
  EXPECT_THROW(radon_heisenberg(gaussian_phantom(UniformGrid::centered(2, 16, 4), {}, 1),
                                sinogram_grid(2, 3, 1, 16, 4)),
               Error);
}

TEST(Heisenberg, ZeroPointIsPlaneIntegral) {
  auto g = UniformGrid::centered(3, 32, 5);
  auto f = gaussian_phantom(g, {0.4, -0.3, 0.2}, 1.1);
  auto H = radon_heisenberg(f, heisenberg_grid(1, 5, 2, 32, 5));
  // center row is z = 0; t nodes coincide with tau nodes
  std::size_t r0 = 2 * 5 + 2;
  double worst = 0;
  for (std::size_t k = 0; k < 32; ++k) {
    cplx ref = 0;
    for (std::size_t i = 0; i < 32; ++i)
      for (std::size_t j = 0; j < 32; ++j) {
        double w = g.spacing[0] * g.spacing[1];
        if (i == 0 || i == 31) w *= 0.5;
        if (j == 0 || j == 31) w *= 0.5;
        ref += w * f.values[(i * 32 + j) * 32 + k];
      }
    worst = std::max(worst, std::abs(H.row(r0)[k] - ref));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Heisenberg, DualIdentificationAndDirectQuadrature) {
  auto HG = heisenberg_grid(1, 17, 4, 64, 8);
  HeisenbergSinogram phi(HG);
  for (std::size_t r = 0; r < phi.rows(); ++r) {
    double uv[2];
    phi.z_node(r, uv);
    for (std::size_t j = 0; j < phi.nt(); ++j) {
      double t = HG.node(2, j);
      phi.row(r)[j] = std::exp(-0.25 * (uv[0] * uv[0] + uv[1] * uv[1]) - t * t + 0.3 * uv[0]);
    }
  }
  auto out = UniformGrid::centered(3, 16, 3);
  auto a = dual_heisenberg(phi, out);
  auto b = dual_heisenberg_direct(phi, out);
  EXPECT_LE(rel_max(a.values, b.values), 1e-12);
  HeisenbergSinogram zero(HG);
  for (auto v : dual_heisenberg(zero, out).values) EXPECT_EQ(v, cplx(0));
}

TEST(Dual, DualityRelationAndRefinement) {
  auto mismatch = [](std::size_t n, std::size_t na) {
    auto g = UniformGrid::centered(2, n, 6);
    auto f = gaussian_phantom(g, {0.3, -0.2}, 1);
    auto G = sinogram_grid(2, na, 6, 2 * n, 12);
    auto Rf = radon_transversal(f, G);
    Sinogram phi(G);
    for (std::size_t r = 0; r < phi.rows(); ++r) {
      double a;
      phi.a_node(r, &a);
      for (std::size_t j = 0; j < phi.nb(); ++j) {
        double b = G.node(1, j);
        phi.row(r)[j] = std::exp(-a * a - (b - 0.2) * (b - 0.2));
      }
    }
    // <R_T f, phi> with d~a db
    ScalarField prod(G);
    for (std::size_t i = 0; i < G.size(); ++i) prod.values[i] = Rf.values[i] * phi.values[i];
    cplx lhs = integrate(prod, [](const double* x) { return 1.0 / (1 + x[0] * x[0]); });
    auto d = dual_transversal(phi, g);
    ScalarField fd(g);
    for (std::size_t i = 0; i < g.size(); ++i) fd.values[i] = f.values[i] * d.values[i];
    cplx rhs = integrate(fd);
    return std::abs(lhs - rhs) / std::abs(lhs);
  };
  double coarse = mismatch(48, 97), fine = mismatch(96, 193), finest = mismatch(192, 385);
  EXPECT_LE(finest, 1e-6);
  EXPECT_GE(coarse / fine, 4.0);
  Sinogram zero(sinogram_grid(2, 9, 2, 16, 4));
  for (auto v : dual_transversal(zero, UniformGrid::centered(2, 8, 2)).values)
    EXPECT_EQ(v, cplx(0));
}

TEST(Dual, RieszIdentityAtOriginOnRays) {
  // *R_T (sqrt(1+|a|^2) R_T f)(0) = 2 pi (I^1 f)(0) = 2 pi sqrt(pi)/2, m = 2
  auto g = UniformGrid::centered(2, 256, 8);
  auto f = gaussian_phantom(g, {}, 1);
  auto R = radon_rays(f, ray_geometry(2, 96, 0, 8, 256));
  for (std::size_t i = 0; i < R.rays(); ++i)
    for (std::size_t j = 0; j < R.nt; ++j) R.row(i)[j] *= R.scale(i);
  double x[2] = {0, 0};
  cplx lhs = dual_transversal_at(R, x);
  double rhs = 2 * pi * std::sqrt(pi) / 2;
  EXPECT_LE(std::abs(lhs - rhs) / rhs, 1e-3);
}

TEST(Backprojection, EqualsTransversalOfSinogram) {
  // (R~_T g)(x) = (R_T g)(-x', x_m) with the sinogram read as a field
  auto G = sinogram_grid(2, 65, 4, 128, 8);
  Sinogram g(G);
  for (std::size_t r = 0; r < g.rows(); ++r) {
    double a;
    g.a_node(r, &a);
    for (std::size_t j = 0; j < g.nb(); ++j) {
      double b = G.node(1, j);
      g.row(r)[j] = std::exp(-a * a - b * b) * cplx(1, 0.5 * a);
    }
  }
  auto out = UniformGrid::centered(2, 32, 2);
  auto bp = backprojection(g, out);
  // hyperplane parameters (-x', x_m): a-grid = reversed x' grid
  UniformGrid hp({32, 32}, {-out.last(0), out.origin[1]}, out.spacing);
  RadonOptions plain;
  plain.oversample = 1;
  // keep the interpolation on the b axis: |x'| <= 2 forces the free axis
  // to be b only when |x'| <= 1, so compare on that band
  auto rt = radon_transversal(g.as_field(), hp, plain);
  double worst = 0, mx = 0;
  for (std::size_t i = 0; i < 32; ++i) {
    if (std::abs(out.node(0, i)) > 1) continue;
    for (std::size_t j = 0; j < 32; ++j) {
      cplx l = bp.values[i * 32 + j], r = rt.values[(31 - i) * 32 + j];
      worst = std::max(worst, std::abs(l - r));
      mx = std::max(mx, std::abs(l));
    }
  }
  EXPECT_LE(worst, 1e-12 * mx);
  Sinogram zero(G);
  for (auto v : backprojection(zero, out).values) EXPECT_EQ(v, cplx(0));
}

TEST(Sphere, GeometryWeights) {
  for (std::size_t m : {2u, 3u}) {
    auto S = sphere_geometry(m, 64, 32, 4, 16);
    double sum = 0;
    for (std::size_t i = 0; i < S.nodes(); ++i) {
      sum += S.weight[i];
      EXPECT_NEAR(std::sqrt(norm2(S.node(i), m)), 1.0, 1e-14);
    }
    EXPECT_NEAR(sum / sphere_area(int(m) - 1), 1.0, 1e-10);
  }
  auto S = sphere_geometry(3, 32, 16, 4, 16, 0.05);
  for (std::size_t i = 0; i < S.nodes(); ++i) EXPECT_GE(std::abs(S.node(i)[2]), 0.05);
}

TEST(Sphere, ClassicalRadonAndTransference) {
  auto g = UniformGrid::centered(2, 256, 8);
  auto f = gaussian_phantom(g, {}, 1);
  auto S = radon_classical(f, sphere_geometry(2, 256, 0, 6, 192, 0.05));
  double err = 0;
  for (std::size_t i = 0; i < S.nodes(); ++i)
    for (std::size_t j = 0; j < S.nt; ++j)
      err = std::max(err, std::abs(S.row(i)[j] - std::sqrt(pi) * std::exp(-S.t(j) * S.t(j))));
  EXPECT_LE(err / std::sqrt(pi), 1e-4);
  // evenness on antipodal pairs: node i and i + n/2 (same band exclusions)
  double odd = 0;
  auto Rt = radon_transversal(f, sinogram_grid(2, 257, 8, 768, 24));
  auto T = transfer_to_sphere(Rt, sphere_geometry(2, 256, 0, 6, 192, 0.05));
  std::size_t half = T.nodes() / 2;
  for (std::size_t i = 0; i < half; ++i)
    for (std::size_t j = 1; j < T.nt; ++j)
      odd = std::max(odd, std::abs(T.row(i)[j] - T.row(i + half)[T.nt - j]));
  EXPECT_LE(odd, 1e-10);
  // (Rf)(theta, t) = |theta_m|^{-1} (T R_T f)(theta, t) on covered samples
  double e45 = 0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < T.nodes(); ++i)
    for (std::size_t j = 0; j < T.nt; ++j) {
      if (!T.covered[i * T.nt + j]) continue;
      ++used;
      cplx l = T.row(i)[j] / std::abs(T.node(i)[1]);
      e45 = std::max(e45, std::abs(l - S.row(i)[j]));
    }
  EXPECT_GT(used, T.nodes() * T.nt / 2);
  EXPECT_LE(e45 / std::sqrt(pi), 1e-4);
  // R_T f = (1+|a|^2)^{-1/2} T^{-1} R f
  auto G = sinogram_grid(2, 65, 4, 256, 8);
  auto back = transfer_from_sphere(S, G);
  auto direct = radon_transversal(f, G);
  for (std::size_t r = 0; r < back.rows(); ++r) {
    double a;
    back.a_node(r, &a);
    for (std::size_t j = 0; j < back.nb(); ++j) back.row(r)[j] /= std::sqrt(1 + a * a);
  }
  EXPECT_LE(rel_max(back.values, direct.values), 1e-6);
  EXPECT_THROW(transfer_to_sphere(Rt, sphere_geometry(2, 256, 0, 6, 192, 0.0)), Error);
}

TEST(Sphere, TransferRoundTrip) {
  for (std::size_t m : {2u, 3u}) {
    auto G = m == 2 ? sinogram_grid(2, 129, 4, 128, 4) : sinogram_grid(3, 65, 4, 64, 4);
    Sinogram phi(G);
    for (std::size_t r = 0; r < phi.rows(); ++r) {
      double a[2];
      phi.a_node(r, a);
      for (std::size_t j = 0; j < phi.nb(); ++j) {
        double b = G.node(m - 1, j);
        phi.row(r)[j] = std::exp(-norm2(a, m - 1) - b * b + 0.5 * a[0]);
      }
    }
    auto S = m == 2 ? sphere_geometry(2, 2048, 0, 4, 256, 0.05)
                    : sphere_geometry(3, 256, 256, 4, 256, 0.05);
    auto T = transfer_to_sphere(phi, S);
    auto back = transfer_from_sphere(T, G);
    // interior a-nodes (|a| <= 2), interior b
    double worst = 0, mx = 0;
    for (std::size_t r = 0; r < phi.rows(); ++r) {
      double a[2];
      phi.a_node(r, a);
      if (std::sqrt(norm2(a, m - 1)) > 2) continue;
      for (std::size_t j = 0; j < phi.nb(); ++j) {
        if (std::abs(G.node(m - 1, j)) > 2) continue;
        worst = std::max(worst, std::abs(back.row(r)[j] - phi.row(r)[j]));
        mx = std::max(mx, std::abs(phi.row(r)[j]));
      }
    }
    EXPECT_LE(worst / mx, 1e-6) << "m=" << m;
  }
}

TEST(Sphere, CatalanReduction) {
  for (std::size_t m : {2u, 3u}) {
    auto S = sphere_geometry(m, m == 2 ? 512 : 64, 64, 8, 512);
    for (std::size_t i = 0; i < S.nodes(); ++i)
      for (std::size_t j = 0; j < S.nt; ++j) S.row(i)[j] = std::exp(-S.t(j) * S.t(j));
    auto out = UniformGrid::centered(m, m == 2 ? 32 : 12, 3);
    auto d = dual_sphere(S, out);
    double worst = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      double x[3];
      out.coords(i, x);
      double r = std::sqrt(norm2(x, m));
      double ref = m == 2 ? 2 * pi * std::exp(-r * r / 2) * std::cyl_bessel_i(0.0, r * r / 2)
                 : r > 0    ? 2 * pi * std::sqrt(pi) * std::erf(r) / r
                            : 4 * pi;
      worst = std::max(worst, std::abs(d.values[i] - ref) / ref);
    }
    EXPECT_LE(worst, 1e-6) << "m=" << m;
  }
}

TEST(Sphere, DualRelations) {
  // psi even, concentrated near the poles so T^{-1} psi decays in a
  auto S = sphere_geometry(2, 2048, 0, 8, 512, 0.05);
  for (std::size_t i = 0; i < S.nodes(); ++i) {
    double tm = S.node(i)[1], tp = S.node(i)[0];
    for (std::size_t j = 0; j < S.nt; ++j) {
      double t = S.t(j);
      S.row(i)[j] = std::exp(-50 * (1 - tm * tm) - t * t) * (1 + 0.3 * tp * t);
    }
  }
  auto out = UniformGrid::centered(2, 32, 2);
  auto lhs = dual_sphere(S, out);
  auto G = sinogram_grid(2, 641, 8, 512, 16);
  auto Ti = transfer_from_sphere(S, G);
  auto rhs = dual_transversal(Ti, out);
  for (auto& v : rhs.values) v *= 2.0;
  EXPECT_LE(rel_max(rhs.values, lhs.values), 1e-5);

  // *R_T phi = R*(T phi) / 2
  auto G2 = sinogram_grid(2, 513, 8, 512, 8);
  Sinogram phi(G2);
  for (std::size_t r = 0; r < phi.rows(); ++r) {
    double a;
    phi.a_node(r, &a);
    for (std::size_t j = 0; j < phi.nb(); ++j) {
      double b = G2.node(1, j);
      phi.row(r)[j] = std::exp(-a * a - b * b);
    }
  }
  auto d1 = dual_transversal(phi, out);
  auto T = transfer_to_sphere(phi, sphere_geometry(2, 2048, 0, 8, 512, 0.05));
  auto d2 = dual_sphere(T, out);
  for (auto& v : d2.values) v *= 0.5;
  EXPECT_LE(rel_max(d1.values, d2.values), 1e-5);
}
