#include <gtest/gtest.h>

#include "transradon/slice.hpp"

using namespace transradon;

namespace {

const UniformGrid& grid2() {
  static const UniformGrid g = UniformGrid::centered(2, 256, 8);
  return g;
}

// |y_m| at a spectral node.
double ym_of(const SpectralField& F, std::size_t i) {
  double y[16];
  F.grid.coords(i, y);
  return std::abs(y[F.dim() - 1]);
}

PhiWindow window3() { return PhiWindow{0.6, 5.4, 0.5, 4, 16}; }

}  // namespace

TEST(Mixing, GaussianOracle) {
  auto U = fourier_forward(gaussian_phantom(grid2(), {}, 1));
  MixingConfig c;
  c.radius = 30;
  auto sino = sinogram_grid(2, 129, 4, 256, 8);
  auto V = mixing_apply(U, sino, c);
  double err = 0, mx = 0;
  for (std::size_t i = 0; i < V.field.values.size(); ++i) {
    if (!V.covered[i]) continue;
    double c2[2];
    V.field.grid.coords(i, c2);
    double ref = pi * std::exp(-(1 + c2[0] * c2[0]) * c2[1] * c2[1] / 4);
    err = std::max(err, std::abs(V.field.values[i] - ref));
    mx = std::max(mx, ref);
  }
  EXPECT_LE(err / mx, 1e-6);
  // xi = 0 column is u(0) for every a
  const std::size_t nxi = 256, j0 = 128;
  EXPECT_NEAR(V.field.grid.node(1, j0), 0.0, 1e-14);
  for (std::size_t r = 0; r < 129; ++r)
    EXPECT_NEAR(std::abs(V.field.values[r * nxi + j0] - pi), 0.0, 1e-10);
  // linearity
  SpectralField U2 = U;
  cplx al(0.4, -1.3);
  for (auto& v : U2.values) v *= al;
  auto V2 = mixing_apply(U2, sino, c);
  std::vector<cplx> scaled = V.field.values;
  for (auto& v : scaled) v *= al;
  EXPECT_LE(rel_l2(V2.field.values, scaled), 1e-12);
}

TEST(Mixing, CoveragePolicy) {
  auto U = fourier_forward(gaussian_phantom(grid2(), {}, 1));
  // |a| up to 8 and the full xi range reach far beyond the spectrum
  EXPECT_THROW(mixing_apply(U, sinogram_grid(2, 65, 8, 256, 8)), Error);
  auto V = mixing_apply(U, sinogram_grid(2, 65, 8, 256, 8), {}, false);
  EXPECT_GT(V.uncovered, 0u);
  for (std::size_t i = 0; i < V.covered.size(); ++i)
    if (!V.covered[i]) {
      EXPECT_EQ(V.field.values[i], cplx(0));
    }
  MixingConfig bad;
  bad.order = 5;
  auto phi = fourier_b(radon_transversal(ScalarField(grid2()),
                                         sinogram_grid(2, 33, 8, 256, 8)));
  EXPECT_THROW(mixing_invert(phi, grid2(), bad), Error);
  MixingConfig thin;
  thin.delta = 0.1;  // below one dual cell
  EXPECT_THROW(mixing_invert(phi, grid2(), thin), Error);
  // xi axis must match the output y_m axis
  EXPECT_THROW(mixing_invert(phi, UniformGrid::centered(2, 128, 8)), Error);
}

TEST(Mixing, InverseRoundTripAndZero) {
  auto U = fourier_forward(gaussian_phantom(grid2(), {}, 1));
  MixingConfig c;
  c.radius = 30;
  auto V = mixing_apply(U, sinogram_grid(2, 513, 8, 256, 8), c);
  auto W = mixing_invert(V.field, grid2(), c);
  double err = 0, mx = 0;
  for (std::size_t i = 0; i < U.values.size(); ++i) {
    mx = std::max(mx, std::abs(U.values[i]));
    if (!W.covered[i]) continue;
    EXPECT_GT(ym_of(W.field, i), W.delta);
    err = std::max(err, std::abs(W.field.values[i] - U.values[i]));
  }
  EXPECT_LE(err / mx, 1e-5);
  for (std::size_t i = 0; i < U.values.size(); ++i)
    if (ym_of(W.field, i) <= W.delta) {
      EXPECT_EQ(W.field.values[i], cplx(0));
    }
  SpectralField Z = V.field;
  for (auto& v : Z.values) v = 0;
  auto Wz = mixing_invert(Z, grid2(), c);
  for (auto& v : Wz.field.values) EXPECT_EQ(v, cplx(0));
}

TEST(Mixing, PhiSliceDataVanishIntoSlab) {
  auto f = phi_space_phantom(grid2(), PhiWindow{}, 3);
  auto phi = radon_transversal(f, sinogram_grid(2, 257, 8, 256, 8));
  auto W = mixing_invert(fourier_b(phi), grid2());
  double dy = W.field.grid.spacing[1], edge = 0, mx = 0;
  for (std::size_t i = 0; i < W.field.values.size(); ++i) {
    double v = std::abs(W.field.values[i]);
    mx = std::max(mx, v);
    if (ym_of(W.field, i) <= W.delta + 1.5 * dy) edge = std::max(edge, v);
  }
  EXPECT_LE(edge, 1e-8 * mx);
}

TEST(Slice, GaussianM2AndRefinement) {
  auto f = gaussian_phantom(grid2(), {}, 1);
  // rows widen like sqrt(1+a^2); the b window must hold them
  auto phi = radon_transversal(f, sinogram_grid(2, 129, 4, 768, 24));
  auto r = slice_residual(f, phi);
  EXPECT_LE(r.max_rel, 1e-4);
  EXPECT_GT(r.compared, 10000u);
  double prev = 0;
  for (std::size_t n : {48, 96}) {
    auto g = UniformGrid::centered(2, n, 8);
    auto fg = gaussian_phantom(g, {}, 1);
    auto s = slice_residual(fg, radon_transversal(fg, sinogram_grid(2, 129, 4, 768, 24)));
    if (prev > 0) {
      EXPECT_LE(s.max_rel, prev / 4);
    }
    prev = s.max_rel;
  }
  ScalarField z(grid2());
  auto rz = slice_residual(z, radon_transversal(z, sinogram_grid(2, 33, 4, 256, 8)));
  EXPECT_EQ(rz.max_rel, 0.0);
}

TEST(Slice, GaussianM3) {
  auto g = UniformGrid::centered(3, 96, 8);
  auto f = gaussian_phantom(g, {}, 1);
  auto r = slice_residual(f, radon_transversal(f, sinogram_grid(3, 17, 2, 144, 12)));
  EXPECT_LE(r.max_rel, 1e-3);
}

TEST(FourierInversion, PhiPhantomM2) {
  auto f = phi_space_phantom(grid2(), PhiWindow{}, 5);
  auto phi = radon_transversal(f, sinogram_grid(2, 257, 8, 256, 8));
  auto r = invert_fourier(phi, grid2());
  EXPECT_LE(rel_l2(r.f.values, f.values), 1e-3);
  EXPECT_LE(r.slab_fraction, 1e-15);
  auto z = invert_fourier(Sinogram(phi.grid), grid2());
  for (auto& v : z.f.values) EXPECT_EQ(v, cplx(0));
}

TEST(FourierInversion, GaussianLosesExactlyTheSlab) {
  // wide window: Gaussian rows at |a| = 8 spread over sqrt(65) in b
  auto g = UniformGrid::centered(2, 512, 32);
  auto f = gaussian_phantom(g, {}, 1);
  auto phi = radon_transversal(f, sinogram_grid(2, 257, 8, 512, 32));
  MixingConfig c;
  c.delta = 0.8;
  auto r = invert_fourier(phi, g, c);
  EXPECT_GT(rel_l2(r.f.values, f.values), 0.05);
  EXPECT_GT(r.slab_fraction, 0.01);
  // re-add the slab content of F f
  auto F = fourier_forward(f);
  for (std::size_t i = 0; i < F.values.size(); ++i)
    if (ym_of(F, i) > c.delta) F.values[i] = 0;
  auto slab = fourier_inverse(F);
  std::vector<cplx> sum(f.values.size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = r.f.values[i] + slab.values[i];
  EXPECT_LE(rel_l2(sum, f.values), 1e-3);
  // bookkeeping: the kept and the zeroed energy add up to the unzeroed total
  MixingConfig keep = c;
  keep.keep_slab = true;
  auto full = invert_fourier(phi, g, keep);
  EXPECT_NEAR((r.kept_energy + r.slab_energy) / full.kept_energy, 1.0, 1e-10);
  double xs = std::pow(l2_norm(r.f.values, g.cell()), 2);
  EXPECT_NEAR(xs / r.kept_energy, 1.0, 1e-10);
}

TEST(FourierInversion, PhiPhantomM3) {
  auto g = UniformGrid::centered(3, 64, 8);
  auto f = phi_space_phantom(g, window3(), 1);
  auto phi = radon_transversal(f, sinogram_grid(3, 49, 3, 64, 8));
  MixingConfig c;
  c.delta = 2;
  c.radius = 8;
  auto r = invert_fourier(phi, g, c);
  EXPECT_LE(rel_l2(r.f.values, f.values), 5e-3);
  EXPECT_LE(r.slab_fraction, 1e-8);
}

TEST(PhiMembership, PhantomGaussianZero) {
  auto f = phi_space_phantom(grid2(), PhiWindow{}, 9);
  auto r = phi_membership(f, 8, 1e-8);
  EXPECT_TRUE(r.member);
  ASSERT_EQ(r.normalized.size(), 9u);
  auto gsn = gaussian_phantom(grid2(), {}, 1);
  auto q = phi_membership(gsn, 8, 1e-8);
  EXPECT_FALSE(q.member);
  // zeroth moment sqrt(pi) against max|f| * 16
  EXPECT_NEAR(q.normalized[0], std::sqrt(pi) / 16, 1e-8);
  EXPECT_TRUE(phi_membership(ScalarField(grid2()), 8, 1e-8).member);
  EXPECT_THROW(phi_membership(f, 13, 1e-8), Error);
}
