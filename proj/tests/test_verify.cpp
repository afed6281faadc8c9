#include <gtest/gtest.h>

#include <filesystem>

#include "transradon/io.hpp"
#include "transradon/suite.hpp"

using namespace transradon;

namespace {

const UniformGrid& grid2() {
  static const UniformGrid g = UniformGrid::centered(2, 128, 6);
  return g;
}

const ScalarField& gauss2() {
  static const ScalarField f = gaussian_phantom(grid2(), {}, 1);
  return f;
}

WeightedOptions small3() {
  WeightedOptions o;
  o.n_polar = 24;
  o.n_azimuth = 32;
  o.nt = 160;
  o.n_dirs = 24;
  return o;
}

double gauss_fn(const double* x) { return std::exp(-x[0] * x[0] - x[1] * x[1]); }

}  // namespace

// ------------------------------------------------------------------ reports

TEST(Report, RelativeErrorFromStoredValues) {
  EXPECT_DOUBLE_EQ(relative_error({cplx(3)}, {cplx(4)}), 0.25);
  EXPECT_DOUBLE_EQ(relative_error({cplx(0)}, {cplx(0)}), 0.0);
  EXPECT_NEAR(relative_error({cplx(1), cplx(0, 1)}, {cplx(1), cplx(0)}), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(relative_error({cplx(1)}, {}), Error);
}

TEST(Report, JsonOmitsRuntimeUnlessAsked) {
  auto r = check_measure_change(MeasureDirection::sphere_to_plane, [](double) { return 1.0; });
  auto j = to_json(r);
  EXPECT_FALSE(j.contains("runtime_s"));
  EXPECT_TRUE(to_json(r, true).contains("runtime_s"));
  EXPECT_EQ(j["identity"], "measure_change_sphere_to_plane");
  EXPECT_DOUBLE_EQ(j["rel_error"].get<double>(), r.rel_error);
  auto again = check_measure_change(MeasureDirection::sphere_to_plane, [](double) { return 1.0; });
  EXPECT_EQ(j.dump(), to_json(again).dump());
}

// ------------------------------------------------------- weighted identity

TEST(WeightedIdentity, FirstOrderGaussianM2) {
  auto r = check_eq1(gauss2(), 1.0);
  EXPECT_NEAR(r.constant, pi, 1e-12);
  EXPECT_NEAR(r.left[0].real(), pi * pi, 1e-2 * pi * pi);
  EXPECT_LE(r.rel_error, 1e-2);
  EXPECT_LE(r.rel_error, 1e-6);
  EXPECT_TRUE(r.truncation.contains("offset_range"));
}

TEST(WeightedIdentity, FractionalAndComplexOrders) {
  EXPECT_LE(check_eq1(gauss2(), 0.5).rel_error, 1e-5);
  EXPECT_LE(check_eq1(gauss2(), cplx(0.7, 0.4)).rel_error, 1e-5);
  EXPECT_LE(check_eq2(gauss2(), 1.0).rel_error, 1e-5);
  EXPECT_LE(check_eq2(gauss2(), 1.5).rel_error, 1e-5);
}

TEST(WeightedIdentity, DimensionThree) {
  auto g = UniformGrid::centered(3, 40, 5);
  auto f = gaussian_phantom(g, {0.3, 0, -0.2}, 1);
  EXPECT_LE(check_eq1(f, 0.5, small3()).rel_error, 2e-2);
  EXPECT_LE(check_eq2(f, 0.5, small3()).rel_error, 2e-2);
}

TEST(WeightedIdentity, LambdaClosedForm) {
  EXPECT_NEAR(std::abs(weighted_lambda(2, 1.0) - pi), 0.0, 1e-14);
  // m = 3: pi Gamma(alpha/2) / Gamma(alpha/2 + 1) = 2 pi / alpha
  EXPECT_NEAR(std::abs(weighted_lambda(3, 0.5) - 4 * pi), 0.0, 1e-12);
}

TEST(WeightedIdentity, RefinementReducesError) {
  auto coarse = UniformGrid::centered(2, 48, 6);
  auto fc = gaussian_phantom(coarse, {0.3, -0.2}, 1);
  WeightedOptions oc;
  oc.n_polar = 16;
  oc.nt = 96;
  oc.n_dirs = 16;
  WeightedOptions of;
  of.n_polar = 32;
  of.nt = 192;
  of.n_dirs = 32;
  auto fine = UniformGrid::centered(2, 96, 6);
  auto ff = gaussian_phantom(fine, {0.3, -0.2}, 1);
  double ec = check_eq1(fc, 0.5, oc).rel_error, ef = check_eq1(ff, 0.5, of).rel_error;
  EXPECT_LT(ef, ec);
}

TEST(WeightedIdentity, ZeroAndErrors) {
  ScalarField z(UniformGrid::centered(2, 32, 4));
  auto r = check_eq1(z, 1.0);
  EXPECT_EQ(r.left[0], cplx(0));
  EXPECT_EQ(r.right[0], cplx(0));
  EXPECT_EQ(r.rel_error, 0.0);
  EXPECT_THROW(check_eq1(gauss2(), 0.0), Error);
  EXPECT_THROW(check_eq2(gauss2(), -0.5), Error);
  EXPECT_THROW(check_eq1(ScalarField(UniformGrid::centered(4, 4, 2)), 1.0), Error);
}

// ---------------------------------------------------------- weighted bound

TEST(WeightedBound, FiniteAndBoundedOverDilations) {
  auto r = check_weighted_bound(gauss2(), 0.8, 1.5);
  EXPECT_TRUE(std::isfinite(r.left[0].real()));
  EXPECT_GT(r.left[0].real(), 0);
  double lo = 1e300, hi = 0;
  for (double w : {0.5, 1.0, 2.0}) {
    double q = check_weighted_bound(gaussian_phantom(grid2(), {}, w), 0.8, 1.5).values["ratio"];
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  EXPECT_LE(hi / lo, 2.0);
}

TEST(WeightedBound, SharpRangeRejected) {
  try {
    check_weighted_bound(gauss2(), 0.8, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("sharp"), std::string::npos);
  }
  EXPECT_THROW(check_weighted_bound(gauss2(), 0.2, 1.5), Error);  // alpha <= 1 - m/p'
  EXPECT_THROW(check_weighted_bound(gauss2(), 0.8, 1.0), Error);  // p = 1 needs alpha > 1
  EXPECT_NO_THROW(check_weighted_bound(gauss2(), 1.2, 1.0));
  auto z = check_weighted_bound(ScalarField(UniformGrid::centered(2, 32, 4)), 0.8, 1.5);
  EXPECT_EQ(z.left[0], cplx(0));
}

// ----------------------------------------------------------------- duality

namespace {

Sinogram gauss_sinogram(const UniformGrid& G) {
  Sinogram phi(G);
  for (std::size_t r = 0; r < phi.rows(); ++r) {
    double a;
    phi.a_node(r, &a);
    for (std::size_t j = 0; j < phi.nb(); ++j) {
      double b = G.node(1, j) - 0.2;
      phi.row(r)[j] = std::exp(-a * a - b * b);
    }
  }
  return phi;
}

}  // namespace

TEST(Duality, TransversalAndAlphaPairs) {
  auto g = UniformGrid::centered(2, 192, 8);
  auto f = gaussian_phantom(g, {0.3, -0.2}, 1);
  auto phi = gauss_sinogram(sinogram_grid(2, 385, 6, 384, 12));
  EXPECT_LE(check_duality(DualPair::transversal, f, phi).rel_error, 1e-6);
  EXPECT_LE(check_duality(DualPair::alpha, f, phi, 0.5).rel_error, 1e-5);
}

TEST(Duality, HeisenbergPair) {
  auto g = UniformGrid::centered(3, 40, 5);
  auto f = gaussian_phantom(g, {0.3, -0.2, 0.1}, 1);
  auto HG = heisenberg_grid(1, 33, 8, 160, 10);
  HeisenbergSinogram h(HG);
  for (std::size_t r = 0; r < h.rows(); ++r) {
    double uv[2];
    h.z_node(r, uv);
    for (std::size_t j = 0; j < h.nt(); ++j) {
      double s = HG.node(2, j) - 0.2;
      h.row(r)[j] = std::exp(-0.25 * (uv[0] * uv[0] + uv[1] * uv[1]) - s * s + 0.3 * uv[0]);
    }
  }
  EXPECT_LE(check_duality(f, h).rel_error, 1e-5);
  auto z = check_duality(f, HeisenbergSinogram(HG));
  EXPECT_EQ(z.left[0], cplx(0));
  EXPECT_EQ(z.right[0], cplx(0));
}

TEST(Duality, ZeroAndGeometryMismatch) {
  auto g = UniformGrid::centered(2, 32, 4);
  auto G = sinogram_grid(2, 17, 2, 32, 6);
  auto r = check_duality(DualPair::transversal, ScalarField(g), gauss_sinogram(G));
  EXPECT_EQ(r.left[0], cplx(0));
  EXPECT_EQ(r.right[0], cplx(0));
  EXPECT_THROW(check_duality(DualPair::transversal, gaussian_phantom(UniformGrid::centered(3, 8, 2), {}, 1),
                             gauss_sinogram(G)),
               Error);
  EXPECT_THROW(check_duality(DualPair::heisenberg, ScalarField(g), gauss_sinogram(G)), Error);
}

// ---------------------------------------------------------- measure change

TEST(MeasureChange, ConstantOnTheTwoSphere) {
  auto r = check_measure_change(MeasureDirection::sphere_to_plane, [](double) { return 1.0; }, 3);
  EXPECT_NEAR(r.left[0].real(), 4 * pi, 1e-6);
  EXPECT_NEAR(r.right[0].real(), 4 * pi, 1e-6);
  EXPECT_LE(r.rel_error, 1e-6);
}

TEST(MeasureChange, UpperHemisphereAndOtherDimensions) {
  auto r = check_measure_change(MeasureDirection::plane_to_sphere,
                                [](double x) { return std::exp(-x * x); }, 3);
  EXPECT_NEAR(r.left[0].real(), pi, 1e-10);
  EXPECT_LE(r.rel_error, 1e-6);
  for (std::size_t m : {2u, 4u}) {
    auto a = check_measure_change(MeasureDirection::sphere_to_plane,
                                  [](double t) { return std::exp(2 * t) * (1 + t * t); }, m);
    EXPECT_LE(a.rel_error, 1e-6) << m;
    auto b = check_measure_change(MeasureDirection::plane_to_sphere,
                                  [](double x) { return 1 / std::pow(1 + x * x, 3); }, m);
    EXPECT_LE(b.rel_error, 1e-6) << m;
  }
  EXPECT_NEAR(check_measure_change(MeasureDirection::sphere_to_plane, [](double) { return 1.0; }, 2)
                  .left[0].real(),
              2 * pi, 1e-10);
}

TEST(MeasureChange, Zero) {
  for (auto d : {MeasureDirection::sphere_to_plane, MeasureDirection::plane_to_sphere}) {
    auto r = check_measure_change(d, [](double) { return 0.0; });
    EXPECT_EQ(r.left[0], cplx(0));
    EXPECT_EQ(r.right[0], cplx(0));
  }
}

// -------------------------------------------------------------- mixed norm

TEST(MixedNorm, SeparableFactorizes) {
  auto G = sinogram_grid(2, 81, 4, 128, 8);
  Sinogram s(G);
  ScalarField A(UniformGrid({81}, {-4}, {G.spacing[0]})), B(UniformGrid({128}, {-8}, {G.spacing[1]}));
  for (std::size_t i = 0; i < 81; ++i) A.values[i] = 1 / (1 + std::pow(G.node(0, i), 2));
  for (std::size_t j = 0; j < 128; ++j) B.values[j] = std::exp(-std::pow(G.node(1, j), 2)) * (1 + G.node(1, j));
  for (std::size_t i = 0; i < 81; ++i)
    for (std::size_t j = 0; j < 128; ++j) s.row(i)[j] = A.values[i] * B.values[j];
  for (auto [q, r] : {std::pair{3.0, 3.0}, {1.5, 2.5}, {1.0, 4.0}})
    EXPECT_NEAR(mixed_norm(s, q, r), lp_norm(A, q) * lp_norm(B, r), 1e-8 * lp_norm(A, q) * lp_norm(B, r));
}

TEST(MixedNorm, EqualExponentsAreThePlainNorm) {
  auto G = sinogram_grid(2, 65, 4, 128, 8);
  Sinogram s(G);
  for (std::size_t r = 0; r < s.rows(); ++r) {
    double a;
    s.a_node(r, &a);
    for (std::size_t j = 0; j < s.nb(); ++j) s.row(r)[j] = detail::gaussian_transversal(2, &a, G.node(1, j));
  }
  EXPECT_NEAR(mixed_norm(s, 2, 2), lp_norm(s.as_field(), 2), 1e-10 * lp_norm(s.as_field(), 2));
  EXPECT_EQ(mixed_norm(Sinogram(G), 3, 3), 0.0);
  EXPECT_THROW(mixed_norm(s, 0.5, 2), Error);
  EXPECT_THROW(mixed_norm(s, 2, 0.9), Error);
}

TEST(MixedNorm, CompactifiedRaysGaussian) {
  // ||R_T f(a, .)||_3^3 = pi^{3/2} sqrt(pi/3) / (1+a^2) for the unit Gaussian;
  // the rays cover all a, so the outer integral gives pi exactly
  auto f = gaussian_phantom(UniformGrid::centered(2, 128, 8), {}, 1);
  RaySinogram R = radon_rays(f, ray_geometry(2, 96, 0, 12, 512));
  const double exact = std::cbrt(std::pow(pi, 2.5) * std::sqrt(pi / 3));
  EXPECT_NEAR(mixed_norm(R, 3, 3), exact, 1e-6 * exact);
}

TEST(MixedNorm, HeisenbergData) {
  auto HG = heisenberg_grid(1, 17, 4, 32, 6);
  HeisenbergSinogram h(HG);
  for (auto& v : h.values) v = 2.0;
  // trapezoid lengths: 8 per z axis, (nt - 1) dt along t
  const double Lt = 31 * 12.0 / 32;
  EXPECT_NEAR(mixed_norm(h, 2, 3), 2 * std::sqrt(64.0) * std::cbrt(Lt), 1e-10);
  EXPECT_NEAR(mixed_norm(h, 1, 1), 2 * 64 * Lt, 1e-9);
}

// ----------------------------------------------------------------- scaling

TEST(Scaling, SlopeVanishesAtTheEstimateExponents) {
  MixedExponents e = transversal_exponents(2, 1.5);
  EXPECT_NEAR(e.q, 3, 1e-12);
  EXPECT_NEAR(e.r, 3, 1e-12);
  auto r = scaling_exponent_test(gauss_fn, 2, 1.5, e.q, e.r, {0.5, 1, 2, 4});
  EXPECT_LE(std::abs(r.values["slope"].get<double>()), 0.05);
  EXPECT_LE(std::abs(r.values["slope"].get<double>()), 1e-4);
}

TEST(Scaling, PerturbedExponentFollowsTheScalingLaw) {
  auto r = scaling_exponent_test(gauss_fn, 2, 1.5, 3, 3.5, {0.5, 1, 2, 4});
  const double predicted = 1.0 / 3 - 1.0 / 3.5;
  EXPECT_NEAR(r.constant, predicted, 1e-12);
  EXPECT_NEAR(r.values["slope"].get<double>(), predicted, 1e-3);
  auto s = scaling_exponent_test(gauss_fn, 2, 1.5, 3, 1.5, {0.5, 1, 2, 4});
  EXPECT_NEAR(s.values["slope"].get<double>(), 1.0 / 3 - 1 / 1.5, 1e-3);
}

TEST(Scaling, Preconditions) {
  EXPECT_THROW(scaling_exponent_test(gauss_fn, 2, 1.5, 3, 3, {1}), Error);
  EXPECT_THROW(scaling_exponent_test(gauss_fn, 2, 1.5, 3, 3, {1, 2}), Error);
  EXPECT_THROW(scaling_exponent_test(gauss_fn, 2, 1.5, 3, 3, {1, 2, 2}), Error);
  EXPECT_THROW(scaling_exponent_test(gauss_fn, 2, 2.0, 3, 3, {0.5, 1, 2}), Error);
  EXPECT_THROW(transversal_exponents(2, 1.0), Error);
  EXPECT_DOUBLE_EQ(loglog_slope({1, 2, 4}, {3, 12, 48}), 2.0);
}

// ------------------------------------------------------------------- suite

TEST(Suite, NamesAndOrder) {
  EXPECT_EQ(suite_criteria("all").size(), 13u);
  EXPECT_EQ(suite_criteria("scaling"), std::vector<int>{10});
  EXPECT_THROW(suite_criteria("everything"), Error);
  EXPECT_THROW(run_criterion(14, SuiteConfig{}), Error);
}

TEST(Suite, CheapCriteriaPassAndAreDeterministic) {
  SuiteConfig cfg;
  for (int id : {3, 12}) {
    auto a = run_criterion(id, cfg);
    EXPECT_TRUE(a.pass) << a.summary;
    auto b = run_criterion(id, cfg);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  }
}

TEST(Suite, ThreadCountDoesNotChangeReports) {
  SuiteConfig cfg;
  set_threads(1);
  auto a = suite_json("scaling", cfg, run_suite("scaling", cfg)).dump();
  set_threads(3);
  auto b = suite_json("scaling", cfg, run_suite("scaling", cfg)).dump();
  set_threads(1);
  EXPECT_EQ(a, b);
}

// ---------------------------------------------------------------------- io

TEST(Io, RoundTripKeepsGridAndValues) {
  auto dir = std::filesystem::temp_directory_path() / "transradon_io_test";
  std::filesystem::create_directories(dir);
  auto G = sinogram_grid(2, 9, 2, 16, 4);
  Sinogram s = gauss_sinogram(G);
  s.values[3] = cplx(1.5, -2.25);
  save(dir / "s.json", s);
  StoredArray a = load_array(dir / "s.json");
  EXPECT_EQ(a.kind, "sinogram");
  EXPECT_EQ(a.grid, G);
  EXPECT_EQ(as_sinogram(a).values, s.values);
  EXPECT_THROW(as_heisenberg(a), Error);
  EXPECT_THROW(load_array(dir / "missing.json"), Error);
  std::filesystem::remove_all(dir);
}
