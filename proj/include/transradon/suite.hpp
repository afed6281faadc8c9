#pragma once

#include <cstdio>
#include <map>

#include "invert.hpp"
#include "slice.hpp"
#include "verify.hpp"

namespace transradon {

// One acceptance criterion: pass flag, a one-line summary and the reports
// that back it. Curves hold (x, y, label) samples for CSV output.
struct CurvePoint {
  double x, y;
  std::string label;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;
  std::vector<VerificationReport> reports;
  std::vector<CurvePoint> curves;
};

struct SuiteConfig {
  std::uint64_t seed = 7;
};

inline nlohmann::json to_json(const CriterionResult& c, bool with_runtime = false) {
  nlohmann::json j{{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"summary", c.summary}};
  j["reports"] = nlohmann::json::array();
  for (const auto& r : c.reports) j["reports"].push_back(to_json(r, with_runtime));
  return j;
}

namespace detail {

inline CriterionResult make_criterion(int id, std::string name) {
  CriterionResult c;
  c.id = id;
  c.name = std::move(name);
  return c;
}

inline std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Report comparing a reconstruction to its reference: the stored sides are
// the values at the k nodes where |ref| is largest; the full-grid relative
// L2 error is recorded separately.
inline VerificationReport field_report(const std::string& name, const ScalarField& rec,
                                       const ScalarField& ref, std::size_t k = 8) {
  VerificationReport rep;
  rep.identity = name;
  std::vector<std::size_t> idx(ref.values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + std::ptrdiff_t(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      double x = std::abs(ref.values[a]), y = std::abs(ref.values[b]);
                      return x != y ? x > y : a < b;
                    });
  for (std::size_t j = 0; j < k; ++j) {
    rep.left.push_back(rec.values[idx[j]]);
    rep.right.push_back(ref.values[idx[j]]);
  }
  rep.values["rel_l2"] = rel_l2(rec.values, ref.values);
  rep.values["rel_max"] = rel_max(rec.values, ref.values);
  rep.grid["output"] = grid_json(ref.grid);
  rep.truncation["reference_edge_ratio"] = edge_ratio(ref);
  finalize(rep);
  return rep;
}

inline VerificationReport scalar_report(const std::string& name, cplx l, cplx r) {
  VerificationReport rep;
  rep.identity = name;
  rep.left = {l};
  rep.right = {r};
  finalize(rep);
  return rep;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline ScalarField sample_fn(const UniformGrid& g, const std::function<cplx(const double*)>& f) {
  ScalarField s(g);
  parallel_for(g.size(), [&](std::size_t i) {
    double y[16];
    g.coords(i, y);
    s.values[i] = f(y);
  });
  return s;
}

inline cplx shifted_gaussian(const double* y) {
  const double a = y[0] - 0.3, b = y[1] + 0.2;
  return std::exp(-a * a - b * b);
}

// (R_T e^{-|x|^2})(a, b) = pi^{(m-1)/2} (1+|a|^2)^{-1/2} e^{-b^2/(1+|a|^2)}
inline double gaussian_transversal(std::size_t m, const double* a, double b) {
  double s2 = 1 + norm2(a, m - 1);
  return std::pow(pi, (double(m) - 1) / 2) / std::sqrt(s2) * std::exp(-b * b / s2);
}

inline PhiWindow window3() { return PhiWindow{0.6, 5.4, 0.5, 4, 16}; }

// ------------------------------------------------------------- criteria

inline CriterionResult criterion_forward_oracle(const SuiteConfig&) {
  CriterionResult c = make_criterion(1, "gaussian_forward_oracle");
  auto g = UniformGrid::centered(2, 256, 8);
  auto f = gaussian_phantom(g, {}, 1);
  auto t0 = std::chrono::steady_clock::now();
  auto s = radon_transversal(f, sinogram_grid(2, 257, 8, 256, 8));
  double sec = seconds_since(t0);
  Sinogram ref(s.grid);
  for (std::size_t r = 0; r < s.rows(); ++r) {
    double a[1];
    s.a_node(r, a);
    for (std::size_t j = 0; j < s.nb(); ++j)
      ref.row(r)[j] = gaussian_transversal(2, a, s.grid.node(1, j));
  }
  double err = rel_max(s.values, ref.values);
  auto rep = field_report("radon_transversal_gaussian", s.as_field(), ref.as_field());
  rep.values["rel_max"] = err;
  rep.grid["field"] = grid_json(g);
  rep.truncation["a_extent"] = 8.0;
  rep.truncation["b_extent"] = 8.0;
  rep.runtime = sec;
  c.reports.push_back(rep);
  c.pass = err <= 1e-4 && sec <= 30;
  c.summary = fmt("max rel error %.3e (<= 1e-4)", err) +
              (sec <= 30 ? ", runtime within 30 s" : ", runtime above 30 s");
  return c;
}

inline CriterionResult criterion_projection_slice(const SuiteConfig&) {
  CriterionResult c = make_criterion(2, "projection_slice_identity");
  auto g2 = UniformGrid::centered(2, 256, 8);
  auto f2 = gaussian_phantom(g2, {}, 1);
  auto G2 = sinogram_grid(2, 129, 4, 768, 24);
  auto r2 = slice_residual(f2, radon_transversal(f2, G2));
  auto g3 = UniformGrid::centered(3, 96, 8);
  auto f3 = gaussian_phantom(g3, {}, 1);
  auto G3 = sinogram_grid(3, 17, 2, 144, 12);
  auto r3 = slice_residual(f3, radon_transversal(f3, G3));
  for (auto [name, r, gf, gs] :
       {std::tuple{"slice_residual_m2", r2, g2, G2}, std::tuple{"slice_residual_m3", r3, g3, G3}}) {
    VerificationReport rep = scalar_report(name, r.max_rel, 0.0);
    rep.values["max_rel"] = r.max_rel;
    rep.values["l2_rel"] = r.l2_rel;
    rep.values["compared"] = r.compared;
    rep.values["uncovered"] = r.uncovered;
    rep.grid["field"] = grid_json(gf);
    rep.grid["sinogram"] = grid_json(gs);
    rep.notes.push_back("left is the residual max|F_2 phi - Lambda F f| / max|Lambda F f|; right is 0");
    c.reports.push_back(rep);
  }
  c.pass = r2.max_rel <= 1e-4 && r3.max_rel <= 1e-3;
  c.summary = fmt("residual m=2 %.3e (<= 1e-4), m=3 %.3e (<= 1e-3)", r2.max_rel, r3.max_rel);
  return c;
}

inline CriterionResult criterion_weighted_identity(const SuiteConfig&) {
  CriterionResult c = make_criterion(3, "weighted_sinogram_identity");
  auto g = UniformGrid::centered(2, 128, 6);
  auto rep = check_eq1(gaussian_phantom(g, {}, 1), 1.0);
  double lam_err = std::abs(rep.constant - pi);
  auto z = check_eq1(ScalarField(UniformGrid::centered(2, 32, 4)), 1.0);
  c.pass = rep.rel_error <= 1e-2 && lam_err <= 1e-12 && z.left[0] == 0.0 && z.right[0] == 0.0;
  c.summary = fmt("sides %.9f vs %.9f, rel %.3e (<= 1e-2); |lambda - pi| = %.1e (<= 1e-12)",
                  rep.left[0].real(), rep.right[0].real(), rep.rel_error, lam_err);
  c.reports.push_back(rep);
  c.reports.push_back(z);
  return c;
}

inline CriterionResult criterion_semyanistyi_point(const SuiteConfig&) {
  CriterionResult c = make_criterion(4, "semyanistyi_dual_riesz_identity");
  auto g = UniformGrid::centered(2, 256, 8);
  auto f = gaussian_phantom(g, {}, 1);
  LineSampler S(f);
  auto geo = ray_geometry(2, 32, 0, 8, 2);
  double x[2] = {0, 0};
  cplx lhs = semyanistyi_dual_at([&](const double* a, double b) { return S.transversal(a, b); },
                                 geo, x, 0.5, 7.0);
  auto fn = [](const double* y) { return cplx(std::exp(-y[0] * y[0] - y[1] * y[1])); };
  cplx rhs = 2 * pi * riesz_potential_at(fn, 2, x, 1.5, 9.0);
  auto rep = scalar_report("dual_semyanistyi_of_radon_at_origin", lhs, rhs);
  rep.constant_symbolic = "2 pi";
  rep.constant = 2 * pi;
  rep.grid["field"] = grid_json(g);
  rep.grid["rays"] = {{"n_polar", 32}};
  rep.truncation["offset_half_width"] = 7.0;
  rep.truncation["riesz_radius"] = 9.0;
  c.pass = rep.rel_error <= 1e-3;
  c.summary = fmt("%.9f vs %.9f, rel %.3e (<= 1e-3)", lhs.real(), rhs.real(), rep.rel_error);
  c.reports.push_back(rep);
  return c;
}

inline CriterionResult criterion_intertwining(const SuiteConfig& cfg) {
  CriterionResult c = make_criterion(5, "backprojection_intertwining");
  auto g = UniformGrid::centered(2, 256, 8);
  auto f = phi_space_phantom(g, PhiWindow{}, cfg.seed);
  auto s = radon_transversal(f, sinogram_grid(2, 129, 2, 256, 8));
  ScalarField lhs = backprojection_fourier(s, g);
  ScalarField rhs = riesz_partial(f, 1.0);
  for (auto& v : rhs.values) v *= 2 * pi;
  auto rep = field_report("backprojection_of_radon_vs_partial_riesz", lhs, rhs);
  rep.constant_symbolic = "(2 pi)^{m-1}";
  rep.constant = 2 * pi;
  rep.grid["sinogram"] = grid_json(s.grid);
  double e = rep.values["rel_l2"];
  c.pass = e <= 1e-3;
  c.summary = fmt("rel L2 %.3e (<= 1e-3)", e);
  c.reports.push_back(rep);
  return c;
}

inline CriterionResult criterion_fourier_inversion(const SuiteConfig& cfg) {
  CriterionResult c = make_criterion(6, "fourier_inversion");
  auto g2 = UniformGrid::centered(2, 256, 8);
  auto f2 = phi_space_phantom(g2, PhiWindow{}, cfg.seed);
  auto r2 = invert_fourier(radon_transversal(f2, sinogram_grid(2, 257, 8, 256, 8)), g2);
  auto rep2 = field_report("fourier_inversion_m2", r2.f, f2);
  rep2.values["slab_fraction"] = r2.slab_fraction;
  rep2.truncation["a_extent"] = 8.0;
  auto g3 = UniformGrid::centered(3, 64, 8);
  auto f3 = phi_space_phantom(g3, window3(), cfg.seed);
  MixingConfig mc;
  mc.delta = 2;
  mc.radius = 8;
  auto r3 = invert_fourier(radon_transversal(f3, sinogram_grid(3, 49, 3, 64, 8)), g3, mc);
  auto rep3 = field_report("fourier_inversion_m3", r3.f, f3);
  rep3.values["slab_fraction"] = r3.slab_fraction;
  rep3.truncation["a_extent"] = 3.0;
  rep3.truncation["slab_half_width"] = r3.delta;
  double e2 = rep2.values["rel_l2"], e3 = rep3.values["rel_l2"];
  c.pass = e2 <= 1e-3 && e3 <= 5e-3;
  c.summary = fmt("rel L2 m=2 %.3e (<= 1e-3), m=3 %.3e (<= 5e-3)", e2, e3);
  c.reports.push_back(rep2);
  c.reports.push_back(rep3);
  return c;
}

inline CriterionResult criterion_derivative_inversion(const SuiteConfig& cfg) {
  CriterionResult c = make_criterion(7, "odd_derivative_inversion");
  auto g = UniformGrid::centered(3, 64, 8);
  auto f = phi_space_phantom(g, window3(), cfg.seed);
  auto s = radon_transversal(f, sinogram_grid(3, 57, 2, 64, 8));
  ScalarField pre = invert_derivative_odd(s, g, Placement::pre);
  ScalarField post = invert_derivative_odd(s, g, Placement::post);
  ScalarField split = invert_derivative_odd(s, g, Placement::split);
  auto rep = field_report("derivative_inversion_m3", split, f);
  rep.grid["sinogram"] = grid_json(s.grid);
  rep.truncation["a_extent"] = 2.0;
  double e = rep.values["rel_l2"];
  double d1 = rel_l2(pre.values, post.values), d2 = rel_l2(pre.values, split.values),
         d3 = rel_l2(post.values, split.values);
  rep.values["placement_pre_post"] = d1;
  rep.values["placement_pre_split"] = d2;
  rep.values["placement_post_split"] = d3;
  double dmax = std::max({d1, d2, d3});
  c.pass = e <= 1e-2 && dmax <= 1e-8;
  c.summary = fmt("rel L2 %.3e (<= 1e-2); placements agree to %.1e (<= 1e-8)", e, dmax);
  c.reports.push_back(rep);
  return c;
}

inline CriterionResult criterion_heisenberg(const SuiteConfig& cfg) {
  CriterionResult c = make_criterion(8, "heisenberg_inversion");
  auto g = UniformGrid::centered(3, 64, 8);
  auto f = phi_space_phantom(g, window3(), cfg.seed + 1);
  auto H = radon_heisenberg(f, heisenberg_grid(1, 57, 4, 64, 8));
  ScalarField d = invert_heisenberg(H, g);
  HeisenbergOptions fo;
  fo.method = HeisenbergMethod::fourier;
  fo.mixing.delta = 2;
  fo.mixing.radius = 8;
  ScalarField four = invert_heisenberg(H, g, fo);
  HeisenbergOptions flip;
  flip.flip_sign = true;
  ScalarField bad = invert_heisenberg(H, g, flip);
  auto rep = field_report("heisenberg_inversion_n1", d, f);
  rep.grid["heisenberg"] = grid_json(H.grid);
  double e = rep.values["rel_l2"];
  double ef = rel_l2(four.values, d.values), eb = rel_l2(bad.values, f.values);
  rep.values["fourier_vs_derivative"] = ef;
  rep.values["flipped_sign_error"] = eb;
  c.pass = e <= 1e-2 && eb > 1 && ef <= 1e-3;
  c.summary = fmt("rel L2 %.3e (<= 1e-2); flipped sign %.3f (> 1); fourier vs derivative %.3e (<= 1e-3)",
                  e, eb, ef);
  c.reports.push_back(rep);
  return c;
}

inline CriterionResult criterion_cbp(const SuiteConfig&) {
  CriterionResult c = make_criterion(9, "convolution_backprojection");
  auto g = UniformGrid::centered(2, 256, 8);
  auto f = sample_fn(g, shifted_gaussian);
  KappaWavelet W = kappa_wavelet(cbp_wavelet(2, 1));
  Profile prof = [W](double s) { return W.w(s); };
  double gam = cbp_gamma(2, 1);
  double gerr = std::abs(gam - pi * pi);

  // sinogram quadrature against the direct convolution f * k_t
  RaySinogram R512 = radon_rays(f, ray_geometry(2, 128, 0, 8, 512));
  VerificationReport q;
  q.identity = "wavelet_transform_quadrature_vs_convolution";
  for (double t : {1.0, 0.5, 0.25})
    for (auto p : std::vector<std::array<double, 2>>{{0, 0}, {0.3, -0.2}, {1, 0.5}, {-1.2, 0.7}}) {
      q.left.push_back(wavelet_transform_at(R512, p.data(), prof, t));
      q.right.push_back(radial_convolution_at(
          shifted_gaussian, [&](double r) { return cbp_kernel(W, r); }, p.data(), t, 9.0));
    }
  q.grid["rays"] = {{"n_polar", 128}, {"nt", 512}};
  q.truncation["offset_range"] = {-8.0, 8.0};
  finalize(q);

  // plateau
  RaySinogram R = radon_rays(f, ray_geometry(2, 128, 0, 8, 4096));
  const UniformGrid out = UniformGrid::centered(2, 32, 2);
  CbpOptions o;
  o.t0 = 0.5;
  o.levels = 8;
  CbpResult r = cbp_reconstruct(R, out, o);
  ScalarField ref = sample_fn(out, shifted_gaussian);
  for (std::size_t k = 0; k < r.levels.size(); ++k) {
    std::vector<cplx> re(r.fields[k].values.size());
    for (std::size_t i = 0; i < re.size(); ++i) re[i] = r.fields[k].values[i].real();
    c.curves.push_back({r.levels[k].t, rel_l2(re, ref.values), "cbp_error_vs_t"});
  }
  VerificationReport p;
  p.identity = "cbp_plateau_ratio";
  double ratio_err = 1;
  if (r.plateau >= 0) {
    const double x0[2] = {0.3, -0.2};
    double t = r.levels[std::size_t(r.plateau)].t;
    cplx w = wavelet_transform_at(R, x0, prof, t);
    p.left = {w / shifted_gaussian(x0)};
    p.right = {pi * pi};
    p.values["plateau_t"] = t;
    ratio_err = std::abs(p.left[0] - p.right[0]) / (pi * pi);
  } else {
    p.left = {0.0};
    p.right = {pi * pi};
    p.notes.push_back("no plateau reached");
  }
  p.constant_symbolic = "gamma = pi^2 (m = 2, l = 1)";
  p.constant = gam;
  p.values["levels"] = r.levels.size();
  p.values["flagged"] = r.flagged;
  p.values["reconstruction_rel_l2"] = rel_l2(r.f.values, ref.values);
  p.grid["rays"] = {{"n_polar", 128}, {"nt", 4096}};
  p.grid["output"] = grid_json(out);
  finalize(p);
  c.pass = gerr <= 1e-10 && ratio_err <= 0.05 && q.rel_error <= 1e-3;
  c.summary = fmt("|gamma - pi^2| = %.1e (<= 1e-10); plateau ratio off by %.2f%% (<= 5%%); "
                  "quadrature vs convolution %.3e (<= 1e-3)",
                  gerr, 100 * ratio_err, q.rel_error);
  c.reports.push_back(q);
  c.reports.push_back(p);
  return c;
}

inline CriterionResult criterion_scaling(const SuiteConfig&) {
  CriterionResult c = make_criterion(10, "mixed_norm_scaling");
  auto gauss = [](const double* x) { return std::exp(-x[0] * x[0] - x[1] * x[1]); };
  const double p = 1.5;
  MixedExponents e = transversal_exponents(2, p);
  std::vector<double> lam{0.5, 1, 2, 4};
  auto a = scaling_exponent_test(gauss, 2, p, e.q, e.r, lam);
  auto b = scaling_exponent_test(gauss, 2, p, e.q, e.r + 0.5, lam);
  double sa = a.values["slope"], sb = b.values["slope"];
  for (std::size_t i = 0; i < lam.size(); ++i) {
    c.curves.push_back({lam[i], a.left[i].real(), "ratio_paper_exponents"});
    c.curves.push_back({lam[i], b.left[i].real(), "ratio_r_plus_half"});
  }
  c.pass = std::abs(sa) <= 0.05 && std::abs(sb) >= 0.1;
  c.summary = fmt("slope at q = r = 3: %.2e (|.| <= 0.05); with r + 0.5: %.4f (|.| >= 0.1 "
                  "required; the exact exponent is 1/3 - 2/7 = %.4f)",
                  sa, sb, 1.0 / 3 - 2.0 / 7);
  c.reports.push_back(a);
  c.reports.push_back(b);
  return c;
}

inline CriterionResult criterion_duality(const SuiteConfig&) {
  CriterionResult c = make_criterion(11, "duality");
  // transversal and alpha pairs, m = 2
  auto g = UniformGrid::centered(2, 192, 8);
  auto f = sample_fn(g, shifted_gaussian);
  auto G = sinogram_grid(2, 385, 6, 384, 12);
  Sinogram phi(G);
  for (std::size_t r = 0; r < phi.rows(); ++r) {
    double a;
    phi.a_node(r, &a);
    for (std::size_t j = 0; j < phi.nb(); ++j) {
      double b = G.node(1, j) - 0.2;
      phi.row(r)[j] = std::exp(-a * a - b * b);
    }
  }
  auto t = check_duality(DualPair::transversal, f, phi);
  auto al = check_duality(DualPair::alpha, f, phi, 0.5);
  // Heisenberg pair, n = 1
  auto g3 = UniformGrid::centered(3, 40, 5);
  auto f3 = gaussian_phantom(g3, {0.3, -0.2, 0.1}, 1);
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
  auto hz = check_duality(f3, h);
  double worst = std::max({t.rel_error, al.rel_error, hz.rel_error});
  c.pass = worst <= 1e-5;
  c.summary = fmt("transversal %.2e, alpha = 1/2 %.2e, heisenberg %.2e (all <= 1e-5)",
                  t.rel_error, al.rel_error, hz.rel_error);
  c.reports.push_back(t);
  c.reports.push_back(al);
  c.reports.push_back(hz);
  return c;
}

inline CriterionResult criterion_measure_change(const SuiteConfig&) {
  CriterionResult c = make_criterion(12, "measure_change");
  auto a = check_measure_change(MeasureDirection::sphere_to_plane, [](double) { return 1.0; }, 3);
  auto b = check_measure_change(MeasureDirection::plane_to_sphere,
                                [](double r) { return std::exp(-r * r); }, 3);
  double e4 = std::max(std::abs(a.left[0] - 4 * pi), std::abs(a.right[0] - 4 * pi)) / (4 * pi);
  a.values["four_pi"] = 4 * pi;
  c.pass = a.rel_error <= 1e-6 && e4 <= 1e-6 && b.rel_error <= 1e-6;
  c.summary = fmt("constant on S^2: %.12f vs %.12f (4 pi to %.1e); upper hemisphere %.1e (<= 1e-6)",
                  a.left[0].real(), a.right[0].real(), e4, b.rel_error);
  c.reports.push_back(a);
  c.reports.push_back(b);
  return c;
}

inline CriterionResult criterion_hypersingular(const SuiteConfig&) {
  CriterionResult c = make_criterion(13, "hypersingular_inversion");
  auto g = UniformGrid::centered(2, 256, 8);
  auto f = sample_fn(g, shifted_gaussian);
  RaySinogram R = radon_rays(f, ray_geometry(2, 128, 0, 22, 704));
  auto G = UniformGrid::centered(2, 640, 20);
  ScalarField pot = dual_potential(R, G);
  const UniformGrid out = UniformGrid::centered(2, 9, 2.25);
  const ScalarField ref = sample_fn(out, shifted_gaussian);
  bool decreasing = true;
  double prev = 1e300;
  std::vector<double> errs;
  for (double eps : {0.5, 0.25, 0.125, 0.0625}) {
    HypersingularSpec s;
    s.eps = eps;
    s.Y = 16;
    ScalarField rec = hypersingular_invert(pot, s, out);
    auto rep = field_report(fmt("hypersingular_eps_%.4f", eps), rec, ref);
    rep.values["eps"] = eps;
    rep.grid["potential"] = grid_json(G);
    rep.truncation["Y"] = s.Y;
    rep.truncation["potential_box"] = 20.0;
    double e = rep.values["rel_l2"];
    c.curves.push_back({eps, e, "hypersingular_error_vs_eps"});
    errs.push_back(e);
    decreasing = decreasing && e < prev;
    prev = e;
    c.reports.push_back(rep);
  }
  cplx d = hypersingular_constant(2, DifferenceKind::plain, 1);
  auto dr = scalar_report("hypersingular_constant_d21", d, 2 * pi);
  dr.constant_symbolic = "d_{2,1}(1) = 2 pi";
  dr.constant = 2 * pi;
  double im = std::abs(d.imag()) / std::abs(d.real());
  dr.values["imag_over_real"] = im;
  c.reports.push_back(dr);
  c.pass = decreasing && im <= 1e-8;
  c.summary = fmt("errors %.3e, %.3e, %.3e, %.3e", errs[0], errs[1], errs[2], errs[3]) +
              (decreasing ? " (strictly decreasing)" : " (NOT decreasing)") +
              fmt("; |Im d|/|Re d| = %.1e (<= 1e-8)", im);
  return c;
}

}  // namespace detail

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> n{"identities", "inversion", "scaling", "all"};
  return n;
}

// Criteria ids per suite, in execution order.
inline std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "identities") return {1, 2, 3, 4, 11, 12};
  if (suite == "inversion") return {5, 6, 7, 8, 9, 13};
  if (suite == "scaling") return {10};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13};
  throw Error("unknown suite '" + suite + "' (identities, inversion, scaling, all)");
}

inline CriterionResult run_criterion(int id, const SuiteConfig& cfg) {
  using Fn = CriterionResult (*)(const SuiteConfig&);
  static const std::map<int, Fn> table{
      {1, detail::criterion_forward_oracle},   {2, detail::criterion_projection_slice},
      {3, detail::criterion_weighted_identity}, {4, detail::criterion_semyanistyi_point},
      {5, detail::criterion_intertwining},     {6, detail::criterion_fourier_inversion},
      {7, detail::criterion_derivative_inversion}, {8, detail::criterion_heisenberg},
      {9, detail::criterion_cbp},              {10, detail::criterion_scaling},
      {11, detail::criterion_duality},         {12, detail::criterion_measure_change},
      {13, detail::criterion_hypersingular}};
  auto it = table.find(id);
  require(it != table.end(), "run_criterion: no criterion " + std::to_string(id));
  return it->second(cfg);
}

// Runs the suite's criteria in order; each criterion parallelizes internally.
inline std::vector<CriterionResult> run_suite(const std::string& suite, const SuiteConfig& cfg,
                                              const std::function<void(const CriterionResult&)>& on_done = {}) {
  std::vector<CriterionResult> out;
  for (int id : suite_criteria(suite)) {
    out.push_back(run_criterion(id, cfg));
    if (on_done) on_done(out.back());
  }
  return out;
}

inline nlohmann::json suite_json(const std::string& suite, const SuiteConfig& cfg,
                                 const std::vector<CriterionResult>& res,
                                 bool with_runtime = false) {
  nlohmann::json j{{"suite", suite}, {"seed", cfg.seed}};
  j["criteria"] = nlohmann::json::array();
  for (const auto& c : res) j["criteria"].push_back(to_json(c, with_runtime));
  return j;
}

}  // namespace transradon
