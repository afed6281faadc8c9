// Command line front end: phantoms, forward transforms, inversions and the
// acceptance suites.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "transradon/io.hpp"
#include "transradon/suite.hpp"

using namespace transradon;

namespace {

cplx parse_alpha(const std::string& s) {
  auto comma = s.find(',');
  try {
    if (comma == std::string::npos) return std::stod(s);
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw Error("--alpha: expected 're' or 're,im', got '" + s + "'");
  }
}

// TRANSRADON_THREADS wins over --threads.
void apply_threads(int flag) {
  int n = flag;
  if (const char* env = std::getenv("TRANSRADON_THREADS")) {
    try {
      n = std::stoi(env);
    } catch (const std::exception&) {
      throw Error("TRANSRADON_THREADS must be an integer");
    }
  }
  set_threads(n);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream o(path);
  require(bool(o), "cannot write " + path);
  o << text;
}

std::string csv_path(const std::string& json_path) {
  auto p = std::filesystem::path(json_path);
  p.replace_extension(".csv");
  return p.string();
}

std::string curves_csv(const std::vector<CriterionResult>& res) {
  std::ostringstream o;
  o.precision(17);
  o << "x,y,label\n";
  for (const auto& c : res)
    for (const auto& p : c.curves) o << p.x << "," << p.y << "," << p.label << "\n";
  return o.str();
}

struct Common {
  std::size_t m = 2, n = 1, grid = 256, a_nodes = 129, b_nodes = 256;
  double extent = 8, a_extent = 4, b_extent = 8;
  std::string alpha = "0.5", in, out;
  std::string shape = "gaussian", forward = "transversal", inverse = "fourier";
  double p = 1.5;
  int threads = 1;
  std::uint64_t seed = 7;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transversal Radon transforms: forward, inverse and verification"};
  app.require_subcommand(1);
  Common c;

  auto add_threads = [&](CLI::App* s) {
    s->add_option("--threads", c.threads, "worker threads (TRANSRADON_THREADS overrides)")
        ->check(CLI::PositiveNumber);
    s->add_option("--seed", c.seed, "phantom seed");
  };

  auto* ph = app.add_subcommand("phantom", "write a test field");
  ph->add_option("--m", c.m, "dimension")->check(CLI::Range(2, 3));
  auto* n_opt = ph->add_option("--n", c.n, "Heisenberg n; sets m = 2n + 1")->check(CLI::Range(1, 1));
  ph->add_option("--grid", c.grid, "nodes per axis");
  ph->add_option("--extent", c.extent, "half-width L of [-L, L)^m");
  ph->add_option("--method", c.shape, "gaussian or phi")->capture_default_str();
  ph->add_option("--out", c.out, "output sidecar (.json)")->required();
  add_threads(ph);

  auto* fw = app.add_subcommand("forward", "transform a stored field");
  fw->add_option("--in", c.in, "input field sidecar")->required();
  fw->add_option("--method", c.forward, "transversal, semyanistyi or heisenberg")
      ->capture_default_str();
  fw->add_option("--a-extent", c.a_extent, "a-range [-A, A] (Heisenberg: z-range)");
  fw->add_option("--a-nodes", c.a_nodes, "nodes per a axis");
  fw->add_option("--b-extent", c.b_extent, "b-range [-B, B)");
  fw->add_option("--b-nodes", c.b_nodes, "b nodes");
  fw->add_option("--alpha", c.alpha, "order re[,im] for semyanistyi");
  fw->add_option("--out", c.out, "output sidecar (.json)")->required();
  add_threads(fw);

  auto* iv = app.add_subcommand("invert", "reconstruct a field from stored data");
  iv->add_option("--in", c.in, "input sinogram or Heisenberg sidecar")->required();
  iv->add_option("--method", c.inverse,
                 "fourier, derivative, laplacian, semyanistyi, cbp (m = 2) or heisenberg")
      ->capture_default_str();
  iv->add_option("--grid", c.grid, "output nodes per axis");
  iv->add_option("--extent", c.extent, "output half-width");
  iv->add_option("--alpha", c.alpha, "semyanistyi pre-order alpha (beta = 1 - m - alpha)");
  iv->add_option("--out", c.out, "output sidecar (.json)")->required();
  add_threads(iv);

  std::string suite = "all";
  std::string report = "report.json";
  bool with_runtime = false;
  auto* vf = app.add_subcommand("verify", "run acceptance suites and write a JSON report");
  vf->add_option("--suite", suite, "identities, inversion, scaling or all")
      ->check(CLI::IsMember(suite_names()));
  vf->add_option("--out", report, "JSON report; curves go to the .csv next to it")
      ->capture_default_str();
  vf->add_flag("--runtime", with_runtime, "include runtimes (breaks byte-identical reruns)");
  add_threads(vf);

  auto* ck = app.add_subcommand("check", "single identity checks on a Gaussian");
  std::string which = "eq1";
  ck->add_option("which", which, "eq1, eq2, bound, measure or scaling")
      ->check(CLI::IsMember({"eq1", "eq2", "bound", "measure", "scaling"}));
  ck->add_option("--m", c.m, "dimension")->check(CLI::Range(2, 3));
  ck->add_option("--grid", c.grid, "nodes per axis");
  ck->add_option("--extent", c.extent, "half-width");
  ck->add_option("--alpha", c.alpha, "order re[,im]");
  ck->add_option("--p", c.p, "Lebesgue exponent");
  ck->add_option("--out", c.out, "JSON report (stdout if omitted)");
  add_threads(ck);

  auto* rp = app.add_subcommand("report", "summarize a JSON report");
  rp->add_option("--in", c.in, "report written by verify")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ph) {
      apply_threads(c.threads);
      if (n_opt->count()) c.m = 2 * c.n + 1;
      auto g = UniformGrid::centered(c.m, c.grid, c.extent);
      ScalarField f;
      if (c.shape == "gaussian")
        f = gaussian_phantom(g, {}, 1);
      else if (c.shape == "phi")
        f = phi_space_phantom(g, c.m == 2 ? PhiWindow{} : PhiWindow{0.6, 5.4, 0.5, 4, 16}, c.seed);
      else
        throw Error("phantom: --method must be gaussian or phi");
      save(c.out, f);
    } else if (*fw) {
      apply_threads(c.threads);
      ScalarField f = as_field(load_array(c.in));
      const std::size_t m = f.grid.dim();
      if (c.forward == "heisenberg") {
        require(m % 2 == 1, "forward: heisenberg needs an odd-dimensional field");
        save(c.out, radon_heisenberg(f, heisenberg_grid((m - 1) / 2, c.a_nodes, c.a_extent,
                                                        c.b_nodes, c.b_extent)));
      } else {
        auto G = sinogram_grid(m, c.a_nodes, c.a_extent, c.b_nodes, c.b_extent);
        Sinogram s = c.forward == "semyanistyi" ? semyanistyi_forward(f, G, parse_alpha(c.alpha))
                     : c.forward == "transversal"
                         ? radon_transversal(f, G)
                         : throw Error("forward: unknown --method " + c.forward);
        for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
        save(c.out, s);
      }
    } else if (*iv) {
      apply_threads(c.threads);
      StoredArray a = load_array(c.in);
      const std::size_t m = a.grid.dim();
      auto out = UniformGrid::centered(m, c.grid, c.extent);
      ScalarField f;
      if (c.inverse == "heisenberg") {
        f = invert_heisenberg(as_heisenberg(a), out);
      } else {
        Sinogram s = as_sinogram(a);
        if (c.inverse == "fourier") {
          f = invert_fourier(s, out).f;
        } else if (c.inverse == "derivative") {
          f = invert_derivative_odd(s, out, Placement::split);
        } else if (c.inverse == "laplacian") {
          f = invert_laplacian_odd(s, out);
        } else if (c.inverse == "semyanistyi") {
          cplx al = parse_alpha(c.alpha);
          f = invert_semyanistyi(s, out, al, 1.0 - double(m) - al);
        } else if (c.inverse == "cbp") {
          CbpResult r = cbp_reconstruct(s, out);
          for (const auto& n : r.notes) std::cerr << "note: " << n << "\n";
          f = r.f;
        } else {
          throw Error("invert: unknown --method " + c.inverse);
        }
      }
      for (const auto& n : f.notes) std::cerr << "note: " << n << "\n";
      save(c.out, f);
    } else if (*vf) {
      apply_threads(c.threads);
      SuiteConfig cfg;
      cfg.seed = c.seed;
      auto res = run_suite(suite, cfg, [](const CriterionResult& r) {
        std::cerr << "criterion " << r.id << " " << (r.pass ? "PASS" : "FAIL") << ": "
                  << r.summary << "\n";
      });
      write_text(report, suite_json(suite, cfg, res, with_runtime).dump(2) + "\n");
      write_text(csv_path(report), curves_csv(res));
      bool ok = true;
      for (const auto& r : res) ok = ok && r.pass;
      return ok ? 0 : 1;
    } else if (*ck) {
      apply_threads(c.threads);
      auto g = UniformGrid::centered(c.m, c.grid, c.extent);
      VerificationReport r;
      if (which == "eq1" || which == "eq2" || which == "bound") {
        ScalarField f = gaussian_phantom(g, {}, 1);
        cplx al = parse_alpha(c.alpha);
        r = which == "eq1"   ? check_eq1(f, al)
            : which == "eq2" ? check_eq2(f, al)
                             : check_weighted_bound(f, al.real(), c.p);
      } else if (which == "measure") {
        r = check_measure_change(MeasureDirection::sphere_to_plane, [](double) { return 1.0; }, c.m + 1);
      } else {
        MixedExponents e = transversal_exponents(c.m, c.p);
        r = scaling_exponent_test(
            [m = c.m](const double* x) { return std::exp(-norm2(x, m)); }, c.m, c.p, e.q, e.r,
            {0.5, 1, 2, 4});
      }
      std::string text = to_json(r).dump(2) + "\n";
      if (c.out.empty())
        std::cout << text;
      else
        write_text(c.out, text);
    } else if (*rp) {
      std::ifstream in(c.in);
      require(bool(in), "report: cannot read " + c.in);
      auto j = nlohmann::json::parse(in);
      int pass = 0, total = 0;
      for (const auto& cr : j.at("criteria")) {
        ++total;
        pass += cr.at("pass").get<bool>();
        std::cout << "criterion " << cr.at("id").get<int>() << " "
                  << (cr.at("pass").get<bool>() ? "PASS" : "FAIL") << " "
                  << cr.at("name").get<std::string>() << ": " << cr.at("summary").get<std::string>()
                  << "\n";
      }
      std::cout << pass << "/" << total << " criteria pass (suite "
                << j.at("suite").get<std::string>() << ", seed " << j.at("seed").get<std::uint64_t>()
                << ")\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
