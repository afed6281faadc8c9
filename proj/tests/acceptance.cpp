// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Criterion 14 reruns the full suite and compares the JSON byte for byte.

#include <cstdio>

#include "transradon/suite.hpp"

using namespace transradon;

int main() {
  set_threads(4);
  SuiteConfig cfg;
  cfg.seed = 7;
  bool ok = true;
  auto t0 = std::chrono::steady_clock::now();
  auto first = run_suite("all", cfg, [&](const CriterionResult& r) {
    std::printf("criterion %2d %s  %s: %s\n", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.summary.c_str());
    std::fflush(stdout);
    ok = ok && r.pass;
  });
  const double sec = detail::seconds_since(t0);
  const std::string a = suite_json("all", cfg, first).dump(2);
  const std::string b = suite_json("all", cfg, run_suite("all", cfg)).dump(2);
  const bool same = a == b;
  const bool fast = sec <= 15 * 60;
  std::printf("criterion 14 %s  determinism: rerun JSON %s (%zu bytes); suite runtime %.0f s (<= 900 s)\n",
              same && fast ? "PASS" : "FAIL", same ? "byte-identical" : "DIFFERS", a.size(), sec);
  ok = ok && same && fast;
  return ok ? 0 : 1;
}
