// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance <pvm-binary> <config.toml>

#include "pvm/io/config.hpp"
#include "pvm/sim.hpp"
#include "pvm/testing/suites.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace pvm;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("criterion %d: %s  %s  (%s)\n", id, ok ? "PASS" : "FAIL", what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::string suite_detail(const pvm::testing::SuiteResult& r) {
  std::string s = r.name + " n=" + std::to_string(r.instances) + fmt(" worst=%.3g %.2fs", r.worst, r.seconds);
  if (!r.detail.empty()) s += ", " + r.detail;
  return s;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <pvm-binary> <config.toml>\n");
    return 2;
  }
  const std::string pvm_bin = argv[1];
  const std::string config = argv[2];

  {
    pvm::testing::SuiteOptions o;
    o.count = 500;
    const auto r = pvm::testing::chebyshev_suite(o, 1e-6);
    report(1, r.passed && r.instances >= 500 && r.seconds < 10.0,
           "Chebyshev ball vs vertex/grid oracle, 500 polytopes, tol 1e-6, triangle 1e-9, < 10 s",
           suite_detail(r));
  }
  {
    pvm::testing::SuiteOptions o;
    o.count = 150;
    const auto g = pvm::testing::directional_generic_suite(o, 1e-3, 1e-5);
    const auto d = pvm::testing::directional_degenerate_suite(o, 1e-6, 1e-5);
    const double secs = g.seconds + d.seconds;
    report(2, g.passed && d.passed && g.instances >= 100 && secs < 30.0,
           "directional derivative: generic |formula - FD| <= 1e-3 max(1,|v|) on >= 100 states, "
           "degenerate formula <= FD + 1e-6, < 30 s",
           suite_detail(g) + "; " + suite_detail(d));
  }
  {
    pvm::testing::SuiteOptions o;
    o.count = 200;
    const auto r = pvm::testing::multiplier_suite(o, 100, 1e-8, 1e-10, 1e-7);
    report(3, r.passed && r.instances >= 200,
           "multiplier vertices: 200 evaluations, stationarity 1e-8, mu >= -1e-10, hull 1e-7 "
           "for 100 points each",
           suite_detail(r));
  }
  {
    pvm::testing::SuiteOptions o;
    o.count = 300;
    const auto r = pvm::testing::filter_suite(o, 1e-6, 1e-7);
    report(4, r.passed && r.instances >= 300,
           "filter QP vs exhaustive KKT oracle, 300 instances, |du| <= 1e-6, input rows 1e-7",
           suite_detail(r));
  }

  io::ExperimentConfig cfg;
  try {
    cfg = io::load_config(config);
  } catch (const io::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }

  bool all_proposed = true;
  {
    bool ok = cfg.k_v_cases == std::vector<double>{0.5, 1.0, 2.0};
    std::string detail;
    for (int c = 1; c <= static_cast<int>(cfg.k_v_cases.size()); ++c) {
      auto sc = cfg.sim;
      sc.filter_kind = sim::FilterKind::Proposed;
      const auto t0 = std::chrono::steady_clock::now();
      const auto log = sim::run(cfg.scenario_for_case(c), sc);
      const double secs = since(t0);
      const auto m = sim::metrics(log);
      const bool run_ok = m.goal_reached && m.min_r_star > 0.0 &&
                          m.frac_time_r_above_eps0 >= 0.8 && m.max_delta <= 9.0 &&
                          m.max_delta <= 0.5 && secs <= 5.0;
      all_proposed = all_proposed && m.goal_reached;
      ok = ok && run_ok;
      detail += fmt("k_v=%g: ", cfg.k_v_cases[static_cast<std::size_t>(c - 1)]) +
                sim::to_string(log.termination) +
                fmt(" min r*=%.4f frac=%.3f max delta=%.3g %.2fs", m.min_r_star,
                    m.frac_time_r_above_eps0, m.max_delta, secs) +
                (c < 3 ? "; " : "");
    }
    const auto& p = cfg.sim;
    const auto& s = cfg.scenario;
    ok = ok && s.alpha1 == 10.0 && s.alpha2 == 6.0 && s.input_box.a_min == -2.0 &&
         s.input_box.a_max == 2.0 && s.input_box.omega_min == -2.0 &&
         s.input_box.omega_max == 2.0 && p.filter.Q == (Matrix(2, 2) << 10, 0, 0, 1).finished() &&
         p.filter.gamma == 500.0 && p.filter.alpha == 15.0 && p.barrier.eps0 == 0.6;
    report(5, ok,
           "proposed filter, k_v in {0.5,1,2}: goal reached, min r* > 0, frac(r* >= 0.6) >= 0.8, "
           "max delta <= 9 and <= 0.5, <= 5 s per run",
           detail);
  }
  {
    int failed = 0;
    std::string detail;
    for (int c = 1; c <= static_cast<int>(cfg.k_v_cases.size()); ++c) {
      auto sc = cfg.sim;
      sc.filter_kind = sim::FilterKind::Baseline;
      const auto log = sim::run(cfg.scenario_for_case(c), sc);
      if (log.termination == sim::Termination::InfeasibleInputSet ||
          log.termination == sim::Termination::HorizonExceeded)
        ++failed;
      detail += std::string("case ") + std::to_string(c) + ": " + sim::to_string(log.termination) +
                (c < 3 ? "; " : "");
    }
    report(6, failed >= 1 && all_proposed,
           "baseline fails in at least one case while every proposed run succeeds", detail);
  }
  {
    pvm::testing::SuiteOptions o;
    o.count = 20;
    const auto r = pvm::testing::invariance_suite(o, 1e-3, cfg.sim);
    report(7, r.passed && r.instances >= 20,
           "forward invariance on 20 random layouts: min h_r >= -1e-3", suite_detail(r));
  }
  {
    const fs::path base = fs::path(PVM_TEST_TMP) / "acceptance_determinism";
    fs::remove_all(base);
    fs::create_directories(base);
    bool ok = true;
    std::string detail;
    for (const char* run : {"a", "b"}) {
      const std::string cmd = "\"" + pvm_bin + "\" compare --config \"" + config + "\" --out \"" +
                              (base / run).string() + "\" > \"" + (base / run).string() +
                              ".log\" 2>&1";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) detail += std::string("run ") + run + " exited " + std::to_string(rc) + "; ";
    }
    int files = 0;
    for (const auto& e : fs::recursive_directory_iterator(base / "a")) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      const auto other = base / "b" / fs::relative(e.path(), base / "a");
      if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
        ok = false;
        detail += "differs: " + fs::relative(e.path(), base / "a").string() + "; ";
      }
    }
    ok = ok && files >= 7;
    detail += std::to_string(files) + " CSV files compared";
    report(8, ok, "pvm compare twice gives byte-identical CSVs", detail);
  }

  std::printf("acceptance: %s\n", failures == 0 ? "all criteria passed" : "FAILED");
  return failures == 0 ? 0 : 1;
}
