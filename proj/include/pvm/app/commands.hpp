#pragma once

// `pvm simulate` and `pvm compare`: run experiments from a config file and
// write CSV, SVG and manifest artifacts.

#include "pvm/io/config.hpp"
#include "pvm/io/csv.hpp"
#include "pvm/io/manifest.hpp"
#include "pvm/io/svg.hpp"
#include "pvm/sim.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

namespace pvm::app {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kConfigError = 1, kFailure = 2 };

struct SimulateOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<sim::FilterKind> filter;
  int case_index = 1;
  bool timing = false;
};

struct CompareOptions {
  std::string config_path;
  std::string out_dir;
  bool timing = false;
};

/// Worker cap: PVM_THREADS if set to a positive integer, else the hardware
/// concurrency.
inline unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PVM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

/// Name of the first obstacle whose safety disk contains the start.
inline std::optional<std::string> unsafe_start(const scenario::UnicycleScenario& s) {
  for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
    const auto& o = s.obstacles[i];
    if (std::hypot(s.x0[0] - o.x, s.x0[1] - o.y) <= o.radius)
      return "start lies inside the safety disk of obstacle " + std::to_string(i);
  }
  return std::nullopt;
}

struct RunArtifacts {
  sim::SimLog log;
  sim::Summary summary;
};

inline RunArtifacts execute_run(const io::ExperimentConfig& cfg, int case_index,
                                sim::FilterKind kind) {
  auto sc = cfg.scenario_for_case(case_index);
  auto sc_cfg = cfg.sim;
  sc_cfg.filter_kind = kind;
  RunArtifacts a;
  a.log = sim::run(sc, sc_cfg);
  a.summary = sim::metrics(a.log);
  return a;
}

inline std::string run_label(int case_index, sim::FilterKind kind) {
  return "case" + std::to_string(case_index) + "_" + sim::to_string(kind);
}

inline void write_run_files(const fs::path& dir, const RunArtifacts& a, int case_index,
                            double k_v, const io::CsvOptions& csv) {
  io::ensure_directory(dir);
  io::write_atomic(dir / "trajectory.csv",
                   [&](std::ostream& os) { io::write_trajectory_csv(os, a.log, csv); });
  io::write_atomic(dir / "summary.csv", [&](std::ostream& os) {
    io::write_summary_header(os);
    io::write_summary_row(os, {case_index, k_v, a.log.config.filter_kind, a.log.termination,
                               a.summary});
  });
  const bool proposed = a.log.config.filter_kind == sim::FilterKind::Proposed;
  const std::vector<io::svg::RunView> views{
      {&a.log, sim::to_string(a.log.config.filter_kind), proposed ? "#1f77b4" : "#2ca02c",
       !proposed}};
  char title[96];
  std::snprintf(title, sizeof title, "Case %d (k_v = %g), %s filter", case_index, k_v,
                sim::to_string(a.log.config.filter_kind));
  io::write_atomic(dir / "xy.svg", [&](std::ostream& os) {
    io::svg::write(os, title, io::svg::trajectory_panels(views));
  });
  io::write_atomic(dir / "radius.svg", [&](std::ostream& os) {
    io::svg::write(os, title, io::svg::radius_panels(views));
  });
  io::write_atomic(dir / "inputs.svg", [&](std::ostream& os) {
    io::svg::write(os, title, io::svg::input_panels(views));
  });
}

inline std::optional<io::ExperimentConfig> load_or_report(const std::string& path,
                                                          std::ostream& err) {
  try {
    return io::load_config(path);
  } catch (const io::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return std::nullopt;
  }
}

inline int cmd_simulate(const SimulateOptions& opt, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  const auto cfg = load_or_report(opt.config_path, err);
  if (!cfg) return kConfigError;
  if (opt.case_index < 1 || opt.case_index > static_cast<int>(cfg->k_v_cases.size())) {
    err << "config error: --case " << opt.case_index << " but the config lists "
        << cfg->k_v_cases.size() << " k_v case(s)\n";
    return kConfigError;
  }
  const auto kind = opt.filter.value_or(cfg->sim.filter_kind);
  const fs::path dir(opt.out_dir);

  io::RunManifest man;
  man.command = "simulate";
  man.config_path = opt.config_path;
  man.output_dir = opt.out_dir;
  man.case_labels = {"case" + std::to_string(opt.case_index)};
  man.filter_kinds = {sim::to_string(kind)};
  man.started_at = io::utc_timestamp();
  try {
    io::ensure_directory(dir);
    man.write(dir);

    int code = kOk;
    io::RunEntry entry{man.case_labels.front(), sim::to_string(kind), ".", "", ""};
    if (const auto why = unsafe_start(cfg->scenario_for_case(opt.case_index))) {
      err << "unsafe start: " << *why << '\n';
      entry.termination = "UnsafeStart";
      entry.diagnostic = *why;
      code = kFailure;
    } else {
      const auto a = execute_run(*cfg, opt.case_index, kind);
      write_run_files(dir, a, opt.case_index,
                      cfg->k_v_cases[static_cast<std::size_t>(opt.case_index - 1)],
                      {opt.timing});
      entry.termination = sim::to_string(a.log.termination);
      entry.diagnostic = a.log.diagnostic;
      out << run_label(opt.case_index, kind) << ": " << entry.termination;
      if (!a.log.diagnostic.empty()) out << " (" << a.log.diagnostic << ")";
      out << ", min r* = " << io::fmt_num(a.summary.min_r_star)
          << ", max delta = " << io::fmt_num(a.summary.max_delta) << '\n';
      if (a.log.termination != sim::Termination::GoalReached) code = kFailure;
    }
    man.runs.push_back(entry);
    man.status = code == kOk ? "complete" : "failed";
    man.exit_code = code;
    man.finished_at = io::utc_timestamp();
    man.write(dir);
    return code;
  } catch (const io::OutputError& e) {
    err << "output error: " << e.what() << '\n';
    return kFailure;
  }
}

inline int cmd_compare(const CompareOptions& opt, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  const auto cfg = load_or_report(opt.config_path, err);
  if (!cfg) return kConfigError;
  const fs::path dir(opt.out_dir);
  const int ncases = static_cast<int>(cfg->k_v_cases.size());
  const std::vector<sim::FilterKind> kinds{sim::FilterKind::Proposed, sim::FilterKind::Baseline};

  struct Job {
    int case_index;
    sim::FilterKind kind;
    std::optional<RunArtifacts> result;
    std::string error;
  };
  std::vector<Job> jobs;
  for (int c = 1; c <= ncases; ++c)
    for (auto k : kinds) jobs.push_back({c, k, std::nullopt, {}});

  io::RunManifest man;
  man.command = "compare";
  man.config_path = opt.config_path;
  man.output_dir = opt.out_dir;
  for (int c = 1; c <= ncases; ++c) man.case_labels.push_back("case" + std::to_string(c));
  for (auto k : kinds) man.filter_kinds.push_back(sim::to_string(k));
  man.started_at = io::utc_timestamp();
  try {
    io::ensure_directory(dir);
    man.write(dir);
  } catch (const io::OutputError& e) {
    err << "output error: " << e.what() << '\n';
    return kFailure;
  }

  if (const auto why = unsafe_start(cfg->scenario)) {
    err << "unsafe start: " << *why << '\n';
    man.status = "failed";
    man.exit_code = kFailure;
    man.finished_at = io::utc_timestamp();
    man.write(dir);
    return kFailure;
  }

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
      auto& job = jobs[j];
      try {
        job.result = execute_run(*cfg, job.case_index, job.kind);
        write_run_files(dir / run_label(job.case_index, job.kind), *job.result, job.case_index,
                        cfg->k_v_cases[static_cast<std::size_t>(job.case_index - 1)],
                        {opt.timing});
      } catch (const std::exception& e) {
        job.error = e.what();
      }
    }
  };
  const unsigned nthreads = worker_count(jobs.size());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool all_proposed = true;
  int code = kOk;
  try {
    io::write_atomic(dir / "summary.csv", [&](std::ostream& os) {
      io::write_summary_header(os);
      for (const auto& job : jobs)
        if (job.result)
          io::write_summary_row(os, {job.case_index,
                                     cfg->k_v_cases[static_cast<std::size_t>(job.case_index - 1)],
                                     job.kind, job.result->log.termination, job.result->summary});
    });
    for (int c = 1; c <= ncases; ++c) {
      std::vector<io::svg::RunView> views;
      for (const auto& job : jobs)
        if (job.case_index == c && job.result) {
          const bool p = job.kind == sim::FilterKind::Proposed;
          views.push_back({&job.result->log, p ? "proposed" : "baseline",
                           p ? "#1f77b4" : "#2ca02c", !p});
        }
      if (views.empty()) continue;
      char title[64];
      std::snprintf(title, sizeof title, "Case %d (k_v = %g)", c,
                    cfg->k_v_cases[static_cast<std::size_t>(c - 1)]);
      const std::string stem = "case" + std::to_string(c);
      io::write_atomic(dir / (stem + "_xy.svg"), [&](std::ostream& os) {
        io::svg::write(os, title, io::svg::trajectory_panels(views));
      });
      io::write_atomic(dir / (stem + "_radius.svg"), [&](std::ostream& os) {
        io::svg::write(os, title, io::svg::radius_panels(views));
      });
      io::write_atomic(dir / (stem + "_inputs.svg"), [&](std::ostream& os) {
        io::svg::write(os, title, io::svg::input_panels(views));
      });
    }
  } catch (const io::OutputError& e) {
    err << "output error: " << e.what() << '\n';
    code = kFailure;
  }

  for (const auto& job : jobs) {
    io::RunEntry entry{"case" + std::to_string(job.case_index), sim::to_string(job.kind),
                       run_label(job.case_index, job.kind), "", ""};
    if (job.result) {
      entry.termination = sim::to_string(job.result->log.termination);
      entry.diagnostic = job.result->log.diagnostic;
      out << run_label(job.case_index, job.kind) << ": " << entry.termination
          << ", min r* = " << io::fmt_num(job.result->summary.min_r_star)
          << ", max delta = " << io::fmt_num(job.result->summary.max_delta) << '\n';
    } else {
      entry.termination = "Error";
      entry.diagnostic = job.error;
      err << run_label(job.case_index, job.kind) << ": error: " << job.error << '\n';
    }
    if (job.kind == sim::FilterKind::Proposed &&
        !(job.result && job.result->summary.goal_reached))
      all_proposed = false;
    man.runs.push_back(entry);
  }
  if (!all_proposed) code = kFailure;
  man.status = code == kOk ? "complete" : "failed";
  man.exit_code = code;
  man.finished_at = io::utc_timestamp();
  try {
    man.write(dir);
  } catch (const io::OutputError& e) {
    err << "output error: " << e.what() << '\n';
    return kFailure;
  }
  return code;
}

}  // namespace pvm::app
