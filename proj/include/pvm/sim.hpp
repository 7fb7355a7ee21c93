#pragma once

// Closed-loop reach-avoid simulation: zero-order hold, RK4, per-step barrier
// and filter evaluation, typed terminations.

#include "pvm/barrier.hpp"
#include "pvm/filter.hpp"
#include "pvm/scenario.hpp"

#include <chrono>
#include <limits>
#include <optional>

namespace pvm::sim {

enum class FilterKind { Proposed, Baseline };

inline const char* to_string(FilterKind k) {
  return k == FilterKind::Proposed ? "proposed" : "baseline";
}

struct SimConfig {
  double dt = 0.01;
  double horizon = 20.0;
  double goal_tol = 0.1;
  FilterKind filter_kind = FilterKind::Proposed;
  std::uint64_t seed = 0;
  barrier::BarrierParams barrier;
  filter::FilterParams filter;

  void validate() const {
    pvm::detail::require(dt > 0.0 && std::isfinite(dt), "sim: dt must be positive");
    pvm::detail::require(horizon >= dt, "sim: horizon must be at least dt");
    pvm::detail::require(goal_tol > 0.0, "sim: goal_tol must be positive");
    pvm::detail::require(barrier.eps0 > 0.0 && barrier.eps_active > 0.0 && barrier.alpha > 0.0,
                         "sim: barrier parameters must be positive");
    pvm::detail::require(filter.gamma > 0.0 && filter.alpha > 0.0 && filter.eps0 > 0.0,
                         "sim: filter parameters must be positive");
    Eigen::LLT<Matrix> llt(filter.Q);
    pvm::detail::require(filter.Q.rows() == 2 && filter.Q.cols() == 2 &&
                             llt.info() == Eigen::Success,
                         "sim: Q must be a 2x2 positive-definite matrix");
  }
};

enum class Termination {
  GoalReached,
  HorizonExceeded,
  EmptyPolytope,
  InfeasibleInputSet,
  DegenerateRow,
  NumericFailure,
};

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::GoalReached: return "GoalReached";
    case Termination::HorizonExceeded: return "HorizonExceeded";
    case Termination::EmptyPolytope: return "EmptyPolytope";
    case Termination::InfeasibleInputSet: return "InfeasibleInputSet";
    case Termination::DegenerateRow: return "DegenerateRow";
    case Termination::NumericFailure: return "NumericFailure";
  }
  return "?";
}

struct StepRecord {
  double t = 0.0;
  Eigen::Vector4d state = Eigen::Vector4d::Zero();
  Eigen::Vector2d u_applied = Eigen::Vector2d::Zero();
  Eigen::Vector2d u_nominal = Eigen::Vector2d::Zero();
  std::optional<double> r_star;
  std::optional<double> h_r;
  double delta_star = 0.0;
  filter::FilterStatus filter_status = filter::FilterStatus::Ok;
  barrier::BarrierStatus barrier_status = barrier::BarrierStatus::Ok;
  Index lp_active_count = 0;
  Index mult_vertex_count = 0;
  std::chrono::nanoseconds solve_time{0};
};

struct SimLog {
  SimConfig config;
  scenario::UnicycleScenario scenario;
  std::vector<StepRecord> records;
  Termination termination = Termination::HorizonExceeded;
  std::string diagnostic;
  int slack_bound_violations = 0;  // steps with δ* > α ε0
};

class NumericBlowup : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One RK4 step with u held constant; θ is wrapped afterwards.
inline Vector step(const scenario::ControlAffineSystem& sys, const Vector& x, const Vector& u,
                   double dt) {
  const Vector k1 = sys.rhs(x, u);
  const Vector k2 = sys.rhs(x + 0.5 * dt * k1, u);
  const Vector k3 = sys.rhs(x + 0.5 * dt * k2, u);
  const Vector k4 = sys.rhs(x + dt * k3, u);
  Vector next = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw NumericBlowup("integrator produced a non-finite state");
  if (next.size() == 4) next[3] = scenario::wrap_angle(next[3]);
  return next;
}

inline SimLog run(const scenario::UnicycleScenario& sc, const SimConfig& cfg) {
  sc.validate();
  cfg.validate();
  SimLog log;
  log.config = cfg;
  log.scenario = sc;

  const auto sys = scenario::unicycle_system();
  const auto map = scenario::build_feasible_space_map(sc);
  const double slack_bound = cfg.filter.alpha * cfg.filter.eps0;
  const auto steps = static_cast<long>(std::floor(cfg.horizon / cfg.dt + 1e-9));

  Vector x = sc.x0;
  IndexSet warm;
  for (long i = 0;; ++i) {
    StepRecord rec;
    rec.t = static_cast<double>(i) * cfg.dt;
    rec.state = x;
    const Vector u0 = scenario::nominal_controller(x, sc.goal, sc.nominal);
    rec.u_nominal = u0;
    filter::FilterResult fr;
    try {
      const polytope::HPolytope psi = map.at(x);
      if (cfg.filter_kind == FilterKind::Proposed) {
        const auto ev = barrier::eval_barrier(map, x, cfg.barrier);
        rec.barrier_status = ev.status;
        if (ev.status == barrier::BarrierStatus::Ok) {
          rec.r_star = ev.r_star;
          rec.h_r = ev.h_r;
          rec.lp_active_count = static_cast<Index>(ev.J0.size());
          rec.mult_vertex_count = static_cast<Index>(ev.mult_vertices.size());
        }
        fr = filter::safety_filter(ev, sys.f(x), sys.g(x), psi, u0, cfg.filter, warm);
      } else {
        const auto cheb = polytope::chebyshev_ball(psi);
        if (cheb.status == polytope::ChebyshevStatus::Optimal) {
          rec.barrier_status = barrier::BarrierStatus::Ok;
          rec.r_star = cheb.radius;
          rec.h_r = cheb.radius - cfg.barrier.eps0;
          rec.lp_active_count = static_cast<Index>(cheb.active_indices.size());
        } else {
          rec.barrier_status = barrier::BarrierStatus::EmptyPolytope;
        }
        fr = filter::baseline_filter(psi, u0, cfg.filter.Q, warm);
      }
    } catch (const DegenerateRowError& e) {
      log.records.push_back(rec);
      log.termination = Termination::DegenerateRow;
      log.diagnostic = std::string(e.what()) + " at t = " + std::to_string(rec.t);
      return log;
    } catch (const std::runtime_error& e) {
      log.records.push_back(rec);
      log.termination = Termination::NumericFailure;
      log.diagnostic = std::string(e.what()) + " at t = " + std::to_string(rec.t);
      return log;
    }
    rec.filter_status = fr.status;
    rec.solve_time = fr.solve_time;
    if (fr.status == filter::FilterStatus::Ok) {
      rec.u_applied = fr.u_star;
      rec.delta_star = fr.delta_star;
      warm = fr.working_set;
    }
    log.records.push_back(rec);

    if (fr.status == filter::FilterStatus::EmptyOutputPolytope) {
      log.termination = Termination::EmptyPolytope;
      log.diagnostic = "feasible polytope empty at t = " + std::to_string(rec.t);
      return log;
    }
    if (fr.status == filter::FilterStatus::InfeasibleInputSet) {
      log.termination = Termination::InfeasibleInputSet;
      log.diagnostic = "input set empty at t = " + std::to_string(rec.t);
      return log;
    }
    if (fr.delta_star > slack_bound) ++log.slack_bound_violations;
    if ((x.head<2>() - sc.goal).norm() <= cfg.goal_tol) {
      log.termination = Termination::GoalReached;
      return log;
    }
    if (i >= steps) {
      log.termination = Termination::HorizonExceeded;
      return log;
    }
    try {
      x = step(sys, x, fr.u_star, cfg.dt);
    } catch (const NumericBlowup& e) {
      log.termination = Termination::NumericFailure;
      log.diagnostic = e.what();
      return log;
    }
  }
}

struct Summary {
  double min_r_star = std::numeric_limits<double>::quiet_NaN();
  double frac_time_r_above_eps0 = 0.0;
  double max_delta = 0.0;
  bool goal_reached = false;
  double elapsed = 0.0;  // simulated time at termination
  Eigen::Vector2d max_abs_u = Eigen::Vector2d::Zero();
  double min_h_r = std::numeric_limits<double>::quiet_NaN();
  std::size_t steps = 0;
};

inline Summary metrics(const SimLog& log) {
  pvm::detail::require(!log.records.empty(), "metrics: empty log");
  Summary s;
  s.goal_reached = log.termination == Termination::GoalReached;
  s.elapsed = log.records.back().t;
  s.steps = log.records.size();
  std::size_t above = 0;
  double min_r = std::numeric_limits<double>::infinity();
  double min_h = std::numeric_limits<double>::infinity();
  bool any_r = false;
  for (const auto& r : log.records) {
    if (r.r_star) {
      any_r = true;
      min_r = std::min(min_r, *r.r_star);
      min_h = std::min(min_h, *r.h_r);
      if (*r.r_star >= log.config.barrier.eps0) ++above;
    }
    s.max_delta = std::max(s.max_delta, r.delta_star);
    s.max_abs_u = s.max_abs_u.cwiseMax(r.u_applied.cwiseAbs());
  }
  if (any_r) {
    s.min_r_star = min_r;
    s.min_h_r = min_h;
  }
  s.frac_time_r_above_eps0 = static_cast<double>(above) / static_cast<double>(log.records.size());
  return s;
}

}  // namespace pvm::sim
