#pragma once

// Trajectory and summary CSV writers. Formatting goes through snprintf with
// fixed precision so identical logs serialize to identical bytes.

#include "pvm/sim.hpp"

#include <cstdio>
#include <ostream>
#include <string>

namespace pvm::io {

inline constexpr const char* kTrajectoryHeader =
    "t,px,py,v,theta,a,omega,a_nom,omega_nom,r_star,h_r,delta,filter_status,barrier_status,"
    "n_active,n_vertices,solve_time_us";

inline constexpr const char* kSummaryHeader =
    "case,k_v,filter,termination,goal_reached,elapsed,steps,min_r_star,frac_r_above_eps0,"
    "max_delta,min_h_r,max_abs_a,max_abs_omega";

inline std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

struct CsvOptions {
  bool timing = false;  // real solve times break byte-reproducibility
};

inline void write_trajectory_csv(std::ostream& os, const sim::SimLog& log,
                                 const CsvOptions& opt = {}) {
  os << kTrajectoryHeader << '\n';
  for (const auto& r : log.records) {
    const double us = opt.timing ? static_cast<double>(r.solve_time.count()) / 1000.0 : 0.0;
    os << fmt_num(r.t) << ',' << fmt_num(r.state[0]) << ',' << fmt_num(r.state[1]) << ','
       << fmt_num(r.state[2]) << ',' << fmt_num(r.state[3]) << ',' << fmt_num(r.u_applied[0])
       << ',' << fmt_num(r.u_applied[1]) << ',' << fmt_num(r.u_nominal[0]) << ','
       << fmt_num(r.u_nominal[1]) << ',' << (r.r_star ? fmt_num(*r.r_star) : "") << ','
       << (r.h_r ? fmt_num(*r.h_r) : "") << ',' << fmt_num(r.delta_star) << ','
       << filter::to_string(r.filter_status) << ',' << barrier::to_string(r.barrier_status) << ','
       << r.lp_active_count << ',' << r.mult_vertex_count << ',' << fmt_num(us) << '\n';
  }
}

struct SummaryRow {
  int case_index = 0;
  double k_v = 0.0;
  sim::FilterKind filter = sim::FilterKind::Proposed;
  sim::Termination termination = sim::Termination::HorizonExceeded;
  sim::Summary summary;
};

inline void write_summary_header(std::ostream& os) { os << kSummaryHeader << '\n'; }

inline void write_summary_row(std::ostream& os, const SummaryRow& r) {
  const auto& s = r.summary;
  os << r.case_index << ',' << fmt_num(r.k_v) << ',' << sim::to_string(r.filter) << ','
     << sim::to_string(r.termination) << ',' << (s.goal_reached ? "true" : "false") << ','
     << fmt_num(s.elapsed) << ',' << s.steps << ',' << fmt_num(s.min_r_star) << ','
     << fmt_num(s.frac_time_r_above_eps0) << ',' << fmt_num(s.max_delta) << ','
     << fmt_num(s.min_h_r) << ',' << fmt_num(s.max_abs_u[0]) << ',' << fmt_num(s.max_abs_u[1])
     << '\n';
}

}  // namespace pvm::io
