#pragma once

// Slacked QP safety filter over (u, δ) and the plain projection filter.

#include "pvm/barrier.hpp"
#include "pvm/core.hpp"
#include "pvm/polytope.hpp"
#include "pvm/solvers.hpp"

#include <chrono>

namespace pvm::filter {

using polytope::HPolytope;

struct FilterParams {
  Matrix Q = (Matrix(2, 2) << 10.0, 0.0, 0.0, 1.0).finished();
  double gamma = 500.0;
  double alpha = 15.0;
  double eps0 = 0.6;
};

enum class FilterStatus { Ok, InfeasibleInputSet, EmptyOutputPolytope };

inline const char* to_string(FilterStatus s) {
  switch (s) {
    case FilterStatus::Ok: return "Ok";
    case FilterStatus::InfeasibleInputSet: return "InfeasibleInputSet";
    case FilterStatus::EmptyOutputPolytope: return "EmptyOutputPolytope";
  }
  return "?";
}

struct FilterResult {
  FilterStatus status = FilterStatus::InfeasibleInputSet;
  Vector u_star;
  double delta_star = 0.0;
  int qp_iterations = 0;
  std::chrono::nanoseconds solve_time{0};
  IndexSet working_set;  // feed back as the next warm start
};

/// The assembled QP, exposed so tests can hand it to an independent solver.
/// Variables are (u, δ); rows are [vertex constraints; Ψ rows; −δ ≤ 0].
inline solvers::QpProblem safety_filter_qp(const std::vector<barrier::GammaTerm>& gamma_terms,
                                           double h_r, const HPolytope& psi, const Vector& u0,
                                           const FilterParams& p) {
  const Index m = u0.size();
  pvm::detail::require(p.Q.rows() == m && p.Q.cols() == m, "filter: Q has wrong size");
  pvm::detail::require(psi.A.cols() == m, "filter: Ψ dimension != input dimension");
  pvm::detail::require(p.gamma > 0.0 && p.alpha > 0.0, "filter: gamma and alpha must be positive");
  const Index K = static_cast<Index>(gamma_terms.size());
  const Index np = psi.A.rows();
  solvers::QpProblem qp;
  qp.H = Matrix::Zero(m + 1, m + 1);
  qp.H.topLeftCorner(m, m) = p.Q + p.Q.transpose();
  qp.H(m, m) = 2.0 * p.gamma;
  qp.f = Vector::Zero(m + 1);
  qp.f.head(m) = -(p.Q + p.Q.transpose()) * u0;
  qp.ineq_A = Matrix::Zero(K + np + 1, m + 1);
  qp.ineq_b = Vector::Zero(K + np + 1);
  // c_k + d_k u ≥ −α h_r − δ   ⇔   −d_k u − δ ≤ α h_r + c_k
  for (Index k = 0; k < K; ++k) {
    const auto& g = gamma_terms[static_cast<std::size_t>(k)];
    pvm::detail::require(g.input_row.size() == m, "filter: Γ row has wrong size");
    qp.ineq_A.block(k, 0, 1, m) = -g.input_row;
    qp.ineq_A(k, m) = -1.0;
    qp.ineq_b[k] = p.alpha * h_r + g.constant;
  }
  qp.ineq_A.block(K, 0, np, m) = psi.A;
  qp.ineq_b.segment(K, np) = psi.b;
  qp.ineq_A(K + np, m) = -1.0;
  qp.eq_A = Matrix(0, m + 1);
  qp.eq_b = Vector(0);
  return qp;
}

inline FilterResult safety_filter(const barrier::BarrierEval& ev, const Vector& f_x,
                                  const Matrix& g_x, const HPolytope& psi, const Vector& u0,
                                  const FilterParams& p, const IndexSet& warm_start = {}) {
  FilterResult out;
  if (ev.status != barrier::BarrierStatus::Ok) {
    out.status = FilterStatus::EmptyOutputPolytope;
    return out;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto terms = barrier::gamma_affine(ev, f_x, g_x);
  const auto qp = safety_filter_qp(terms, ev.h_r, psi, u0, p);
  solvers::QpOptions opt;
  opt.working_set_hint = warm_start;
  const auto sol = solvers::solve_qp(qp, opt);
  out.solve_time = std::chrono::steady_clock::now() - t0;
  out.qp_iterations = sol.iterations;
  if (sol.status != solvers::QpStatus::Optimal) {
    out.status = FilterStatus::InfeasibleInputSet;
    return out;
  }
  const Index m = u0.size();
  out.status = FilterStatus::Ok;
  out.u_star = sol.z.head(m);
  out.delta_star = std::max(0.0, sol.z[m]);
  out.working_set = sol.working_set;
  return out;
}

inline solvers::QpProblem baseline_filter_qp(const HPolytope& psi, const Vector& u0,
                                             const Matrix& Q) {
  const Index m = u0.size();
  pvm::detail::require(Q.rows() == m && Q.cols() == m, "baseline: Q has wrong size");
  pvm::detail::require(psi.A.cols() == m, "baseline: Ψ dimension != input dimension");
  solvers::QpProblem qp;
  qp.H = Q + Q.transpose();
  qp.f = -(Q + Q.transpose()) * u0;
  qp.ineq_A = psi.A;
  qp.ineq_b = psi.b;
  qp.eq_A = Matrix(0, m);
  qp.eq_b = Vector(0);
  return qp;
}

inline FilterResult baseline_filter(const HPolytope& psi, const Vector& u0, const Matrix& Q,
                                    const IndexSet& warm_start = {}) {
  FilterResult out;
  const auto t0 = std::chrono::steady_clock::now();
  solvers::QpOptions opt;
  opt.working_set_hint = warm_start;
  const auto sol = solvers::solve_qp(baseline_filter_qp(psi, u0, Q), opt);
  out.solve_time = std::chrono::steady_clock::now() - t0;
  out.qp_iterations = sol.iterations;
  if (sol.status != solvers::QpStatus::Optimal) {
    out.status = FilterStatus::InfeasibleInputSet;
    return out;
  }
  out.status = FilterStatus::Ok;
  out.u_star = sol.z;
  out.delta_star = 0.0;
  out.working_set = sol.working_set;
  return out;
}

}  // namespace pvm::filter
