#pragma once

// Chebyshev-radius barrier h_r(x) = r*(x) − ε0 of a state-dependent polytope
// {c : a_j(x)ᵀ c ≤ b_j(x)} and its directional derivative through the
// vertices of the multiplier polytope at a selected LP solution z*(x).

#include "pvm/core.hpp"
#include "pvm/polytope.hpp"
#include "pvm/solvers.hpp"

#include <functional>
#include <sstream>

namespace pvm::barrier {

using polytope::HPolytope;
using polytope::LiftedPolytope;
using polytope::MultiplierVertexSet;

/// State Jacobians of every row: da_dx[j] is l×n, row j of db_dx is 1×n.
struct RowJacobians {
  std::vector<Matrix> da_dx;
  Matrix db_dx;
};

/// The family x ↦ {c : a_j(x)ᵀ c ≤ b_j(x)}. If `jacobians` is empty, central
/// finite differences with step 1e-6·max(1, |x_i|) are used.
struct ParametricPolytopeMap {
  Index state_dim = 0;
  Index output_dim = 0;
  Index row_count = 0;
  std::function<HPolytope(const Vector&)> rows;
  std::function<RowJacobians(const Vector&)> jacobians;

  HPolytope at(const Vector& x) const {
    pvm::detail::require(x.size() == state_dim, "map: state dimension mismatch");
    HPolytope P = rows(x);
    pvm::detail::require(P.A.rows() == row_count && P.A.cols() == output_dim &&
                             P.b.size() == row_count,
                         "map: row function returned wrong shape");
    return P;
  }

  RowJacobians jacobians_at(const Vector& x) const {
    if (jacobians) return jacobians(x);
    return finite_difference_jacobians(x);
  }

  RowJacobians finite_difference_jacobians(const Vector& x) const {
    RowJacobians J;
    J.da_dx.assign(static_cast<std::size_t>(row_count), Matrix::Zero(output_dim, state_dim));
    J.db_dx = Matrix::Zero(row_count, state_dim);
    for (Index i = 0; i < state_dim; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
      Vector xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const HPolytope Pp = at(xp), Pm = at(xm);
      for (Index j = 0; j < row_count; ++j) {
        J.da_dx[static_cast<std::size_t>(j)].col(i) =
            (Pp.A.row(j) - Pm.A.row(j)).transpose() / (2.0 * h);
        J.db_dx(j, i) = (Pp.b[j] - Pm.b[j]) / (2.0 * h);
      }
    }
    return J;
  }
};

struct BarrierParams {
  double eps0 = 0.6;
  double eps_active = 1e-4;
  double alpha = 15.0;
};

enum class BarrierStatus { Ok, EmptyPolytope };

inline const char* to_string(BarrierStatus s) {
  return s == BarrierStatus::Ok ? "Ok" : "EmptyPolytope";
}

struct BarrierEval {
  BarrierStatus status = BarrierStatus::EmptyPolytope;
  double r_star = 0.0;
  double h_r = 0.0;
  Vector z_star;                 // col(c*, r*) after the min-norm tie-break
  Vector z_lp;                   // raw simplex vertex
  double tie_break_shift = 0.0;  // ‖z_star − z_lp‖∞
  IndexSet J0;
  MultiplierVertexSet mult_vertices;
  Matrix dLdx_rows;              // K×n
  LiftedPolytope lift;
  HPolytope polytope;
};

struct GammaTerm {
  double constant = 0.0;  // c_k
  RowVector input_row;    // d_k
};

/// ∂ₓL(μ, z, x) = Σ_{j∈J0} μ_j (zᵀ ∂ã_j/∂x − ∂b̃_j/∂x). J0 holds lifted
/// indices; index 0 (radius row) contributes nothing.
inline RowVector grad_L_x(const Vector& mu, const Vector& z, const HPolytope& P,
                          const RowJacobians& jac, const IndexSet& J0) {
  pvm::detail::require(mu.size() == static_cast<Index>(J0.size()),
                       "grad_L_x: multiplier/active-set size mismatch");
  const Index l = P.dim();
  pvm::detail::require(z.size() == l + 1, "grad_L_x: z must be col(c, r)");
  const Index n = jac.db_dx.cols();
  const Vector c = z.head(l);
  const double r = z[l];
  RowVector g = RowVector::Zero(n);
  for (std::size_t k = 0; k < J0.size(); ++k) {
    const Index lifted = J0[k];
    if (lifted == 0) continue;
    const Index j = lifted - 1;
    const RowVector a = P.A.row(j);
    const double nrm = a.norm();
    if (!(nrm >= kRowNormFloor)) throw DegenerateRowError(j, nrm);
    const Matrix& da = jac.da_dx[static_cast<std::size_t>(j)];
    const RowVector za = c.transpose() * da + r * (a / nrm) * da;
    g += mu[static_cast<Index>(k)] * (za - jac.db_dx.row(j));
  }
  return g;
}

inline RowVector grad_L_x(const Vector& mu, const Vector& z, const Vector& x,
                          const ParametricPolytopeMap& map, const IndexSet& J0) {
  return grad_L_x(mu, z, map.at(x), map.jacobians_at(x), J0);
}

namespace detail {

// argmin zᵀz over the optimal face {Ã z ≤ b̃, r = r*}, started at the LP vertex.
inline Vector min_norm_selection(const LiftedPolytope& L, const Vector& z_lp) {
  const Index d = L.dim();
  solvers::QpProblem qp;
  qp.H = 2.0 * Matrix::Identity(d, d);
  qp.f = Vector::Zero(d);
  qp.ineq_A = L.A_tilde;
  qp.ineq_b = L.b_tilde;
  qp.eq_A = Matrix::Zero(1, d);
  qp.eq_A(0, d - 1) = 1.0;
  qp.eq_b = Vector::Constant(1, z_lp[d - 1]);
  solvers::QpOptions opt;
  opt.initial_point = z_lp;
  const auto sol = solvers::solve_qp(qp, opt);
  if (sol.status != solvers::QpStatus::Optimal) return z_lp;
  return sol.z;
}

}  // namespace detail

inline BarrierEval eval_barrier(const ParametricPolytopeMap& map, const Vector& x,
                                const BarrierParams& p = {}) {
  pvm::detail::require(p.eps0 > 0.0 && p.eps_active > 0.0 && p.alpha > 0.0,
                       "barrier parameters must be positive");
  BarrierEval ev;
  ev.polytope = map.at(x);
  ev.lift = polytope::lift_chebyshev(ev.polytope);
  const auto cheb = polytope::chebyshev_ball(ev.lift);
  if (cheb.status == polytope::ChebyshevStatus::Empty) {
    ev.status = BarrierStatus::EmptyPolytope;
    return ev;
  }
  ev.status = BarrierStatus::Ok;
  ev.z_lp = cheb.z;
  ev.z_star = detail::min_norm_selection(ev.lift, cheb.z);
  ev.tie_break_shift = (ev.z_star - ev.z_lp).lpNorm<Eigen::Infinity>();
  ev.r_star = ev.z_star[ev.z_star.size() - 1];
  ev.h_r = ev.r_star - p.eps0;
  ev.J0 = polytope::almost_active_set(ev.z_star, ev.lift, p.eps_active);
  try {
    ev.mult_vertices = polytope::multiplier_vertices(ev.lift, ev.J0);
  } catch (const NotOptimalError& e) {
    std::ostringstream msg;
    msg << "eval_barrier: " << e.what() << " at x = " << pvm::detail::fmt_vec(x)
        << ", J0 = {";
    for (std::size_t i = 0; i < ev.J0.size(); ++i) msg << (i ? "," : "") << ev.J0[i];
    msg << "}, residuals = " << pvm::detail::fmt_vec(ev.lift.A_tilde * ev.z_star - ev.lift.b_tilde);
    throw InternalInconsistency(msg.str());
  }
  const RowJacobians jac = map.jacobians_at(x);
  const Index K = static_cast<Index>(ev.mult_vertices.size());
  ev.dLdx_rows.resize(K, map.state_dim);
  for (Index k = 0; k < K; ++k)
    ev.dLdx_rows.row(k) = grad_L_x(ev.mult_vertices.vertices[static_cast<std::size_t>(k)],
                                   ev.z_star, ev.polytope, jac, ev.J0);
  return ev;
}

/// min_k −∂ₓL(μᵏ, z*, x)·d: the derivative of h_r along d at the selected z*.
inline double directional_derivative(const BarrierEval& ev, const Vector& d) {
  pvm::detail::require(ev.status == BarrierStatus::Ok, "directional_derivative: barrier not Ok");
  pvm::detail::require(d.size() == ev.dLdx_rows.cols(), "directional_derivative: bad direction");
  pvm::detail::require(d.allFinite(), "directional_derivative: non-finite direction");
  return (-ev.dLdx_rows * d).minCoeff();
}

class OracleUndefined : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One-sided finite difference (r*(x+σd) − r*(x))/σ from two Chebyshev LPs.
/// Test oracle only; it shares nothing with the multiplier route.
inline double fd_directional_oracle(const ParametricPolytopeMap& map, const Vector& x,
                                    const Vector& d, const BarrierParams& /*p*/, double sigma) {
  pvm::detail::require(sigma > 0.0, "fd oracle: sigma must be positive");
  const auto c0 = polytope::chebyshev_ball(map.at(x));
  const auto c1 = polytope::chebyshev_ball(map.at(x + sigma * d));
  if (c0.status != polytope::ChebyshevStatus::Optimal ||
      c1.status != polytope::ChebyshevStatus::Optimal)
    throw OracleUndefined("fd oracle: polytope empty at an endpoint");
  return (c1.radius - c0.radius) / sigma;
}

/// Γ(μᵏ, x, u) = c_k + d_k u with c_k = −∂ₓL_k f(x), d_k = −∂ₓL_k g(x).
inline std::vector<GammaTerm> gamma_affine(const BarrierEval& ev, const Vector& f_x,
                                           const Matrix& g_x) {
  pvm::detail::require(ev.status == BarrierStatus::Ok, "gamma_affine: barrier not Ok");
  pvm::detail::require(f_x.size() == ev.dLdx_rows.cols() && g_x.rows() == f_x.size(),
                       "gamma_affine: dimension mismatch");
  std::vector<GammaTerm> out;
  out.reserve(static_cast<std::size_t>(ev.dLdx_rows.rows()));
  for (Index k = 0; k < ev.dLdx_rows.rows(); ++k) {
    const RowVector row = ev.dLdx_rows.row(k);
    out.push_back(GammaTerm{-row.dot(f_x), -row * g_x});
  }
  return out;
}

}  // namespace pvm::barrier
