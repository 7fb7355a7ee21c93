#pragma once

// H-polytopes {c : A c ≤ b}, their Chebyshev lift into (c, r)-space, active
// sets of lifted points, and the vertices of the dual multiplier polytope.
//
// Lifted row layout: row 0 is the radius row (0…0, −1 | 0); row j ≥ 1 is
// facet j−1 of the source polytope, (a_jᵀ, ‖a_j‖ | b_j).

#include "pvm/core.hpp"
#include "pvm/solvers.hpp"

#include <optional>

namespace pvm::polytope {

struct HPolytope {
  Matrix A;  // N×l facet normals
  Vector b;  // N offsets

  Index dim() const { return A.cols(); }
  Index rows() const { return A.rows(); }
};

struct LiftedPolytope {
  Matrix A_tilde;   // (N+1)×(l+1)
  Vector b_tilde;   // N+1
  Vector row_norms; // N, ‖a_j‖ of the source facets

  Index dim() const { return A_tilde.cols(); }
  Index rows() const { return A_tilde.rows(); }
  /// Objective q of the lifted LP: minimize −r.
  Vector objective() const {
    Vector q = Vector::Zero(dim());
    q[dim() - 1] = -1.0;
    return q;
  }
};

struct MultiplierVertexSet {
  std::vector<Vector> vertices;  // each indexed like active_set
  IndexSet active_set;           // lifted row indices

  std::size_t size() const { return vertices.size(); }
};

enum class ChebyshevStatus { Optimal, Empty };

struct ChebyshevSolution {
  ChebyshevStatus status = ChebyshevStatus::Empty;
  Vector center;
  double radius = 0.0;
  IndexSet active_indices;  // lifted indices tight at the LP vertex
  Vector z;                 // col(center, radius)
};

namespace detail {

inline void validate(const HPolytope& P) {
  pvm::detail::require(P.A.rows() >= 1 && P.A.cols() >= 1, "polytope: empty dimensions");
  pvm::detail::require(P.b.size() == P.A.rows(), "polytope: b size != A rows");
  pvm::detail::require(P.A.allFinite() && P.b.allFinite(), "polytope: non-finite entries");
}

}  // namespace detail

inline LiftedPolytope lift_chebyshev(const HPolytope& P) {
  detail::validate(P);
  const Index N = P.rows();
  const Index l = P.dim();
  LiftedPolytope L;
  L.A_tilde = Matrix::Zero(N + 1, l + 1);
  L.b_tilde = Vector::Zero(N + 1);
  L.row_norms.resize(N);
  L.A_tilde(0, l) = -1.0;
  for (Index j = 0; j < N; ++j) {
    const double nrm = P.A.row(j).norm();
    if (!(nrm >= kRowNormFloor)) throw DegenerateRowError(j, nrm);
    L.row_norms[j] = nrm;
    L.A_tilde.block(j + 1, 0, 1, l) = P.A.row(j);
    L.A_tilde(j + 1, l) = nrm;
    L.b_tilde[j + 1] = P.b[j];
  }
  return L;
}

inline solvers::LpProblem chebyshev_lp(const LiftedPolytope& L) {
  return solvers::LpProblem{L.objective(), L.A_tilde, L.b_tilde};
}

inline ChebyshevSolution chebyshev_ball(const LiftedPolytope& L) {
  const auto lp = solvers::solve_lp(chebyshev_lp(L));
  ChebyshevSolution out;
  switch (lp.status) {
    case solvers::LpStatus::Infeasible:
      out.status = ChebyshevStatus::Empty;
      return out;
    case solvers::LpStatus::Unbounded:
      throw UnboundedDomainError("Chebyshev LP unbounded: polytope contains arbitrarily large balls");
    case solvers::LpStatus::Optimal:
      break;
  }
  const Index l = L.dim() - 1;
  out.status = ChebyshevStatus::Optimal;
  out.z = lp.z;
  out.center = lp.z.head(l);
  out.radius = lp.z[l];
  out.active_indices = lp.active_indices;
  return out;
}

inline ChebyshevSolution chebyshev_ball(const HPolytope& P) {
  return chebyshev_ball(lift_chebyshev(P));
}

/// Lifted rows with |ã_jᵀz − b̃_j| ≤ eps. `z` must be feasible.
inline IndexSet almost_active_set(const Vector& z, const LiftedPolytope& L, double eps,
                                  double tol_feas = 1e-9) {
  pvm::detail::require(z.size() == L.dim(), "almost_active_set: z has wrong dimension");
  pvm::detail::require(eps > 0.0, "almost_active_set: eps must be positive");
  const Vector resid = L.A_tilde * z - L.b_tilde;
  IndexSet out;
  for (Index j = 0; j < L.rows(); ++j) {
    if (resid[j] > tol_feas * (1.0 + std::abs(L.b_tilde[j])))
      throw ContractViolation("almost_active_set: z violates lifted row " + std::to_string(j) +
                              " by " + std::to_string(resid[j]));
    if (std::abs(resid[j]) <= eps) out.push_back(j);
  }
  return out;
}

namespace detail {

inline Index numeric_rank(const Matrix& M, double threshold = 1e-10) {
  if (M.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(M);
  qr.setThreshold(threshold);
  return qr.rank();
}

}  // namespace detail

/// Residual and sign checks used when accepting a multiplier vertex.
inline constexpr double kMultiplierResidualTol = 1e-8;
inline constexpr double kMultiplierNegTol = 1e-10;
inline constexpr double kVertexDedupTol = 1e-7;

/// Enumerates the vertices of M = {μ ≥ 0 : Ã_{J0}ᵀ μ = −q} as basic feasible
/// solutions: every column subset of size rank(Ã_{J0}ᵀ) with full rank is
/// solved, kept if nonnegative and consistent, and deduplicated.
inline MultiplierVertexSet multiplier_vertices(const LiftedPolytope& L, const IndexSet& J0) {
  pvm::detail::require(!J0.empty(), "multiplier_vertices: empty active set");
  const Index k = static_cast<Index>(J0.size());
  Matrix At(L.dim(), k);
  for (Index c = 0; c < k; ++c) {
    const Index j = J0[static_cast<std::size_t>(c)];
    pvm::detail::require(j >= 0 && j < L.rows(), "multiplier_vertices: index out of range");
    At.col(c) = L.A_tilde.row(j).transpose();
  }
  const Vector rhs = -L.objective();
  const Index rank = detail::numeric_rank(At);

  MultiplierVertexSet out;
  out.active_set = J0;
  double worst_residual = std::numeric_limits<double>::infinity();
  pvm::detail::for_each_subset(k, rank, [&](const std::vector<Index>& basis) {
    Matrix sub(At.rows(), rank);
    for (Index c = 0; c < rank; ++c) sub.col(c) = At.col(basis[static_cast<std::size_t>(c)]);
    Eigen::ColPivHouseholderQR<Matrix> qr(sub);
    qr.setThreshold(1e-10);
    if (qr.rank() < rank) return;
    const Vector mu_b = qr.solve(rhs);
    if (mu_b.minCoeff() < -kMultiplierNegTol) return;
    Vector mu = Vector::Zero(k);
    for (Index c = 0; c < rank; ++c)
      mu[basis[static_cast<std::size_t>(c)]] = std::max(0.0, mu_b[c]);
    const double residual = (At * mu - rhs).lpNorm<Eigen::Infinity>();
    worst_residual = std::min(worst_residual, residual);
    if (residual > kMultiplierResidualTol) return;
    for (const Vector& v : out.vertices)
      if ((v - mu).lpNorm<Eigen::Infinity>() <= kVertexDedupTol) return;
    out.vertices.push_back(std::move(mu));
  });
  if (out.vertices.empty())
    throw NotOptimalError("multiplier_vertices: no nonnegative multiplier on active set of size " +
                          std::to_string(k) + " (best residual " +
                          std::to_string(worst_residual) + ")");
  return out;
}

}  // namespace pvm::polytope
