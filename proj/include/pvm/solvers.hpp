#pragma once

// Dense LP and strictly convex QP solvers for desk-scale problems.
//
//   LP:  minimize  costᵀ z            subject to  A z ≤ b
//   QP:  minimize  ½ zᵀ H z + fᵀ z    subject to  A z ≤ b,  E z = e
//
// The LP is a two-phase tableau simplex with Bland's rule on row-equilibrated
// data, so vertices, active sets and multipliers come out exact and
// reproducible. The QP is a primal active-set method seeded either from a
// caller-supplied working set, a feasible point, or a phase-1 LP vertex.

#include "pvm/core.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace pvm::solvers {

enum class LpStatus { Optimal, Infeasible, Unbounded };
enum class QpStatus { Optimal, Infeasible };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

inline const char* to_string(QpStatus s) {
  return s == QpStatus::Optimal ? "Optimal" : "Infeasible";
}

struct LpProblem {
  Vector cost;
  Matrix ineq_A;
  Vector ineq_b;
};

struct LpOptions {
  double tol_feas = 1e-9;
  double tol_active = 1e-9;
  int max_iterations = 20000;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector z;            // valid iff Optimal
  double objective = 0.0;
  IndexSet active_indices;
  Vector multipliers;  // μ ≥ 0 with Aᵀμ = −cost, valid iff Optimal
  Vector ray;          // feasible descent direction, valid iff Unbounded
  int iterations = 0;
};

struct QpProblem {
  Matrix H;
  Vector f;
  Matrix ineq_A;
  Vector ineq_b;
  Matrix eq_A;  // may have zero rows
  Vector eq_b;
};

struct QpOptions {
  /// Feasible starting point; ignored if it violates a constraint.
  std::optional<Vector> initial_point;
  /// Inequalities assumed active at the optimum (typically the previous
  /// solve's working set); ignored if the implied point is infeasible.
  IndexSet working_set_hint;
  int max_iterations = 2000;
  double tol_feas = 1e-9;
};

struct QpSolution {
  QpStatus status = QpStatus::Infeasible;
  Vector z;
  double objective = 0.0;
  Vector multipliers;     // one per inequality, ≥ 0
  Vector eq_multipliers;  // one per equality
  IndexSet working_set;   // inequalities in the final working set
  int iterations = 0;
  bool warm_started = false;
};

namespace detail {

inline constexpr double kPivotTol = 1e-11;
inline constexpr double kReducedCostTol = 1e-11;

inline void validate_lp(const LpProblem& p) {
  const Index d = p.cost.size();
  pvm::detail::require(d >= 1, "LP: need at least one variable");
  pvm::detail::require(p.ineq_A.rows() >= 1, "LP: need at least one constraint");
  pvm::detail::require(p.ineq_A.cols() == d, "LP: ineq_A column count != cost size");
  pvm::detail::require(p.ineq_b.size() == p.ineq_A.rows(), "LP: ineq_b size != ineq_A rows");
  pvm::detail::require(p.cost.allFinite() && p.ineq_A.allFinite() && p.ineq_b.allFinite(),
                       "LP: non-finite input");
}

// Dense simplex tableau over x ≥ 0 with equality rows T x = rhs.
class Tableau {
 public:
  Tableau(Matrix rows, Vector rhs, std::vector<Index> basis)
      : T_(std::move(rows)), rhs_(std::move(rhs)), basis_(std::move(basis)) {}

  Index rows() const { return T_.rows(); }
  Index cols() const { return T_.cols(); }
  const std::vector<Index>& basis() const { return basis_; }
  const Vector& reduced_costs() const { return rc_; }
  double entry(Index r, Index c) const { return T_(r, c); }
  double rhs(Index r) const { return rhs_[r]; }

  void set_cost(const Vector& c) {
    rc_ = c;
    for (Index i = 0; i < rows(); ++i) {
      const double cb = c[basis_[static_cast<std::size_t>(i)]];
      if (cb != 0.0) rc_ -= cb * T_.row(i).transpose();
    }
  }

  void pivot(Index r, Index c) {
    const double piv = T_(r, c);
    T_.row(r) /= piv;
    rhs_[r] /= piv;
    T_(r, c) = 1.0;
    for (Index i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = T_(i, c);
      if (f == 0.0) continue;
      T_.row(i) -= f * T_.row(r);
      rhs_[i] -= f * rhs_[r];
      T_(i, c) = 0.0;
      if (rhs_[i] < 0.0 && rhs_[i] > -1e-13) rhs_[i] = 0.0;
    }
    const double fc = rc_[c];
    if (fc != 0.0) {
      rc_ -= fc * T_.row(r).transpose();
      rc_[c] = 0.0;
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  struct Outcome {
    bool unbounded = false;
    Index entering = -1;
    int iterations = 0;
  };

  // Bland's rule: lowest-index improving column, ties in the ratio test
  // broken by the lowest basic index.
  Outcome optimize(Index allowed_cols, int max_iter) {
    Outcome out;
    for (; out.iterations < max_iter; ++out.iterations) {
      Index enter = -1;
      for (Index j = 0; j < allowed_cols; ++j) {
        if (rc_[j] < -kReducedCostTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return out;
      Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < rows(); ++i) {
        const double a = T_(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = std::max(rhs_[i], 0.0) / a;
        if (leave < 0) {
          best = ratio;
          leave = i;
          continue;
        }
        const double tie_tol = 1e-12 * (1.0 + best);
        if (ratio < best - tie_tol) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + tie_tol &&
                   basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave < 0) {
        out.unbounded = true;
        out.entering = enter;
        return out;
      }
      pivot(leave, enter);
    }
    throw InternalInconsistency("simplex: iteration limit reached");
  }

 private:
  Matrix T_;
  Vector rhs_;
  std::vector<Index> basis_;
  Vector rc_;
};

}  // namespace detail

inline LpSolution solve_lp(const LpProblem& p, const LpOptions& opt = {}) {
  detail::validate_lp(p);
  const Index d = p.cost.size();
  const Index m = p.ineq_A.rows();

  Vector scale(m);
  for (Index i = 0; i < m; ++i) {
    const double s = p.ineq_A.row(i).cwiseAbs().maxCoeff();
    scale[i] = s > 0.0 ? s : 1.0;
  }

  // Columns: z⁺ [0,d), z⁻ [d,2d), slack [2d,2d+m), artificial [2d+m, ...).
  Index n_art = 0;
  for (Index i = 0; i < m; ++i)
    if (p.ineq_b[i] / scale[i] < 0.0) ++n_art;
  const Index n_struct = 2 * d + m;
  const Index n_cols = n_struct + n_art;

  Matrix T = Matrix::Zero(m, n_cols);
  Vector rhs(m);
  std::vector<Index> basis(static_cast<std::size_t>(m));
  Index art = n_struct;
  for (Index i = 0; i < m; ++i) {
    const RowVector a = p.ineq_A.row(i) / scale[i];
    const double b = p.ineq_b[i] / scale[i];
    const double sign = b < 0.0 ? -1.0 : 1.0;
    T.block(i, 0, 1, d) = sign * a;
    T.block(i, d, 1, d) = -sign * a;
    T(i, 2 * d + i) = sign;
    rhs[i] = sign * b;
    if (sign < 0.0) {
      T(i, art) = 1.0;
      basis[static_cast<std::size_t>(i)] = art++;
    } else {
      basis[static_cast<std::size_t>(i)] = 2 * d + i;
    }
  }

  detail::Tableau tab(std::move(T), std::move(rhs), std::move(basis));
  LpSolution sol;

  if (n_art > 0) {
    Vector c1 = Vector::Zero(n_cols);
    c1.tail(n_art).setOnes();
    tab.set_cost(c1);
    auto phase1 = tab.optimize(n_cols, opt.max_iterations);
    sol.iterations += phase1.iterations;
    double infeas = 0.0;
    for (Index i = 0; i < m; ++i)
      if (tab.basis()[static_cast<std::size_t>(i)] >= n_struct) infeas += tab.rhs(i);
    if (infeas > opt.tol_feas) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible; rows
    // where that fails are redundant and have zeros in every real column.
    for (Index i = 0; i < m; ++i) {
      if (tab.basis()[static_cast<std::size_t>(i)] < n_struct) continue;
      for (Index j = 0; j < n_struct; ++j) {
        if (std::abs(tab.entry(i, j)) > 1e-9) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  Vector c2 = Vector::Zero(n_cols);
  c2.head(d) = p.cost;
  c2.segment(d, d) = -p.cost;
  tab.set_cost(c2);
  auto phase2 = tab.optimize(n_struct, opt.max_iterations);
  sol.iterations += phase2.iterations;

  auto primal = [&]() {
    Vector x = Vector::Zero(n_cols);
    for (Index i = 0; i < m; ++i) x[tab.basis()[static_cast<std::size_t>(i)]] = tab.rhs(i);
    return x;
  };

  if (phase2.unbounded) {
    sol.status = LpStatus::Unbounded;
    Vector dir = Vector::Zero(n_cols);
    dir[phase2.entering] = 1.0;
    for (Index i = 0; i < m; ++i)
      dir[tab.basis()[static_cast<std::size_t>(i)]] -= tab.entry(i, phase2.entering);
    sol.ray = dir.head(d) - dir.segment(d, d);
    const Vector x = primal();
    sol.z = x.head(d) - x.segment(d, d);
    return sol;
  }

  const Vector x = primal();
  sol.status = LpStatus::Optimal;
  sol.z = x.head(d) - x.segment(d, d);
  sol.objective = p.cost.dot(sol.z);
  sol.multipliers.resize(m);
  for (Index i = 0; i < m; ++i) {
    const double mu = std::max(tab.reduced_costs()[2 * d + i], 0.0);
    sol.multipliers[i] = mu / scale[i];
  }
  const Vector resid = p.ineq_b - p.ineq_A * sol.z;
  for (Index i = 0; i < m; ++i)
    if (std::abs(resid[i]) / scale[i] <= opt.tol_active) sol.active_indices.push_back(i);
  return sol;
}

namespace detail {

inline void validate_qp(const QpProblem& p) {
  const Index d = p.H.rows();
  pvm::detail::require(d >= 1 && p.H.cols() == d, "QP: H must be square and nonempty");
  pvm::detail::require(p.f.size() == d, "QP: f size != H size");
  pvm::detail::require(p.ineq_A.cols() == d || p.ineq_A.rows() == 0, "QP: ineq_A columns");
  pvm::detail::require(p.ineq_b.size() == p.ineq_A.rows(), "QP: ineq_b size");
  pvm::detail::require(p.eq_A.cols() == d || p.eq_A.rows() == 0, "QP: eq_A columns");
  pvm::detail::require(p.eq_b.size() == p.eq_A.rows(), "QP: eq_b size");
  pvm::detail::require(p.H.allFinite() && p.f.allFinite() && p.ineq_A.allFinite() &&
                           p.ineq_b.allFinite() && p.eq_A.allFinite() && p.eq_b.allFinite(),
                       "QP: non-finite input");
  const double hscale = std::max(1.0, p.H.cwiseAbs().maxCoeff());
  pvm::detail::require((p.H - p.H.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * hscale,
                       "QP: H not symmetric");
  Eigen::LLT<Matrix> llt(p.H);
  pvm::detail::require(llt.info() == Eigen::Success, "QP: H not positive definite");
}

inline Matrix rows_of(const Matrix& A, Index d) {
  return A.rows() == 0 ? Matrix(0, d) : A;
}

struct EqpResult {
  bool ok = false;
  Vector step;
  Vector lambda;  // eq rows first, then working inequalities
};

// Solves for the step p that minimizes the model with the working rows held
// at equality (including a correction for their current residual).
inline EqpResult solve_eqp(const QpProblem& p, const Vector& x, const IndexSet& work) {
  const Index d = p.H.rows();
  const Index ne = p.eq_A.rows();
  const Index nw = static_cast<Index>(work.size());
  const Index k = ne + nw;
  Matrix K = Matrix::Zero(d + k, d + k);
  Vector rhs(d + k);
  K.topLeftCorner(d, d) = p.H;
  rhs.head(d) = -(p.H * x + p.f);
  for (Index i = 0; i < ne; ++i) {
    K.block(d + i, 0, 1, d) = p.eq_A.row(i);
    K.block(0, d + i, d, 1) = p.eq_A.row(i).transpose();
    rhs[d + i] = p.eq_b[i] - p.eq_A.row(i).dot(x);
  }
  for (Index w = 0; w < nw; ++w) {
    const Index i = work[static_cast<std::size_t>(w)];
    K.block(d + ne + w, 0, 1, d) = p.ineq_A.row(i);
    K.block(0, d + ne + w, d, 1) = p.ineq_A.row(i).transpose();
    rhs[d + ne + w] = p.ineq_b[i] - p.ineq_A.row(i).dot(x);
  }
  Eigen::FullPivLU<Matrix> lu(K);
  lu.setThreshold(1e-13);
  EqpResult r;
  if (!lu.isInvertible()) return r;
  const Vector sol = lu.solve(rhs);
  r.ok = true;
  r.step = sol.head(d);
  r.lambda = sol.tail(k);
  return r;
}

// Orthonormal basis of the span of the equality and working rows.
inline Matrix working_span(const QpProblem& p, const IndexSet& work) {
  const Index d = p.H.rows();
  const Index k = p.eq_A.rows() + static_cast<Index>(work.size());
  if (k == 0) return Matrix(d, 0);
  Matrix W(d, k);
  for (Index i = 0; i < p.eq_A.rows(); ++i) W.col(i) = p.eq_A.row(i).transpose();
  for (std::size_t w = 0; w < work.size(); ++w)
    W.col(p.eq_A.rows() + static_cast<Index>(w)) = p.ineq_A.row(work[w]).transpose();
  Eigen::ColPivHouseholderQR<Matrix> qr(W);
  qr.setThreshold(1e-10);
  const Index rank = qr.rank();
  const Matrix Q = qr.householderQ() * Matrix::Identity(d, d);
  return Q.leftCols(rank);
}

inline bool is_feasible(const QpProblem& p, const Vector& x, double tol) {
  for (Index i = 0; i < p.ineq_A.rows(); ++i)
    if (p.ineq_A.row(i).dot(x) - p.ineq_b[i] > tol * (1.0 + std::abs(p.ineq_b[i]))) return false;
  for (Index i = 0; i < p.eq_A.rows(); ++i)
    if (std::abs(p.eq_A.row(i).dot(x) - p.eq_b[i]) > tol * (1.0 + std::abs(p.eq_b[i])))
      return false;
  return true;
}

// Phase 1: any vertex of the feasible region, or nullopt when empty.
inline std::optional<Vector> find_feasible_point(const QpProblem& p, double tol) {
  const Index d = p.H.rows();
  const Index mi = p.ineq_A.rows();
  const Index me = p.eq_A.rows();
  if (mi + me == 0) return Vector::Zero(d);
  LpProblem lp;
  lp.cost = Vector::Zero(d);
  lp.ineq_A.resize(mi + 2 * me, d);
  lp.ineq_b.resize(mi + 2 * me);
  if (mi) {
    lp.ineq_A.topRows(mi) = p.ineq_A;
    lp.ineq_b.head(mi) = p.ineq_b;
  }
  if (me) {
    lp.ineq_A.middleRows(mi, me) = p.eq_A;
    lp.ineq_b.segment(mi, me) = p.eq_b;
    lp.ineq_A.bottomRows(me) = -p.eq_A;
    lp.ineq_b.tail(me) = -p.eq_b;
  }
  LpOptions o;
  o.tol_feas = tol;
  const LpSolution s = solve_lp(lp, o);
  if (s.status != LpStatus::Optimal) return std::nullopt;
  return s.z;
}

}  // namespace detail

inline QpSolution solve_qp(const QpProblem& prob, const QpOptions& opt = {}) {
  detail::validate_qp(prob);
  QpProblem p = prob;
  const Index d = p.H.rows();
  p.ineq_A = detail::rows_of(p.ineq_A, d);
  p.eq_A = detail::rows_of(p.eq_A, d);
  const Index mi = p.ineq_A.rows();
  const Index me = p.eq_A.rows();

  QpSolution sol;
  Vector x;
  IndexSet work;

  if (!opt.working_set_hint.empty()) {
    IndexSet hint;
    for (Index i : opt.working_set_hint)
      if (i >= 0 && i < mi) hint.push_back(i);
    std::sort(hint.begin(), hint.end());
    hint.erase(std::unique(hint.begin(), hint.end()), hint.end());
    const Vector origin = Vector::Zero(d);
    const auto eqp = detail::solve_eqp(p, origin, hint);
    if (eqp.ok && detail::is_feasible(p, eqp.step, opt.tol_feas)) {
      x = eqp.step;
      work = hint;
      sol.warm_started = true;
    }
  }
  if (x.size() == 0 && opt.initial_point && opt.initial_point->size() == d &&
      detail::is_feasible(p, *opt.initial_point, opt.tol_feas)) {
    x = *opt.initial_point;
  }
  if (x.size() == 0) {
    auto start = detail::find_feasible_point(p, opt.tol_feas);
    if (!start) {
      sol.status = QpStatus::Infeasible;
      return sol;
    }
    x = *start;
  }

  std::vector<bool> in_work(static_cast<std::size_t>(mi), false);
  for (Index i : work) in_work[static_cast<std::size_t>(i)] = true;

  Vector lambda_work;
  bool converged = false;
  for (sol.iterations = 0; sol.iterations < opt.max_iterations; ++sol.iterations) {
    const auto eqp = detail::solve_eqp(p, x, work);
    if (!eqp.ok) throw InternalInconsistency("QP: singular working-set KKT system");
    const Vector& step = eqp.step;
    if (step.lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + x.lpNorm<Eigen::Infinity>())) {
      x += step;
      lambda_work = eqp.lambda;
      const double lscale = 1.0 + (lambda_work.size() ? lambda_work.cwiseAbs().maxCoeff() : 0.0);
      Index drop = -1;
      double most_negative = -1e-11 * lscale;
      for (std::size_t w = 0; w < work.size(); ++w) {
        const double l = lambda_work[me + static_cast<Index>(w)];
        if (l < most_negative) {
          most_negative = l;
          drop = static_cast<Index>(w);
        }
      }
      if (drop < 0) {
        converged = true;
        break;
      }
      in_work[static_cast<std::size_t>(work[static_cast<std::size_t>(drop)])] = false;
      work.erase(work.begin() + drop);
      continue;
    }
    double alpha = 1.0;
    Index block = -1;
    const double step_norm = step.norm();
    const Matrix span = detail::working_span(p, work);
    for (Index i = 0; i < mi; ++i) {
      if (in_work[static_cast<std::size_t>(i)]) continue;
      const double ap = p.ineq_A.row(i).dot(step);
      if (ap <= 1e-12 * p.ineq_A.row(i).norm() * step_norm) continue;
      // Rows dependent on the working set only see the residual correction.
      if (span.cols() > 0) {
        const Vector a = p.ineq_A.row(i).transpose();
        if ((a - span * (span.transpose() * a)).norm() <= 1e-9 * a.norm()) continue;
      }
      const double slack = std::max(0.0, p.ineq_b[i] - p.ineq_A.row(i).dot(x));
      const double t = slack / ap;
      if (t < alpha) {
        alpha = t;
        block = i;
      }
    }
    x += alpha * step;
    if (block >= 0) {
      work.push_back(block);
      in_work[static_cast<std::size_t>(block)] = true;
    }
  }
  if (!converged) throw InternalInconsistency("QP: active-set iteration limit reached");

  sol.status = QpStatus::Optimal;
  sol.z = x;
  sol.objective = 0.5 * x.dot(p.H * x) + p.f.dot(x);
  sol.multipliers = Vector::Zero(mi);
  sol.eq_multipliers = lambda_work.head(me);
  for (std::size_t w = 0; w < work.size(); ++w)
    sol.multipliers[work[w]] = std::max(0.0, lambda_work[me + static_cast<Index>(w)]);
  sol.working_set = work;
  std::sort(sol.working_set.begin(), sol.working_set.end());
  return sol;
}

}  // namespace pvm::solvers
