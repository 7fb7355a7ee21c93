#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pvm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;
using IndexSet = std::vector<Index>;

/// Minimum admissible facet-normal norm.
inline constexpr double kRowNormFloor = 1e-9;

/// Thrown when a caller breaks a documented precondition (bad dimensions,
/// non-finite data, indefinite Hessian, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A polytope row whose normal vanishes, so the polytope is not
/// well-posed at this state.
class DegenerateRowError : public std::runtime_error {
 public:
  DegenerateRowError(Index row, double norm)
      : std::runtime_error("degenerate row " + std::to_string(row) +
                           ": normal norm " + std::to_string(norm) +
                           " below floor"),
        row_(row),
        norm_(norm) {}

  Index row() const noexcept { return row_; }
  double norm() const noexcept { return norm_; }

 private:
  Index row_;
  double norm_;
};

/// The Chebyshev LP has no finite optimum: the polytope is unbounded.
class UnboundedDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The multiplier system has no nonnegative solution at the supplied point.
class NotOptimalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pipeline stage produced results that contradict an upstream stage.
class InternalInconsistency : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool all_finite(const Matrix& m) { return m.allFinite(); }
inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ContractViolation(what);
}

inline std::string fmt_vec(const Vector& v) {
  std::string s = "(";
  for (Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

/// Calls fn(subset) for every k-subset of {0..n-1} in lexicographic order.
template <typename Fn>
void for_each_subset(Index n, Index k, Fn&& fn) {
  if (k < 0 || k > n) return;
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    fn(static_cast<const std::vector<Index>&>(idx));
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace detail
}  // namespace pvm
