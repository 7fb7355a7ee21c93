#pragma once

// Dynamic unicycle with order-2 HOCBF obstacle constraints and box input
// bounds. The feasible input set U ∩ U_c(x) is exposed as a parametric
// polytope map over u-space.

#include "pvm/barrier.hpp"
#include "pvm/core.hpp"

#include <functional>
#include <numbers>

namespace pvm::scenario {

struct ControlAffineSystem {
  Index n = 0;
  Index m = 0;
  std::function<Vector(const Vector&)> f;
  std::function<Matrix(const Vector&)> g;

  Vector rhs(const Vector& x, const Vector& u) const { return f(x) + g(x) * u; }
};

struct Obstacle {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.5;  // safety distance R
};

struct InputBox {
  double a_min = -2.0, a_max = 2.0;
  double omega_min = -2.0, omega_max = 2.0;
};

struct NominalGains {
  double k_p = 0.5;
  double k_theta = 1.0;
  double k_v = 1.0;
};

struct UnicycleScenario {
  std::vector<Obstacle> obstacles;
  Eigen::Vector2d goal{0.0, 0.0};
  Eigen::Vector4d x0{0.0, 0.0, 0.0, 0.0};  // (p_x, p_y, v, θ)
  double alpha1 = 10.0;
  double alpha2 = 6.0;
  InputBox input_box;
  NominalGains nominal;

  void validate() const {
    for (std::size_t i = 0; i < obstacles.size(); ++i)
      pvm::detail::require(obstacles[i].radius > 0.0 && std::isfinite(obstacles[i].radius),
                           "obstacle " + std::to_string(i) + ": radius must be positive");
    pvm::detail::require(alpha1 > 0.0 && alpha2 > 0.0, "HOCBF gains must be positive");
    pvm::detail::require(input_box.a_min <= input_box.a_max &&
                             input_box.omega_min <= input_box.omega_max,
                         "input box is empty");
    pvm::detail::require(x0.allFinite() && goal.allFinite(), "non-finite start or goal");
  }
};

/// Angle wrapped into (−π, π].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a + std::numbers::pi, two_pi);
  if (w < 0.0) w += two_pi;
  w -= std::numbers::pi;
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

inline Vector unicycle_dynamics(const Vector& x, const Vector& u) {
  pvm::detail::require(x.size() == 4 && u.size() == 2, "unicycle: x is 4-D, u is 2-D");
  Vector dx(4);
  dx << x[2] * std::cos(x[3]), x[2] * std::sin(x[3]), u[0], u[1];
  return dx;
}

inline ControlAffineSystem unicycle_system() {
  ControlAffineSystem s;
  s.n = 4;
  s.m = 2;
  s.f = [](const Vector& x) {
    Vector f(4);
    f << x[2] * std::cos(x[3]), x[2] * std::sin(x[3]), 0.0, 0.0;
    return f;
  };
  s.g = [](const Vector&) {
    Matrix g = Matrix::Zero(4, 2);
    g(2, 0) = 1.0;
    g(3, 1) = 1.0;
    return g;
  };
  return s;
}

struct HocbfRow {
  Eigen::Vector2d a;     // coefficients on (a, ω)
  double b = 0.0;
  Eigen::Matrix<double, 2, 4> da_dx;
  Eigen::RowVector4d db_dx;
};

/// Order-2 HOCBF of h = ‖p − o‖² − R² written as aᵀu ≤ b:
///   ψ₂ = ḧ + (α1+α2) ḣ + α1α2 h ≥ 0, ḣ = 2v eᵀt̂,
///   ḧ = 2v² + 2a eᵀt̂ + 2vω eᵀn̂,
/// with e = p − o, t̂ = (cos θ, sin θ), n̂ = (−sin θ, cos θ).
inline HocbfRow hocbf_row(const Vector& x, const Obstacle& o, double alpha1, double alpha2,
                          Index row_index = 0) {
  pvm::detail::require(x.size() == 4, "hocbf_row: state must be 4-D");
  const double ex = x[0] - o.x, ey = x[1] - o.y;
  const double v = x[2], th = x[3];
  const double ct = std::cos(th), st = std::sin(th);
  const double s_t = ex * ct + ey * st;   // eᵀt̂
  const double s_n = -ex * st + ey * ct;  // eᵀn̂
  const double h = ex * ex + ey * ey - o.radius * o.radius;
  const double a12 = alpha1 + alpha2, a1a2 = alpha1 * alpha2;

  HocbfRow r;
  r.a << -2.0 * s_t, -2.0 * v * s_n;
  r.b = 2.0 * v * v + a12 * 2.0 * v * s_t + a1a2 * h;
  const double nrm = r.a.norm();
  if (!(nrm >= kRowNormFloor)) throw DegenerateRowError(row_index, nrm);

  // ∂s_t/∂x = (cos θ, sin θ, 0, s_n); ∂s_n/∂x = (−sin θ, cos θ, 0, −s_t)
  r.da_dx.row(0) << -2.0 * ct, -2.0 * st, 0.0, -2.0 * s_n;
  r.da_dx.row(1) << 2.0 * v * st, -2.0 * v * ct, -2.0 * s_n, 2.0 * v * s_t;
  r.db_dx << 2.0 * a12 * v * ct + 2.0 * a1a2 * ex, 2.0 * a12 * v * st + 2.0 * a1a2 * ey,
      4.0 * v + 2.0 * a12 * s_t, 2.0 * a12 * v * s_n;
  return r;
}

inline Vector nominal_controller(const Vector& x, const Eigen::Vector2d& goal,
                                 const NominalGains& k) {
  const double dx = goal[0] - x[0], dy = goal[1] - x[1];
  const double dist = std::hypot(dx, dy);
  Vector u(2);
  if (dist == 0.0) {
    u << -k.k_v * x[2], 0.0;
    return u;
  }
  const double theta_d = std::atan2(dy, dx);
  const double v_d = k.k_p * dist;
  u << k.k_v * (v_d - x[2]), k.k_theta * wrap_angle(theta_d - x[3]);
  return u;
}

/// Box rows of U in the order a ≤ a_max, −a ≤ −a_min, ω ≤ ω_max, −ω ≤ −ω_min.
inline polytope::HPolytope input_box_polytope(const InputBox& box) {
  polytope::HPolytope P;
  P.A = Matrix::Zero(4, 2);
  P.b = Vector(4);
  P.A(0, 0) = 1.0;
  P.A(1, 0) = -1.0;
  P.A(2, 1) = 1.0;
  P.A(3, 1) = -1.0;
  P.b << box.a_max, -box.a_min, box.omega_max, -box.omega_min;
  return P;
}

/// Rows: the four box rows, then one HOCBF row per obstacle.
inline barrier::ParametricPolytopeMap build_feasible_space_map(const UnicycleScenario& s) {
  s.validate();
  const Index N = 4 + static_cast<Index>(s.obstacles.size());
  const polytope::HPolytope box = input_box_polytope(s.input_box);
  barrier::ParametricPolytopeMap map;
  map.state_dim = 4;
  map.output_dim = 2;
  map.row_count = N;
  const auto obstacles = s.obstacles;
  const double a1 = s.alpha1, a2 = s.alpha2;
  map.rows = [box, obstacles, a1, a2, N](const Vector& x) {
    polytope::HPolytope P;
    P.A.resize(N, 2);
    P.b.resize(N);
    P.A.topRows(4) = box.A;
    P.b.head(4) = box.b;
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      const Index j = 4 + static_cast<Index>(i);
      const auto r = hocbf_row(x, obstacles[i], a1, a2, j);
      P.A.row(j) = r.a.transpose();
      P.b[j] = r.b;
    }
    return P;
  };
  map.jacobians = [obstacles, a1, a2, N](const Vector& x) {
    barrier::RowJacobians J;
    J.da_dx.assign(static_cast<std::size_t>(N), Matrix::Zero(2, 4));
    J.db_dx = Matrix::Zero(N, 4);
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      const Index j = 4 + static_cast<Index>(i);
      const auto r = hocbf_row(x, obstacles[i], a1, a2, j);
      J.da_dx[static_cast<std::size_t>(j)] = r.da_dx;
      J.db_dx.row(j) = r.db_dx;
    }
    return J;
  };
  return map;
}

/// The reach-avoid layout shipped with the tool (three obstacles between
/// start and goal). Calibrated for this repository, not taken from a figure.
inline UnicycleScenario default_scenario(double k_v = 1.0) {
  UnicycleScenario s;
  s.obstacles = {{3.0, 0.7, 0.5}, {4.5, -0.75, 0.5}, {8.0, 0.4, 0.5}};
  s.goal = {10.0, 0.0};
  s.x0 = {0.0, 0.0, 0.0, 0.0};
  s.nominal.k_v = k_v;
  return s;
}

}  // namespace pvm::scenario
