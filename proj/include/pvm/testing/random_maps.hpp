#pragma once

// Randomized smooth polytope maps with analytic Jacobians, for property
// and acceptance tests.

#include "pvm/barrier.hpp"

#include <numbers>
#include <random>

namespace pvm::testing {

/// a_j(x) = a0_j + κ B_j x + κ sin(C_j x),  b_j(x) = b0_j + κ e_jᵀx + κ sin(h_jᵀx),
/// with a0_j spread around the circle (l = 2) so the polytope stays bounded
/// for moderate ‖x‖.
inline barrier::ParametricPolytopeMap smooth_random_map(std::mt19937_64& rng, Index n, Index N,
                                                        double kappa = 0.15) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  struct Row {
    Eigen::Vector2d a0;
    Matrix B, C;
    double b0;
    RowVector e, h;
  };
  std::vector<Row> rows;
  const double phase = 2.0 * std::numbers::pi * uni(rng);
  for (Index j = 0; j < N; ++j) {
    const double ang = phase + 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.3 * (uni(rng) - 0.5)) /
                                   static_cast<double>(N);
    const double scale = 0.5 + uni(rng);
    Row r;
    r.a0 = scale * Eigen::Vector2d(std::cos(ang), std::sin(ang));
    r.B = Matrix::NullaryExpr(2, n, [&](Index, Index) { return gauss(rng); }) / std::sqrt(double(n));
    r.C = Matrix::NullaryExpr(2, n, [&](Index, Index) { return gauss(rng); });
    r.b0 = scale * (0.5 + uni(rng));
    r.e = RowVector::NullaryExpr(n, [&](Index) { return gauss(rng); }) / std::sqrt(double(n));
    r.h = RowVector::NullaryExpr(n, [&](Index) { return gauss(rng); });
    rows.push_back(std::move(r));
  }
  barrier::ParametricPolytopeMap map;
  map.state_dim = n;
  map.output_dim = 2;
  map.row_count = N;
  map.rows = [rows, kappa, N](const Vector& x) {
    polytope::HPolytope P;
    P.A.resize(N, 2);
    P.b.resize(N);
    for (Index j = 0; j < N; ++j) {
      const Row& r = rows[static_cast<std::size_t>(j)];
      const Vector a = r.a0 + kappa * (r.B * x) + kappa * (r.C * x).array().sin().matrix();
      P.A.row(j) = a.transpose();
      P.b[j] = r.b0 + kappa * r.e.dot(x.transpose()) + kappa * std::sin(r.h.dot(x.transpose()));
    }
    return P;
  };
  map.jacobians = [rows, kappa, N, n](const Vector& x) {
    barrier::RowJacobians J;
    J.da_dx.resize(static_cast<std::size_t>(N));
    J.db_dx.resize(N, n);
    for (Index j = 0; j < N; ++j) {
      const Row& r = rows[static_cast<std::size_t>(j)];
      const Vector cx = (r.C * x).array().cos().matrix();
      J.da_dx[static_cast<std::size_t>(j)] = kappa * r.B + kappa * cx.asDiagonal() * r.C;
      J.db_dx.row(j) = kappa * r.e + kappa * std::cos(r.h.dot(x.transpose())) * r.h;
    }
    return J;
  };
  return map;
}

/// Regular N-gon of inradius ρ(x) = ρ0 + κ wᵀx/√n centred at t(x) = κ T x,
/// rotated by φ(x) = κ vᵀx, with fixed per-row normal scales s_j. Every facet
/// touches the inscribed circle, so the LP optimum is degenerate and the
/// multiplier polytope has several vertices when N ≥ 4. r*(x) = ρ(x) is affine,
/// so one-sided differences carry no curvature error.
inline barrier::ParametricPolytopeMap regular_polygon_map(std::mt19937_64& rng, Index n, Index N,
                                                          double kappa = 0.2) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vector scales(N);
  for (Index j = 0; j < N; ++j) scales[j] = 0.5 + 1.5 * uni(rng);
  const double rho0 = 0.7 + uni(rng);
  const RowVector w =
      RowVector::NullaryExpr(n, [&](Index) { return gauss(rng); }) / std::sqrt(double(n));
  const RowVector v = RowVector::NullaryExpr(n, [&](Index) { return gauss(rng); });
  const Matrix T = Matrix::NullaryExpr(2, n, [&](Index, Index) { return gauss(rng); });
  const double phase = 2.0 * std::numbers::pi * uni(rng);

  barrier::ParametricPolytopeMap map;
  map.state_dim = n;
  map.output_dim = 2;
  map.row_count = N;
  auto angle = [=](Index j, const Vector& x) {
    return phase + 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(N) +
           kappa * v.dot(x.transpose());
  };
  map.rows = [=](const Vector& x) {
    polytope::HPolytope P;
    P.A.resize(N, 2);
    P.b.resize(N);
    const Eigen::Vector2d t = kappa * T * x;
    const double rho = rho0 + kappa * w.dot(x.transpose());
    for (Index j = 0; j < N; ++j) {
      const double a = angle(j, x);
      const Eigen::Vector2d u(std::cos(a), std::sin(a));
      P.A.row(j) = scales[j] * u.transpose();
      P.b[j] = scales[j] * (rho + u.dot(t));
    }
    return P;
  };
  map.jacobians = [=](const Vector& x) {
    barrier::RowJacobians J;
    J.da_dx.resize(static_cast<std::size_t>(N));
    J.db_dx.resize(N, n);
    const Eigen::Vector2d t = kappa * T * x;
    const Matrix dt = kappa * T;
    const RowVector drho = kappa * w;
    const RowVector dphi = kappa * v;
    for (Index j = 0; j < N; ++j) {
      const double a = angle(j, x);
      const Eigen::Vector2d u(std::cos(a), std::sin(a));
      const Eigen::Vector2d du(-std::sin(a), std::cos(a));
      J.da_dx[static_cast<std::size_t>(j)] = scales[j] * du * dphi;
      J.db_dx.row(j) = scales[j] * (drho + du.dot(t) * dphi + u.transpose() * dt);
    }
    return J;
  };
  return map;
}

/// Regular N-gon of inradius ρ0 whose facets shift independently:
/// a_j = s_j u_j fixed, b_j(x) = s_j(ρ0 + κ e_jᵀx). At x = 0 every facet is
/// tight, and a non-rigid shift makes r* nondifferentiable there.
inline barrier::ParametricPolytopeMap shifting_polygon_map(std::mt19937_64& rng, Index n, Index N,
                                                           double kappa = 0.5) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double rho0 = 0.7 + uni(rng);
  const double phase = 2.0 * std::numbers::pi * uni(rng);
  Matrix A(N, 2);
  Vector scales(N);
  for (Index j = 0; j < N; ++j) {
    const double a = phase + 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(N);
    scales[j] = 0.5 + 1.5 * uni(rng);
    A.row(j) << scales[j] * std::cos(a), scales[j] * std::sin(a);
  }
  Matrix E = Matrix::NullaryExpr(N, n, [&](Index, Index) { return gauss(rng); });
  for (Index j = 0; j < N; ++j) E.row(j) *= kappa * scales[j];

  barrier::ParametricPolytopeMap map;
  map.state_dim = n;
  map.output_dim = 2;
  map.row_count = N;
  map.rows = [=](const Vector& x) {
    return polytope::HPolytope{A, rho0 * scales + E * x};
  };
  map.jacobians = [=](const Vector&) {
    barrier::RowJacobians J;
    J.da_dx.assign(static_cast<std::size_t>(N), Matrix::Zero(2, n));
    J.db_dx = E;
    return J;
  };
  return map;
}

/// Rectangle [−w, w]×[−1, 1] (w > 1) whose top facet pivots about (p, 1) by
/// φ(x) = κ vᵀx. At x = 0 the Chebyshev centre is not unique, so the
/// derivative at the min-norm centre is strictly below the true one-sided
/// derivative whenever vᵀd ≠ 0.
inline barrier::ParametricPolytopeMap tilting_rectangle_map(std::mt19937_64& rng, Index n,
                                                            double kappa = 0.5) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double w = 1.5 + uni(rng);
  const double p = (w - 1.0) * (2.0 * uni(rng) - 1.0);
  const RowVector v = RowVector::NullaryExpr(n, [&](Index) { return gauss(rng); });

  barrier::ParametricPolytopeMap map;
  map.state_dim = n;
  map.output_dim = 2;
  map.row_count = 4;
  map.rows = [=](const Vector& x) {
    const double phi = kappa * v.dot(x.transpose());
    polytope::HPolytope P;
    P.A.resize(4, 2);
    P.b.resize(4);
    P.A << 1.0, 0.0, -1.0, 0.0, std::sin(phi), std::cos(phi), 0.0, -1.0;
    P.b << w, w, p * std::sin(phi) + std::cos(phi), 1.0;
    return P;
  };
  map.jacobians = [=](const Vector& x) {
    const double phi = kappa * v.dot(x.transpose());
    barrier::RowJacobians J;
    J.da_dx.assign(4, Matrix::Zero(2, n));
    J.da_dx[2].row(0) = std::cos(phi) * kappa * v;
    J.da_dx[2].row(1) = -std::sin(phi) * kappa * v;
    J.db_dx = Matrix::Zero(4, n);
    J.db_dx.row(2) = (p * std::cos(phi) - std::sin(phi)) * kappa * v;
    return J;
  };
  return map;
}

/// Random bounded polytope: a coordinate box of half-width `box` plus
/// `extra` random cuts. May be empty.
inline polytope::HPolytope random_polytope(std::mt19937_64& rng, Index dim, Index extra,
                                           double box = 3.0) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(-0.5, 2.0);
  polytope::HPolytope P;
  P.A = Matrix::Zero(2 * dim + extra, dim);
  P.b = Vector(2 * dim + extra);
  for (Index i = 0; i < dim; ++i) {
    P.A(2 * i, i) = 1.0;
    P.A(2 * i + 1, i) = -1.0;
    P.b[2 * i] = box * (0.3 + 0.7 * std::abs(gauss(rng)));
    P.b[2 * i + 1] = box * (0.3 + 0.7 * std::abs(gauss(rng)));
  }
  for (Index k = 0; k < extra; ++k) {
    const Index r = 2 * dim + k;
    for (Index i = 0; i < dim; ++i) P.A(r, i) = gauss(rng);
    P.A.row(r) *= 0.5 + std::abs(gauss(rng));
    P.b[r] = uni(rng) * P.A.row(r).norm();
  }
  return P;
}

}  // namespace pvm::testing
