#include "pvm/filter.hpp"
#include "pvm/testing/oracles.hpp"
#include "pvm/testing/suites.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pvm;
using namespace pvm::filter;

namespace {

polytope::HPolytope box2(double lo, double hi) {
  polytope::HPolytope P{Matrix(4, 2), Vector(4)};
  P.A << 1, 0, -1, 0, 0, 1, 0, -1;
  P.b << hi, -lo, hi, -lo;
  return P;
}

// Barrier evaluation with given ∂ₓL rows in a state space where f = 0, g = I.
barrier::BarrierEval synthetic_eval(const Matrix& dLdx, double h_r) {
  barrier::BarrierEval ev;
  ev.status = barrier::BarrierStatus::Ok;
  ev.h_r = h_r;
  ev.r_star = h_r + 0.6;
  ev.dLdx_rows = dLdx;
  return ev;
}

FilterResult run(const barrier::BarrierEval& ev, const polytope::HPolytope& psi, const Vector& u0,
                 const FilterParams& p = {}) {
  const Index n = ev.dLdx_rows.cols();
  return safety_filter(ev, Vector::Zero(n), Matrix::Identity(n, 2), psi, u0, p);
}

}  // namespace

TEST(SafetyFilter, InactiveWhenSafeAndInterior) {
  const auto ev = synthetic_eval(Matrix::Zero(2, 2), 0.4);
  const auto out = run(ev, box2(-2, 2), Eigen::Vector2d(0.5, -1.0));
  ASSERT_EQ(out.status, FilterStatus::Ok);
  EXPECT_LE((out.u_star - Eigen::Vector2d(0.5, -1.0)).norm(), 1e-12);
  EXPECT_LE(out.delta_star, 1e-12);
}

TEST(SafetyFilter, ZeroRowsWithNegativeBarrierForceSlack) {
  FilterParams p;
  const double h = -0.2;
  const auto ev = synthetic_eval(Matrix::Zero(1, 2), h);
  const auto out = run(ev, box2(-2, 2), Eigen::Vector2d(3.0, 0.0), p);
  ASSERT_EQ(out.status, FilterStatus::Ok);
  EXPECT_NEAR(out.delta_star, p.alpha * 0.2, 1e-9);
  EXPECT_LE((out.u_star - Eigen::Vector2d(2.0, 0.0)).norm(), 1e-9);
}

TEST(SafetyFilter, OneVertexClosedForm) {
  // d1 = (1, 0), c1 = 0, h_r = 0: u1 + δ ≥ 0 binds; 10(u1+1)² + 500 u1² gives u1 = −1/51.
  Matrix dL(1, 2);
  dL << -1.0, 0.0;
  const auto ev = synthetic_eval(dL, 0.0);
  const auto out = run(ev, box2(-2, 2), Eigen::Vector2d(-1.0, 0.0));
  ASSERT_EQ(out.status, FilterStatus::Ok);
  EXPECT_NEAR(out.u_star[0], -1.0 / 51.0, 1e-10);
  EXPECT_NEAR(out.u_star[1], 0.0, 1e-12);
  EXPECT_NEAR(out.delta_star, 1.0 / 51.0, 1e-10);

  const auto terms = barrier::gamma_affine(ev, Vector::Zero(2), Matrix::Identity(2, 2));
  const auto ref = pvm::testing::brute_force_qp(safety_filter_qp(terms, 0.0, box2(-2, 2),
                                                            Eigen::Vector2d(-1.0, 0.0), {}));
  ASSERT_TRUE(ref.has_value());
  EXPECT_LE((ref->z.head(2) - out.u_star).norm(), 1e-10);
  EXPECT_NEAR(ref->z[2], out.delta_star, 1e-10);
}

TEST(SafetyFilter, SlackShrinksLikeInverseGamma) {
  Matrix dL(1, 2);
  dL << -1.0, 0.0;
  const auto ev = synthetic_eval(dL, 0.0);
  double prev = 1.0;
  for (double g : {50.0, 500.0, 5000.0, 50000.0}) {
    FilterParams p;
    p.gamma = g;
    const auto out = run(ev, box2(-2, 2), Eigen::Vector2d(-1.0, 0.0), p);
    ASSERT_EQ(out.status, FilterStatus::Ok);
    EXPECT_NEAR(out.delta_star, 10.0 / (10.0 + g), 1e-10);
    EXPECT_LT(out.delta_star, prev);
    prev = out.delta_star;
  }
}

TEST(SafetyFilter, ZeroSlackWhenNominalInputIsSafe) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    auto fi = pvm::testing::detail::random_filter_instance(rng);
    const auto terms = barrier::gamma_affine(fi.ev, fi.f_x, fi.g_x);
    if ((fi.psi.A * fi.u0 - fi.psi.b).maxCoeff() > 0.0) continue;
    bool safe = true;
    for (const auto& t : terms)
      safe = safe && t.constant + t.input_row.dot(fi.u0) >= -fi.params.alpha * fi.ev.h_r;
    if (!safe) continue;
    const auto out = safety_filter(fi.ev, fi.f_x, fi.g_x, fi.psi, fi.u0, fi.params);
    ASSERT_EQ(out.status, FilterStatus::Ok);
    EXPECT_LE(out.delta_star, 1e-7);
    EXPECT_LE((out.u_star - fi.u0).norm(), 1e-7);
  }
}

TEST(SafetyFilter, OutputsRespectInputsAndBarrierRows) {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const auto fi = pvm::testing::detail::random_filter_instance(rng);
    const auto out = safety_filter(fi.ev, fi.f_x, fi.g_x, fi.psi, fi.u0, fi.params);
    if (out.status != FilterStatus::Ok) continue;
    ++checked;
    EXPECT_LE((fi.psi.A * out.u_star - fi.psi.b).maxCoeff(), 1e-7);
    EXPECT_GE(out.delta_star, -1e-10);
    for (const auto& t : barrier::gamma_affine(fi.ev, fi.f_x, fi.g_x))
      EXPECT_GE(t.constant + t.input_row.dot(out.u_star) + out.delta_star,
                -fi.params.alpha * fi.ev.h_r - 1e-7);
  }
  EXPECT_GT(checked, 200);
}

TEST(SafetyFilter, MatchesExhaustiveOracle) {
  pvm::testing::SuiteOptions o;
  o.count = 300;
  o.seed = 3;
  const auto r = pvm::testing::filter_suite(o);
  EXPECT_TRUE(r.passed) << r.detail;
  EXPECT_EQ(r.instances, 300);
}

TEST(SafetyFilter, SlackOnlyEntersBarrierRows) {
  Matrix dL(2, 2);
  dL << 1, 2, -3, 1;
  const auto ev = synthetic_eval(dL, 0.1);
  const auto terms = barrier::gamma_affine(ev, Vector::Zero(2), Matrix::Identity(2, 2));
  const auto qp = safety_filter_qp(terms, 0.1, box2(-2, 2), Eigen::Vector2d(1, 1), {});
  ASSERT_EQ(qp.ineq_A.rows(), 2 + 4 + 1);
  EXPECT_EQ(qp.ineq_A(0, 2), -1.0);
  EXPECT_EQ(qp.ineq_A(1, 2), -1.0);
  for (Index i = 2; i < 6; ++i) EXPECT_EQ(qp.ineq_A(i, 2), 0.0);
  EXPECT_EQ(qp.ineq_A(6, 2), -1.0);
}

TEST(SafetyFilter, EmptyInputSetIsReported) {
  const auto ev = synthetic_eval(Matrix::Zero(1, 2), 0.4);
  const auto out = run(ev, box2(1, -1), Eigen::Vector2d(0, 0));
  EXPECT_EQ(out.status, FilterStatus::InfeasibleInputSet);
}

TEST(SafetyFilter, EmptyOutputPolytopeIsReported) {
  barrier::BarrierEval ev;
  ev.status = barrier::BarrierStatus::EmptyPolytope;
  const auto out = safety_filter(ev, Vector::Zero(2), Matrix::Identity(2, 2), box2(-2, 2),
                                 Eigen::Vector2d(0, 0), {});
  EXPECT_EQ(out.status, FilterStatus::EmptyOutputPolytope);
}

TEST(SafetyFilter, WarmStartDoesNotChangeTheAnswer) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const auto fi = pvm::testing::detail::random_filter_instance(rng);
    const auto cold = safety_filter(fi.ev, fi.f_x, fi.g_x, fi.psi, fi.u0, fi.params);
    if (cold.status != FilterStatus::Ok) continue;
    const auto warm =
        safety_filter(fi.ev, fi.f_x, fi.g_x, fi.psi, fi.u0, fi.params, cold.working_set);
    ASSERT_EQ(warm.status, FilterStatus::Ok);
    EXPECT_LE((warm.u_star - cold.u_star).norm(), 1e-8);
    EXPECT_NEAR(warm.delta_star, cold.delta_star, 1e-8);
  }
}

TEST(SafetyFilter, RejectsBadParameters) {
  const auto ev = synthetic_eval(Matrix::Zero(1, 2), 0.4);
  FilterParams p;
  p.gamma = 0.0;
  EXPECT_THROW(run(ev, box2(-2, 2), Eigen::Vector2d(0, 0), p), ContractViolation);
  p = {};
  p.Q = Matrix::Identity(3, 3);
  EXPECT_THROW(run(ev, box2(-2, 2), Eigen::Vector2d(0, 0), p), ContractViolation);
}

TEST(BaselineFilter, InteriorNominalPassesThrough) {
  const auto out = baseline_filter(box2(-2, 2), Eigen::Vector2d(1.0, -0.5), Matrix::Identity(2, 2));
  ASSERT_EQ(out.status, FilterStatus::Ok);
  EXPECT_LE((out.u_star - Eigen::Vector2d(1.0, -0.5)).norm(), 1e-12);
  EXPECT_EQ(out.delta_star, 0.0);
}

TEST(BaselineFilter, ProjectsOntoBox) {
  const auto out = baseline_filter(box2(-2, 2), Eigen::Vector2d(3.0, 0.0), Matrix::Identity(2, 2));
  ASSERT_EQ(out.status, FilterStatus::Ok);
  EXPECT_LE((out.u_star - Eigen::Vector2d(2.0, 0.0)).norm(), 1e-12);
}

TEST(BaselineFilter, WeightedProjectionMatchesOracle) {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    const auto psi = pvm::testing::random_polytope(rng, 2, 3, 2.0);
    const Eigen::Vector2d u0(3 * g(rng), 3 * g(rng));
    const Matrix Q = (Matrix(2, 2) << 10, 0, 0, 1).finished();
    const auto out = baseline_filter(psi, u0, Q);
    const auto ref = pvm::testing::brute_force_qp(baseline_filter_qp(psi, u0, Q));
    if (!ref) {
      EXPECT_EQ(out.status, FilterStatus::InfeasibleInputSet);
      continue;
    }
    ASSERT_EQ(out.status, FilterStatus::Ok);
    EXPECT_LE((out.u_star - ref->z).norm(), 1e-8);
  }
}

TEST(BaselineFilter, EmptyInputSetIsReported) {
  const auto out = baseline_filter(box2(1, -1), Eigen::Vector2d(0, 0), Matrix::Identity(2, 2));
  EXPECT_EQ(out.status, FilterStatus::InfeasibleInputSet);
}
