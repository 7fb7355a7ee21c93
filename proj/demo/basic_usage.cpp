// Chebyshev ball of a triangle, one barrier evaluation and one closed-loop run.

#include "pvm/sim.hpp"

#include <cstdio>

int main() {
  using namespace pvm;

  polytope::HPolytope tri;
  tri.A.resize(3, 2);
  tri.A << -1, 0, 0, -1, 1, 1;
  tri.b.resize(3);
  tri.b << 0, 0, 2;
  const auto ball = polytope::chebyshev_ball(tri);
  std::printf("triangle: centre (%.6f, %.6f), radius %.6f\n", ball.center[0], ball.center[1],
              ball.radius);

  const auto sc = scenario::default_scenario(1.0);
  const auto map = scenario::build_feasible_space_map(sc);
  const auto ev = barrier::eval_barrier(map, sc.x0);
  std::printf("start state: r* = %.4f, h_r = %.4f, %zu multiplier vertices\n", ev.r_star, ev.h_r,
              ev.mult_vertices.size());

  sim::SimConfig cfg;
  const auto log = sim::run(sc, cfg);
  const auto s = sim::metrics(log);
  std::printf("run: %s after %.2f s, min r* = %.4f, max delta = %.2e\n",
              sim::to_string(log.termination), s.elapsed, s.min_r_star, s.max_delta);
  return s.goal_reached ? 0 : 1;
}
