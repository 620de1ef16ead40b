#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nbp/geometry.hpp"
#include "nbp/rng.hpp"

using namespace nbp;

TEST_CASE("exit time closed forms") {
  const auto rod = SpatialDomain::interval(0.0, 1.0);
  CHECK(exit_time({0.3, 0, 0}, {1, 0, 0}, rod) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(exit_time({0.3, 0, 0}, {-0.5, 0, 0}, rod) == doctest::Approx(0.6).epsilon(1e-14));

  const auto ball = SpatialDomain::ball({0, 0, 0}, 2.0);
  CHECK(exit_time({0, 0, 0}, {1, 0, 0}, ball) == doctest::Approx(2.0).epsilon(1e-14));

  const auto box = SpatialDomain::box({0, 0, 0}, {1, 2, 3});
  CHECK(exit_time({0.5, 1.0, 1.0}, {1, 0, 0}, box) == doctest::Approx(0.5));
  CHECK(exit_time({0.5, 1.0, 1.0}, {0, -1, 0}, box) == doctest::Approx(1.0));
}

TEST_CASE("exit time rejects zero velocity") {
  const auto rod = SpatialDomain::interval(0.0, 1.0);
  CHECK_THROWS_AS(exit_time({0.5, 0, 0}, {0, 0, 0}, rod), std::invalid_argument);
  CHECK_THROWS_AS(exit_time({0.5, 0, 0}, {0, 1, 0}, rod), std::invalid_argument);
  const auto ball = SpatialDomain::ball({0, 0, 0}, 1.0);
  CHECK_THROWS_AS(exit_time({0, 0, 0}, {0, 0, 0}, ball), std::invalid_argument);
}

TEST_CASE("ball exit time is stable near tangency") {
  const auto ball = SpatialDomain::ball({0, 0, 0}, 1.0);
  // Grazing ray: starts near the boundary moving almost tangentially.
  const Vec3 r{0.0, 1.0 - 1e-9, 0.0};
  const Vec3 v{1.0, 0.0, 0.0};
  const double t = exit_time(r, v, ball);
  const Vec3 end = axpy(r, v, t);
  CHECK(norm(end) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(t > 0.0);
}

TEST_CASE("advect kill and stop modes") {
  const auto rod = SpatialDomain::interval(0.0, 1.0);
  const PhasePoint x = PhasePoint::rod(0.3, 1.0);

  const auto moved = advect(x, 0.2, rod, AdvectMode::kill_at_boundary);
  CHECK(moved.alive);
  CHECK(moved.r[0] == doctest::Approx(0.5));

  const auto dead = advect(x, 0.9, rod, AdvectMode::kill_at_boundary);
  CHECK_FALSE(dead.alive);

  const auto stopped = advect(x, 0.9, rod, AdvectMode::stop_at_boundary);
  CHECK(stopped.alive);
  CHECK(stopped.r[0] == doctest::Approx(1.0));

  // Ties go to the boundary.
  const auto tie = advect(x, 0.7, rod, AdvectMode::kill_at_boundary);
  CHECK_FALSE(tie.alive);

  CHECK_THROWS_AS(advect(x, -0.1, rod, AdvectMode::kill_at_boundary),
                  std::invalid_argument);
}

TEST_CASE("flow property and exit-time consistency") {
  RngStream rng(7, 0, "geometry_props");
  const auto ball = SpatialDomain::ball({0.1, -0.2, 0.0}, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    Vec3 r;
    do {
      r = {0.1 + 2.8 * (rng.next_double() - 0.5), -0.2 + 2.8 * (rng.next_double() - 0.5),
           2.8 * (rng.next_double() - 0.5)};
    } while (!ball.contains(r));
    const Vec3 v{rng.next_double() - 0.5, rng.next_double() - 0.5,
                 rng.next_double() - 0.5};
    if (norm(v) < 1e-3) continue;
    const PhasePoint x{r, v, true};
    const double kappa = exit_time(r, v, ball);
    const double s = 0.5 * kappa * rng.next_double();
    const double t = 0.4 * kappa * rng.next_double();

    // advect(x, s+t) == advect(advect(x, s), t) in both modes
    const auto a = advect(x, s + t, ball, AdvectMode::kill_at_boundary);
    const auto b = advect(advect(x, s, ball, AdvectMode::kill_at_boundary), t, ball,
                          AdvectMode::kill_at_boundary);
    REQUIRE(a.alive == b.alive);
    if (a.alive) {
      CHECK(a.r[0] == doctest::Approx(b.r[0]).epsilon(1e-12));
      CHECK(a.r[1] == doctest::Approx(b.r[1]).epsilon(1e-12));
    }

    // exit_time shifts along the flight
    const auto mid = advect(x, s, ball, AdvectMode::stop_at_boundary);
    CHECK(exit_time(mid.r, v, ball) == doctest::Approx(kappa - s).epsilon(1e-9));
  }
}

TEST_CASE("exit time bounded by diameter over speed") {
  RngStream rng(9, 0, "geometry_bound");
  const auto box = SpatialDomain::box({0, 0, 0}, {2, 1, 1});
  const double diam = box.diameter();
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 r{2 * rng.next_double(), rng.next_double(), rng.next_double()};
    if (!box.contains(r)) continue;
    Vec3 v{rng.next_double() - 0.5, rng.next_double() - 0.5, rng.next_double() - 0.5};
    const double speed = norm(v);
    if (speed < 1e-3) continue;
    CHECK(exit_time(r, v, box) <= diam / speed * (1 + 1e-12));
  }
}

TEST_CASE("velocity space membership") {
  const auto vs = VelocitySpace::discrete({{1, 0, 0}, {-1, 0, 0}});
  CHECK(vs.v_min() == doctest::Approx(1.0));
  CHECK(vs.v_max() == doctest::Approx(1.0));
  CHECK(vs.member({1, 0, 0}));
  CHECK_FALSE(vs.member({0.5, 0, 0}));
  CHECK(vs.index_of({-1, 0, 0}) == 1);

  const auto ann = VelocitySpace::annulus(0.5, 2.0);
  CHECK(ann.member({1, 0, 0}));
  CHECK_FALSE(ann.member({0.1, 0, 0}));
  CHECK_THROWS_AS(VelocitySpace::annulus(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(VelocitySpace::discrete({{0, 0, 0}}), std::invalid_argument);
}
