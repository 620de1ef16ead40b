#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "nbp/rng.hpp"
#include "nbp/stats.hpp"

using namespace nbp;

TEST_CASE("streams are reproducible and tag-separated") {
  RngStream a(42, 3, "engine");
  RngStream b(42, 3, "engine");
  RngStream c(42, 3, "skeleton");
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  bool differs = false;
  RngStream a2(42, 3, "engine");
  for (int i = 0; i < 100; ++i) differs |= (a2.next_u64() != c.next_u64());
  CHECK(differs);
}

TEST_CASE("stream independence battery: cross-correlation within noise") {
  const std::size_t n = 1000000;
  for (auto [i, j] : {std::pair<int, int>{0, 1}, {0, 7}, {5, 6}}) {
    RngStream si(1234, i, "battery");
    RngStream sj(1234, j, "battery");
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double x = si.next_double() - 0.5;
      const double y = sj.next_double() - 0.5;
      sx += x;
      sy += y;
      sxy += x * y;
      sxx += x * x;
      syy += y * y;
    }
    const double num = sxy - sx * sy / n;
    const double corr = num / std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
    CHECK(std::abs(corr) < 4.5 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("uniform and exponential moments") {
  RngStream rng(5, 0, "moments");
  const std::size_t n = 200000;
  double su = 0, se = 0;
  for (std::size_t i = 0; i < n; ++i) {
    su += rng.next_double();
    se += rng.exponential(2.0);
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(se / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK_THROWS_AS(rng.exponential(0.0), std::invalid_argument);
}

TEST_CASE("mc_mean_ci basics") {
  std::vector<double> constant(10, 3.5);
  const auto ci = mc_mean_ci(constant, 0.95);
  CHECK(ci.mean == doctest::Approx(3.5));
  CHECK(ci.half_width == doctest::Approx(0.0));

  std::vector<double> one = {1.0};
  CHECK_THROWS_AS(mc_mean_ci(one, 0.95), std::invalid_argument);

  // 10^4 standard normal draws: 95% half-width close to 1.96/sqrt(n).
  RngStream rng(77, 0, "ci");
  std::vector<double> draws(10000);
  for (auto& d : draws) d = rng.normal();
  const auto ci2 = mc_mean_ci(draws, 0.95);
  CHECK(ci2.half_width == doctest::Approx(0.0196).epsilon(0.10));
}

TEST_CASE("mc_mean_ci coverage simulation") {
  const int reps = 1000;
  const std::size_t n = 400;
  int covered = 0;
  for (int r = 0; r < reps; ++r) {
    RngStream rng(99, r, "coverage");
    std::vector<double> draws(n);
    for (auto& d : draws) d = rng.normal();
    const auto ci = mc_mean_ci(draws, 0.95);
    if (std::abs(ci.mean) <= ci.half_width) ++covered;
  }
  const double rate = static_cast<double>(covered) / reps;
  CHECK(rate > 0.93);
  CHECK(rate < 0.97);
}

TEST_CASE("normal quantile sanity") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-5));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959964).epsilon(1e-5));
}

TEST_CASE("chi square tail sanity") {
  // Known quantile: P(chi2_1 > 3.841) = 0.05.
  CHECK(chi_square_tail(3.841459, 1) == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(chi_square_tail(0.0, 3) == doctest::Approx(1.0));
}

TEST_CASE("two sample test: identical fixed-seed streams pass") {
  std::vector<std::uint64_t> a, b;
  RngStream rng(11, 0, "chi2");
  for (int i = 0; i < 5000; ++i) {
    const auto v = static_cast<std::uint64_t>(rng.uniform_index(6));
    a.push_back(v);
    b.push_back(v);
  }
  const auto rep = two_sample_test(a, b);
  REQUIRE(rep.p_value.has_value());
  CHECK(*rep.p_value >= 0.01);
  CHECK(rep.pass);
}

TEST_CASE("two sample test: detects different binomials") {
  std::vector<std::uint64_t> a, b;
  RngStream rng(13, 0, "chi2_power");
  auto binom = [&](double prob) {
    std::uint64_t c = 0;
    for (int k = 0; k < 4; ++k) c += rng.bernoulli(prob);
    return c;
  };
  for (int i = 0; i < 10000; ++i) {
    a.push_back(binom(0.5));
    b.push_back(binom(0.9));
  }
  const auto rep = two_sample_test(a, b);
  REQUIRE(rep.p_value.has_value());
  CHECK(*rep.p_value < 1e-6);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("two sample test: degenerate single bin errors") {
  std::vector<std::uint64_t> a(100, 2), b(100, 2);
  CHECK_THROWS_AS(two_sample_test(a, b), std::runtime_error);
}

TEST_CASE("run_replicates is order-independent") {
  std::vector<double> out1(500), out4(500);
  run_replicates(500, 1, [&](std::size_t i) {
    RngStream rng(7, i, "par");
    out1[i] = rng.next_double();
  });
  run_replicates(500, 4, [&](std::size_t i) {
    RngStream rng(7, i, "par");
    out4[i] = rng.next_double();
  });
  CHECK(out1 == out4);
}
