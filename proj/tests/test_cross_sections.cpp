#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nbp/cross_sections.hpp"
#include "nbp/presets.hpp"

using namespace nbp;

TEST_CASE("total rate is the sum of the configured rates") {
  auto m = presets::rod1();
  m.sigma_s = RateField::constant(1.0);
  m.sigma_f = RateField::constant(2.0);
  CHECK(total_rate(m, {0.5, 0, 0}, {1, 0, 0}) == doctest::Approx(3.0));

  m.sigma_f = RateField::constant(0.0);
  CHECK(total_rate(m, {0.5, 0, 0}, {1, 0, 0}) == doctest::Approx(1.0));

  const auto rod = presets::rod1();
  CHECK(total_rate(rod, {0.5, 0, 0}, {-1, 0, 0}) == doctest::Approx(1.5));
}

TEST_CASE("piecewise rate field lookup and extrema") {
  const auto f = RateField::piecewise({0.0, 0.5, 1.0}, {{1.0, 2.0}, {3.0, 4.0}});
  CHECK(f.at({0.25, 0, 0}, 0) == doctest::Approx(1.0));
  CHECK(f.at({0.25, 0, 0}, 1) == doctest::Approx(2.0));
  CHECK(f.at({0.75, 0, 0}, 0) == doctest::Approx(3.0));
  CHECK(f.sup() == doctest::Approx(4.0));
  CHECK(f.inf() == doctest::Approx(1.0));
  CHECK_THROWS_AS(RateField::constant(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(RateField::piecewise({0.0, 1.0}, {{1.0}, {2.0}}),
                  std::invalid_argument);
}

TEST_CASE("combined kernel arithmetic") {
  auto m = presets::rod1();
  m.sigma_s = RateField::constant(1.0);
  m.pi_s = ScatterKernel::uniform();  // mass 1/2 per outgoing velocity
  m.sigma_f = RateField::constant(2.0);
  // count law with mean 1/4: N=1 w.p. 1/4 else 0; uniform emission
  m.fission = FissionLaw::iid({0.75, 0.25}, EmissionFamily::uniform);
  const double val = combined_kernel(m, {0.5, 0, 0}, {1, 0, 0}, {-1, 0, 0});
  CHECK(val == doctest::Approx(1.0 * 0.5 + 2.0 * 0.25 * 0.5));

  m.sigma_f = RateField::constant(0.0);
  CHECK(combined_kernel(m, {0.5, 0, 0}, {1, 0, 0}, {1, 0, 0}) ==
        doctest::Approx(0.5));

  // alpha = sigma_s + sigma_f * m for discrete symmetric kernels
  const auto rod = presets::rod1();
  CHECK(alpha_rate(rod, {0.5, 0, 0}, {1, 0, 0}) ==
        doctest::Approx(0.5 + 1.0 * 1.5));
  // combined kernel dominates the scatter part and alpha >= sigma_s
  CHECK(combined_kernel(rod, {0.5, 0, 0}, {1, 0, 0}, {-1, 0, 0}) >=
        0.5 * 1.0 - 1e-15);
}

TEST_CASE("scatter kernel normalization holds on every cell") {
  const auto vs = VelocitySpace::discrete({{1, 0, 0}, {-1, 0, 0}, {2, 0, 0}});
  const auto k = ScatterKernel::table({{0.2, 0.3, 0.5}, {0.1, 0.8, 0.1}, {0, 0, 1.0}});
  k.validate(vs);
  for (std::size_t vin = 0; vin < 3; ++vin) {
    double s = 0.0;
    for (std::size_t vout = 0; vout < 3; ++vout) s += k.mass(vs, vin, vout);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(ScatterKernel::table({{0.5, 0.4}}).validate(vs),
                  std::invalid_argument);
  const auto bad = ScatterKernel::table({{0.5, 0.4, 0.2}, {1, 0, 0}, {1, 0, 0}});
  CHECK_THROWS_AS(bad.validate(vs), std::invalid_argument);
}

TEST_CASE("hypothesis validation on ROD1") {
  const auto rep = validate_hypotheses(presets::rod1());
  CHECK(rep.h1.pass);
  CHECK(rep.h2.pass);
  CHECK(rep.h2_star.pass);
  CHECK(rep.h3.pass);
  CHECK(rep.h3_star.pass);
  CHECK(rep.h4.pass);
  CHECK(rep.m2.pass);
  CHECK(rep.m1 == "deferred to solver");
  CHECK(rep.structural_pass());
}

TEST_CASE("hypothesis validation failure modes") {
  // sigma_f pi_f == 0 -> H3 and H3* fail
  auto no_fission = presets::rod1();
  no_fission.sigma_f = RateField::constant(0.0);
  const auto rep = validate_hypotheses(no_fission);
  CHECK_FALSE(rep.h3.pass);
  CHECK_FALSE(rep.h3_star.pass);
  // with fission off, flip scattering leaves zero mass to the same velocity
  CHECK_FALSE(rep.h2.pass);

  // unbounded offspring declaration -> H4 fails
  auto unbounded = presets::rod1();
  unbounded.fission.declare_unbounded();
  CHECK_FALSE(validate_hypotheses(unbounded).h4.pass);

  // implication: H2* pass -> H2 pass, H3* pass -> H3 pass
  for (const auto* model : {&no_fission, &unbounded}) {
    const auto r = validate_hypotheses(*model);
    if (r.h2_star.pass) CHECK(r.h2.pass);
    if (r.h3_star.pass) CHECK(r.h3.pass);
  }
}

TEST_CASE("fission mean check: two offspring with copied velocity") {
  auto m = presets::gw3();
  m.fission = FissionLaw::iid({0.0, 0.0, 1.0}, EmissionFamily::copy_incoming);
  const auto rep = fission_mean_check(
      m, {1e6, 0, 0}, {1, 0, 0}, [](const Vec3&) { return 1.0; }, 20000, 101);
  CHECK(rep.pass);
  // <1, pi_f> = 2 exactly
  CHECK(std::abs(rep.statistic) < 1e-12);
}

TEST_CASE("fission mean check: zero offspring and GW3 mean") {
  auto m = presets::gw3();
  m.fission = FissionLaw::iid({1.0}, EmissionFamily::copy_incoming);
  const auto rep0 = fission_mean_check(
      m, {1e6, 0, 0}, {1, 0, 0}, [](const Vec3&) { return 1.0; }, 1000, 7);
  CHECK(rep0.pass);
  CHECK(rep0.statistic == doctest::Approx(0.0));

  const auto gw = presets::gw3();
  const auto rep = fission_mean_check(
      gw, {1e6, 0, 0}, {1, 0, 0}, [](const Vec3&) { return 1.0; }, 100000, 11);
  CHECK(rep.pass);
  CHECK(rep.detail.find("target=1.5") != std::string::npos);
  CHECK_THROWS_AS(fission_mean_check(gw, {1e6, 0, 0}, {1, 0, 0},
                                     [](const Vec3&) { return 1.0; }, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("fission mean check: correlated tabulated law vs intensity") {
  // Twin emission: both offspring share one velocity; correlated but the
  // intensity is still 2 q.
  auto m = presets::rod1();
  m.fission = FissionLaw::tabulated({
      {{0.5, {0, 0}}, {0.5, {1, 1}}},  // from +1
      {{0.5, {0, 0}}, {0.5, {1, 1}}},  // from -1
  });
  const auto rep = fission_mean_check(
      m, {0.5, 0, 0}, {1, 0, 0}, [](const Vec3& v) { return v[0] > 0 ? 1.0 : 0.3; },
      100000, 13);
  CHECK(rep.pass);
}

TEST_CASE("fission law pgf, products, enumeration") {
  const auto vs = VelocitySpace::discrete({{1, 0, 0}, {-1, 0, 0}});
  const auto law = FissionLaw::iid(presets::gw3_counts(), EmissionFamily::uniform);
  CHECK(law.mean_count(0) == doctest::Approx(1.5));
  CHECK(law.count_pgf(0, 1.0) == doctest::Approx(1.0));
  CHECK(law.count_pgf(0, 1.0 / 3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(law.count_pgf_prime(0, 1.0) == doctest::Approx(1.5));

  const std::vector<double> h = {0.5, 0.25};
  // E prod = 1/4 + 3/4 theta^2 with theta = 0.375
  CHECK(law.expected_product(vs, 0, h) ==
        doctest::Approx(0.25 + 0.75 * 0.375 * 0.375));

  const auto configs = law.enumerate_configs(vs, 0);
  double total = 0.0;
  for (const auto& c : configs) total += c.prob;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // configs: empty + 4 ordered pairs
  CHECK(configs.size() == 5);
}

TEST_CASE("annulus model pieces") {
  const auto vs = VelocitySpace::annulus(0.5, 1.5);
  NbpModel m{
      SpatialDomain::ball({0, 0, 0}, 1.0),
      vs,
      RateField::constant(1.0),
      ScatterKernel::isotropic_annulus(),
      RateField::constant(0.5),
      FissionLaw::iid(presets::gw3_counts(), EmissionFamily::isotropic_annulus),
  };
  const auto rep = validate_hypotheses(m);
  CHECK(rep.structural_pass());

  RngStream rng(3, 0, "annulus");
  for (int i = 0; i < 200; ++i) {
    const Vec3 v = m.pi_s.sample(vs, {1, 0, 0}, rng);
    CHECK(vs.member(v));
  }
  // uniform-in-volume speed sampling has E|v|^3 = (lo^3 + hi^3)/2
  double s3 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const Vec3 v = m.pi_s.sample(vs, {1, 0, 0}, rng);
    s3 += std::pow(norm(v), 3.0);
  }
  CHECK(s3 / n == doctest::Approx(0.5 * (0.125 + 3.375)).epsilon(0.01));
}
