#include <doctest.h>

#include <cmath>

#include "sgdlab/montecarlo.hpp"

using namespace sgdlab;

namespace {

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

Landscape circle_basin(double degree) {
  LandscapeSpec spec;
  spec.family = LandscapeSpec::Family::kPowerBasin;
  spec.degree = degree;
  spec.dimension = 2;
  spec.minima = SphereSet{Vector::Zero(2), 1.0};
  return make_landscape(spec);
}

ExperimentConfig experiment(double degree, double r, Schedule sched, double sigma, long horizon,
                            Vector x1, long trials, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.sgd.landscape = circle_basin(degree);
  cfg.sgd.region = NeighborhoodSpec{r, cfg.sgd.landscape.minima};
  cfg.sgd.schedule = sched;
  cfg.sgd.noise = GaussianNoise{sigma};
  cfg.sgd.horizon = horizon;
  cfg.sgd.x1 = std::move(x1);
  cfg.sgd.seed = seed;
  cfg.trials = trials;
  cfg.label = "test";

  BoundInputs bi;
  bi.dist1 = dist_and_project(cfg.sgd.x1, cfg.sgd.landscape.minima).distance;
  bi.radius = r;
  bi.lipschitz = 2.0;  // analytic for the quadratic circle on r <= 0.5
  bi.sigma_r = sigma * sigma * 2.0;
  bi.batch_size = 1;
  bi.schedule = sched;
  bi.horizon = horizon;
  cfg.bound_inputs = bi;
  return cfg;
}

}  // namespace

TEST_CASE("Wilson interval") {
  SUBCASE("brackets the empirical frequency") {
    const WilsonInterval ci = wilson99(300, 1000);
    CHECK(ci.low < 0.3);
    CHECK(ci.high > 0.3);
    CHECK(ci.low > 0.26);
    CHECK(ci.high < 0.34);
    CHECK_THROWS_AS(wilson99(5, 0), std::invalid_argument);
    CHECK_THROWS_AS(wilson99(-1, 10), std::invalid_argument);
    CHECK_THROWS_AS(wilson99(11, 10), std::invalid_argument);
  }

  SUBCASE("stays inside [0,1] at the extremes") {
    const WilsonInterval zero = wilson99(0, 100);
    CHECK(zero.low == 0.0);
    CHECK(zero.high > 0.0);
    const WilsonInterval one = wilson99(100, 100);
    CHECK(one.high == 1.0);
    CHECK(one.low < 1.0);
  }

  SUBCASE("99% coverage on synthetic Bernoulli(0.3) streams") {
    const double p = 0.3;
    const long m = 10000;
    int covered = 0;
    RngStream rng(12345);
    for (int rep = 0; rep < 1000; ++rep) {
      long hits = 0;
      for (long k = 0; k < m; ++k)
        if (rng.uniform01() < p) ++hits;
      const WilsonInterval ci = wilson99(hits, m);
      if (ci.low <= p && p <= ci.high) ++covered;
    }
    CHECK(covered >= 980);
  }
}

TEST_CASE("stability estimation") {
  SUBCASE("deterministic descent never exits") {
    auto cfg = experiment(2.0, 0.5, Schedule::decreasing(0.1, 0.8), 0.0, 300, vec2(1.3, 0.0),
                          200, 11);
    const MCResult r = estimate_stability(cfg);
    CHECK(r.empirical_p == doctest::Approx(1.0));
    CHECK(r.dominated == Dominance::kDominated);
    REQUIRE(r.theoretical_bound.has_value());
    CHECK(*r.theoretical_bound <= 1.0);
  }

  SUBCASE("vacuous bound is reported, not asserted") {
    auto cfg = experiment(2.0, 0.5, Schedule::constant(0.4), 0.8, 400, vec2(1.45, 0.0), 200, 11);
    const MCResult r = estimate_stability(cfg);
    REQUIRE(r.theoretical_bound.has_value());
    CHECK(*r.theoretical_bound < 0.0);  // C_N > 1, never clamped
    CHECK(r.dominated == Dominance::kVacuous);
  }

  SUBCASE("bit-exact reproducibility") {
    auto cfg = experiment(2.0, 0.5, Schedule::decreasing(0.15, 0.7), 0.2, 200, vec2(1.2, 0.1),
                          300, 77);
    const MCResult a = estimate_stability(cfg);
    const MCResult b = estimate_stability(cfg);
    CHECK(a.empirical_p == b.empirical_p);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.ci_high == b.ci_high);
  }

  SUBCASE("results are independent of the worker count") {
    auto cfg = experiment(2.0, 0.5, Schedule::decreasing(0.15, 0.7), 0.3, 150, vec2(1.2, 0.1),
                          400, 78);
    cfg.threads = 1;
    const MCResult serial = estimate_stability(cfg);
    cfg.threads = 4;
    const MCResult parallel = estimate_stability(cfg);
    CHECK(serial.empirical_p == parallel.empirical_p);
  }

  SUBCASE("stay probability is non-increasing in the noise scale") {
    double previous = 2.0;
    for (const double sigma : {0.05, 0.4, 1.2}) {
      auto cfg = experiment(2.0, 0.3, Schedule::constant(0.2), sigma, 250, vec2(1.15, 0.0),
                            2000, 5);
      const double p = estimate_stability(cfg).empirical_p;
      CHECK(p <= previous + 1e-12);
      previous = p;
    }
  }

  SUBCASE("trial and consistency gates") {
    auto cfg = experiment(2.0, 0.5, Schedule::constant(0.1), 0.1, 100, vec2(1.2, 0.0), 99, 1);
    CHECK_THROWS_AS(estimate_stability(cfg), std::invalid_argument);
    cfg.trials = 200;
    cfg.bound_inputs.radius = 0.4;  // disagrees with the sgd region
    CHECK_THROWS_AS(estimate_stability(cfg), std::invalid_argument);
  }
}

TEST_CASE("concentration estimation") {
  SUBCASE("deterministic run: the event frequency follows the final gap") {
    auto cfg = experiment(2.0, 0.5, Schedule::decreasing(0.2, 0.6), 0.0, 400, vec2(1.2, 0.0),
                          150, 3);
    // With zero noise every trajectory is the same; the running minimum of
    // h = gap is the final gap.
    SgdConfig probe = cfg.sgd;
    probe.seed = mix_seed(cfg.sgd.seed, 0);
    const double floor_gap = run_trajectory_summary(probe).final_gap;
    REQUIRE(floor_gap > 0.0);
    cfg.epsilon_grid = {floor_gap * 2.0, floor_gap * 0.5};
    const auto results = estimate_concentration(cfg);
    REQUIRE(results.size() == 4);
    for (const auto& r : results) {
      if (!r.epsilon) continue;
      if (r.event_name == "min_h_gt_eps")
        CHECK(r.empirical_p == doctest::Approx(*r.epsilon > floor_gap ? 0.0 : 1.0));
    }
  }

  SUBCASE("a tolerance above sup h over the region is never exceeded") {
    auto cfg = experiment(2.0, 0.5, Schedule::decreasing(0.1, 0.8), 0.1, 200, vec2(1.2, 0.0),
                          200, 9);
    cfg.epsilon_grid = {10.0};
    const auto results = estimate_concentration(cfg);
    CHECK(results[0].empirical_p == doctest::Approx(0.0));
    CHECK(results[0].dominated != Dominance::kViolated);
  }

  SUBCASE("gap events carry no absolute bound") {
    auto cfg = experiment(2.0, 0.5, Schedule::decreasing(0.1, 0.8), 0.05, 150, vec2(1.1, 0.0),
                          150, 13);
    cfg.epsilon_grid = {1e-3};
    const auto results = estimate_concentration(cfg);
    bool saw_gap_event = false;
    for (const auto& r : results) {
      if (r.event_name == "final_gap_gt_eps") {
        saw_gap_event = true;
        CHECK_FALSE(r.theoretical_bound.has_value());
        CHECK(r.dominated == Dominance::kNoBound);
      }
    }
    CHECK(saw_gap_event);
  }

  SUBCASE("an empty tolerance grid is refused") {
    auto cfg = experiment(2.0, 0.5, Schedule::decreasing(0.1, 0.8), 0.05, 150, vec2(1.1, 0.0),
                          150, 13);
    cfg.epsilon_grid = {};
    CHECK_THROWS_AS(estimate_concentration(cfg), std::invalid_argument);
  }
}

TEST_CASE("rate fits") {
  SUBCASE("horizon validation") {
    auto cfg = experiment(2.0, 0.5, Schedule::decreasing(0.3, 0.6), 0.1, 100, vec2(1.05, 0.0),
                          150, 21);
    CHECK_THROWS_AS(fit_rate_slope(cfg, {100, 200, 400}), std::invalid_argument);
    CHECK_THROWS_AS(fit_rate_slope(cfg, {100, 200, 400, 800}), std::invalid_argument);
    CHECK_THROWS_AS(fit_rate_slope(cfg, {400, 100, 800, 4000}), std::invalid_argument);
  }

  SUBCASE("quadratic circle decays roughly like the schedule exponent") {
    auto cfg = experiment(2.0, 0.5, Schedule::decreasing(0.3, 0.6), 0.1, 100, vec2(1.05, 0.0),
                          200, 21);
    const RateFit fit = fit_rate_slope(cfg, {60, 200, 600, 2000});
    CHECK(fit.slope < -0.3);
    CHECK(fit.slope > -0.9);
    for (double frac : fit.stayed_fraction) CHECK(frac >= 0.5);
    for (std::size_t i = 1; i < fit.means.size(); ++i) CHECK(fit.means[i] < fit.means[i - 1]);
  }

  SUBCASE("lossy conditioning is refused") {
    // A rate far above 2/L with noise: nearly every path exits.
    auto cfg = experiment(2.0, 0.2, Schedule::constant(1.5), 0.6, 100, vec2(1.1, 0.0), 150, 23);
    CHECK_THROWS_AS(fit_rate_slope(cfg, {40, 130, 400, 1300}), std::runtime_error);
  }
}

TEST_CASE("bound comparison summary") {
  MCResult dominated;
  dominated.event_name = "stability";
  dominated.dominated = Dominance::kDominated;
  MCResult vacuous = dominated;
  vacuous.dominated = Dominance::kVacuous;
  MCResult unbounded = dominated;
  unbounded.dominated = Dominance::kNoBound;
  MCResult violated = dominated;
  violated.event_name = "min_h_gt_eps";
  violated.epsilon = 1e-2;
  violated.dominated = Dominance::kViolated;
  violated.master_seed = 99;
  violated.config_label = "cafef00d";

  const ComparisonSummary summary =
      compare_to_bounds({dominated, vacuous, unbounded, violated});
  CHECK(summary.dominated == 1);
  CHECK(summary.vacuous == 1);
  CHECK(summary.unbounded == 1);
  CHECK(summary.violated == 1);
  REQUIRE(summary.failures.size() == 1);
  CHECK(summary.failures[0].master_seed == 99);
  CHECK(summary.failures[0].config_label == "cafef00d");
}
