#include <doctest.h>

#include <cmath>
#include <map>

#include "pdcpd/annealer.hpp"
#include "pdcpd/pipeline.hpp"

using namespace pdcpd;

namespace {

AnnealConfig fast_config() {
  AnnealConfig cfg;
  cfg.k_max = 10;
  return cfg;
}

// separable surrogate with its minimum at (30, 100)
double surrogate(const std::vector<std::size_t>& tau, std::size_t) {
  return std::abs(static_cast<double>(tau[0]) - 30.0) +
         std::abs(static_cast<double>(tau[1]) - 100.0);
}

}  // namespace

TEST_CASE("temperature schedule") {
  AnnealConfig cfg;
  CHECK(temperature(0, cfg) == doctest::Approx(1.0));
  CHECK(temperature(10, cfg) == doctest::Approx(std::pow(0.95, 10)));
  double prev = temperature(0, cfg);
  for (int k = 1; k < 200; ++k) {
    const double t = temperature(k, cfg);
    CHECK(t < prev);
    prev = t;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("neighbors") {
  Rng rng(5);
  SUBCASE("single CP stays within the radius") {
    for (int i = 0; i < 200; ++i) {
      const auto cand = neighbors({60}, 6, 144, rng);
      REQUIRE(cand.size() == 1);
      CHECK(cand[0] >= 54);
      CHECK(cand[0] <= 66);
    }
  }
  SUBCASE("redraw preserves strict ordering") {
    for (int i = 0; i < 500; ++i) {
      const auto cand = neighbors({60, 63}, 6, 144, rng);
      REQUIRE(cand.size() == 2);
      CHECK(cand[0] < cand[1]);
      CHECK(cand[1] < 144);
      CHECK(cand[0] >= 1);
    }
  }
  SUBCASE("offsets are uniform over [-n, n]") {
    const int n = 3;
    std::map<std::int64_t, int> counts;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      const auto cand = neighbors({60}, n, 144, rng);
      counts[static_cast<std::int64_t>(cand[0]) - 60]++;
    }
    const double p = 1.0 / (2 * n + 1);
    const double sigma = std::sqrt(p * (1 - p) * draws);
    for (std::int64_t off = -n; off <= n; ++off) {
      CHECK(std::abs(counts[off] - p * draws) < 3.0 * sigma + 1.0);
    }
  }
  SUBCASE("pathological bounds raise") {
    CHECK_THROWS_AS(neighbors({1, 2, 3}, 1, 3, rng), ConfigError);
  }
}

TEST_CASE("anneal on a surrogate objective") {
  AnnealConfig cfg;
  cfg.k_max = 200;
  cfg.neighbor_radius = 6;

  SUBCASE("k_max = 0 returns tau0 evaluated once") {
    cfg.k_max = 0;
    const auto result = anneal({40, 90}, surrogate, cfg, 144, 1);
    CHECK(result.tau_star == std::vector<std::size_t>{40, 90});
    CHECK(result.archive.size() == 1);
    CHECK(result.eps_star == doctest::Approx(surrogate({40, 90}, 0)));
  }

  SUBCASE("finds the exact minimum of a convex separable surrogate") {
    const auto result = anneal({40, 90}, surrogate, cfg, 144, 17);
    CHECK(result.tau_star == std::vector<std::size_t>{30, 100});
    CHECK(result.eps_star == doctest::Approx(0.0));
    // no visited point beats the returned one
    for (const auto& v : result.archive) CHECK(v.eps >= result.eps_star);
  }

  SUBCASE("archive is complete and tau_star is its exact minimizer") {
    const auto result = anneal({40, 90}, surrogate, cfg, 144, 3);
    CHECK(result.archive.size() == static_cast<std::size_t>(cfg.k_max) + 1);
    double best = result.archive.front().eps;
    for (const auto& v : result.archive) best = std::min(best, v.eps);
    CHECK(result.eps_star == doctest::Approx(best));
  }

  SUBCASE("running best-so-far is non-increasing") {
    const auto result = anneal({40, 90}, surrogate, cfg, 144, 23);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : result.archive) {
      const double prev = best;
      best = std::min(best, v.eps);
      CHECK(best <= prev);
    }
  }

  SUBCASE("identical seeds reproduce the identical visit sequence") {
    const auto a = anneal({40, 90}, surrogate, cfg, 144, 31);
    const auto b = anneal({40, 90}, surrogate, cfg, 144, 31);
    REQUIRE(a.archive.size() == b.archive.size());
    for (std::size_t i = 0; i < a.archive.size(); ++i) {
      CHECK(a.archive[i].tau == b.archive[i].tau);
      CHECK(a.archive[i].eps == b.archive[i].eps);
      CHECK(a.archive[i].accepted == b.archive[i].accepted);
    }
  }
}

TEST_CASE("near-zero temperature never accepts a strictly worse candidate") {
  AnnealConfig cfg;
  cfg.k_max = 1000;
  cfg.temp0 = 1e-12;
  cfg.gamma = 0.5;
  const auto result = anneal({40, 90}, surrogate, cfg, 144, 7);
  double incumbent = result.archive.front().eps;
  for (std::size_t i = 1; i < result.archive.size(); ++i) {
    const auto& v = result.archive[i];
    if (v.accepted) {
      CHECK(v.eps <= incumbent);
      incumbent = v.eps;
    }
  }
}

TEST_CASE("window constriction shrinks on improvement down to the floor") {
  AnnealConfig cfg;
  cfg.k_max = 300;
  const auto result = anneal({40, 90}, surrogate, cfg, 144, 2);
  CHECK(result.archive.front().window_half_width == cfg.window_half_width0);
  std::size_t prev = cfg.window_half_width0;
  for (const auto& v : result.archive) {
    CHECK(v.window_half_width <= prev);
    CHECK(v.window_half_width >= cfg.window_floor);
    prev = v.window_half_width;
  }
  CHECK(result.archive.back().window_half_width == cfg.window_floor);
}

TEST_CASE("schedule_level_series reads levels at interval midpoints") {
  const ResourceSchedule schedule{{600.0, 1200.0}, {1, 3, 2}};
  const auto levels = schedule_level_series(schedule, 1440.0, 10.0);
  REQUIRE(levels.size() == 144);
  CHECK(levels[0] == 1);
  CHECK(levels[59] == 1);
  CHECK(levels[60] == 3);
  CHECK(levels[119] == 3);
  CHECK(levels[120] == 2);
  CHECK(levels[143] == 2);
}

TEST_CASE("pda discriminates the true schedule from a 2 h shift" * doctest::timeout(600)) {
  // observed data are generated by the same schedule the candidate proposes, so
  // the true tau should score strictly better than tau shifted by 2 h.  The
  // score is noisy (training is stochastic), so this is a paired comparison
  // over seeded scenarios, not an exact-zero check.
  Scenario scenario = Scenario::defaults();
  scenario.n_realizations = 2;
  scenario.narx.epochs = 200;

  int wins = 0;
  const int n_seeds = 20;
  for (int s = 0; s < n_seeds; ++s) {
    scenario.master_seed = 100 + static_cast<std::uint64_t>(s);
    const ScenarioData data = generate_scenario(scenario);

    PdaInputs inputs;
    inputs.traces = data.traces;
    inputs.observed = data.observed;
    inputs.levels = scenario.true_schedule.levels;
    inputs.service = scenario.service;
    inputs.interval_min = scenario.interval_min;
    inputs.narx = scenario.narx;
    inputs.seed = 7 + static_cast<std::uint64_t>(s);

    AnnealConfig cfg;
    const double eps_true = pda(inputs, {60, 120}, cfg, 12);
    const double eps_shift = pda(inputs, {48, 108}, cfg, 12);
    if (eps_true < eps_shift) ++wins;
  }
  CHECK(wins >= (n_seeds * 8) / 10);
}

TEST_CASE("pda with |S| = 1 and one realization equals the single test error") {
  Scenario scenario = Scenario::defaults();
  scenario.n_realizations = 1;
  scenario.service = {ServiceFamily::deterministic, 8.0, 0.0};
  scenario.narx.epochs = 200;
  scenario.master_seed = 42;
  const ScenarioData data = generate_scenario(scenario);

  PdaInputs one;
  one.traces = data.traces;
  one.observed = data.observed;
  one.levels = scenario.true_schedule.levels;
  one.service = scenario.service;
  one.interval_min = scenario.interval_min;
  one.narx = scenario.narx;
  one.seed = 7;

  AnnealConfig c1;
  c1.replications = 1;
  const auto reports = pda_reports(one, {60, 120}, c1, 12);
  REQUIRE(reports.size() == 1);
  CHECK(pda(one, {60, 120}, c1, 12) ==
        doctest::Approx(1.0 - reports[0].windowed_accuracy));
}
