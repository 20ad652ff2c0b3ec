#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pdcpd/pipeline.hpp"

using namespace pdcpd;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream is(path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("generate_scenario shapes") {
  Scenario scenario = Scenario::defaults();
  SUBCASE("defaults give 30 series of 144 x 6") {
    const ScenarioData data = generate_scenario(scenario);
    CHECK(data.observed.size() == 30);
    for (const auto& s : data.observed) {
      CHECK(s.rows == 144);
      CHECK(s.cols == 6);
    }
  }
  SUBCASE("single realization") {
    scenario.n_realizations = 1;
    const ScenarioData data = generate_scenario(scenario);
    CHECK(data.observed.size() == 1);
  }
  SUBCASE("different master seeds change traces, not shapes") {
    scenario.n_realizations = 2;
    scenario.master_seed = 1;
    const ScenarioData a = generate_scenario(scenario);
    scenario.master_seed = 2;
    const ScenarioData b = generate_scenario(scenario);
    CHECK(a.traces[0].times != b.traces[0].times);
    CHECK(a.observed[0].rows == b.observed[0].rows);
  }
}

TEST_CASE("stage A lands near the true change points") {
  Scenario scenario = Scenario::defaults();
  scenario.n_realizations = 10;
  scenario.master_seed = 11;
  const ScenarioData data = generate_scenario(scenario);
  const ChangePointSet dd = run_stage_a(data.observed, scenario, nullptr);
  REQUIRE(dd.times_min.size() == 2);
  CHECK(std::abs(dd.times_min[0] - 600.0) <= 90.0);
  CHECK(std::abs(dd.times_min[1] - 1200.0) <= 90.0);
}

TEST_CASE("stage A single realization conciliation is identity") {
  Scenario scenario = Scenario::defaults();
  scenario.n_realizations = 1;
  scenario.master_seed = 4;
  const ScenarioData data = generate_scenario(scenario);
  std::vector<ChangePointSet> per;
  const ChangePointSet dd = run_stage_a(data.observed, scenario, &per);
  REQUIRE(per.size() == 1);
  CHECK(dd.times_min == per[0].times_min);
}

TEST_CASE("event log CSV round trip") {
  Scenario scenario = Scenario::defaults();
  scenario.n_realizations = 1;
  const ScenarioData data = generate_scenario(scenario);
  const EventLog& log = data.truth_logs[0];
  std::ostringstream os;
  write_event_log(os, log);
  std::istringstream is(os.str());
  const EventLog back = read_event_log(is, log.horizon_min);
  REQUIRE(back.records.size() == log.records.size());
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    CHECK(back.records[i].entity_id == log.records[i].entity_id);
    CHECK(back.records[i].kind == log.records[i].kind);
    CHECK(back.records[i].time_min ==
          doctest::Approx(log.records[i].time_min).epsilon(1e-6));
  }
}

TEST_CASE("event log parse errors name the line") {
  SUBCASE("service_end before service_start") {
    std::istringstream is(
        "entity_id,event,time_min\n"
        "0,arrival,1.000000\n"
        "0,service_start,5.000000\n"
        "0,service_end,4.000000\n");
    try {
      read_event_log(is, 100.0);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
  }
  SUBCASE("malformed row") {
    std::istringstream is("entity_id,event,time_min\nnot,a,row\n");
    CHECK_THROWS_AS(read_event_log(is, 100.0), ParseError);
  }
}

TEST_CASE("feature series CSV round trip") {
  Scenario scenario = Scenario::defaults();
  scenario.n_realizations = 1;
  const ScenarioData data = generate_scenario(scenario);
  std::ostringstream os;
  write_feature_series(os, data.observed[0]);
  std::istringstream is(os.str());
  const FeatureSeries back = read_feature_series(is, scenario.interval_min);
  CHECK(back.rows == data.observed[0].rows);
  CHECK(back.cols == data.observed[0].cols);
  CHECK(back.feature_names == data.observed[0].feature_names);
  for (std::size_t i = 0; i < back.values.size(); ++i)
    CHECK(back.values[i] == doctest::Approx(data.observed[0].values[i]).epsilon(1e-7));
}

TEST_CASE("config parsing") {
  std::istringstream is(
      "# case study\n"
      "n_realizations = 5\n"
      "true_cps=540,1260\n"
      "true_levels = 1,2,3\n"
      "service_family=lognormal\n"
      "service_p1 = 1.5\n"
      "service_p2 = 0.3\n");
  const Config cfg = read_config(is);
  Scenario s = Scenario::from_config(cfg);
  CHECK(s.n_realizations == 5);
  CHECK(s.true_schedule.change_points == std::vector<double>{540.0, 1260.0});
  CHECK(s.true_schedule.levels == std::vector<int>{1, 2, 3});
  CHECK(s.service.family == ServiceFamily::lognormal);
  CHECK(s.service.p1 == doctest::Approx(1.5));
}

TEST_CASE("config violations rejected") {
  SUBCASE("bad level range") {
    Config cfg;
    cfg["true_levels"] = "1,4,2";
    CHECK_THROWS_AS(Scenario::from_config(cfg), ConfigError);
  }
  SUBCASE("indivisible horizon") {
    Config cfg;
    cfg["interval_min"] = "7";
    CHECK_THROWS_AS(Scenario::from_config(cfg), ConfigError);
  }
}

TEST_CASE("full pipeline determinism and report consistency" * doctest::timeout(900)) {
  Scenario scenario = Scenario::defaults();
  scenario.n_realizations = 3;
  scenario.anneal.k_max = 3;
  scenario.narx.epochs = 60;
  scenario.master_seed = 5;

  const ScenarioData data = generate_scenario(scenario);
  const ChangePointSet tau0 = run_stage_a(data.observed, scenario, nullptr);
  const RunReport a = run_stage_b(tau0, data, scenario);
  const RunReport b = run_stage_b(tau0, data, scenario);

  CHECK(a.pd_cps.times_min == b.pd_cps.times_min);
  CHECK(a.wins + a.losses + a.ties == scenario.n_realizations);
  REQUIRE(a.realizations.size() == 3);

  const auto dir = std::filesystem::temp_directory_path() / "pdcpd_test_report";
  std::filesystem::remove_all(dir);
  write_report(dir.string(), a, data, scenario);
  const std::string report1 = slurp(dir / "report.csv");
  const std::string trace1 = slurp(dir / "anneal_trace.csv");
  write_report(dir.string(), b, data, scenario);
  CHECK(slurp(dir / "report.csv") == report1);
  CHECK(slurp(dir / "anneal_trace.csv") == trace1);
  CHECK(std::filesystem::exists(dir / "per_realization.csv"));
  CHECK(std::filesystem::exists(dir / "dd_cps.csv"));
  CHECK(std::filesystem::exists(dir / "pd_cps.csv"));
  CHECK(std::filesystem::exists(dir / "features_realization0.csv"));
  std::filesystem::remove_all(dir);
}
