#include <doctest.h>

#include <cmath>

#include "pdcpd/featurizer.hpp"

using namespace pdcpd;

namespace {

EventLog make_log(double horizon) {
  EventLog log;
  log.horizon_min = horizon;
  return log;
}

void add_entity(EventLog& log, std::int64_t id, double arrival, double start, double end) {
  log.records.push_back({id, EventKind::arrival, arrival});
  log.records.push_back({id, EventKind::service_start, start});
  log.records.push_back({id, EventKind::service_end, end});
}

}  // namespace

TEST_CASE("empty log gives zero features with full idle time") {
  const ResourceSchedule schedule{{}, {2}};
  const FeatureSeries f = snapshot_features(make_log(1440.0), schedule, 10.0);
  CHECK(f.rows == 144);
  CHECK(f.cols == 6);
  for (std::size_t t = 0; t < f.rows; ++t) {
    CHECK(f.at(t, 0) == 0.0);
    CHECK(f.at(t, 1) == 0.0);
    CHECK(f.at(t, 2) == 0.0);
    CHECK(f.at(t, 3) == 0.0);
    CHECK(f.at(t, 4) == doctest::Approx(20.0));  // capacity * window
    CHECK(f.at(t, 5) == 0.0);
  }
}

TEST_CASE("24h horizon with 10-min windows gives 144 rows") {
  const FeatureSeries f = snapshot_features(make_log(1440.0), {{}, {1}}, 10.0);
  CHECK(f.rows == 144);
}

TEST_CASE("non-divisible horizon rejected") {
  CHECK_THROWS_AS(snapshot_features(make_log(1445.0), {{}, {1}}, 10.0), ConfigError);
}

TEST_CASE("one entity occupying exactly one window") {
  // hand-computed integrals over window [10, 20)
  EventLog log = make_log(60.0);
  add_entity(log, 0, 10.0, 10.0, 20.0);
  const FeatureSeries f = snapshot_features(log, {{}, {1}}, 10.0);
  CHECK(f.at(1, 0) == doctest::Approx(1.0));  // avg in system
  CHECK(f.at(1, 1) == doctest::Approx(0.0));  // never queued
  CHECK(f.at(1, 2) == doctest::Approx(1.0));  // utilization
  CHECK(f.at(1, 3) == doctest::Approx(10.0));
  CHECK(f.at(1, 4) == doctest::Approx(0.0));
  CHECK(f.at(2, 5) == doctest::Approx(1.0));  // completion lands at t=20
  CHECK(f.at(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("queueing time counted in window integrals") {
  EventLog log = make_log(40.0);
  add_entity(log, 0, 0.0, 0.0, 15.0);
  add_entity(log, 1, 5.0, 15.0, 25.0);  // waits 10 min
  const FeatureSeries f = snapshot_features(log, {{}, {1}}, 10.0);
  // window 0: entity0 in service all 10; entity1 queued 5
  CHECK(f.at(0, 0) == doctest::Approx(1.5));
  CHECK(f.at(0, 1) == doctest::Approx(0.5));
  CHECK(f.at(0, 3) == doctest::Approx(10.0));
  // window 1: entity0 until 15, entity1 queued until 15 then served
  CHECK(f.at(1, 0) == doctest::Approx(2.0 * 5.0 / 10.0 + 5.0 / 10.0));
  CHECK(f.at(1, 1) == doctest::Approx(0.5));
  CHECK(f.at(1, 5) == doctest::Approx(1.0));
}

TEST_CASE("windows straddling a change point use time-weighted capacity") {
  const ResourceSchedule schedule{{15.0}, {1, 3}};
  const FeatureSeries f = snapshot_features(make_log(40.0), schedule, 10.0);
  CHECK(f.at(0, 4) == doctest::Approx(10.0));
  CHECK(f.at(1, 4) == doctest::Approx(1 * 5.0 + 3 * 5.0));
  CHECK(f.at(2, 4) == doctest::Approx(30.0));
}

TEST_CASE("feature invariants hold on a busy log") {
  EventLog log = make_log(120.0);
  // staggered entities, some unfinished at horizon
  add_entity(log, 0, 1.0, 1.0, 30.0);
  add_entity(log, 1, 2.0, 2.0, 45.0);
  add_entity(log, 2, 3.0, 30.0, 80.0);
  add_entity(log, 3, 50.0, 80.0, 119.0);
  log.records.push_back({4, EventKind::arrival, 100.0});
  log.records.push_back({4, EventKind::service_start, 119.0});
  const ResourceSchedule schedule{{60.0}, {2, 1}};
  const FeatureSeries f = snapshot_features(log, schedule, 10.0);
  for (std::size_t t = 0; t < f.rows; ++t) {
    CHECK(f.at(t, 2) >= 0.0);
    CHECK(f.at(t, 2) <= 1.0);
    CHECK(f.at(t, 0) >= f.at(t, 1));  // in system >= in queue
    const double scheduled =
        scheduled_capacity_min(schedule, t * 10.0, (t + 1) * 10.0);
    CHECK(f.at(t, 3) + f.at(t, 4) == doctest::Approx(scheduled));
  }
}

TEST_CASE("snapshot_features is deterministic") {
  EventLog log = make_log(60.0);
  add_entity(log, 0, 3.0, 3.0, 17.0);
  const auto a = snapshot_features(log, {{}, {1}}, 10.0);
  const auto b = snapshot_features(log, {{}, {1}}, 10.0);
  CHECK(a.values == b.values);
}

TEST_CASE("average_series") {
  SUBCASE("single series is identity") {
    FeatureSeries s;
    s.rows = 2;
    s.cols = 2;
    s.interval_min = 10.0;
    s.values = {1, 2, 3, 4};
    const auto avg = average_series({s});
    CHECK(avg.values == s.values);
  }
  SUBCASE("mean of zeros and twos is ones") {
    FeatureSeries a, b;
    a.rows = b.rows = 3;
    a.cols = b.cols = 1;
    a.interval_min = b.interval_min = 10.0;
    a.values = {0, 0, 0};
    b.values = {2, 2, 2};
    const auto avg = average_series({a, b});
    for (double v : avg.values) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("matches element-wise brute force on random series") {
    Rng rng(9);
    std::vector<FeatureSeries> all(5);
    for (auto& s : all) {
      s.rows = 4;
      s.cols = 3;
      s.interval_min = 10.0;
      s.values.resize(12);
      for (double& v : s.values) v = rng.uniform(-10.0, 10.0);
    }
    const auto avg = average_series(all);
    for (std::size_t j = 0; j < 12; ++j) {
      double expect = 0.0;
      for (const auto& s : all) expect += s.values[j];
      expect /= 5.0;
      CHECK(avg.values[j] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  SUBCASE("shape mismatch rejected") {
    FeatureSeries a, b;
    a.rows = 2;
    a.cols = 1;
    a.values = {1, 2};
    b.rows = 3;
    b.cols = 1;
    b.values = {1, 2, 3};
    a.interval_min = b.interval_min = 10.0;
    CHECK_THROWS_AS(average_series({a, b}), ConfigError);
  }
}
