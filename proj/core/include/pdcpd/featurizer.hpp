#ifndef PDCPD_FEATURIZER_HPP
#define PDCPD_FEATURIZER_HPP

#include <array>
#include <string>
#include <vector>

#include "pdcpd/simkit.hpp"

namespace pdcpd {

/// T x m matrix of windowed performance features, row t covering
/// [t * interval_min, (t+1) * interval_min).
struct FeatureSeries {
  double interval_min = 10.0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
  std::vector<std::string> feature_names;

  double& at(std::size_t t, std::size_t f) { return values[t * cols + f]; }
  double at(std::size_t t, std::size_t f) const { return values[t * cols + f]; }
};

inline constexpr std::size_t kNumSnapshotFeatures = 6;

extern const std::array<const char*, kNumSnapshotFeatures> kSnapshotFeatureNames;

/// Windowed snapshot features of an event log, 6 per window:
///   0 avg_in_system   time-average number of entities in the system
///   1 avg_in_queue    time-average number waiting for service
///   2 utilization     busy server-time / scheduled server-time, in [0, 1]
///   3 busy_min        total server busy time in the window (server-minutes)
///   4 idle_min        total server idle time in the window (server-minutes)
///   5 completions     count of service completions in the window
/// The schedule supplies capacity for utilization and idle time; windows that
/// straddle a change point use the time-weighted scheduled capacity. Entities
/// without a recorded end are counted in-system (and in-service, once
/// started) until the horizon.
FeatureSeries snapshot_features(const EventLog& log, const ResourceSchedule& schedule,
                                double interval_min);

/// Element-wise mean of equally-shaped series.
FeatureSeries average_series(const std::vector<FeatureSeries>& series);

/// Integral of the scheduled server count over [t0, t1).
double scheduled_capacity_min(const ResourceSchedule& schedule, double t0, double t1);

}  // namespace pdcpd

#endif  // PDCPD_FEATURIZER_HPP
