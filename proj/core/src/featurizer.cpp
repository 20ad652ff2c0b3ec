#include "pdcpd/featurizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pdcpd {

const std::array<const char*, kNumSnapshotFeatures> kSnapshotFeatureNames = {
    "avg_in_system", "avg_in_queue", "utilization",
    "busy_min",      "idle_min",     "completions"};

double scheduled_capacity_min(const ResourceSchedule& schedule, double t0, double t1) {
  double total = 0.0;
  double t = t0;
  while (t < t1) {
    auto it = std::upper_bound(schedule.change_points.begin(), schedule.change_points.end(), t);
    const double seg_end =
        (it == schedule.change_points.end()) ? t1 : std::min(*it, t1);
    total += schedule.levels[static_cast<std::size_t>(it - schedule.change_points.begin())] *
             (seg_end - t);
    t = seg_end;
  }
  return total;
}

namespace {

struct EntitySpan {
  double arrival = -1.0;
  double start = -1.0;
  double end = -1.0;
};

// Adds the overlap of [lo, hi) with each window to per-window accumulators.
void accumulate_span(std::vector<double>& acc, double lo, double hi, double interval) {
  if (hi <= lo) return;
  const auto first = static_cast<std::size_t>(lo / interval);
  const auto last = std::min(acc.size() - 1, static_cast<std::size_t>(hi / interval));
  for (std::size_t w = first; w <= last && w < acc.size(); ++w) {
    const double w0 = static_cast<double>(w) * interval;
    const double w1 = w0 + interval;
    const double overlap = std::min(hi, w1) - std::max(lo, w0);
    if (overlap > 0.0) acc[w] += overlap;
  }
}

}  // namespace

FeatureSeries snapshot_features(const EventLog& log, const ResourceSchedule& schedule,
                                double interval_min) {
  if (interval_min <= 0.0) throw ConfigError("snapshot_features: interval must be positive");
  const double ratio = log.horizon_min / interval_min;
  const auto T = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(T)) > 1e-9 || T == 0)
    throw ConfigError("snapshot_features: horizon not divisible by interval width");
  schedule.validate(log.horizon_min);

  std::map<std::int64_t, EntitySpan> spans;
  std::vector<double> completions(T, 0.0);
  for (const auto& rec : log.records) {
    EntitySpan& s = spans[rec.entity_id];
    switch (rec.kind) {
      case EventKind::arrival: s.arrival = rec.time_min; break;
      case EventKind::service_start: s.start = rec.time_min; break;
      case EventKind::service_end: s.end = rec.time_min; break;
    }
    if (rec.kind == EventKind::service_end) {
      const auto w = static_cast<std::size_t>(rec.time_min / interval_min);
      if (w < T) completions[w] += 1.0;
    }
  }

  std::vector<double> in_system(T, 0.0), in_queue(T, 0.0), busy(T, 0.0);
  for (const auto& [id, s] : spans) {
    if (s.arrival < 0.0) continue;
    const double leave = (s.end >= 0.0) ? s.end : log.horizon_min;
    accumulate_span(in_system, s.arrival, leave, interval_min);
    if (s.start >= 0.0) {
      accumulate_span(in_queue, s.arrival, s.start, interval_min);
      accumulate_span(busy, s.start, leave, interval_min);
    } else {
      accumulate_span(in_queue, s.arrival, leave, interval_min);
    }
  }

  FeatureSeries out;
  out.interval_min = interval_min;
  out.rows = T;
  out.cols = kNumSnapshotFeatures;
  out.values.resize(T * kNumSnapshotFeatures);
  out.feature_names.assign(kSnapshotFeatureNames.begin(), kSnapshotFeatureNames.end());
  for (std::size_t t = 0; t < T; ++t) {
    const double w0 = static_cast<double>(t) * interval_min;
    const double scheduled = scheduled_capacity_min(schedule, w0, w0 + interval_min);
    // Non-preemptive overhang after a capacity decrease can push raw busy
    // time above the scheduled time; cap it so utilization stays in [0, 1]
    // and busy + idle = scheduled.
    const double busy_capped = std::min(busy[t], scheduled);
    out.at(t, 0) = in_system[t] / interval_min;
    out.at(t, 1) = in_queue[t] / interval_min;
    out.at(t, 2) = busy_capped / scheduled;
    out.at(t, 3) = busy_capped;
    out.at(t, 4) = scheduled - busy_capped;
    out.at(t, 5) = completions[t];
  }
  return out;
}

FeatureSeries average_series(const std::vector<FeatureSeries>& series) {
  if (series.empty()) throw ConfigError("average_series: empty input");
  const FeatureSeries& first = series.front();
  FeatureSeries out = first;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const FeatureSeries& s = series[i];
    if (s.rows != first.rows || s.cols != first.cols ||
        s.interval_min != first.interval_min)
      throw ConfigError("average_series: shape mismatch");
    for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] += s.values[j];
  }
  const double n = static_cast<double>(series.size());
  for (double& v : out.values) v /= n;
  return out;
}

}  // namespace pdcpd
