#ifndef PDCPD_SIMKIT_HPP
#define PDCPD_SIMKIT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pdcpd/common.hpp"

namespace pdcpd {

/// Arrival instants for one realization, in minutes from horizon start.
struct ArrivalTrace {
  std::vector<double> times;  // non-decreasing, each in [0, horizon_min)
  double horizon_min = 1440.0;

  void validate() const;
};

/// Piecewise-constant server count. levels[i] applies on
/// [change_points[i-1], change_points[i]), with the obvious end segments.
struct ResourceSchedule {
  std::vector<double> change_points;  // strictly increasing, inside (0, horizon)
  std::vector<int> levels;            // size = change_points.size() + 1, each >= 1

  int level_at(double t_min) const;
  void validate(double horizon_min) const;
};

enum class ServiceFamily { exponential, lognormal, deterministic };

ServiceFamily service_family_from_string(const std::string& name);
std::string to_string(ServiceFamily family);

/// Service duration distribution, parameters in minutes.
/// exponential: p1 = mean. lognormal: p1 = mu of log, p2 = sigma of log.
/// deterministic: p1 = value.
struct ServiceModel {
  ServiceFamily family = ServiceFamily::exponential;
  double p1 = 1.0;
  double p2 = 0.0;

  double sample(Rng& rng) const;
  double mean() const;
  void validate() const;
};

enum class EventKind { arrival, service_start, service_end };

std::string to_string(EventKind kind);
EventKind event_kind_from_string(const std::string& name);

struct EventRecord {
  std::int64_t entity_id = 0;
  EventKind kind = EventKind::arrival;
  double time_min = 0.0;
};

struct EventLog {
  std::vector<EventRecord> records;
  double horizon_min = 1440.0;
};

/// Piecewise-constant arrival rate profile: rates[i] (per minute) applies on
/// [i * segment_min, (i+1) * segment_min).
struct RateProfile {
  std::vector<double> rates;
  double segment_min = 60.0;

  double rate_at(double t_min) const;
  double horizon_min() const { return segment_min * static_cast<double>(rates.size()); }
};

/// Single-station multi-server FIFO queue with a piecewise-constant server
/// schedule. Capacity decreases are non-preemptive: a busy server finishes its
/// current job before being removed, so the in-service count may briefly
/// exceed the scheduled level right after a decrease; no service ever *starts*
/// above the scheduled level. Service durations are keyed by entity_id so the
/// same entity draws the same duration under any schedule (common random
/// numbers). Events at or after the horizon are not recorded.
EventLog simulate(const ArrivalTrace& trace, const ResourceSchedule& schedule,
                  const ServiceModel& service, std::uint64_t seed);

/// Nonhomogeneous Poisson arrivals by thinning against the profile maximum.
ArrivalTrace sample_arrivals(const RateProfile& profile, double horizon_min,
                             std::uint64_t seed);

/// Maximum-likelihood fit of the chosen family to observed service durations
/// (service_end - service_start) pooled across logs. Requires >= 30 completed
/// services.
ServiceModel fit_service(const std::vector<EventLog>& logs, ServiceFamily family);

/// Completed service durations found in a log (entities with both a start and
/// an end record).
std::vector<double> service_durations(const EventLog& log);

}  // namespace pdcpd

#endif  // PDCPD_SIMKIT_HPP
