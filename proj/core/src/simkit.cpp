#include "pdcpd/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <queue>
#include <tuple>

namespace pdcpd {

void ArrivalTrace::validate() const {
  if (horizon_min <= 0.0) throw ConfigError("arrival trace: horizon must be positive");
  double prev = 0.0;
  for (double t : times) {
    if (t < prev) throw ConfigError("arrival trace: times must be non-decreasing");
    if (t < 0.0 || t >= horizon_min)
      throw ConfigError("arrival trace: time outside [0, horizon)");
    prev = t;
  }
}

int ResourceSchedule::level_at(double t_min) const {
  auto it = std::upper_bound(change_points.begin(), change_points.end(), t_min);
  return levels[static_cast<std::size_t>(it - change_points.begin())];
}

void ResourceSchedule::validate(double horizon_min) const {
  if (levels.empty()) throw ConfigError("schedule: levels must not be empty");
  if (levels.size() != change_points.size() + 1)
    throw ConfigError("schedule: need one level per segment");
  double prev = 0.0;
  for (double cp : change_points) {
    if (cp <= prev || cp >= horizon_min)
      throw ConfigError("schedule: change points must be strictly increasing inside (0, horizon)");
    prev = cp;
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1) throw ConfigError("schedule: every level must be >= 1");
    if (i > 0 && levels[i] == levels[i - 1])
      throw ConfigError("schedule: adjacent levels must differ");
  }
}

ServiceFamily service_family_from_string(const std::string& name) {
  if (name == "exponential") return ServiceFamily::exponential;
  if (name == "lognormal") return ServiceFamily::lognormal;
  if (name == "deterministic") return ServiceFamily::deterministic;
  throw ConfigError("unknown service family: " + name);
}

std::string to_string(ServiceFamily family) {
  switch (family) {
    case ServiceFamily::exponential: return "exponential";
    case ServiceFamily::lognormal: return "lognormal";
    case ServiceFamily::deterministic: return "deterministic";
  }
  return "?";
}

double ServiceModel::sample(Rng& rng) const {
  switch (family) {
    case ServiceFamily::exponential: return rng.exponential(p1);
    case ServiceFamily::lognormal: return rng.lognormal(p1, p2);
    case ServiceFamily::deterministic: return p1;
  }
  return p1;
}

double ServiceModel::mean() const {
  switch (family) {
    case ServiceFamily::exponential: return p1;
    case ServiceFamily::lognormal: return std::exp(p1 + 0.5 * p2 * p2);
    case ServiceFamily::deterministic: return p1;
  }
  return p1;
}

void ServiceModel::validate() const {
  switch (family) {
    case ServiceFamily::exponential:
      if (p1 <= 0.0) throw ConfigError("service: exponential mean must be > 0");
      break;
    case ServiceFamily::lognormal:
      if (p2 <= 0.0) throw ConfigError("service: lognormal sigma must be > 0");
      break;
    case ServiceFamily::deterministic:
      if (p1 <= 0.0) throw ConfigError("service: deterministic value must be > 0");
      break;
  }
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::arrival: return "arrival";
    case EventKind::service_start: return "service_start";
    case EventKind::service_end: return "service_end";
  }
  return "?";
}

EventKind event_kind_from_string(const std::string& name) {
  if (name == "arrival") return EventKind::arrival;
  if (name == "service_start") return EventKind::service_start;
  if (name == "service_end") return EventKind::service_end;
  throw ParseError("unknown event kind: " + name);
}

double RateProfile::rate_at(double t_min) const {
  const auto idx = static_cast<std::size_t>(t_min / segment_min);
  if (idx >= rates.size()) return 0.0;
  return rates[idx];
}

namespace {

// Event calendar entry. Capacity changes sort before service ends before
// arrivals at the same instant, then by sequence number for determinism.
enum class SimEventType : int { capacity_change = 0, service_end = 1, arrival = 2 };

struct SimEvent {
  double time;
  SimEventType type;
  std::uint64_t seq;
  std::int64_t entity_id;

  bool operator>(const SimEvent& other) const {
    return std::tie(time, type, seq) > std::tie(other.time, other.type, other.seq);
  }
};

}  // namespace

EventLog simulate(const ArrivalTrace& trace, const ResourceSchedule& schedule,
                  const ServiceModel& service, std::uint64_t seed) {
  trace.validate();
  schedule.validate(trace.horizon_min);
  service.validate();
  for (double cp : schedule.change_points) {
    if (cp >= trace.horizon_min)
      throw ConfigError("simulate: schedule and trace horizons mismatch");
  }

  const double horizon = trace.horizon_min;
  EventLog log;
  log.horizon_min = horizon;

  std::priority_queue<SimEvent, std::vector<SimEvent>, std::greater<SimEvent>> calendar;
  std::uint64_t seq = 0;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    calendar.push({trace.times[i], SimEventType::arrival, seq++,
                   static_cast<std::int64_t>(i)});
  }
  for (double cp : schedule.change_points) {
    calendar.push({cp, SimEventType::capacity_change, seq++, -1});
  }

  std::deque<std::int64_t> waiting;  // FIFO
  int busy = 0;

  auto service_draw = [&](std::int64_t entity_id) {
    Rng rng(derive_seed(seed, "service", static_cast<std::uint64_t>(entity_id)));
    return service.sample(rng);
  };

  auto record = [&](std::int64_t entity_id, EventKind kind, double t) {
    if (t < horizon) log.records.push_back({entity_id, kind, t});
  };

  auto start_services = [&](double t) {
    while (!waiting.empty() && busy < schedule.level_at(t)) {
      const std::int64_t id = waiting.front();
      waiting.pop_front();
      ++busy;
      record(id, EventKind::service_start, t);
      calendar.push({t + service_draw(id), SimEventType::service_end, seq++, id});
    }
  };

  while (!calendar.empty()) {
    const SimEvent ev = calendar.top();
    calendar.pop();
    if (ev.time >= horizon) break;
    switch (ev.type) {
      case SimEventType::arrival:
        record(ev.entity_id, EventKind::arrival, ev.time);
        waiting.push_back(ev.entity_id);
        break;
      case SimEventType::service_end:
        --busy;
        record(ev.entity_id, EventKind::service_end, ev.time);
        break;
      case SimEventType::capacity_change:
        break;
    }
    start_services(ev.time);
  }
  return log;
}

ArrivalTrace sample_arrivals(const RateProfile& profile, double horizon_min,
                             std::uint64_t seed) {
  if (horizon_min <= 0.0) throw ConfigError("sample_arrivals: horizon must be positive");
  for (double r : profile.rates) {
    if (r < 0.0) throw ConfigError("sample_arrivals: negative rate");
  }
  ArrivalTrace trace;
  trace.horizon_min = horizon_min;
  const double rate_max =
      profile.rates.empty() ? 0.0 : *std::max_element(profile.rates.begin(), profile.rates.end());
  if (rate_max > 0.0) {
    Rng rng(derive_seed(seed, "arrivals"));
    double t = 0.0;
    while (true) {
      t += rng.exponential(1.0 / rate_max);
      if (t >= horizon_min) break;
      if (rng.uniform() < profile.rate_at(t) / rate_max) trace.times.push_back(t);
    }
  }
  return trace;
}

std::vector<double> service_durations(const EventLog& log) {
  std::map<std::int64_t, double> starts;
  std::vector<double> durations;
  for (const auto& rec : log.records) {
    if (rec.kind == EventKind::service_start) {
      starts[rec.entity_id] = rec.time_min;
    } else if (rec.kind == EventKind::service_end) {
      auto it = starts.find(rec.entity_id);
      if (it != starts.end()) durations.push_back(rec.time_min - it->second);
    }
  }
  return durations;
}

ServiceModel fit_service(const std::vector<EventLog>& logs, ServiceFamily family) {
  std::vector<double> durations;
  for (const auto& log : logs) {
    auto d = service_durations(log);
    durations.insert(durations.end(), d.begin(), d.end());
  }
  if (durations.size() < 30)
    throw InsufficientDataError("fit_service: need >= 30 completed services, got " +
                                std::to_string(durations.size()));
  const double n = static_cast<double>(durations.size());
  ServiceModel model;
  model.family = family;
  switch (family) {
    case ServiceFamily::exponential:
    case ServiceFamily::deterministic: {
      model.p1 = std::accumulate(durations.begin(), durations.end(), 0.0) / n;
      break;
    }
    case ServiceFamily::lognormal: {
      double sum = 0.0;
      for (double d : durations) sum += std::log(d);
      const double mu = sum / n;
      double ss = 0.0;
      for (double d : durations) {
        const double dev = std::log(d) - mu;
        ss += dev * dev;
      }
      model.p1 = mu;
      model.p2 = std::sqrt(ss / n);
      break;
    }
  }
  return model;
}

}  // namespace pdcpd
