#include "pdcpd/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace pdcpd {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open: " + path);
  return is;
}

}  // namespace

std::string format_time(double minutes) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", minutes);
  return buf;
}

void write_event_log(std::ostream& os, const EventLog& log) {
  os << "entity_id,event,time_min\n";
  for (const auto& rec : log.records) {
    os << rec.entity_id << ',' << to_string(rec.kind) << ',' << format_time(rec.time_min)
       << '\n';
  }
}

void write_event_log_file(const std::string& path, const EventLog& log) {
  auto os = open_out(path);
  write_event_log(os, log);
}

EventLog read_event_log(std::istream& is, double horizon_min) {
  EventLog log;
  log.horizon_min = horizon_min;
  std::string line;
  std::size_t line_no = 0;
  // per-entity monotonicity state: arrival <= service_start <= service_end
  struct Seen {
    double arrival = -1.0, start = -1.0, end = -1.0;
  };
  std::map<std::int64_t, Seen> seen;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "entity_id,event,time_min")
        throw ParseError("line 1: unexpected header '" + line + "'");
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 3)
      throw ParseError("line " + std::to_string(line_no) + ": expected 3 fields");
    std::int64_t id = 0;
    const auto [p, ec] =
        std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), id);
    if (ec != std::errc() || p != fields[0].data() + fields[0].size())
      throw ParseError("line " + std::to_string(line_no) + ": bad entity id '" +
                       fields[0] + "'");
    EventKind kind;
    try {
      kind = event_kind_from_string(fields[1]);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    const double t = parse_double(fields[2], line_no);
    Seen& s = seen[id];
    switch (kind) {
      case EventKind::arrival: s.arrival = t; break;
      case EventKind::service_start:
        if (s.arrival >= 0.0 && t < s.arrival)
          throw ParseError("line " + std::to_string(line_no) +
                           ": service_start before arrival for entity " +
                           std::to_string(id));
        s.start = t;
        break;
      case EventKind::service_end:
        if (s.start >= 0.0 && t < s.start)
          throw ParseError("line " + std::to_string(line_no) +
                           ": service_end before service_start for entity " +
                           std::to_string(id));
        s.end = t;
        break;
    }
    log.records.push_back({id, kind, t});
  }
  return log;
}

EventLog read_event_log_file(const std::string& path, double horizon_min) {
  auto is = open_in(path);
  return read_event_log(is, horizon_min);
}

void write_feature_series(std::ostream& os, const FeatureSeries& series) {
  os << "t_index";
  for (const auto& name : series.feature_names) os << ',' << name;
  os << '\n';
  char buf[64];
  for (std::size_t t = 0; t < series.rows; ++t) {
    os << t;
    for (std::size_t f = 0; f < series.cols; ++f) {
      std::snprintf(buf, sizeof(buf), "%.9g", series.at(t, f));
      os << ',' << buf;
    }
    os << '\n';
  }
}

void write_feature_series_file(const std::string& path, const FeatureSeries& series) {
  auto os = open_out(path);
  write_feature_series(os, series);
}

FeatureSeries read_feature_series(std::istream& is, double interval_min) {
  FeatureSeries series;
  series.interval_min = interval_min;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (line_no == 1) {
      if (fields.empty() || fields[0] != "t_index")
        throw ParseError("line 1: expected header starting with t_index");
      series.feature_names.assign(fields.begin() + 1, fields.end());
      series.cols = series.feature_names.size();
      continue;
    }
    if (fields.size() != series.cols + 1)
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(series.cols + 1) + " fields");
    for (std::size_t f = 1; f < fields.size(); ++f)
      series.values.push_back(parse_double(fields[f], line_no));
    ++series.rows;
  }
  if (series.cols == 0 || series.rows == 0) throw ParseError("empty feature series");
  return series;
}

FeatureSeries read_feature_series_file(const std::string& path, double interval_min) {
  auto is = open_in(path);
  return read_feature_series(is, interval_min);
}

void write_change_points(std::ostream& os, const ChangePointSet& cps,
                         double interval_min) {
  os << "cp_index,cp_time_min\n";
  for (double t : cps.times_min) {
    os << static_cast<long long>(std::llround(t / interval_min)) << ','
       << format_time(t) << '\n';
  }
}

void write_change_points_file(const std::string& path, const ChangePointSet& cps,
                              double interval_min) {
  auto os = open_out(path);
  write_change_points(os, cps, interval_min);
}

void write_anneal_trace(std::ostream& os, const std::vector<AnnealVisit>& archive,
                        double interval_min) {
  const std::size_t n_cp = archive.empty() ? 0 : archive.front().tau.size();
  os << "k";
  for (std::size_t i = 0; i < n_cp; ++i) os << ",tau_" << (i + 1) << "_min";
  os << ",eps,accepted,temperature,window_half_width\n";
  char buf[64];
  for (const auto& v : archive) {
    os << v.k;
    for (std::size_t t : v.tau)
      os << ',' << format_time(static_cast<double>(t) * interval_min);
    std::snprintf(buf, sizeof(buf), "%.9g", v.eps);
    os << ',' << buf << ',' << (v.accepted ? 1 : 0);
    std::snprintf(buf, sizeof(buf), "%.9g", v.temperature);
    os << ',' << buf << ',' << v.window_half_width << '\n';
  }
}

void write_anneal_trace_file(const std::string& path,
                             const std::vector<AnnealVisit>& archive,
                             double interval_min) {
  auto os = open_out(path);
  write_anneal_trace(os, archive, interval_min);
}

Config read_config(std::istream& is) {
  Config cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(line_no) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
    };
    cfg[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config read_config_file(const std::string& path) {
  auto is = open_in(path);
  return read_config(is);
}

double config_double(const Config& cfg, const std::string& key, double fallback) {
  auto it = cfg.find(key);
  return it == cfg.end() ? fallback : parse_double(it->second, 0);
}

int config_int(const Config& cfg, const std::string& key, int fallback) {
  auto it = cfg.find(key);
  return it == cfg.end() ? fallback : static_cast<int>(std::llround(parse_double(it->second, 0)));
}

std::string config_string(const Config& cfg, const std::string& key,
                          const std::string& fallback) {
  auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

std::vector<double> config_doubles(const Config& cfg, const std::string& key,
                                   const std::vector<double>& fallback) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  std::vector<double> out;
  for (const auto& field : split(it->second, ',')) out.push_back(parse_double(field, 0));
  return out;
}

std::vector<int> config_ints(const Config& cfg, const std::string& key,
                             const std::vector<int>& fallback) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  std::vector<int> out;
  for (const auto& field : split(it->second, ','))
    out.push_back(static_cast<int>(std::llround(parse_double(field, 0))));
  return out;
}

}  // namespace pdcpd
