#ifndef PDCPD_IO_HPP
#define PDCPD_IO_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pdcpd/annealer.hpp"
#include "pdcpd/ddcpd.hpp"
#include "pdcpd/featurizer.hpp"
#include "pdcpd/simkit.hpp"

namespace pdcpd {

/// EventLog CSV: header `entity_id,event,time_min`, times with 6 decimals.
void write_event_log(std::ostream& os, const EventLog& log);
void write_event_log_file(const std::string& path, const EventLog& log);

/// Parse and validate an event log; violations report the 1-based line.
EventLog read_event_log(std::istream& is, double horizon_min);
EventLog read_event_log_file(const std::string& path, double horizon_min);

/// FeatureSeries CSV: header `t_index,<feature names...>`.
void write_feature_series(std::ostream& os, const FeatureSeries& series);
void write_feature_series_file(const std::string& path, const FeatureSeries& series);
FeatureSeries read_feature_series(std::istream& is, double interval_min);
FeatureSeries read_feature_series_file(const std::string& path, double interval_min);

/// Change points CSV: header `cp_index,cp_time_min`.
void write_change_points(std::ostream& os, const ChangePointSet& cps, double interval_min);
void write_change_points_file(const std::string& path, const ChangePointSet& cps,
                              double interval_min);

/// Anneal trace CSV: k, tau_i_min..., eps, accepted, temperature,
/// window_half_width.
void write_anneal_trace(std::ostream& os, const std::vector<AnnealVisit>& archive,
                        double interval_min);
void write_anneal_trace_file(const std::string& path,
                             const std::vector<AnnealVisit>& archive,
                             double interval_min);

/// Flat key=value config, `#` comments and blank lines ignored.
using Config = std::map<std::string, std::string>;
Config read_config(std::istream& is);
Config read_config_file(const std::string& path);

double config_double(const Config& cfg, const std::string& key, double fallback);
int config_int(const Config& cfg, const std::string& key, int fallback);
std::string config_string(const Config& cfg, const std::string& key,
                          const std::string& fallback);
std::vector<double> config_doubles(const Config& cfg, const std::string& key,
                                   const std::vector<double>& fallback);
std::vector<int> config_ints(const Config& cfg, const std::string& key,
                             const std::vector<int>& fallback);

std::string format_time(double minutes);  // 6 decimal places

}  // namespace pdcpd

#endif  // PDCPD_IO_HPP
