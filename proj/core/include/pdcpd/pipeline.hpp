#ifndef PDCPD_PIPELINE_HPP
#define PDCPD_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pdcpd/annealer.hpp"
#include "pdcpd/ddcpd.hpp"
#include "pdcpd/io.hpp"

namespace pdcpd {

/// Case-study scenario: a single-station queue with two daily shift changes.
/// The default arrival profile is diurnal (low overnight, high daytime) with
/// exponential service, sized so a single server runs hot overnight.
struct Scenario {
  int n_realizations = 30;
  double horizon_min = 1440.0;
  double interval_min = 10.0;
  ResourceSchedule true_schedule{{600.0, 1200.0}, {1, 3, 1}};
  RateProfile arrivals{{}, 60.0};  // filled by defaults() when empty
  ServiceModel service{ServiceFamily::exponential, 8.0, 0.0};
  std::uint64_t master_seed = 1;

  AnnealConfig anneal;
  NarxConfig narx;
  std::size_t n_cps = 2;  // known change point count for Stage A
  CostStatistic statistic = CostStatistic::mean;

  static Scenario defaults();
  static Scenario from_config(const Config& cfg);
  void validate() const;
  std::size_t grid_size() const {
    return static_cast<std::size_t>(horizon_min / interval_min);
  }
};

struct ScenarioData {
  std::vector<ArrivalTrace> traces;
  std::vector<EventLog> truth_logs;       // ground truth, scoring only
  std::vector<FeatureSeries> observed;    // features of the truth logs
};

/// One seeded simulate + snapshot_features per realization under the true
/// schedule; the logs play the role of observed history.
ScenarioData generate_scenario(const Scenario& scenario);

/// Stage A: per-realization detect_fixed (known change point count), then
/// median conciliation across realizations. Also returns the per-realization
/// estimates for reporting.
ChangePointSet run_stage_a(const std::vector<FeatureSeries>& observed,
                           const Scenario& scenario,
                           std::vector<ChangePointSet>* per_realization = nullptr);

struct RealizationScore {
  double dd_deviation_min = 0.0;
  double pd_deviation_min = 0.0;
};

struct RunReport {
  ChangePointSet dd_cps;
  ChangePointSet pd_cps;
  double dd_total_deviation_min = 0.0;  // |tau_DD - truth|, summed over CPs
  double pd_total_deviation_min = 0.0;
  std::vector<RealizationScore> realizations;
  int wins = 0, losses = 0, ties = 0;
  bool has_ground_truth = false;
  std::vector<AnnealVisit> anneal_archive;
};

/// Stage B: anneal from the Stage A estimate with the PDA evaluator, then
/// score both estimates against ground truth (when available) and build the
/// per-realization comparison.
RunReport run_stage_b(const ChangePointSet& tau0, const ScenarioData& data,
                      const Scenario& scenario);

/// Full pipeline: generate, Stage A, Stage B.
RunReport run_pipeline(const Scenario& scenario);

/// Writes report.csv, per_realization.csv, dd_cps.csv, pd_cps.csv,
/// anneal_trace.csv and features_realization0.csv under out_dir.
void write_report(const std::string& out_dir, const RunReport& report,
                  const ScenarioData& data, const Scenario& scenario);

/// Average PDA error on a grid of change point pairs around the true values
/// (response-surface data); bounds default +-2 h. Emits
/// `tau1_min,tau2_min,eps` rows.
void write_grid_evaluation(const std::string& path, const ScenarioData& data,
                           const Scenario& scenario, int half_span_intervals = 12,
                           int stride = 3);

}  // namespace pdcpd

#endif  // PDCPD_PIPELINE_HPP
