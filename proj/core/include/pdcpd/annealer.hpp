#ifndef PDCPD_ANNEALER_HPP
#define PDCPD_ANNEALER_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "pdcpd/narx.hpp"
#include "pdcpd/simkit.hpp"

namespace pdcpd {

enum class AnnealObjective { one_minus_accuracy, mse, time_deviation };

struct AnnealConfig {
  int k_max = 60;
  int neighbor_radius = 6;      // max per-CP perturbation, grid intervals
  double temp0 = 1.0;
  double gamma = 0.95;          // geometric cooling factor
  int replications = 5;         // |S|
  AnnealObjective objective = AnnealObjective::one_minus_accuracy;
  std::size_t window_half_width0 = 12;  // intervals; constriction start
  double window_shrink = 0.2;           // shrink fraction per incumbent improvement
  std::size_t window_floor = 3;         // intervals
  bool paper_acceptance = false;  // original printed acceptance rule, for study
  bool closed_loop = false;

  void validate() const;
};

struct AnnealVisit {
  int k = 0;
  std::vector<std::size_t> tau;  // grid indices
  double eps = 0.0;
  bool accepted = false;
  double temperature = 0.0;
  std::size_t window_half_width = 0;
};

struct AnnealResult {
  std::vector<std::size_t> tau_star;
  double eps_star = 0.0;
  std::vector<AnnealVisit> archive;  // every visited (tau, eps)
};

/// Candidate evaluator: maps (change point grid indices, window half width)
/// to an error. In production this is the PDA procedure; tests may inject a
/// surrogate.
using Evaluator = std::function<double(const std::vector<std::size_t>&, std::size_t)>;

/// Inputs shared by every PDA evaluation: one arrival trace and one observed
/// feature series per realization, plus the segment resource levels tried
/// against candidate change times.
struct PdaInputs {
  std::vector<ArrivalTrace> traces;
  std::vector<FeatureSeries> observed;
  std::vector<int> levels;  // one per segment, taus.size() + 1
  ServiceModel service;
  double interval_min = 10.0;
  NarxConfig narx;
  std::uint64_t seed = 1;
};

/// Resource level per feature interval under the given schedule (level at the
/// interval midpoint).
std::vector<double> schedule_level_series(const ResourceSchedule& schedule,
                                          double horizon_min, double interval_min);

/// Procedure PDA: for each realization run |S| seeded simulation replications
/// of the candidate schedule, featurize, average the features across
/// replications, train a NARX model on (averaged simulated features ->
/// simulated level series), test it on the observed features, and score the
/// prediction in windows centered at the candidate change points. Returns the
/// mean per-realization error.
double pda(const PdaInputs& inputs, const std::vector<std::size_t>& tau_indices,
           const AnnealConfig& cfg, std::size_t window_half_width);

/// Per-realization accuracy reports for one candidate; pda() is the mean of
/// their errors under cfg.objective.
std::vector<AccuracyReport> pda_reports(const PdaInputs& inputs,
                                        const std::vector<std::size_t>& tau_indices,
                                        const AnnealConfig& cfg,
                                        std::size_t window_half_width);

/// Uniformly random neighbor: each change point offset independently by an
/// integer in [-n, n] grid intervals; redrawn until strictly increasing and
/// inside (0, grid_size).
std::vector<std::size_t> neighbors(const std::vector<std::size_t>& tau, int n,
                                   std::size_t grid_size, Rng& rng);

double temperature(int k, const AnnealConfig& cfg);

/// Simulated annealing over change point combinations starting from the
/// Stage A estimate. Every visited candidate lands in the archive and the
/// returned tau_star is the exact archive minimizer. The accuracy window
/// shrinks by window_shrink on every incumbent improvement (floor
/// window_floor).
AnnealResult anneal(const std::vector<std::size_t>& tau0, const Evaluator& evaluate,
                    const AnnealConfig& cfg, std::size_t grid_size, std::uint64_t seed);

/// Convenience wrapper binding pda as the evaluator.
AnnealResult anneal_pda(const std::vector<std::size_t>& tau0, const PdaInputs& inputs,
                        const AnnealConfig& cfg, std::size_t grid_size,
                        std::uint64_t seed);

}  // namespace pdcpd

#endif  // PDCPD_ANNEALER_HPP
