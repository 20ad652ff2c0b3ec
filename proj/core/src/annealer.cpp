#include "pdcpd/annealer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pdcpd/featurizer.hpp"

namespace pdcpd {

void AnnealConfig::validate() const {
  if (k_max < 0) throw ConfigError("anneal: k_max must be >= 0");
  if (neighbor_radius < 1) throw ConfigError("anneal: neighbor radius must be >= 1");
  if (temp0 <= 0.0) throw ConfigError("anneal: temp0 must be > 0");
  if (gamma <= 0.0 || gamma >= 1.0) throw ConfigError("anneal: gamma must be in (0, 1)");
  if (replications < 1) throw ConfigError("anneal: replications must be >= 1");
  if (window_floor < 1 || window_half_width0 < window_floor)
    throw ConfigError("anneal: window widths must satisfy floor >= 1, start >= floor");
}

std::vector<double> schedule_level_series(const ResourceSchedule& schedule,
                                          double horizon_min, double interval_min) {
  const auto T = static_cast<std::size_t>(std::llround(horizon_min / interval_min));
  std::vector<double> levels(T);
  for (std::size_t t = 0; t < T; ++t) {
    levels[t] = schedule.level_at((static_cast<double>(t) + 0.5) * interval_min);
  }
  return levels;
}

namespace {

double report_error(const AccuracyReport& report, AnnealObjective objective) {
  switch (objective) {
    case AnnealObjective::one_minus_accuracy: return 1.0 - report.windowed_accuracy;
    case AnnealObjective::mse: return report.mse;
    case AnnealObjective::time_deviation: return report.abs_time_deviation_min;
  }
  return 1.0 - report.windowed_accuracy;
}

}  // namespace

std::vector<AccuracyReport> pda_reports(const PdaInputs& inputs,
                                        const std::vector<std::size_t>& tau_indices,
                                        const AnnealConfig& cfg,
                                        std::size_t window_half_width) {
  if (inputs.traces.size() != inputs.observed.size())
    throw ConfigError("pda: traces and observed series counts differ");
  if (inputs.traces.empty()) throw ConfigError("pda: no realizations");
  if (inputs.levels.size() != tau_indices.size() + 1)
    throw ConfigError("pda: need one level per segment");

  ResourceSchedule schedule;
  schedule.levels = inputs.levels;
  for (std::size_t idx : tau_indices)
    schedule.change_points.push_back(static_cast<double>(idx) * inputs.interval_min);

  const double horizon = inputs.traces.front().horizon_min;
  const std::vector<double> sim_levels =
      schedule_level_series(schedule, horizon, inputs.interval_min);
  const std::vector<int> sim_levels_int(sim_levels.begin(), sim_levels.end());
  const int lvl_lo = *std::min_element(inputs.levels.begin(), inputs.levels.end());
  const int lvl_hi = *std::max_element(inputs.levels.begin(), inputs.levels.end());

  std::vector<AccuracyReport> reports;
  reports.reserve(inputs.traces.size());
  for (std::size_t r = 0; r < inputs.traces.size(); ++r) {
    try {
      std::vector<FeatureSeries> reps;
      reps.reserve(cfg.replications);
      for (int s = 0; s < cfg.replications; ++s) {
        const EventLog log =
            simulate(inputs.traces[r], schedule, inputs.service,
                     derive_seed(inputs.seed, "replication", r, static_cast<std::uint64_t>(s)));
        reps.push_back(snapshot_features(log, schedule, inputs.interval_min));
      }
      const FeatureSeries sim_features = average_series(reps);
      const NarxModel model = train(sim_features, sim_levels, inputs.narx,
                                    derive_seed(inputs.seed, "narx-train", r));
      const std::vector<double> pred =
          predict(model, inputs.observed[r], sim_levels, cfg.closed_loop);
      const std::vector<int> pred_levels = discretize(pred, lvl_lo, lvl_hi);
      reports.push_back(windowed_accuracy(pred_levels, sim_levels_int, tau_indices,
                                          window_half_width, inputs.interval_min));
    } catch (const std::exception& e) {
      throw TrainingError("pda: realization " + std::to_string(r) + " (seed " +
                          std::to_string(inputs.seed) + "): " + e.what());
    }
  }
  return reports;
}

double pda(const PdaInputs& inputs, const std::vector<std::size_t>& tau_indices,
           const AnnealConfig& cfg, std::size_t window_half_width) {
  const auto reports = pda_reports(inputs, tau_indices, cfg, window_half_width);
  double total = 0.0;
  for (const auto& report : reports) total += report_error(report, cfg.objective);
  return total / static_cast<double>(reports.size());
}

std::vector<std::size_t> neighbors(const std::vector<std::size_t>& tau, int n,
                                   std::size_t grid_size, Rng& rng) {
  if (n < 1) throw ConfigError("neighbors: n must be >= 1");
  constexpr int kMaxRedraws = 10000;
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    std::vector<std::size_t> cand;
    cand.reserve(tau.size());
    bool ok = true;
    for (std::size_t t : tau) {
      const std::int64_t off = rng.uniform_int(-n, n);
      const std::int64_t v = static_cast<std::int64_t>(t) + off;
      if (v < 1 || v >= static_cast<std::int64_t>(grid_size)) {
        ok = false;
        break;
      }
      cand.push_back(static_cast<std::size_t>(v));
    }
    if (!ok) continue;
    for (std::size_t i = 1; i < cand.size(); ++i) {
      if (cand[i] <= cand[i - 1]) {
        ok = false;
        break;
      }
    }
    if (ok) return cand;
  }
  throw ConfigError("neighbors: no feasible neighbor found");
}

double temperature(int k, const AnnealConfig& cfg) {
  return cfg.temp0 * std::pow(cfg.gamma, k);
}

AnnealResult anneal(const std::vector<std::size_t>& tau0, const Evaluator& evaluate,
                    const AnnealConfig& cfg, std::size_t grid_size, std::uint64_t seed) {
  cfg.validate();
  Rng rng(derive_seed(seed, "anneal"));
  AnnealResult result;
  std::size_t half_width = cfg.window_half_width0;

  std::vector<std::size_t> incumbent = tau0;
  double incumbent_eps = evaluate(tau0, half_width);
  result.archive.push_back(
      {0, tau0, incumbent_eps, true, temperature(0, cfg), half_width});
  auto on_improvement = [&] {
    half_width = std::max(
        cfg.window_floor,
        static_cast<std::size_t>(std::llround(
            static_cast<double>(half_width) * (1.0 - cfg.window_shrink))));
  };

  for (int k = 1; k <= cfg.k_max; ++k) {
    const std::vector<std::size_t> cand =
        neighbors(incumbent, cfg.neighbor_radius, grid_size, rng);
    const double eps = evaluate(cand, half_width);
    const double temp = temperature(k, cfg);
    bool accept;
    if (cfg.paper_acceptance) {
      // as printed: keep the incumbent with probability exp(eps - eps_inc /
      // (k * Temp(k))) whenever the candidate is not better
      if (eps >= incumbent_eps) {
        accept = !(rng.uniform() <
                   std::exp(eps - incumbent_eps / (static_cast<double>(k) * temp)));
      } else {
        accept = true;
      }
    } else {
      if (eps < incumbent_eps) {
        accept = true;
      } else {
        const double p =
            std::exp(-(eps - incumbent_eps) / (static_cast<double>(k) * temp));
        accept = rng.uniform() < p;
      }
    }
    const bool improved = eps < incumbent_eps;
    if (accept) {
      incumbent = cand;
      incumbent_eps = eps;
    }
    result.archive.push_back({k, cand, eps, accept, temp, half_width});
    if (improved && accept) on_improvement();
  }

  // exact scan over the archive
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.archive.size(); ++i) {
    if (result.archive[i].eps < result.archive[best].eps) best = i;
  }
  result.tau_star = result.archive[best].tau;
  result.eps_star = result.archive[best].eps;
  return result;
}

AnnealResult anneal_pda(const std::vector<std::size_t>& tau0, const PdaInputs& inputs,
                        const AnnealConfig& cfg, std::size_t grid_size,
                        std::uint64_t seed) {
  return anneal(
      tau0,
      [&](const std::vector<std::size_t>& tau, std::size_t half_width) {
        return pda(inputs, tau, cfg, half_width);
      },
      cfg, grid_size, seed);
}

}  // namespace pdcpd
