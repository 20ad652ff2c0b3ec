#ifndef PDCPD_DDCPD_HPP
#define PDCPD_DDCPD_HPP

#include <cstddef>
#include <vector>

#include "pdcpd/featurizer.hpp"

namespace pdcpd {

enum class CostStatistic { mean, stddev };

/// Ordered candidate change times, in minutes. Helpers convert to and from
/// the feature grid.
struct ChangePointSet {
  std::vector<double> times_min;
  std::vector<int> levels;  // optional, one per segment when known

  std::vector<std::size_t> to_indices(double interval_min) const;
  static ChangePointSet from_indices(const std::vector<std::size_t>& idx,
                                     double interval_min);
};

inline constexpr double kVarianceFloor = 1e-12;

/// Mean-statistic segment cost over x[a..b] inclusive:
/// (b - a + 1) * population variance, i.e. the residual sum of squares from
/// the best horizontal fit.
double cost_mean(const std::vector<double>& x, std::size_t a, std::size_t b);

/// Stddev-statistic segment cost: (b - a + 1) * ln(max(var, floor)).
/// Requires segment length >= 2.
double cost_var(const std::vector<double>& x, std::size_t a, std::size_t b);

/// Precomputed per-dimension prefix sums over a z-normalized multivariate
/// series; segment costs in O(1) per dimension.
class SegmentCost {
 public:
  SegmentCost(const FeatureSeries& series, CostStatistic statistic);

  /// Summed cost of segment [a..b] across all dimensions.
  double operator()(std::size_t a, std::size_t b) const;

  std::size_t length() const { return n_; }
  std::size_t min_segment() const {
    return statistic_ == CostStatistic::stddev ? 2 : 1;
  }

 private:
  std::size_t n_ = 0;
  std::size_t dims_ = 0;
  CostStatistic statistic_;
  std::vector<std::vector<double>> prefix_;    // per dim, size n+1
  std::vector<std::vector<double>> prefix_sq_; // per dim, size n+1
};

/// Single change point: argmin over t in [1, T-1] of
/// cost(0, t-1) + cost(t, T-1), summed over dimensions. Ties break toward the
/// smallest t. Returns the first index of the new regime.
std::size_t detect_single(const FeatureSeries& series, CostStatistic statistic);

/// Penalized multi change point search minimizing total segment cost + beta*N
/// over N <= max_cp, by exact dynamic programming. Returned indices are
/// segment start positions of the regimes after each change.
std::vector<std::size_t> detect_multi(const FeatureSeries& series,
                                      CostStatistic statistic, double beta,
                                      std::size_t max_cp);

/// Same dynamic program with the change point count fixed to exactly n_cp
/// (no penalty term).
std::vector<std::size_t> detect_fixed(const FeatureSeries& series,
                                      CostStatistic statistic, std::size_t n_cp);

enum class ConciliateMode { median, mean };

/// Element-wise median (or mean) of equally-sized change point sets across
/// realizations.
ChangePointSet conciliate(const std::vector<ChangePointSet>& sets,
                          ConciliateMode mode = ConciliateMode::median);

/// BIC-style default penalty: 2 * m * ln(T).
double default_beta(std::size_t T, std::size_t m);

}  // namespace pdcpd

#endif  // PDCPD_DDCPD_HPP
