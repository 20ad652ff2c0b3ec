#include "pdcpd/ddcpd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdcpd {

std::vector<std::size_t> ChangePointSet::to_indices(double interval_min) const {
  std::vector<std::size_t> idx;
  idx.reserve(times_min.size());
  for (double t : times_min)
    idx.push_back(static_cast<std::size_t>(std::llround(t / interval_min)));
  return idx;
}

ChangePointSet ChangePointSet::from_indices(const std::vector<std::size_t>& idx,
                                            double interval_min) {
  ChangePointSet out;
  out.times_min.reserve(idx.size());
  for (std::size_t i : idx) out.times_min.push_back(static_cast<double>(i) * interval_min);
  return out;
}

double cost_mean(const std::vector<double>& x, std::size_t a, std::size_t b) {
  if (a > b || b >= x.size()) throw ConfigError("cost_mean: empty or invalid range");
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = a; i <= b; ++i) {
    sum += x[i];
    sum_sq += x[i] * x[i];
  }
  const double n = static_cast<double>(b - a + 1);
  return std::max(0.0, sum_sq - sum * sum / n);
}

double cost_var(const std::vector<double>& x, std::size_t a, std::size_t b) {
  if (a > b || b >= x.size()) throw ConfigError("cost_var: empty or invalid range");
  const std::size_t n = b - a + 1;
  if (n < 2) throw ConfigError("cost_var: segment length must be >= 2");
  const double var = cost_mean(x, a, b) / static_cast<double>(n);
  return static_cast<double>(n) * std::log(std::max(var, kVarianceFloor));
}

SegmentCost::SegmentCost(const FeatureSeries& series, CostStatistic statistic)
    : n_(series.rows), dims_(series.cols), statistic_(statistic) {
  if (n_ == 0 || dims_ == 0) throw ConfigError("SegmentCost: empty series");
  prefix_.resize(dims_);
  prefix_sq_.resize(dims_);
  for (std::size_t d = 0; d < dims_; ++d) {
    // z-normalize each dimension with whole-series mean/std so no single
    // feature dominates the summed cost
    double mean = 0.0;
    for (std::size_t t = 0; t < n_; ++t) mean += series.at(t, d);
    mean /= static_cast<double>(n_);
    double var = 0.0;
    for (std::size_t t = 0; t < n_; ++t) {
      const double dev = series.at(t, d) - mean;
      var += dev * dev;
    }
    var /= static_cast<double>(n_);
    const double sd = std::sqrt(std::max(var, kVarianceFloor));

    prefix_[d].assign(n_ + 1, 0.0);
    prefix_sq_[d].assign(n_ + 1, 0.0);
    for (std::size_t t = 0; t < n_; ++t) {
      const double z = (series.at(t, d) - mean) / sd;
      prefix_[d][t + 1] = prefix_[d][t] + z;
      prefix_sq_[d][t + 1] = prefix_sq_[d][t] + z * z;
    }
  }
}

double SegmentCost::operator()(std::size_t a, std::size_t b) const {
  const double n = static_cast<double>(b - a + 1);
  double total = 0.0;
  for (std::size_t d = 0; d < dims_; ++d) {
    const double s = prefix_[d][b + 1] - prefix_[d][a];
    const double ss = prefix_sq_[d][b + 1] - prefix_sq_[d][a];
    const double rss = std::max(0.0, ss - s * s / n);
    if (statistic_ == CostStatistic::mean) {
      total += rss;
    } else {
      total += n * std::log(std::max(rss / n, kVarianceFloor));
    }
  }
  return total;
}

std::size_t detect_single(const FeatureSeries& series, CostStatistic statistic) {
  if (series.rows < 4) throw ConfigError("detect_single: need T >= 4");
  const SegmentCost cost(series, statistic);
  const std::size_t T = series.rows;
  const std::size_t lo = cost.min_segment();
  std::size_t best_t = lo;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = lo; t + cost.min_segment() <= T; ++t) {
    const double z = cost(0, t - 1) + cost(t, T - 1);
    if (z < best) {
      best = z;
      best_t = t;
    }
  }
  return best_t;
}

namespace {

struct DpResult {
  // dp[j][i]: min cost of covering prefix of length i with j segments
  std::vector<std::vector<double>> dp;
  std::vector<std::vector<std::size_t>> split;
};

DpResult run_dp(const SegmentCost& cost, std::size_t max_segments) {
  const std::size_t T = cost.length();
  const std::size_t min_len = cost.min_segment();
  const double inf = std::numeric_limits<double>::infinity();
  DpResult r;
  r.dp.assign(max_segments + 1, std::vector<double>(T + 1, inf));
  r.split.assign(max_segments + 1, std::vector<std::size_t>(T + 1, 0));
  r.dp[0][0] = 0.0;
  for (std::size_t j = 1; j <= max_segments; ++j) {
    for (std::size_t i = j * min_len; i <= T; ++i) {
      // last segment is [s, i-1]
      for (std::size_t s = (j - 1) * min_len; s + min_len <= i; ++s) {
        if (r.dp[j - 1][s] == inf) continue;
        const double c = r.dp[j - 1][s] + cost(s, i - 1);
        if (c < r.dp[j][i]) {
          r.dp[j][i] = c;
          r.split[j][i] = s;
        }
      }
    }
  }
  return r;
}

std::vector<std::size_t> backtrack(const DpResult& r, std::size_t segments,
                                   std::size_t T) {
  std::vector<std::size_t> cps;
  std::size_t i = T;
  for (std::size_t j = segments; j > 1; --j) {
    i = r.split[j][i];
    cps.push_back(i);
  }
  std::reverse(cps.begin(), cps.end());
  return cps;
}

}  // namespace

std::vector<std::size_t> detect_multi(const FeatureSeries& series,
                                      CostStatistic statistic, double beta,
                                      std::size_t max_cp) {
  if (beta < 0.0) throw ConfigError("detect_multi: beta must be >= 0");
  const SegmentCost cost(series, statistic);
  const std::size_t T = series.rows;
  const std::size_t max_n =
      std::min(max_cp, T / cost.min_segment() > 0 ? T / cost.min_segment() - 1 : 0);
  const DpResult r = run_dp(cost, max_n + 1);
  std::size_t best_n = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n <= max_n; ++n) {
    const double obj = r.dp[n + 1][T] + beta * static_cast<double>(n);
    if (obj < best) {
      best = obj;
      best_n = n;
    }
  }
  return backtrack(r, best_n + 1, T);
}

std::vector<std::size_t> detect_fixed(const FeatureSeries& series,
                                      CostStatistic statistic, std::size_t n_cp) {
  const SegmentCost cost(series, statistic);
  const std::size_t T = series.rows;
  if ((n_cp + 1) * cost.min_segment() > T)
    throw ConfigError("detect_fixed: too many change points for series length");
  const DpResult r = run_dp(cost, n_cp + 1);
  return backtrack(r, n_cp + 1, T);
}

ChangePointSet conciliate(const std::vector<ChangePointSet>& sets, ConciliateMode mode) {
  if (sets.empty()) throw ConfigError("conciliate: empty input");
  const std::size_t m = sets.front().times_min.size();
  for (const auto& s : sets) {
    if (s.times_min.size() != m)
      throw ConfigError("conciliate: change point sets differ in cardinality");
  }
  ChangePointSet out;
  out.times_min.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> vals;
    vals.reserve(sets.size());
    for (const auto& s : sets) {
      auto sorted = s.times_min;
      std::sort(sorted.begin(), sorted.end());
      vals.push_back(sorted[i]);
    }
    if (mode == ConciliateMode::mean) {
      double sum = 0.0;
      for (double v : vals) sum += v;
      out.times_min[i] = sum / static_cast<double>(vals.size());
    } else {
      std::sort(vals.begin(), vals.end());
      const std::size_t n = vals.size();
      out.times_min[i] =
          (n % 2 == 1) ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
    }
  }
  std::sort(out.times_min.begin(), out.times_min.end());
  return out;
}

double default_beta(std::size_t T, std::size_t m) {
  return 2.0 * static_cast<double>(m) * std::log(static_cast<double>(T));
}

}  // namespace pdcpd
