#ifndef PDCPD_NARX_HPP
#define PDCPD_NARX_HPP

#include <cstdint>
#include <vector>

#include "pdcpd/ddcpd.hpp"
#include "pdcpd/featurizer.hpp"

namespace pdcpd {

struct DelayRange {
  int lo = 1;
  int hi = 2;

  int count() const { return hi - lo + 1; }
};

struct NarxConfig {
  DelayRange input_delays{1, 2};
  DelayRange feedback_delays{1, 2};
  int hidden_size = 5;
  int epochs = 500;
  double learning_rate = 0.02;
  int patience = 25;
  double train_fraction = 0.8;
  int kfold_k = 5;

  void validate() const;
};

struct Normalization {
  std::vector<double> feature_mean, feature_std;  // per input feature
  double y_mean = 0.0, y_std = 1.0;
};

/// Single-hidden-layer NARX net: tanh hidden layer, linear output.
/// Input vector at time t stacks the delayed exogenous features
/// u(t - d) for d in input_delays and the delayed outputs y(t - d) for d in
/// feedback_delays, all z-normalized.
struct NarxModel {
  NarxConfig config;
  Normalization norm;
  std::size_t n_features = 0;
  // weights, row-major: w1 is hidden_size x input_dim
  std::vector<double> w1, b1, w2;
  double b2 = 0.0;

  std::size_t input_dim() const {
    return n_features * static_cast<std::size_t>(config.input_delays.count()) +
           static_cast<std::size_t>(config.feedback_delays.count());
  }
  int max_delay() const {
    return std::max(config.input_delays.hi, config.feedback_delays.hi);
  }
};

struct AccuracyReport {
  double mse = 0.0;
  double windowed_accuracy = 0.0;        // in [0, 1], over the window union
  std::vector<double> predicted_cp_times;  // minutes; -1 when no transition found
  double abs_time_deviation_min = 0.0;
};

/// Open-loop (series-parallel) training: delayed-y inputs are the ground
/// truth labels. Full-batch Adam on MSE, seeded random 80/20 train/validation
/// split, returns the weights at the best validation MSE (early stop on
/// patience).
NarxModel train(const FeatureSeries& features, const std::vector<double>& labels,
                const NarxConfig& cfg, std::uint64_t seed);

/// Grid search by chronological k-fold cross validation; returns the config
/// with the lowest mean validation MSE.
NarxConfig kfold_tune(const FeatureSeries& features, const std::vector<double>& labels,
                      const std::vector<NarxConfig>& grid, int k, std::uint64_t seed);

/// Series-parallel prediction: delayed-y inputs come from teacher_labels.
/// The first max-delay outputs are copied from teacher_labels. With
/// closed_loop, the model feeds back its own past predictions instead.
std::vector<double> predict(const NarxModel& model, const FeatureSeries& features,
                            const std::vector<double>& teacher_labels,
                            bool closed_loop = false);

/// Round half up, clamp to [bounds_lo, bounds_hi].
std::vector<int> discretize(const std::vector<double>& pred, int bounds_lo = 1,
                            int bounds_hi = 3);

/// Level-match accuracy over the union of windows of half_width intervals
/// centered at each change point (window = [c - h, c + h - 1], clipped).
/// Also extracts the first predicted level transition inside each window and
/// the summed absolute time deviation from the window centers; a window with
/// no transition contributes the half-width as its deviation.
AccuracyReport windowed_accuracy(const std::vector<int>& pred_levels,
                                 const std::vector<int>& sim_levels,
                                 const std::vector<std::size_t>& centers,
                                 std::size_t half_width_intervals,
                                 double interval_min);

/// Full-batch MSE loss and its gradient, flattened in (w1, b1, w2, b2) order.
double loss_and_gradient(const NarxModel& model,
                         const std::vector<std::vector<double>>& inputs,
                         const std::vector<double>& targets,
                         std::vector<double>* gradient);

/// Max relative error between the analytic gradient and central finite
/// differences (step 1e-5) on the given batch.
double gradient_check(const NarxModel& model,
                      const std::vector<std::vector<double>>& inputs,
                      const std::vector<double>& targets);

/// Normalized training samples (input vectors and targets) for the given
/// series; exposed for the gradient check and cross validation.
void build_samples(const FeatureSeries& features, const std::vector<double>& labels,
                   const NarxConfig& cfg, const Normalization& norm,
                   std::vector<std::vector<double>>* inputs,
                   std::vector<double>* targets);

Normalization fit_normalization(const FeatureSeries& features,
                                const std::vector<double>& labels);

/// JSON round-trip of weights, normalization stats and config.
std::string serialize_model(const NarxModel& model);
NarxModel deserialize_model(const std::string& text);

}  // namespace pdcpd

#endif  // PDCPD_NARX_HPP
