#include "pdcpd/narx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

namespace pdcpd {

void NarxConfig::validate() const {
  if (input_delays.lo < 1 || input_delays.hi < input_delays.lo)
    throw ConfigError("narx: input delays must satisfy 1 <= lo <= hi");
  if (feedback_delays.lo < 1 || feedback_delays.hi < feedback_delays.lo)
    throw ConfigError("narx: feedback delays must satisfy 1 <= lo <= hi");
  if (hidden_size < 1) throw ConfigError("narx: hidden_size must be >= 1");
  if (train_fraction <= 0.0 || train_fraction >= 1.0)
    throw ConfigError("narx: train_fraction must be in (0, 1)");
  if (epochs < 1) throw ConfigError("narx: epochs must be >= 1");
}

Normalization fit_normalization(const FeatureSeries& features,
                                const std::vector<double>& labels) {
  Normalization norm;
  const auto T = features.rows;
  norm.feature_mean.assign(features.cols, 0.0);
  norm.feature_std.assign(features.cols, 1.0);
  for (std::size_t f = 0; f < features.cols; ++f) {
    double mean = 0.0;
    for (std::size_t t = 0; t < T; ++t) mean += features.at(t, f);
    mean /= static_cast<double>(T);
    double var = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const double d = features.at(t, f) - mean;
      var += d * d;
    }
    norm.feature_mean[f] = mean;
    norm.feature_std[f] = std::max(std::sqrt(var / static_cast<double>(T)), 1e-12);
  }
  double ym = std::accumulate(labels.begin(), labels.end(), 0.0) /
              static_cast<double>(labels.size());
  double yv = 0.0;
  for (double y : labels) yv += (y - ym) * (y - ym);
  norm.y_mean = ym;
  norm.y_std = std::max(std::sqrt(yv / static_cast<double>(labels.size())), 1e-12);
  return norm;
}

void build_samples(const FeatureSeries& features, const std::vector<double>& labels,
                   const NarxConfig& cfg, const Normalization& norm,
                   std::vector<std::vector<double>>* inputs,
                   std::vector<double>* targets) {
  const auto T = features.rows;
  if (labels.size() != T) throw ConfigError("narx: features/labels length mismatch");
  const int dmax = std::max(cfg.input_delays.hi, cfg.feedback_delays.hi);
  inputs->clear();
  targets->clear();
  for (std::size_t t = static_cast<std::size_t>(dmax); t < T; ++t) {
    std::vector<double> x;
    x.reserve(features.cols * cfg.input_delays.count() + cfg.feedback_delays.count());
    for (int d = cfg.input_delays.lo; d <= cfg.input_delays.hi; ++d) {
      for (std::size_t f = 0; f < features.cols; ++f) {
        x.push_back((features.at(t - d, f) - norm.feature_mean[f]) / norm.feature_std[f]);
      }
    }
    for (int d = cfg.feedback_delays.lo; d <= cfg.feedback_delays.hi; ++d) {
      x.push_back((labels[t - d] - norm.y_mean) / norm.y_std);
    }
    for (double v : x)
      if (!std::isfinite(v)) throw ConfigError("narx: non-finite input");
    inputs->push_back(std::move(x));
    targets->push_back((labels[t] - norm.y_mean) / norm.y_std);
  }
}

namespace {

std::size_t param_count(const NarxModel& m) {
  return m.w1.size() + m.b1.size() + m.w2.size() + 1;
}

void flatten(const NarxModel& m, std::vector<double>* out) {
  out->clear();
  out->reserve(param_count(m));
  out->insert(out->end(), m.w1.begin(), m.w1.end());
  out->insert(out->end(), m.b1.begin(), m.b1.end());
  out->insert(out->end(), m.w2.begin(), m.w2.end());
  out->push_back(m.b2);
}

void unflatten(const std::vector<double>& flat, NarxModel* m) {
  std::size_t p = 0;
  for (double& w : m->w1) w = flat[p++];
  for (double& w : m->b1) w = flat[p++];
  for (double& w : m->w2) w = flat[p++];
  m->b2 = flat[p++];
}

double forward(const NarxModel& m, const std::vector<double>& x) {
  const int h = m.config.hidden_size;
  const std::size_t d = x.size();
  double out = m.b2;
  for (int j = 0; j < h; ++j) {
    double a = m.b1[j];
    const double* row = &m.w1[static_cast<std::size_t>(j) * d];
    for (std::size_t i = 0; i < d; ++i) a += row[i] * x[i];
    out += m.w2[j] * std::tanh(a);
  }
  return out;
}

}  // namespace

double loss_and_gradient(const NarxModel& model,
                         const std::vector<std::vector<double>>& inputs,
                         const std::vector<double>& targets,
                         std::vector<double>* gradient) {
  const int h = model.config.hidden_size;
  const std::size_t d = inputs.empty() ? model.input_dim() : inputs.front().size();
  const std::size_t n = inputs.size();
  if (n == 0) throw ConfigError("narx: empty batch");

  std::vector<double> gw1(model.w1.size(), 0.0), gb1(model.b1.size(), 0.0),
      gw2(model.w2.size(), 0.0);
  double gb2 = 0.0;
  double loss = 0.0;
  std::vector<double> act(h);
  for (std::size_t s = 0; s < n; ++s) {
    const std::vector<double>& x = inputs[s];
    double out = model.b2;
    for (int j = 0; j < h; ++j) {
      double a = model.b1[j];
      const double* row = &model.w1[static_cast<std::size_t>(j) * d];
      for (std::size_t i = 0; i < d; ++i) a += row[i] * x[i];
      act[j] = std::tanh(a);
      out += model.w2[j] * act[j];
    }
    const double err = out - targets[s];
    loss += err * err;
    const double dout = 2.0 * err / static_cast<double>(n);
    gb2 += dout;
    for (int j = 0; j < h; ++j) {
      gw2[j] += dout * act[j];
      const double da = dout * model.w2[j] * (1.0 - act[j] * act[j]);
      gb1[j] += da;
      double* grow = &gw1[static_cast<std::size_t>(j) * d];
      for (std::size_t i = 0; i < d; ++i) grow[i] += da * x[i];
    }
  }
  loss /= static_cast<double>(n);
  if (gradient) {
    gradient->clear();
    gradient->reserve(param_count(model));
    gradient->insert(gradient->end(), gw1.begin(), gw1.end());
    gradient->insert(gradient->end(), gb1.begin(), gb1.end());
    gradient->insert(gradient->end(), gw2.begin(), gw2.end());
    gradient->push_back(gb2);
  }
  return loss;
}

double gradient_check(const NarxModel& model,
                      const std::vector<std::vector<double>>& inputs,
                      const std::vector<double>& targets) {
  std::vector<double> analytic;
  loss_and_gradient(model, inputs, targets, &analytic);
  std::vector<double> flat;
  flatten(model, &flat);
  NarxModel probe = model;
  const double step = 1e-5;
  double max_rel = 0.0;
  for (std::size_t p = 0; p < flat.size(); ++p) {
    const double orig = flat[p];
    flat[p] = orig + step;
    unflatten(flat, &probe);
    const double lp = loss_and_gradient(probe, inputs, targets, nullptr);
    flat[p] = orig - step;
    unflatten(flat, &probe);
    const double lm = loss_and_gradient(probe, inputs, targets, nullptr);
    flat[p] = orig;
    const double numeric = (lp - lm) / (2.0 * step);
    const double denom = std::max({std::abs(numeric), std::abs(analytic[p]), 1e-8});
    max_rel = std::max(max_rel, std::abs(numeric - analytic[p]) / denom);
  }
  unflatten(flat, &probe);
  return max_rel;
}

namespace {

NarxModel init_model(const NarxConfig& cfg, std::size_t n_features,
                     const Normalization& norm, std::uint64_t seed) {
  NarxModel m;
  m.config = cfg;
  m.norm = norm;
  m.n_features = n_features;
  const std::size_t d = m.input_dim();
  const int h = cfg.hidden_size;
  m.w1.resize(static_cast<std::size_t>(h) * d);
  m.b1.assign(h, 0.0);
  m.w2.resize(h);
  Rng rng(derive_seed(seed, "narx-init"));
  const double s1 = 1.0 / std::sqrt(static_cast<double>(d));
  for (double& w : m.w1) w = rng.uniform(-0.5, 0.5) * s1;
  const double s2 = 1.0 / std::sqrt(static_cast<double>(h));
  for (double& w : m.w2) w = rng.uniform(-0.5, 0.5) * s2;
  return m;
}

// Full-batch Adam on the given train/validation split; keeps the weights at
// the best validation loss, early stop on patience.
void train_core(NarxModel* model, const std::vector<std::vector<double>>& inputs,
                const std::vector<double>& targets, std::size_t n_train,
                std::uint64_t seed, double* best_val_out) {
  const NarxConfig& cfg = model->config;
  std::vector<std::vector<double>> train_x(inputs.begin(), inputs.begin() + n_train);
  std::vector<double> train_y(targets.begin(), targets.begin() + n_train);
  std::vector<std::vector<double>> val_x(inputs.begin() + n_train, inputs.end());
  std::vector<double> val_y(targets.begin() + n_train, targets.end());

  std::vector<double> flat, grad;
  flatten(*model, &flat);
  std::vector<double> m1(flat.size(), 0.0), m2(flat.size(), 0.0);
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;

  std::vector<double> best_flat = flat;
  double best_val = std::numeric_limits<double>::infinity();
  int stale = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double loss = loss_and_gradient(*model, train_x, train_y, &grad);
    if (!std::isfinite(loss))
      throw TrainingError("narx: training diverged (seed " + std::to_string(seed) + ")");
    for (std::size_t p = 0; p < flat.size(); ++p) {
      m1[p] = b1 * m1[p] + (1.0 - b1) * grad[p];
      m2[p] = b2 * m2[p] + (1.0 - b2) * grad[p] * grad[p];
      const double mh = m1[p] / (1.0 - std::pow(b1, epoch));
      const double vh = m2[p] / (1.0 - std::pow(b2, epoch));
      flat[p] -= cfg.learning_rate * mh / (std::sqrt(vh) + eps);
    }
    unflatten(flat, model);
    const double val = val_x.empty() ? loss : loss_and_gradient(*model, val_x, val_y, nullptr);
    if (val < best_val) {
      best_val = val;
      best_flat = flat;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  unflatten(best_flat, model);
  if (best_val_out) *best_val_out = best_val;
}

}  // namespace

NarxModel train(const FeatureSeries& features, const std::vector<double>& labels,
                const NarxConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const int dmax = std::max(cfg.input_delays.hi, cfg.feedback_delays.hi);
  if (features.rows <= static_cast<std::size_t>(dmax) + 10)
    throw ConfigError("narx: series too short for the delay structure");
  const Normalization norm = fit_normalization(features, labels);
  std::vector<std::vector<double>> inputs;
  std::vector<double> targets;
  build_samples(features, labels, cfg, norm, &inputs, &targets);
  NarxModel model = init_model(cfg, features.cols, norm, seed);
  // seeded random 80/20 split so every regime of the label series can appear
  // in the training portion
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(derive_seed(seed, "narx-split"));
  for (std::size_t i = order.size() - 1; i > 0; --i)
    std::swap(order[i], order[static_cast<std::size_t>(split_rng.uniform_int(
                  0, static_cast<std::int64_t>(i)))]);
  std::vector<std::vector<double>> shuffled_x(inputs.size());
  std::vector<double> shuffled_y(targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    shuffled_x[i] = std::move(inputs[order[i]]);
    shuffled_y[i] = targets[order[i]];
  }
  const auto n_train = std::max<std::size_t>(
      1, static_cast<std::size_t>(cfg.train_fraction * static_cast<double>(shuffled_x.size())));
  train_core(&model, shuffled_x, shuffled_y, std::min(n_train, shuffled_x.size() - 1),
             seed, nullptr);
  return model;
}

NarxConfig kfold_tune(const FeatureSeries& features, const std::vector<double>& labels,
                      const std::vector<NarxConfig>& grid, int k, std::uint64_t seed) {
  if (grid.empty()) throw ConfigError("kfold_tune: empty grid");
  if (k < 2) throw ConfigError("kfold_tune: k must be >= 2");
  std::size_t best_idx = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const NarxConfig& cfg = grid[g];
    cfg.validate();
    const Normalization norm = fit_normalization(features, labels);
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;
    build_samples(features, labels, cfg, norm, &inputs, &targets);
    const std::size_t n = inputs.size();
    if (n < static_cast<std::size_t>(2 * k))
      throw ConfigError("kfold_tune: too few samples for k folds");
    double score = 0.0;
    for (int fold = 0; fold < k; ++fold) {
      // chronological contiguous fold held out for validation
      const std::size_t lo = n * fold / k;
      const std::size_t hi = n * (fold + 1) / k;
      std::vector<std::vector<double>> tx;
      std::vector<double> ty, vy;
      std::vector<std::vector<double>> vx;
      for (std::size_t i = 0; i < n; ++i) {
        if (i >= lo && i < hi) {
          vx.push_back(inputs[i]);
          vy.push_back(targets[i]);
        } else {
          tx.push_back(inputs[i]);
          ty.push_back(targets[i]);
        }
      }
      NarxModel m = init_model(cfg, features.cols, norm,
                               derive_seed(seed, "kfold", g, static_cast<std::uint64_t>(fold)));
      // train on all non-fold samples, no inner validation split
      std::vector<std::vector<double>> all = tx;
      train_core(&m, all, ty, all.size(), seed, nullptr);
      score += loss_and_gradient(m, vx, vy, nullptr);
    }
    score /= static_cast<double>(k);
    if (score < best_score) {
      best_score = score;
      best_idx = g;
    }
  }
  return grid[best_idx];
}

std::vector<double> predict(const NarxModel& model, const FeatureSeries& features,
                            const std::vector<double>& teacher_labels,
                            bool closed_loop) {
  if (features.cols != model.n_features)
    throw ConfigError("predict: feature dimension mismatch");
  if (teacher_labels.size() != features.rows)
    throw ConfigError("predict: labels length mismatch");
  const NarxConfig& cfg = model.config;
  const auto T = features.rows;
  const int dmax = model.max_delay();
  std::vector<double> out(T, 0.0);
  std::vector<double> y_norm(T, 0.0);
  for (std::size_t t = 0; t < T; ++t)
    y_norm[t] = (teacher_labels[t] - model.norm.y_mean) / model.norm.y_std;
  std::vector<double> fed = y_norm;  // feedback source; own predictions if closed loop
  for (std::size_t t = 0; t < static_cast<std::size_t>(dmax) && t < T; ++t)
    out[t] = teacher_labels[t];
  std::vector<double> x;
  for (std::size_t t = static_cast<std::size_t>(dmax); t < T; ++t) {
    x.clear();
    for (int d = cfg.input_delays.lo; d <= cfg.input_delays.hi; ++d)
      for (std::size_t f = 0; f < features.cols; ++f)
        x.push_back((features.at(t - d, f) - model.norm.feature_mean[f]) /
                    model.norm.feature_std[f]);
    for (int d = cfg.feedback_delays.lo; d <= cfg.feedback_delays.hi; ++d)
      x.push_back(fed[t - d]);
    const double y_hat = forward(model, x);
    if (closed_loop) fed[t] = y_hat;
    out[t] = y_hat * model.norm.y_std + model.norm.y_mean;
  }
  return out;
}

std::vector<int> discretize(const std::vector<double>& pred, int bounds_lo,
                            int bounds_hi) {
  std::vector<int> out;
  out.reserve(pred.size());
  for (double v : pred) {
    const int r = static_cast<int>(std::floor(v + 0.5));
    out.push_back(std::clamp(r, bounds_lo, bounds_hi));
  }
  return out;
}

AccuracyReport windowed_accuracy(const std::vector<int>& pred_levels,
                                 const std::vector<int>& sim_levels,
                                 const std::vector<std::size_t>& centers,
                                 std::size_t half_width_intervals,
                                 double interval_min) {
  if (pred_levels.size() != sim_levels.size())
    throw ConfigError("windowed_accuracy: length mismatch");
  const std::size_t T = pred_levels.size();
  AccuracyReport report;
  std::vector<char> in_union(T, 0);
  for (std::size_t c : centers) {
    const std::size_t lo = (c >= half_width_intervals) ? c - half_width_intervals : 0;
    const std::size_t hi = std::min(T, c + half_width_intervals);  // exclusive
    if (lo >= hi) throw ConfigError("windowed_accuracy: empty window");
    for (std::size_t i = lo; i < hi; ++i) in_union[i] = 1;

    // first level transition inside the window
    bool found = false;
    for (std::size_t i = std::max<std::size_t>(lo, 1); i < hi; ++i) {
      if (pred_levels[i] != pred_levels[i - 1]) {
        const double diff =
            std::abs(static_cast<double>(i) - static_cast<double>(c));
        report.predicted_cp_times.push_back(static_cast<double>(i) * interval_min);
        report.abs_time_deviation_min += diff * interval_min;
        found = true;
        break;
      }
    }
    if (!found) {
      report.predicted_cp_times.push_back(-1.0);
      report.abs_time_deviation_min +=
          static_cast<double>(half_width_intervals) * interval_min;
    }
  }
  std::size_t total = 0, match = 0;
  double se = 0.0;
  for (std::size_t i = 0; i < T; ++i) {
    if (!in_union[i]) continue;
    ++total;
    if (pred_levels[i] == sim_levels[i]) ++match;
    const double d = pred_levels[i] - sim_levels[i];
    se += d * d;
  }
  report.windowed_accuracy = static_cast<double>(match) / static_cast<double>(total);
  report.mse = se / static_cast<double>(total);
  return report;
}

namespace {
nlohmann::json to_json(const std::vector<double>& v) { return nlohmann::json(v); }
}  // namespace

std::string serialize_model(const NarxModel& model) {
  nlohmann::json j;
  j["input_delays"] = {model.config.input_delays.lo, model.config.input_delays.hi};
  j["feedback_delays"] = {model.config.feedback_delays.lo, model.config.feedback_delays.hi};
  j["hidden_size"] = model.config.hidden_size;
  j["epochs"] = model.config.epochs;
  j["learning_rate"] = model.config.learning_rate;
  j["patience"] = model.config.patience;
  j["train_fraction"] = model.config.train_fraction;
  j["kfold_k"] = model.config.kfold_k;
  j["n_features"] = model.n_features;
  j["feature_mean"] = to_json(model.norm.feature_mean);
  j["feature_std"] = to_json(model.norm.feature_std);
  j["y_mean"] = model.norm.y_mean;
  j["y_std"] = model.norm.y_std;
  j["w1"] = to_json(model.w1);
  j["b1"] = to_json(model.b1);
  j["w2"] = to_json(model.w2);
  j["b2"] = model.b2;
  return j.dump(2);
}

NarxModel deserialize_model(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  NarxModel m;
  m.config.input_delays = {j["input_delays"][0], j["input_delays"][1]};
  m.config.feedback_delays = {j["feedback_delays"][0], j["feedback_delays"][1]};
  m.config.hidden_size = j["hidden_size"];
  m.config.epochs = j["epochs"];
  m.config.learning_rate = j["learning_rate"];
  m.config.patience = j["patience"];
  m.config.train_fraction = j["train_fraction"];
  m.config.kfold_k = j["kfold_k"];
  m.n_features = j["n_features"];
  m.norm.feature_mean = j["feature_mean"].get<std::vector<double>>();
  m.norm.feature_std = j["feature_std"].get<std::vector<double>>();
  m.norm.y_mean = j["y_mean"];
  m.norm.y_std = j["y_std"];
  m.w1 = j["w1"].get<std::vector<double>>();
  m.b1 = j["b1"].get<std::vector<double>>();
  m.w2 = j["w2"].get<std::vector<double>>();
  m.b2 = j["b2"];
  return m;
}

}  // namespace pdcpd
