#pragma once

// End-to-end classifier: reservoir features (uni or bi) + ridge readout, with an
// optional lambda sweep on the validation split and a multi-seed harness.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "besn/bidirectional.hpp"
#include "besn/dataset.hpp"
#include "besn/error.hpp"
#include "besn/parallel.hpp"
#include "besn/random.hpp"
#include "besn/readout.hpp"
#include "besn/reservoir.hpp"

namespace besn {

enum class Direction { Uni, Bi };

inline std::string_view to_string(Direction d) { return d == Direction::Bi ? "bi" : "uni"; }

inline Direction parse_direction(std::string_view text) {
  if (text == "uni") return Direction::Uni;
  if (text == "bi") return Direction::Bi;
  throw ConfigError("direction", "expected uni|bi, got '" + std::string(text) + "'");
}

struct PipelineConfig {
  // reservoir.n_units is the TOTAL state width: bi splits it evenly across directions.
  ReservoirConfig reservoir;
  Direction direction = Direction::Bi;
  AggregationMode aggregation = AggregationMode::Final;
  bool shared_weights = true;
  double lambda = 1e-3;
  std::vector<double> lambda_grid;  // non-empty: pick lambda on the validation split
  std::size_t threads = 0;          // 0: default_threads()

  std::size_t units_per_direction() const {
    return direction == Direction::Bi ? reservoir.n_units / 2 : reservoir.n_units;
  }

  void validate() const {
    reservoir.validate();
    if (direction == Direction::Bi && (reservoir.n_units < 2 || reservoir.n_units % 2 != 0))
      throw ConfigError("units", "bidirectional runs need an even total unit count (n/2 per direction)");
    if (lambda_grid.empty() && !(lambda > 0.0)) throw ConfigError("lambda", "must be > 0");
    for (double l : lambda_grid)
      if (!(l > 0.0)) throw ConfigError("lambda-grid", "every lambda must be > 0");
  }
};

/// Seed of the independently drawn backward reservoir (only when weights are not shared).
inline std::uint64_t backward_seed(std::uint64_t seed) { return derive_seed(seed, 0xbacc); }

/// Maps sequences to fixed-width feature vectors. Immutable after construction.
class FeatureExtractor {
 public:
  FeatureExtractor(const PipelineConfig& config, std::size_t input_dim) : config_(config) {
    config_.validate();
    direction_config_ = config_.reservoir;
    direction_config_.n_units = config_.units_per_direction();
    forward_ = init_weights(direction_config_, input_dim);
    if (config_.direction == Direction::Bi && !config_.shared_weights) {
      ReservoirConfig b = direction_config_;
      b.seed = backward_seed(direction_config_.seed);
      backward_ = init_weights(b, input_dim);
    }
  }

  std::size_t input_dim() const { return forward_.input_dim; }

  std::size_t width() const {
    const std::size_t per = aggregate_width(config_.aggregation, direction_config_.n_units);
    return config_.direction == Direction::Bi ? 2 * per : per;
  }

  const ReservoirWeights& forward_weights() const { return forward_; }
  const ReservoirWeights& backward_weights() const { return backward_ ? *backward_ : forward_; }
  const PipelineConfig& config() const { return config_; }

  /// `noise_stream` >= 0 enables state noise (training features) with a per-sample
  /// stream derived from (seed, noise_stream, index).
  template <typename Frames>
  Eigen::VectorXd transform_one(const Frames& frames, std::optional<std::uint64_t> noise_stream = {}) const {
    if (static_cast<std::size_t>(frames.cols()) != input_dim())
      throw DimensionError("model/pipeline width: sequence feature dim", input_dim(),
                           static_cast<std::size_t>(frames.cols()));
    const bool noisy = noise_stream && direction_config_.noise_level > 0.0;
    std::optional<Rng> fwd_rng, bwd_rng;
    if (noisy) {
      fwd_rng.emplace(derive_seed(direction_config_.seed, 2 * *noise_stream));
      bwd_rng.emplace(derive_seed(direction_config_.seed, 2 * *noise_stream + 1));
    }
    const std::size_t washout = direction_config_.washout_frames;
    if (config_.direction == Direction::Uni) {
      return aggregate(run_forward(forward_, frames, direction_config_, fwd_rng ? &*fwd_rng : nullptr),
                       config_.aggregation, washout);
    }
    const BiStates bi = run_bidirectional(forward_, backward_weights(), frames, direction_config_,
                                          fwd_rng ? &*fwd_rng : nullptr, bwd_rng ? &*bwd_rng : nullptr);
    return aggregate(bi, config_.aggregation, washout);
  }

  Eigen::MatrixXd transform(const std::vector<KeypointSequence>& samples, bool training = false,
                            std::size_t threads = 0) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(width()));
    std::vector<Eigen::VectorXd> rows(samples.size());
    parallel_for(samples.size(), threads ? threads : default_threads(), [&](std::size_t i) {
      rows[i] = transform_one(samples[i].frames,
                              training ? std::optional<std::uint64_t>(i) : std::nullopt);
    });
    for (std::size_t i = 0; i < samples.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return out;
  }

 private:
  PipelineConfig config_;
  ReservoirConfig direction_config_;
  ReservoirWeights forward_;
  std::optional<ReservoirWeights> backward_;
};

inline std::vector<std::string> labels_of(const std::vector<KeypointSequence>& samples) {
  std::vector<std::string> labels;
  labels.reserve(samples.size());
  for (const auto& s : samples) labels.push_back(s.label);
  return labels;
}

struct LambdaTrial {
  double lambda = 0.0;
  double val_accuracy = 0.0;
};

struct TrainedPipeline {
  FeatureExtractor extractor;
  ReadoutModel readout;
  double chosen_lambda = 0.0;
  std::vector<LambdaTrial> sweep;
  std::size_t linear_solves = 0;
  std::size_t training_epochs = 0;  // always 0: the readout is a closed-form solve
  double wall_clock_train_s = 0.0;  // feature computation + ridge fit(s)
  std::optional<EvalReport> val_report;
};

inline TrainedPipeline train_pipeline(const Dataset& data, const PipelineConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t threads = config.threads ? config.threads : default_threads();
  FeatureExtractor extractor(config, data.feature_dim);
  const Eigen::MatrixXd train_x = extractor.transform(data.train, /*training=*/true, threads);
  const auto train_y = labels_of(data.train);

  std::optional<Eigen::MatrixXd> val_x;
  if (!data.val.empty()) val_x = extractor.transform(data.val, false, threads);

  std::vector<LambdaTrial> sweep;
  std::size_t solves = 0;
  double chosen = config.lambda;
  ReadoutModel model;
  if (!config.lambda_grid.empty()) {
    if (!val_x) throw DataError("lambda sweep requires a non-empty val split");
    const auto val_y = labels_of(data.val);
    double best = -1.0;
    for (double lambda : config.lambda_grid) {
      ReadoutModel candidate = fit_ridge(train_x, train_y, lambda, data.classes);
      ++solves;
      const double acc = evaluate(candidate, *val_x, val_y).accuracy;
      sweep.push_back({lambda, acc});
      if (acc > best) {  // first grid entry wins ties
        best = acc;
        chosen = lambda;
        model = std::move(candidate);
      }
    }
  } else {
    model = fit_ridge(train_x, train_y, config.lambda, data.classes);
    ++solves;
  }
  const auto stop = std::chrono::steady_clock::now();

  TrainedPipeline out{std::move(extractor), std::move(model), chosen, std::move(sweep), solves, 0,
                      std::chrono::duration<double>(stop - start).count(), std::nullopt};
  if (val_x) {
    out.val_report = evaluate(out.readout, *val_x, labels_of(data.val));
    out.val_report->wall_clock_train_s = out.wall_clock_train_s;
    out.val_report->seed = config.reservoir.seed;
  }
  return out;
}

/// Feature extraction is included in the evaluation wall-clock.
inline EvalReport evaluate_pipeline(const FeatureExtractor& extractor, const ReadoutModel& readout,
                                    const std::vector<KeypointSequence>& samples, std::size_t threads = 0) {
  if (samples.empty()) throw DataError("evaluate: split is empty");
  if (extractor.width() != readout.n_features())
    throw DimensionError("model/pipeline width", readout.n_features(), extractor.width());
  const auto start = std::chrono::steady_clock::now();
  const Eigen::MatrixXd x = extractor.transform(samples, false, threads);
  EvalReport report = evaluate(readout, x, labels_of(samples));
  report.wall_clock_eval_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.seed = extractor.config().reservoir.seed;
  return report;
}

struct SeedRun {
  std::uint64_t seed = 0;
  double chosen_lambda = 0.0;
  EvalReport test_report;
};

struct MultiSeedResult {
  MeanSd accuracy;
  double mean_train_s = 0.0;
  std::vector<SeedRun> runs;
};

/// Trains and tests once per seed; only reservoir weights (and noise streams) vary.
inline MultiSeedResult multi_seed_run(const Dataset& data, const PipelineConfig& config,
                                      const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw ConfigError("seeds", "must be >= 1");
  if (data.test.empty()) throw DataError("empty split: test");
  MultiSeedResult result;
  std::vector<double> accuracies;
  for (std::uint64_t seed : seeds) {
    PipelineConfig c = config;
    c.reservoir.seed = seed;
    TrainedPipeline trained = train_pipeline(data, c);
    SeedRun run{seed, trained.chosen_lambda,
                evaluate_pipeline(trained.extractor, trained.readout, data.test, c.threads)};
    run.test_report.wall_clock_train_s = trained.wall_clock_train_s;
    accuracies.push_back(run.test_report.accuracy);
    result.mean_train_s += trained.wall_clock_train_s;
    result.runs.push_back(std::move(run));
  }
  result.accuracy = mean_sd(accuracies);
  result.mean_train_s /= static_cast<double>(seeds.size());
  return result;
}

inline MultiSeedResult multi_seed_run(const Dataset& data, const PipelineConfig& config, std::size_t n_seeds) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < n_seeds; ++i) seeds.push_back(config.reservoir.seed + i);
  return multi_seed_run(data, config, seeds);
}

}  // namespace besn
