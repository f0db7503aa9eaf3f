#include <gtest/gtest.h>

#include "besn/pipeline.hpp"
#include "besn/synthetic.hpp"

namespace besn {
namespace {

const SyntheticDataset& small_task() {
  static const SyntheticDataset ds = [] {
    SyntheticSpec spec;
    spec.samples_per_class = 20;
    return generate_synthetic(spec);
  }();
  return ds;
}

PipelineConfig small_config(Direction d) {
  PipelineConfig c;
  c.reservoir.n_units = 40;
  c.direction = d;
  c.threads = 1;
  return c;
}

TEST(FeatureExtractor, WidthsMatchDirectionAndAggregation) {
  PipelineConfig c;
  c.reservoir.n_units = 200;
  c.direction = Direction::Bi;
  EXPECT_EQ(FeatureExtractor(c, 126).width(), 200u);
  EXPECT_EQ(c.units_per_direction(), 100u);
  c.direction = Direction::Uni;
  EXPECT_EQ(FeatureExtractor(c, 126).width(), 200u);
  c.aggregation = AggregationMode::MeanPlusFinal;
  EXPECT_EQ(FeatureExtractor(c, 126).width(), 400u);
  c.direction = Direction::Bi;
  EXPECT_EQ(FeatureExtractor(c, 126).width(), 400u);
}

TEST(FeatureExtractor, OddBidirectionalUnitsRejected) {
  PipelineConfig c;
  c.reservoir.n_units = 101;
  EXPECT_THROW(FeatureExtractor(c, 4), ConfigError);
}

TEST(FeatureExtractor, UniIsPlainSingleReservoir) {
  const auto& ds = small_task();
  const FeatureExtractor fx(small_config(Direction::Uni), 8);
  ReservoirConfig rc = small_config(Direction::Uni).reservoir;
  const auto w = init_weights(rc, 8);
  const Eigen::VectorXd expected = aggregate(run_forward(w, ds.data.train[0].frames, rc), AggregationMode::Final);
  EXPECT_TRUE(fx.transform_one(ds.data.train[0].frames) == expected);
}

TEST(FeatureExtractor, BiSharesWeightsByDefault) {
  const FeatureExtractor shared(small_config(Direction::Bi), 8);
  EXPECT_EQ(&shared.forward_weights(), &shared.backward_weights());
  auto c = small_config(Direction::Bi);
  c.shared_weights = false;
  const FeatureExtractor separate(c, 8);
  EXPECT_FALSE(separate.forward_weights().w_in == separate.backward_weights().w_in);
}

TEST(FeatureExtractor, IndependentOfThreadCount) {
  const auto& ds = small_task();
  auto c = small_config(Direction::Bi);
  c.reservoir.noise_level = 0.01;
  const FeatureExtractor fx(c, 8);
  const Eigen::MatrixXd one = fx.transform(ds.data.train, true, 1);
  for (std::size_t threads : {2u, 3u, 8u}) EXPECT_TRUE(fx.transform(ds.data.train, true, threads) == one);
}

TEST(FeatureExtractor, NoiseOnlyForTrainingFeatures) {
  const auto& ds = small_task();
  auto c = small_config(Direction::Bi);
  c.reservoir.noise_level = 0.01;
  const FeatureExtractor fx(c, 8);
  EXPECT_FALSE(fx.transform(ds.data.train, true, 1) == fx.transform(ds.data.train, false, 1));
  EXPECT_TRUE(fx.transform(ds.data.train, false, 1) == fx.transform(ds.data.train, false, 1));
}

TEST(FeatureExtractor, RejectsWrongInputWidth) {
  const FeatureExtractor fx(small_config(Direction::Bi), 8);
  EXPECT_THROW(fx.transform_one(FrameMatrix::Zero(5, 7)), DimensionError);
}

TEST(TrainPipeline, SingleSolveNoEpochs) {
  const auto trained = train_pipeline(small_task().data, small_config(Direction::Bi));
  EXPECT_EQ(trained.linear_solves, 1u);
  EXPECT_EQ(trained.training_epochs, 0u);
  EXPECT_EQ(trained.chosen_lambda, 1e-3);
  ASSERT_TRUE(trained.val_report.has_value());
  EXPECT_EQ(trained.val_report->n_samples, small_task().data.val.size());
}

TEST(TrainPipeline, LambdaSweepPicksBestOnVal) {
  auto c = small_config(Direction::Bi);
  c.lambda_grid = {1e-6, 1e-4, 1e-2, 1, 100};
  const auto trained = train_pipeline(small_task().data, c);
  ASSERT_EQ(trained.sweep.size(), 5u);
  EXPECT_EQ(trained.linear_solves, 5u);
  double best = -1;
  double best_lambda = 0;
  for (const auto& t : trained.sweep)
    if (t.val_accuracy > best) {
      best = t.val_accuracy;
      best_lambda = t.lambda;
    }
  EXPECT_EQ(trained.chosen_lambda, best_lambda);
  EXPECT_EQ(trained.val_report->accuracy, best);
}

TEST(TrainPipeline, SweepNeedsValidationSplit) {
  Dataset d = small_task().data;
  d.val.clear();
  auto c = small_config(Direction::Uni);
  c.lambda_grid = {1.0};
  EXPECT_THROW(train_pipeline(d, c), DataError);
}

TEST(MultiSeedRun, IdenticalSeedsGiveZeroSd) {
  const auto r = multi_seed_run(small_task().data, small_config(Direction::Bi), std::vector<std::uint64_t>{5, 5});
  EXPECT_EQ(r.accuracy.sd, 0.0);
  EXPECT_EQ(r.runs[0].test_report.accuracy, r.runs[1].test_report.accuracy);
}

TEST(MultiSeedRun, ConsecutiveSeedsAndReproducible) {
  auto c = small_config(Direction::Bi);
  c.reservoir.seed = 100;
  const auto a = multi_seed_run(small_task().data, c, std::size_t{3});
  const auto b = multi_seed_run(small_task().data, c, std::size_t{3});
  ASSERT_EQ(a.runs.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.runs[i].seed, 100 + i);
    EXPECT_EQ(a.runs[i].test_report.seed, 100 + i);
    EXPECT_EQ(a.runs[i].test_report.accuracy, b.runs[i].test_report.accuracy);
    EXPECT_TRUE(a.runs[i].test_report.confusion == b.runs[i].test_report.confusion);
  }
  EXPECT_EQ(a.accuracy.mean, b.accuracy.mean);
  EXPECT_EQ(a.accuracy.sd, b.accuracy.sd);
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(10, 4, [](std::size_t i) {
                 if (i == 7) throw DataError("boom");
               }),
               DataError);
}

}  // namespace
}  // namespace besn
