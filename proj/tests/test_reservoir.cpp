#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "besn/reservoir.hpp"
#include "test_helpers.hpp"

namespace besn {
namespace {

using testing::make_weights;
using testing::random_sequence;
using testing::random_weights;

ReservoirConfig paper_scale_config() {
  ReservoirConfig c;
  c.n_units = 100;
  c.density = 0.1;
  c.spectral_radius = 0.9;
  c.seed = 42;
  return c;
}

TEST(InitWeights, SpectralRadiusAndSparsity) {
  const auto w = init_weights(paper_scale_config(), 126);
  EXPECT_GE(w.achieved_spectral_radius, 0.899);
  EXPECT_LE(w.achieved_spectral_radius, 0.901);
  // Re-estimate with a full eigendecomposition of the dense matrix.
  const double oracle =
      Eigen::EigenSolver<Eigen::MatrixXd>(Eigen::MatrixXd(w.w_r), false).eigenvalues().cwiseAbs().maxCoeff();
  EXPECT_NEAR(oracle, 0.9, 0.9e-3);
  // Binomial(10000, 0.1): mean 1000, sd 30.
  EXPECT_GT(w.w_r.nonZeros(), 900);
  EXPECT_LT(w.w_r.nonZeros(), 1100);
  EXPECT_EQ(w.w_in.rows(), 100);
  EXPECT_EQ(w.w_in.cols(), 126);
  EXPECT_LE(w.w_in.cwiseAbs().maxCoeff(), 0.5);
}

TEST(InitWeights, ZeroBiasScaleGivesZeroBias) {
  auto c = paper_scale_config();
  c.bias_scale = 0.0;
  EXPECT_TRUE(init_weights(c, 4).b.isZero(0.0));
  c.bias_scale = 0.2;
  const auto w = init_weights(c, 4);
  EXPECT_FALSE(w.b.isZero(0.0));
  EXPECT_LE(w.b.cwiseAbs().maxCoeff(), 0.2);
}

TEST(InitWeights, Deterministic) {
  const auto a = init_weights(paper_scale_config(), 10);
  const auto b = init_weights(paper_scale_config(), 10);
  EXPECT_TRUE(Eigen::MatrixXd(a.w_r) == Eigen::MatrixXd(b.w_r));
  EXPECT_TRUE(a.w_in == b.w_in);
  EXPECT_TRUE(a.b == b.b);
  auto other = paper_scale_config();
  other.seed = 43;
  EXPECT_FALSE(Eigen::MatrixXd(init_weights(other, 10).w_r) == Eigen::MatrixXd(a.w_r));
}

TEST(InitWeights, EmptyMatrixNamesDensity) {
  ReservoirConfig c;
  c.n_units = 2;
  c.density = 1e-12;
  try {
    init_weights(c, 3);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "density");
  }
}

TEST(ReservoirConfig, ValidationNamesField) {
  auto expect_field = [](ReservoirConfig c, const std::string& field) {
    try {
      c.validate();
      ADD_FAILURE() << "no error for " << field;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.field(), field);
    }
  };
  ReservoirConfig c;
  c.leak_rate = 1.5;
  expect_field(c, "leak_rate");
  c = {};
  c.density = 0.0;
  expect_field(c, "density");
  c = {};
  c.n_units = 0;
  expect_field(c, "n_units");
  c = {};
  c.input_scaling = -1;
  expect_field(c, "input_scaling");
  c = {};
  c.spectral_radius = 0;
  expect_field(c, "spectral_radius");
}

TEST(Step, HandEvaluatedSingleUnit) {
  const auto w = make_weights(Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::MatrixXd::Constant(1, 1, 1.0),
                              Eigen::VectorXd::Zero(1));
  const auto next = step(w, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1), 0.5);
  EXPECT_NEAR(next(0), 0.3807970779778824, 1e-15);
}

TEST(Step, ZeroLeakKeepsState) {
  Rng rng(3);
  const auto w = random_weights(rng, 5, 3);
  Eigen::VectorXd state(5);
  state << 0.1, -0.4, 0.3, 0.9, -0.2;
  const auto next = step(w, state, Eigen::VectorXd::Constant(3, 2.0), 0.0);
  EXPECT_TRUE(next == state);
}

TEST(Step, ZeroStateZeroInputZeroBias) {
  Rng rng(4);
  auto w = random_weights(rng, 4, 2);
  w.b.setZero();
  EXPECT_TRUE(step(w, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(2), 0.7).isZero(0.0));
}

TEST(Step, DimensionMismatch) {
  Rng rng(5);
  const auto w = random_weights(rng, 4, 2);
  try {
    step(w, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(3), 0.5);
    FAIL();
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("expected 2, got 3"), std::string::npos);
  }
  EXPECT_THROW(step(w, Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(2), 0.5), DimensionError);
}

TEST(Step, LeakIsConvexBlendOfFullUpdate) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto w = random_weights(rng, 6, 3);
    Eigen::VectorXd state(6), input(3);
    for (int i = 0; i < 6; ++i) state(i) = rng.symmetric(1.0);
    for (int i = 0; i < 3; ++i) input(i) = rng.symmetric(1.0);
    const double alpha = rng.uniform01();
    const auto full = step(w, state, input, 1.0);
    const Eigen::VectorXd blend = (1.0 - alpha) * state + alpha * full;
    EXPECT_LE((step(w, state, input, alpha) - blend).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Step, NoiseComesFromCallerStream) {
  Rng wr(7);
  const auto w = random_weights(wr, 4, 2);
  const Eigen::VectorXd s = Eigen::VectorXd::Zero(4), u = Eigen::VectorXd::Ones(2);
  Rng a(11), b(11);
  const auto na = step(w, s, u, 0.5, 0.01, &a);
  const auto nb = step(w, s, u, 0.5, 0.01, &b);
  const auto clean = step(w, s, u, 0.5);
  EXPECT_TRUE(na == nb);
  EXPECT_FALSE(na == clean);
  EXPECT_LE((na - clean).cwiseAbs().maxCoeff(), 0.01);
}

TEST(RunForward, SingleFrameEqualsStep) {
  Rng rng(8);
  const auto w = random_weights(rng, 5, 3);
  const RowMatrix seq = random_sequence(rng, 1, 3);
  ReservoirConfig c;
  c.leak_rate = 0.4;
  const auto states = run_forward(w, seq, c);
  const auto expected = step(w, Eigen::VectorXd::Zero(5), Eigen::VectorXd(seq.row(0).transpose()), 0.4);
  ASSERT_EQ(states.length(), 1u);
  EXPECT_LE((states.states.row(0).transpose() - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(RunForward, EmptySequence) {
  Rng rng(9);
  const auto w = random_weights(rng, 3, 2);
  try {
    run_forward(w, RowMatrix(0, 2), ReservoirConfig{});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("empty sequence"), std::string::npos);
  }
}

TEST(RunForward, TwoUnitHandChosenMatchesScriptedRecurrence) {
  Eigen::MatrixXd w_r(2, 2), w_in(2, 1);
  w_r << 0.3, -0.2, 0.5, 0.1;
  w_in << 0.8, -0.6;
  Eigen::VectorXd b(2);
  b << 0.05, -0.1;
  const auto w = make_weights(w_r, w_in, b);
  RowMatrix seq(3, 1);
  seq << 1.0, -0.5, 0.25;
  ReservoirConfig c;
  c.leak_rate = 0.6;
  const auto states = run_forward(w, seq, c);
  EXPECT_LE(testing::max_abs_diff(states.states, testing::oracle_states(w, seq, 0.6)), 1e-12);
}

TEST(RunForward, ConstantInputConvergesToFixedPoint) {
  ReservoirConfig c;
  c.n_units = 50;
  c.leak_rate = 1.0;
  c.spectral_radius = 0.8;
  c.seed = 1;
  const auto w = init_weights(c, 3);
  const RowMatrix seq = RowMatrix::Constant(300, 3, 0.7);
  const auto s = run_forward(w, seq, c);
  const double late = (s.states.row(299) - s.states.row(298)).norm();
  EXPECT_LT(late, 1e-6);
  EXPECT_LT(late, (s.states.row(1) - s.states.row(0)).norm());
}

TEST(RunForward, EchoStatePropertyForgetsInitialState) {
  ReservoirConfig c;
  c.n_units = 100;
  c.spectral_radius = 0.9;
  c.leak_rate = 1.0;
  c.seed = 17;
  const auto w = init_weights(c, 4);
  Rng rng(99);
  const RowMatrix seq = random_sequence(rng, 200, 4);
  Eigen::VectorXd xa(100), xb(100);
  for (int i = 0; i < 100; ++i) {
    xa(i) = rng.symmetric(1.0);
    xb(i) = rng.symmetric(1.0);
  }
  const auto a = run_forward_from(w, seq, c, xa);
  const auto b = run_forward_from(w, seq, c, xb);
  EXPECT_LT((a.states.row(199) - b.states.row(199)).norm(), 1e-6);
}

TEST(RunForward, BoundedByOneWithoutNoise) {
  Rng rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    ReservoirConfig c;
    c.n_units = 30;
    c.spectral_radius = 1.5;
    c.input_scaling = 3.0;
    c.bias_scale = 1.0;
    c.leak_rate = rng.uniform01();
    c.seed = static_cast<std::uint64_t>(trial);
    const auto w = init_weights(c, 5);
    const auto s = run_forward(w, random_sequence(rng, 100, 5, 5.0), c);
    EXPECT_LE(s.states.cwiseAbs().maxCoeff(), 1.0);
    EXPECT_TRUE(s.states.allFinite());
  }
}

TEST(RunForward, TanhRangeAtFullLeak) {
  Rng rng(12);
  ReservoirConfig c;
  c.n_units = 20;
  c.leak_rate = 1.0;
  const auto w = init_weights(c, 2);
  const auto s = run_forward(w, random_sequence(rng, 50, 2), c);
  EXPECT_LT(s.states.cwiseAbs().maxCoeff(), 1.0);
}

TEST(RunForward, DeterministicAndNoiseOnlyWithStream) {
  Rng rng(13);
  ReservoirConfig c;
  c.n_units = 20;
  c.noise_level = 0.01;
  const auto w = init_weights(c, 3);
  const RowMatrix seq = random_sequence(rng, 40, 3);
  const auto a = run_forward(w, seq, c);
  const auto b = run_forward(w, seq, c);
  EXPECT_TRUE(a.states == b.states);
  Rng n1(5), n2(5);
  const auto na = run_forward(w, seq, c, &n1);
  const auto nb = run_forward(w, seq, c, &n2);
  EXPECT_TRUE(na.states == nb.states);
  EXPECT_FALSE(na.states == a.states);
}

TEST(RunForward, FloatFramesMatchDouble) {
  Rng rng(14);
  const auto w = random_weights(rng, 6, 3);
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> f(10, 3);
  for (int t = 0; t < 10; ++t)
    for (int j = 0; j < 3; ++j) f(t, j) = static_cast<float>(rng.symmetric(1.0));
  ReservoirConfig c;
  const RowMatrix d = f.cast<double>();
  EXPECT_TRUE(run_forward(w, f, c).states == run_forward(w, d, c).states);
}

}  // namespace
}  // namespace besn
