#pragma once

// Closed-form ridge readout over per-sequence feature vectors.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "besn/error.hpp"

namespace besn {

struct ReadoutModel {
  Eigen::MatrixXd w_out;  // C x (F + 1); last column is the intercept
  std::vector<std::string> classes;
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_std;
  double lambda = 1e-3;

  std::size_t n_classes() const { return classes.size(); }
  std::size_t n_features() const { return static_cast<std::size_t>(feature_mean.size()); }
};

/// Solves (X^T X + lambda I') W = X^T Y by Cholesky, where I' is the identity with
/// zeros at `unpenalized` indices. One retry with 1e-8 diagonal jitter.
inline Eigen::MatrixXd solve_ridge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda,
                                   const std::vector<Eigen::Index>& unpenalized = {}) {
  if (x.rows() != y.rows())
    throw DimensionError("solve_ridge: target rows", static_cast<std::size_t>(x.rows()),
                         static_cast<std::size_t>(y.rows()));
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda", "must be a finite value > 0");
  Eigen::MatrixXd gram = x.transpose() * x;
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(x.cols(), lambda);
  for (Eigen::Index i : unpenalized) penalty(i) = 0.0;
  gram.diagonal() += penalty;
  const Eigen::MatrixXd rhs = x.transpose() * y;

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    gram.diagonal().array() += 1e-8;
    llt.compute(gram);
    if (llt.info() != Eigen::Success)
      throw NumericalError("ridge normal equations are not positive definite after jitter");
  }
  Eigen::MatrixXd w = llt.solve(rhs);
  if (!w.allFinite()) throw NumericalError("ridge solution has non-finite entries");
  return w;
}

namespace detail {

inline Eigen::MatrixXd normalize_with_intercept(const Eigen::MatrixXd& features,
                                                const Eigen::VectorXd& mean,
                                                const Eigen::VectorXd& std) {
  Eigen::MatrixXd out(features.rows(), features.cols() + 1);
  out.leftCols(features.cols()) =
      (features.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array();
  out.col(features.cols()).setOnes();
  return out;
}

}  // namespace detail

/// Fits one-hot ridge regression on z-scored features plus an unpenalized intercept.
/// `classes` fixes the class order; if empty, the sorted set of labels is used.
inline ReadoutModel fit_ridge(const Eigen::MatrixXd& features, const std::vector<std::string>& labels,
                              double lambda, std::vector<std::string> classes = {}) {
  const auto n = features.rows();
  if (static_cast<std::size_t>(n) != labels.size())
    throw DimensionError("fit_ridge: label count", static_cast<std::size_t>(n), labels.size());
  if (!features.allFinite()) throw NumericalError("fit_ridge: features contain non-finite values");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda", "must be a finite value > 0");

  if (classes.empty()) {
    std::set<std::string> unique(labels.begin(), labels.end());
    classes.assign(unique.begin(), unique.end());
  }
  std::unordered_map<std::string, Eigen::Index> index;
  for (std::size_t c = 0; c < classes.size(); ++c) index.emplace(classes[c], static_cast<Eigen::Index>(c));
  if (classes.size() < 2) throw DataError("fit_ridge: need at least 2 classes");

  Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(classes.size()));
  std::vector<std::size_t> counts(classes.size(), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto it = index.find(labels[static_cast<std::size_t>(i)]);
    if (it == index.end()) throw DataError("fit_ridge: unknown label '" + labels[static_cast<std::size_t>(i)] + "'");
    targets(i, it->second) = 1.0;
    ++counts[static_cast<std::size_t>(it->second)];
  }
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (counts[c] == 0) throw DataError("fit_ridge: class '" + classes[c] + "' has no training samples");
  }

  ReadoutModel model;
  model.classes = std::move(classes);
  model.lambda = lambda;
  model.feature_mean = features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = features.rowwise() - model.feature_mean.transpose();
  model.feature_std = (centered.array().square().colwise().sum() / static_cast<double>(n)).sqrt().transpose();
  for (Eigen::Index j = 0; j < model.feature_std.size(); ++j) {
    if (!(model.feature_std(j) > 0.0)) model.feature_std(j) = 1.0;
  }

  const Eigen::MatrixXd design = detail::normalize_with_intercept(features, model.feature_mean, model.feature_std);
  const Eigen::MatrixXd w = solve_ridge(design, targets, lambda, {features.cols()});
  model.w_out = w.transpose();
  return model;
}

struct Prediction {
  std::size_t class_index = 0;
  Eigen::VectorXd scores;
};

/// Argmax with ties resolved toward the lowest index.
inline std::size_t argmax_lowest(const Eigen::VectorXd& scores) {
  std::size_t best = 0;
  for (Eigen::Index c = 1; c < scores.size(); ++c) {
    if (scores(c) > scores(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(c);
  }
  return best;
}

/// Scores for every row of `features` (N x C).
inline Eigen::MatrixXd decision_scores(const ReadoutModel& model, const Eigen::MatrixXd& features) {
  if (static_cast<std::size_t>(features.cols()) != model.n_features())
    throw DimensionError("predict: feature width", model.n_features(), static_cast<std::size_t>(features.cols()));
  const Eigen::MatrixXd design = detail::normalize_with_intercept(features, model.feature_mean, model.feature_std);
  return design * model.w_out.transpose();
}

inline std::vector<Prediction> predict(const ReadoutModel& model, const Eigen::MatrixXd& features) {
  const Eigen::MatrixXd scores = decision_scores(model, features);
  std::vector<Prediction> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    out[static_cast<std::size_t>(i)].scores = scores.row(i).transpose();
    out[static_cast<std::size_t>(i)].class_index = argmax_lowest(out[static_cast<std::size_t>(i)].scores);
  }
  return out;
}

inline Prediction predict(const ReadoutModel& model, const Eigen::VectorXd& feature) {
  return predict(model, Eigen::MatrixXd(feature.transpose())).front();
}

struct EvalReport {
  double accuracy = 0.0;
  std::map<std::string, double> per_class_accuracy;
  Eigen::MatrixXi confusion;  // rows: true class, cols: predicted class
  std::size_t n_samples = 0;
  double wall_clock_train_s = 0.0;
  double wall_clock_eval_s = 0.0;
  std::uint64_t seed = 0;
};

/// Builds the report from already computed predictions (class indices).
inline EvalReport make_report(const ReadoutModel& model, const std::vector<std::size_t>& predicted,
                              const std::vector<std::string>& labels) {
  if (predicted.size() != labels.size())
    throw DimensionError("evaluate: prediction count", labels.size(), predicted.size());
  if (labels.empty()) throw DataError("evaluate: no samples");
  const auto c = static_cast<Eigen::Index>(model.n_classes());
  std::unordered_map<std::string, Eigen::Index> index;
  for (Eigen::Index k = 0; k < c; ++k) index.emplace(model.classes[static_cast<std::size_t>(k)], k);

  EvalReport report;
  report.n_samples = labels.size();
  report.confusion = Eigen::MatrixXi::Zero(c, c);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = index.find(labels[i]);
    if (it == index.end()) throw DataError("evaluate: label '" + labels[i] + "' not known to the model");
    ++report.confusion(it->second, static_cast<Eigen::Index>(predicted[i]));
  }
  report.accuracy = static_cast<double>(report.confusion.trace()) / static_cast<double>(labels.size());
  for (Eigen::Index k = 0; k < c; ++k) {
    const int row_total = report.confusion.row(k).sum();
    if (row_total > 0) {
      report.per_class_accuracy[model.classes[static_cast<std::size_t>(k)]] =
          static_cast<double>(report.confusion(k, k)) / row_total;
    }
  }
  return report;
}

inline EvalReport evaluate(const ReadoutModel& model, const Eigen::MatrixXd& features,
                           const std::vector<std::string>& labels) {
  const auto start = std::chrono::steady_clock::now();
  const auto predictions = predict(model, features);
  const auto stop = std::chrono::steady_clock::now();
  std::vector<std::size_t> indices;
  indices.reserve(predictions.size());
  for (const auto& p : predictions) indices.push_back(p.class_index);
  EvalReport report = make_report(model, indices, labels);
  report.wall_clock_eval_s = std::chrono::duration<double>(stop - start).count();
  return report;
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample SD (n - 1); 0 for a single value
};

inline MeanSd mean_sd(const std::vector<double>& values) {
  MeanSd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

/// "57.71 ± 1.35" from fractions in [0, 1].
inline std::string format_percent_sd(const MeanSd& m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f ± %.2f", 100.0 * m.mean, 100.0 * m.sd);
  return buf;
}

}  // namespace besn
