#pragma once

// Command implementations behind the `besn` tool. Each writes its artifacts under
// the run's output directory and a human summary to `log`.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "besn/dataset.hpp"
#include "besn/kps_io.hpp"
#include "besn/model_io.hpp"
#include "besn/pipeline.hpp"
#include "besn/readout.hpp"
#include "besn/report.hpp"
#include "besn/synthetic.hpp"

namespace besn {

struct RunConfig {
  PipelineConfig pipeline;
  std::size_t n_seeds = 5;
  std::filesystem::path manifest;
  std::filesystem::path out = "out";
  bool center_wrists = false;
};

inline Dataset load_for_run(const RunConfig& run) {
  LoadOptions opts;
  opts.center_wrists = run.center_wrists;
  return load_dataset(run.manifest, opts);
}

struct GenerateSummary {
  std::size_t n_train = 0, n_val = 0, n_test = 0;
  std::filesystem::path manifest;
};

inline GenerateSummary cmd_generate(const SyntheticSpec& spec, const std::filesystem::path& out,
                                    std::ostream& log) {
  const SyntheticDataset ds = generate_synthetic(spec);
  write_synthetic(ds, out);
  GenerateSummary s{ds.data.train.size(), ds.data.val.size(), ds.data.test.size(), out / "manifest.json"};
  log << "generated " << (s.n_train + s.n_val + s.n_test) << " samples (" << spec.n_classes
      << " classes, D=" << spec.feature_dim << ")\n"
      << "  train: " << s.n_train << "\n  val:   " << s.n_val << "\n  test:  " << s.n_test << "\n"
      << "  manifest: " << s.manifest.string() << "\n";
  return s;
}

struct TrainOutcome {
  std::filesystem::path model_path;
  std::filesystem::path report_path;
  nlohmann::json report;
};

inline TrainOutcome cmd_train(const RunConfig& run, std::ostream& log) {
  const Dataset data = load_for_run(run);
  const TrainedPipeline trained = train_pipeline(data, run.pipeline);

  std::filesystem::create_directories(run.out);
  TrainOutcome outcome;
  outcome.model_path = run.out / "model.besn";
  save_model(outcome.model_path, {run.pipeline, trained.readout, data.feature_dim});

  nlohmann::json results = {{"command", "train"},
                            {"config", config_json(run.pipeline)},
                            {"n_train", data.train.size()},
                            {"feature_width", trained.extractor.width()},
                            {"chosen_lambda", trained.chosen_lambda},
                            {"training_epochs", trained.training_epochs},
                            {"linear_solves", trained.linear_solves}};
  nlohmann::json sweep = nlohmann::json::array();
  for (const auto& t : trained.sweep) sweep.push_back({{"lambda", t.lambda}, {"val_accuracy", t.val_accuracy}});
  results["lambda_sweep"] = std::move(sweep);
  nlohmann::json timing = {{"wall_clock_train_s", trained.wall_clock_train_s}};
  if (trained.val_report) {
    results["val"] = eval_results_json(*trained.val_report, trained.readout.classes);
    timing["wall_clock_eval_s"] = trained.val_report->wall_clock_eval_s;
  }
  outcome.report = {{"results", std::move(results)}, {"timing", std::move(timing)}};
  outcome.report_path = run.out / "train_report.json";
  write_file_bytes(outcome.report_path, outcome.report.dump(2) + "\n");

  log << "trained " << to_string(run.pipeline.direction) << "-ESN (" << run.pipeline.units_per_direction()
      << (run.pipeline.direction == Direction::Bi ? " units per direction" : " units") << ") on "
      << data.train.size() << " sequences in " << std::fixed << std::setprecision(3)
      << trained.wall_clock_train_s << " s (epochs: 0, linear solves: " << trained.linear_solves << ")\n";
  log << "  lambda: " << trained.chosen_lambda << "\n";
  if (trained.val_report) log << "  val accuracy: " << std::setprecision(2) << 100.0 * trained.val_report->accuracy << "%\n";
  log << "  model: " << outcome.model_path.string() << "\n";
  log.unsetf(std::ios::fixed);
  return outcome;
}

struct EvalOutcome {
  EvalReport report;
  nlohmann::json json;
};

inline EvalOutcome cmd_eval(const std::filesystem::path& model_path, const RunConfig& run, Split split,
                            std::ostream& log) {
  SavedModel saved = load_model(model_path);
  const Dataset data = load_for_run(run);
  if (data.feature_dim != saved.input_dim)
    throw DataError("model/pipeline width: model expects feature_dim " + std::to_string(saved.input_dim) +
                    ", dataset has " + std::to_string(data.feature_dim));
  saved.config.threads = run.pipeline.threads;
  const FeatureExtractor extractor(saved.config, saved.input_dim);
  if (extractor.width() != saved.readout.n_features())
    throw DataError("model/pipeline width: readout expects " + std::to_string(saved.readout.n_features()) +
                    " features, pipeline produces " + std::to_string(extractor.width()));
  EvalOutcome out;
  out.report = evaluate_pipeline(extractor, saved.readout, data.split(split), run.pipeline.threads);
  nlohmann::json results = eval_results_json(out.report, saved.readout.classes);
  results["command"] = "eval";
  results["split"] = std::string(to_string(split));
  results["config"] = config_json(saved.config);
  out.json = {{"results", std::move(results)}, {"timing", {{"wall_clock_eval_s", out.report.wall_clock_eval_s}}}};
  if (!run.out.empty()) {
    std::filesystem::create_directories(run.out);
    write_file_bytes(run.out / ("eval_" + std::string(to_string(split)) + ".json"), out.json.dump(2) + "\n");
  }
  char line[128];
  std::snprintf(line, sizeof line, "%s accuracy: %.2f%% (%zu samples)\n", std::string(to_string(split)).c_str(),
                100.0 * out.report.accuracy, out.report.n_samples);
  log << line;
  return out;
}

struct BenchmarkRow {
  std::string method;
  std::string units;
  MultiSeedResult result;
};

struct BenchmarkOutcome {
  std::vector<BenchmarkRow> rows;
  nlohmann::json json;
  std::string table;
};

inline std::string render_benchmark_table(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-22s %-22s %s\n", "Method", "Accuracy (%) ± SD", "Training time (s)");
  os << line;
  for (const auto& r : rows) {
    const std::string name = r.method + " (" + r.units + ")";
    // "±" is two bytes; pad accordingly so columns line up.
    std::snprintf(line, sizeof line, "%-22s %-23s %.3f\n", name.c_str(),
                  format_percent_sd(r.result.accuracy).c_str(), r.result.mean_train_s);
    os << line;
  }
  return os.str();
}

/// Bi (n/2 + n/2 units) vs uni (n units) over n_seeds consecutive seeds each.
inline BenchmarkOutcome cmd_benchmark(const RunConfig& run, std::ostream& log, std::ostream& warn) {
  if (run.n_seeds == 0) throw ConfigError("seeds", "must be >= 1");
  if (run.n_seeds == 1) warn << "warning: --seeds 1 gives no spread estimate; SD reported as 0\n";
  const Dataset data = load_for_run(run);

  BenchmarkOutcome out;
  for (Direction d : {Direction::Bi, Direction::Uni}) {
    PipelineConfig c = run.pipeline;
    c.direction = d;
    c.validate();
    const std::string units = d == Direction::Bi
                                  ? std::to_string(c.units_per_direction()) + "+" + std::to_string(c.units_per_direction())
                                  : std::to_string(c.reservoir.n_units);
    out.rows.push_back({d == Direction::Bi ? "bi-ESN" : "uni-ESN", units, multi_seed_run(data, c, run.n_seeds)});
  }

  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json timing_rows = nlohmann::json::array();
  for (const auto& r : out.rows) {
    nlohmann::json per_seed = nlohmann::json::array();
    nlohmann::json per_seed_time = nlohmann::json::array();
    for (const auto& s : r.result.runs) {
      per_seed.push_back({{"seed", s.seed}, {"accuracy", s.test_report.accuracy}, {"lambda", s.chosen_lambda}});
      per_seed_time.push_back({{"seed", s.seed}, {"wall_clock_train_s", s.test_report.wall_clock_train_s},
                               {"wall_clock_eval_s", s.test_report.wall_clock_eval_s}});
    }
    rows.push_back({{"method", r.method},
                    {"units", r.units},
                    {"accuracy_mean", r.result.accuracy.mean},
                    {"accuracy_sd", r.result.accuracy.sd},
                    {"accuracy", format_percent_sd(r.result.accuracy)},
                    {"per_seed", std::move(per_seed)}});
    timing_rows.push_back({{"method", r.method}, {"mean_train_s", r.result.mean_train_s},
                           {"per_seed", std::move(per_seed_time)}});
  }
  nlohmann::json config = config_json(run.pipeline);
  config.erase("direction");
  config.erase("units_per_direction");
  out.json = {{"results",
               {{"command", "benchmark"},
                {"config", std::move(config)},
                {"n_seeds", run.n_seeds},
                {"split", "test"},
                {"n_train", data.train.size()},
                {"n_test", data.test.size()},
                {"training_epochs", 0},
                {"rows", std::move(rows)}}},
              {"timing", {{"rows", std::move(timing_rows)}}}};
  out.table = render_benchmark_table(out.rows);

  std::filesystem::create_directories(run.out);
  write_file_bytes(run.out / "benchmark.json", out.json.dump(2) + "\n");
  write_file_bytes(run.out / "benchmark.txt", out.table);
  log << out.table;
  return out;
}

}  // namespace besn
