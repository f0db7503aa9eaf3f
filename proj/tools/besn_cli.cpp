// besn: train, evaluate and benchmark bidirectional echo-state classifiers on
// keypoint sequences.

#include <cstdint>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "besn/commands.hpp"
#include "besn/config_file.hpp"

namespace {

void add_run_flags(CLI::App& cmd, besn::RunConfig& run, std::string& direction, std::string& agg,
                   std::string& lambda_grid, bool with_seeds) {
  auto& p = run.pipeline;
  auto& r = p.reservoir;
  cmd.add_option("--manifest", run.manifest, "Dataset manifest (JSON)")->required();
  cmd.add_option("--out", run.out, "Output directory")->capture_default_str();
  cmd.add_option("--direction", direction, "uni | bi")->capture_default_str();
  cmd.add_option("--units", r.n_units, "Total reservoir units (bi: half per direction)")->capture_default_str();
  cmd.add_option("--leak-rate", r.leak_rate, "Leak rate in [0,1]")->capture_default_str();
  cmd.add_option("--spectral-radius", r.spectral_radius, "Target spectral radius of W_r")->capture_default_str();
  cmd.add_option("--input-scaling", r.input_scaling, "Half-width of uniform W_in entries")->capture_default_str();
  cmd.add_option("--density", r.density, "Fraction of nonzero W_r entries")->capture_default_str();
  cmd.add_option("--bias-scale", r.bias_scale, "Half-width of uniform bias entries")->capture_default_str();
  cmd.add_option("--noise-level", r.noise_level, "Uniform state noise half-width (training only)")
      ->capture_default_str();
  cmd.add_option("--washout", r.washout_frames, "Frames discarded before mean aggregation")->capture_default_str();
  cmd.add_option("--lambda", p.lambda, "Ridge penalty")->capture_default_str();
  cmd.add_option("--lambda-grid", lambda_grid, "Comma-separated lambdas swept on the val split");
  cmd.add_option("--agg", agg, "final | mean | mean_plus_final")->capture_default_str();
  cmd.add_option("--seed", r.seed, "Reservoir seed (base seed for --seeds)")->capture_default_str();
  cmd.add_option("--threads", p.threads, "Worker threads (0 = all cores)")->capture_default_str();
  cmd.add_flag("--separate-weights", [&p](std::int64_t) { p.shared_weights = false; },
               "Draw an independent backward reservoir");
  cmd.add_flag("--wrist-center", run.center_wrists, "Subtract each hand's wrist from its landmarks");
  if (with_seeds) cmd.add_option("--seeds", run.n_seeds, "Number of consecutive seeds")->capture_default_str();
  cmd.add_option("--config", "Key-value config file (flags override)");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = besn::trim(item);
    if (item.empty()) continue;
    try {
      grid.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw besn::ConfigError("lambda-grid", "cannot parse '" + item + "'");
    }
  }
  return grid;
}

void finish_run_config(besn::RunConfig& run, const std::string& direction, const std::string& agg,
                       const std::string& lambda_grid) {
  run.pipeline.direction = besn::parse_direction(direction);
  run.pipeline.aggregation = besn::parse_aggregation(agg);
  run.pipeline.lambda_grid = parse_grid(lambda_grid);
}

// Expands `--config FILE` (anywhere after the subcommand) into explicit flags.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      continue;
    }
    const std::size_t insert_at = args.empty() ? 0 : 1;  // after the subcommand name
    return besn::merge_config_args(args, path, insert_at);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bidirectional echo-state-network classifier for keypoint sequences"};
  app.require_subcommand(1);

  besn::SyntheticSpec spec;
  std::filesystem::path gen_out = "data/synthetic";
  auto* gen = app.add_subcommand("generate", "Write a synthetic prefix/suffix dataset (KPS1 + manifest)");
  gen->add_option("--out", gen_out, "Output directory")->capture_default_str();
  gen->add_option("--classes", spec.n_classes)->capture_default_str();
  gen->add_option("--prefix-motifs", spec.n_prefix_motifs)->capture_default_str();
  gen->add_option("--samples-per-class", spec.samples_per_class)->capture_default_str();
  gen->add_option("--t-min", spec.t_min)->capture_default_str();
  gen->add_option("--t-max", spec.t_max)->capture_default_str();
  gen->add_option("--dim", spec.feature_dim)->capture_default_str();
  gen->add_option("--motif-length", spec.motif_length)->capture_default_str();
  gen->add_option("--noise-std", spec.noise_std)->capture_default_str();
  gen->add_option("--filler-step", spec.filler_step)->capture_default_str();
  gen->add_option("--val-fraction", spec.val_fraction)->capture_default_str();
  gen->add_option("--test-fraction", spec.test_fraction)->capture_default_str();
  gen->add_option("--seed", spec.seed)->capture_default_str();
  gen->add_option("--config", "Key-value spec file (flags override)");

  besn::RunConfig train_run, eval_run, bench_run;
  std::string train_dir = "bi", train_agg = "final", train_grid;
  std::string eval_dir = "bi", eval_agg = "final", eval_grid;
  std::string bench_dir = "bi", bench_agg = "final", bench_grid;
  train_run.pipeline.reservoir.n_units = eval_run.pipeline.reservoir.n_units = bench_run.pipeline.reservoir.n_units = 200;

  auto* train = app.add_subcommand("train", "Fit the ridge readout and write model.besn + train_report.json");
  add_run_flags(*train, train_run, train_dir, train_agg, train_grid, false);

  std::filesystem::path model_path;
  std::string split_name = "test";
  auto* eval = app.add_subcommand("eval", "Evaluate a saved model on one split");
  add_run_flags(*eval, eval_run, eval_dir, eval_agg, eval_grid, false);
  eval->add_option("--model", model_path, "Model file written by train")->required();
  eval->add_option("--split", split_name, "train | val | test")->capture_default_str();

  auto* bench = app.add_subcommand("benchmark", "Compare bi-ESN and uni-ESN over several seeds");
  add_run_flags(*bench, bench_run, bench_dir, bench_agg, bench_grid, true);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return besn::exit_code(besn::ErrorKind::Usage);
  } catch (const besn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return besn::exit_code(e.kind());
  }

  try {
    if (gen->parsed()) {
      besn::cmd_generate(spec, gen_out, std::cout);
    } else if (train->parsed()) {
      finish_run_config(train_run, train_dir, train_agg, train_grid);
      besn::cmd_train(train_run, std::cout);
    } else if (eval->parsed()) {
      finish_run_config(eval_run, eval_dir, eval_agg, eval_grid);
      const auto split = besn::parse_split(split_name);
      if (!split) throw besn::ConfigError("split", "expected train|val|test");
      besn::cmd_eval(model_path, eval_run, *split, std::cout);
    } else if (bench->parsed()) {
      finish_run_config(bench_run, bench_dir, bench_agg, bench_grid);
      besn::cmd_benchmark(bench_run, std::cout, std::cerr);
    }
  } catch (const besn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return besn::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return besn::exit_code(besn::ErrorKind::Data);
  }
  return 0;
}
