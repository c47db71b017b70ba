#include <atomic>
#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "nxs/app/commands.hpp"
#include "nxs/core/registry.hpp"
#include "nxs/log.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted.store(true); }

}  // namespace

int main(int argc, char** argv) {
  using namespace nxs::app;
  nxs::logger();  // applies NXS_LOG before anything else logs

  CLI::App app{"nxs: real-time biosignal pipeline engine"};
  app.require_subcommand(1);
  app.footer("\n" + nxs::NodeRegistry::builtin().help_text() +
             "\nExit codes: 0 ok, 2 parse error, 3 validation error, 4 runtime error.\n"
             "Environment: NXS_LOG=trace|debug|info|warn|error|off");

  std::string pipeline_file;
  RunOptions run_opts;
  double run_duration = 0.0;
  std::uint64_t run_steps = 0;
  bool accelerated = false;
  auto* run = app.add_subcommand("run", "execute a pipeline file");
  run->add_option("pipeline", pipeline_file, "pipeline description (TOML)")->required();
  auto* dur_opt = run->add_option("--duration", run_duration, "stop after this many pipeline seconds");
  auto* steps_opt = run->add_option("--steps", run_steps, "stop after this many scheduler steps");
  run->add_flag("--accelerated", accelerated, "virtual clock: run steps back to back without sleeping");

  auto* validate = app.add_subcommand("validate", "parse and type-check a pipeline without running it");
  validate->add_option("pipeline", pipeline_file, "pipeline description (TOML)")->required();

  double bench_duration = 30.0;
  auto* bench = app.add_subcommand("bench", "paced run reporting loop latency and overruns");
  bench->add_option("pipeline", pipeline_file, "pipeline description (TOML)")->required();
  bench->add_option("--duration", bench_duration, "seconds to run")->capture_default_str();

  std::string features_csv;
  TrainOptions train_opts;
  std::string train_out = "model.json";
  auto* train = app.add_subcommand("train", "fit an LDA model from a labelled feature CSV");
  train->add_option("features", features_csv, "CSV with feature columns and a label column")->required();
  train->add_option("--label-column", train_opts.label_column, "label column name")->capture_default_str();
  train->add_option("--out", train_out, "model file to write")->capture_default_str();
  train->add_option("--ridge", train_opts.ridge, "covariance ridge")->capture_default_str();

  std::string plot_csv;
  std::string plot_out = "plot.svg";
  PlotOptions plot_opts;
  auto* plot = app.add_subcommand("plot", "render a logged CSV as an SVG line plot");
  plot->add_option("csv", plot_csv, "CSV with a time column")->required();
  plot->add_option("--out", plot_out, "SVG file to write")->capture_default_str();
  plot->add_option("--channels", plot_opts.channels, "columns to draw (default: all)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParseError;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  if (*run) {
    if (*dur_opt) run_opts.duration = run_duration;
    if (*steps_opt) run_opts.steps = run_steps;
    run_opts.paced = !accelerated;
    run_opts.interrupt = &g_interrupted;
    return cmd_run(pipeline_file, run_opts, std::cout, std::cerr);
  }
  if (*validate) return cmd_validate(pipeline_file, std::cout, std::cerr);
  if (*bench) return cmd_bench(pipeline_file, bench_duration, &g_interrupted, std::cout, std::cerr);
  if (*train) {
    train_opts.out = train_out;
    return cmd_train(features_csv, train_opts, std::cout, std::cerr);
  }
  if (*plot) {
    plot_opts.out = plot_out;
    return cmd_plot(plot_csv, plot_opts, std::cout, std::cerr);
  }
  return kParseError;
}
