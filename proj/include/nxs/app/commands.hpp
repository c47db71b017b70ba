#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nxs/core/pipeline.hpp"
#include "nxs/io/csv.hpp"

// Implementation of the `nxs` subcommands. Each returns the process exit
// status and writes key=value lines to `out` and diagnostics to `err`.

namespace nxs::app {

enum ExitCode : int { kOk = 0, kFailure = 1, kParseError = 2, kValidationError = 3, kRuntimeError = 4 };

struct RunOptions {
  std::optional<double> duration;
  std::optional<std::uint64_t> steps;
  bool paced = true;
  const std::atomic<bool>* interrupt = nullptr;
};

int cmd_run(const std::filesystem::path& file, const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_validate(const std::filesystem::path& file, std::ostream& out, std::ostream& err);
int cmd_bench(const std::filesystem::path& file, double duration, const std::atomic<bool>* interrupt,
              std::ostream& out, std::ostream& err);

struct TrainOptions {
  std::string label_column = "label";
  std::filesystem::path out = "model.json";
  double ridge = 1e-6;
};

int cmd_train(const std::filesystem::path& features_csv, const TrainOptions& options, std::ostream& out,
              std::ostream& err);

struct PlotOptions {
  std::filesystem::path out = "plot.svg";
  std::vector<std::string> channels;  // empty: every column except time
  double width = 960.0;
  double height = 480.0;
};

int cmd_plot(const std::filesystem::path& csv, const PlotOptions& options, std::ostream& out, std::ostream& err);

/// Self-contained SVG: one polyline per channel, time on x. Throws
/// Errc::schema_error for a missing time column and Errc::unknown_channel.
std::string render_svg(const io::CsvTable& table, const std::vector<std::string>& channels, double width,
                       double height);

/// key=value lines of a run report (counters as counter.<node>.<key>).
void print_report(const RunReport& report, std::ostream& out);

}  // namespace nxs::app
