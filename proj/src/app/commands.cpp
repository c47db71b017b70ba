#include "nxs/app/commands.hpp"

#include <fstream>
#include <ostream>
#include <variant>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "nxs/dsl/pipeline_file.hpp"
#include "nxs/ml/lda.hpp"

namespace nxs::app {

namespace {

void line(std::ostream& out, std::string_view key, const std::string& value) {
  out << key << '=' << value << '\n';
}

std::string num(double v) { return fmt::format("{:.6g}", v); }

/// Parses, builds and validates. Returns the exit code on failure.
std::variant<Pipeline, int> load(const std::filesystem::path& file, std::ostream& err) {
  dsl::PipelineSpec spec;
  try {
    spec = dsl::load_pipeline_file(file);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  }
  for (const auto& w : spec.warnings) err << "warning: " << w << '\n';

  BuildContext ctx{file.parent_path()};
  try {
    Pipeline p = dsl::build_pipeline(spec, ctx);
    const auto report = p.validate();
    for (const auto& issue : report.issues) {
      err << (issue.severity == Severity::error ? "error: " : "warning: ") << to_string(issue.kind) << ": "
          << issue.message << '\n';
    }
    if (!report.ok()) return kValidationError;
    return p;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
}

std::uint64_t source_samples(Pipeline& p, const RunReport& report) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    Node& n = p.node(i);
    if (!n.input_slots().empty()) continue;
    const auto it = report.node_counters.find(n.name());
    if (it == report.node_counters.end()) continue;
    const auto s = it->second.find("samples");
    if (s != it->second.end()) total += s->second;
  }
  return total;
}

}  // namespace

void print_report(const RunReport& r, std::ostream& out) {
  line(out, "status", r.failed ? "failed" : "ok");
  line(out, "step_count", std::to_string(r.step_count));
  line(out, "elapsed", num(r.elapsed));
  line(out, "pipeline_time", num(r.pipeline_time));
  line(out, "mean_latency", num(r.mean_latency));
  line(out, "p95_latency", num(r.percentile_latency(0.95)));
  line(out, "max_latency", num(r.max_latency));
  line(out, "overruns", std::to_string(r.overruns));
  line(out, "overrun_rate", num(r.overrun_rate()));
  if (r.failed) {
    line(out, "failed_node", r.failed_node);
    line(out, "failure", r.failure);
  }
  for (const auto& [node, counters] : r.node_counters) {
    for (const auto& [key, value] : counters) line(out, "counter." + node + "." + key, std::to_string(value));
  }
}

int cmd_run(const std::filesystem::path& file, const RunOptions& options, std::ostream& out, std::ostream& err) {
  auto loaded = load(file, err);
  if (auto* code = std::get_if<int>(&loaded)) return *code;
  Pipeline& p = std::get<Pipeline>(loaded);

  Termination term;
  term.duration = options.duration;
  term.max_steps = options.steps;
  term.paced = options.paced;
  term.until_exhausted = true;
  term.interrupt = options.interrupt;
  try {
    const RunReport report = p.run(term);
    print_report(report, out);
    if (report.failed) {
      err << "error: node '" << report.failed_node << "' failed: " << report.failure << '\n';
      return kRuntimeError;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

int cmd_validate(const std::filesystem::path& file, std::ostream& out, std::ostream& err) {
  auto loaded = load(file, err);
  if (auto* code = std::get_if<int>(&loaded)) {
    line(out, "valid", "false");
    return *code;
  }
  line(out, "valid", "true");
  line(out, "nodes", std::to_string(std::get<Pipeline>(loaded).size()));
  return kOk;
}

int cmd_bench(const std::filesystem::path& file, double duration, const std::atomic<bool>* interrupt,
              std::ostream& out, std::ostream& err) {
  auto loaded = load(file, err);
  if (auto* code = std::get_if<int>(&loaded)) return *code;
  Pipeline& p = std::get<Pipeline>(loaded);
  line(out, "duration", num(duration));

  Termination term;
  term.duration = duration;
  term.paced = true;
  term.interrupt = interrupt;
  RunReport r;
  try {
    r = p.run(term);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  const std::uint64_t samples = source_samples(p, r);
  line(out, "loop_period", num(p.loop_period()));
  line(out, "step_count", std::to_string(r.step_count));
  line(out, "mean_latency_ms", num(r.mean_latency * 1e3));
  line(out, "p95_latency_ms", num(r.percentile_latency(0.95) * 1e3));
  line(out, "max_latency_ms", num(r.max_latency * 1e3));
  line(out, "overruns", std::to_string(r.overruns));
  line(out, "overrun_rate", num(r.overrun_rate()));
  line(out, "samples", std::to_string(samples));
  line(out, "samples_per_second", num(r.elapsed > 0.0 ? static_cast<double>(samples) / r.elapsed : 0.0));
  if (r.failed) {
    line(out, "failed_node", r.failed_node);
    err << "error: node '" << r.failed_node << "' failed: " << r.failure << '\n';
    return kRuntimeError;
  }
  return kOk;
}

int cmd_train(const std::filesystem::path& features_csv, const TrainOptions& options, std::ostream& out,
              std::ostream& err) {
  try {
    const io::CsvTable table = io::read_csv(features_csv);
    const auto label_col = table.column(options.label_column);
    if (!label_col) throw Error(Errc::schema_error, "no column '" + options.label_column + "'");
    std::vector<std::size_t> feature_cols;
    std::vector<std::string> feature_names;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (i == *label_col || table.header[i] == "time") continue;
      feature_cols.push_back(i);
      feature_names.push_back(table.header[i]);
    }
    if (feature_cols.empty()) throw Error(Errc::schema_error, "no feature columns");

    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    std::size_t skipped = 0;
    for (const auto& row : table.rows) {
      if (row[*label_col].empty()) {
        ++skipped;
        continue;
      }
      std::vector<double> x;
      for (auto c : feature_cols) x.push_back(io::parse_double(row[c]));
      rows.push_back(std::move(x));
      labels.push_back(row[*label_col]);
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(feature_cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < rows[i].size(); ++j) {
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
      }
    }
    const ml::LdaModel model = ml::lda_fit(x, labels, options.ridge, feature_names);

    std::size_t correct = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (ml::lda_predict(model, rows[i]).label == labels[i]) ++correct;
    }
    ml::save_model_file(model, options.out);
    line(out, "samples", std::to_string(rows.size()));
    line(out, "skipped_unlabelled", std::to_string(skipped));
    line(out, "features", std::to_string(feature_cols.size()));
    line(out, "classes", std::to_string(model.labels.size()));
    line(out, "accuracy", num(static_cast<double>(correct) / static_cast<double>(rows.size())));
    line(out, "model", options.out.string());
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::io_error && std::filesystem::exists(features_csv) ? kRuntimeError : kParseError;
  }
}

int cmd_plot(const std::filesystem::path& csv, const PlotOptions& options, std::ostream& out, std::ostream& err) {
  std::string svg;
  std::vector<std::string> channels = options.channels;
  try {
    const io::CsvTable table = io::read_csv(csv);
    if (channels.empty()) {
      for (const auto& h : table.header) {
        if (h != "time" && h != "label") channels.push_back(h);
      }
    }
    svg = render_svg(table, channels, options.width, options.height);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  }
  std::ofstream f(options.out, std::ios::binary | std::ios::trunc);
  f << svg;
  if (!f) {
    err << "error: cannot write " << options.out.string() << '\n';
    return kRuntimeError;
  }
  line(out, "channels", std::to_string(channels.size()));
  line(out, "svg", options.out.string());
  return kOk;
}

}  // namespace nxs::app
