#include "nxs/synth/stimulator.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>

#include "nxs/error.hpp"

namespace nxs::synth {

namespace pt = boost::property_tree;

std::optional<std::int32_t> default_code(std::string_view label) {
  static constexpr std::pair<std::string_view, std::int32_t> codes[] = {
      {"left", 769},   {"right", 770},          {"foot", 771},         {"tongue", 772},
      {"task", 781},   {"baseline", 786},       {"rest", 800},         {"session_start", 32769},
      {"session_end", 32770}};
  for (const auto& [name, code] : codes) {
    if (name == label) return code;
  }
  return std::nullopt;
}

namespace {

double duration_attr(const pt::ptree& node, const std::string& element, const std::string& attr) {
  const auto v = node.get_optional<std::string>("<xmlattr>." + attr);
  if (!v) throw Error(Errc::schema_error, fmt::format("<{}> needs attribute '{}'", element, attr));
  double d = 0.0;
  try {
    std::size_t used = 0;
    d = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
  } catch (const std::exception&) {
    throw Error(Errc::invalid_duration, fmt::format("<{} {}=\"{}\"> is not a number", element, attr, *v));
  }
  if (!std::isfinite(d) || d < 0.0) {
    throw Error(Errc::invalid_duration, fmt::format("<{} {}=\"{}\"> must be finite and >= 0", element, attr, *v));
  }
  return d;
}

std::int64_t integer(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::schema_error, fmt::format("{} '{}' is not an integer", what, text));
  }
}

}  // namespace

ExperimentDesign parse_experiment(std::string_view xml) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw Error(Errc::xml_syntax_error, fmt::format("line {}: {}", e.line(), e.message()));
  }
  const auto root = tree.get_child_optional("experiment");
  if (!root) throw Error(Errc::schema_error, "missing root element <experiment>");

  ExperimentDesign d;
  if (const auto b = root->get_child_optional("baseline")) d.baseline = duration_attr(*b, "baseline", "duration");

  const auto classes = root->get_child_optional("classes");
  if (!classes) throw Error(Errc::schema_error, "missing element <classes>");
  for (const auto& [tag, node] : *classes) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
    if (tag != "class") throw Error(Errc::schema_error, fmt::format("unexpected <{}> in <classes>", tag));
    StimClass c;
    c.label = node.get<std::string>("<xmlattr>.label", "");
    if (c.label.empty()) throw Error(Errc::schema_error, "<class> needs a non-empty 'label'");
    if (const auto code = node.get_optional<std::string>("<xmlattr>.code")) {
      const auto v = integer(*code, "class code");
      if (v < INT32_MIN || v > INT32_MAX) throw Error(Errc::schema_error, "class code out of 32-bit range");
      c.code = static_cast<std::int32_t>(v);
    } else {
      c.code = default_code(c.label);
    }
    d.classes.push_back(std::move(c));
  }
  if (d.classes.empty()) throw Error(Errc::schema_error, "<classes> declares no <class>");

  const auto trial = root->get_child_optional("trial");
  if (!trial) throw Error(Errc::schema_error, "missing element <trial>");
  d.cue = duration_attr(*trial, "trial", "cue");
  d.task = duration_attr(*trial, "trial", "task");
  d.rest = duration_attr(*trial, "trial", "rest");
  const auto per_class = trial->get_optional<std::string>("<xmlattr>.per_class");
  if (!per_class) throw Error(Errc::schema_error, "<trial> needs attribute 'per_class'");
  const auto pc = integer(*per_class, "per_class");
  if (pc < 0) throw Error(Errc::schema_error, "per_class must be >= 0");
  d.per_class = static_cast<std::size_t>(pc);

  if (const auto seed = root->get_optional<std::string>("seed")) {
    d.seed = static_cast<std::uint64_t>(integer(*seed, "seed"));
  }
  return d;
}

StimSchedule build_schedule(const ExperimentDesign& d) {
  std::vector<std::size_t> trials;
  for (std::size_t k = 0; k < d.classes.size(); ++k) trials.insert(trials.end(), d.per_class, k);
  std::mt19937_64 rng(d.seed);
  for (std::size_t i = trials.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(trials[i - 1], trials[j]);
  }

  StimSchedule s;
  auto add = [&](double t, const std::string& label, std::optional<std::int32_t> code) {
    s.entries.push_back({t, label, code});
  };
  double t = 0.0;
  add(t, "session_start", default_code("session_start"));
  for (const std::size_t k : trials) {
    add(t, "baseline", default_code("baseline"));
    t += d.baseline;
    add(t, d.classes[k].label, d.classes[k].code);
    t += d.cue;
    add(t, "task", default_code("task"));
    t += d.task;
    add(t, "rest", default_code("rest"));
    t += d.rest;
  }
  add(t, "session_end", default_code("session_end"));
  s.total_duration = t;
  return s;
}

StimSchedule parse_stim_config(std::string_view xml) { return build_schedule(parse_experiment(xml)); }

StimSchedule load_stim_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_stim_config(buf.str());
}

std::vector<MarkerEvent> StimEmitter::emit_due(double clock) {
  std::vector<MarkerEvent> out;
  while (next_ < schedule_.entries.size() && schedule_.entries[next_].time <= clock) {
    const auto& e = schedule_.entries[next_++];
    out.push_back({e.time, e.label, e.code});
  }
  return out;
}

}  // namespace nxs::synth
