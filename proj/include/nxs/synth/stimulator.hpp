#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nxs/core/types.hpp"

namespace nxs::synth {

/// Default codes for well-known labels (Graz / OpenViBE stimulation ids).
std::optional<std::int32_t> default_code(std::string_view label);

struct StimEntry {
  double time = 0.0;  // seconds from session start
  std::string label;
  std::optional<std::int32_t> code;

  bool operator==(const StimEntry&) const = default;
};

struct StimClass {
  std::string label;
  std::optional<std::int32_t> code;
};

struct ExperimentDesign {
  double baseline = 0.0;
  double cue = 0.0;
  double task = 0.0;
  double rest = 0.0;
  std::size_t per_class = 0;
  std::uint64_t seed = 0;
  std::vector<StimClass> classes;
};

struct StimSchedule {
  std::vector<StimEntry> entries;  // non-decreasing time
  double total_duration = 0.0;

  bool operator==(const StimSchedule&) const = default;
};

/// Reads the experiment description:
///
///   <experiment>
///     <baseline duration="2"/>
///     <classes>
///       <class label="left" code="769"/>
///       <class label="right"/>
///     </classes>
///     <trial cue="1.25" task="3.75" rest="1.5" per_class="20"/>
///     <seed>42</seed>
///   </experiment>
///
/// `baseline`, `code` and `seed` are optional. Throws Errc::xml_syntax_error
/// (with the line), Errc::schema_error or Errc::invalid_duration.
ExperimentDesign parse_experiment(std::string_view xml);

/// Trials are the classes repeated per_class times, shuffled by Fisher-Yates
/// driven by mt19937_64(seed) with j = draw % (i + 1). Each trial emits
/// "baseline", the class cue, "task" and "rest" in turn; the session is
/// framed by "session_start" at 0 and "session_end" at the total duration.
StimSchedule build_schedule(const ExperimentDesign& design);

StimSchedule parse_stim_config(std::string_view xml);
StimSchedule load_stim_config(const std::filesystem::path& path);

/// Hands out schedule entries as the clock passes them, each exactly once,
/// stamped with the scheduled time.
class StimEmitter {
 public:
  explicit StimEmitter(StimSchedule schedule) : schedule_(std::move(schedule)) {}

  std::vector<MarkerEvent> emit_due(double clock);
  bool done() const noexcept { return next_ >= schedule_.entries.size(); }
  const StimSchedule& schedule() const noexcept { return schedule_; }

 private:
  StimSchedule schedule_;
  std::size_t next_ = 0;
};

}  // namespace nxs::synth
