#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nxs {

// Error kinds raised by the engine. Each maps to one failure named by a
// module contract; callers switch on code() rather than parsing messages.
enum class Errc {
  invalid_chunk,
  invalid_parameter,
  // graph
  type_mismatch,
  cycle_detected,
  dangling_input,
  epoch_context_violation,
  order_violation,
  input_arity,
  node_failure,
  // dsl
  syntax_error,
  unknown_node_kind,
  duplicate_node_name,
  domain_error,
  // dsp
  invalid_band,
  unstable_design,
  channel_count_changed,
  empty_epoch,
  too_short,
  // selection
  unknown_channel,
  index_out_of_range,
  dimension_mismatch,
  too_few_channels,
  // synthesis
  xml_syntax_error,
  schema_error,
  invalid_duration,
  // net
  bad_guid,
  truncated,
  inconsistent_header,
  connect_failed,
  protocol_error,
  bad_magic,
  oversize,
  // files
  corrupt_chunk,
  unsupported_sample_format,
  missing_section,
  unsupported_binary_format,
  file_size_mismatch,
  io_error,
  schema_changed,
  // ml
  misaligned_inputs,
  singular_covariance,
  too_few_samples,
  version_mismatch,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  Errc code() const noexcept { return code_; }
  /// Message without the error-kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

/// Error tied to a text location. Line is 1-based (0 for single-line input
/// such as an expression); column is 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& what)
      : Error(Errc::syntax_error, (line > 0 ? "line " + std::to_string(line) + ", " : std::string()) + "col " +
                                      std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace nxs
