#include "nxs/error.hpp"

namespace nxs {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_chunk: return "InvalidChunk";
    case Errc::invalid_parameter: return "InvalidParameter";
    case Errc::type_mismatch: return "TypeMismatch";
    case Errc::cycle_detected: return "CycleDetected";
    case Errc::dangling_input: return "DanglingInput";
    case Errc::epoch_context_violation: return "EpochContextViolation";
    case Errc::order_violation: return "OrderViolation";
    case Errc::input_arity: return "InputArity";
    case Errc::node_failure: return "NodeFailure";
    case Errc::syntax_error: return "SyntaxError";
    case Errc::unknown_node_kind: return "UnknownNodeKind";
    case Errc::duplicate_node_name: return "DuplicateNodeName";
    case Errc::domain_error: return "DomainError";
    case Errc::invalid_band: return "InvalidBand";
    case Errc::unstable_design: return "UnstableDesign";
    case Errc::channel_count_changed: return "ChannelCountChanged";
    case Errc::empty_epoch: return "EmptyEpoch";
    case Errc::too_short: return "TooShort";
    case Errc::unknown_channel: return "UnknownChannel";
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::too_few_channels: return "TooFewChannels";
    case Errc::xml_syntax_error: return "XmlSyntaxError";
    case Errc::schema_error: return "SchemaError";
    case Errc::invalid_duration: return "InvalidDuration";
    case Errc::bad_guid: return "BadGuid";
    case Errc::truncated: return "Truncated";
    case Errc::inconsistent_header: return "InconsistentHeader";
    case Errc::connect_failed: return "ConnectFailed";
    case Errc::protocol_error: return "ProtocolError";
    case Errc::bad_magic: return "BadMagic";
    case Errc::oversize: return "Oversize";
    case Errc::corrupt_chunk: return "CorruptChunk";
    case Errc::unsupported_sample_format: return "UnsupportedSampleFormat";
    case Errc::missing_section: return "MissingSection";
    case Errc::unsupported_binary_format: return "UnsupportedBinaryFormat";
    case Errc::file_size_mismatch: return "FileSizeMismatch";
    case Errc::io_error: return "IoError";
    case Errc::schema_changed: return "SchemaChanged";
    case Errc::misaligned_inputs: return "MisalignedInputs";
    case Errc::singular_covariance: return "SingularCovariance";
    case Errc::too_few_samples: return "TooFewSamples";
    case Errc::version_mismatch: return "VersionMismatch";
  }
  return "Unknown";
}

}  // namespace nxs
