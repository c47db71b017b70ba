#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "nxs/core/types.hpp"

namespace nxs::io {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Appends pipeline items to CSV. The first data item fixes the schema of
/// `path`: `time,<ch1>,...` for chunks or `time,<name1>,...,label` for
/// feature vectors. Markers go to `<stem>_markers.csv` as `time,label,code`.
/// Throws Errc::schema_changed on a different channel set, Errc::io_error
/// when a file cannot be written.
class CsvSink {
 public:
  explicit CsvSink(std::filesystem::path path);

  void append(const Chunk& chunk);
  void append(const FeatureVector& vector);
  void append(const MarkerEvent& marker);
  void flush();

  std::size_t rows_written() const noexcept { return rows_; }
  std::filesystem::path markers_path() const;

 private:
  enum class Schema { none, signal, vector };
  void open_main(const std::vector<std::string>& header, Schema schema);

  std::filesystem::path path_;
  std::ofstream out_;
  std::ofstream markers_;
  Schema schema_ = Schema::none;
  std::vector<std::string> columns_;
  std::size_t rows_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, or nullopt.
  std::optional<std::size_t> column(const std::string& name) const;
};

/// RFC 4180 style reader (quoted fields, doubled quotes). Throws
/// Errc::io_error or Errc::schema_error for ragged rows.
CsvTable read_csv(const std::filesystem::path& path);

/// Parses a whole cell as a double; Errc::schema_error otherwise.
double parse_double(const std::string& cell);

}  // namespace nxs::io
