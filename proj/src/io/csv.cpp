#include "nxs/io/csv.hpp"

#include <charconv>
#include <sstream>

#include <fmt/format.h>

#include "nxs/error.hpp"

namespace nxs::io {

std::string format_double(double v) { return fmt::format("{}", v); }

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_row(std::ofstream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << quote(cells[i]);
  }
  out << '\n';
}

void check_stream(const std::ofstream& out, const std::filesystem::path& p) {
  if (!out) throw Error(Errc::io_error, "cannot write " + p.string());
}

}  // namespace

CsvSink::CsvSink(std::filesystem::path path) : path_(std::move(path)) {}

std::filesystem::path CsvSink::markers_path() const {
  return path_.parent_path() / (path_.stem().string() + "_markers.csv");
}

void CsvSink::open_main(const std::vector<std::string>& header, Schema schema) {
  if (schema_ == Schema::none) {
    out_.open(path_, std::ios::trunc);
    check_stream(out_, path_);
    write_row(out_, header);
    schema_ = schema;
    columns_ = header;
    return;
  }
  if (schema_ != schema || columns_ != header) {
    std::string expected, got;
    for (const auto& c : columns_) expected += (expected.empty() ? "" : ",") + c;
    for (const auto& c : header) got += (got.empty() ? "" : ",") + c;
    throw Error(Errc::schema_changed, fmt::format("{}: header is '{}', item needs '{}'", path_.filename().string(),
                                                  expected, got));
  }
}

void CsvSink::append(const Chunk& chunk) {
  std::vector<std::string> header{"time"};
  header.insert(header.end(), chunk.channel_names.begin(), chunk.channel_names.end());
  open_main(header, Schema::signal);
  fmt::memory_buffer buf;
  for (std::size_t r = 0; r < chunk.rows(); ++r) {
    buf.clear();
    fmt::format_to(std::back_inserter(buf), "{}", chunk.timestamps[r]);
    for (Eigen::Index c = 0; c < chunk.data.cols(); ++c) {
      fmt::format_to(std::back_inserter(buf), ",{}", chunk.data(static_cast<Eigen::Index>(r), c));
    }
    buf.push_back('\n');
    out_.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  check_stream(out_, path_);
  rows_ += chunk.rows();
}

void CsvSink::append(const FeatureVector& v) {
  std::vector<std::string> header{"time"};
  if (v.names.size() == v.values.size()) {
    header.insert(header.end(), v.names.begin(), v.names.end());
  } else {
    for (std::size_t i = 0; i < v.values.size(); ++i) header.push_back(fmt::format("v{}", i + 1));
  }
  header.push_back("label");
  open_main(header, Schema::vector);
  std::vector<std::string> row{format_double(v.timestamp)};
  for (double x : v.values) row.push_back(format_double(x));
  row.push_back(v.label.value_or(""));
  write_row(out_, row);
  check_stream(out_, path_);
  ++rows_;
}

void CsvSink::append(const MarkerEvent& m) {
  if (!markers_.is_open()) {
    markers_.open(markers_path(), std::ios::trunc);
    check_stream(markers_, markers_path());
    write_row(markers_, {"time", "label", "code"});
  }
  write_row(markers_, {format_double(m.timestamp), m.label, m.code ? std::to_string(*m.code) : std::string()});
  check_stream(markers_, markers_path());
}

void CsvSink::flush() {
  if (out_.is_open()) out_.flush();
  if (markers_.is_open()) markers_.flush();
}

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

namespace {

std::vector<std::string> parse_line(std::istream& in, std::string& line, bool& ok) {
  std::vector<std::string> cells;
  ok = static_cast<bool>(std::getline(in, line));
  if (!ok) return cells;
  std::string cur;
  bool quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i == line.size()) {
      if (quoted) {
        // quoted field spanning lines
        std::string next;
        if (!std::getline(in, next)) throw Error(Errc::schema_error, "unterminated quoted field");
        cur += '\n';
        line = next;
        i = 0;
        continue;
      }
      break;
    }
    const char c = line[i++];
    if (quoted) {
      if (c == '"') {
        if (i < line.size() && line[i] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  CsvTable t;
  std::string line;
  bool ok = false;
  t.header = parse_line(in, line, ok);
  if (!ok) throw Error(Errc::schema_error, path.filename().string() + " is empty");
  std::size_t lineno = 1;
  while (true) {
    auto row = parse_line(in, line, ok);
    if (!ok) break;
    ++lineno;
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != t.header.size()) {
      throw Error(Errc::schema_error, fmt::format("{} line {}: {} fields, header has {}", path.filename().string(),
                                                  lineno, row.size(), t.header.size()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

double parse_double(const std::string& cell) {
  double v = 0.0;
  const char* b = cell.data();
  const char* e = b + cell.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e) throw Error(Errc::schema_error, fmt::format("'{}' is not a number", cell));
  return v;
}

}  // namespace nxs::io
