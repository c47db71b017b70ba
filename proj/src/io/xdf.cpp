#include "nxs/io/xdf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>

#include "nxs/error.hpp"
#include "nxs/net/bytes.hpp"

namespace nxs::io {

namespace {

namespace pt = boost::property_tree;
using net::ByteReader;

enum class Format { float32, double64, string };

struct StreamState {
  RecordedStream stream;
  Format format = Format::float32;
  std::size_t channels = 0;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<double, double>> offsets;  // (collection time, offset)
  double last_stamp = 0.0;
  bool have_stamp = false;
};

[[noreturn]] void corrupt(std::size_t offset, const std::string& what) {
  throw Error(Errc::corrupt_chunk, fmt::format("at byte {}: {}", offset, what));
}

std::uint64_t varlen(ByteReader& r, std::size_t chunk_start) {
  const auto n = r.get<std::uint8_t>();
  switch (n) {
    case 1: return r.get<std::uint8_t>();
    case 4: return r.get<std::uint32_t>();
    case 8: return r.get<std::uint64_t>();
    default: corrupt(chunk_start, fmt::format("length field of {} bytes", n));
  }
}

StreamState parse_header(const std::string& xml, std::size_t offset) {
  pt::ptree tree;
  try {
    std::istringstream in(xml);
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    corrupt(offset, fmt::format("stream header XML: {}", e.message()));
  }
  StreamState s;
  s.stream.name = tree.get<std::string>("info.name", "");
  s.channels = tree.get<std::size_t>("info.channel_count", 0);
  s.stream.fs = tree.get<double>("info.nominal_srate", 0.0);
  const auto fmt_name = tree.get<std::string>("info.channel_format", "float32");
  if (fmt_name == "float32") {
    s.format = Format::float32;
  } else if (fmt_name == "double64") {
    s.format = Format::double64;
  } else if (fmt_name == "string") {
    s.format = Format::string;
  } else {
    throw Error(Errc::unsupported_sample_format, fmt::format("channel_format '{}'", fmt_name));
  }
  if (s.channels == 0) corrupt(offset, "stream header without channel_count");
  s.stream.kind = s.format == Format::string ? StreamKind::marker : StreamKind::signal;
  if (const auto chans = tree.get_child_optional("info.desc.channels")) {
    for (const auto& [tag, ch] : *chans) {
      if (tag == "channel") s.stream.channel_names.push_back(ch.get<std::string>("label", ""));
    }
  }
  if (s.stream.channel_names.size() != s.channels ||
      std::any_of(s.stream.channel_names.begin(), s.stream.channel_names.end(), [](auto& n) { return n.empty(); })) {
    s.stream.channel_names = default_channel_names(s.channels);
  }
  return s;
}

void parse_samples(ByteReader& r, StreamState& s, std::size_t chunk_start) {
  const std::uint64_t n = varlen(r, chunk_start);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto stamp_bytes = r.get<std::uint8_t>();
    double t = 0.0;
    if (stamp_bytes == 8) {
      t = r.get<double>();
    } else if (stamp_bytes == 0) {
      t = s.have_stamp ? s.last_stamp + (s.stream.fs > 0.0 ? 1.0 / s.stream.fs : 0.0) : 0.0;
    } else {
      corrupt(chunk_start, fmt::format("timestamp of {} bytes", stamp_bytes));
    }
    s.last_stamp = t;
    s.have_stamp = true;
    s.stream.timestamps.push_back(t);
    if (s.format == Format::string) {
      std::string label;
      for (std::size_t c = 0; c < s.channels; ++c) {
        const auto len = varlen(r, chunk_start);
        const auto text = r.text(static_cast<std::size_t>(len));
        if (c == 0) label = text;
      }
      MarkerEvent m{t, label, std::nullopt};
      try {
        std::size_t used = 0;
        const long long v = std::stoll(label, &used);
        if (used == label.size() && v >= INT32_MIN && v <= INT32_MAX) m.code = static_cast<std::int32_t>(v);
      } catch (const std::exception&) {
      }
      s.stream.markers.push_back(std::move(m));
    } else {
      std::vector<double> row(s.channels);
      for (auto& v : row) v = s.format == Format::float32 ? r.get<float>() : r.get<double>();
      s.rows.push_back(std::move(row));
    }
  }
}

double interpolate_offset(const std::vector<std::pair<double, double>>& pts, double t) {
  if (t <= pts.front().first) return pts.front().second;
  if (t >= pts.back().first) return pts.back().second;
  const auto hi = std::upper_bound(pts.begin(), pts.end(), t, [](double x, const auto& p) { return x < p.first; });
  const auto lo = hi - 1;
  const double span = hi->first - lo->first;
  if (span <= 0.0) return hi->second;
  return lo->second + (hi->second - lo->second) * (t - lo->first) / span;
}

}  // namespace

Recording parse_xdf(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::string_view(reinterpret_cast<const char*>(bytes.data()), 4) != "XDF:") {
    throw Error(Errc::bad_magic, "file does not start with \"XDF:\"");
  }
  std::map<std::uint32_t, StreamState> streams;
  std::vector<std::uint32_t> order;
  std::size_t pos = 4;
  while (pos < bytes.size()) {
    const std::size_t chunk_start = pos;
    std::uint64_t len = 0;
    std::uint16_t tag = 0;
    ByteReader head(bytes.subspan(pos));
    try {
      len = varlen(head, chunk_start);
      tag = head.get<std::uint16_t>();
    } catch (const Error& e) {
      if (e.code() == Errc::corrupt_chunk) throw;
      corrupt(chunk_start, "truncated chunk header");
    }
    if (len < 2 || len - 2 > bytes.size() - pos - head.position()) {
      corrupt(chunk_start, fmt::format("chunk length {} overruns the file", len));
    }
    const std::size_t content_start = pos + head.position();
    ByteReader r(bytes.subspan(content_start, static_cast<std::size_t>(len - 2)));
    pos = content_start + static_cast<std::size_t>(len - 2);

    try {
      switch (tag) {
        case 1:  // FileHeader
        case 5:  // Boundary
          break;
        case 2: {
          const auto id = r.get<std::uint32_t>();
          if (streams.count(id)) corrupt(chunk_start, fmt::format("duplicate header for stream {}", id));
          streams.emplace(id, parse_header(r.text(r.remaining()), chunk_start));
          order.push_back(id);
          break;
        }
        case 3:
        case 4:
        case 6: {
          const auto id = r.get<std::uint32_t>();
          auto it = streams.find(id);
          if (it == streams.end()) corrupt(chunk_start, fmt::format("chunk for undeclared stream {}", id));
          if (tag == 3) {
            parse_samples(r, it->second, chunk_start);
            if (r.remaining() != 0) corrupt(chunk_start, fmt::format("{} unread bytes in samples chunk", r.remaining()));
          } else if (tag == 4) {
            const double collection = r.get<double>();
            const double offset = r.get<double>();
            it->second.offsets.emplace_back(collection, offset);
          }
          break;
        }
        default: corrupt(chunk_start, fmt::format("unknown tag {}", tag));
      }
    } catch (const Error& e) {
      if (e.code() == Errc::truncated) corrupt(chunk_start, e.detail());
      throw;
    }
  }

  Recording rec;
  rec.format = "xdf";
  for (const auto id : order) {
    StreamState& s = streams.at(id);
    if (!s.offsets.empty()) {
      std::sort(s.offsets.begin(), s.offsets.end());
      for (auto& t : s.stream.timestamps) t += interpolate_offset(s.offsets, t);
      for (std::size_t i = 0; i < s.stream.markers.size(); ++i) s.stream.markers[i].timestamp = s.stream.timestamps[i];
    }
    if (s.stream.kind == StreamKind::signal) {
      s.stream.samples.resize(static_cast<Eigen::Index>(s.rows.size()), static_cast<Eigen::Index>(s.channels));
      for (std::size_t i = 0; i < s.rows.size(); ++i) {
        for (std::size_t c = 0; c < s.channels; ++c) {
          s.stream.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = s.rows[i][c];
        }
      }
    }
    rec.streams.push_back(std::move(s.stream));
  }
  return rec;
}

Recording read_xdf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_xdf(bytes);
}

}  // namespace nxs::io
