#include "nxs/io/brainvision.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "nxs/error.hpp"
#include "nxs/log.hpp"

namespace nxs::io {

namespace {

using Section = std::map<std::string, std::string>;
using Ini = std::map<std::string, Section>;

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

Ini read_ini(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  Ini ini;
  std::string line;
  std::string section;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      ini[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || section.empty()) continue;
    ini[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return ini;
}

const Section& section(const Ini& ini, const std::string& name, const std::filesystem::path& file) {
  auto it = ini.find(name);
  if (it == ini.end()) throw Error(Errc::missing_section, fmt::format("[{}] in {}", name, file.filename().string()));
  return it->second;
}

const std::string& key(const Section& s, const std::string& k, const std::string& sec) {
  auto it = s.find(k);
  if (it == s.end()) throw Error(Errc::missing_section, fmt::format("key {} in [{}]", k, sec));
  return it->second;
}

std::vector<std::string> split_fields(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    std::string::size_type p;
    while ((p = f.find("\\1")) != std::string::npos) f.replace(p, 2, ",");
  }
  return out;
}

std::optional<std::int32_t> trailing_code(const std::string& label) {
  std::size_t end = label.size();
  std::size_t start = end;
  while (start > 0 && std::isdigit(static_cast<unsigned char>(label[start - 1]))) --start;
  if (start == end || end - start > 9) return std::nullopt;
  return static_cast<std::int32_t>(std::stol(label.substr(start)));
}

double number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(Errc::invalid_parameter, fmt::format("{} '{}' is not a number", what, text));
}

}  // namespace

Recording read_brainvision(const std::filesystem::path& vhdr) {
  const Ini ini = read_ini(vhdr);
  const Section& common = section(ini, "Common Infos", vhdr);
  const Section& chinfo = section(ini, "Channel Infos", vhdr);

  const std::string data_format = common.count("DataFormat") ? common.at("DataFormat") : "BINARY";
  if (data_format != "BINARY") throw Error(Errc::unsupported_binary_format, "DataFormat=" + data_format);
  const std::string orientation = common.count("DataOrientation") ? common.at("DataOrientation") : "MULTIPLEXED";
  if (orientation != "MULTIPLEXED") throw Error(Errc::unsupported_binary_format, "DataOrientation=" + orientation);
  const std::string binary_format = key(section(ini, "Binary Infos", vhdr), "BinaryFormat", "Binary Infos");
  std::size_t sample_bytes = 0;
  if (binary_format == "IEEE_FLOAT_32") {
    sample_bytes = 4;
  } else if (binary_format == "INT_16") {
    sample_bytes = 2;
  } else {
    throw Error(Errc::unsupported_binary_format, "BinaryFormat=" + binary_format);
  }

  const auto nch = static_cast<std::size_t>(number(key(common, "NumberOfChannels", "Common Infos"), "NumberOfChannels"));
  const double interval = number(key(common, "SamplingInterval", "Common Infos"), "SamplingInterval");
  if (nch == 0 || !(interval > 0.0)) {
    throw Error(Errc::invalid_parameter, fmt::format("NumberOfChannels={} SamplingInterval={}", nch, interval));
  }
  const double fs = 1e6 / interval;

  RecordedStream sig;
  sig.name = vhdr.stem().string();
  sig.kind = StreamKind::signal;
  sig.fs = fs;
  std::vector<double> resolution(nch, 1.0);
  for (std::size_t i = 0; i < nch; ++i) {
    const std::string k = fmt::format("Ch{}", i + 1);
    const auto fields = split_fields(key(chinfo, k, "Channel Infos"));
    sig.channel_names.push_back(fields[0]);
    if (fields.size() > 2 && !trim(fields[2]).empty()) resolution[i] = number(trim(fields[2]), k + " resolution");
  }

  const auto dir = vhdr.parent_path();
  const auto data_path = dir / key(common, "DataFile", "Common Infos");
  std::ifstream din(data_path, std::ios::binary);
  if (!din) throw Error(Errc::io_error, "cannot open " + data_path.string());
  const std::vector<char> raw((std::istreambuf_iterator<char>(din)), std::istreambuf_iterator<char>());
  const std::size_t frame = sample_bytes * nch;
  if (raw.size() % frame != 0) {
    throw Error(Errc::file_size_mismatch, fmt::format("{} bytes is not a whole number of {}-channel samples ({} + {} bytes)",
                                                      raw.size(), nch, raw.size() / frame, raw.size() % frame));
  }
  const std::size_t rows = raw.size() / frame;
  if (common.count("DataPoints")) {
    const auto expected = static_cast<std::size_t>(number(common.at("DataPoints"), "DataPoints"));
    if (expected != rows) {
      throw Error(Errc::file_size_mismatch, fmt::format("expected {} samples, file holds {}", expected, rows));
    }
  }
  sig.samples.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(nch));
  for (std::size_t r = 0; r < rows; ++r) {
    sig.timestamps.push_back(static_cast<double>(r) / fs);
    for (std::size_t c = 0; c < nch; ++c) {
      const char* p = raw.data() + r * frame + c * sample_bytes;
      double v = 0.0;
      if (sample_bytes == 4) {
        float f;
        std::memcpy(&f, p, 4);
        v = f;
      } else {
        std::int16_t s;
        std::memcpy(&s, p, 2);
        v = s;
      }
      sig.samples(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v * resolution[c];
    }
  }

  Recording rec;
  rec.format = "brainvision";
  rec.streams.push_back(std::move(sig));

  if (common.count("MarkerFile")) {
    const auto vmrk = dir / common.at("MarkerFile");
    if (!std::filesystem::exists(vmrk)) {
      logger().warn("brainvision: marker file {} not found", vmrk.string());
    } else {
      const Ini mini = read_ini(vmrk);
      const Section& infos = section(mini, "Marker Infos", vmrk);
      RecordedStream mk;
      mk.name = vhdr.stem().string() + "_markers";
      mk.kind = StreamKind::marker;
      mk.channel_names = {"marker"};
      std::vector<std::pair<std::size_t, MarkerEvent>> found;
      for (const auto& [k, v] : infos) {
        if (k.size() < 3 || k.rfind("Mk", 0) != 0) continue;
        const auto fields = split_fields(v);
        if (fields.size() < 3) throw Error(Errc::invalid_parameter, fmt::format("marker {} has {} fields", k, fields.size()));
        MarkerEvent e;
        e.label = fields[1].empty() ? fields[0] : fields[1];
        e.code = trailing_code(fields[1]);
        e.timestamp = number(trim(fields[2]), k + " position") / fs;
        found.emplace_back(static_cast<std::size_t>(number(k.substr(2), "marker number")), std::move(e));
      }
      std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      std::stable_sort(found.begin(), found.end(),
                       [](const auto& a, const auto& b) { return a.second.timestamp < b.second.timestamp; });
      for (auto& [n, e] : found) {
        mk.timestamps.push_back(e.timestamp);
        mk.markers.push_back(std::move(e));
      }
      rec.streams.push_back(std::move(mk));
    }
  }
  return rec;
}

}  // namespace nxs::io
