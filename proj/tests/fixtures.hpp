#pragma once

// Hand-assembled byte fixtures shared by the unit tests and the acceptance
// binary. Everything is written byte by byte, independent of the encoders
// under test.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nxs/net/rda.hpp"

namespace nxs::test {

using Bytes = std::vector<std::uint8_t>;

template <class T>
void le(Bytes& b, T v) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  b.insert(b.end(), raw, raw + sizeof(T));
}

inline void cstr(Bytes& b, const std::string& s) {
  b.insert(b.end(), s.begin(), s.end());
  b.push_back(0);
}

inline Bytes text_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

// ---- RDA -------------------------------------------------------------------

inline Bytes rda_message(std::uint32_t type, const Bytes& body) {
  Bytes b(net::kRdaGuid.begin(), net::kRdaGuid.end());
  le<std::uint32_t>(b, static_cast<std::uint32_t>(24 + body.size()));
  le<std::uint32_t>(b, type);
  b.insert(b.end(), body.begin(), body.end());
  return b;
}

/// Start: 2 channels (C3, C4), 2000 us interval, resolutions 0.1 and 0.5.
inline Bytes rda_start_fixture() {
  Bytes body;
  le<std::uint32_t>(body, 2);
  le<double>(body, 2000.0);
  le<double>(body, 0.1);
  le<double>(body, 0.5);
  cstr(body, "C3");
  cstr(body, "C4");
  return rda_message(1, body);
}

/// Data: block 7, 3 points x 2 channels (1..6), one "S  1" marker at position 1.
inline Bytes rda_data_fixture() {
  Bytes body;
  le<std::uint32_t>(body, 7);
  le<std::uint32_t>(body, 3);
  le<std::uint32_t>(body, 1);
  for (float v : {1.0f, 2.0f, 3.0f, 4.0f, 5.0f, 6.0f}) le<float>(body, v);
  le<std::uint32_t>(body, 16 + 9 + 5);
  le<std::uint32_t>(body, 1);
  le<std::uint32_t>(body, 1);
  le<std::int32_t>(body, -1);
  cstr(body, "Stimulus");
  cstr(body, "S  1");
  return rda_message(4, body);
}

// ---- XDF -------------------------------------------------------------------

inline void xdf_chunk(Bytes& file, std::uint16_t tag, const Bytes& content) {
  file.push_back(4);
  le<std::uint32_t>(file, static_cast<std::uint32_t>(content.size() + 2));
  le<std::uint16_t>(file, tag);
  file.insert(file.end(), content.begin(), content.end());
}

inline Bytes xdf_stream_header(std::uint32_t id, const std::string& xml) {
  Bytes c;
  le<std::uint32_t>(c, id);
  const Bytes x = text_bytes(xml);
  c.insert(c.end(), x.begin(), x.end());
  return c;
}

inline const char* kXdfEegHeader =
    "<?xml version=\"1.0\"?><info><name>EEG</name><type>EEG</type><channel_count>2</channel_count>"
    "<nominal_srate>100</nominal_srate><channel_format>float32</channel_format>"
    "<desc><channels><channel><label>C3</label></channel><channel><label>C4</label></channel></channels></desc>"
    "</info>";

inline const char* kXdfMarkerHeader =
    "<?xml version=\"1.0\"?><info><name>Markers</name><channel_count>1</channel_count>"
    "<nominal_srate>0</nominal_srate><channel_format>string</channel_format></info>";

/// EEG stream: five rows at 100 Hz from t = 10, row i = (i, -i/2); only the
/// first sample is stamped. Marker stream: "769" at 10.02, "go" at 10.04.
/// With `with_offset`, a ClockOffset of +0.5 s for the EEG stream.
inline Bytes xdf_fixture(bool with_offset = false) {
  Bytes f = text_bytes("XDF:");
  xdf_chunk(f, 1, text_bytes("<?xml version=\"1.0\"?><info><version>1.0</version></info>"));
  xdf_chunk(f, 2, xdf_stream_header(1, kXdfEegHeader));
  xdf_chunk(f, 2, xdf_stream_header(2, kXdfMarkerHeader));
  Bytes s;
  le<std::uint32_t>(s, 1);
  s.push_back(1);
  s.push_back(5);
  for (int i = 0; i < 5; ++i) {
    if (i == 0) {
      s.push_back(8);
      le<double>(s, 10.0);
    } else {
      s.push_back(0);
    }
    le<float>(s, static_cast<float>(i));
    le<float>(s, static_cast<float>(-i) * 0.5f);
  }
  xdf_chunk(f, 3, s);
  Bytes m;
  le<std::uint32_t>(m, 2);
  m.push_back(1);
  m.push_back(2);
  for (const auto& [t, label] : {std::pair{10.02, std::string("769")}, std::pair{10.04, std::string("go")}}) {
    m.push_back(8);
    le<double>(m, t);
    m.push_back(1);
    m.push_back(static_cast<std::uint8_t>(label.size()));
    m.insert(m.end(), label.begin(), label.end());
  }
  xdf_chunk(f, 3, m);
  if (with_offset) {
    Bytes o;
    le<std::uint32_t>(o, 1);
    le<double>(o, 10.0);
    le<double>(o, 0.5);
    xdf_chunk(f, 4, o);
  }
  return f;
}

// ---- BrainVision -----------------------------------------------------------

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline void write_int16(const std::filesystem::path& p, const std::vector<std::int16_t>& v) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 2));
}

inline std::string vhdr_text(const std::string& binary_format = "INT_16") {
  return "Brain Vision Data Exchange Header File Version 1.0\n"
         "; comment\n"
         "[Common Infos]\n"
         "DataFile=rec.eeg\n"
         "MarkerFile=rec.vmrk\n"
         "DataFormat=BINARY\n"
         "DataOrientation=MULTIPLEXED\n"
         "NumberOfChannels=2\n"
         "SamplingInterval=2000\n"
         "\n"
         "[Binary Infos]\n"
         "BinaryFormat=" +
         binary_format +
         "\n"
         "\n"
         "[Channel Infos]\n"
         "Ch1=Fz,,0.1,µV\n"
         "Ch2=Cz,,0.5,µV\n";
}

/// rec.vhdr/.eeg/.vmrk in `dir`: 1500 INT_16 samples of (100, i % 7) and
/// markers at positions 1, 1000 ("S  1") and 250 ("S 12").
inline std::filesystem::path brainvision_fixture(const std::filesystem::path& dir) {
  write_text(dir / "rec.vhdr", vhdr_text());
  std::vector<std::int16_t> data;
  for (int i = 0; i < 1500; ++i) {
    data.push_back(100);
    data.push_back(static_cast<std::int16_t>(i % 7));
  }
  write_int16(dir / "rec.eeg", data);
  write_text(dir / "rec.vmrk",
             "Brain Vision Data Exchange Marker File, Version 1.0\n"
             "[Marker Infos]\n"
             "Mk1=New Segment,,1,1,0\n"
             "Mk2=Stimulus,S  1,1000,1,0\n"
             "Mk3=Stimulus,S 12,250,1,0\n");
  return dir / "rec.vhdr";
}

}  // namespace nxs::test
