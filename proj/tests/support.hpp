#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "nxs/core/node.hpp"
#include "nxs/core/types.hpp"

namespace nxs::test {

/// Regular chunk with timestamps t0 + i/fs.
inline Chunk make_chunk(const SampleTable& data, double fs, double t0 = 0.0, std::vector<std::string> names = {}) {
  Chunk c;
  c.data = data;
  c.sampling_rate = fs;
  c.channel_names = names.empty() ? default_channel_names(static_cast<std::size_t>(data.cols())) : std::move(names);
  for (Eigen::Index i = 0; i < data.rows(); ++i) c.timestamps.push_back(t0 + static_cast<double>(i) / fs);
  return c;
}

inline SampleTable random_table(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  SampleTable t(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = n(rng);
  }
  return t;
}

/// Sine of frequency f on every column.
inline SampleTable sine_table(std::size_t rows, std::size_t cols, double f, double fs, double amplitude = 1.0) {
  SampleTable t(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    const double v = amplitude * std::sin(2.0 * M_PI * f * static_cast<double>(r) / fs);
    for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = v;
  }
  return t;
}

/// Random split of [0, total) into consecutive pieces of size in [lo, hi].
inline std::vector<std::size_t> random_split(std::size_t total, std::mt19937_64& rng, std::size_t lo = 1,
                                             std::size_t hi = 4096) {
  std::vector<std::size_t> sizes;
  std::uniform_int_distribution<std::size_t> d(lo, hi);
  std::size_t used = 0;
  while (used < total) {
    const std::size_t n = std::min(d(rng), total - used);
    sizes.push_back(n);
    used += n;
  }
  return sizes;
}

inline std::vector<Chunk> split_chunk(const Chunk& c, const std::vector<std::size_t>& sizes) {
  std::vector<Chunk> out;
  std::size_t at = 0;
  for (auto n : sizes) {
    out.push_back(slice_rows(c, at, n));
    at += n;
  }
  return out;
}

inline double rms(const SampleTable& t) {
  return t.size() == 0 ? 0.0 : std::sqrt(t.array().square().mean());
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("nxs_test_" + tag + "_" + std::to_string(std::random_device{}()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Source emitting one pre-built chunk per step until the list runs out.
class ListSource final : public Node {
 public:
  ListSource(std::string name, std::vector<Chunk> chunks) : Node(std::move(name)), chunks_(std::move(chunks)) {}
  std::string_view kind() const override { return "ListSource"; }
  std::vector<OutputSlot> output_slots(const InputTypes&) const override { return {{"signal", PortType::signal}}; }
  void update(const StepContext&) override {
    if (next_ < chunks_.size()) output().push(chunks_[next_++]);
  }
  bool exhausted() const override { return next_ >= chunks_.size(); }

 private:
  std::vector<Chunk> chunks_;
  std::size_t next_ = 0;
};

/// Source emitting pre-built markers, one batch per step.
class MarkerSource final : public Node {
 public:
  MarkerSource(std::string name, std::vector<std::vector<MarkerEvent>> batches)
      : Node(std::move(name)), batches_(std::move(batches)) {}
  std::string_view kind() const override { return "MarkerSource"; }
  std::vector<OutputSlot> output_slots(const InputTypes&) const override { return {{"markers", PortType::marker}}; }
  void update(const StepContext&) override {
    if (next_ < batches_.size()) {
      for (const auto& m : batches_[next_]) output().push(m);
      ++next_;
    }
  }
  bool exhausted() const override { return next_ >= batches_.size(); }

 private:
  std::vector<std::vector<MarkerEvent>> batches_;
  std::size_t next_ = 0;
};

/// Collects every item of one port type.
template <class T>
class Collector final : public Node {
 public:
  Collector(std::string name, std::vector<PortType> accepts) : Node(std::move(name)), accepts_(std::move(accepts)) {}
  std::string_view kind() const override { return "Collector"; }
  std::vector<InputSlot> input_slots() const override { return {{"input", accepts_}}; }
  std::vector<OutputSlot> output_slots(const InputTypes&) const override { return {}; }
  void update(const StepContext& ctx) override {
    for (const auto& item : input(0)->items<T>()) {
      items.push_back(item);
      steps.push_back(ctx.step);
    }
  }

  std::vector<T> items;
  std::vector<std::uint64_t> steps;

 private:
  std::vector<PortType> accepts_;
};

}  // namespace nxs::test
