#include "nxs/select/selection.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nxs/error.hpp"

namespace nxs::select {

std::size_t resolve_channel(const std::vector<std::string>& names, const ChannelSelector& selector) {
  if (const auto* idx = std::get_if<std::size_t>(&selector)) {
    if (*idx >= names.size()) {
      throw Error(Errc::index_out_of_range, fmt::format("channel index {} with {} channels", *idx, names.size()));
    }
    return *idx;
  }
  const auto& name = std::get<std::string>(selector);
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error(Errc::unknown_channel, fmt::format("no channel named '{}'", name));
  return static_cast<std::size_t>(it - names.begin());
}

std::vector<std::size_t> resolve_channels(const std::vector<std::string>& names,
                                          const std::vector<ChannelSelector>& selectors) {
  std::vector<std::size_t> out;
  out.reserve(selectors.size());
  for (const auto& s : selectors) {
    const std::size_t i = resolve_channel(names, s);
    if (std::find(out.begin(), out.end(), i) != out.end()) {
      throw Error(Errc::invalid_parameter, fmt::format("channel '{}' selected twice", names[i]));
    }
    out.push_back(i);
  }
  return out;
}

SampleTable select_columns(const SampleTable& data, const std::vector<std::size_t>& columns) {
  SampleTable out(data.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = data.col(static_cast<Eigen::Index>(columns[j]));
  }
  return out;
}

Chunk select_channels(const Chunk& chunk, const std::vector<ChannelSelector>& spec) {
  const auto cols = resolve_channels(chunk.channel_names, spec);
  Chunk out;
  out.timestamps = chunk.timestamps;
  out.sampling_rate = chunk.sampling_rate;
  out.data = select_columns(chunk.data, cols);
  for (auto c : cols) out.channel_names.push_back(chunk.channel_names[c]);
  return out;
}

void SpatialMatrix::check() const {
  if (coefficients.rows() == 0 || coefficients.cols() == 0) {
    throw Error(Errc::invalid_parameter, "spatial matrix is empty");
  }
  if (!coefficients.allFinite()) throw Error(Errc::invalid_parameter, "spatial matrix has non-finite coefficients");
  if (names.size() != static_cast<std::size_t>(coefficients.rows())) {
    throw Error(Errc::dimension_mismatch,
                fmt::format("{} output names for a matrix with {} rows", names.size(), coefficients.rows()));
  }
}

SampleTable apply_spatial(const SampleTable& data, const SpatialMatrix& m) {
  if (data.cols() != m.coefficients.cols()) {
    throw Error(Errc::dimension_mismatch,
                fmt::format("matrix expects {} channels, input has {}", m.coefficients.cols(), data.cols()));
  }
  // rows of data are samples: (m * v)^T = v^T * m^T
  return data * m.coefficients.transpose();
}

Chunk spatial_filter(const Chunk& chunk, const SpatialMatrix& m) {
  Chunk out;
  out.timestamps = chunk.timestamps;
  out.sampling_rate = chunk.sampling_rate;
  out.data = apply_spatial(chunk.data, m);
  out.channel_names = m.names;
  return out;
}

void rereference_inplace(SampleTable& data, std::size_t ref) {
  if (static_cast<Eigen::Index>(ref) >= data.cols()) {
    throw Error(Errc::index_out_of_range, fmt::format("reference {} with {} channels", ref, data.cols()));
  }
  const Eigen::VectorXd r = data.col(static_cast<Eigen::Index>(ref));
  data.colwise() -= r;
}

Chunk rereference(const Chunk& chunk, const ChannelSelector& ref) {
  Chunk out = chunk;
  rereference_inplace(out.data, resolve_channel(chunk.channel_names, ref));
  return out;
}

void common_average_inplace(SampleTable& data) {
  if (data.cols() < 2) {
    throw Error(Errc::too_few_channels, fmt::format("common average needs >= 2 channels, got {}", data.cols()));
  }
  const Eigen::VectorXd mean = data.rowwise().mean();
  data.colwise() -= mean;
}

Chunk common_average(const Chunk& chunk) {
  Chunk out = chunk;
  common_average_inplace(out.data);
  return out;
}

SpatialMatrix rereference_matrix(std::size_t channels, std::size_t ref, const std::vector<std::string>& names) {
  const auto n = static_cast<Eigen::Index>(channels);
  SpatialMatrix m{Eigen::MatrixXd::Identity(n, n), names};
  m.coefficients.col(static_cast<Eigen::Index>(ref)).array() -= 1.0;
  return m;
}

SpatialMatrix common_average_matrix(std::size_t channels, const std::vector<std::string>& names) {
  const auto n = static_cast<Eigen::Index>(channels);
  SpatialMatrix m{Eigen::MatrixXd::Identity(n, n), names};
  m.coefficients.array() -= 1.0 / static_cast<double>(channels);
  return m;
}

}  // namespace nxs::select
