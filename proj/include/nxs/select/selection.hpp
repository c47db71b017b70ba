#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nxs/core/params.hpp"
#include "nxs/core/types.hpp"

namespace nxs::select {

/// Zero-based column indices for `selectors` against `names`, in selector
/// order. Throws Errc::unknown_channel, Errc::index_out_of_range, or
/// Errc::invalid_parameter for a channel selected twice.
std::vector<std::size_t> resolve_channels(const std::vector<std::string>& names,
                                          const std::vector<ChannelSelector>& selectors);

std::size_t resolve_channel(const std::vector<std::string>& names, const ChannelSelector& selector);

SampleTable select_columns(const SampleTable& data, const std::vector<std::size_t>& columns);

Chunk select_channels(const Chunk& chunk, const std::vector<ChannelSelector>& spec);

struct SpatialMatrix {
  Eigen::MatrixXd coefficients;  // N_out x N_in
  std::vector<std::string> names;  // N_out output channel names

  /// Checks finiteness and that names match the row count.
  void check() const;
};

/// Every row v becomes m * v. Throws Errc::dimension_mismatch when the
/// column count differs from the channel count.
SampleTable apply_spatial(const SampleTable& data, const SpatialMatrix& m);
Chunk spatial_filter(const Chunk& chunk, const SpatialMatrix& m);

/// Subtracts column `ref` from every column; the reference becomes zeros.
void rereference_inplace(SampleTable& data, std::size_t ref);
Chunk rereference(const Chunk& chunk, const ChannelSelector& ref);

/// Subtracts the cross-channel mean of each row. Errc::too_few_channels
/// below two channels.
void common_average_inplace(SampleTable& data);
Chunk common_average(const Chunk& chunk);

/// Matrices equal to the two re-referencing operations.
SpatialMatrix rereference_matrix(std::size_t channels, std::size_t ref, const std::vector<std::string>& names);
SpatialMatrix common_average_matrix(std::size_t channels, const std::vector<std::string>& names);

}  // namespace nxs::select
