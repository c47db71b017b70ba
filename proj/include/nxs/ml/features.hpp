#pragma once

#include <vector>

#include "nxs/core/types.hpp"

namespace nxs::ml {

/// Concatenates vectors in input order (each keeps its own channel order).
/// The result takes the first input's timestamp and the first non-empty
/// label. Throws Errc::misaligned_inputs when any timestamp differs from
/// the first by more than `tolerance` seconds, Errc::invalid_parameter for
/// no inputs.
FeatureVector aggregate_features(const std::vector<FeatureVector>& inputs, double tolerance = 1e-3);

}  // namespace nxs::ml
