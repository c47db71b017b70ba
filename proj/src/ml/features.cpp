#include "nxs/ml/features.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nxs/error.hpp"

namespace nxs::ml {

FeatureVector aggregate_features(const std::vector<FeatureVector>& inputs, double tolerance) {
  if (inputs.empty()) throw Error(Errc::invalid_parameter, "no feature vectors to aggregate");
  FeatureVector out;
  out.timestamp = inputs.front().timestamp;
  bool named = true;
  for (const auto& v : inputs) {
    if (std::abs(v.timestamp - out.timestamp) > tolerance) {
      throw Error(Errc::misaligned_inputs,
                  fmt::format("timestamps {} and {} differ by more than {} s", out.timestamp, v.timestamp, tolerance));
    }
    named = named && v.names.size() == v.values.size();
  }
  for (const auto& v : inputs) {
    out.values.insert(out.values.end(), v.values.begin(), v.values.end());
    if (named) out.names.insert(out.names.end(), v.names.begin(), v.names.end());
    if (!out.label && v.label && !v.label->empty()) out.label = v.label;
  }
  return out;
}

}  // namespace nxs::ml
