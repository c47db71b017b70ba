#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "nxs/core/types.hpp"

namespace nxs::ml {

/// Linear discriminant model: g_k(x) = w_k . x + b_k for each class k.
struct LdaModel {
  std::vector<std::string> labels;  // sorted; index order is the tie-break order
  std::size_t dim = 0;
  Eigen::MatrixXd weights;  // classes x dim
  Eigen::VectorXd biases;   // classes
  double ridge = 1e-6;
  std::vector<std::string> feature_order;
  std::size_t training_size = 0;

  Eigen::VectorXd discriminants(const Eigen::VectorXd& x) const;
};

/// Fits shared-covariance LDA. Class means mu_k, pooled within-class
/// covariance Sigma (maximum-likelihood, divided by n) plus ridge * I,
/// w_k = Sigma^-1 mu_k and b_k = -mu_k' Sigma^-1 mu_k / 2 + ln(pi_k) with
/// priors from class counts.
///
/// Throws Errc::too_few_samples (no rows, fewer than two labels or an
/// unlabelled row), Errc::dimension_mismatch (ragged rows) or
/// Errc::singular_covariance (ridge == 0 and Sigma not invertible).
LdaModel lda_fit(const Eigen::MatrixXd& x, const std::vector<std::string>& y, double ridge = 1e-6,
                 std::vector<std::string> feature_order = {});
LdaModel lda_fit(const std::vector<FeatureVector>& rows, double ridge = 1e-6);

enum class PredictMode { label, probability };

PredictMode parse_predict_mode(std::string_view name);

struct Prediction {
  std::size_t index = 0;
  std::string label;
  std::vector<double> scores;         // discriminants
  std::vector<double> probabilities;  // softmax of scores
};

/// Argmax of the discriminants (first maximum wins) and their softmax.
/// Throws Errc::dimension_mismatch.
Prediction lda_predict(const LdaModel& model, std::span<const double> x);

/// JSON: {"version": 1, "labels", "dim", "weights", "biases", "ridge",
/// "feature_order", "training_size"}.
std::string model_save(const LdaModel& model);
/// Throws Errc::version_mismatch or Errc::schema_error.
LdaModel model_load(std::string_view text);
void save_model_file(const LdaModel& model, const std::filesystem::path& path);
LdaModel load_model_file(const std::filesystem::path& path);

}  // namespace nxs::ml
