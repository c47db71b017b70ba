#include "nxs/ml/lda.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <fmt/format.h>
#include <json.hpp>

#include "nxs/error.hpp"
#include "nxs/log.hpp"

namespace nxs::ml {

Eigen::VectorXd LdaModel::discriminants(const Eigen::VectorXd& x) const { return weights * x + biases; }

LdaModel lda_fit(const Eigen::MatrixXd& x, const std::vector<std::string>& y, double ridge,
                 std::vector<std::string> feature_order) {
  if (x.rows() == 0) throw Error(Errc::too_few_samples, "empty training set");
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(Errc::dimension_mismatch, fmt::format("{} rows but {} labels", x.rows(), y.size()));
  }
  if (!(ridge >= 0.0)) throw Error(Errc::invalid_parameter, "ridge must be >= 0");
  std::map<std::string, std::vector<Eigen::Index>> members;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i].empty()) throw Error(Errc::too_few_samples, fmt::format("row {} has no label", i));
    members[y[i]].push_back(static_cast<Eigen::Index>(i));
  }
  if (members.size() < 2) {
    throw Error(Errc::too_few_samples, fmt::format("need >= 2 distinct labels, got {}", members.size()));
  }

  const Eigen::Index d = x.cols();
  const auto n = static_cast<double>(x.rows());
  LdaModel m;
  m.dim = static_cast<std::size_t>(d);
  m.ridge = ridge;
  m.training_size = y.size();
  m.feature_order = std::move(feature_order);
  if (!m.feature_order.empty() && m.feature_order.size() != m.dim) {
    throw Error(Errc::dimension_mismatch, fmt::format("{} feature names for dimension {}", m.feature_order.size(), d));
  }

  Eigen::MatrixXd means(static_cast<Eigen::Index>(members.size()), d);
  Eigen::VectorXd priors(static_cast<Eigen::Index>(members.size()));
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
  Eigen::Index k = 0;
  for (const auto& [label, rows] : members) {
    m.labels.push_back(label);
    if (rows.size() < static_cast<std::size_t>(d) + 1) {
      logger().warn("lda: class '{}' has {} rows for {} features", label, rows.size(), d);
    }
    Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(d);
    for (auto r : rows) mu += x.row(r);
    mu /= static_cast<double>(rows.size());
    for (auto r : rows) {
      const Eigen::RowVectorXd c = x.row(r) - mu;
      sigma += c.transpose() * c;
    }
    means.row(k) = mu;
    priors(k) = static_cast<double>(rows.size()) / n;
    ++k;
  }
  sigma /= n;
  sigma.diagonal().array() += ridge;

  if (ridge == 0.0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sigma);
    if (!lu.isInvertible()) throw Error(Errc::singular_covariance, "pooled covariance is singular; use ridge > 0");
  }
  const Eigen::LDLT<Eigen::MatrixXd> solver(sigma);
  if (solver.info() != Eigen::Success) throw Error(Errc::singular_covariance, "covariance factorisation failed");

  m.weights = solver.solve(means.transpose()).transpose();
  m.biases.resize(means.rows());
  for (Eigen::Index c = 0; c < means.rows(); ++c) {
    m.biases(c) = -0.5 * means.row(c).dot(m.weights.row(c)) + std::log(priors(c));
  }
  if (!m.weights.allFinite() || !m.biases.allFinite()) {
    throw Error(Errc::singular_covariance, "non-finite discriminant coefficients");
  }
  return m;
}

LdaModel lda_fit(const std::vector<FeatureVector>& rows, double ridge) {
  if (rows.empty()) throw Error(Errc::too_few_samples, "empty training set");
  const std::size_t d = rows.front().values.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  std::vector<std::string> y;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].values.size() != d) {
      throw Error(Errc::dimension_mismatch, fmt::format("row {} has {} values, expected {}", i, rows[i].values.size(), d));
    }
    for (std::size_t j = 0; j < d; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].values[j];
    y.push_back(rows[i].label.value_or(""));
  }
  std::vector<std::string> order;
  if (rows.front().names.size() == d) order = rows.front().names;
  return lda_fit(x, y, ridge, std::move(order));
}

PredictMode parse_predict_mode(std::string_view name) {
  if (name == "class") return PredictMode::label;
  if (name == "probability") return PredictMode::probability;
  throw Error(Errc::invalid_parameter, fmt::format("unknown mode '{}' (class, probability)", name));
}

Prediction lda_predict(const LdaModel& model, std::span<const double> x) {
  if (x.size() != model.dim) {
    throw Error(Errc::dimension_mismatch, fmt::format("vector has {} values, model expects {}", x.size(), model.dim));
  }
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd g = model.discriminants(v);
  Prediction p;
  p.scores.assign(g.data(), g.data() + g.size());
  for (Eigen::Index k = 1; k < g.size(); ++k) {
    if (g(k) > g(static_cast<Eigen::Index>(p.index))) p.index = static_cast<std::size_t>(k);
  }
  p.label = model.labels[p.index];
  const double top = g(static_cast<Eigen::Index>(p.index));
  double sum = 0.0;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    p.probabilities.push_back(std::exp(g(k) - top));
    sum += p.probabilities.back();
  }
  for (auto& q : p.probabilities) q /= sum;
  return p;
}

std::string model_save(const LdaModel& m) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["labels"] = m.labels;
  j["dim"] = m.dim;
  auto w = nlohmann::json::array();
  for (Eigen::Index k = 0; k < m.weights.rows(); ++k) {
    std::vector<double> row(m.weights.cols());
    for (Eigen::Index c = 0; c < m.weights.cols(); ++c) row[static_cast<std::size_t>(c)] = m.weights(k, c);
    w.push_back(row);
  }
  j["weights"] = w;
  j["biases"] = std::vector<double>(m.biases.data(), m.biases.data() + m.biases.size());
  j["ridge"] = m.ridge;
  j["feature_order"] = m.feature_order;
  j["training_size"] = m.training_size;
  return j.dump(2) + "\n";
}

LdaModel model_load(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::schema_error, fmt::format("model is not valid JSON: {}", e.what()));
  }
  try {
    if (!j.is_object() || !j.contains("version")) throw Error(Errc::schema_error, "model has no version field");
    const int version = j.at("version").get<int>();
    if (version != 1) throw Error(Errc::version_mismatch, fmt::format("model version {} (supported: 1)", version));
    LdaModel m;
    m.labels = j.at("labels").get<std::vector<std::string>>();
    m.dim = j.at("dim").get<std::size_t>();
    const auto w = j.at("weights").get<std::vector<std::vector<double>>>();
    const auto b = j.at("biases").get<std::vector<double>>();
    m.ridge = j.value("ridge", 0.0);
    m.feature_order = j.value("feature_order", std::vector<std::string>{});
    m.training_size = j.value("training_size", std::size_t{0});
    if (m.labels.size() < 2 || w.size() != m.labels.size() || b.size() != m.labels.size()) {
      throw Error(Errc::schema_error, "labels, weights and biases must describe the same >= 2 classes");
    }
    m.weights.resize(static_cast<Eigen::Index>(w.size()), static_cast<Eigen::Index>(m.dim));
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w[k].size() != m.dim) throw Error(Errc::schema_error, fmt::format("weight row {} has {} values", k, w[k].size()));
      for (std::size_t c = 0; c < m.dim; ++c) m.weights(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = w[k][c];
    }
    m.biases = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::schema_error, fmt::format("model field error: {}", e.what()));
  }
}

void save_model_file(const LdaModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << model_save(model);
  if (!out) throw Error(Errc::io_error, "write failed on " + path.string());
}

LdaModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_load(buf.str());
}

}  // namespace nxs::ml
