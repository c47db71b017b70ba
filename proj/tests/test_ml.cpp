#include <cmath>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "nxs/ml/features.hpp"
#include "nxs/ml/lda.hpp"
#include "support.hpp"

namespace nxs::ml {
namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::invalid_parameter;
}

TEST(Lda, ClosedFormTwoClass) {
  // Four points around each mean; ML covariance is 0.5 * I.
  Eigen::MatrixXd x(8, 2);
  x << 1, 0, -1, 0, 0, 1, 0, -1, 3, 0, 1, 0, 2, 1, 2, -1;
  const std::vector<std::string> y{"a", "a", "a", "a", "b", "b", "b", "b"};
  const LdaModel m = lda_fit(x, y, 0.0);
  EXPECT_EQ(m.labels, (std::vector<std::string>{"a", "b"}));
  const Eigen::RowVectorXd dw = m.weights.row(1) - m.weights.row(0);
  EXPECT_NEAR(dw(0), 4.0, 1e-12);
  EXPECT_NEAR(dw(1), 0.0, 1e-12);
  EXPECT_NEAR(m.biases(1) - m.biases(0), -4.0, 1e-12);

  const std::vector<double> mid{1.0, 0.0};
  const auto p = lda_predict(m, mid);
  EXPECT_NEAR(p.probabilities[0], 0.5, 1e-12);
  EXPECT_NEAR(p.probabilities[1], 0.5, 1e-12);
  const std::vector<double> right{2.0, 0.0};
  EXPECT_EQ(lda_predict(m, right).label, "b");
  const std::vector<double> left{0.0, 0.3};
  EXPECT_EQ(lda_predict(m, left).label, "a");
}

/// Independent fit: plain loops, Gauss-Jordan in long double.
struct OracleModel {
  std::vector<std::vector<double>> w;
  std::vector<double> b;
};

OracleModel oracle_fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y, int classes,
                       double ridge) {
  const std::size_t n = x.size(), d = x[0].size();
  std::vector<std::vector<long double>> mu(classes, std::vector<long double>(d, 0));
  std::vector<std::size_t> count(classes, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++count[y[i]];
    for (std::size_t j = 0; j < d; ++j) mu[y[i]][j] += x[i][j];
  }
  for (int k = 0; k < classes; ++k) {
    for (auto& v : mu[k]) v /= static_cast<long double>(count[k]);
  }
  std::vector<std::vector<long double>> a(d, std::vector<long double>(d + classes, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        a[r][c] += (x[i][r] - mu[y[i]][r]) * (x[i][c] - mu[y[i]][c]) / static_cast<long double>(n);
      }
    }
  }
  for (std::size_t r = 0; r < d; ++r) {
    a[r][r] += ridge;
    for (int k = 0; k < classes; ++k) a[r][d + k] = mu[k][r];
  }
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const long double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < d + classes; ++c) a[r][c] -= f * a[col][c];
    }
  }
  OracleModel m;
  for (int k = 0; k < classes; ++k) {
    std::vector<double> w(d);
    long double quad = 0;
    for (std::size_t r = 0; r < d; ++r) {
      w[r] = static_cast<double>(a[r][d + k] / a[r][r]);
      quad += mu[k][r] * (a[r][d + k] / a[r][r]);
    }
    m.w.push_back(w);
    m.b.push_back(static_cast<double>(-quad / 2 + std::log(static_cast<long double>(count[k]) / n)));
  }
  return m;
}

TEST(Lda, MatchesBruteForceOracle) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> dims(1, 8), ks(2, 4);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = dims(rng), k = ks(rng);
    const int n = 10 * d + 5 * k;
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    std::vector<std::string> labels;
    Eigen::MatrixXd x(n, d);
    for (int i = 0; i < n; ++i) {
      const int cls = i % k;
      std::vector<double> r(d);
      for (int j = 0; j < d; ++j) x(i, j) = r[j] = g(rng) + cls * 0.7 * (j % 2 ? 1 : -1);
      rows.push_back(r);
      y.push_back(cls);
      labels.push_back("c" + std::to_string(cls));
    }
    const LdaModel m = lda_fit(x, labels, 1e-6);
    const OracleModel o = oracle_fit(rows, y, k, 1e-6);
    for (int c = 0; c < k; ++c) {
      for (int j = 0; j < d; ++j) EXPECT_NEAR(m.weights(c, j), o.w[c][j], 1e-8 * (1 + std::fabs(o.w[c][j])));
      EXPECT_NEAR(m.biases(c), o.b[c], 1e-8 * (1 + std::fabs(o.b[c])));
    }
  }
}

TEST(Lda, SoftmaxAndArgmaxSweep) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 3.0);
  LdaModel m;
  m.labels = {"a", "b", "c"};
  m.dim = 2;
  m.weights = Eigen::MatrixXd(3, 2);
  m.weights << 1, 0, 0, 1, -1, -1;
  m.biases = Eigen::VectorXd::Zero(3);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> x{g(rng), g(rng)};
    const auto p = lda_predict(m, x);
    double sum = 0.0;
    for (double v : p.probabilities) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    const auto best = std::max_element(p.scores.begin(), p.scores.end()) - p.scores.begin();
    EXPECT_EQ(p.index, static_cast<std::size_t>(best));
    EXPECT_EQ(p.label, m.labels[p.index]);

    LdaModel shifted = m;
    shifted.biases.array() += 123.0;
    const auto q = lda_predict(shifted, x);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(q.probabilities[k], p.probabilities[k], 1e-12);
  }
  // Extreme scores do not overflow.
  const std::vector<double> far{1e6, 0.0};
  const auto p = lda_predict(m, far);
  EXPECT_NEAR(p.probabilities[0], 1.0, 1e-12);
  const std::vector<double> tie{0.0, 0.0};
  EXPECT_EQ(lda_predict(m, tie).index, 0u);
  const std::vector<double> wrong{1.0};
  EXPECT_EQ(code_of([&] { lda_predict(m, wrong); }), Errc::dimension_mismatch);
}

TEST(Lda, SaveLoadRoundTrip) {
  Eigen::MatrixXd x = test::random_table(40, 3, 2);
  std::vector<std::string> y;
  for (int i = 0; i < 40; ++i) y.push_back(i % 2 ? "left" : "right");
  const LdaModel m = lda_fit(x, y, 1e-3, {"f1", "f2", "f3"});
  const LdaModel back = model_load(model_save(m));
  EXPECT_EQ(back.labels, m.labels);
  EXPECT_EQ(back.dim, 3u);
  EXPECT_EQ(back.weights, m.weights);
  EXPECT_EQ(back.biases, m.biases);
  EXPECT_EQ(back.ridge, m.ridge);
  EXPECT_EQ(back.feature_order, m.feature_order);
  EXPECT_EQ(back.training_size, 40u);

  std::string text = model_save(m);
  const auto at = text.find("\"version\"");
  ASSERT_NE(at, std::string::npos);
  std::string future = text;
  future.replace(future.find('1', at), 1, "99");
  EXPECT_EQ(code_of([&] { model_load(future); }), Errc::version_mismatch);
  EXPECT_EQ(code_of([&] { model_load(text.substr(0, text.size() / 2)); }), Errc::schema_error);
  EXPECT_EQ(code_of([] { model_load("{\"dim\": 2}"); }), Errc::schema_error);

  const auto dir = test::temp_dir("model");
  save_model_file(m, dir / "m.json");
  EXPECT_EQ(load_model_file(dir / "m.json").weights, m.weights);
  std::filesystem::remove_all(dir);
  EXPECT_EQ(code_of([] { load_model_file("/nonexistent/m.json"); }), Errc::io_error);
}

TEST(Lda, FitErrors) {
  Eigen::MatrixXd x = test::random_table(10, 2, 1);
  EXPECT_EQ(code_of([&] { lda_fit(x, std::vector<std::string>(10, "a")); }), Errc::too_few_samples);
  EXPECT_EQ(code_of([&] { lda_fit(Eigen::MatrixXd(0, 2), {}); }), Errc::too_few_samples);
  std::vector<std::string> y(10, "a");
  y[3] = "b";
  y[4] = "";
  EXPECT_EQ(code_of([&] { lda_fit(x, y); }), Errc::too_few_samples);
  // Collinear features without ridge.
  Eigen::MatrixXd col(6, 2);
  col << 1, 2, 2, 4, 3, 6, 4, 8, 5, 10, 6, 12;
  EXPECT_EQ(code_of([&] { lda_fit(col, {"a", "b", "a", "b", "a", "b"}, 0.0); }), Errc::singular_covariance);
  EXPECT_NO_THROW(lda_fit(col, {"a", "b", "a", "b", "a", "b"}, 1e-3));
  EXPECT_EQ(parse_predict_mode("probability"), PredictMode::probability);
  EXPECT_THROW(parse_predict_mode("votes"), Error);
}

TEST(Lda, FitFromFeatureVectors) {
  std::vector<FeatureVector> rows;
  for (int i = 0; i < 20; ++i) {
    const double s = i % 2 ? 1.0 : -1.0;
    rows.push_back(FeatureVector{i * 0.1, {s + 0.01 * i, -s}, {"a", "b"}, i % 2 ? "up" : "down"});
  }
  const LdaModel m = lda_fit(rows, 1e-3);
  EXPECT_EQ(m.feature_order, (std::vector<std::string>{"a", "b"}));
  for (const auto& r : rows) EXPECT_EQ(lda_predict(m, r.values).label, r.label);
  rows[3].values.push_back(0.0);
  EXPECT_EQ(code_of([&] { lda_fit(rows, 1e-3); }), Errc::dimension_mismatch);
}

TEST(Aggregate, ConcatenatesInInputOrder) {
  const FeatureVector a{1.0, {1, 2}, {"x", "y"}, ""};
  const FeatureVector b{1.0005, {3}, {"z"}, "left"};
  const auto v = aggregate_features({a, b});
  EXPECT_EQ(v.values, (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(v.names, (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(v.label, "left");
  EXPECT_DOUBLE_EQ(v.timestamp, 1.0);
  EXPECT_EQ(aggregate_features({b, a}).values, (std::vector<double>{3, 1, 2}));

  const FeatureVector late{1.01, {4}, {"w"}, ""};
  EXPECT_EQ(code_of([&] { aggregate_features({a, late}); }), Errc::misaligned_inputs);
  EXPECT_EQ(code_of([] { aggregate_features({}); }), Errc::invalid_parameter);
}

}  // namespace
}  // namespace nxs::ml
