#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "nxs/select/selection.hpp"
#include "support.hpp"

namespace nxs::select {
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

Chunk named(const SampleTable& t, std::vector<std::string> names) { return test::make_chunk(t, 250, 0.0, names); }

TEST(Select, ProjectionByName) {
  const Chunk c = named(test::random_table(20, 3, 1), {"Fp1", "Cz", "Pz"});
  const Chunk s = select_channels(c, {std::string("Cz")});
  ASSERT_EQ(s.channels(), 1u);
  EXPECT_EQ(s.channel_names[0], "Cz");
  EXPECT_EQ(s.data.col(0), c.data.col(1));
  EXPECT_EQ(s.timestamps, c.timestamps);
}

TEST(Select, IdentityAndPermutation) {
  const Chunk c = named(test::random_table(20, 4, 2), {"C3", "Cz", "C4", "Pz"});
  EXPECT_EQ(select_channels(c, {std::size_t{0}, std::size_t{1}, std::size_t{2}, std::size_t{3}}), c);
  const Chunk a = select_channels(c, {std::string("C3"), std::string("C4")});
  const Chunk b = select_channels(a, {std::string("C4"), std::string("C3")});
  EXPECT_EQ(b.data.col(0), a.data.col(1));
  EXPECT_EQ(b.data.col(1), a.data.col(0));
  EXPECT_EQ(b.channel_names, (std::vector<std::string>{"C4", "C3"}));
}

TEST(Select, Errors) {
  const Chunk c = named(test::random_table(5, 2, 3), {"C3", "C4"});
  EXPECT_EQ(code_of([&] { select_channels(c, {std::string("Oz")}); }), Errc::unknown_channel);
  EXPECT_EQ(code_of([&] { select_channels(c, {std::size_t{2}}); }), Errc::index_out_of_range);
  EXPECT_EQ(code_of([&] { select_channels(c, {std::size_t{0}, std::string("C3")}); }), Errc::invalid_parameter);
}

TEST(Spatial, IdentityAndSum) {
  const Chunk c = named(test::random_table(30, 2, 4), {"a", "b"});
  SpatialMatrix id{Eigen::MatrixXd::Identity(2, 2), {"a", "b"}};
  EXPECT_EQ(spatial_filter(c, id), c);
  SpatialMatrix sum{Eigen::MatrixXd::Ones(1, 2), {"sum"}};
  const Chunk s = spatial_filter(c, sum);
  ASSERT_EQ(s.channels(), 1u);
  for (Eigen::Index r = 0; r < 30; ++r) EXPECT_EQ(s.data(r, 0), c.data(r, 0) + c.data(r, 1));
}

TEST(Spatial, MatchesPerSampleOracle) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(4, 8);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 8; ++j) m(i, j) = g(rng);
  }
  const Chunk c = test::make_chunk(test::random_table(200, 8, 5), 250);
  const Chunk out = spatial_filter(c, SpatialMatrix{m, {"S1", "S2", "S3", "S4"}});
  for (Eigen::Index r = 0; r < 200; ++r) {
    for (Eigen::Index i = 0; i < 4; ++i) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < 8; ++j) acc += m(i, j) * c.data(r, j);
      EXPECT_NEAR(out.data(r, i), acc, 1e-12);
    }
  }
  EXPECT_EQ(code_of([&] { spatial_filter(test::make_chunk(test::random_table(5, 7, 1), 250), SpatialMatrix{m, {"S1", "S2", "S3", "S4"}}); }),
            Errc::dimension_mismatch);
  EXPECT_EQ(code_of([&] { SpatialMatrix{m, {"S1"}}.check(); }), Errc::dimension_mismatch);
}

TEST(Rereference, ReferenceBecomesZeroAndOracle) {
  const Chunk c = named(test::random_table(50, 3, 6), {"C3", "Cz", "C4"});
  const Chunk r = rereference(c, std::string("Cz"));
  EXPECT_TRUE((r.data.col(1).array() == 0.0).all());
  for (Eigen::Index i = 0; i < 50; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_EQ(r.data(i, j), c.data(i, j) - c.data(i, 1));
  }
  SampleTable same(10, 3);
  for (Eigen::Index i = 0; i < 10; ++i) same.row(i).setConstant(static_cast<double>(i));
  EXPECT_TRUE((rereference(named(same, {"a", "b", "c"}), std::size_t{2}).data.array() == 0.0).all());
}

TEST(CommonAverage, ZeroRowMeanAndOracle) {
  const Chunk c = test::make_chunk(test::random_table(40, 5, 7), 250);
  const Chunk r = common_average(c);
  for (Eigen::Index i = 0; i < 40; ++i) {
    EXPECT_NEAR(r.data.row(i).sum(), 0.0, 1e-12);
    const double mean = c.data.row(i).mean();
    for (Eigen::Index j = 0; j < 5; ++j) EXPECT_NEAR(r.data(i, j), c.data(i, j) - mean, 1e-12);
  }
  SampleTable flat = SampleTable::Constant(10, 4, 3.25);
  EXPECT_TRUE((common_average(test::make_chunk(flat, 250)).data.array() == 0.0).all());
  EXPECT_EQ(code_of([] { common_average(test::make_chunk(SampleTable::Ones(3, 1), 250)); }), Errc::too_few_channels);
}

TEST(Matrices, EqualTheDirectOperations) {
  const Chunk c = test::make_chunk(test::random_table(60, 6, 8), 250);
  const auto car = common_average_matrix(6, c.channel_names);
  EXPECT_LE((spatial_filter(c, car).data - common_average(c).data).cwiseAbs().maxCoeff(), 1e-12);
  const auto reref = rereference_matrix(6, 3, c.channel_names);
  EXPECT_LE((spatial_filter(c, reref).data - rereference(c, std::size_t{3}).data).cwiseAbs().maxCoeff(), 1e-12);
}

}  // namespace
}  // namespace nxs::select
