#include <gtest/gtest.h>

#include <cmath>

#include "jkl/cme.hpp"
#include "jkl/error.hpp"
#include "jkl/parser.hpp"
#include "jkl/presets.hpp"

using namespace jkl;

namespace {

double entry(const GeneratorMatrix& g, std::size_t i, std::size_t j) {
  return g.Q.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

}  // namespace

TEST(Cme, ThreeStateReversibleSlice) {
  const auto net = preset("reversible").network();
  const auto idx = enumerate_states(net, {2, 2, 0}, {});
  ASSERT_EQ(idx.size(), 3u);
  const auto i0 = *idx.find(State{2, 2, 0}), i1 = *idx.find(State{1, 1, 1}), i2 = *idx.find(State{0, 0, 2});
  const auto gen = build_generator(net, idx);
  EXPECT_DOUBLE_EQ(entry(gen, i1, i0), 4.0);
  EXPECT_DOUBLE_EQ(entry(gen, i0, i1), 1.0);
  EXPECT_DOUBLE_EQ(entry(gen, i2, i1), 1.0);
  EXPECT_DOUBLE_EQ(entry(gen, i1, i2), 2.0);
  EXPECT_DOUBLE_EQ(entry(gen, i0, i0), -4.0);
  EXPECT_DOUBLE_EQ(entry(gen, i1, i1), -2.0);
  EXPECT_DOUBLE_EQ(entry(gen, i2, i2), -2.0);
  EXPECT_DOUBLE_EQ(gen.max_exit_rate, 4.0);
  for (double o : gen.outflow) EXPECT_EQ(o, 0.0);
}

TEST(Cme, MatchesDenseExponential) {
  const auto net = preset("reversible").network();
  const auto idx = enumerate_states(net, {5, 5, 0}, {});
  const auto gen = build_generator(net, idx);
  const auto p0 = point_mass(idx, {5, 5, 0});
  const std::vector<double> grid = {0.0, 0.5, 1.0, 2.0};
  const auto sol = integrate_cme(gen, p0, grid);
  ASSERT_EQ(sol.p.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto ref = dense_reference(gen, p0, grid[i]);
    EXPECT_LT((sol.p[i] - ref).cwiseAbs().maxCoeff(), 1e-9) << grid[i];
    EXPECT_NEAR(sol.p[i].sum(), 1.0, 1e-10);
  }
  EXPECT_TRUE(sol.reliable);
}

TEST(Cme, ReversibleReachesDetailedBalance) {
  const auto net = preset("reversible").network().with_parameters({{"k1", 0.5}, {"k2", 2.0}});
  const auto idx = enumerate_states(net, {5, 5, 0}, {});
  const auto sol = integrate_cme(build_generator(net, idx), point_mass(idx, {5, 5, 0}), {60.0});
  std::vector<double> pi(6, 1.0);
  for (int c = 0; c < 5; ++c) pi[c + 1] = pi[c] * 0.5 * (5 - c) * (5 - c) / (2.0 * (c + 1));
  double z = 0.0;
  for (double v : pi) z += v;
  for (int c = 0; c <= 5; ++c)
    EXPECT_NEAR(sol.p[0][static_cast<Eigen::Index>(*idx.find(State{5 - c, 5 - c, c}))], pi[c] / z, 1e-8);
}

TEST(Cme, PureBirthTruncation) {
  const auto net = parse_model("species A\n0 -> A @ 1\n");
  Truncation small;
  small.caps = {5};
  const auto idx5 = enumerate_states(net, {0}, small);
  EXPECT_EQ(idx5.size(), 6u);
  const auto gen5 = build_generator(net, idx5);
  EXPECT_DOUBLE_EQ(gen5.outflow[*idx5.find(State{5})], 1.0);
  const auto sol5 = integrate_cme(gen5, point_mass(idx5, {0}), {1.0, 2.0, 4.0});
  for (std::size_t i = 0; i < sol5.times.size(); ++i) {
    const double t = sol5.times[i];
    double tail = 1.0, term = std::exp(-t);
    for (int k = 0; k <= 5; ++k) {
      tail -= term;
      term *= t / (k + 1);
    }
    EXPECT_NEAR(sol5.defect[i], tail, 1e-10);
    EXPECT_NEAR(sol5.p[i].sum() + sol5.defect[i], 1.0, 1e-10);
    if (i > 0) {
      EXPECT_GE(sol5.defect[i], sol5.defect[i - 1]);
    }
  }

  Truncation large;
  large.caps = {60};
  const auto idx = enumerate_states(net, {0}, large);
  const auto sol = integrate_cme(build_generator(net, idx), point_mass(idx, {0}), {1.0, 3.0, 5.0});
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    const auto m = cme_moments(sol.p[i], idx, 1, sol.defect[i]);
    EXPECT_NEAR(m.mean[0], sol.times[i], 1e-9 + sol.defect[i] * 60);
    EXPECT_NEAR(m.var[0], sol.times[i], 1e-8);
    EXPECT_GE(m.moment_upper[0], m.moment[0]);
  }
}

TEST(Cme, MomentsOfKnownDistribution) {
  const auto net = parse_model("species A B\n0 -> A @ 1\n");
  Truncation tr;
  tr.caps = {3, 0};
  const auto idx = enumerate_states(net, {0, 0}, tr);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(idx.size()));
  p[static_cast<Eigen::Index>(*idx.find(State{1, 0}))] = 0.5;
  p[static_cast<Eigen::Index>(*idx.find(State{3, 0}))] = 0.25;
  const auto m = cme_moments(p, idx, 2, 0.25);
  EXPECT_DOUBLE_EQ(m.mass, 0.75);
  EXPECT_DOUBLE_EQ(m.moment[0], 0.5 + 0.75);
  EXPECT_DOUBLE_EQ(m.moment[1], 0.5 + 2.25);
  EXPECT_DOUBLE_EQ(m.moment_upper[0], 1.25 + 0.25 * 3);
  EXPECT_DOUBLE_EQ(m.moment_upper[1], 2.75 + 0.25 * 9);
}

TEST(Cme, CubicFreezesBelowThree) {
  // Both channels need three molecules, so states 1 and 2 are absorbing and 0 is unreachable.
  const auto net = preset("cubic").network();
  Truncation tr;
  tr.caps = {40};
  const auto idx = enumerate_states(net, {10}, tr);
  for (std::size_t i = 0; i < idx.size(); ++i) EXPECT_GE(idx.state(i)[0], 1);
  EXPECT_TRUE(idx.find(State{2}).has_value());
  EXPECT_TRUE(idx.find(State{1}).has_value());
  const auto gen = build_generator(net, idx);
  EXPECT_DOUBLE_EQ(gen.outflow[*idx.find(State{40})], 40.0 * 39 * 38);
}

TEST(Cme, OversizeStateSetThrows) {
  const auto net = preset("bimol").network();
  Truncation tr;
  tr.max_states = 100;
  EXPECT_THROW(enumerate_states(net, {0, 0}, tr), NumericalError);
}

TEST(Cme, StateIndexRoundTrip) {
  StateIndex idx(2, {});
  EXPECT_EQ(idx.insert(State{1, 2}), 0u);
  EXPECT_EQ(idx.insert(State{3, 4}), 1u);
  EXPECT_EQ(idx.insert(State{1, 2}), 0u);
  EXPECT_EQ(idx.state_vector(1), (State{3, 4}));
  EXPECT_FALSE(idx.find(State{0, 0}).has_value());
}
