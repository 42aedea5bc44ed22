#include <gtest/gtest.h>

#include <cmath>

#include "jkl/bounds.hpp"
#include "jkl/error.hpp"
#include "jkl/ode.hpp"
#include "jkl/parser.hpp"
#include "jkl/presets.hpp"
#include "jkl/stability.hpp"

using namespace jkl;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
  return g;
}

}  // namespace

TEST(Ode, ExponentialDecay) {
  const auto grid = linspace(0.0, 5.0, 11);
  const auto sol = integrate_ode([](double, const std::vector<double>& y, std::vector<double>& d) { d[0] = -y[0]; },
                                 {1.0}, grid);
  ASSERT_EQ(sol.times, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(sol.states[i][0], std::exp(-grid[i]), 1e-7);
}

TEST(Ode, QuadraticGrowthAndBlowUp) {
  auto f = [](double, const std::vector<double>& y, std::vector<double>& d) { d[0] = y[0] * y[0]; };
  const auto sol = integrate_ode(f, {1.0}, {0.5, 0.9});
  EXPECT_NEAR(sol.states[1][0], 10.0, 1e-5);
  EXPECT_THROW(integrate_ode(f, {1.0}, {2.0}), NumericalError);
}

TEST(Rre, LinearEnzymeRelaxesAndDoubles) {
  const auto net = preset("enzyme-linear").network();
  const auto nominal = integrate_rre(net, {10.0}, {8.0});
  EXPECT_NEAR(nominal.states[0][0], 10.0, 1e-6);
  const auto half = integrate_rre(net.with_parameters({{"kE", 500.0}}), {10.0}, {8.0});
  EXPECT_NEAR(half.states[0][0], 10010.0 / 501.0, 1e-6);
}

TEST(Rre, ReversibleConservesAndEquilibrates) {
  const auto sol = integrate_rre(preset("reversible").network(), {5.0, 5.0, 0.0}, linspace(0.0, 20.0, 21));
  for (const auto& x : sol.states) EXPECT_NEAR(x[0] + x[1] + 2 * x[2], 10.0, 1e-8);
  const auto& last = sol.states.back();
  EXPECT_NEAR(last[2], last[0] * last[1], 1e-6);
}

TEST(Rre, CubicPairHasZeroDrift) {
  const auto sol = integrate_rre(preset("cubic").network(), {10.0}, {0.1, 1.0});
  for (const auto& x : sol.states) EXPECT_DOUBLE_EQ(x[0], 10.0);
}

TEST(Bounds, ExpEnvelopeLimits) {
  EXPECT_DOUBLE_EQ(exp_envelope(2.0, 0.0, 3.0, 1.5), 2.0 + 4.5);
  const double b = 1e-9, t = 2.0;
  const double series = 2.0 * (1 + b * t) + 3.0 * (t + b * t * t / 2);
  EXPECT_NEAR(exp_envelope(2.0, b, 3.0, t), series, 1e-10 * series);
  EXPECT_NEAR(exp_envelope(1.0, -1.0, 1.0, 3.0), std::exp(-3.0) + (1 - std::exp(-3.0)), 1e-14);
  EXPECT_EQ(exp_plus(-4.0), 1.0);
}

TEST(Bounds, FirstMomentBimolIsLinear) {
  const auto rep = analyze(preset("bimol").network());
  const auto c = first_moment_curve(rep, 3.0, linspace(0.0, 1.0, 5));
  for (std::size_t i = 0; i < c.times.size(); ++i) EXPECT_NEAR(c.values[i], 3.0 + 2.0 * c.times[i], 1e-14);
  EXPECT_FALSE(c.leading_order);
}

TEST(Bounds, SecondMomentFixedEpsilon) {
  const auto rep = analyze(preset("bimol").network());
  const auto c = second_moment_curve(rep, 2.0, {0.0, 1.0}, {0.5});
  // nu^2 = 4, gamma = 1/4, Gamma = 2, A = 2.
  const double beta = 4 * 0.25 + 0.5, B = 4 * 2.0 + 4 / 0.5;
  EXPECT_NEAR(c.values[0], 4.0, 1e-14);
  EXPECT_NEAR(c.values[1], 4.0 * std::exp(beta) + B * std::expm1(beta) / beta, 1e-12);
  // The automatic epsilon is optimal at the grid midpoint.
  const auto opt = second_moment_curve(rep, 2.0, {0.0, 0.5, 1.0});
  const auto fixed = second_moment_curve(rep, 2.0, {0.0, 0.5, 1.0}, {0.5});
  EXPECT_LE(opt.values[1], fixed.values[1] + 1e-9);
  EXPECT_THROW(second_moment_curve(rep, 2.0, {1.0}, {0.0}), std::invalid_argument);
}

TEST(Bounds, PthMomentGuards) {
  const auto rep = analyze(preset("bimol").network());
  EXPECT_THROW(pth_moment_curve(rep, 1.0, 2, {1.0}), std::invalid_argument);
  const auto c = pth_moment_curve(rep, 2.0, 3, {0.0});
  EXPECT_DOUBLE_EQ(c.values[0], 8.0);
}

TEST(Bounds, AsymptoticRates) {
  const auto rep = analyze(preset("extended-bimol").network());
  // alpha = -1 and nothing else enters at p = 1.
  ASSERT_TRUE(asymptotic_check(rep, 1).has_value());
  EXPECT_NEAR(*asymptotic_check(rep, 1), 2.0, 1e-12);
  for (int p = 1; p <= 4; ++p) {
    const double kappa = -(2 * rep.alpha + rep.gamma * rep.norm_1tN_sq * (p - 1));
    const auto got = asymptotic_check(rep, p);
    ASSERT_EQ(got.has_value(), kappa > 0) << p;
    if (got) {
      EXPECT_DOUBLE_EQ(*got, kappa);
    }
  }
  EXPECT_THROW(asymptotic_check(rep, 0), std::invalid_argument);
  EXPECT_FALSE(asymptotic_check(analyze(preset("bimol").network()), 1).has_value());
}

TEST(Bounds, InitialPerturbationClosedForm) {
  const auto rep = analyze(preset("bimol").network());
  const auto grid = linspace(0.0, 0.5, 6);
  const State x0 = {3, 1}, y0 = {2, 1};
  const auto c = initial_perturbation_curve(rep, x0, y0, grid);
  const double sigma = 7.0;
  const double rate = rep.M + rep.mu * sigma;
  const double a = rep.norm_1tN2 * (rep.L + rep.lambda * sigma);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const double R = rate == 0.0 ? a * t : a * (1 - std::exp(-rate * t)) / rate;
    EXPECT_NEAR(c.values[i], std::exp(rate * t) * (1.0 + R / 2), 1e-10);
  }
  const auto same = initial_perturbation_curve(rep, x0, x0, grid);
  for (double v : same.values) EXPECT_EQ(v, 0.0);
}

TEST(Bounds, CoefficientCurveVanishesWithPerturbation) {
  const auto rep = analyze(preset("bimol").network());
  const auto grid = linspace(0.0, 0.05, 6);
  const auto small = coefficient_perturbation_curve(rep, {2, 2}, 0.0, 0.0, grid, CoefficientVariant::SmallTime);
  for (double v : small.values) EXPECT_EQ(v, 0.0);
  const auto big = coefficient_perturbation_curve(rep, {2, 2}, 0.1, 0.1, grid, CoefficientVariant::SmallTime);
  EXPECT_EQ(big.values[0], 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_GT(big.values[i], big.values[i - 1]);
  EXPECT_THROW(parse_variant("medium"), std::invalid_argument);
  EXPECT_THROW(coefficient_perturbation_curve(rep, {2, 2}, -0.1, 0.0, grid, CoefficientVariant::LargeTime),
               std::invalid_argument);
}

TEST(Bounds, CubicBlowUpTimes) {
  const auto a = cubic_blowup_lowerbound(3, {0.0});
  EXPECT_NEAR(a.inputs["blowup_time"].get<double>(), 1.0 / 18.0, 1e-15);
  const auto b = cubic_blowup_lowerbound(10, {0.0, 0.5 / 2160.0, 1.0 / 2160.0});
  EXPECT_NEAR(b.inputs["blowup_time"].get<double>(), 1.0 / 2160.0, 1e-18);
  EXPECT_DOUBLE_EQ(b.values[0], 720.0);
  EXPECT_NEAR(b.values[1], 1440.0, 1e-9);
  EXPECT_TRUE(std::isinf(b.values[2]));
  EXPECT_TRUE(b.lower_bound);
  EXPECT_EQ(cubic_blowup_lowerbound(2, {1.0}).values[0], 0.0);

  const auto g = cubic_blowup_lowerbound_generator(10, {0.0, 0.5 / 2160.0});
  const double kappa = (5.0 / 3.0) / std::cbrt(6.0);
  const double den = 1.0 - 3.0 * kappa * (0.5 / 2160.0) * std::cbrt(720.0);
  EXPECT_DOUBLE_EQ(g.values[0], 720.0);
  EXPECT_NEAR(g.values[1], 720.0 / (den * den * den), 1e-9);
}

TEST(Bounds, Crossover) {
  BoundCurve a, b;
  a.times = b.times = {0, 1, 2, 3};
  a.values = {0, 1, 3, 5};
  b.values = {1, 1, 2, 6};
  ASSERT_TRUE(crossover_time(a, b).has_value());
  EXPECT_EQ(*crossover_time(a, b), 2.0);
  b.values = {-1, -1, -1, -1};
  EXPECT_FALSE(crossover_time(a, b).has_value());
  b.times = {0, 1};
  EXPECT_THROW(crossover_time(a, b), std::invalid_argument);
}

TEST(Bounds, OdeDivergenceDominatesRateEquations) {
  const auto net = preset("reversible-open").network();
  const auto rep = analyze(net);
  const auto grid = linspace(0.1, 2.0, 20);
  const std::vector<double> x0 = {5, 5, 0}, y0 = {4, 6, 1};
  const auto c = ode_divergence_bound(net, rep, x0, y0, grid);
  const auto xs = integrate_rre(net, x0, grid), ys = integrate_rre(net, y0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double d = 0.0;
    for (int s = 0; s < 3; ++s) d += std::pow(xs.states[i][s] - ys.states[i][s], 2);
    EXPECT_LE(std::sqrt(d), c.values[i] * (1 + 1e-9));
  }
  const auto zero = ode_divergence_bound(net, rep, x0, x0, grid);
  for (double v : zero.values) EXPECT_EQ(v, 0.0);
}
