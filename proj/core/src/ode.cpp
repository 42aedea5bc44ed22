#include "jkl/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jkl/error.hpp"

namespace jkl {
namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

OdeSolution integrate_ode(const OdeRhs& f, std::vector<double> y, const std::vector<double>& grid,
                          const OdeOptions& opts) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || !std::isfinite(grid[i])) throw std::invalid_argument("ODE grid times must be finite and >= 0");
    if (i > 0 && grid[i] < grid[i - 1]) throw std::invalid_argument("ODE grid must be non-decreasing");
  }
  const std::size_t n = y.size();
  OdeSolution sol;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n);
  double t = 0.0;
  f(t, y, k1);

  auto err_norm = [&](const std::vector<double>& ynew, double h) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      acc += (ei / sc) * (ei / sc);
    }
    return n ? std::sqrt(acc / n) : 0.0;
  };

  double h = opts.initial_step;
  if (h <= 0.0) {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = opts.atol + opts.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = n ? std::sqrt(d0 / n) : 0.0;
    d1 = n ? std::sqrt(d1 / n) : 0.0;
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  }

  std::size_t steps = 0;
  for (double target : grid) {
    while (t < target) {
      if (++steps > opts.max_steps) throw NumericalError("ODE integrator exceeded the step limit");
      bool last = false;
      const double h_free = h;
      if (t + h >= target) {
        h = target - t;
        last = true;
      }
      if (!last && h < 1e-14 * std::max(1.0, std::abs(t))) throw NumericalError("ODE step size underflow (stiff problem?)");
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
      f(t + c2 * h, tmp, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
      f(t + c3 * h, tmp, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      f(t + c4 * h, tmp, k4);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      f(t + c5 * h, tmp, k5);
      for (std::size_t i = 0; i < n; ++i)
        tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      f(t + h, tmp, k6);
      for (std::size_t i = 0; i < n; ++i)
        y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      f(t + h, y5, k7);
      const double err = err_norm(y5, h);
      if (!std::isfinite(err)) {
        ++sol.rejected;
        h *= 0.25;
        continue;
      }
      if (err <= 1.0) {
        t = last ? target : t + h;
        y.swap(y5);
        k1.swap(k7);
        ++sol.accepted;
        for (double v : y)
          if (!std::isfinite(v)) throw NumericalError("ODE solution became non-finite");
        const double fac = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
        h = last ? std::max(h * fac, h_free) : h * fac;
      } else {
        ++sol.rejected;
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      }
    }
    sol.times.push_back(target);
    sol.states.push_back(y);
  }
  return sol;
}

OdeSolution integrate_rre(const ReactionNetwork& net, const std::vector<double>& x0, const std::vector<double>& grid,
                          const OdeOptions& opts) {
  if (x0.size() != net.species_count()) throw DimensionError("initial state has wrong dimension");
  for (double v : x0)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("rate-equation initial state must be finite and >= 0");
  auto rhs = [&net](double, const std::vector<double>& x, std::vector<double>& dx) {
    dx = drift(net, std::span<const double>(x));
  };
  return integrate_ode(rhs, x0, grid, opts);
}

}  // namespace jkl
