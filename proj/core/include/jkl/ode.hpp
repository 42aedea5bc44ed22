#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "jkl/network.hpp"

namespace jkl {

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-8;
  double initial_step = 0.0;  // 0: automatic
  std::size_t max_steps = 50'000'000;
};

struct OdeSolution {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

using OdeRhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dydt)>;

/// Dormand-Prince 5(4) from t = 0, landing exactly on every grid time.
/// Throws NumericalError on step-size underflow or a non-finite solution.
OdeSolution integrate_ode(const OdeRhs& f, std::vector<double> y0, const std::vector<double>& grid,
                          const OdeOptions& opts = {});

/// Rate equations x' = -N w(x).
OdeSolution integrate_rre(const ReactionNetwork& net, const std::vector<double>& x0, const std::vector<double>& grid,
                          const OdeOptions& opts = {});

}  // namespace jkl
