#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jkl/network.hpp"
#include "jkl/ode.hpp"
#include "jkl/stability.hpp"

namespace jkl {

struct BoundCurve {
  std::vector<double> times;
  std::vector<double> values;  // +inf past a blow-up asymptote
  std::string formula;
  bool leading_order = false;  // unquantified remainder terms were dropped
  bool lower_bound = false;
  nlohmann::json inputs;
};

/// exp(max(0, x)).
double exp_plus(double x);

/// u0 e^{b t} + B (e^{b t} - 1) / b, with the b -> 0 limit u0 + B t.
double exp_envelope(double u0, double b, double B, double t);

/// E |X_t|_1 <= |x0|_1 e^{a+ t} + A (e^{a+ t} - 1) / a+.
BoundCurve first_moment_curve(const StabilityReport& rep, double x0_norm, const std::vector<double>& grid);

struct EpsilonPolicy {
  std::optional<double> fixed;  // otherwise golden-section over log eps at the grid midpoint
};

/// E |X_t|_1^2 with beta = |(l^T N)^2|_inf gamma + eps + 2 alpha, B = |(l^T N)^2|_inf Gamma + A^2 / eps.
BoundCurve second_moment_curve(const StabilityReport& rep, double x0_norm, const std::vector<double>& grid,
                               const EpsilonPolicy& eps = {});

/// E |X_t|_1^p for integer p > 2.
BoundCurve pth_moment_curve(const StabilityReport& rep, double x0_norm, int p, const std::vector<double>& grid);

/// kappa_p = -(2 alpha + gamma |(l^T N)^2|_inf (p - 1)) if positive, else nullopt.
std::optional<double> asymptotic_check(const StabilityReport& rep, int p);

/// Rate-equation divergence envelope |x0 - y0| exp(int_0^t M + mu |x_s + y_s|_1 ds).
BoundCurve ode_divergence_bound(const ReactionNetwork& net, const StabilityReport& rep, const std::vector<double>& x0,
                                const std::vector<double>& y0, const std::vector<double>& grid,
                                const OdeOptions& opts = {});

/// Leading-order envelope for (E |X_t - Y_t|^2)^{1/2} under different initial data.
BoundCurve initial_perturbation_curve(const StabilityReport& rep, const State& x0, const State& y0,
                                      const std::vector<double>& grid);

enum class CoefficientVariant { SmallTime, LargeTime };

CoefficientVariant parse_variant(const std::string& name);

/// Leading-order envelope for (E |X_t - Y_t|^2)^{1/2} under relative rate perturbations.
BoundCurve coefficient_perturbation_curve(const StabilityReport& rep, const State& x0, double delta, double delta_F,
                                          const std::vector<double>& grid, CoefficientVariant variant);

/// Lower bound C3(X0) / (1 - 3 t C3(X0)) on E X(X-1)(X-2) for the cubic birth/decay pair.
BoundCurve cubic_blowup_lowerbound(std::int64_t x0, const std::vector<double>& grid);

/// Lower bound C3(X0) / (1 - 3 kappa t C3(X0)^{1/3})^3 obtained from the exact generator
/// identity d/dt E C3 = 9 E[C3 (X - 4/3)], with kappa = (5/3) / 6^{1/3}.
BoundCurve cubic_blowup_lowerbound_generator(std::int64_t x0, const std::vector<double>& grid);

/// First grid time at which `a` exceeds `b`, if any (crossover of two curves on the same grid).
std::optional<double> crossover_time(const BoundCurve& a, const BoundCurve& b);

}  // namespace jkl
