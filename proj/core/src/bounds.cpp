#include "jkl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "jkl/error.hpp"

namespace jkl {
namespace {

void check_grid(const std::vector<double>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i])) throw std::invalid_argument("bound grid times must be finite and >= 0");
    if (i > 0 && grid[i] < grid[i - 1]) throw std::invalid_argument("bound grid must be non-decreasing");
  }
}

BoundCurve make_curve(const std::vector<double>& grid, std::string formula) {
  check_grid(grid);
  BoundCurve c;
  c.times = grid;
  c.values.reserve(grid.size());
  c.formula = std::move(formula);
  return c;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

double norm1(const State& x) {
  double s = 0.0;
  for (auto v : x) s += std::abs(static_cast<double>(v));
  return s;
}

}  // namespace

double exp_plus(double x) { return std::exp(std::max(0.0, x)); }

double exp_envelope(double u0, double b, double B, double t) {
  // (e^{bt} - 1)/b via expm1 stays accurate as b -> 0; the exact limit is t.
  const double growth = b == 0.0 ? t : std::expm1(b * t) / b;
  return u0 * std::exp(b * t) + B * growth;
}

BoundCurve first_moment_curve(const StabilityReport& rep, double x0_norm, const std::vector<double>& grid) {
  auto c = make_curve(grid, "first-moment");
  const double a = std::max(rep.alpha, 0.0);
  for (double t : grid) c.values.push_back(exp_envelope(x0_norm, a, rep.A, t));
  c.inputs = {{"A", rep.A}, {"alpha", rep.alpha}, {"x0_norm", x0_norm}};
  return c;
}

BoundCurve second_moment_curve(const StabilityReport& rep, double x0_norm, const std::vector<double>& grid,
                               const EpsilonPolicy& policy) {
  auto c = make_curve(grid, "second-moment");
  const double nu2 = rep.norm_1tN_sq;
  const double u0 = x0_norm * x0_norm;
  auto beta_of = [&](double eps) { return nu2 * rep.gamma + eps + 2.0 * rep.alpha; };
  auto B_of = [&](double eps) { return nu2 * rep.Gamma + (rep.A == 0.0 ? 0.0 : rep.A * rep.A / eps); };
  auto value = [&](double eps, double t) { return exp_envelope(u0, std::max(beta_of(eps), 0.0), B_of(eps), t); };

  double eps = 0.0;
  if (policy.fixed) {
    eps = *policy.fixed;
    if (!(eps > 0.0) && rep.A != 0.0) throw std::invalid_argument("epsilon must be positive");
  } else if (rep.A != 0.0) {
    const double tm = grid.empty() ? 0.0 : 0.5 * (grid.front() + grid.back());
    if (tm <= 0.0) {
      eps = rep.A;
    } else {
      // Golden-section search over log10(eps) in [-8, 3].
      const double g = (std::sqrt(5.0) - 1.0) / 2.0;
      double lo = -8.0, hi = 3.0;
      double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      double f1 = value(std::pow(10.0, x1), tm), f2 = value(std::pow(10.0, x2), tm);
      for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        if (f1 <= f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - g * (hi - lo);
          f1 = value(std::pow(10.0, x1), tm);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + g * (hi - lo);
          f2 = value(std::pow(10.0, x2), tm);
        }
      }
      eps = std::pow(10.0, 0.5 * (lo + hi));
    }
  }
  for (double t : grid) c.values.push_back(value(eps, t));
  c.inputs = {{"A", rep.A},       {"alpha", rep.alpha}, {"Gamma", rep.Gamma},    {"gamma", rep.gamma},
              {"norm_1tN_sq", nu2}, {"epsilon", eps},     {"beta", beta_of(eps)}, {"B", B_of(eps)},
              {"x0_norm", x0_norm}};
  return c;
}

BoundCurve pth_moment_curve(const StabilityReport& rep, double x0_norm, int p, const std::vector<double>& grid) {
  if (p <= 2) throw std::invalid_argument("p <= 2: use first_moment_curve or second_moment_curve");
  auto c = make_curve(grid, "pth-moment");
  // j-th powers of |l^T N_r| are bounded by the p-th power of max(nu, 1).
  const double nu = rep.norm_1tN > 0.0 ? std::max(rep.norm_1tN, 1.0) : 0.0;
  const double nup = std::pow(nu, p);
  const double comb = std::pow(2.0, p) - 2.0 - p;
  const double beta = (p - 1 + p * rep.alpha) + nup * ((rep.Gamma + rep.gamma) * comb + rep.gamma);
  const double B = std::pow(rep.A, p) + rep.Gamma * nup;
  const double u0 = std::pow(x0_norm, p);
  for (double t : grid) c.values.push_back(exp_envelope(u0, std::max(beta, 0.0), B, t));
  c.inputs = {{"p", p}, {"beta", beta}, {"B", B}, {"norm_1tN", rep.norm_1tN}, {"x0_norm", x0_norm}};
  return c;
}

std::optional<double> asymptotic_check(const StabilityReport& rep, int p) {
  if (p < 1) throw std::invalid_argument("moment order must be at least 1");
  const double kappa = -(2.0 * rep.alpha + rep.gamma * rep.norm_1tN_sq * (p - 1));
  if (kappa > 0.0) return kappa;
  return std::nullopt;
}

BoundCurve ode_divergence_bound(const ReactionNetwork& net, const StabilityReport& rep, const std::vector<double>& x0,
                                const std::vector<double>& y0, const std::vector<double>& grid,
                                const OdeOptions& opts) {
  auto c = make_curve(grid, "ode-divergence");
  if (x0.size() != y0.size()) throw DimensionError("initial states differ in dimension");
  std::vector<double> g;
  g.reserve(grid.size() + 1);
  g.push_back(0.0);
  g.insert(g.end(), grid.begin(), grid.end());
  const auto xs = integrate_rre(net, x0, g, opts);
  const auto ys = integrate_rre(net, y0, g, opts);
  double d0 = 0.0;
  for (std::size_t i = 0; i < x0.size(); ++i) d0 += (x0[i] - y0[i]) * (x0[i] - y0[i]);
  d0 = std::sqrt(d0);
  auto C = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i < x0.size(); ++i) s += std::abs(xs.states[k][i] + ys.states[k][i]);
    return rep.M + rep.mu * s;
  };
  double integral = 0.0, prev = C(0);
  for (std::size_t k = 1; k < g.size(); ++k) {
    const double cur = C(k);
    integral += 0.5 * (g[k] - g[k - 1]) * (prev + cur);
    prev = cur;
    c.values.push_back(d0 * std::exp(integral));
  }
  c.inputs = {{"M", rep.M}, {"mu", rep.mu}, {"x0", x0}, {"y0", y0}};
  return c;
}

BoundCurve initial_perturbation_curve(const StabilityReport& rep, const State& x0, const State& y0,
                                      const std::vector<double>& grid) {
  if (x0.size() != y0.size()) throw DimensionError("initial states differ in dimension");
  auto c = make_curve(grid, "initial-perturbation");
  c.leading_order = true;
  double sigma0 = 0.0, d0 = 0.0;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    sigma0 += std::abs(static_cast<double>(x0[i] + y0[i]));
    const double d = static_cast<double>(x0[i] - y0[i]);
    d0 += d * d;
  }
  d0 = std::sqrt(d0);
  const bool differ = x0 != y0;
  const double Lp = rep.norm_1tN2 * rep.L, lp = rep.norm_1tN2 * rep.lambda;
  const double rate = rep.M + rep.mu * sigma0;
  const double a = Lp + lp * sigma0;
  auto integrand = [&](double s) { return a * std::exp(-rate * s); };
  double R = 0.0, prev = 0.0;
  for (double t : grid) {
    if (differ) R += integrate(integrand, prev, t, 1e-14 * std::max(1.0, a * std::max(t, 1e-300)));
    prev = t;
    c.values.push_back(std::exp(rate * t) * (d0 + (differ ? 0.5 * R : 0.0)));
  }
  c.inputs = {{"M", rep.M}, {"mu", rep.mu}, {"L_prime", Lp}, {"lambda_prime", lp}, {"sigma0", sigma0}, {"d0", d0}};
  return c;
}

CoefficientVariant parse_variant(const std::string& name) {
  if (name == "small-time") return CoefficientVariant::SmallTime;
  if (name == "large-time") return CoefficientVariant::LargeTime;
  throw std::invalid_argument("unknown variant '" + name + "' (expected small-time or large-time)");
}

BoundCurve coefficient_perturbation_curve(const StabilityReport& rep, const State& x0, double delta, double delta_F,
                                          const std::vector<double>& grid, CoefficientVariant variant) {
  if (delta < 0.0 || delta_F < 0.0) throw std::invalid_argument("perturbation sizes must be non-negative");
  const bool small = variant == CoefficientVariant::SmallTime;
  auto c = make_curve(grid, small ? "coefficient-perturbation/small-time" : "coefficient-perturbation/large-time");
  c.leading_order = true;
  const double s0 = norm1(x0);
  const double W0 = rep.Gamma + rep.gamma * s0 * s0;
  const double Lp = rep.norm_1tN2 * rep.L, lp = rep.norm_1tN2 * rep.lambda;
  const double dprime = rep.norm_1tN2 * delta;
  const double root = std::sqrt(dprime * W0);
  const double rate = small ? rep.M + Lp / 2 + (2 * rep.mu + lp) * s0 : rep.M + 2 * rep.mu * s0;
  const double lin = small ? delta_F * W0 : delta_F * W0 + Lp / 2 + lp * s0;
  for (double t : grid) c.values.push_back(exp_plus(rate * t) * (root * std::sqrt(t) + lin * t));
  c.inputs = {{"delta", delta}, {"delta_F", delta_F}, {"delta_prime", dprime}, {"W0", W0},
              {"rate", rate},   {"x0_norm", s0}};
  return c;
}

BoundCurve cubic_blowup_lowerbound(std::int64_t x0, const std::vector<double>& grid) {
  auto c = make_curve(grid, "cubic-blowup");
  c.lower_bound = true;
  const double C3 = x0 >= 3 ? static_cast<double>(x0) * (x0 - 1) * (x0 - 2) : 0.0;
  for (double t : grid) {
    const double den = 1.0 - 3.0 * t * C3;
    c.values.push_back(C3 == 0.0 ? 0.0 : den > 0.0 ? C3 / den : std::numeric_limits<double>::infinity());
  }
  c.inputs = {{"x0", x0}, {"C3", C3}, {"blowup_time", C3 > 0 ? 1.0 / (3.0 * C3) : std::numeric_limits<double>::infinity()}};
  return c;
}

BoundCurve cubic_blowup_lowerbound_generator(std::int64_t x0, const std::vector<double>& grid) {
  auto c = make_curve(grid, "cubic-blowup/generator");
  c.lower_bound = true;
  const double C3 = x0 >= 3 ? static_cast<double>(x0) * (x0 - 1) * (x0 - 2) : 0.0;
  const double kappa = (5.0 / 3.0) / std::cbrt(6.0);
  const double u0 = std::cbrt(C3);
  for (double t : grid) {
    const double den = 1.0 - 3.0 * kappa * t * u0;
    c.values.push_back(C3 == 0.0 ? 0.0 : den > 0.0 ? C3 / (den * den * den) : std::numeric_limits<double>::infinity());
  }
  c.inputs = {{"x0", x0},
              {"C3", C3},
              {"kappa", kappa},
              {"blowup_time", C3 > 0 ? 1.0 / (3.0 * kappa * u0) : std::numeric_limits<double>::infinity()}};
  return c;
}

std::optional<double> crossover_time(const BoundCurve& a, const BoundCurve& b) {
  if (a.times != b.times) throw std::invalid_argument("curves are on different grids");
  bool below = false;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    if (a.values[i] <= b.values[i]) below = true;
    else if (below) return a.times[i];
  }
  return std::nullopt;
}

}  // namespace jkl
