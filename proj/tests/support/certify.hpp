#pragma once

// Randomized check of the four growth and Lipschitz inequalities with propensities
// evaluated from the raw reaction data rather than the library's evaluators.

#include <cmath>
#include <random>
#include <vector>

#include "jkl/network.hpp"
#include "jkl/stability.hpp"
#include "oracles.hpp"

namespace oracle {

inline std::vector<double> rates(const jkl::ReactionNetwork& net, const jkl::State& x) {
  std::vector<double> w;
  for (const auto& r : net.reactions()) {
    double v = r.propensity.rate();
    for (const auto& t : r.propensity.reactants()) v *= falling(x[t.species], t.multiplicity);
    w.push_back(v);
  }
  return w;
}

inline std::vector<double> field(const jkl::ReactionNetwork& net, const std::vector<double>& w) {
  std::vector<double> F(net.species_count(), 0.0);
  for (std::size_t r = 0; r < net.reaction_count(); ++r)
    for (std::size_t s = 0; s < net.species_count(); ++s) F[s] -= static_cast<double>(net.stoich(s, r)) * w[r];
  return F;
}

struct Violations {
  int drift = 0, lipschitz = 0, growth = 0, one_sided = 0;
  int total() const { return drift + lipschitz + growth + one_sided; }
};

inline bool exceeds(double lhs, double rhs) { return lhs > rhs + 1e-9 * (1.0 + std::abs(rhs) + std::abs(lhs)); }

/// Samples `pairs` pairs (x, y) with entries in {0..max_coord}.
inline Violations certify(const jkl::ReactionNetwork& net, const jkl::StabilityReport& rep, int pairs, int max_coord,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coord(0, max_coord);
  const std::size_t D = net.species_count();
  Violations v;
  for (int trial = 0; trial < pairs; ++trial) {
    jkl::State x(D), y(D);
    for (auto& e : x) e = coord(rng);
    for (auto& e : y) e = coord(rng);
    // Bias some pairs to be close, where the Lipschitz bounds are tight.
    if (trial % 3 == 0 && D > 0) {
      y = x;
      y[rng() % D] += 1;
    }
    const auto wx = rates(net, x), wy = rates(net, y);
    const auto Fx = field(net, wx), Fy = field(net, wy);
    double lF = 0.0, lx = 0.0, w1 = 0.0, dw = 0.0, dot = 0.0, d2 = 0.0;
    for (std::size_t s = 0; s < D; ++s) {
      lF += rep.weight[s] * Fx[s];
      lx += rep.weight[s] * static_cast<double>(x[s]);
      const double d = static_cast<double>(x[s] - y[s]);
      dot += d * (Fx[s] - Fy[s]);
      d2 += d * d;
    }
    for (std::size_t r = 0; r < wx.size(); ++r) {
      w1 += wx[r];
      dw += std::abs(wx[r] - wy[r]);
    }
    const double nx = norm1(x), nxy = norm1(x) + norm1(y);
    if (exceeds(lF, rep.A + rep.alpha * lx)) ++v.drift;
    if (exceeds(dw, (rep.L + rep.lambda * nxy) * std::sqrt(d2))) ++v.lipschitz;
    if (exceeds(w1, rep.Gamma + rep.gamma * nx * nx)) ++v.growth;
    if (exceeds(dot, (rep.M + rep.mu * nxy) * d2)) ++v.one_sided;
  }
  return v;
}

}  // namespace oracle
