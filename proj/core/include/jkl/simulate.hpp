#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jkl/network.hpp"

namespace jkl {

enum class Termination { TimeReached, EventCap, StateCap };

std::string_view to_string(Termination t);

struct SimConfig {
  double t_end = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t max_events = 100'000'000;
  double state_cap = 1e9;     // stop once |x|_1 exceeds this
  std::vector<double> grid;   // optional sample times in [0, t_end], non-decreasing
  bool record_events = true;  // keep every jump; off for ensembles
};

/// Piecewise-constant path. Event i happens at times[i] and leaves the chain in state(i).
struct Trajectory {
  std::size_t dimension = 0;
  State initial;
  std::vector<double> times;
  std::vector<std::int64_t> state_data;  // row-major, one row per event
  std::vector<std::uint32_t> channels;
  std::uint64_t event_count = 0;
  Termination termination = Termination::TimeReached;
  double end_time = 0.0;  // t_end, or the time a cap was hit
  State final_state;
  /// One row per grid time that precedes termination (all of them if t_end was reached).
  std::vector<std::int64_t> grid_data;
  std::size_t grid_filled = 0;
  /// Integrated intensities per channel at end_time (next-reaction method only).
  std::vector<double> internal_times;

  std::span<const std::int64_t> state(std::size_t i) const {
    return {state_data.data() + i * dimension, dimension};
  }
  std::span<const std::int64_t> grid_state(std::size_t g) const {
    return {grid_data.data() + g * dimension, dimension};
  }
  bool operator==(const Trajectory&) const = default;
};

/// Direct method: Exp(W) waiting times, channel by cumulative-sum inversion of one mark.
Trajectory simulate_direct(const ReactionNetwork& net, const State& x0, const SimConfig& cfg);

/// Next-reaction method on per-channel unit-rate Poisson clocks (random time change).
/// Channel r's clock is seeded by channel_seed(cfg.seed, r).
Trajectory simulate_rtc(const ReactionNetwork& net, const State& x0, const SimConfig& cfg);

/// Relative rate perturbations keyed by parameter name: k -> k (1 + delta).
struct PerturbationSpec {
  std::map<std::string, double> deltas;
};

struct PerturbationTotals {
  double delta = 0.0;    // |w - w_delta|_1 <= delta |w|_1
  double delta_F = 0.0;  // |N (w - w_delta)|_2 <= delta_F |w|_1
  std::vector<double> per_reaction;
};

/// Throws std::invalid_argument for unknown names or k (1 + delta) < 0.
ReactionNetwork perturb_network(const ReactionNetwork& net, const PerturbationSpec& pert);
PerturbationTotals perturbation_totals(const ReactionNetwork& net, const PerturbationSpec& pert);

/// Both legs run the next-reaction method on the same per-channel Poisson paths.
std::pair<Trajectory, Trajectory> simulate_coupled(const ReactionNetwork& net, const State& x0, const State& y0,
                                                   const PerturbationSpec& pert, const SimConfig& cfg);

}  // namespace jkl
