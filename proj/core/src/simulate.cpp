#include "jkl/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jkl/error.hpp"
#include "jkl/rng.hpp"

namespace jkl {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::TimeReached: return "time-reached";
    case Termination::EventCap: return "event-cap";
    case Termination::StateCap: return "state-cap";
  }
  return "unknown";
}

namespace {

struct SparseChange {
  std::vector<std::size_t> offset;  // R + 1
  std::vector<std::size_t> species;
  std::vector<std::int64_t> delta;
};

SparseChange sparse_changes(const ReactionNetwork& net) {
  SparseChange sc;
  sc.offset.push_back(0);
  for (const auto& r : net.reactions()) {
    for (std::size_t s = 0; s < r.change.size(); ++s)
      if (r.change[s] != 0) {
        sc.species.push_back(s);
        sc.delta.push_back(r.change[s]);
      }
    sc.offset.push_back(sc.species.size());
  }
  return sc;
}

void check_inputs(const ReactionNetwork& net, const State& x0, const SimConfig& cfg) {
  if (x0.size() != net.species_count()) throw DimensionError("initial state has wrong dimension");
  for (auto v : x0)
    if (v < 0) throw std::invalid_argument("initial state has a negative entry");
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) throw std::invalid_argument("t_end must be positive");
  if (cfg.max_events == 0 || !(cfg.state_cap > 0.0)) throw std::invalid_argument("caps must be positive");
  for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
    if (cfg.grid[i] < 0.0 || cfg.grid[i] > cfg.t_end) throw std::invalid_argument("grid time outside [0, t_end]");
    if (i > 0 && cfg.grid[i] < cfg.grid[i - 1]) throw std::invalid_argument("grid must be non-decreasing");
  }
}

// Shared bookkeeping of the event loop: current state, grid sampling, recording, caps.
class Recorder {
 public:
  Recorder(const ReactionNetwork& net, const State& x0, const SimConfig& cfg)
      : net_(net), cfg_(cfg), changes_(sparse_changes(net)), x_(x0) {
    traj_.dimension = x0.size();
    traj_.initial = x0;
    traj_.grid_data.reserve(cfg.grid.size() * x0.size());
    norm_ = 0;
    for (auto v : x0) norm_ += v;
  }

  const State& x() const { return x_; }

  // Samples the current state at every grid time strictly before t.
  void fill_before(double t) {
    while (gi_ < cfg_.grid.size() && cfg_.grid[gi_] < t) push_grid();
  }

  // Applies channel r at time t. Returns false when a cap stops the run.
  bool fire(std::size_t r, double t) {
    fill_before(t);
    for (std::size_t j = changes_.offset[r]; j < changes_.offset[r + 1]; ++j) {
      auto& v = x_[changes_.species[j]];
      v -= changes_.delta[j];
      norm_ -= changes_.delta[j];
      if (v < 0)
        throw ConservationViolation("reaction '" + net_.reactions()[r].label +
                                    "' fired into a negative count; run validate_network");
    }
    ++traj_.event_count;
    if (cfg_.record_events) {
      traj_.times.push_back(t);
      traj_.state_data.insert(traj_.state_data.end(), x_.begin(), x_.end());
      traj_.channels.push_back(static_cast<std::uint32_t>(r));
    }
    if (static_cast<double>(norm_) > cfg_.state_cap) return finish(Termination::StateCap, t);
    if (traj_.event_count >= cfg_.max_events) return finish(Termination::EventCap, t);
    return true;
  }

  void reach_end() {
    while (gi_ < cfg_.grid.size()) push_grid();
    finish(Termination::TimeReached, cfg_.t_end);
  }

  Trajectory take() { return std::move(traj_); }
  Trajectory& traj() { return traj_; }

 private:
  void push_grid() {
    traj_.grid_data.insert(traj_.grid_data.end(), x_.begin(), x_.end());
    ++gi_;
    traj_.grid_filled = gi_;
  }
  bool finish(Termination why, double t) {
    traj_.termination = why;
    traj_.end_time = t;
    traj_.final_state = x_;
    return false;
  }

  const ReactionNetwork& net_;
  const SimConfig& cfg_;
  SparseChange changes_;
  State x_;
  std::int64_t norm_;
  std::size_t gi_ = 0;
  Trajectory traj_;
};

[[noreturn]] void bad_propensity(const ReactionNetwork& net, std::size_t r) {
  throw NumericalError("propensity of reaction '" + net.reactions()[r].label + "' is not a finite non-negative number");
}

}  // namespace

Trajectory simulate_direct(const ReactionNetwork& net, const State& x0, const SimConfig& cfg) {
  check_inputs(net, x0, cfg);
  Recorder rec(net, x0, cfg);
  RandomStream rng(cfg.seed);
  const std::size_t R = net.reaction_count();
  const auto& rs = net.reactions();
  std::vector<double> cum(R);
  double t = 0.0;
  while (true) {
    double W = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      const double w = rs[r].propensity(rec.x());
      if (!(w >= 0.0) || !std::isfinite(w)) bad_propensity(net, r);
      W += w;
      cum[r] = W;
    }
    if (W <= 0.0) break;
    const double tn = t + rng.exponential() / W;
    if (tn > cfg.t_end) break;
    const double target = (1.0 - rng.uniform()) * W;  // in (0, W]
    std::size_t r = 0;
    while (cum[r] < target) ++r;
    t = tn;
    if (!rec.fire(r, t)) return rec.take();
  }
  rec.reach_end();
  return rec.take();
}

Trajectory simulate_rtc(const ReactionNetwork& net, const State& x0, const SimConfig& cfg) {
  check_inputs(net, x0, cfg);
  Recorder rec(net, x0, cfg);
  const std::size_t R = net.reaction_count();
  const auto& rs = net.reactions();
  std::vector<RandomStream> clocks;
  clocks.reserve(R);
  std::vector<double> internal(R, 0.0), next(R), w(R);
  for (std::size_t r = 0; r < R; ++r) {
    clocks.emplace_back(channel_seed(cfg.seed, r));
    next[r] = clocks[r].exponential();
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  double t = 0.0;
  while (true) {
    double dt = inf;
    std::size_t mu = R;
    for (std::size_t r = 0; r < R; ++r) {
      w[r] = rs[r].propensity(rec.x());
      if (!(w[r] >= 0.0) || !std::isfinite(w[r])) bad_propensity(net, r);
      if (w[r] > 0.0) {
        const double d = (next[r] - internal[r]) / w[r];
        if (d < dt) {
          dt = d;
          mu = r;
        }
      }
    }
    if (mu == R || t + dt > cfg.t_end) {
      const double rest = cfg.t_end - t;
      for (std::size_t r = 0; r < R; ++r) internal[r] += w[r] * rest;
      break;
    }
    t += dt;
    for (std::size_t r = 0; r < R; ++r) internal[r] += w[r] * dt;
    internal[mu] = next[mu];
    next[mu] += clocks[mu].exponential();
    if (!rec.fire(mu, t)) {
      rec.traj().internal_times = internal;
      return rec.take();
    }
  }
  rec.reach_end();
  rec.traj().internal_times = internal;
  return rec.take();
}

ReactionNetwork perturb_network(const ReactionNetwork& net, const PerturbationSpec& pert) {
  std::map<std::string, double> values;
  for (const auto& [name, d] : pert.deltas) {
    auto it = net.parameters().find(name);
    if (it == net.parameters().end()) throw std::invalid_argument("unknown parameter '" + name + "' in perturbation");
    if (!std::isfinite(d) || d < -1.0)
      throw std::invalid_argument("perturbation of '" + name + "' makes the rate negative");
    values[name] = it->second * (1.0 + d);
  }
  return net.with_parameters(values);
}

PerturbationTotals perturbation_totals(const ReactionNetwork& net, const PerturbationSpec& pert) {
  for (const auto& [name, d] : pert.deltas)
    if (!net.parameters().count(name)) throw std::invalid_argument("unknown parameter '" + name + "' in perturbation");
  PerturbationTotals out;
  for (const auto& r : net.reactions()) {
    double d = 0.0;
    if (!r.rate_parameter.empty()) {
      auto it = pert.deltas.find(r.rate_parameter);
      if (it != pert.deltas.end()) d = it->second;
    }
    out.per_reaction.push_back(d);
    if (r.propensity.rate() == 0.0) continue;
    double nn = 0.0;
    for (auto c : r.change) nn += static_cast<double>(c) * static_cast<double>(c);
    out.delta = std::max(out.delta, std::abs(d));
    out.delta_F = std::max(out.delta_F, std::abs(d) * std::sqrt(nn));
  }
  return out;
}

std::pair<Trajectory, Trajectory> simulate_coupled(const ReactionNetwork& net, const State& x0, const State& y0,
                                                   const PerturbationSpec& pert, const SimConfig& cfg) {
  const ReactionNetwork other = pert.deltas.empty() ? net : perturb_network(net, pert);
  return {simulate_rtc(net, x0, cfg), simulate_rtc(other, y0, cfg)};
}

}  // namespace jkl
