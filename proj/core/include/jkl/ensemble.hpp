#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "jkl/network.hpp"
#include "jkl/simulate.hpp"

namespace jkl {

/// Worker count: JKL_THREADS if set and positive, else hardware concurrency.
unsigned default_thread_count();

/// Runs body(block, begin, end) over fixed blocks of `block_size` indices in [0, n).
/// Block boundaries depend only on n and block_size, so per-block results reduced in
/// block order are independent of `threads`.
void parallel_blocks(std::size_t n, std::size_t block_size, unsigned threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

enum class Method { Direct, NextReaction };

struct EnsembleOptions {
  Method method = Method::Direct;
  std::uint64_t max_events = 100'000'000;
  double state_cap = 1e9;
  unsigned threads = 0;  // 0: default_thread_count()
};

struct MomentRow {
  double time = 0.0;
  std::size_t n = 0;         // trajectories still running at this time
  std::size_t excluded = 0;  // stopped earlier by a cap
  std::vector<double> moment, moment_se;  // E |X|_1^p for p = 1..p_max
  std::vector<double> mean, mean_se, var, var_se;  // per species
  std::vector<double> covariance;                  // D x D, row-major
};

struct MomentTable {
  std::vector<std::string> species;
  int p_max = 0;
  std::vector<MomentRow> rows;
};

MomentTable ensemble_moments(const ReactionNetwork& net, const State& x0, const std::vector<double>& grid, int p_max,
                             std::size_t n, std::uint64_t seed, const EnsembleOptions& opts = {});

struct ObservableRow {
  double time = 0.0;
  std::size_t n = 0, excluded = 0;
  double mean = 0.0, mean_se = 0.0, var = 0.0, var_se = 0.0;
};

using Observable = std::function<double(std::span<const std::int64_t>)>;

/// Mean and variance of a scalar function of the state on the grid, same seeding as ensemble_moments.
std::vector<ObservableRow> ensemble_observable(const ReactionNetwork& net, const State& x0,
                                               const std::vector<double>& grid, const Observable& f, std::size_t n,
                                               std::uint64_t seed, const EnsembleOptions& opts = {});

struct RmsRow {
  double time = 0.0;
  std::size_t n = 0;
  double msd = 0.0, msd_se = 0.0;  // E |X - Y|^2
  double rms = 0.0, rms_se = 0.0;  // sqrt(msd), delta-method error
  std::vector<double> mean_x, mean_y;  // per species
  std::vector<double> se_x, se_y;
};

struct RmsCurve {
  std::vector<std::string> species;
  int component = -1;  // -1: full Euclidean norm, else one species
  std::vector<RmsRow> rows;
};

/// Root-mean-square distance of coupled pairs; `component` restricts the norm to one species.
RmsCurve coupled_rms(const ReactionNetwork& net, const State& x0, const State& y0, const PerturbationSpec& pert,
                     const std::vector<double>& grid, std::size_t n, std::uint64_t seed,
                     const EnsembleOptions& opts = {}, int component = -1);

}  // namespace jkl
