#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "jkl/network.hpp"

namespace jkl {

struct Truncation {
  std::vector<std::int64_t> caps;  // per species upper bound; empty or negative entry means uncapped
  std::size_t max_states = 2'000'000;
};

/// Dense numbering of a finite set of lattice states.
class StateIndex {
 public:
  StateIndex() = default;
  StateIndex(std::size_t dimension, Truncation trunc) : dim_(dimension), trunc_(std::move(trunc)) {}

  std::size_t size() const noexcept { return dim_ == 0 ? count_ : data_.size() / dim_; }
  std::size_t dimension() const noexcept { return dim_; }
  const Truncation& truncation() const noexcept { return trunc_; }
  std::span<const std::int64_t> state(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  State state_vector(std::size_t i) const;
  std::optional<std::size_t> find(std::span<const std::int64_t> x) const;
  bool within_caps(std::span<const std::int64_t> x) const;
  /// Inserts x if absent; returns its index.
  std::size_t insert(std::span<const std::int64_t> x);

  /// Two columns: index and the state as a comma-separated tuple.
  void dump(std::ostream& os) const;

 private:
  struct Hash {
    std::size_t operator()(const State& s) const noexcept;
  };
  std::size_t dim_ = 0;
  std::size_t count_ = 0;  // only used when dim_ == 0
  Truncation trunc_;
  std::vector<std::int64_t> data_;
  std::unordered_map<State, std::size_t, Hash> lookup_;
};

/// Breadth-first closure of x0 under reactions with positive propensity, within the caps.
/// Throws NumericalError when more than trunc.max_states states are reachable.
StateIndex enumerate_states(const ReactionNetwork& net, const State& x0, const Truncation& trunc);

/// dp/dt = Q p with Q(i, j) the rate from state j to state i. Column sums are -outflow.
struct GeneratorMatrix {
  Eigen::SparseMatrix<double> Q;
  std::vector<double> outflow;  // rate of leaving the index from each state
  double max_exit_rate = 0.0;   // max_j W(x_j)
};

GeneratorMatrix build_generator(const ReactionNetwork& net, const StateIndex& idx);

struct CmeOptions {
  double tol = 1e-12;
  double defect_threshold = 1e-6;
  double uniformization_limit = 1e6;  // switch to Runge-Kutta when max rate * t exceeds this
};

struct CmeSolution {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> p;
  std::vector<double> defect;       // probability absorbed at the boundary by each time
  std::vector<double> unaccounted;  // series truncation / integration error bound
  bool reliable = true;             // final defect within the threshold
  std::string method;
};

Eigen::VectorXd point_mass(const StateIndex& idx, const State& x);

CmeSolution integrate_cme(const GeneratorMatrix& gen, const Eigen::VectorXd& p0, const std::vector<double>& grid,
                          const CmeOptions& opts = {});

/// exp(Q t) p0 by dense scaling and squaring; only for at most 2000 states.
Eigen::VectorXd dense_reference(const GeneratorMatrix& gen, const Eigen::VectorXd& p0, double t);

struct CmeMoments {
  double mass = 0.0;
  std::vector<double> moment, moment_upper;  // E |X|_1^p, p = 1..p_max
  std::vector<double> mean, mean_upper, var;
  std::vector<double> covariance;  // D x D row-major
};

/// Sums over the index; the upper value adds defect * max of f over the index.
CmeMoments cme_moments(const Eigen::VectorXd& p, const StateIndex& idx, int p_max, double defect);

}  // namespace jkl
