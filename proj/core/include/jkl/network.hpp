#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jkl {

/// Molecule copy numbers, one entry per species.
using State = std::vector<std::int64_t>;

enum class PropensityKind { Constant, Linear, Bilinear, Dimer, MassAction };

std::string_view to_string(PropensityKind kind);

struct ReactantTerm {
  std::size_t species;
  int multiplicity;

  auto operator<=>(const ReactantTerm&) const = default;
};

/// Mass-action rate law k * prod_s x_s (x_s - 1) ... (x_s - nu_s + 1).
///
/// Orders 0..2 are stored under their specific kind; MassAction is used only for
/// order 3, which the simulators accept but the analyzer rejects.
class Propensity {
 public:
  Propensity() = default;

  static Propensity constant(double c);
  static Propensity linear(double k, std::size_t n);
  static Propensity bilinear(double k, std::size_t m, std::size_t n);
  static Propensity dimer(double k, std::size_t n);
  /// Infers the kind from the (unsorted, possibly repeated) reactant multiset.
  static Propensity mass_action(double k, std::vector<ReactantTerm> reactants);

  PropensityKind kind() const noexcept { return kind_; }
  double rate() const noexcept { return rate_; }
  const std::vector<ReactantTerm>& reactants() const noexcept { return reactants_; }
  int order() const noexcept;
  /// Multiplicity of species s in the reactant multiset (0 if absent).
  int multiplicity(std::size_t s) const noexcept;

  Propensity with_rate(double k) const;

  double operator()(std::span<const std::int64_t> x) const noexcept;
  /// Same polynomial evaluated on real arguments (rate equations).
  double evaluate(std::span<const double> x) const noexcept;

  bool operator==(const Propensity&) const = default;

 private:
  PropensityKind kind_ = PropensityKind::Constant;
  double rate_ = 0.0;
  std::vector<ReactantTerm> reactants_;  // sorted by species, merged
};

/// One reaction channel; firing maps x to x - change.
struct Reaction {
  std::string label;
  std::vector<std::int64_t> change;
  Propensity propensity;
  std::string rate_parameter;  // empty when the rate is a literal

  bool operator==(const Reaction&) const = default;
};

struct Diagnostic {
  std::string reaction;
  std::string message;
};

class ReactionNetwork {
 public:
  ReactionNetwork() = default;
  /// Throws DimensionError for duplicate species, wrong column lengths, or reactant
  /// indices out of range. Numeric rate problems are reported by validate_network.
  ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions,
                  std::map<std::string, double> parameters = {});

  std::size_t species_count() const noexcept { return species_.size(); }
  std::size_t reaction_count() const noexcept { return reactions_.size(); }
  const std::vector<std::string>& species() const noexcept { return species_; }
  const std::vector<Reaction>& reactions() const noexcept { return reactions_; }
  const Reaction& reaction(std::size_t r) const { return reactions_.at(r); }
  const std::map<std::string, double>& parameters() const noexcept { return parameters_; }

  /// Index of a species name, or species_count() if absent.
  std::size_t species_index(std::string_view name) const noexcept;
  std::int64_t stoich(std::size_t s, std::size_t r) const { return reactions_[r].change[s]; }
  /// Highest reactant order over all reactions (0 for an empty network).
  int max_order() const noexcept;

  /// Copy with named parameters replaced; reactions bound to them pick up the new rate.
  ReactionNetwork with_parameters(const std::map<std::string, double>& values) const;
  /// Copy with every rate constant multiplied by `factor`, parameters included.
  ReactionNetwork scaled(double factor) const;

  bool operator==(const ReactionNetwork&) const = default;

 private:
  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
  std::map<std::string, double> parameters_;
};

/// One diagnostic per violated requirement: non-finite or negative rates, and
/// reactions that consume more of a species than their propensity requires.
std::vector<Diagnostic> validate_network(const ReactionNetwork& net);

std::vector<double> propensities(const ReactionNetwork& net, std::span<const std::int64_t> x);
/// Allocation-free variant; `out` must have reaction_count() entries.
void propensities_into(const ReactionNetwork& net, std::span<const std::int64_t> x,
                       std::span<double> out);

/// F(x) = -N w(x).
std::vector<double> drift(const ReactionNetwork& net, std::span<const double> x);
std::vector<double> drift(const ReactionNetwork& net, std::span<const std::int64_t> x);

/// x - N_r; throws ConservationViolation if the result has a negative entry.
State apply_reaction(const State& x, const ReactionNetwork& net, std::size_t r);

}  // namespace jkl
