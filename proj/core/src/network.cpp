#include "jkl/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "jkl/error.hpp"

namespace jkl {

std::string_view to_string(PropensityKind kind) {
  switch (kind) {
    case PropensityKind::Constant: return "constant";
    case PropensityKind::Linear: return "linear";
    case PropensityKind::Bilinear: return "bilinear";
    case PropensityKind::Dimer: return "dimer";
    case PropensityKind::MassAction: return "mass-action";
  }
  return "unknown";
}

Propensity Propensity::constant(double c) { return mass_action(c, {}); }

Propensity Propensity::linear(double k, std::size_t n) { return mass_action(k, {{n, 1}}); }

Propensity Propensity::bilinear(double k, std::size_t m, std::size_t n) {
  if (m == n) throw std::invalid_argument("bilinear propensity needs two distinct species");
  return mass_action(k, {{m, 1}, {n, 1}});
}

Propensity Propensity::dimer(double k, std::size_t n) { return mass_action(k, {{n, 2}}); }

Propensity Propensity::mass_action(double k, std::vector<ReactantTerm> reactants) {
  std::sort(reactants.begin(), reactants.end());
  std::vector<ReactantTerm> merged;
  for (const auto& t : reactants) {
    if (t.multiplicity < 0) throw std::invalid_argument("negative reactant multiplicity");
    if (t.multiplicity == 0) continue;
    if (!merged.empty() && merged.back().species == t.species)
      merged.back().multiplicity += t.multiplicity;
    else
      merged.push_back(t);
  }
  int order = 0;
  for (const auto& t : merged) order += t.multiplicity;
  if (order > 3) throw std::invalid_argument("reactant order above 3 is not supported");

  Propensity p;
  p.rate_ = k;
  p.reactants_ = std::move(merged);
  if (order == 0)
    p.kind_ = PropensityKind::Constant;
  else if (order == 1)
    p.kind_ = PropensityKind::Linear;
  else if (order == 2)
    p.kind_ = p.reactants_.size() == 2 ? PropensityKind::Bilinear : PropensityKind::Dimer;
  else
    p.kind_ = PropensityKind::MassAction;
  return p;
}

int Propensity::order() const noexcept {
  int o = 0;
  for (const auto& t : reactants_) o += t.multiplicity;
  return o;
}

int Propensity::multiplicity(std::size_t s) const noexcept {
  for (const auto& t : reactants_)
    if (t.species == s) return t.multiplicity;
  return 0;
}

Propensity Propensity::with_rate(double k) const {
  Propensity p = *this;
  p.rate_ = k;
  return p;
}

double Propensity::operator()(std::span<const std::int64_t> x) const noexcept {
  // Falling factorials as exact integer products; states stay far below 2^42 per
  // species, so the int128 product of at most three factors cannot overflow.
  __extension__ __int128 prod = 1;
  for (const auto& t : reactants_) {
    const std::int64_t v = x[t.species];
    for (int j = 0; j < t.multiplicity; ++j) {
      const std::int64_t f = v - j;
      if (f <= 0) return 0.0;
      prod *= f;
    }
  }
  return rate_ * static_cast<double>(prod);
}

double Propensity::evaluate(std::span<const double> x) const noexcept {
  double prod = 1.0;
  for (const auto& t : reactants_) {
    const double v = x[t.species];
    for (int j = 0; j < t.multiplicity; ++j) prod *= v - j;
  }
  return rate_ * prod;
}

ReactionNetwork::ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions,
                                 std::map<std::string, double> parameters)
    : species_(std::move(species)), reactions_(std::move(reactions)), parameters_(std::move(parameters)) {
  std::set<std::string> seen;
  for (const auto& s : species_)
    if (!seen.insert(s).second) throw DimensionError("duplicate species name '" + s + "'");
  for (const auto& r : reactions_) {
    if (r.change.size() != species_.size())
      throw DimensionError("reaction '" + r.label + "' has a stoichiometric column of length " +
                           std::to_string(r.change.size()) + ", expected " +
                           std::to_string(species_.size()));
    for (const auto& t : r.propensity.reactants())
      if (t.species >= species_.size())
        throw DimensionError("reaction '" + r.label + "' references species index " +
                             std::to_string(t.species));
    if (!r.rate_parameter.empty() && !parameters_.count(r.rate_parameter))
      throw DimensionError("reaction '" + r.label + "' uses unknown parameter '" +
                           r.rate_parameter + "'");
  }
}

std::size_t ReactionNetwork::species_index(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < species_.size(); ++i)
    if (species_[i] == name) return i;
  return species_.size();
}

int ReactionNetwork::max_order() const noexcept {
  int o = 0;
  for (const auto& r : reactions_) o = std::max(o, r.propensity.order());
  return o;
}

ReactionNetwork ReactionNetwork::with_parameters(const std::map<std::string, double>& values) const {
  ReactionNetwork out = *this;
  for (const auto& [name, v] : values) {
    auto it = out.parameters_.find(name);
    if (it == out.parameters_.end()) throw std::invalid_argument("unknown parameter '" + name + "'");
    it->second = v;
  }
  for (auto& r : out.reactions_)
    if (!r.rate_parameter.empty()) r.propensity = r.propensity.with_rate(out.parameters_.at(r.rate_parameter));
  return out;
}

ReactionNetwork ReactionNetwork::scaled(double factor) const {
  ReactionNetwork out = *this;
  for (auto& [name, v] : out.parameters_) v *= factor;
  for (auto& r : out.reactions_) r.propensity = r.propensity.with_rate(r.propensity.rate() * factor);
  return out;
}

std::vector<Diagnostic> validate_network(const ReactionNetwork& net) {
  std::vector<Diagnostic> out;
  for (const auto& r : net.reactions()) {
    const double k = r.propensity.rate();
    if (!std::isfinite(k)) {
      out.push_back({r.label, "rate constant is not finite"});
      continue;
    }
    if (k < 0) out.push_back({r.label, "rate constant is negative"});
    if (k == 0) continue;
    for (std::size_t s = 0; s < net.species_count(); ++s) {
      const std::int64_t consumed = r.change[s];
      const int needed = r.propensity.multiplicity(s);
      if (consumed > needed) {
        std::ostringstream msg;
        msg << "consumes " << consumed << " of species '" << net.species()[s]
            << "' but the propensity only requires " << needed
            << "; the reaction can fire into negative counts";
        out.push_back({r.label, msg.str()});
      }
    }
  }
  return out;
}

void propensities_into(const ReactionNetwork& net, std::span<const std::int64_t> x, std::span<double> out) {
  if (x.size() != net.species_count())
    throw DimensionError("state has " + std::to_string(x.size()) + " entries, network has " +
                         std::to_string(net.species_count()) + " species");
  if (out.size() != net.reaction_count()) throw DimensionError("propensity buffer has wrong length");
  const auto& rs = net.reactions();
  for (std::size_t r = 0; r < rs.size(); ++r) out[r] = rs[r].propensity(x);
}

std::vector<double> propensities(const ReactionNetwork& net, std::span<const std::int64_t> x) {
  std::vector<double> w(net.reaction_count());
  propensities_into(net, x, w);
  return w;
}

namespace {

template <class W>
std::vector<double> drift_from(const ReactionNetwork& net, W&& rate) {
  std::vector<double> f(net.species_count(), 0.0);
  for (std::size_t r = 0; r < net.reaction_count(); ++r) {
    const double w = rate(r);
    const auto& c = net.reactions()[r].change;
    for (std::size_t s = 0; s < f.size(); ++s)
      if (c[s] != 0) f[s] -= static_cast<double>(c[s]) * w;
  }
  return f;
}

}  // namespace

std::vector<double> drift(const ReactionNetwork& net, std::span<const double> x) {
  if (x.size() != net.species_count()) throw DimensionError("drift: state dimension mismatch");
  return drift_from(net, [&](std::size_t r) { return net.reactions()[r].propensity.evaluate(x); });
}

std::vector<double> drift(const ReactionNetwork& net, std::span<const std::int64_t> x) {
  const auto w = propensities(net, x);
  return drift_from(net, [&](std::size_t r) { return w[r]; });
}

State apply_reaction(const State& x, const ReactionNetwork& net, std::size_t r) {
  if (x.size() != net.species_count()) throw DimensionError("apply_reaction: state dimension mismatch");
  if (r >= net.reaction_count()) throw DimensionError("apply_reaction: reaction index out of range");
  State y = x;
  const auto& c = net.reactions()[r].change;
  for (std::size_t s = 0; s < y.size(); ++s) {
    y[s] -= c[s];
    if (y[s] < 0)
      throw ConservationViolation("reaction '" + net.reactions()[r].label + "' drives species '" +
                                  net.species()[s] + "' negative");
  }
  return y;
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

}  // namespace jkl
