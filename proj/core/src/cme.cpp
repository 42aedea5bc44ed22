#include "jkl/cme.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "jkl/error.hpp"
#include "jkl/ode.hpp"

namespace jkl {

std::size_t StateIndex::Hash::operator()(const State& s) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (auto v : s) h = (h ^ static_cast<std::size_t>(v)) * 0x100000001b3ULL;
  return h;
}

State StateIndex::state_vector(std::size_t i) const {
  auto s = state(i);
  return State(s.begin(), s.end());
}

std::optional<std::size_t> StateIndex::find(std::span<const std::int64_t> x) const {
  if (dim_ == 0) return count_ > 0 ? std::optional<std::size_t>(0) : std::nullopt;
  auto it = lookup_.find(State(x.begin(), x.end()));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

bool StateIndex::within_caps(std::span<const std::int64_t> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0) return false;
    if (i < trunc_.caps.size() && trunc_.caps[i] >= 0 && x[i] > trunc_.caps[i]) return false;
  }
  return true;
}

std::size_t StateIndex::insert(std::span<const std::int64_t> x) {
  if (dim_ == 0) {
    count_ = 1;
    return 0;
  }
  State key(x.begin(), x.end());
  auto [it, fresh] = lookup_.emplace(std::move(key), size());
  if (fresh) data_.insert(data_.end(), x.begin(), x.end());
  return it->second;
}

void StateIndex::dump(std::ostream& os) const {
  for (std::size_t i = 0; i < size(); ++i) {
    os << i << '\t';
    auto s = state(i);
    for (std::size_t d = 0; d < s.size(); ++d) os << (d ? "," : "") << s[d];
    os << '\n';
  }
}

StateIndex enumerate_states(const ReactionNetwork& net, const State& x0, const Truncation& trunc) {
  const std::size_t D = net.species_count();
  if (x0.size() != D) throw DimensionError("initial state has wrong dimension");
  if (!trunc.caps.empty() && trunc.caps.size() != D) throw DimensionError("caps have wrong dimension");
  StateIndex idx(D, trunc);
  if (!idx.within_caps(x0)) throw std::invalid_argument("initial state lies outside the caps");
  idx.insert(x0);
  std::vector<double> w(net.reaction_count());
  State y(D);
  for (std::size_t head = 0; head < idx.size(); ++head) {
    const State x = idx.state_vector(head);
    propensities_into(net, x, w);
    for (std::size_t r = 0; r < w.size(); ++r) {
      if (!(w[r] > 0.0)) continue;
      for (std::size_t d = 0; d < D; ++d) y[d] = x[d] - net.stoich(d, r);
      if (!idx.within_caps(y)) continue;
      if (!idx.find(y)) {
        if (idx.size() >= trunc.max_states)
          throw NumericalError("state enumeration exceeds " + std::to_string(trunc.max_states) +
                               " states; tighten the caps");
        idx.insert(y);
      }
    }
    if (D == 0) break;
  }
  return idx;
}

GeneratorMatrix build_generator(const ReactionNetwork& net, const StateIndex& idx) {
  const std::size_t n = idx.size(), D = idx.dimension();
  GeneratorMatrix gen;
  gen.outflow.assign(n, 0.0);
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> w(net.reaction_count());
  State y(D);
  for (std::size_t j = 0; j < n; ++j) {
    const auto x = idx.state(j);
    propensities_into(net, x, w);
    double W = 0.0;
    for (std::size_t r = 0; r < w.size(); ++r) {
      if (!(w[r] > 0.0)) continue;
      W += w[r];
      for (std::size_t d = 0; d < D; ++d) y[d] = x[d] - net.stoich(d, r);
      auto i = idx.within_caps(y) ? idx.find(y) : std::nullopt;
      if (i)
        trip.emplace_back(static_cast<int>(*i), static_cast<int>(j), w[r]);
      else
        gen.outflow[j] += w[r];
    }
    trip.emplace_back(static_cast<int>(j), static_cast<int>(j), -W);
    gen.max_exit_rate = std::max(gen.max_exit_rate, W);
  }
  gen.Q.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  gen.Q.setFromTriplets(trip.begin(), trip.end());
  gen.Q.makeCompressed();
  return gen;
}

Eigen::VectorXd point_mass(const StateIndex& idx, const State& x) {
  auto i = idx.find(x);
  if (!i) throw std::invalid_argument("state is not in the index");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(idx.size()));
  p[static_cast<Eigen::Index>(*i)] = 1.0;
  return p;
}

namespace {

void check_inputs(const GeneratorMatrix& gen, const Eigen::VectorXd& p0, const std::vector<double>& grid) {
  if (p0.size() != gen.Q.cols()) throw DimensionError("probability vector has wrong length");
  if ((p0.array() < 0.0).any() || std::abs(p0.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("initial distribution must be a probability vector");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw std::invalid_argument("CME grid times must be >= 0");
    if (i > 0 && grid[i] < grid[i - 1]) throw std::invalid_argument("CME grid must be non-decreasing");
  }
}

// One uniformization step of length dt. Returns (absorbed, unaccounted) mass.
std::pair<double, double> uniformize(const GeneratorMatrix& gen, Eigen::VectorXd& p, double dt, double tol) {
  const double Lambda = gen.max_exit_rate;
  if (Lambda <= 0.0 || dt <= 0.0) return {0.0, 0.0};
  const double lam = Lambda * dt;
  const double mass0 = p.sum();
  Eigen::SparseMatrix<double> P = gen.Q / Lambda;
  for (Eigen::Index j = 0; j < P.cols(); ++j) P.coeffRef(j, j) += 1.0;
  Eigen::VectorXd v = p, acc = Eigen::VectorXd::Zero(p.size());
  double wsum = 0.0, absorbed = 0.0;
  const double log_lam = std::log(lam);
  for (std::size_t k = 0;; ++k) {
    const double wk = std::exp(-lam + static_cast<double>(k) * log_lam - std::lgamma(static_cast<double>(k) + 1.0));
    if (wk > 0.0) {
      acc += wk * v;
      wsum += wk;
      absorbed += wk * (mass0 - v.sum());
    }
    if (static_cast<double>(k) > lam && 1.0 - wsum <= 1e-2 * tol) break;
    if (k > 10 + static_cast<std::size_t>(lam + 40.0 * std::sqrt(lam) + 100.0)) break;
    v = P * v;
  }
  p = acc;
  return {std::max(0.0, absorbed), std::max(0.0, 1.0 - wsum) * mass0};
}

}  // namespace

CmeSolution integrate_cme(const GeneratorMatrix& gen, const Eigen::VectorXd& p0, const std::vector<double>& grid,
                          const CmeOptions& opts) {
  check_inputs(gen, p0, grid);
  CmeSolution sol;
  const double horizon = grid.empty() ? 0.0 : grid.back();
  const bool unif = gen.max_exit_rate * horizon <= opts.uniformization_limit;
  sol.method = unif ? "uniformization" : "runge-kutta";
  if (unif) {
    Eigen::VectorXd p = p0;
    double t = 0.0, defect = 0.0, lost = 0.0;
    for (double target : grid) {
      auto [absorbed, unaccounted] = uniformize(gen, p, target - t, opts.tol);
      defect += absorbed;
      lost += unaccounted;
      t = target;
      sol.times.push_back(t);
      sol.p.push_back(p);
      sol.defect.push_back(defect);
      sol.unaccounted.push_back(lost);
    }
  } else {
    const std::size_t n = static_cast<std::size_t>(p0.size());
    auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
      Eigen::Map<const Eigen::VectorXd> pv(y.data(), static_cast<Eigen::Index>(n));
      dy.resize(n + 1);
      Eigen::Map<Eigen::VectorXd> dp(dy.data(), static_cast<Eigen::Index>(n));
      dp = gen.Q * pv;
      double out = 0.0;
      for (std::size_t j = 0; j < n; ++j) out += gen.outflow[j] * y[j];
      dy[n] = out;
    };
    std::vector<double> y0(p0.data(), p0.data() + n);
    y0.push_back(0.0);
    OdeOptions o;
    o.rtol = std::max(opts.tol, 1e-12);
    o.atol = std::max(opts.tol, 1e-14);
    const auto ode = integrate_ode(rhs, y0, grid, o);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(ode.states[g].data(), static_cast<Eigen::Index>(n));
      p = p.cwiseMax(0.0);
      const double defect = ode.states[g][n];
      sol.times.push_back(grid[g]);
      sol.defect.push_back(defect);
      sol.unaccounted.push_back(std::abs(1.0 - p.sum() - defect));
      sol.p.push_back(std::move(p));
    }
  }
  sol.reliable = sol.defect.empty() || sol.defect.back() <= opts.defect_threshold;
  return sol;
}

Eigen::VectorXd dense_reference(const GeneratorMatrix& gen, const Eigen::VectorXd& p0, double t) {
  if (gen.Q.rows() > 2000) throw std::invalid_argument("dense matrix exponential limited to 2000 states");
  const Eigen::MatrixXd Q = Eigen::MatrixXd(gen.Q) * t;
  const Eigen::MatrixXd E = Q.exp();
  return E * p0;
}

CmeMoments cme_moments(const Eigen::VectorXd& p, const StateIndex& idx, int p_max, double defect) {
  if (static_cast<std::size_t>(p.size()) != idx.size()) throw DimensionError("distribution does not match the index");
  const std::size_t D = idx.dimension();
  CmeMoments m;
  m.mass = p.sum();
  m.moment.assign(p_max, 0.0);
  std::vector<double> max_moment(p_max, 0.0), max_x(D, 0.0), ex(D, 0.0), exx(D * D, 0.0);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double pi = p[static_cast<Eigen::Index>(i)];
    const auto x = idx.state(i);
    double s = 0.0;
    for (auto v : x) s += static_cast<double>(v);
    double pw = 1.0;
    for (int q = 0; q < p_max; ++q) {
      pw *= s;
      m.moment[q] += pi * pw;
      max_moment[q] = std::max(max_moment[q], pw);
    }
    for (std::size_t d = 0; d < D; ++d) {
      const double xd = static_cast<double>(x[d]);
      ex[d] += pi * xd;
      max_x[d] = std::max(max_x[d], xd);
      for (std::size_t e = 0; e < D; ++e) exx[d * D + e] += pi * xd * static_cast<double>(x[e]);
    }
  }
  for (int q = 0; q < p_max; ++q) m.moment_upper.push_back(m.moment[q] + defect * max_moment[q]);
  for (std::size_t d = 0; d < D; ++d) {
    m.mean.push_back(ex[d]);
    m.mean_upper.push_back(ex[d] + defect * max_x[d]);
    m.var.push_back(exx[d * D + d] - ex[d] * ex[d]);
  }
  for (std::size_t d = 0; d < D; ++d)
    for (std::size_t e = 0; e < D; ++e) m.covariance.push_back(exx[d * D + e] - ex[d] * ex[e]);
  return m;
}

}  // namespace jkl
