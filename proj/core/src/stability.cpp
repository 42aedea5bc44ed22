#include "jkl/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "jkl/error.hpp"

namespace jkl {
namespace {

bool is_quadratic(const Reaction& r) {
  const auto k = r.propensity.kind();
  return k == PropensityKind::Bilinear || k == PropensityKind::Dimer;
}

void reject_cubic(const ReactionNetwork& net) {
  for (const auto& r : net.reactions())
    if (r.propensity.order() > 2)
      throw AnalysisError(AnalysisError::Code::CubicUnsupported,
                          "reaction '" + r.label + "' has a cubic propensity; growth condition (iii) "
                          "|w(x)|_1 <= Gamma + gamma |x|_1^2 cannot hold, so the analyzer only "
                          "accepts networks of order <= 2 (cubic networks are simulation-only)");
}

double column_norm2(const Reaction& r) {
  double s = 0.0;
  for (auto c : r.change) s += static_cast<double>(c) * static_cast<double>(c);
  return std::sqrt(s);
}

double weighted_change(const Reaction& r, std::span<const double> l) {
  double s = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) s += l[i] * static_cast<double>(r.change[i]);
  return s;
}

// Integer null space of an integer matrix (rows x cols) via fraction-free
// elimination; returns basis vectors with coprime integer entries.
std::vector<std::vector<std::int64_t>> integer_null_space(std::vector<std::vector<std::int64_t>> a,
                                                          std::size_t cols) {
  const std::size_t rows = a.size();
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  auto normalize = [](std::vector<std::int64_t>& row) {
    std::int64_t g = 0;
    for (auto v : row) g = std::gcd(g, v < 0 ? -v : v);
    if (g > 1)
      for (auto& v : row) v /= g;
  };
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    if (a[r][c] < 0)
      for (auto& v : a[r]) v = -v;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const std::int64_t f = a[i][c], piv = a[r][c];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] = a[i][j] * piv - a[r][j] * f;
      normalize(a[i]);
    }
    normalize(a[r]);
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<std::int64_t>> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    // x_f = L, x_{pivot_i} = -a[i][f] * L / a[i][pivot_i] with L the lcm of pivots.
    std::int64_t L = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i)
      if (a[i][f] != 0) L = std::lcm(L, a[i][pivot_col[i]]);
    std::vector<std::int64_t> v(cols, 0);
    v[f] = L;
    for (std::size_t i = 0; i < pivot_col.size(); ++i)
      v[pivot_col[i]] = -a[i][f] * (L / a[i][pivot_col[i]]);
    std::int64_t g = 0;
    for (auto x : v) g = std::gcd(g, x < 0 ? -x : x);
    for (auto& x : v) x /= g;
    basis.push_back(std::move(v));
  }
  return basis;
}

// Hildreth's dual coordinate ascent for min 1/2 |l|^2 subject to g_j^T l >= h_j.
// Returns false when the constraints could not be met.
bool hildreth(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, Eigen::VectorXd& l, const Eigen::MatrixXd* project) {
  const Eigen::Index m = G.rows();
  Eigen::MatrixXd Gp = project ? Eigen::MatrixXd(G * (*project)) : G;
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd diag(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    diag[j] = Gp.row(j).dot(G.row(j));
    if (diag[j] <= 1e-14 && h[j] > 0.0) return false;
  }
  l = Eigen::VectorXd::Zero(G.cols());
  for (int sweep = 0; sweep < 200000; ++sweep) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (diag[j] <= 1e-300) continue;
      const double step = (h[j] - G.row(j).dot(l)) / diag[j];
      const double nl = std::max(0.0, lambda[j] + step);
      const double delta = nl - lambda[j];
      if (delta != 0.0) {
        l += delta * Gp.row(j).transpose();
        lambda[j] = nl;
      }
    }
    // Stop at a KKT point: feasible, and every active multiplier's constraint is tight.
    const Eigen::VectorXd slack = G * l - h;
    double viol = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      viol = std::max(viol, -slack[j]);
      if (lambda[j] > 0.0) viol = std::max(viol, std::abs(slack[j]));
    }
    if (viol <= 1e-12) return true;
    if (!l.allFinite() || lambda.maxCoeff() > 1e12) return false;
  }
  return false;
}

// Snaps a positive vector to small-denominator rationals if the result passes `accept`.
template <class Accept>
bool snap_rational(const Eigen::VectorXd& l, std::vector<double>& out, Accept&& accept) {
  const double lo = l.minCoeff();
  for (std::int64_t q = 1; q <= 2000; ++q) {
    std::vector<std::int64_t> v(l.size());
    bool ok = true;
    for (Eigen::Index i = 0; i < l.size(); ++i) {
      const double t = l[i] / lo * q;
      v[i] = std::llround(t);
      if (std::abs(t - v[i]) > 1e-6 || v[i] <= 0) {
        ok = false;
        break;
      }
    }
    if (!ok || !accept(v)) continue;
    const auto mn = *std::min_element(v.begin(), v.end());
    out.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]) / static_cast<double>(mn);
    return true;
  }
  return false;
}

}  // namespace

double log_norm(const Eigen::MatrixXd& B) {
  if (B.rows() != B.cols()) throw DimensionError("log_norm needs a square matrix");
  if (B.size() == 0) return 0.0;
  if (!B.allFinite()) throw NumericalError("log_norm: matrix has non-finite entries");
  const Eigen::MatrixXd S = 0.5 * (B + B.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("log_norm: eigen solver did not converge");
  return es.eigenvalues().maxCoeff();
}

Eigen::MatrixXd stoichiometric_matrix(const ReactionNetwork& net) {
  Eigen::MatrixXd N(net.species_count(), net.reaction_count());
  for (std::size_t r = 0; r < net.reaction_count(); ++r)
    for (std::size_t s = 0; s < net.species_count(); ++s) N(s, r) = static_cast<double>(net.stoich(s, r));
  return N;
}

WeightSearch find_weight_vector(const ReactionNetwork& net) {
  reject_cubic(net);
  const std::size_t D = net.species_count();
  std::vector<std::size_t> quad;
  for (std::size_t r = 0; r < net.reaction_count(); ++r)
    if (is_quadratic(net.reaction(r))) quad.push_back(r);

  WeightSearch out;
  if (quad.empty()) {
    out.weight.assign(D, 1.0);
    out.annihilates = true;
    return out;
  }

  auto exact_dot = [&](std::size_t r, const std::vector<std::int64_t>& v) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < D; ++i) s += v[i] * net.stoich(i, r);
    return s;
  };

  // Equality form: l in null(N2^T), l >= 1.
  std::vector<std::vector<std::int64_t>> rows;
  for (auto r : quad) rows.push_back(net.reaction(r).change);
  const auto basis = integer_null_space(rows, D);
  if (!basis.empty()) {
    Eigen::MatrixXd Bm(D, basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j)
      for (std::size_t i = 0; i < D; ++i) Bm(i, j) = static_cast<double>(basis[j][i]);
    const Eigen::MatrixXd P = Bm * (Bm.transpose() * Bm).ldlt().solve(Bm.transpose());
    Eigen::VectorXd l;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(D, D);
    if (hildreth(I, Eigen::VectorXd::Ones(D), l, &P)) {
      auto accept = [&](const std::vector<std::int64_t>& v) {
        for (auto r : quad)
          if (exact_dot(r, v) != 0) return false;
        return true;
      };
      if (snap_rational(l, out.weight, accept)) {
        out.annihilates = true;
        return out;
      }
    }
  }

  // Inequality form: N2^T l >= 0, l >= 1.
  Eigen::MatrixXd G(quad.size() + D, D);
  Eigen::VectorXd h(quad.size() + D);
  for (std::size_t j = 0; j < quad.size(); ++j) {
    for (std::size_t i = 0; i < D; ++i) G(j, i) = static_cast<double>(net.stoich(i, quad[j]));
    h[j] = 0.0;
  }
  G.bottomRows(D).setIdentity();
  h.tail(D).setOnes();
  Eigen::VectorXd l;
  if (hildreth(G, h, l, nullptr)) {
    auto accept = [&](const std::vector<std::int64_t>& v) {
      for (auto r : quad)
        if (exact_dot(r, v) < 0) return false;
      return true;
    };
    if (!snap_rational(l, out.weight, accept)) {
      const double mn = l.minCoeff();
      out.weight.assign(l.data(), l.data() + l.size());
      for (auto& v : out.weight) v /= mn;
    }
    out.annihilates = true;
    for (auto r : quad)
      if (weighted_change(net.reaction(r), out.weight) != 0.0) out.annihilates = false;
    return out;
  }

  std::vector<std::size_t> obstructing;
  for (auto r : quad) {
    bool nonpos = true, neg = false;
    for (auto c : net.reaction(r).change) {
      if (c > 0) nonpos = false;
      if (c < 0) neg = true;
    }
    if (nonpos && neg) obstructing.push_back(r);
  }
  if (obstructing.empty()) obstructing = quad;
  std::ostringstream msg;
  msg << "no strictly positive weight vector l with l^T N_r >= 0 on the quadratic reactions; obstructing:";
  for (auto r : obstructing) msg << ' ' << net.reaction(r).label;
  throw WeightNotFound(msg.str(), obstructing);
}

namespace {

struct DriftDetail {
  DriftConstants total;
  std::vector<ReactionContribution> per_reaction;
};

DriftDetail drift_detail(const ReactionNetwork& net, std::span<const double> l) {
  reject_cubic(net);
  const std::size_t D = net.species_count();
  if (l.size() != D) throw DimensionError("weight vector has wrong length");
  for (double v : l)
    if (!(v > 0.0) || !std::isfinite(v))
      throw AnalysisError(AnalysisError::Code::InvalidWeight, "weight vector must be strictly positive");

  DriftDetail out;
  double A = 0.0;
  std::vector<double> c(D, 0.0);
  for (const auto& r : net.reactions()) {
    ReactionContribution rc;
    rc.label = r.label;
    rc.kind = r.propensity.kind();
    rc.d = -weighted_change(r, l);
    const double k = r.propensity.rate();
    double scale = 0.0;
    for (std::size_t i = 0; i < D; ++i) scale += l[i] * std::abs(static_cast<double>(r.change[i]));
    const double tol = 1e-12 * std::max(1.0, scale);
    switch (r.propensity.kind()) {
      case PropensityKind::Constant:
        rc.A = rc.d * k;
        A += rc.A;
        break;
      case PropensityKind::Linear: {
        const auto n = r.propensity.reactants()[0].species;
        rc.alpha = rc.d * k;
        rc.alpha_species = n;
        c[n] += rc.alpha;
        break;
      }
      case PropensityKind::Bilinear:
      case PropensityKind::Dimer:
        if (rc.d > tol && k > 0.0)
          throw AnalysisError(AnalysisError::Code::QuadraticObstruction,
                              "quadratic reaction '" + r.label +
                                  "' increases the weighted mass (l^T N_r < 0); try the automatic weight "
                                  "vector search (find_weight_vector / --weight auto)");
        if (r.propensity.kind() == PropensityKind::Dimer && rc.d < -tol) {
          const auto n = r.propensity.reactants()[0].species;
          rc.alpha = std::abs(rc.d) * k;
          rc.alpha_species = n;
          c[n] += rc.alpha;
        }
        break;
      case PropensityKind::MassAction:
        break;
    }
    out.per_reaction.push_back(std::move(rc));
  }
  out.total.A = std::max(0.0, A);
  double alpha = D == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < D; ++n) alpha = std::max(alpha, c[n] / l[n]);
  out.total.alpha = alpha;
  return out;
}

}  // namespace

DriftConstants drift_constants(const ReactionNetwork& net, std::span<const double> l) {
  return drift_detail(net, l).total;
}

OneSidedConstants one_sided_constants(const ReactionNetwork& net) {
  reject_cubic(net);
  const std::size_t D = net.species_count();
  OneSidedConstants out;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(D, D);
  for (const auto& r : net.reactions()) {
    const double k = r.propensity.rate();
    const double nn = column_norm2(r);
    const auto& re = r.propensity.reactants();
    Eigen::VectorXd Nr(D);
    for (std::size_t i = 0; i < D; ++i) Nr[i] = static_cast<double>(r.change[i]);
    switch (r.propensity.kind()) {
      case PropensityKind::Linear: {
        const auto n = re[0].species;
        out.M_special += k * (-Nr[n] + nn) / 2.0;
        J.col(n) -= k * Nr;
        break;
      }
      case PropensityKind::Bilinear: {
        const auto m = re[0].species, n = re[1].species;
        out.mu += k * std::max(-Nr[m] + nn, -Nr[n] + nn) / 4.0;
        break;
      }
      case PropensityKind::Dimer: {
        const auto n = re[0].species;
        out.mu += k * (-Nr[n] + nn) / 2.0;
        out.M_special += k * (Nr[n] + nn) / 2.0;
        J.col(n) += k * Nr;
        break;
      }
      default:
        break;
    }
  }
  out.M_combined = log_norm(J);
  out.M = std::min(out.M_special, out.M_combined);
  return out;
}

LipschitzConstants lipschitz_constants(const ReactionNetwork& net) {
  reject_cubic(net);
  LipschitzConstants out;
  for (const auto& r : net.reactions()) {
    const double k = r.propensity.rate();
    switch (r.propensity.kind()) {
      case PropensityKind::Linear: out.L += k; break;
      case PropensityKind::Bilinear: out.lambda += k / 2.0; break;
      case PropensityKind::Dimer:
        out.L += k;
        out.lambda += k;
        break;
      default: break;
    }
  }
  return out;
}

GrowthConstants growth_constants(const ReactionNetwork& net) {
  reject_cubic(net);
  GrowthConstants out;
  for (const auto& r : net.reactions()) {
    const double k = r.propensity.rate();
    switch (r.propensity.kind()) {
      case PropensityKind::Constant: out.Gamma += k; break;
      case PropensityKind::Linear: out.gamma += k; break;
      case PropensityKind::Bilinear: out.gamma += k / 4.0; break;
      case PropensityKind::Dimer: out.gamma += k; break;
      default: break;
    }
  }
  return out;
}

std::vector<RayRow> ray_diagnostic(const ReactionNetwork& net, std::span<const double> direction, int n_max) {
  const std::size_t D = net.species_count();
  if (direction.size() != D) throw DimensionError("ray direction has wrong length");
  std::vector<RayRow> rows;
  std::vector<double> x(D);
  for (int n = 0; n <= n_max; ++n) {
    for (std::size_t i = 0; i < D; ++i) x[i] = n * direction[i];
    const auto F = drift(net, std::span<const double>(x));
    RayRow row;
    row.n = n;
    for (std::size_t i = 0; i < D; ++i) {
      row.x_dot_F += x[i] * F[i];
      row.one_dot_F += F[i];
      row.F_norm += F[i] * F[i];
      row.x_norm2_sq += x[i] * x[i];
      row.x_norm1 += std::abs(x[i]);
    }
    row.F_norm = std::sqrt(row.F_norm);
    rows.push_back(row);
  }
  return rows;
}

StabilityReport analyze(const ReactionNetwork& net, const WeightChoice& weights) {
  reject_cubic(net);
  const std::size_t D = net.species_count();
  StabilityReport rep;
  rep.policy = weights.policy;
  switch (weights.policy) {
    case WeightPolicy::Ones: rep.weight.assign(D, 1.0); break;
    case WeightPolicy::Explicit: rep.weight = weights.weight; break;
    case WeightPolicy::Auto: {
      auto ws = find_weight_vector(net);
      rep.weight = std::move(ws.weight);
      break;
    }
  }
  auto dd = drift_detail(net, rep.weight);
  rep.A = dd.total.A;
  rep.alpha = dd.total.alpha;
  rep.contributions = std::move(dd.per_reaction);

  rep.weight_annihilates = true;
  for (std::size_t r = 0; r < net.reaction_count(); ++r) {
    const auto& rx = net.reaction(r);
    const double wc = weighted_change(rx, rep.weight);
    if (is_quadratic(rx) && wc != 0.0) rep.weight_annihilates = false;
    rep.norm_1tN = std::max(rep.norm_1tN, std::abs(wc));
    rep.norm_1tN_sq = std::max(rep.norm_1tN_sq, wc * wc);
    const double cn = column_norm2(rx);
    rep.norm_1tN2 = std::max(rep.norm_1tN2, cn * cn);
  }

  const auto os = one_sided_constants(net);
  rep.M = os.M;
  rep.mu = os.mu;
  rep.M_special = os.M_special;
  rep.M_combined = os.M_combined;
  const auto lc = lipschitz_constants(net);
  rep.L = lc.L;
  rep.lambda = lc.lambda;
  const auto gc = growth_constants(net);
  rep.Gamma = gc.Gamma;
  rep.gamma = gc.gamma;

  // Per-reaction shares of the one-sided, Lipschitz and growth sums.
  for (std::size_t r = 0; r < net.reaction_count(); ++r) {
    const auto& rx = net.reaction(r);
    ReactionNetwork single(net.species(), {Reaction{rx.label, rx.change, rx.propensity, {}}});
    const auto o1 = one_sided_constants(single);
    const auto l1 = lipschitz_constants(single);
    const auto g1 = growth_constants(single);
    auto& rc = rep.contributions[r];
    rc.M = o1.M_special;
    rc.mu = o1.mu;
    rc.L = l1.L;
    rc.lambda = l1.lambda;
    rc.Gamma = g1.Gamma;
    rc.gamma = g1.gamma;
  }
  return rep;
}

double weighted_norm(const StabilityReport& report, std::span<const std::int64_t> x) {
  if (x.size() != report.weight.size()) throw DimensionError("state dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += report.weight[i] * static_cast<double>(x[i]);
  return s;
}

nlohmann::json to_json(const StabilityReport& r) {
  nlohmann::json j;
  j["A"] = r.A;
  j["alpha"] = r.alpha;
  j["L"] = r.L;
  j["lambda"] = r.lambda;
  j["Gamma"] = r.Gamma;
  j["gamma"] = r.gamma;
  j["M"] = r.M;
  j["mu"] = r.mu;
  j["M_special"] = r.M_special;
  j["M_combined"] = r.M_combined;
  j["weight"] = r.weight;
  j["weight_policy"] = r.policy == WeightPolicy::Ones ? "ones" : r.policy == WeightPolicy::Auto ? "auto" : "explicit";
  j["weight_annihilates"] = r.weight_annihilates;
  j["norm_1tN"] = r.norm_1tN;
  j["norm_1tN_sq"] = r.norm_1tN_sq;
  j["norm_1tN2"] = r.norm_1tN2;
  auto& arr = j["contributions"] = nlohmann::json::array();
  for (const auto& c : r.contributions) {
    arr.push_back({{"reaction", c.label},
                   {"kind", std::string(to_string(c.kind))},
                   {"d", c.d},
                   {"A", c.A},
                   {"alpha", c.alpha},
                   {"M", c.M},
                   {"mu", c.mu},
                   {"L", c.L},
                   {"lambda", c.lambda},
                   {"Gamma", c.Gamma},
                   {"gamma", c.gamma}});
  }
  return j;
}

}  // namespace jkl
