#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "jkl/network.hpp"

namespace jkl {

/// Largest eigenvalue of the symmetric part (B + B^T)/2. Zero for an empty matrix.
double log_norm(const Eigen::MatrixXd& B);

/// The stoichiometric matrix as a dense D x R array.
Eigen::MatrixXd stoichiometric_matrix(const ReactionNetwork& net);

struct WeightSearch {
  std::vector<double> weight;  // min element 1
  bool annihilates = false;    // l^T N_r == 0 on every quadratic column
};

/// Strictly positive l with l^T N_r >= 0 on every quadratic column, preferring
/// l^T N_r == 0. Throws WeightNotFound when no such l exists.
WeightSearch find_weight_vector(const ReactionNetwork& net);

struct DriftConstants {
  double A = 0.0;
  double alpha = 0.0;
};
/// (l, F(x)) <= A + alpha * (l, x) on the non-negative lattice.
DriftConstants drift_constants(const ReactionNetwork& net, std::span<const double> l);

struct OneSidedConstants {
  double M = 0.0;
  double mu = 0.0;
  double M_special = 0.0;   // sum of the per-reaction closed forms
  double M_combined = 0.0;  // log_norm of the full linear Jacobian
};
/// (x-y, F(x)-F(y)) <= (M + mu |x+y|_1) |x-y|^2.
OneSidedConstants one_sided_constants(const ReactionNetwork& net);

struct LipschitzConstants {
  double L = 0.0;
  double lambda = 0.0;
};
/// |w(x)-w(y)|_1 <= (L + lambda |x+y|_1) |x-y|.
LipschitzConstants lipschitz_constants(const ReactionNetwork& net);

struct GrowthConstants {
  double Gamma = 0.0;
  double gamma = 0.0;
};
/// |w(x)|_1 <= Gamma + gamma |x|_1^2.
GrowthConstants growth_constants(const ReactionNetwork& net);

struct RayRow {
  double n = 0.0;
  double x_dot_F = 0.0;
  double one_dot_F = 0.0;
  double F_norm = 0.0;
  double x_norm2_sq = 0.0;
  double x_norm1 = 0.0;
};
/// Drift along x = n * direction for n = 0..n_max.
std::vector<RayRow> ray_diagnostic(const ReactionNetwork& net, std::span<const double> direction, int n_max);

enum class WeightPolicy { Ones, Auto, Explicit };

struct WeightChoice {
  WeightPolicy policy = WeightPolicy::Ones;
  std::vector<double> weight;  // used when policy == Explicit
};

struct ReactionContribution {
  std::string label;
  PropensityKind kind = PropensityKind::Constant;
  double d = 0.0;  // -l^T N_r
  double A = 0.0;
  double alpha = 0.0;
  std::size_t alpha_species = 0;  // meaningful when alpha != 0
  double M = 0.0;
  double mu = 0.0;
  double L = 0.0;
  double lambda = 0.0;
  double Gamma = 0.0;
  double gamma = 0.0;
};

struct StabilityReport {
  double A = 0.0, alpha = 0.0;
  double L = 0.0, lambda = 0.0;
  double Gamma = 0.0, gamma = 0.0;
  double M = 0.0, mu = 0.0;
  double M_special = 0.0, M_combined = 0.0;
  std::vector<double> weight;
  WeightPolicy policy = WeightPolicy::Ones;
  bool weight_annihilates = false;
  double norm_1tN = 0.0;     // max_r |l^T N_r|
  double norm_1tN_sq = 0.0;  // max_r (l^T N_r)^2
  double norm_1tN2 = 0.0;    // max_r sum_s N_{s,r}^2
  std::vector<ReactionContribution> contributions;
};

/// Every constant at once. Throws AnalysisError for order-3 reactions and for
/// weights that leave a quadratic reaction with positive l-drift.
StabilityReport analyze(const ReactionNetwork& net, const WeightChoice& weights = {});

/// (l, x) for the report's weight.
double weighted_norm(const StabilityReport& report, std::span<const std::int64_t> x);

nlohmann::json to_json(const StabilityReport& report);

}  // namespace jkl
