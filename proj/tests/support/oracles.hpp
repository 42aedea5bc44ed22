#pragma once

// Independent reference computations used by the tests. Nothing here calls into the
// library code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace oracle {

/// Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
inline double jacobi_max_eigenvalue(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  double best = a(0, 0);
  for (Eigen::Index i = 1; i < n; ++i) best = std::max(best, a(i, i));
  return best;
}

/// max over random unit vectors u of u^T B u (a lower estimate of the log-norm).
inline double rayleigh_max(const Eigen::MatrixXd& B, int samples, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd u(B.rows());
  for (int s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = g(rng);
    u.normalize();
    best = std::max(best, u.dot(B * u));
  }
  return best;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

/// Critical value of the two-sample KS test at level 1% (asymptotic).
inline double ks_critical_1pct(std::size_t n, std::size_t m) {
  return 1.628 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

/// x (x - 1) ... (x - k + 1).
inline double falling(std::int64_t x, int k) {
  double p = 1.0;
  for (int j = 0; j < k; ++j) p *= static_cast<double>(x - j);
  return x < k ? 0.0 : p;
}

inline double norm1(std::span<const std::int64_t> x) {
  double s = 0.0;
  for (auto v : x) s += static_cast<double>(v);
  return s;
}

}  // namespace oracle
