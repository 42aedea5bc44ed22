#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jkl/bounds.hpp"
#include "jkl/ensemble.hpp"
#include "jkl/ode.hpp"
#include "jkl/stability.hpp"

namespace jkl::cli {

/// Coarse shape test for a noisy curve: bin means must rise by more than `z` combined
/// standard errors overall, never fall by more than `z` between bins, and the last two
/// bins must agree within `z`.
struct ShapeCheck {
  std::vector<double> bin_mean, bin_se;
  bool rises = false;
  bool monotone = false;
  bool plateau = false;
  bool ok() const { return rises && monotone && plateau; }
};
ShapeCheck rises_to_plateau(const std::vector<double>& times, const std::vector<double>& values,
                            const std::vector<double>& se, int bins, double z = 4.0);

struct EnzymeOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  double t_end = 8.0;
  double dt = 0.05;
  double delta = -0.5;           // relative change of alphaE (and of kE in the linear model)
  double plateau_fraction = 0.25;  // trailing part of the horizon averaged for the ratios
  double designed_mean = 10.0;     // steady-state <C> the rates were chosen for
  int shape_bins = 8;
  unsigned threads = 0;
};

struct EnzymeResult {
  std::vector<double> grid;
  OdeSolution ode, ode_perturbed, linear, linear_perturbed;
  RmsCurve rms;  // component C
  StabilityReport report, report_linear;
  BoundCurve coeff_small, coeff_large;
  double ode_ratio = 0.0, linear_ratio = 0.0;
  double plateau_mean = 0.0, plateau_mean_perturbed = 0.0, plateau_se_perturbed = 0.0;
  double stochastic_ratio = 0.0;         // perturbed plateau mean over designed_mean
  double stochastic_ratio_sample = 0.0;  // perturbed over unperturbed plateau mean
  ShapeCheck shape;
  nlohmann::json summary() const;
};

EnzymeResult run_enzyme_sensitivity(const EnzymeOptions& opts);
void write_enzyme_sensitivity(const EnzymeResult& res, const std::string& dir);

struct CubicOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  std::int64_t x0_small = 3;
  std::int64_t x0_large = 10;
  double horizon_fraction = 0.5;  // read-off time as a fraction of the lower bound's asymptote
  int grid_points = 21;
  std::uint64_t max_events = 1'000'000;
  unsigned threads = 0;
};

struct CubicResult {
  std::size_t runs = 0;
  std::size_t first_event_decay = 0;  // stuck at one molecule after the first event
  std::size_t absorbed_at_1 = 0, absorbed_at_2 = 0, unresolved = 0;
  double first_event_fraction = 0.0, first_event_se = 0.0;
  double absorbed_at_1_fraction = 0.0;
  double t_read = 0.0, blowup_time = 0.0;
  std::vector<double> grid;
  std::vector<ObservableRow> c3;
  BoundCurve bound, bound_generator;
  nlohmann::json summary() const;
};

CubicResult run_cubic_blowup(const CubicOptions& opts);
void write_cubic_blowup(const CubicResult& res, const std::string& dir);

struct WalkOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 7;
  double t_end = 10.0;
  int grid_points = 41;
  unsigned threads = 0;
};

struct WalkResult {
  std::vector<ObservableRow> walk;  // U = A - B
  double k1 = 1.0;
  double final_var = 0.0, final_var_se = 0.0, expected_var = 0.0;
  double final_mean = 0.0, final_mean_se = 0.0;
  nlohmann::json summary() const;
};

WalkResult run_bimol_walk(const WalkOptions& opts);
void write_bimol_walk(const WalkResult& res, const std::string& dir);

struct OracleOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 3;
  std::vector<double> times = {0.5, 1.0, 2.0};
  std::vector<std::int64_t> bimol_caps = {60, 60};
  unsigned threads = 0;
};

struct OracleRow {
  std::string model;
  double time = 0.0;
  std::string species;
  std::string stat;  // "mean" or "var"
  double ssa = 0.0, ssa_se = 0.0, cme = 0.0, z = 0.0;
};

struct OracleResult {
  std::vector<OracleRow> rows;
  double max_z = 0.0;
  double max_defect = 0.0;
  nlohmann::json summary() const;
};

OracleResult run_reversible_oracle(const OracleOptions& opts);
void write_reversible_oracle(const OracleResult& res, const std::string& dir);

std::vector<std::string> demo_names();

}  // namespace jkl::cli
