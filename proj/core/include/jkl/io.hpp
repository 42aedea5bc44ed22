#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "jkl/bounds.hpp"
#include "jkl/cme.hpp"
#include "jkl/ensemble.hpp"
#include "jkl/ode.hpp"
#include "jkl/simulate.hpp"

namespace jkl {

/// Shortest decimal text that reads back to the same double ("inf", "-inf", "nan" otherwise).
std::string format_double(double v);

/// time,<species...>; one row per event starting with the initial state at t = 0,
/// or one row per filled grid time when `on_grid` is set.
void write_trajectory_csv(std::ostream& os, const std::vector<std::string>& species, const Trajectory& traj,
                          const std::vector<double>& grid = {}, bool on_grid = false);

/// time,p,estimate,stderr,n
void write_moments_csv(std::ostream& os, const MomentTable& table);

/// time,species,mean,mean_se,var,var_se,n
void write_species_stats_csv(std::ostream& os, const MomentTable& table);

/// time,value,formula
void write_bound_csv(std::ostream& os, const BoundCurve& curve);

/// time,rms,rms_se,msd,msd_se,n
void write_rms_csv(std::ostream& os, const RmsCurve& curve);

/// time,<species...>
void write_ode_csv(std::ostream& os, const std::vector<std::string>& species, const OdeSolution& sol);

/// time,mass,defect,m1,m1_upper,...,mean_<s>,var_<s>,...; one row per solution time.
void write_cme_moments_csv(std::ostream& os, const std::vector<std::string>& species, const CmeSolution& sol,
                           const StateIndex& idx, int p_max);

/// time,<species...>,probability for every state with non-zero probability.
void write_distribution_csv(std::ostream& os, const std::vector<std::string>& species, const CmeSolution& sol,
                            const StateIndex& idx);

}  // namespace jkl
