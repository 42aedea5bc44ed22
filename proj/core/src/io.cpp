#include "jkl/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace jkl {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void header(std::ostream& os, const char* first, const std::vector<std::string>& species) {
  os << first;
  for (const auto& s : species) os << ',' << s;
  os << '\n';
}

void row(std::ostream& os, double t, std::span<const std::int64_t> x) {
  os << format_double(t);
  for (auto v : x) os << ',' << v;
  os << '\n';
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const std::vector<std::string>& species, const Trajectory& traj,
                          const std::vector<double>& grid, bool on_grid) {
  header(os, "time", species);
  if (on_grid) {
    if (grid.size() < traj.grid_filled) throw std::invalid_argument("grid shorter than the trajectory's grid rows");
    for (std::size_t g = 0; g < traj.grid_filled; ++g) row(os, grid[g], traj.grid_state(g));
    return;
  }
  row(os, 0.0, traj.initial);
  for (std::size_t i = 0; i < traj.times.size(); ++i) row(os, traj.times[i], traj.state(i));
}

void write_moments_csv(std::ostream& os, const MomentTable& table) {
  os << "time,p,estimate,stderr,n\n";
  for (const auto& r : table.rows)
    for (int p = 1; p <= table.p_max; ++p)
      os << format_double(r.time) << ',' << p << ',' << format_double(r.moment[p - 1]) << ','
         << format_double(r.moment_se[p - 1]) << ',' << r.n << '\n';
}

void write_species_stats_csv(std::ostream& os, const MomentTable& table) {
  os << "time,species,mean,mean_se,var,var_se,n\n";
  for (const auto& r : table.rows)
    for (std::size_t s = 0; s < table.species.size(); ++s)
      os << format_double(r.time) << ',' << table.species[s] << ',' << format_double(r.mean[s]) << ','
         << format_double(r.mean_se[s]) << ',' << format_double(r.var[s]) << ',' << format_double(r.var_se[s])
         << ',' << r.n << '\n';
}

void write_bound_csv(std::ostream& os, const BoundCurve& curve) {
  os << "time,value,formula\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i)
    os << format_double(curve.times[i]) << ',' << format_double(curve.values[i]) << ',' << curve.formula << '\n';
}

void write_rms_csv(std::ostream& os, const RmsCurve& curve) {
  os << "time,rms,rms_se,msd,msd_se,n\n";
  for (const auto& r : curve.rows)
    os << format_double(r.time) << ',' << format_double(r.rms) << ',' << format_double(r.rms_se) << ','
       << format_double(r.msd) << ',' << format_double(r.msd_se) << ',' << r.n << '\n';
}

void write_ode_csv(std::ostream& os, const std::vector<std::string>& species, const OdeSolution& sol) {
  header(os, "time", species);
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    os << format_double(sol.times[i]);
    for (double v : sol.states[i]) os << ',' << format_double(v);
    os << '\n';
  }
}

void write_cme_moments_csv(std::ostream& os, const std::vector<std::string>& species, const CmeSolution& sol,
                           const StateIndex& idx, int p_max) {
  os << "time,mass,defect";
  for (int p = 1; p <= p_max; ++p) os << ",m" << p << ",m" << p << "_upper";
  for (const auto& s : species) os << ",mean_" << s << ",var_" << s;
  os << '\n';
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    const auto m = cme_moments(sol.p[i], idx, p_max, sol.defect[i]);
    os << format_double(sol.times[i]) << ',' << format_double(m.mass) << ',' << format_double(sol.defect[i]);
    for (int p = 0; p < p_max; ++p) os << ',' << format_double(m.moment[p]) << ',' << format_double(m.moment_upper[p]);
    for (std::size_t s = 0; s < species.size(); ++s) os << ',' << format_double(m.mean[s]) << ',' << format_double(m.var[s]);
    os << '\n';
  }
}

void write_distribution_csv(std::ostream& os, const std::vector<std::string>& species, const CmeSolution& sol,
                            const StateIndex& idx) {
  os << "time";
  for (const auto& s : species) os << ',' << s;
  os << ",probability\n";
  for (std::size_t i = 0; i < sol.times.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const double pj = sol.p[i][static_cast<Eigen::Index>(j)];
      if (pj == 0.0) continue;
      os << format_double(sol.times[i]);
      for (auto v : idx.state(j)) os << ',' << v;
      os << ',' << format_double(pj) << '\n';
    }
}

}  // namespace jkl
