#include "jkl/cli/demos.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "jkl/cme.hpp"
#include "jkl/error.hpp"
#include "jkl/io.hpp"
#include "jkl/presets.hpp"
#include "jkl/rng.hpp"

namespace jkl::cli {

namespace {

std::vector<double> linspace(double a, double b, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[i] = i + 1 == points ? b : a + (b - a) * i / (points - 1);
  return g;
}

std::ofstream open_in(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

double json_number(double v) { return std::isfinite(v) ? v : (v > 0 ? 1e308 : -1e308); }

}  // namespace

ShapeCheck rises_to_plateau(const std::vector<double>& times, const std::vector<double>& values,
                            const std::vector<double>& se, int bins, double z) {
  if (times.size() != values.size() || times.size() != se.size())
    throw std::invalid_argument("shape check needs equally long series");
  if (bins < 3) throw std::invalid_argument("shape check needs at least three bins");
  ShapeCheck sc;
  const double T = times.empty() ? 0.0 : times.back();
  std::vector<double> sum(bins, 0.0), sum_se(bins, 0.0);
  std::vector<int> cnt(bins, 0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) continue;
    const int b = std::min(bins - 1, static_cast<int>(std::ceil(times[i] / T * bins)) - 1);
    sum[b] += values[i];
    sum_se[b] += se[i];
    ++cnt[b];
  }
  for (int b = 0; b < bins; ++b) {
    if (cnt[b] == 0) throw std::invalid_argument("shape check bin without samples");
    sc.bin_mean.push_back(sum[b] / cnt[b]);
    sc.bin_se.push_back(sum_se[b] / cnt[b]);  // triangle inequality: conservative for correlated samples
  }
  auto tol = [&](int a, int b) { return z * std::hypot(sc.bin_se[a], sc.bin_se[b]); };
  const int last = bins - 1;
  sc.rises = sc.bin_mean[last] - sc.bin_mean[0] > tol(0, last);
  sc.monotone = true;
  int best = 0;
  for (int b = 1; b < bins; ++b) {
    if (sc.bin_mean[b] < sc.bin_mean[best] - tol(best, b)) sc.monotone = false;
    if (sc.bin_mean[b] > sc.bin_mean[best]) best = b;
  }
  sc.plateau = std::abs(sc.bin_mean[last] - sc.bin_mean[last - 1]) <= tol(last - 1, last);
  return sc;
}

// ---------------------------------------------------------------------------
// enzyme-sensitivity

EnzymeResult run_enzyme_sensitivity(const EnzymeOptions& o) {
  if (!(o.t_end > 0.0) || !(o.dt > 0.0)) throw std::invalid_argument("enzyme demo needs positive t_end and dt");
  const auto net = preset("enzyme").network();
  const auto lin = preset("enzyme-linear").network();
  const std::size_t C = net.species_index("C");

  EnzymeResult res;
  // Fine start for the small-time bound comparison, then the regular grid.
  const double fine_end = std::min(0.02, o.t_end);
  for (int i = 0; i < 20; ++i) res.grid.push_back(fine_end * i / 20);
  const auto steps = static_cast<long>(std::llround(o.t_end / o.dt));
  for (long i = 0; i <= steps; ++i) {
    const double t = i == steps ? o.t_end : o.t_end * static_cast<double>(i) / static_cast<double>(steps);
    if (t >= fine_end) res.grid.push_back(t);
  }

  const PerturbationSpec pert{{{"alphaE", o.delta}}};
  const PerturbationSpec pert_lin{{{"kE", o.delta}}};
  const auto net_p = perturb_network(net, pert);
  const auto lin_p = perturb_network(lin, pert_lin);
  const State x0 = preset("enzyme").x0;
  const std::vector<double> x0d(x0.begin(), x0.end());
  const std::vector<double> x0l = {static_cast<double>(preset("enzyme-linear").x0[0])};

  res.ode = integrate_rre(net, x0d, res.grid);
  res.ode_perturbed = integrate_rre(net_p, x0d, res.grid);
  res.linear = integrate_rre(lin, x0l, res.grid);
  res.linear_perturbed = integrate_rre(lin_p, x0l, res.grid);

  const double t_plateau = o.t_end * (1.0 - o.plateau_fraction);
  auto plateau_avg = [&](auto&& value) {
    double s = 0.0;
    int n = 0;
    for (std::size_t g = 0; g < res.grid.size(); ++g)
      if (res.grid[g] >= t_plateau - 1e-12) {
        s += value(g);
        ++n;
      }
    return s / n;
  };
  res.ode_ratio = plateau_avg([&](std::size_t g) { return res.ode_perturbed.states[g][C]; }) /
                  plateau_avg([&](std::size_t g) { return res.ode.states[g][C]; });
  res.linear_ratio = plateau_avg([&](std::size_t g) { return res.linear_perturbed.states[g][0]; }) /
                     plateau_avg([&](std::size_t g) { return res.linear.states[g][0]; });

  EnsembleOptions eo;
  eo.threads = o.threads;
  res.rms = coupled_rms(net, x0, x0, pert, res.grid, o.samples, o.seed, eo, static_cast<int>(C));
  res.plateau_mean = plateau_avg([&](std::size_t g) { return res.rms.rows[g].mean_x[C]; });
  res.plateau_mean_perturbed = plateau_avg([&](std::size_t g) { return res.rms.rows[g].mean_y[C]; });
  res.plateau_se_perturbed = plateau_avg([&](std::size_t g) { return res.rms.rows[g].se_y[C]; });
  res.stochastic_ratio = res.plateau_mean_perturbed / o.designed_mean;
  res.stochastic_ratio_sample = res.plateau_mean_perturbed / res.plateau_mean;

  std::vector<double> rt, rv, rs;
  for (const auto& r : res.rms.rows) {
    rt.push_back(r.time);
    rv.push_back(r.rms);
    rs.push_back(r.rms_se);
  }
  res.shape = rises_to_plateau(rt, rv, rs, o.shape_bins);

  res.report = analyze(net);
  res.report_linear = analyze(lin);
  const auto totals = perturbation_totals(net, pert);
  const auto window = linspace(0.0, fine_end, 21);
  res.coeff_small =
      coefficient_perturbation_curve(res.report, x0, totals.delta, totals.delta_F, window, CoefficientVariant::SmallTime);
  res.coeff_large =
      coefficient_perturbation_curve(res.report, x0, totals.delta, totals.delta_F, window, CoefficientVariant::LargeTime);
  return res;
}

nlohmann::json EnzymeResult::summary() const {
  bool below = true;
  for (const auto& r : rms.rows) {
    if (r.time > coeff_small.times.back() + 1e-15) break;
    const auto it = std::lower_bound(coeff_small.times.begin(), coeff_small.times.end(), r.time - 1e-15);
    if (it == coeff_small.times.end()) break;
    const std::size_t k = static_cast<std::size_t>(it - coeff_small.times.begin());
    if (std::abs(coeff_small.times[k] - r.time) > 1e-12) continue;
    if (r.rms - 4 * r.rms_se > std::min(coeff_small.values[k], coeff_large.values[k])) below = false;
  }
  return {
      {"demo", "enzyme-sensitivity"},
      {"samples", rms.rows.empty() ? 0 : rms.rows.back().n},
      {"t_end", grid.back()},
      {"ode_response_ratio", ode_ratio},
      {"linear_ode_response_ratio", linear_ratio},
      {"stochastic_response_ratio", stochastic_ratio},
      {"stochastic_response_ratio_vs_unperturbed_sample", stochastic_ratio_sample},
      {"plateau_mean_C", plateau_mean},
      {"plateau_mean_C_perturbed", plateau_mean_perturbed},
      {"plateau_mean_C_perturbed_se", plateau_se_perturbed},
      {"rms_plateau", shape.bin_mean.empty() ? 0.0 : shape.bin_mean.back()},
      {"rms_bins", shape.bin_mean},
      {"rms_rises_to_plateau", shape.ok()},
      {"M", report.M},
      {"mu", report.mu},
      {"M_linear", report_linear.M},
      {"mu_linear", report_linear.mu},
      {"rms_C_below_coefficient_bound_on_window", below},
  };
}

void write_enzyme_sensitivity(const EnzymeResult& res, const std::string& dir) {
  {
    auto os = open_in(dir, "ode.csv");
    os << "time,C,C_perturbed,C_linear,C_linear_perturbed\n";
    for (std::size_t g = 0; g < res.grid.size(); ++g)
      os << format_double(res.grid[g]) << ',' << format_double(res.ode.states[g][0]) << ','
         << format_double(res.ode_perturbed.states[g][0]) << ',' << format_double(res.linear.states[g][0]) << ','
         << format_double(res.linear_perturbed.states[g][0]) << '\n';
  }
  {
    auto os = open_in(dir, "stochastic.csv");
    os << "time,mean_C,se_C,mean_C_perturbed,se_C_perturbed,mean_E,mean_E_perturbed,n\n";
    for (const auto& r : res.rms.rows)
      os << format_double(r.time) << ',' << format_double(r.mean_x[0]) << ',' << format_double(r.se_x[0]) << ','
         << format_double(r.mean_y[0]) << ',' << format_double(r.se_y[0]) << ',' << format_double(r.mean_x[1]) << ','
         << format_double(r.mean_y[1]) << ',' << r.n << '\n';
  }
  {
    auto os = open_in(dir, "rms.csv");
    write_rms_csv(os, res.rms);
  }
  {
    auto os = open_in(dir, "bound_small_time.csv");
    write_bound_csv(os, res.coeff_small);
  }
  {
    auto os = open_in(dir, "bound_large_time.csv");
    write_bound_csv(os, res.coeff_large);
  }
  auto os = open_in(dir, "summary.json");
  os << res.summary().dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// cubic-blowup

CubicResult run_cubic_blowup(const CubicOptions& o) {
  if (o.samples < 2) throw std::invalid_argument("cubic demo needs at least two samples");
  if (o.x0_large < 3) throw std::invalid_argument("cubic demo needs X0 >= 3 for the moment part");
  const auto net = preset("cubic").network();
  CubicResult res;
  res.runs = o.samples;

  struct Counts {
    std::size_t first = 0, one = 0, two = 0, open = 0;
  };
  const std::size_t block = 64;
  std::vector<Counts> partial((o.samples + block - 1) / block);
  SimConfig cfg;
  cfg.t_end = 1e6;  // absorption happens after finitely many jumps whose holding times shrink like x^-3
  cfg.max_events = o.max_events;
  const unsigned threads = o.threads ? o.threads : default_thread_count();
  parallel_blocks(o.samples, block, threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
    Counts c;
    for (std::size_t i = begin; i < end; ++i) {
      SimConfig local = cfg;
      local.seed = derive_seed(o.seed, i);
      const auto tr = simulate_direct(net, {o.x0_small}, local);
      if (!tr.channels.empty() && tr.channels.front() == 0 && tr.state(0)[0] == 1) ++c.first;
      if (tr.termination != Termination::TimeReached) ++c.open;
      else if (tr.final_state[0] == 1) ++c.one;
      else if (tr.final_state[0] == 2) ++c.two;
      else ++c.open;
    }
    partial[b] = c;
  });
  for (const auto& c : partial) {
    res.first_event_decay += c.first;
    res.absorbed_at_1 += c.one;
    res.absorbed_at_2 += c.two;
    res.unresolved += c.open;
  }
  const double n = static_cast<double>(o.samples);
  res.first_event_fraction = static_cast<double>(res.first_event_decay) / n;
  res.first_event_se = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / n);
  res.absorbed_at_1_fraction = static_cast<double>(res.absorbed_at_1) / n;

  const double C3 = static_cast<double>(o.x0_large) * (o.x0_large - 1) * (o.x0_large - 2);
  res.blowup_time = 1.0 / (3.0 * C3);
  res.t_read = o.horizon_fraction * res.blowup_time;
  res.grid = linspace(0.0, res.t_read, o.grid_points);
  EnsembleOptions eo;
  eo.threads = o.threads;
  eo.max_events = o.max_events;
  auto c3 = [](std::span<const std::int64_t> x) {
    const double v = static_cast<double>(x[0]);
    return v * (v - 1) * (v - 2);
  };
  res.c3 = ensemble_observable(net, {o.x0_large}, res.grid, c3, o.samples, splitmix64(o.seed), eo);
  res.bound = cubic_blowup_lowerbound(o.x0_large, res.grid);
  res.bound_generator = cubic_blowup_lowerbound_generator(o.x0_large, res.grid);
  return res;
}

nlohmann::json CubicResult::summary() const {
  const auto& last = c3.back();
  return {
      {"demo", "cubic-blowup"},
      {"runs", runs},
      {"first_event_decay_fraction", first_event_fraction},
      {"first_event_decay_se", first_event_se},
      {"first_event_decay_expected", 1.0 / 3.0},
      {"absorbed_at_1_fraction", absorbed_at_1_fraction},
      {"absorbed_at_1_eventual_expected", 0.5},
      {"absorbed_at_2", absorbed_at_2},
      {"unresolved", unresolved},
      {"t_read", t_read},
      {"blowup_time", blowup_time},
      {"c3_mean", last.mean},
      {"c3_se", last.mean_se},
      {"c3_excluded", last.excluded},
      {"lower_bound", json_number(bound.values.back())},
      {"lower_bound_generator", json_number(bound_generator.values.back())},
      {"exceeds_lower_bound", last.mean > bound.values.back()},
      {"exceeds_lower_bound_generator", last.mean > bound_generator.values.back()},
  };
}

void write_cubic_blowup(const CubicResult& res, const std::string& dir) {
  {
    auto os = open_in(dir, "c3.csv");
    os << "time,mean_c3,se_c3,n,lower_bound,lower_bound_generator\n";
    for (std::size_t g = 0; g < res.grid.size(); ++g)
      os << format_double(res.grid[g]) << ',' << format_double(res.c3[g].mean) << ','
         << format_double(res.c3[g].mean_se) << ',' << res.c3[g].n << ',' << format_double(res.bound.values[g]) << ','
         << format_double(res.bound_generator.values[g]) << '\n';
  }
  {
    auto os = open_in(dir, "absorption.csv");
    os << "outcome,count\n";
    os << "first_event_decay," << res.first_event_decay << '\n';
    os << "absorbed_at_1," << res.absorbed_at_1 << '\n';
    os << "absorbed_at_2," << res.absorbed_at_2 << '\n';
    os << "unresolved," << res.unresolved << '\n';
  }
  auto os = open_in(dir, "summary.json");
  os << res.summary().dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// bimol-walk

WalkResult run_bimol_walk(const WalkOptions& o) {
  const auto net = preset("bimol").network();
  const auto grid = linspace(0.0, o.t_end, o.grid_points);
  EnsembleOptions eo;
  eo.threads = o.threads;
  const std::size_t a = net.species_index("A"), b = net.species_index("B");
  auto u = [a, b](std::span<const std::int64_t> x) { return static_cast<double>(x[a] - x[b]); };
  WalkResult res;
  res.walk = ensemble_observable(net, preset("bimol").x0, grid, u, o.samples, o.seed, eo);
  res.k1 = net.parameters().at("k1");
  const auto& last = res.walk.back();
  res.final_var = last.var;
  res.final_var_se = last.var_se;
  res.final_mean = last.mean;
  res.final_mean_se = last.mean_se;
  res.expected_var = 2.0 * res.k1 * last.time;
  return res;
}

nlohmann::json WalkResult::summary() const {
  const auto& last = walk.back();
  return {
      {"demo", "bimol-walk"},
      {"samples", last.n},
      {"t", last.time},
      {"mean_U", final_mean},
      {"mean_U_se", final_mean_se},
      {"var_U", final_var},
      {"var_U_se", final_var_se},
      {"expected_var_U", expected_var},
      {"var_relative_error", expected_var > 0 ? std::abs(final_var - expected_var) / expected_var : 0.0},
  };
}

void write_bimol_walk(const WalkResult& res, const std::string& dir) {
  {
    auto os = open_in(dir, "walk.csv");
    os << "time,mean_U,se_U,var_U,var_se_U,expected_var_U,n\n";
    for (const auto& r : res.walk)
      os << format_double(r.time) << ',' << format_double(r.mean) << ',' << format_double(r.mean_se) << ','
         << format_double(r.var) << ',' << format_double(r.var_se) << ',' << format_double(2.0 * res.k1 * r.time)
         << ',' << r.n << '\n';
  }
  auto os = open_in(dir, "summary.json");
  os << res.summary().dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// reversible-oracle

namespace {

void compare(const std::string& model, const ReactionNetwork& net, const State& x0, const Truncation& trunc,
             const OracleOptions& o, std::uint64_t seed, OracleResult& res) {
  const auto idx = enumerate_states(net, x0, trunc);
  const auto gen = build_generator(net, idx);
  const auto sol = integrate_cme(gen, point_mass(idx, x0), o.times);
  EnsembleOptions eo;
  eo.threads = o.threads;
  const auto table = ensemble_moments(net, x0, o.times, 1, o.samples, seed, eo);
  auto z = [](double a, double b, double se) {
    if (se > 0.0) return (a - b) / se;
    return std::abs(a - b) < 1e-9 ? 0.0 : std::numeric_limits<double>::infinity();
  };
  for (std::size_t g = 0; g < o.times.size(); ++g) {
    const auto m = cme_moments(sol.p[g], idx, 1, sol.defect[g]);
    res.max_defect = std::max(res.max_defect, sol.defect[g]);
    const auto& row = table.rows[g];
    for (std::size_t s = 0; s < net.species_count(); ++s) {
      OracleRow mr{model, o.times[g], net.species()[s], "mean", row.mean[s], row.mean_se[s], m.mean[s], 0.0};
      mr.z = z(mr.ssa, mr.cme, mr.ssa_se);
      OracleRow vr{model, o.times[g], net.species()[s], "var", row.var[s], row.var_se[s], m.var[s], 0.0};
      vr.z = z(vr.ssa, vr.cme, vr.ssa_se);
      for (const auto& r : {mr, vr}) {
        res.max_z = std::max(res.max_z, std::abs(r.z));
        res.rows.push_back(r);
      }
    }
  }
}

}  // namespace

OracleResult run_reversible_oracle(const OracleOptions& o) {
  OracleResult res;
  const auto& rev = preset("reversible");
  compare("reversible", rev.network(), rev.x0, Truncation{}, o, o.seed, res);
  const auto& bim = preset("bimol");
  Truncation caps;
  caps.caps = o.bimol_caps;
  compare("bimol", bim.network(), bim.x0, caps, o, splitmix64(o.seed), res);
  return res;
}

nlohmann::json OracleResult::summary() const {
  return {{"demo", "reversible-oracle"}, {"comparisons", rows.size()}, {"max_z", max_z}, {"max_defect", max_defect}};
}

void write_reversible_oracle(const OracleResult& res, const std::string& dir) {
  {
    auto os = open_in(dir, "comparison.csv");
    os << "model,time,species,stat,ssa,ssa_se,cme,z\n";
    for (const auto& r : res.rows)
      os << r.model << ',' << format_double(r.time) << ',' << r.species << ',' << r.stat << ','
         << format_double(r.ssa) << ',' << format_double(r.ssa_se) << ',' << format_double(r.cme) << ','
         << format_double(r.z) << '\n';
  }
  auto os = open_in(dir, "summary.json");
  os << res.summary().dump(2) << '\n';
}

std::vector<std::string> demo_names() { return {"enzyme-sensitivity", "cubic-blowup", "bimol-walk", "reversible-oracle"}; }

}  // namespace jkl::cli
