#include "jkl/cli/app.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "jkl/bounds.hpp"
#include "jkl/cli/demos.hpp"
#include "jkl/cme.hpp"
#include "jkl/ensemble.hpp"
#include "jkl/error.hpp"
#include "jkl/io.hpp"
#include "jkl/parser.hpp"
#include "jkl/presets.hpp"
#include "jkl/simulate.hpp"
#include "jkl/stability.hpp"

namespace jkl::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw UsageError("not a number: '" + text + "'");
  return v;
}

std::int64_t to_int(const std::string& text) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw UsageError("not an integer: '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(to_double(part));
  return out;
}

State parse_state(const std::string& text) {
  State out;
  if (trim(text).empty()) return out;
  for (const auto& part : split(text, ',')) {
    const auto v = to_int(part);
    if (v < 0) throw UsageError("state entries must be non-negative: '" + text + "'");
    out.push_back(v);
  }
  return out;
}

std::pair<std::string, double> parse_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("expected NAME=VALUE, got '" + text + "'");
  const std::string name = trim(std::string_view(text).substr(0, eq));
  if (name.empty()) throw UsageError("empty name in '" + text + "'");
  return {name, to_double(text.substr(eq + 1))};
}

std::vector<double> parse_grid(const std::string& spec, double t_end) {
  if (!(t_end > 0.0)) throw UsageError("t_end must be positive");
  if (spec.find(',') != std::string::npos) {
    auto g = parse_list(spec);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(g[i] >= 0.0) || !std::isfinite(g[i])) throw UsageError("grid times must be finite and non-negative");
      if (i > 0 && g[i] < g[i - 1]) throw UsageError("grid times must be non-decreasing");
    }
    return g;
  }
  const auto n = to_int(spec);
  if (n < 1 || n > 10'000'000) throw UsageError("grid point count must be in [1, 1e7]");
  std::vector<double> g(static_cast<std::size_t>(n + 1));
  for (std::int64_t i = 0; i <= n; ++i)
    g[static_cast<std::size_t>(i)] = i == n ? t_end : t_end * static_cast<double>(i) / static_cast<double>(n);
  return g;
}

namespace {

struct Opts {
  std::string model, preset_name, out;
  std::vector<std::string> params, perturb;
  bool json = false;
  std::string weight = "ones";
  double t_end = 0.0;
  std::string grid;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  int p = 2;
  std::string x0, y0, caps;
  std::string kind = "first";
  std::string variant = "small-time";
  std::string component;
  std::string out_dir;
  std::string method = "direct";
  std::uint64_t max_events = 100'000'000;
  double state_cap = 1e9;
  double epsilon = 0.0;
  std::string direction;
  int n_max = 10;
  std::string stats_file, covariance_file, distribution_file, index_file;
  bool single = false;
  std::string demo;
  std::size_t max_states = 2'000'000;
};

struct Model {
  ReactionNetwork net;
  State x0;
  double t_end = 1.0;
};

Model load(const Opts& o) {
  if (o.model.empty() == o.preset_name.empty()) throw UsageError("exactly one of --model and --preset is required");
  Model m;
  if (!o.preset_name.empty()) {
    const Preset* p = nullptr;
    try {
      p = &preset(o.preset_name);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    m.net = p->network();
    m.x0 = p->x0;
    m.t_end = p->t_end;
  } else {
    m.net = load_model_file(o.model);
    m.x0.assign(m.net.species_count(), 0);
  }
  if (!o.params.empty()) {
    std::map<std::string, double> values;
    for (const auto& a : o.params) {
      auto [name, v] = parse_assignment(a);
      if (!m.net.parameters().count(name)) throw UsageError("unknown parameter '" + name + "'");
      values[name] = v;
    }
    m.net = m.net.with_parameters(values);
  }
  if (!o.x0.empty()) m.x0 = parse_state(o.x0);
  if (m.x0.size() != m.net.species_count())
    throw UsageError("--x0 needs " + std::to_string(m.net.species_count()) + " entries");
  if (o.t_end > 0.0) m.t_end = o.t_end;
  return m;
}

State second_state(const Opts& o, const Model& m) {
  if (o.y0.empty()) return m.x0;
  State y = parse_state(o.y0);
  if (y.size() != m.net.species_count())
    throw UsageError("--y0 needs " + std::to_string(m.net.species_count()) + " entries");
  return y;
}

PerturbationSpec perturbation(const Opts& o) {
  PerturbationSpec spec;
  for (const auto& a : o.perturb) {
    auto [name, v] = parse_assignment(a);
    spec.deltas[name] = v;
  }
  return spec;
}

WeightChoice weight_choice(const Opts& o) {
  if (o.weight == "ones") return {WeightPolicy::Ones, {}};
  if (o.weight == "auto") return {WeightPolicy::Auto, {}};
  std::string text = o.weight;
  if (std::filesystem::exists(o.weight)) {
    std::ifstream is(o.weight);
    std::stringstream ss;
    ss << is.rdbuf();
    text = ss.str();
    for (char& c : text)
      if (c == '\n' || c == '\t' || c == ' ' || c == '\r') c = ',';
    std::string squeezed;
    for (char c : text)
      if (c != ',' || (!squeezed.empty() && squeezed.back() != ',')) squeezed += c;
    while (!squeezed.empty() && squeezed.back() == ',') squeezed.pop_back();
    text = squeezed;
  }
  return {WeightPolicy::Explicit, parse_list(text)};
}

Method method_of(const Opts& o) {
  if (o.method == "direct") return Method::Direct;
  if (o.method == "rtc" || o.method == "next-reaction") return Method::NextReaction;
  throw UsageError("unknown method '" + o.method + "' (direct or rtc)");
}

void emit(const Opts& o, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  if (o.out.empty()) {
    body(out);
    return;
  }
  std::ofstream os(o.out);
  if (!os) throw UsageError("cannot open '" + o.out + "' for writing");
  body(os);
}

void emit_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot open '" + path + "' for writing");
  body(os);
}

int species_component(const ReactionNetwork& net, const std::string& name) {
  if (name.empty()) return -1;
  const auto s = net.species_index(name);
  if (s == net.species_count()) throw UsageError("unknown species '" + name + "'");
  return static_cast<int>(s);
}

// ---------------------------------------------------------------------------

int cmd_validate(const Opts& o, std::ostream& out, std::ostream& err) {
  const Model m = load(o);
  const auto diags = validate_network(m.net);
  for (const auto& d : diags) err << d.reaction << ": " << d.message << '\n';
  if (!diags.empty()) return kUsage;
  out << "ok: " << m.net.species_count() << " species, " << m.net.reaction_count() << " reactions";
  if (m.net.max_order() > 2) out << " (order " << m.net.max_order() << ", simulation only)";
  out << '\n';
  return kOk;
}

void print_report(std::ostream& os, const StabilityReport& r) {
  auto row = [&](const char* k, double v) { os << k << ' ' << format_double(v) << '\n'; };
  const auto j = to_json(r);
  os << "weight_policy " << j["weight_policy"].get<std::string>() << '\n';
  os << "weight";
  for (double w : r.weight) os << ' ' << format_double(w);
  os << '\n';
  os << "weight_annihilates " << (r.weight_annihilates ? "true" : "false") << '\n';
  row("A", r.A);
  row("alpha", r.alpha);
  row("L", r.L);
  row("lambda", r.lambda);
  row("Gamma", r.Gamma);
  row("gamma", r.gamma);
  row("M", r.M);
  row("mu", r.mu);
  row("M_special", r.M_special);
  row("M_combined", r.M_combined);
  row("norm_1tN", r.norm_1tN);
  row("norm_1tN_sq", r.norm_1tN_sq);
  row("norm_1tN2", r.norm_1tN2);
  os << "\nreaction kind d A alpha M mu L lambda Gamma gamma\n";
  for (const auto& c : r.contributions) {
    os << c.label << ' ' << to_string(c.kind);
    for (double v : {c.d, c.A, c.alpha, c.M, c.mu, c.L, c.lambda, c.Gamma, c.gamma}) os << ' ' << format_double(v);
    os << '\n';
  }
}

int cmd_analyze(const Opts& o, std::ostream& out, std::ostream&) {
  const Model m = load(o);
  const auto rep = analyze(m.net, weight_choice(o));
  emit(o, out, [&](std::ostream& os) {
    if (o.json) os << to_json(rep).dump(2) << '\n';
    else print_report(os, rep);
  });
  return kOk;
}

int cmd_simulate(const Opts& o, std::ostream& out, std::ostream& err) {
  const Model m = load(o);
  SimConfig cfg;
  cfg.t_end = m.t_end;
  cfg.seed = o.seed;
  cfg.max_events = o.max_events;
  cfg.state_cap = o.state_cap;
  if (!o.grid.empty()) cfg.grid = parse_grid(o.grid, m.t_end);
  const Method method = method_of(o);
  const Trajectory tr = method == Method::Direct ? simulate_direct(m.net, m.x0, cfg) : simulate_rtc(m.net, m.x0, cfg);
  emit(o, out, [&](std::ostream& os) { write_trajectory_csv(os, m.net.species(), tr, cfg.grid, !cfg.grid.empty()); });
  if (tr.termination != Termination::TimeReached)
    err << "stopped early: " << to_string(tr.termination) << " at t=" << format_double(tr.end_time) << '\n';
  return kOk;
}

int cmd_ensemble(const Opts& o, std::ostream& out, std::ostream& err) {
  const Model m = load(o);
  const auto grid = parse_grid(o.grid.empty() ? "100" : o.grid, m.t_end);
  EnsembleOptions eo;
  eo.method = method_of(o);
  eo.max_events = o.max_events;
  eo.state_cap = o.state_cap;
  if (o.samples < 2) throw UsageError("--samples must be at least 2");
  if (o.p < 1) throw UsageError("--p must be at least 1");
  const auto table = ensemble_moments(m.net, m.x0, grid, o.p, o.samples, o.seed, eo);
  emit(o, out, [&](std::ostream& os) { write_moments_csv(os, table); });
  if (!o.stats_file.empty()) emit_file(o.stats_file, [&](std::ostream& os) { write_species_stats_csv(os, table); });
  if (!o.covariance_file.empty())
    emit_file(o.covariance_file, [&](std::ostream& os) {
      const std::size_t D = table.species.size();
      os << "time,species_i,species_j,covariance\n";
      for (const auto& r : table.rows)
        for (std::size_t i = 0; i < D; ++i)
          for (std::size_t j = 0; j < D; ++j)
            os << format_double(r.time) << ',' << table.species[i] << ',' << table.species[j] << ','
               << format_double(r.covariance[i * D + j]) << '\n';
    });
  if (!table.rows.empty() && table.rows.back().excluded > 0)
    err << table.rows.back().excluded << " trajectories stopped at a cap before t_end\n";
  return kOk;
}

int cmd_couple(const Opts& o, std::ostream& out, std::ostream&) {
  const Model m = load(o);
  const State y0 = second_state(o, m);
  const auto pert = perturbation(o);
  if (o.single) {
    SimConfig cfg;
    cfg.t_end = m.t_end;
    cfg.seed = o.seed;
    cfg.max_events = o.max_events;
    cfg.state_cap = o.state_cap;
    const auto [a, b] = simulate_coupled(m.net, m.x0, y0, pert, cfg);
    emit(o, out, [&](std::ostream& os) {
      os << "leg,time";
      for (const auto& s : m.net.species()) os << ',' << s;
      os << '\n';
      for (int leg = 0; leg < 2; ++leg) {
        const Trajectory& tr = leg == 0 ? a : b;
        auto line = [&](double t, std::span<const std::int64_t> x) {
          os << leg << ',' << format_double(t);
          for (auto v : x) os << ',' << v;
          os << '\n';
        };
        line(0.0, tr.initial);
        for (std::size_t i = 0; i < tr.times.size(); ++i) line(tr.times[i], tr.state(i));
      }
    });
    return kOk;
  }
  const auto grid = parse_grid(o.grid.empty() ? "100" : o.grid, m.t_end);
  if (o.samples < 2) throw UsageError("--samples must be at least 2");
  EnsembleOptions eo;
  eo.max_events = o.max_events;
  eo.state_cap = o.state_cap;
  const auto curve =
      coupled_rms(m.net, m.x0, y0, pert, grid, o.samples, o.seed, eo, species_component(m.net, o.component));
  emit(o, out, [&](std::ostream& os) { write_rms_csv(os, curve); });
  return kOk;
}

int cmd_bounds(const Opts& o, std::ostream& out, std::ostream&) {
  const Model m = load(o);
  const auto grid = parse_grid(o.grid.empty() ? "100" : o.grid, m.t_end);
  BoundCurve curve;
  if (o.kind == "cubic" || o.kind == "cubic-generator") {
    if (m.net.species_count() != 1) throw UsageError("the cubic lower bound needs a one-species model");
    curve = o.kind == "cubic" ? cubic_blowup_lowerbound(m.x0[0], grid)
                              : cubic_blowup_lowerbound_generator(m.x0[0], grid);
  } else {
    const auto rep = analyze(m.net, weight_choice(o));
    const double norm = weighted_norm(rep, m.x0);
    if (o.kind == "first") {
      curve = first_moment_curve(rep, norm, grid);
    } else if (o.kind == "second") {
      EpsilonPolicy eps;
      if (o.epsilon > 0.0) eps.fixed = o.epsilon;
      curve = second_moment_curve(rep, norm, grid, eps);
    } else if (o.kind == "pth") {
      if (o.p <= 2) throw UsageError("--kind pth needs --p > 2; use --kind first or second");
      curve = pth_moment_curve(rep, norm, o.p, grid);
    } else if (o.kind == "ode") {
      const State y0 = second_state(o, m);
      curve = ode_divergence_bound(m.net, rep, std::vector<double>(m.x0.begin(), m.x0.end()),
                                   std::vector<double>(y0.begin(), y0.end()), grid);
    } else if (o.kind == "initial") {
      curve = initial_perturbation_curve(rep, m.x0, second_state(o, m), grid);
    } else if (o.kind == "coeff") {
      const auto totals = perturbation_totals(m.net, perturbation(o));
      curve = coefficient_perturbation_curve(rep, m.x0, totals.delta, totals.delta_F, grid, parse_variant(o.variant));
    } else if (o.kind == "asymptotic") {
      const auto kappa = asymptotic_check(rep, o.p);
      nlohmann::json j = {{"p", o.p}, {"satisfied", kappa.has_value()}};
      if (kappa) j["kappa"] = *kappa;
      emit(o, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
      return kOk;
    } else {
      throw UsageError("unknown bound kind '" + o.kind + "'");
    }
  }
  emit(o, out, [&](std::ostream& os) {
    if (o.json) {
      nlohmann::json j = {{"formula", curve.formula},     {"leading_order", curve.leading_order},
                          {"lower_bound", curve.lower_bound}, {"inputs", curve.inputs},
                          {"times", curve.times},         {"values", curve.values}};
      os << j.dump(2) << '\n';
    } else {
      write_bound_csv(os, curve);
    }
  });
  return kOk;
}

int cmd_cme(const Opts& o, std::ostream& out, std::ostream& err) {
  const Model m = load(o);
  const auto grid = parse_grid(o.grid.empty() ? "100" : o.grid, m.t_end);
  Truncation trunc;
  trunc.max_states = o.max_states;
  if (!o.caps.empty())
    for (const auto& part : split(o.caps, ',')) trunc.caps.push_back(to_int(part));
  if (!trunc.caps.empty() && trunc.caps.size() != m.net.species_count())
    throw UsageError("--caps needs " + std::to_string(m.net.species_count()) + " entries");
  if (o.p < 1) throw UsageError("--p must be at least 1");
  const auto idx = enumerate_states(m.net, m.x0, trunc);
  const auto gen = build_generator(m.net, idx);
  const auto sol = integrate_cme(gen, point_mass(idx, m.x0), grid);
  emit(o, out, [&](std::ostream& os) { write_cme_moments_csv(os, m.net.species(), sol, idx, o.p); });
  if (!o.distribution_file.empty())
    emit_file(o.distribution_file, [&](std::ostream& os) { write_distribution_csv(os, m.net.species(), sol, idx); });
  if (!o.index_file.empty()) emit_file(o.index_file, [&](std::ostream& os) { idx.dump(os); });
  if (!sol.reliable)
    err << "warning: probability absorbed at the truncation boundary reached "
        << format_double(sol.defect.empty() ? 0.0 : sol.defect.back()) << "; raise --caps\n";
  return kOk;
}

int cmd_ray(const Opts& o, std::ostream& out, std::ostream&) {
  const Model m = load(o);
  std::vector<double> dir(m.net.species_count(), 1.0);
  if (!o.direction.empty()) dir = parse_list(o.direction);
  if (dir.size() != m.net.species_count())
    throw UsageError("--direction needs " + std::to_string(m.net.species_count()) + " entries");
  const auto rows = ray_diagnostic(m.net, dir, o.n_max);
  emit(o, out, [&](std::ostream& os) {
    os << "n,x_dot_F,one_dot_F,F_norm,x_norm2_sq,x_norm1\n";
    for (const auto& r : rows)
      os << format_double(r.n) << ',' << format_double(r.x_dot_F) << ',' << format_double(r.one_dot_F) << ','
         << format_double(r.F_norm) << ',' << format_double(r.x_norm2_sq) << ',' << format_double(r.x_norm1) << '\n';
  });
  return kOk;
}

int cmd_demo(const Opts& o, const CLI::App& sub, std::ostream& out) {
  const std::string dir = o.out_dir.empty() ? "demo-" + o.demo : o.out_dir;
  const bool has_samples = sub.count("--samples") > 0, has_seed = sub.count("--seed") > 0;
  nlohmann::json summary;
  if (o.demo == "enzyme-sensitivity") {
    EnzymeOptions e;
    if (has_samples) e.samples = o.samples;
    if (has_seed) e.seed = o.seed;
    if (o.t_end > 0.0) e.t_end = o.t_end;
    const auto res = run_enzyme_sensitivity(e);
    write_enzyme_sensitivity(res, dir);
    summary = res.summary();
  } else if (o.demo == "cubic-blowup") {
    CubicOptions c;
    if (has_samples) c.samples = o.samples;
    if (has_seed) c.seed = o.seed;
    const auto res = run_cubic_blowup(c);
    write_cubic_blowup(res, dir);
    summary = res.summary();
  } else if (o.demo == "bimol-walk") {
    WalkOptions w;
    if (has_samples) w.samples = o.samples;
    if (has_seed) w.seed = o.seed;
    if (o.t_end > 0.0) w.t_end = o.t_end;
    const auto res = run_bimol_walk(w);
    write_bimol_walk(res, dir);
    summary = res.summary();
  } else if (o.demo == "reversible-oracle") {
    OracleOptions r;
    if (has_samples) r.samples = o.samples;
    if (has_seed) r.seed = o.seed;
    const auto res = run_reversible_oracle(r);
    write_reversible_oracle(res, dir);
    summary = res.summary();
  } else {
    throw UsageError("unknown demo '" + o.demo + "'");
  }
  out << summary.dump(2) << '\n';
  return kOk;
}

void model_options(CLI::App* sub, Opts& o) {
  sub->add_option("--model", o.model, "model file (.rxn)");
  sub->add_option("--preset", o.preset_name, "built-in model")->check(CLI::IsMember(preset_names()));
  sub->add_option("--param", o.params, "override a named rate constant, NAME=VALUE");
  sub->add_option("--x0", o.x0, "initial state, comma separated");
}

void run_options(CLI::App* sub, Opts& o) {
  sub->add_option("--t-end", o.t_end, "time horizon")->check(CLI::PositiveNumber);
  sub->add_option("--grid", o.grid, "N for N+1 evenly spaced times, or a comma separated list");
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--max-events", o.max_events, "event cap per trajectory")->check(CLI::PositiveNumber);
  sub->add_option("--state-cap", o.state_cap, "stop once |x|_1 exceeds this")->check(CLI::PositiveNumber);
  sub->add_option("--out", o.out, "output file (default: standard output)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Opts o;
  CLI::App app{"Stochastic reaction networks: simulation, stability constants, moment and perturbation bounds"};
  app.name("jkl");
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "check a model for conservation and rate problems");
  model_options(validate, o);

  auto* analyze_cmd = app.add_subcommand("analyze", "stability constants of a network");
  model_options(analyze_cmd, o);
  analyze_cmd->add_option("--weight", o.weight, "ones, auto, or a weight vector (file or comma list)");
  analyze_cmd->add_flag("--json", o.json, "JSON instead of a table");
  analyze_cmd->add_option("--out", o.out, "output file (default: standard output)");

  auto* simulate = app.add_subcommand("simulate", "one exact trajectory as CSV");
  model_options(simulate, o);
  run_options(simulate, o);
  simulate->add_option("--method", o.method, "direct or rtc");

  auto* ensemble = app.add_subcommand("ensemble", "moments of |X_t|_1 over independent trajectories");
  model_options(ensemble, o);
  run_options(ensemble, o);
  ensemble->add_option("--samples", o.samples, "number of trajectories");
  ensemble->add_option("--p", o.p, "highest moment order");
  ensemble->add_option("--method", o.method, "direct or rtc");
  ensemble->add_option("--stats", o.stats_file, "also write per-species mean and variance CSV");
  ensemble->add_option("--covariance", o.covariance_file, "also write the covariance CSV");

  auto* couple = app.add_subcommand("couple", "coupled pairs driven by shared Poisson clocks");
  model_options(couple, o);
  run_options(couple, o);
  couple->add_option("--y0", o.y0, "initial state of the second leg (default: --x0)");
  couple->add_option("--perturb", o.perturb, "relative rate change of the second leg, NAME=DELTA");
  couple->add_option("--samples", o.samples, "number of pairs");
  couple->add_option("--component", o.component, "restrict the distance to one species");
  couple->add_flag("--single", o.single, "write one coupled pair instead of the RMS curve");

  auto* bounds = app.add_subcommand("bounds", "theoretical moment and perturbation bounds");
  model_options(bounds, o);
  bounds->add_option("--t-end", o.t_end, "time horizon")->check(CLI::PositiveNumber);
  bounds->add_option("--grid", o.grid, "N for N+1 evenly spaced times, or a comma separated list");
  bounds->add_option("--out", o.out, "output file (default: standard output)");
  bounds->add_option("--kind", o.kind, "first, second, pth, ode, initial, coeff, asymptotic, cubic, cubic-generator");
  bounds->add_option("--p", o.p, "moment order for pth and asymptotic");
  bounds->add_option("--y0", o.y0, "second initial state for ode and initial");
  bounds->add_option("--perturb", o.perturb, "relative rate change, NAME=DELTA");
  bounds->add_option("--variant", o.variant, "small-time or large-time");
  bounds->add_option("--weight", o.weight, "ones, auto, or a weight vector");
  bounds->add_option("--epsilon", o.epsilon, "fixed epsilon for the second moment")->check(CLI::PositiveNumber);
  bounds->add_flag("--json", o.json, "JSON instead of CSV");

  auto* cme = app.add_subcommand("cme", "truncated master equation moments");
  model_options(cme, o);
  cme->add_option("--t-end", o.t_end, "time horizon")->check(CLI::PositiveNumber);
  cme->add_option("--grid", o.grid, "N for N+1 evenly spaced times, or a comma separated list");
  cme->add_option("--out", o.out, "output file (default: standard output)");
  cme->add_option("--caps", o.caps, "per-species upper bounds, comma separated (negative: none)");
  cme->add_option("--p", o.p, "highest moment order");
  cme->add_option("--max-states", o.max_states, "largest admissible state set");
  cme->add_option("--distribution", o.distribution_file, "also write the probability vectors");
  cme->add_option("--index", o.index_file, "also write the state index");

  auto* ray = app.add_subcommand("ray", "drift along a ray x = n * direction");
  model_options(ray, o);
  ray->add_option("--direction", o.direction, "non-negative direction, comma separated");
  ray->add_option("--n-max", o.n_max, "largest n")->check(CLI::NonNegativeNumber);
  ray->add_option("--out", o.out, "output file (default: standard output)");

  auto* demo = app.add_subcommand("demo", "named experiments writing a CSV bundle and summary.json");
  demo->add_option("name", o.demo, "experiment")->required()->check(CLI::IsMember(demo_names()));
  demo->add_option("--out-dir", o.out_dir, "output directory (default: demo-NAME)");
  demo->add_option("--samples", o.samples, "ensemble size");
  demo->add_option("--seed", o.seed, "master seed");
  demo->add_option("--t-end", o.t_end, "time horizon")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(o, out, err);
    if (analyze_cmd->parsed()) return cmd_analyze(o, out, err);
    if (simulate->parsed()) return cmd_simulate(o, out, err);
    if (ensemble->parsed()) return cmd_ensemble(o, out, err);
    if (couple->parsed()) return cmd_couple(o, out, err);
    if (bounds->parsed()) return cmd_bounds(o, out, err);
    if (cme->parsed()) return cmd_cme(o, out, err);
    if (ray->parsed()) return cmd_ray(o, out, err);
    if (demo->parsed()) return cmd_demo(o, *demo, out);
  } catch (const ParseError& e) {
    err << (o.model.empty() ? std::string("model") : o.model) << ':' << e.what() << '\n';
    return kUsage;
  } catch (const AnalysisError& e) {
    err << "analysis rejected: " << e.what() << '\n';
    return kRejected;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const ConservationViolation& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace jkl::cli
