#include "jkl/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "jkl/error.hpp"
#include "jkl/rng.hpp"

namespace jkl {

unsigned default_thread_count() {
  if (const char* env = std::getenv("JKL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_blocks(std::size_t n, std::size_t block_size, unsigned threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (block_size == 0) throw std::invalid_argument("block size must be positive");
  const std::size_t blocks = (n + block_size - 1) / block_size;
  if (threads == 0) threads = default_thread_count();
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, blocks));
  auto run = [&](std::size_t b) { body(b, b * block_size, std::min(n, (b + 1) * block_size)); };
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mtx;
  std::exception_ptr first_error;
  std::size_t first_block = blocks;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t b; (b = next.fetch_add(1)) < blocks;) {
        try {
          run(b);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mtx);
          if (b < first_block) {
            first_block = b;
            first_error = std::current_exception();
          }
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

constexpr std::size_t kBlock = 64;

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("sample grid is empty");
  if (!(grid.back() > 0.0)) throw std::invalid_argument("sample grid must extend past t = 0");
}

SimConfig ensemble_config(const std::vector<double>& grid, const EnsembleOptions& opts) {
  SimConfig cfg;
  cfg.t_end = grid.back();
  cfg.grid = grid;
  cfg.max_events = opts.max_events;
  cfg.state_cap = opts.state_cap;
  cfg.record_events = false;
  return cfg;
}

Trajectory run_one(const ReactionNetwork& net, const State& x0, SimConfig cfg, std::uint64_t seed, Method m) {
  cfg.seed = seed;
  return m == Method::Direct ? simulate_direct(net, x0, cfg) : simulate_rtc(net, x0, cfg);
}

using acc = long double;

struct MomentAcc {
  std::size_t n = 0, excluded = 0;
  std::vector<acc> spow;   // sum |x|_1^q, q = 1..2 p_max
  std::vector<acc> s1, s2, s3, s4;
  std::vector<acc> cross;  // D x D shifted products
};

}  // namespace

MomentTable ensemble_moments(const ReactionNetwork& net, const State& x0, const std::vector<double>& grid, int p_max,
                             std::size_t n, std::uint64_t seed, const EnsembleOptions& opts) {
  if (n < 2) throw std::invalid_argument("ensemble needs at least two trajectories");
  if (p_max < 1) throw std::invalid_argument("moment order must be at least 1");
  check_grid(grid);
  const SimConfig cfg = ensemble_config(grid, opts);
  const std::size_t G = grid.size(), D = net.species_count();
  const std::size_t P2 = 2 * static_cast<std::size_t>(p_max);
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<std::vector<MomentAcc>> partial(blocks);

  parallel_blocks(n, kBlock, opts.threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
    std::vector<MomentAcc> accs(G);
    for (auto& a : accs) {
      a.spow.assign(P2, 0);
      a.s1.assign(D, 0);
      a.s2.assign(D, 0);
      a.s3.assign(D, 0);
      a.s4.assign(D, 0);
      a.cross.assign(D * D, 0);
    }
    std::vector<acc> y(D);
    for (std::size_t i = begin; i < end; ++i) {
      const Trajectory tr = run_one(net, x0, cfg, derive_seed(seed, i), opts.method);
      for (std::size_t g = 0; g < G; ++g) {
        auto& a = accs[g];
        if (g >= tr.grid_filled) {
          ++a.excluded;
          continue;
        }
        ++a.n;
        const auto x = tr.grid_state(g);
        acc s = 0;
        for (std::size_t d = 0; d < D; ++d) {
          s += static_cast<acc>(x[d]);
          y[d] = static_cast<acc>(x[d] - x0[d]);
          const acc y2 = y[d] * y[d];
          a.s1[d] += y[d];
          a.s2[d] += y2;
          a.s3[d] += y2 * y[d];
          a.s4[d] += y2 * y2;
        }
        for (std::size_t d = 0; d < D; ++d)
          for (std::size_t e = 0; e < D; ++e) a.cross[d * D + e] += y[d] * y[e];
        acc pw = 1;
        for (std::size_t q = 0; q < P2; ++q) {
          pw *= s;
          a.spow[q] += pw;
        }
      }
    }
    partial[b] = std::move(accs);
  });

  MomentTable table;
  table.species = net.species();
  table.p_max = p_max;
  for (std::size_t g = 0; g < G; ++g) {
    MomentAcc tot;
    tot.spow.assign(P2, 0);
    tot.s1.assign(D, 0);
    tot.s2.assign(D, 0);
    tot.s3.assign(D, 0);
    tot.s4.assign(D, 0);
    tot.cross.assign(D * D, 0);
    for (const auto& blk : partial) {
      const auto& a = blk[g];
      tot.n += a.n;
      tot.excluded += a.excluded;
      for (std::size_t q = 0; q < P2; ++q) tot.spow[q] += a.spow[q];
      for (std::size_t d = 0; d < D; ++d) {
        tot.s1[d] += a.s1[d];
        tot.s2[d] += a.s2[d];
        tot.s3[d] += a.s3[d];
        tot.s4[d] += a.s4[d];
      }
      for (std::size_t k = 0; k < D * D; ++k) tot.cross[k] += a.cross[k];
    }
    MomentRow row;
    row.time = grid[g];
    row.n = tot.n;
    row.excluded = tot.excluded;
    const acc cnt = static_cast<acc>(tot.n);
    const acc bessel = tot.n > 1 ? cnt / (cnt - 1) : 0;
    for (int p = 1; p <= p_max; ++p) {
      const acc m = tot.n ? tot.spow[p - 1] / cnt : 0;
      const acc m2 = tot.n ? tot.spow[2 * p - 1] / cnt : 0;
      const acc v = std::max<acc>(0, (m2 - m * m) * bessel);
      row.moment.push_back(static_cast<double>(m));
      row.moment_se.push_back(tot.n ? static_cast<double>(std::sqrt(v / cnt)) : 0.0);
    }
    std::vector<acc> my(D);
    for (std::size_t d = 0; d < D; ++d) {
      const acc m = tot.n ? tot.s1[d] / cnt : 0;
      my[d] = m;
      const acc e2 = tot.n ? tot.s2[d] / cnt : 0, e3 = tot.n ? tot.s3[d] / cnt : 0, e4 = tot.n ? tot.s4[d] / cnt : 0;
      const acc c2 = std::max<acc>(0, e2 - m * m);
      const acc c4 = std::max<acc>(0, e4 - 4 * m * e3 + 6 * m * m * e2 - 3 * m * m * m * m);
      const acc var = c2 * bessel;
      row.mean.push_back(static_cast<double>(x0[d] + m));
      row.var.push_back(static_cast<double>(var));
      row.mean_se.push_back(tot.n ? static_cast<double>(std::sqrt(var / cnt)) : 0.0);
      const acc vv = tot.n > 1 ? std::max<acc>(0, c4 - c2 * c2 * (cnt - 3) / (cnt - 1)) / cnt : 0;
      row.var_se.push_back(static_cast<double>(std::sqrt(vv)));
    }
    for (std::size_t d = 0; d < D; ++d)
      for (std::size_t e = 0; e < D; ++e) {
        const acc c = tot.n ? (tot.cross[d * D + e] / cnt - my[d] * my[e]) * bessel : 0;
        row.covariance.push_back(static_cast<double>(c));
      }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<ObservableRow> ensemble_observable(const ReactionNetwork& net, const State& x0,
                                               const std::vector<double>& grid, const Observable& f, std::size_t n,
                                               std::uint64_t seed, const EnsembleOptions& opts) {
  if (n < 2) throw std::invalid_argument("ensemble needs at least two trajectories");
  check_grid(grid);
  if (x0.size() != net.species_count()) throw DimensionError("initial state has wrong dimension");
  const SimConfig cfg = ensemble_config(grid, opts);
  const std::size_t G = grid.size();
  const acc shift = static_cast<acc>(f(x0));
  struct Acc {
    std::size_t n = 0, excluded = 0;
    acc s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  };
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<std::vector<Acc>> partial(blocks);
  parallel_blocks(n, kBlock, opts.threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
    std::vector<Acc> accs(G);
    for (std::size_t i = begin; i < end; ++i) {
      const Trajectory tr = run_one(net, x0, cfg, derive_seed(seed, i), opts.method);
      for (std::size_t g = 0; g < G; ++g) {
        auto& a = accs[g];
        if (g >= tr.grid_filled) {
          ++a.excluded;
          continue;
        }
        const acc y = static_cast<acc>(f(tr.grid_state(g))) - shift;
        const acc y2 = y * y;
        ++a.n;
        a.s1 += y;
        a.s2 += y2;
        a.s3 += y2 * y;
        a.s4 += y2 * y2;
      }
    }
    partial[b] = std::move(accs);
  });

  std::vector<ObservableRow> rows;
  for (std::size_t g = 0; g < G; ++g) {
    Acc tot;
    for (const auto& blk : partial) {
      tot.n += blk[g].n;
      tot.excluded += blk[g].excluded;
      tot.s1 += blk[g].s1;
      tot.s2 += blk[g].s2;
      tot.s3 += blk[g].s3;
      tot.s4 += blk[g].s4;
    }
    ObservableRow row;
    row.time = grid[g];
    row.n = tot.n;
    row.excluded = tot.excluded;
    if (tot.n > 1) {
      const acc cnt = static_cast<acc>(tot.n);
      const acc m = tot.s1 / cnt, e2 = tot.s2 / cnt, e3 = tot.s3 / cnt, e4 = tot.s4 / cnt;
      const acc c2 = std::max<acc>(0, e2 - m * m);
      const acc c4 = std::max<acc>(0, e4 - 4 * m * e3 + 6 * m * m * e2 - 3 * m * m * m * m);
      const acc var = c2 * cnt / (cnt - 1);
      row.mean = static_cast<double>(shift + m);
      row.mean_se = static_cast<double>(std::sqrt(var / cnt));
      row.var = static_cast<double>(var);
      row.var_se = static_cast<double>(std::sqrt(std::max<acc>(0, c4 - c2 * c2 * (cnt - 3) / (cnt - 1)) / cnt));
    }
    rows.push_back(row);
  }
  return rows;
}

RmsCurve coupled_rms(const ReactionNetwork& net, const State& x0, const State& y0, const PerturbationSpec& pert,
                     const std::vector<double>& grid, std::size_t n, std::uint64_t seed, const EnsembleOptions& opts,
                     int component) {
  if (n < 2) throw std::invalid_argument("coupled ensemble needs at least two pairs");
  check_grid(grid);
  const std::size_t G = grid.size(), D = net.species_count();
  if (component >= static_cast<int>(D)) throw DimensionError("component index out of range");
  if (y0.size() != D) throw DimensionError("perturbed initial state has wrong dimension");
  const ReactionNetwork other = pert.deltas.empty() ? net : perturb_network(net, pert);
  const SimConfig cfg = ensemble_config(grid, opts);

  struct Acc {
    std::size_t n = 0;
    acc d2 = 0, d4 = 0;
    std::vector<acc> sx, sy, qx, qy;
  };
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<std::vector<Acc>> partial(blocks);
  parallel_blocks(n, kBlock, opts.threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
    std::vector<Acc> accs(G);
    for (auto& a : accs) {
      a.sx.assign(D, 0);
      a.sy.assign(D, 0);
      a.qx.assign(D, 0);
      a.qy.assign(D, 0);
    }
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint64_t s = derive_seed(seed, i);
      const Trajectory tx = run_one(net, x0, cfg, s, Method::NextReaction);
      const Trajectory ty = run_one(other, y0, cfg, s, Method::NextReaction);
      const std::size_t filled = std::min(tx.grid_filled, ty.grid_filled);
      for (std::size_t g = 0; g < filled; ++g) {
        auto& a = accs[g];
        const auto x = tx.grid_state(g), y = ty.grid_state(g);
        acc d2 = 0;
        for (std::size_t d = 0; d < D; ++d) {
          a.sx[d] += x[d];
          a.sy[d] += y[d];
          a.qx[d] += static_cast<acc>(x[d]) * x[d];
          a.qy[d] += static_cast<acc>(y[d]) * y[d];
          if (component < 0 || static_cast<std::size_t>(component) == d) {
            const acc diff = static_cast<acc>(x[d] - y[d]);
            d2 += diff * diff;
          }
        }
        ++a.n;
        a.d2 += d2;
        a.d4 += d2 * d2;
      }
    }
    partial[b] = std::move(accs);
  });

  RmsCurve curve;
  curve.species = net.species();
  curve.component = component;
  for (std::size_t g = 0; g < G; ++g) {
    Acc tot;
    tot.sx.assign(D, 0);
    tot.sy.assign(D, 0);
    tot.qx.assign(D, 0);
    tot.qy.assign(D, 0);
    for (const auto& blk : partial) {
      tot.n += blk[g].n;
      tot.d2 += blk[g].d2;
      tot.d4 += blk[g].d4;
      for (std::size_t d = 0; d < D; ++d) {
        tot.sx[d] += blk[g].sx[d];
        tot.sy[d] += blk[g].sy[d];
        tot.qx[d] += blk[g].qx[d];
        tot.qy[d] += blk[g].qy[d];
      }
    }
    RmsRow row;
    row.time = grid[g];
    row.n = tot.n;
    if (tot.n > 0) {
      const acc cnt = static_cast<acc>(tot.n);
      const acc m = tot.d2 / cnt;
      const acc v = tot.n > 1 ? std::max<acc>(0, (tot.d4 / cnt - m * m) * cnt / (cnt - 1)) : 0;
      row.msd = static_cast<double>(m);
      row.msd_se = static_cast<double>(std::sqrt(v / cnt));
      row.rms = std::sqrt(row.msd);
      row.rms_se = row.rms > 0 ? row.msd_se / (2 * row.rms) : 0.0;
      for (std::size_t d = 0; d < D; ++d) {
        const acc mx = tot.sx[d] / cnt, my = tot.sy[d] / cnt;
        row.mean_x.push_back(static_cast<double>(mx));
        row.mean_y.push_back(static_cast<double>(my));
        auto se = [&](acc q, acc mean) {
          const acc var = tot.n > 1 ? std::max<acc>(0, (q / cnt - mean * mean) * cnt / (cnt - 1)) : 0;
          return static_cast<double>(std::sqrt(var / cnt));
        };
        row.se_x.push_back(se(tot.qx[d], mx));
        row.se_y.push_back(se(tot.qy[d], my));
      }
    }
    curve.rows.push_back(std::move(row));
  }
  return curve;
}

}  // namespace jkl
