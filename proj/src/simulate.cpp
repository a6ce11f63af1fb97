#include "spreadopt/simulate.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "spreadopt/rng.hpp"

namespace spreadopt {

namespace {

constexpr std::int64_t kMcBlock = 4096;  // paths per reduction block

// Immutable per-run coefficients shared by every path.
struct StepEngine {
  MarketParams p;
  SpreadParams s;
  LowerTri2 sigma;
  Sym2 gramm;
  Vec2 alpha;
  double sigma_z;
  double dt;
  double sqrt_dt;
  double decay;     // exp(-kappa dt)
  double innov_sd;  // sqrt(sigma_z2 (1 - decay^2) / (2 kappa))
  double stat_sd;   // sqrt of the stationary variance
  Vec2 u;           // Sigma^T (1,-c) / sigma_z, unit spread loading
  Vec2 uperp;       // 90-degree rotation of u
  Vec2 sigma_u;     // Sigma u
  Vec2 sigma_uperp; // Sigma uperp

  StepEngine(const MarketParams& params, const SimConfig& cfg)
      : p(validate_market(params)), s(derive_spread(params)) {
    if (cfg.n_paths < 1 || cfg.n_steps < 1) {
      throw DomainError("n_paths and n_steps must be >= 1");
    }
    if (!(cfg.horizon > 0.0)) {
      throw DomainError("horizon must be > 0");
    }
    if (!(cfg.x0 > 0.0)) {
      throw NonPositiveWealth("x0 must be > 0, got " + std::to_string(cfg.x0));
    }
    sigma = sigma_matrix(p);
    gramm = gram(sigma);
    alpha = {p.alpha1, p.alpha2};
    sigma_z = std::sqrt(s.sigma_z2);
    dt = cfg.horizon / static_cast<double>(cfg.n_steps);
    sqrt_dt = std::sqrt(dt);
    decay = std::exp(-s.kappa * dt);
    innov_sd = std::sqrt(s.sigma_z2 * (1.0 - decay * decay) / (2.0 * s.kappa));
    stat_sd = std::sqrt(s.stationary_var);
    u = (1.0 / sigma_z) * apply_transpose(sigma, Vec2{1.0, -p.c});
    uperp = {-u.y, u.x};
    sigma_u = apply(sigma, u);
    sigma_uperp = apply(sigma, uperp);
  }

  double initial_z(const SimConfig& cfg, const PathStream& rng) const {
    return cfg.z0_mode == SpreadInit::fixed ? cfg.z0
                                            : stat_sd * rng.initial_normal();
  }
};

struct StepState {
  double z = 0.0;
  double log_x = 0.0;   // log(x / x0)
  double log_s1 = 0.0;  // log s1 (s1_0 = e^{z0})
  double log_s2 = 0.0;  // log s2 (s2_0 = 1)
};

struct StepOutput {
  double dw1 = 0.0;
  double dw2 = 0.0;
  double dwz = 0.0;
};

// Advances one path by one step. mirror = -1 negates the orthogonal
// Brownian component (and nothing else).
StepOutput advance(const StepEngine& e, const Strategy& strat, double t,
                   const NormalPair& n, double mirror, StepState& st) {
  const Vec2 pi = strat.weights(st.z, t);
  if (!std::isfinite(pi.x) || !std::isfinite(pi.y)) {
    throw NonFiniteWeight("strategy '" + strat.label +
                          "' returned a non-finite weight at z = " +
                          std::to_string(st.z) + ", t = " + std::to_string(t));
  }
  const double z_next = e.decay * st.z + e.innov_sd * n.first;
  // Exact-transition spread increment recast as a Brownian increment: the
  // log-spread identity then telescopes exactly along the path.
  const double dwz = (z_next - st.z + e.s.kappa * st.z * e.dt) / e.sigma_z;
  const double dperp = e.sqrt_dt * n.second * mirror;
  const Vec2 dw = dwz * e.u + dperp * e.uperp;
  const Vec2 sdw = apply(e.sigma, dw);  // Sigma dW, the price shocks
  const double z_left = st.z;
  st.log_s1 +=
      (e.p.alpha1 * z_left - 0.5 * e.p.sigma1 * e.p.sigma1) * e.dt + sdw.x;
  st.log_s2 +=
      (e.p.alpha2 * z_left - 0.5 * e.p.sigma2 * e.p.sigma2) * e.dt + sdw.y;
  st.log_x += (dot(pi, e.alpha) * z_left - 0.5 * quad(e.gramm, pi)) * e.dt +
              dot(pi, sdw);
  st.z = z_next;
  return {dw.x, dw.y, dwz};
}

PathBundle simulate_impl(const MarketParams& p, const Strategy& strat,
                         const SimConfig& cfg, double mirror) {
  const StepEngine e(p, cfg);
  PathBundle b;
  b.n_paths = cfg.n_paths;
  b.n_steps = cfg.n_steps;
  b.times.resize(cfg.n_steps + 1);
  for (std::int64_t k = 0; k <= cfg.n_steps; ++k) {
    b.times[k] = k == cfg.n_steps ? cfg.horizon
                                  : static_cast<double>(k) * e.dt;
  }
  const std::size_t n_inc = static_cast<std::size_t>(cfg.n_paths * cfg.n_steps);
  const std::size_t n_node =
      static_cast<std::size_t>(cfg.n_paths * (cfg.n_steps + 1));
  b.w1_inc.resize(n_inc);
  b.w2_inc.resize(n_inc);
  b.wz_inc.resize(n_inc);
  b.z.resize(n_node);
  b.s1.resize(n_node);
  b.s2.resize(n_node);
  b.x.resize(n_node);

  // Eq.-level definition of the spread Brownian increment, recomputed from
  // the stored asset increments so the invariant holds by construction.
  const double load1 = e.p.sigma1 - e.p.c * e.p.sigma2 * e.p.rho;
  const double load2 =
      -e.p.c * e.p.sigma2 * std::sqrt(1.0 - e.p.rho * e.p.rho);

  for (std::int64_t path = 0; path < cfg.n_paths; ++path) {
    const PathStream rng(cfg.seed, static_cast<std::uint64_t>(path));
    StepState st;
    st.z = e.initial_z(cfg, rng);
    st.log_s1 = st.z;
    b.z[b.node_index(path, 0)] = st.z;
    b.s1[b.node_index(path, 0)] = std::exp(st.z);
    b.s2[b.node_index(path, 0)] = 1.0;
    b.x[b.node_index(path, 0)] = cfg.x0;
    for (std::int64_t k = 0; k < cfg.n_steps; ++k) {
      const StepOutput o = advance(e, strat, b.times[k],
                                   rng.step_normals(k), mirror, st);
      b.w1_inc[b.inc_index(path, k)] = o.dw1;
      b.w2_inc[b.inc_index(path, k)] = o.dw2;
      b.wz_inc[b.inc_index(path, k)] =
          (load1 * o.dw1 + load2 * o.dw2) / e.sigma_z;
      b.z[b.node_index(path, k + 1)] = st.z;
      b.s1[b.node_index(path, k + 1)] = std::exp(st.log_s1);
      b.s2[b.node_index(path, k + 1)] = std::exp(st.log_s2);
      b.x[b.node_index(path, k + 1)] = cfg.x0 * std::exp(st.log_x);
    }
  }
  return b;
}

// Neumaier-compensated accumulator: adds doubles of any magnitude order
// without losing the small ones.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct BlockMoments {
  double sum_d = 0.0;   // sum of u_i - u_ref
  double sum_d2 = 0.0;  // sum of (u_i - u_ref)^2
};

}  // namespace

Strategy zero_strategy() {
  return {"zero", [](double, double) { return Vec2{0.0, 0.0}; }};
}

Strategy optimal_strategy(const MertonSolution& sol) {
  return {"optimal",
          [sol](double z, double t) { return optimal_weights(sol, z, t); }};
}

Strategy mn_strategy(const MarketParams& p, double gamma, double horizon) {
  const WellPosednessReport wp = check_wellposedness(p);
  if (!wp.holds) {
    throw ConditionViolated(
        "market-neutral strategy requires the drift identity; residual = " +
        std::to_string(wp.residual));
  }
  return {"mn-optimal", [p, gamma, horizon](double z, double t) {
            return mn_optimal_weights(p, gamma, horizon, z, t);
          }};
}

Strategy neutral_rule_strategy(const MarketParams& p, double slope) {
  const double c = validate_market(p).c;
  return {"mn-rule", [slope, c](double z, double /*t*/) {
            const double pi1 = slope * z;
            return Vec2{pi1, -c * pi1};
          }};
}

Strategy scaled_strategy(const Strategy& base, double scale) {
  if (!std::isfinite(scale)) {
    throw DomainError("scale must be finite");
  }
  const auto rule = base.weights;
  return {base.label + " x " + std::to_string(scale),
          [rule, scale](double z, double t) { return scale * rule(z, t); }};
}

PathBundle simulate(const MarketParams& p, const Strategy& strat,
                    const SimConfig& cfg) {
  return simulate_impl(p, strat, cfg, +1.0);
}

std::pair<PathBundle, PathBundle> make_orthogonal_pair(const MarketParams& p,
                                                       const Strategy& strat,
                                                       const SimConfig& cfg) {
  return {simulate_impl(p, strat, cfg, +1.0),
          simulate_impl(p, strat, cfg, -1.0)};
}

McEstimate mc_expected_utility(const MarketParams& p, const Strategy& strat,
                               double gamma, const SimConfig& cfg,
                               int workers) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("gamma must lie in (0,1), got " + std::to_string(gamma));
  }
  const StepEngine e(p, cfg);
  const double one_m_gamma = 1.0 - gamma;
  const double log_x0 = std::log(cfg.x0);

  // Terminal utility of one path; prices are not needed for utility, so only
  // (z, log wealth) evolve here.
  const auto path_utility = [&](std::int64_t path) {
    const PathStream rng(cfg.seed, static_cast<std::uint64_t>(path));
    StepState st;
    st.z = e.initial_z(cfg, rng);
    for (std::int64_t k = 0; k < cfg.n_steps; ++k) {
      const double t = static_cast<double>(k) * e.dt;
      advance(e, strat, t, rng.step_normals(k), +1.0, st);
    }
    return std::expm1(one_m_gamma * (log_x0 + st.log_x)) / one_m_gamma;
  };

  // Deviations are accumulated around the deterministic path-0 utility, so a
  // degenerate strategy yields mean == u_ref and std_error == 0 exactly.
  const double u_ref = path_utility(0);

  const std::int64_t n_blocks = (cfg.n_paths + kMcBlock - 1) / kMcBlock;
  std::vector<BlockMoments> blocks(static_cast<std::size_t>(n_blocks));
  const auto run_block = [&](std::int64_t blk) {
    const std::int64_t lo = blk * kMcBlock;
    const std::int64_t hi = std::min(lo + kMcBlock, cfg.n_paths);
    CompensatedSum sd, sd2;
    for (std::int64_t path = lo; path < hi; ++path) {
      const double d = path_utility(path) - u_ref;
      sd.add(d);
      sd2.add(d * d);
    }
    blocks[static_cast<std::size_t>(blk)] = {sd.value(), sd2.value()};
  };

  int n_workers = workers > 0
                      ? workers
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (n_workers < 1) n_workers = 1;
  if (n_workers == 1 || n_blocks == 1) {
    for (std::int64_t blk = 0; blk < n_blocks; ++blk) run_block(blk);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::int64_t blk = next.fetch_add(1); blk < n_blocks;
             blk = next.fetch_add(1)) {
          run_block(blk);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Blocks combine in index order regardless of which worker ran them.
  CompensatedSum sum_d, sum_d2;
  for (const BlockMoments& bm : blocks) {
    sum_d.add(bm.sum_d);
    sum_d2.add(bm.sum_d2);
  }
  const double n = static_cast<double>(cfg.n_paths);
  const double d_mean = sum_d.value() / n;
  McEstimate est;
  est.mean = u_ref + d_mean;
  est.n_paths = cfg.n_paths;
  est.utility_gamma = gamma;
  if (cfg.n_paths > 1) {
    const double var =
        std::max(0.0, (sum_d2.value() - n * d_mean * d_mean) / (n - 1.0));
    est.std_error = std::sqrt(var / n);
  }
  return est;
}

}  // namespace spreadopt
