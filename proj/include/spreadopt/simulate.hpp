#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "spreadopt/market.hpp"
#include "spreadopt/merton.hpp"

namespace spreadopt {

enum class SpreadInit {
  stationary,  // z0 ~ N(0, sigma_z2/(2 kappa)), the stationary law
  fixed,       // z0 = SimConfig::z0, for conditional comparisons
};

struct SimConfig {
  std::int64_t n_paths = 1;
  std::int64_t n_steps = 1;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  double x0 = 1.0;
  SpreadInit z0_mode = SpreadInit::stationary;
  double z0 = 0.0;  // read only when z0_mode == fixed
};

/// Deterministic Markov trading rule (z, t) -> dollar-fraction weights.
struct Strategy {
  std::string label;
  std::function<Vec2(double z, double t)> weights;
};

Strategy zero_strategy();
Strategy optimal_strategy(const MertonSolution& sol);
/// The market-neutral closed form; requires the condition to hold.
Strategy mn_strategy(const MarketParams& p, double gamma, double horizon);
/// Any fixed market-neutral rule pi = slope * z * (1, -c): the class whose
/// wealth depends on the spread path only, regardless of the condition.
Strategy neutral_rule_strategy(const MarketParams& p, double slope);
Strategy scaled_strategy(const Strategy& base, double scale);

/// Simulated paths on the uniform grid. Increment arrays are n_paths rows of
/// n_steps columns; level arrays have n_steps + 1 columns. Row-major.
struct PathBundle {
  std::int64_t n_paths = 0;
  std::int64_t n_steps = 0;
  std::vector<double> times;  // n_steps + 1 nodes, times[0] = 0
  std::vector<double> w1_inc, w2_inc, wz_inc;
  std::vector<double> z, s1, s2, x;

  std::size_t inc_index(std::int64_t path, std::int64_t step) const {
    return static_cast<std::size_t>(path * n_steps + step);
  }
  std::size_t node_index(std::int64_t path, std::int64_t node) const {
    return static_cast<std::size_t>(path * (n_steps + 1) + node);
  }
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_paths = 0;
  double utility_gamma = 0.0;
};

/// Full-path simulation. The spread advances by its exact Gaussian
/// transition; the spread Brownian increment is reconstructed from it, the
/// orthogonal complement is drawn independently, and prices and wealth evolve
/// in log space (positivity is structural). The log-spread identity
/// z = log s1 - c log s2 + (sigma1^2 - c sigma2^2) t / 2 then holds to
/// machine precision at every node. Initial prices: s2 = 1, s1 = e^{z0}.
PathBundle simulate(const MarketParams& p, const Strategy& strat,
                    const SimConfig& cfg);

/// Mean and standard error of the terminal CRRA utility
/// (x_T^{1-gamma} - 1)/(1-gamma). Bit-identical for any worker count: paths
/// are keyed by counter-based substreams, partial sums are accumulated per
/// fixed 4096-path block with compensated summation and combined in block
/// order. workers <= 0 means one worker per hardware thread.
McEstimate mc_expected_utility(const MarketParams& p, const Strategy& strat,
                               double gamma, const SimConfig& cfg,
                               int workers = 1);

/// The bundle and its orthogonal mirror: identical spread-Brownian stream,
/// negated orthogonal stream. Spread paths are bit-identical across the
/// pair; price paths differ; wealth agrees exactly when (and only when) the
/// strategy is market-neutral.
std::pair<PathBundle, PathBundle> make_orthogonal_pair(const MarketParams& p,
                                                       const Strategy& strat,
                                                       const SimConfig& cfg);

}  // namespace spreadopt
