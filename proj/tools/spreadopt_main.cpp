#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spreadopt/analysis.hpp"
#include "spreadopt/report_io.hpp"

namespace {

using nlohmann::json;
using namespace spreadopt;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;    // unusable input: flags, files, domains
constexpr int kExitVerdict = 2;  // valid input, negative mathematical verdict

struct CommonOpts {
  std::string params_path;
  std::optional<double> alpha1, alpha2, sigma1, sigma2, rho, c;
  std::string format = "text";
  std::string out_dir;
  std::uint64_t seed = kDefaultSeed;
  int workers = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("-p,--params", o.params_path,
                  "JSON file with alpha1, alpha2, sigma1, sigma2, rho, c");
  cmd->add_option("--alpha1", o.alpha1, "override alpha1");
  cmd->add_option("--alpha2", o.alpha2, "override alpha2");
  cmd->add_option("--sigma1", o.sigma1, "override sigma1");
  cmd->add_option("--sigma2", o.sigma2, "override sigma2");
  cmd->add_option("--rho", o.rho, "override rho");
  cmd->add_option("--c", o.c, "override c");
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--out-dir", o.out_dir,
                  "directory for plot-ready CSV tables");
  cmd->add_option("--seed", o.seed, "random seed (echoed in all output)");
  cmd->add_option("--workers", o.workers,
                  "worker threads, 0 = all cores (results do not depend on "
                  "this)");
}

MarketParams load_market(const CommonOpts& o) {
  MarketParams p;
  bool have_file = !o.params_path.empty();
  if (have_file) {
    p = parse_market_file(o.params_path);
  } else {
    const bool all_flags = o.alpha1 && o.alpha2 && o.sigma1 && o.sigma2 &&
                           o.rho && o.c;
    if (!all_flags) {
      throw InputError(
          "provide --params FILE or all six of --alpha1 --alpha2 --sigma1 "
          "--sigma2 --rho --c");
    }
  }
  if (o.alpha1) p.alpha1 = *o.alpha1;
  if (o.alpha2) p.alpha2 = *o.alpha2;
  if (o.sigma1) p.sigma1 = *o.sigma1;
  if (o.sigma2) p.sigma2 = *o.sigma2;
  if (o.rho) p.rho = *o.rho;
  if (o.c) p.c = *o.c;
  return validate_market(p);
}

void dump_tables(const ExperimentReport& rep, const std::string& out_dir) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  for (const NumericTable& t : rep.tables) {
    write_table_csv(t, out_dir + "/" + t.name + ".csv");
  }
}

void print_report(const ExperimentReport& rep, const CommonOpts& o,
                  const std::function<void(json&)>& extend = {}) {
  if (o.format == "json") {
    json j = report_to_json(rep);
    if (extend) extend(j);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << render_text(rep);
  }
  dump_tables(rep, o.out_dir);
}

json spread_to_json(const SpreadParams& s) {
  return {{"kappa", s.kappa},
          {"sigma_z2", s.sigma_z2},
          {"lambda", {s.lambda.x, s.lambda.y}},
          {"stationary_var", s.stationary_var},
          {"gamma0", s.gamma0}};
}

int cmd_analyze(const CommonOpts& o) {
  const MarketParams p = load_market(o);
  const SpreadParams s = derive_spread(p);
  ExperimentReport rep = run_wellposedness_analysis(p);
  rep.seed = o.seed;
  if (o.format == "text") {
    std::cout << "spread: kappa=" << s.kappa << " sigma_z2=" << s.sigma_z2
              << " lambda=(" << s.lambda.x << ", " << s.lambda.y
              << ") stationary_var=" << s.stationary_var
              << " gamma0=" << s.gamma0 << "\n";
  }
  print_report(rep, o, [&s](json& j) { j["spread"] = spread_to_json(s); });
  if (!rep.all_passed()) return kExitVerdict;
  return rep.condition.holds ? kExitOk : kExitVerdict;
}

int cmd_solve(const CommonOpts& o, double gamma, double horizon, double z,
              double t, double x) {
  const MarketParams p = load_market(o);
  const MertonSolution sol = merton_specialize(p, gamma, horizon);
  if (t < 0.0 || t > horizon) {
    throw DomainError("--t must lie in [0, horizon]");
  }
  const double tau = horizon - t;
  const double h = riccati_h(sol.spec, tau);
  const double g = riccati_g(sol.spec, tau);
  const double v = value_function(sol, x, z, t);
  const Vec2 pi = optimal_weights(sol, z, t);
  const WellPosednessReport wp = check_wellposedness(p);
  std::optional<Vec2> mn_pi;
  if (wp.holds && t < horizon) {
    mn_pi = mn_optimal_weights(p, gamma, horizon, z, t);
  }
  if (o.format == "json") {
    json j{{"params", market_to_json(p)},
           {"seed", o.seed},
           {"gamma", gamma},
           {"horizon", horizon},
           {"z", z},
           {"t", t},
           {"x", x},
           {"gamma0", wp.gamma0},
           {"condition_holds", wp.holds},
           {"t_n", std::isfinite(sol.t_n) ? json(sol.t_n) : json("inf")},
           {"h", h},
           {"g", g},
           {"value", v},
           {"pi", {pi.x, pi.y}}};
    j["mn_pi"] = mn_pi ? json{mn_pi->x, mn_pi->y} : json(nullptr);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "params: alpha1=" << p.alpha1 << " alpha2=" << p.alpha2
              << " sigma1=" << p.sigma1 << " sigma2=" << p.sigma2
              << " rho=" << p.rho << " c=" << p.c << "\n"
              << "seed: " << o.seed << "\n"
              << "gamma=" << gamma << " horizon=" << horizon << " z=" << z
              << " t=" << t << " x=" << x << "\n"
              << "gamma0=" << wp.gamma0 << " T_N="
              << (std::isfinite(sol.t_n) ? std::to_string(sol.t_n) : "inf")
              << "\n"
              << "h=" << h << " g=" << g << "\n"
              << "value=" << v << "\n"
              << "pi=(" << pi.x << ", " << pi.y << ")\n";
    if (mn_pi) {
      std::cout << "mn_pi=(" << mn_pi->x << ", " << mn_pi->y << ")\n";
    } else if (wp.holds) {
      std::cout << "mn_pi: undefined at t = horizon (limit equals pi)\n";
    } else {
      std::cout << "mn_pi: not applicable (condition does not hold)\n";
    }
  }
  return kExitOk;
}

int cmd_simulate(const CommonOpts& o, double gamma, double horizon,
                 std::int64_t paths, std::int64_t steps, double x0,
                 const std::optional<double>& z0, const std::string& strategy,
                 double scale, const std::string& out_file) {
  const MarketParams p = load_market(o);
  SimConfig cfg;
  cfg.n_paths = paths;
  cfg.n_steps = steps;
  cfg.horizon = horizon;
  cfg.seed = o.seed;
  cfg.x0 = x0;
  if (z0) {
    cfg.z0_mode = SpreadInit::fixed;
    cfg.z0 = *z0;
  }
  Strategy strat = [&] {
    if (strategy == "zero") return zero_strategy();
    if (strategy == "mn") return mn_strategy(p, gamma, horizon);
    return optimal_strategy(merton_specialize(p, gamma, horizon));
  }();
  if (scale != 1.0) strat = scaled_strategy(strat, scale);
  const McEstimate est = mc_expected_utility(p, strat, gamma, cfg, o.workers);
  if (o.format == "json") {
    json j{{"params", market_to_json(p)},
           {"seed", o.seed},
           {"strategy", strat.label},
           {"gamma", gamma},
           {"horizon", horizon},
           {"n_paths", paths},
           {"n_steps", steps},
           {"x0", x0},
           {"z0", z0 ? json(*z0) : json("stationary")},
           {"utility_mean", est.mean},
           {"utility_std_error", est.std_error}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "params: alpha1=" << p.alpha1 << " alpha2=" << p.alpha2
              << " sigma1=" << p.sigma1 << " sigma2=" << p.sigma2
              << " rho=" << p.rho << " c=" << p.c << "\n"
              << "seed: " << cfg.seed << "\n"
              << "strategy: " << strat.label << "\n"
              << "paths=" << paths << " steps=" << steps
              << " horizon=" << horizon << " x0=" << x0 << " z0="
              << (z0 ? std::to_string(*z0) : std::string("stationary"))
              << "\n"
              << "utility: mean=" << est.mean << " se=" << est.std_error
              << " gamma=" << gamma << "\n";
  }
  if (!out_file.empty()) {
    const PathBundle bundle = simulate(p, strat, cfg);
    const bool gz = out_file.size() > 3 &&
                    out_file.compare(out_file.size() - 3, 3, ".gz") == 0;
    write_path_csv(bundle, out_file, gz);
    if (o.format == "text") {
      std::cout << "paths written to " << out_file << "\n";
    }
  }
  return kExitOk;
}

int cmd_verify(const CommonOpts& o, double gamma, double horizon,
               std::int64_t paths, std::int64_t steps, double z0) {
  const MarketParams p = load_market(o);
  VerifyConfig cfg;
  cfg.n_paths = paths;
  cfg.n_steps = steps;
  cfg.seed = o.seed;
  cfg.z0 = z0;
  cfg.workers = o.workers;
  const ExperimentReport rep = run_verification_suite(p, gamma, horizon, cfg);
  print_report(rep, o);
  return rep.all_passed() ? kExitOk : kExitVerdict;
}

int cmd_pde_check(const CommonOpts& o, double gamma, double horizon, int nz,
                  int nt, double theta, const std::string& boundary,
                  double z_span) {
  const MarketParams p = load_market(o);
  const MertonSolution sol = merton_specialize(p, gamma, horizon);
  FdGrid grid;
  grid.nz = nz;
  grid.nt = nt;
  grid.theta = theta;
  const FdBoundary bc = boundary == "zero-curvature"
                            ? FdBoundary::zero_curvature
                            : FdBoundary::ansatz;
  const FdSolution fd = solve_cauchy_fd(sol.spec, horizon, grid, bc);
  const double g_T = riccati_g(sol.spec, horizon);
  const double h_T = riccati_h(sol.spec, horizon);
  ExperimentReport rep;
  rep.title = "pde-check";
  rep.params = p;
  rep.seed = o.seed;
  rep.condition = check_wellposedness(p);
  NumericTable profile;
  profile.name = "fd-profile";
  profile.columns = {"z", "phi_fd", "phi_closed_form"};
  double err = 0.0;
  for (std::size_t i = 0; i < fd.z.size(); ++i) {
    if (std::abs(fd.z[i]) > z_span) continue;
    const double ref = std::exp(g_T + 0.5 * h_T * fd.z[i] * fd.z[i]);
    profile.rows.push_back({fd.z[i], fd.phi[i], ref});
    err = std::max(err, std::abs(fd.phi[i] - ref) / ref);
  }
  rep.tables.push_back(std::move(profile));
  rep.verdicts.push_back({"fd-vs-closed-form", err <= 1e-3, err, 1e-3});
  print_report(rep, o);
  return rep.all_passed() ? kExitOk : kExitVerdict;
}

int cmd_blowup(const CommonOpts& o, double gamma, double x, double z,
               int k_max) {
  const MarketParams p = load_market(o);
  ExperimentReport rep = run_blowup_sweep(p, gamma, x, z, k_max);
  rep.seed = o.seed;
  print_report(rep, o);
  return rep.all_passed() ? kExitOk : kExitVerdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Closed-form optimal pairs trading on a cointegrated spread: "
      "well-posedness analysis, closed-form solve, simulation and "
      "oracle-based verification."};
  app.require_subcommand(1);

  CommonOpts common;

  auto* analyze = app.add_subcommand(
      "analyze", "spread parameters, gamma0 and the market-neutrality "
                 "condition verdict");
  add_common(analyze, common);

  auto* solve = app.add_subcommand(
      "solve", "evaluate g, h, the value function and the optimal weights");
  add_common(solve, common);
  double s_gamma = 0.5, s_horizon = 1.0, s_z = 0.0, s_t = 0.0, s_x = 1.0;
  solve->add_option("--gamma", s_gamma, "relative risk aversion in (0,1)");
  solve->add_option("--horizon", s_horizon, "investment horizon T");
  solve->add_option("--z", s_z, "log-spread level");
  solve->add_option("--t", s_t, "evaluation time in [0, T]");
  solve->add_option("--x", s_x, "wealth level");

  auto* simulate = app.add_subcommand(
      "simulate", "Monte Carlo utility of a strategy; optional path dump");
  add_common(simulate, common);
  double m_gamma = 0.5, m_horizon = 1.0, m_x0 = 1.0, m_scale = 1.0;
  std::int64_t m_paths = 10000, m_steps = 400;
  std::optional<double> m_z0;
  std::string m_strategy = "optimal", m_out;
  simulate->add_option("--gamma", m_gamma, "relative risk aversion in (0,1)");
  simulate->add_option("--horizon", m_horizon, "investment horizon T");
  simulate->add_option("--paths", m_paths, "number of Monte Carlo paths");
  simulate->add_option("--steps", m_steps, "time steps per path");
  simulate->add_option("--x0", m_x0, "initial wealth");
  simulate->add_option("--z0", m_z0,
                       "fixed initial spread (default: stationary draw)");
  simulate->add_option("--strategy", m_strategy, "trading rule")
      ->check(CLI::IsMember({"optimal", "mn", "zero"}));
  simulate->add_option("--scale", m_scale, "multiply the weights by this");
  simulate->add_option("--out", m_out,
                       "write the paths as CSV (gzip when it ends in .gz)");

  auto* verify = app.add_subcommand(
      "verify", "run the five-section closed-form verification suite");
  add_common(verify, common);
  double v_gamma = 0.5, v_horizon = 1.0, v_z0 = 1.0;
  std::int64_t v_paths = 100000, v_steps = 400;
  verify->add_option("--gamma", v_gamma, "relative risk aversion in (0,1)");
  verify->add_option("--horizon", v_horizon, "investment horizon T");
  verify->add_option("--paths", v_paths, "Monte Carlo paths per section");
  verify->add_option("--steps", v_steps, "time steps per path");
  verify->add_option("--z0", v_z0, "common initial spread of all paths");

  auto* pde = app.add_subcommand(
      "pde-check", "finite-difference solution vs the closed-form ansatz");
  add_common(pde, common);
  double p_gamma = 0.5, p_horizon = 1.0, p_theta = 0.5, p_span = 3.0;
  int p_nz = 801, p_nt = 2000;
  std::string p_boundary = "ansatz";
  pde->add_option("--gamma", p_gamma, "relative risk aversion in (0,1)");
  pde->add_option("--horizon", p_horizon, "investment horizon T");
  pde->add_option("--nz", p_nz, "spatial nodes (odd)");
  pde->add_option("--nt", p_nt, "time steps (even)");
  pde->add_option("--theta", p_theta, "0.5 Crank-Nicolson, 1.0 implicit");
  pde->add_option("--boundary", p_boundary, "boundary condition")
      ->check(CLI::IsMember({"ansatz", "zero-curvature"}));
  pde->add_option("--z-span", p_span, "compare on |z| <= z-span");

  auto* blowup = app.add_subcommand(
      "blowup", "value-function blow-up toward the critical horizon");
  add_common(blowup, common);
  double b_gamma = 0.25, b_x = 1.0, b_z = 1.0;
  int b_kmax = 6;
  blowup->add_option("--gamma", b_gamma,
                     "relative risk aversion, must be below gamma0");
  blowup->add_option("--x", b_x, "wealth argument");
  blowup->add_option("--z", b_z, "spread argument");
  blowup->add_option("--k-max", b_kmax,
                     "sweep horizons T_N (1 - 10^-k), k = 1..k-max");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(common);
    if (solve->parsed())
      return cmd_solve(common, s_gamma, s_horizon, s_z, s_t, s_x);
    if (simulate->parsed())
      return cmd_simulate(common, m_gamma, m_horizon, m_paths, m_steps, m_x0,
                          m_z0, m_strategy, m_scale, m_out);
    if (verify->parsed())
      return cmd_verify(common, v_gamma, v_horizon, v_paths, v_steps, v_z0);
    if (pde->parsed())
      return cmd_pde_check(common, p_gamma, p_horizon, p_nz, p_nt, p_theta,
                           p_boundary, p_span);
    if (blowup->parsed())
      return cmd_blowup(common, b_gamma, b_x, b_z, b_kmax);
    std::cerr << "error: no subcommand\n";
    return kExitInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DegenerateVolatility& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NonMeanReverting& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NonPositiveWealth& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    // IllPosedHorizon, ConditionViolated, NotIllPosed, EscapeTimeExceeded,
    // GridTooCoarse, TerminalTime, NonFiniteWeight: the input was readable,
    // the mathematics said no.
    std::cerr << "verdict: " << e.what() << "\n";
    return kExitVerdict;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
