// Command-line front end; everything goes through the public C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cbamp/cbamp.h"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDiverged = 2;

int write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return kExitOk;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open " << path << " for writing\n";
    return kExitUsage;
  }
  out << content;
  return kExitOk;
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  cbamp_string_free(s);
  return out;
}

int report_error(cbamp_status status) {
  std::cerr << "error: " << cbamp_status_name(status) << ": "
            << cbamp_last_error() << "\n";
  return status == CBAMP_ERROR_DIVERGED ? kExitDiverged : kExitUsage;
}

nlohmann::json load_config_file(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw CLI::ValidationError("--config", std::string("invalid JSON: ") + e.what());
  }
  return j;
}

// Experiment-style subcommand: shared flags merged over an optional JSON
// config file; explicitly passed flags win.
struct ExperimentArgs {
  std::string config_path;
  int n = 0;
  std::string alpha, rho;
  double mu_re = 0, mu_im = 0, tau = 0, sigma2 = 0, gamma = 0;
  int iters = 0, trials = 0, se_samples = 0, threads = -1;
  std::uint64_t base_seed = 0;
  std::string algos;
  std::string out;

  CLI::App* attach(CLI::App& app, const std::string& name,
                   const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->add_option("--config", config_path, "JSON config file; flags override");
    cmd->add_option("--n", n, "signal length N");
    cmd->add_option("--alpha", alpha, "measurement rate M/N (value or start:stop:step)");
    cmd->add_option("--rho", rho, "sparsity fraction (value or start:stop:step)");
    cmd->add_option("--mu-re", mu_re, "slab mean, real part");
    cmd->add_option("--mu-im", mu_im, "slab mean, imaginary part");
    cmd->add_option("--tau", tau, "slab variance");
    cmd->add_option("--sigma2", sigma2, "noise variance");
    cmd->add_option("--gamma", gamma, "matrix entry variance (default 1/N)");
    cmd->add_option("--iters", iters, "iteration budget");
    cmd->add_option("--trials", trials, "trials per point");
    cmd->add_option("--seed", base_seed, "base seed; trial t uses base+t");
    cmd->add_option("--algos", algos, "comma-separated: cbamp,real-amp,ep,se");
    cmd->add_option("--out", out, "output CSV path (default stdout)");
    cmd->add_option("--se-samples", se_samples, "state-evolution MC samples");
    cmd->add_option("--threads", threads, "worker cap (0 = auto)");
    return cmd;
  }

  // config-file values first, then explicit flags
  nlohmann::json merge(const CLI::App* cmd) const {
    nlohmann::json j = load_config_file(config_path);
    if (cmd->count("--n")) j["n"] = n;
    if (cmd->count("--alpha")) j["alpha"] = alpha;
    if (cmd->count("--rho")) j["rho"] = rho;
    if (cmd->count("--mu-re")) j["mu_re"] = mu_re;
    if (cmd->count("--mu-im")) j["mu_im"] = mu_im;
    if (cmd->count("--tau")) j["tau"] = tau;
    if (cmd->count("--sigma2")) j["sigma2"] = sigma2;
    if (cmd->count("--gamma")) j["gamma"] = gamma;
    if (cmd->count("--iters")) j["iters"] = iters;
    if (cmd->count("--trials")) j["trials"] = trials;
    if (cmd->count("--seed")) j["base_seed"] = base_seed;
    if (cmd->count("--algos")) j["algos"] = algos;
    if (cmd->count("--out")) j["out"] = out;
    if (cmd->count("--se-samples")) j["se_samples"] = se_samples;
    if (cmd->count("--threads")) j["threads"] = threads;
    return j;
  }
};

struct ProblemArgs {
  std::int64_t m = 0, n = 256;
  double alpha = 0.5;
  double gamma = 0, sigma2 = 0, rho = 0.1, mu_re = 0, mu_im = 0, tau = 1;
  std::uint64_t seed = 1, seed_x = 0, seed_a = 0, seed_w = 0;
  std::string problem_file;

  void attach(CLI::App* cmd, bool with_file) {
    cmd->add_option("--n", n, "signal length N");
    cmd->add_option("--m", m, "measurements M (overrides --alpha)");
    cmd->add_option("--alpha", alpha, "measurement rate M/N");
    cmd->add_option("--gamma", gamma, "matrix entry variance (default 1/N)");
    cmd->add_option("--sigma2", sigma2, "noise variance");
    cmd->add_option("--rho", rho, "sparsity fraction");
    cmd->add_option("--mu-re", mu_re, "slab mean, real part");
    cmd->add_option("--mu-im", mu_im, "slab mean, imaginary part");
    cmd->add_option("--tau", tau, "slab variance");
    cmd->add_option("--seed", seed, "base seed for (seed_x, seed_a, seed_w)");
    cmd->add_option("--seed-x", seed_x, "signal seed");
    cmd->add_option("--seed-a", seed_a, "matrix seed");
    cmd->add_option("--seed-w", seed_w, "noise seed");
    if (with_file) {
      cmd->add_option("--problem", problem_file, "problem JSON file (overrides flags)");
    }
  }

  cbamp_problem_spec spec(const CLI::App* cmd) const {
    cbamp_problem_spec s;
    cbamp_problem_spec_init(&s);
    s.n = n;
    s.m = cmd->count("--m") ? m
                            : static_cast<std::int64_t>(alpha * static_cast<double>(n) + 0.5);
    if (s.m < 1) s.m = 1;
    s.gamma = gamma;
    s.sigma2 = sigma2;
    s.rho = rho;
    s.mu_re = mu_re;
    s.mu_im = mu_im;
    s.tau = tau;
    s.seed_x = cmd->count("--seed-x") ? seed_x : 3 * seed + 1;
    s.seed_a = cmd->count("--seed-a") ? seed_a : 3 * seed + 2;
    s.seed_w = cmd->count("--seed-w") ? seed_w : 3 * seed + 3;
    return s;
  }
};

int make_problem(const ProblemArgs& args, const CLI::App* cmd,
                 cbamp_problem** out) {
  cbamp_status status;
  if (!args.problem_file.empty()) {
    std::ifstream in(args.problem_file);
    if (!in) {
      std::cerr << "error: cannot open " << args.problem_file << "\n";
      return kExitUsage;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    status = cbamp_problem_from_json(buf.str().c_str(), out);
  } else {
    const cbamp_problem_spec spec = args.spec(cmd);
    status = cbamp_problem_generate(&spec, out);
  }
  return status == CBAMP_OK ? kExitOk : report_error(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CB-AMP: complex Bayesian approximate message passing"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cbamp_version()));

  // gen
  auto gen_args = std::make_shared<ProblemArgs>();
  CLI::App* gen = app.add_subcommand("gen", "generate a problem instance JSON");
  gen_args->attach(gen, false);
  std::string gen_out;
  gen->add_option("--out", gen_out, "output path (default stdout)");

  // solve
  auto solve_args = std::make_shared<ProblemArgs>();
  CLI::App* solve = app.add_subcommand("solve", "run one solver on one instance");
  solve_args->attach(solve, true);
  std::string solve_algo = "cbamp";
  int solve_iters = 200;
  double solve_tol = 1e-12, solve_floor = 1e-12, solve_damping = 0.0;
  bool no_onsager = false;
  std::string solve_out;
  solve->add_option("--algo", solve_algo, "cbamp | ep | real-amp");
  solve->add_option("--iters", solve_iters, "maximum iterations");
  solve->add_option("--tol", solve_tol, "relative-change stop (0 disables)");
  solve->add_option("--sigma2-floor", solve_floor, "effective sigma^2 floor");
  solve->add_option("--damping", solve_damping, "damping in [0,1), 0 = paper-exact");
  solve->add_flag("--no-onsager", no_onsager, "delete the Onsager reaction term");
  solve->add_option("--out", solve_out, "output path (default stdout)");

  // se
  CLI::App* se = app.add_subcommand("se", "state-evolution trace (CSV t,E,V)");
  cbamp_se_params se_params;
  cbamp_se_params_init(&se_params);
  int se_iters = 50;
  std::string se_out;
  se->add_option("--alpha", se_params.alpha, "measurement rate");
  se->add_option("--gamma-n", se_params.gamma_n, "gamma*N (1 when gamma = 1/N)");
  se->add_option("--sigma2", se_params.sigma2, "noise variance");
  se->add_option("--rho", se_params.rho, "sparsity fraction");
  se->add_option("--mu-re", se_params.mu_re, "slab mean, real part");
  se->add_option("--mu-im", se_params.mu_im, "slab mean, imaginary part");
  se->add_option("--tau", se_params.tau, "slab variance");
  se->add_option("--samples", se_params.mc_samples, "MC samples per step");
  se->add_option("--seed", se_params.seed, "seed");
  se->add_option("--iters", se_iters, "trace length (t = 1 is initialization)");
  se->add_option("--threads", se_params.threads, "worker cap (0 = auto)");
  se->add_option("--out", se_out, "output path (default stdout)");

  // mse-curve / phase / se-boundary
  auto curve_args = std::make_shared<ExperimentArgs>();
  CLI::App* curve = curve_args->attach(app, "mse-curve",
                                       "per-iteration MSE averaged over trials");

  auto phase_args = std::make_shared<ExperimentArgs>();
  CLI::App* phase = phase_args->attach(app, "phase",
                                       "noiseless success-rate sweep over (rho, alpha)");
  std::string phase_mode = "empirical";
  std::string phase_boundary_out;
  double phase_tol = 0.01;
  phase->add_option("--mode", phase_mode, "empirical | se");
  phase->add_option("--boundary-out", phase_boundary_out,
                    "50% crossing CSV path (default <out>.boundary.csv)");
  phase->add_option("--tol", phase_tol, "bisection tolerance (se mode)");

  auto seb_args = std::make_shared<ExperimentArgs>();
  CLI::App* seb = seb_args->attach(app, "se-boundary",
                                   "state-evolution phase boundary (CSV rho,alpha_star)");
  double seb_tol = 0.01;
  seb->add_option("--tol", seb_tol, "bisection tolerance on alpha");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      cbamp_problem* problem = nullptr;
      const int rc = make_problem(*gen_args, gen, &problem);
      if (rc != kExitOk) return rc;
      char* json = nullptr;
      const cbamp_status status = cbamp_problem_to_json(problem, &json);
      cbamp_problem_destroy(problem);
      if (status != CBAMP_OK) return report_error(status);
      return write_output(gen_out, take_string(json) + "\n");
    }

    if (solve->parsed()) {
      cbamp_problem* problem = nullptr;
      const int rc = make_problem(*solve_args, solve, &problem);
      if (rc != kExitOk) return rc;

      cbamp_solver_options opts;
      cbamp_solver_options_init(&opts);
      opts.max_iters = solve_iters;
      opts.tol = solve_tol;
      opts.sigma2_floor = solve_floor;
      opts.damping = solve_damping;
      opts.onsager = no_onsager ? 0 : 1;

      cbamp_algo algo;
      if (solve_algo == "cbamp") algo = CBAMP_ALGO_CBAMP;
      else if (solve_algo == "ep") algo = CBAMP_ALGO_EP;
      else if (solve_algo == "real-amp") algo = CBAMP_ALGO_REAL_AMP;
      else {
        std::cerr << "error: unknown --algo " << solve_algo << "\n";
        cbamp_problem_destroy(problem);
        return kExitUsage;
      }

      cbamp_solution* sol = nullptr;
      cbamp_status status = cbamp_solve(problem, algo, &opts, &sol);
      cbamp_problem_destroy(problem);
      if (status != CBAMP_OK) return report_error(status);

      char* csv = nullptr;
      status = cbamp_solution_trace_csv(sol, &csv);
      if (status != CBAMP_OK) {
        cbamp_solution_destroy(sol);
        return report_error(status);
      }
      std::string text = take_string(csv);
      char line[64];
      std::snprintf(line, sizeof(line), "# final_mse=%.12g\n",
                    cbamp_solution_final_mse(sol));
      text += line;
      const bool diverged = cbamp_solution_diverged(sol) != 0;
      cbamp_solution_destroy(sol);
      const int rc2 = write_output(solve_out, text);
      if (rc2 != kExitOk) return rc2;
      return diverged ? kExitDiverged : kExitOk;
    }

    if (se->parsed()) {
      char* csv = nullptr;
      const cbamp_status status = cbamp_se_run_csv(&se_params, se_iters, &csv);
      if (status != CBAMP_OK) return report_error(status);
      return write_output(se_out, take_string(csv));
    }

    if (curve->parsed()) {
      const nlohmann::json cfg = curve_args->merge(curve);
      char* csv = nullptr;
      const cbamp_status status = cbamp_mse_curve_run(cfg.dump().c_str(), &csv);
      if (status != CBAMP_OK) return report_error(status);
      return write_output(cfg.value("out", std::string()), take_string(csv));
    }

    if (phase->parsed()) {
      nlohmann::json cfg = phase_args->merge(phase);
      if (phase_mode == "se") {
        if (phase->count("--tol")) cfg["tol"] = phase_tol;
        char* csv = nullptr;
        const cbamp_status status = cbamp_se_boundary_run(cfg.dump().c_str(), &csv);
        if (status != CBAMP_OK) return report_error(status);
        return write_output(cfg.value("out", std::string()), take_string(csv));
      }
      if (phase_mode != "empirical") {
        std::cerr << "error: unknown --mode " << phase_mode << "\n";
        return kExitUsage;
      }
      char* grid = nullptr;
      char* boundary = nullptr;
      const cbamp_status status = cbamp_phase_run(cfg.dump().c_str(), &grid, &boundary);
      if (status != CBAMP_OK) return report_error(status);
      const std::string grid_text = take_string(grid);
      const std::string boundary_text = take_string(boundary);
      const std::string out_path = cfg.value("out", std::string());
      if (out_path.empty() && phase_boundary_out.empty()) {
        std::cout << grid_text << "\n" << boundary_text;
        return kExitOk;
      }
      const int rc = write_output(out_path, grid_text);
      if (rc != kExitOk) return rc;
      const std::string bpath = phase_boundary_out.empty()
                                    ? out_path + ".boundary.csv"
                                    : phase_boundary_out;
      return write_output(bpath, boundary_text);
    }

    if (seb->parsed()) {
      nlohmann::json cfg = seb_args->merge(seb);
      cfg["tol"] = seb_tol;
      char* csv = nullptr;
      const cbamp_status status = cbamp_se_boundary_run(cfg.dump().c_str(), &csv);
      if (status != CBAMP_OK) return report_error(status);
      return write_output(cfg.value("out", std::string()), take_string(csv));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
