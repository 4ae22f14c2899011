#include "core/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "core/amp.hpp"
#include "core/csv.hpp"
#include "core/ep.hpp"
#include "core/parallel.hpp"
#include "core/real_amp.hpp"
#include "core/rng.hpp"
#include "core/version.hpp"
#include "json.hpp"

namespace cbamp {

namespace {

constexpr double kSuccessMse = 1e-4;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool known_algo(const std::string& a) {
  return a == "cbamp" || a == "real-amp" || a == "ep" || a == "se";
}

Index rows_for(double alpha, Index n) {
  return std::max<Index>(1, static_cast<Index>(std::llround(alpha * static_cast<double>(n))));
}

ProblemSpec trial_spec(const ExperimentConfig& config, double rho, double alpha,
                       double sigma2, int trial) {
  // trial seeds derive as base_seed + trial_index
  const std::uint64_t ts = config.base_seed + static_cast<std::uint64_t>(trial);
  ProblemSpec spec;
  spec.n = config.n;
  spec.m = rows_for(alpha, config.n);
  spec.gamma = config.gamma;
  spec.sigma2 = sigma2;
  spec.prior = PriorBG{rho, {config.mu_re, config.mu_im}, config.tau};
  spec.seed_x = mix_seed(ts, 1);
  spec.seed_a = mix_seed(ts, 2);
  spec.seed_w = mix_seed(ts, 3);
  return spec;
}

struct TrialSeries {
  std::vector<double> mse;
  bool diverged = false;
};

// MSE of the estimate at iteration index t = 1..iters; index 1 is the
// prior-mean initialization shared by all algorithms.
TrialSeries run_trial_series(const std::string& algo,
                             const ProblemInstance& inst, int iters) {
  TrialSeries out;
  const PriorMoments pm = prior_moments(inst.prior);
  const double init_mse =
      mse(CVector::Constant(inst.n(), pm.mean), *inst.x_true);
  if (iters == 1) {
    out.mse = {init_mse};
    return out;
  }

  SolverConfig cfg;
  cfg.max_iters = iters - 1;
  cfg.tol = 0.0;  // full-length traces keep trials aligned per iteration

  if (algo == "cbamp") {
    const SolveResult res = amp_run(inst, cfg);
    if (res.trace.stop == StopReason::diverged) {
      out.diverged = true;
      return out;
    }
    for (const TraceRow& row : res.trace.rows) out.mse.push_back(row.mse);
  } else if (algo == "real-amp") {
    const RealAmpResult res = real_amp_run(stack(inst), cfg);
    if (res.trace.stop == StopReason::diverged) {
      out.diverged = true;
      return out;
    }
    for (const TraceRow& row : res.trace.rows) out.mse.push_back(row.mse);
  } else if (algo == "ep") {
    out.mse.push_back(init_mse);
    try {
      const EpResult res = ep_run(inst, iters - 1, 0.0);
      for (const TraceRow& row : res.trace.rows) out.mse.push_back(row.mse);
    } catch (const DivergenceError&) {
      out.diverged = true;
      out.mse.clear();
      return out;
    }
  } else {
    throw ParameterError("mse-curve: unknown algorithm " + algo);
  }
  out.mse.resize(static_cast<std::size_t>(iters), out.mse.empty() ? kNaN : out.mse.back());
  return out;
}

std::string csv_header(const ExperimentConfig& config, const char* kind) {
  std::string out = "# cbamp ";
  out += kVersion;
  out += " ";
  out += kind;
  out += "\n# config: ";
  out += experiment_config_to_json(config);
  out += "\n";
  return out;
}

std::vector<double> isotonic_nondecreasing(const std::vector<double>& y) {
  std::vector<double> val;
  std::vector<int> cnt;
  val.reserve(y.size());
  for (double v : y) {
    val.push_back(v);
    cnt.push_back(1);
    while (val.size() >= 2 && val[val.size() - 2] > val.back()) {
      const double merged = (val[val.size() - 2] * cnt[cnt.size() - 2] +
                             val.back() * cnt.back()) /
                            (cnt[cnt.size() - 2] + cnt.back());
      const int c = cnt[cnt.size() - 2] + cnt.back();
      val.pop_back();
      cnt.pop_back();
      val.back() = merged;
      cnt.back() = c;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (std::size_t b = 0; b < val.size(); ++b) {
    for (int k = 0; k < cnt[b]; ++k) out.push_back(val[b]);
  }
  return out;
}

double crossing_50(const std::vector<double>& alphas,
                   const std::vector<double>& rates) {
  if (rates.front() >= 0.5) return alphas.front();
  for (std::size_t j = 1; j < rates.size(); ++j) {
    if (rates[j] >= 0.5) {
      const double dr = rates[j] - rates[j - 1];
      return alphas[j - 1] +
             (0.5 - rates[j - 1]) * (alphas[j] - alphas[j - 1]) / dr;
    }
  }
  return kNaN;  // out-of-range marker
}

}  // namespace

void ExperimentConfig::validate() const {
  if (experiment != "mse-curve" && experiment != "phase" &&
      experiment != "se-compare") {
    throw ParameterError("config: unknown experiment kind " + experiment);
  }
  if (n < 16) throw ParameterError("config: n must be >= 16");
  if (trials < 1) throw ParameterError("config: trials must be >= 1");
  if (iters < 1) throw ParameterError("config: iters must be >= 1");
  if (alpha.empty() || rho.empty()) {
    throw ParameterError("config: alpha/rho grids must be nonempty");
  }
  if (algos.empty()) throw ParameterError("config: algos must be nonempty");
  for (const std::string& a : algos) {
    if (!known_algo(a)) throw ParameterError("config: unknown algorithm " + a);
  }
  if (!(sigma2 >= 0.0)) throw ParameterError("config: sigma2 must be >= 0");
  PriorBG{rho.front(), {mu_re, mu_im}, tau}.validate();
  if (se_samples < 1000) throw ParameterError("config: se_samples must be >= 1000");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ':')) parts.push_back(token);
  if (parts.size() == 1) {
    return {std::stod(parts[0])};
  }
  if (parts.size() != 3) {
    throw ParameterError("grid: expected <value> or <start>:<stop>:<step>");
  }
  const double start = std::stod(parts[0]);
  const double stop = std::stod(parts[1]);
  const double step = std::stod(parts[2]);
  if (!(step > 0.0) || stop < start) {
    throw ParameterError("grid: need step > 0 and stop >= start");
  }
  std::vector<double> out;
  const long count = std::lround(std::floor((stop - start) / step + 1e-9)) + 1;
  for (long k = 0; k < count; ++k) out.push_back(start + k * step);
  return out;
}

namespace {

std::vector<double> json_grid(const nlohmann::json& v) {
  if (v.is_number()) return {v.get<double>()};
  if (v.is_string()) return parse_grid(v.get<std::string>());
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& e : v) out.push_back(e.get<double>());
    return out;
  }
  throw ParameterError("config: grid must be a number, string or array");
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParameterError(std::string("config: invalid JSON: ") + err.what());
  }
  ExperimentConfig c;
  if (j.contains("experiment")) c.experiment = j["experiment"].get<std::string>();
  if (j.contains("n")) c.n = j["n"].get<int>();
  if (j.contains("alpha")) c.alpha = json_grid(j["alpha"]);
  if (j.contains("rho")) c.rho = json_grid(j["rho"]);
  if (j.contains("mu_re")) c.mu_re = j["mu_re"].get<double>();
  if (j.contains("mu_im")) c.mu_im = j["mu_im"].get<double>();
  if (j.contains("tau")) c.tau = j["tau"].get<double>();
  if (j.contains("sigma2")) c.sigma2 = j["sigma2"].get<double>();
  if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
  if (j.contains("iters")) c.iters = j["iters"].get<int>();
  if (j.contains("trials")) c.trials = j["trials"].get<int>();
  if (j.contains("base_seed")) c.base_seed = j["base_seed"].get<std::uint64_t>();
  if (j.contains("algos")) {
    c.algos.clear();
    if (j["algos"].is_string()) {
      std::istringstream in(j["algos"].get<std::string>());
      std::string a;
      while (std::getline(in, a, ',')) c.algos.push_back(a);
    } else {
      for (const auto& e : j["algos"]) c.algos.push_back(e.get<std::string>());
    }
  }
  if (j.contains("out")) c.out = j["out"].get<std::string>();
  if (j.contains("se_samples")) c.se_samples = j["se_samples"].get<int>();
  if (j.contains("threads")) c.threads = j["threads"].get<int>();
  return c;
}

std::string experiment_config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["experiment"] = c.experiment;
  j["n"] = c.n;
  j["alpha"] = c.alpha;
  j["rho"] = c.rho;
  j["mu_re"] = c.mu_re;
  j["mu_im"] = c.mu_im;
  j["tau"] = c.tau;
  j["sigma2"] = c.sigma2;
  j["gamma"] = c.gamma;
  j["iters"] = c.iters;
  j["trials"] = c.trials;
  j["base_seed"] = c.base_seed;
  j["algos"] = c.algos;
  j["out"] = c.out;
  j["se_samples"] = c.se_samples;
  j["threads"] = c.threads;
  j["version"] = kVersion;
  return j.dump();
}

std::string run_mse_curve(const ExperimentConfig& config) {
  config.validate();
  std::vector<std::string> algos = config.algos;
  if (config.experiment == "se-compare") algos = {"cbamp", "se"};

  const double alpha = config.alpha.front();
  const double rho = config.rho.front();
  const int iters = config.iters;
  const int trials = config.trials;
  const int threads = resolve_threads(config.threads);

  std::string csv = csv_header(config, "mse-curve");
  csv += "t,algo,mean_mse,stderr,diverged\n";

  for (const std::string& algo : algos) {
    if (algo == "se") {
      SEParams params;
      params.alpha = alpha;
      params.gamma_n = config.gamma > 0.0 ? config.gamma * config.n : 1.0;
      params.sigma2 = config.sigma2;
      params.prior = config.prior();
      params.mc_samples = config.se_samples;
      params.seed = config.base_seed;
      params.threads = config.threads;
      const SETrace trace = se_run(params, iters);
      for (const SEPoint& pt : trace) {
        csv += std::to_string(pt.t) + ",se," + fmt_g(pt.E) + ",0,0\n";
      }
      continue;
    }

    std::vector<TrialSeries> series(trials);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t k) {
      const ProblemInstance inst = generate_problem(
          trial_spec(config, rho, alpha, config.sigma2, static_cast<int>(k)));
      series[k] = run_trial_series(algo, inst, iters);
    });

    int diverged = 0;
    for (const TrialSeries& s : series) diverged += s.diverged ? 1 : 0;

    for (int t = 0; t < iters; ++t) {
      double sum = 0.0, sum2 = 0.0;
      int count = 0;
      for (const TrialSeries& s : series) {
        if (s.diverged) continue;
        const double v = s.mse[static_cast<std::size_t>(t)];
        sum += v;
        sum2 += v * v;
        count += 1;
      }
      const double mean = count > 0 ? sum / count : kNaN;
      double stderr_v = 0.0;
      if (count > 1) {
        const double var = std::max(0.0, (sum2 - count * mean * mean) / (count - 1));
        stderr_v = std::sqrt(var / count);
      }
      csv += std::to_string(t + 1) + "," + algo + "," + fmt_g(mean) + "," +
             fmt_g(stderr_v) + "," + std::to_string(diverged) + "\n";
    }
  }
  return csv;
}

PhaseCsv run_phase(const ExperimentConfig& config) {
  config.validate();
  for (double r : config.rho) {
    if (!(r > 0.0 && r < 1.0)) {
      throw ParameterError("phase: rho grid must lie in (0, 1)");
    }
  }
  for (double a : config.alpha) {
    if (!(a > 0.0 && a <= 1.0)) {
      throw ParameterError("phase: alpha grid must lie in (0, 1]");
    }
  }
  for (const std::string& a : config.algos) {
    if (a == "se") throw ParameterError("phase: se is not a solver algorithm");
  }

  const std::size_t n_algo = config.algos.size();
  const std::size_t n_rho = config.rho.size();
  const std::size_t n_alpha = config.alpha.size();
  const std::size_t n_trial = static_cast<std::size_t>(config.trials);
  const std::size_t total = n_algo * n_rho * n_alpha * n_trial;

  std::vector<unsigned char> success(total, 0);
  parallel_for(total, resolve_threads(config.threads), [&](std::size_t idx) {
    std::size_t rest = idx;
    const std::size_t k = rest % n_trial;
    rest /= n_trial;
    const std::size_t aj = rest % n_alpha;
    rest /= n_alpha;
    const std::size_t ri = rest % n_rho;
    rest /= n_rho;
    const std::size_t ai = rest;

    const double rho = config.rho[ri];
    const double alpha = config.alpha[aj];
    // noiseless instances; solvers rely on their internal sigma^2 floor
    const ProblemInstance inst = generate_problem(
        trial_spec(config, rho, alpha, 0.0, static_cast<int>(k)));

    SolverConfig cfg;
    cfg.max_iters = config.iters;

    double final_mse = kNaN;
    try {
      if (config.algos[ai] == "cbamp") {
        const SolveResult res = amp_run(inst, cfg);
        if (res.trace.stop != StopReason::diverged) {
          final_mse = mse(res.xhat, *inst.x_true);
        }
      } else if (config.algos[ai] == "real-amp") {
        const RealAmpResult res = real_amp_run(stack(inst), cfg);
        if (res.trace.stop != StopReason::diverged) {
          final_mse = mse(res.xhat, *inst.x_true);
        }
      } else {  // ep
        const EpResult res = ep_run(inst, config.iters);
        final_mse = mse(res.xhat, *inst.x_true);
      }
    } catch (const DivergenceError&) {
      final_mse = kNaN;
    }
    success[idx] = (final_mse < kSuccessMse) ? 1 : 0;
  });

  PhaseCsv out;
  out.grid = csv_header(config, "phase");
  out.grid += "rho,alpha,algo,success_rate\n";
  out.boundary = csv_header(config, "phase-boundary");
  out.boundary += "rho,algo,alpha_50\n";

  for (std::size_t ai = 0; ai < n_algo; ++ai) {
    for (std::size_t ri = 0; ri < n_rho; ++ri) {
      std::vector<double> rates(n_alpha, 0.0);
      for (std::size_t aj = 0; aj < n_alpha; ++aj) {
        std::size_t hits = 0;
        for (std::size_t k = 0; k < n_trial; ++k) {
          hits += success[((ai * n_rho + ri) * n_alpha + aj) * n_trial + k];
        }
        rates[aj] = static_cast<double>(hits) / static_cast<double>(n_trial);
        out.grid += fmt_g(config.rho[ri]) + "," + fmt_g(config.alpha[aj]) +
                    "," + config.algos[ai] + "," + fmt_g(rates[aj]) + "\n";
      }
      const double a50 = crossing_50(config.alpha, isotonic_nondecreasing(rates));
      out.boundary += fmt_g(config.rho[ri]) + "," + config.algos[ai] + "," +
                      fmt_g(a50) + "\n";
    }
  }
  return out;
}

std::string run_se_csv(const SEParams& params, int iters) {
  const SETrace trace = se_run(params, iters);
  nlohmann::json j;
  j["alpha"] = params.alpha;
  j["gamma_n"] = params.gamma_n;
  j["sigma2"] = params.sigma2;
  j["rho"] = params.prior.rho;
  j["mu_re"] = params.prior.mu.real();
  j["mu_im"] = params.prior.mu.imag();
  j["tau"] = params.prior.tau;
  j["mc_samples"] = params.mc_samples;
  j["seed"] = params.seed;
  j["iters"] = iters;
  j["version"] = kVersion;
  std::string csv = std::string("# cbamp ") + kVersion + " se\n# config: " +
                    j.dump() + "\nt,E,V\n";
  for (const SEPoint& pt : trace) {
    csv += std::to_string(pt.t) + "," + fmt_g(pt.E) + "," + fmt_g(pt.V) + "\n";
  }
  return csv;
}

std::string run_se_boundary_csv(const PriorBG& prior,
                                const std::vector<double>& rho_grid, double tol,
                                const SEBoundaryConfig& cfg) {
  const std::vector<SEBoundaryPoint> pts =
      se_phase_boundary(prior, rho_grid, tol, cfg);
  nlohmann::json j;
  j["rho_grid"] = rho_grid;
  j["tol"] = tol;
  j["alpha_lo"] = cfg.alpha_lo;
  j["alpha_hi"] = cfg.alpha_hi;
  j["iters"] = cfg.iters;
  j["success_mse"] = cfg.success_mse;
  j["gamma_n"] = cfg.gamma_n;
  j["mc_samples"] = cfg.mc_samples;
  j["seed"] = cfg.seed;
  j["mu_re"] = prior.mu.real();
  j["mu_im"] = prior.mu.imag();
  j["tau"] = prior.tau;
  j["version"] = kVersion;
  std::string csv = std::string("# cbamp ") + kVersion +
                    " se-boundary\n# config: " + j.dump() + "\nrho,alpha_star\n";
  for (const SEBoundaryPoint& pt : pts) {
    csv += fmt_g(pt.rho) + "," + fmt_g(pt.alpha_star) + "\n";
  }
  return csv;
}

}  // namespace cbamp
