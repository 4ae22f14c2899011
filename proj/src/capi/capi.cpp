#include "cbamp/cbamp.h"

#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <string>

#include "core/amp.hpp"
#include "core/csv.hpp"
#include "core/ep.hpp"
#include "core/harness.hpp"
#include "core/model.hpp"
#include "core/real_amp.hpp"
#include "core/state_evolution.hpp"
#include "core/version.hpp"
#include "json.hpp"

namespace {

thread_local std::string g_last_error;

cbamp_status fail(cbamp_status status, const std::string& what) {
  g_last_error = what;
  return status;
}

template <typename Fn>
cbamp_status guarded(Fn&& fn) {
  try {
    fn();
    return CBAMP_OK;
  } catch (const cbamp::ShapeError& e) {
    return fail(CBAMP_ERROR_DIMENSION, e.what());
  } catch (const cbamp::SearchRangeError& e) {
    return fail(CBAMP_ERROR_RANGE, e.what());
  } catch (const cbamp::DivergenceError& e) {
    return fail(CBAMP_ERROR_DIVERGED, e.what());
  } catch (const cbamp::ParameterError& e) {
    return fail(CBAMP_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const cbamp::ColumnDegeneracyError& e) {
    return fail(CBAMP_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(CBAMP_ERROR_JSON, e.what());
  } catch (const std::exception& e) {
    return fail(CBAMP_ERROR_INTERNAL, e.what());
  } catch (...) {
    return fail(CBAMP_ERROR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cbamp::ProblemSpec to_core(const cbamp_problem_spec& spec) {
  cbamp::ProblemSpec out;
  out.m = spec.m;
  out.n = spec.n;
  out.gamma = spec.gamma;
  out.sigma2 = spec.sigma2;
  out.prior = cbamp::PriorBG{spec.rho, {spec.mu_re, spec.mu_im}, spec.tau};
  out.seed_x = spec.seed_x;
  out.seed_a = spec.seed_a;
  out.seed_w = spec.seed_w;
  return out;
}

cbamp::SEParams to_core(const cbamp_se_params& p) {
  cbamp::SEParams out;
  out.alpha = p.alpha;
  out.gamma_n = p.gamma_n;
  out.sigma2 = p.sigma2;
  out.prior = cbamp::PriorBG{p.rho, {p.mu_re, p.mu_im}, p.tau};
  out.mc_samples = p.mc_samples;
  out.seed = p.seed;
  out.threads = p.threads;
  return out;
}

}  // namespace

struct cbamp_problem {
  cbamp::ProblemSpec spec;
  cbamp::ProblemInstance instance;
};

struct cbamp_solution {
  cbamp::CVector xhat;
  cbamp::Trace trace;
  bool diverged = false;
  int iterations = 0;
  double final_mse = std::numeric_limits<double>::quiet_NaN();
  std::string config_echo;
};

extern "C" {

const char* cbamp_version(void) { return cbamp::kVersion; }

const char* cbamp_status_name(cbamp_status status) {
  switch (status) {
    case CBAMP_OK: return "ok";
    case CBAMP_ERROR_INVALID_ARGUMENT: return "invalid argument";
    case CBAMP_ERROR_DIMENSION: return "dimension mismatch";
    case CBAMP_ERROR_DIVERGED: return "diverged";
    case CBAMP_ERROR_RANGE: return "search range does not bracket";
    case CBAMP_ERROR_JSON: return "invalid JSON";
    case CBAMP_ERROR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* cbamp_last_error(void) { return g_last_error.c_str(); }

void cbamp_string_free(char* s) { std::free(s); }

void cbamp_problem_spec_init(cbamp_problem_spec* spec) {
  spec->m = 128;
  spec->n = 256;
  spec->gamma = 0.0;
  spec->sigma2 = 0.0;
  spec->rho = 0.1;
  spec->mu_re = 0.0;
  spec->mu_im = 0.0;
  spec->tau = 1.0;
  spec->seed_x = 1;
  spec->seed_a = 2;
  spec->seed_w = 3;
}

cbamp_status cbamp_problem_generate(const cbamp_problem_spec* spec,
                                    cbamp_problem** out) {
  if (!spec || !out) return fail(CBAMP_ERROR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto p = std::make_unique<cbamp_problem>();
    p->spec = to_core(*spec);
    p->instance = cbamp::generate_problem(p->spec);
    *out = p.release();
  });
}

cbamp_status cbamp_problem_from_json(const char* json_text,
                                     cbamp_problem** out) {
  if (!json_text || !out) {
    return fail(CBAMP_ERROR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    auto p = std::make_unique<cbamp_problem>();
    p->spec = cbamp::problem_spec_from_json(json_text);
    p->instance = cbamp::generate_problem(p->spec);
    *out = p.release();
  });
}

cbamp_status cbamp_problem_to_json(const cbamp_problem* problem,
                                   char** json_out) {
  if (!problem || !json_out) {
    return fail(CBAMP_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    *json_out = dup_string(cbamp::problem_spec_to_json(problem->spec));
  });
}

int64_t cbamp_problem_m(const cbamp_problem* problem) {
  return problem ? problem->instance.m() : 0;
}

int64_t cbamp_problem_n(const cbamp_problem* problem) {
  return problem ? problem->instance.n() : 0;
}

void cbamp_problem_destroy(cbamp_problem* problem) { delete problem; }

void cbamp_solver_options_init(cbamp_solver_options* opts) {
  opts->max_iters = 200;
  opts->tol = 1e-12;
  opts->sigma2_floor = 1e-12;
  opts->damping = 0.0;
  opts->onsager = 1;
}

cbamp_status cbamp_solve(const cbamp_problem* problem, cbamp_algo algo,
                         const cbamp_solver_options* opts,
                         cbamp_solution** out) {
  if (!problem || !opts || !out) {
    return fail(CBAMP_ERROR_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return guarded([&] {
    cbamp::SolverConfig cfg;
    cfg.max_iters = opts->max_iters;
    cfg.tol = opts->tol;
    cfg.sigma2_floor = opts->sigma2_floor;
    cfg.damping = opts->damping;
    cfg.onsager = opts->onsager != 0;

    auto sol = std::make_unique<cbamp_solution>();
    const char* algo_name = "cbamp";
    if (algo == CBAMP_ALGO_CBAMP) {
      cbamp::SolveResult res = cbamp::amp_run(problem->instance, cfg);
      sol->xhat = std::move(res.xhat);
      sol->trace = std::move(res.trace);
      sol->diverged = sol->trace.stop == cbamp::StopReason::diverged;
      sol->iterations = static_cast<int>(sol->trace.rows.size()) - 1;
    } else if (algo == CBAMP_ALGO_REAL_AMP) {
      algo_name = "real-amp";
      cbamp::RealAmpResult res =
          cbamp::real_amp_run(cbamp::stack(problem->instance), cfg);
      sol->xhat = std::move(res.xhat);
      sol->trace = std::move(res.trace);
      sol->diverged = sol->trace.stop == cbamp::StopReason::diverged;
      sol->iterations = static_cast<int>(sol->trace.rows.size()) - 1;
    } else if (algo == CBAMP_ALGO_EP) {
      algo_name = "ep";
      try {
        cbamp::EpResult res =
            cbamp::ep_run(problem->instance, cfg.max_iters, cfg.tol);
        sol->xhat = std::move(res.xhat);
        sol->trace = std::move(res.trace);
        sol->iterations = static_cast<int>(sol->trace.rows.size());
      } catch (const cbamp::DivergenceError& err) {
        sol->diverged = true;
        sol->trace.stop = cbamp::StopReason::diverged;
        sol->trace.diverged_at = err.iteration();
      }
    } else {
      throw cbamp::ParameterError("solve: unknown algorithm id");
    }

    if (problem->instance.x_true && sol->xhat.size() > 0) {
      sol->final_mse = cbamp::mse(sol->xhat, *problem->instance.x_true);
    }

    nlohmann::json j;
    j["algo"] = algo_name;
    j["max_iters"] = cfg.max_iters;
    j["tol"] = cfg.tol;
    j["sigma2_floor"] = cfg.sigma2_floor;
    j["damping"] = cfg.damping;
    j["onsager"] = cfg.onsager;
    j["problem"] = nlohmann::json::parse(cbamp::problem_spec_to_json(problem->spec));
    j["version"] = cbamp::kVersion;
    sol->config_echo = j.dump();
    *out = sol.release();
  });
}

int32_t cbamp_solution_diverged(const cbamp_solution* sol) {
  return sol && sol->diverged ? 1 : 0;
}

int32_t cbamp_solution_iterations(const cbamp_solution* sol) {
  return sol ? sol->iterations : 0;
}

double cbamp_solution_final_mse(const cbamp_solution* sol) {
  return sol ? sol->final_mse : std::numeric_limits<double>::quiet_NaN();
}

int64_t cbamp_solution_size(const cbamp_solution* sol) {
  return sol ? sol->xhat.size() : 0;
}

void cbamp_solution_estimate(const cbamp_solution* sol, double* re,
                             double* im) {
  if (!sol) return;
  for (cbamp::Index i = 0; i < sol->xhat.size(); ++i) {
    if (re) re[i] = sol->xhat[i].real();
    if (im) im[i] = sol->xhat[i].imag();
  }
}

cbamp_status cbamp_solution_trace_csv(const cbamp_solution* sol,
                                      char** csv_out) {
  if (!sol || !csv_out) {
    return fail(CBAMP_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    std::string csv = std::string("# cbamp ") + cbamp::kVersion + " solve\n" +
                      "# config: " + sol->config_echo + "\n" +
                      "t,mse,mean_nu,mean_Va,residual\n";
    for (const cbamp::TraceRow& row : sol->trace.rows) {
      csv += std::to_string(row.t) + "," + cbamp::fmt_g(row.mse) + "," +
             cbamp::fmt_g(row.mean_nu) + "," + cbamp::fmt_g(row.mean_Va) +
             "," + cbamp::fmt_g(row.residual) + "\n";
    }
    *csv_out = dup_string(csv);
  });
}

void cbamp_solution_destroy(cbamp_solution* sol) { delete sol; }

void cbamp_se_params_init(cbamp_se_params* params) {
  params->alpha = 0.5;
  params->gamma_n = 1.0;
  params->sigma2 = 0.0;
  params->rho = 0.1;
  params->mu_re = 0.0;
  params->mu_im = 0.0;
  params->tau = 1.0;
  params->mc_samples = 100000;
  params->seed = 1;
  params->threads = 0;
}

cbamp_status cbamp_se_run(const cbamp_se_params* params, int32_t iters,
                          double* E_out, double* V_out) {
  if (!params || !E_out || !V_out) {
    return fail(CBAMP_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    const cbamp::SETrace trace = cbamp::se_run(to_core(*params), iters);
    for (std::size_t k = 0; k < trace.size(); ++k) {
      E_out[k] = trace[k].E;
      V_out[k] = trace[k].V;
    }
  });
}

cbamp_status cbamp_se_run_csv(const cbamp_se_params* params, int32_t iters,
                              char** csv_out) {
  if (!params || !csv_out) {
    return fail(CBAMP_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    *csv_out = dup_string(cbamp::run_se_csv(to_core(*params), iters));
  });
}

cbamp_status cbamp_mse_curve_run(const char* config_json, char** csv_out) {
  if (!config_json || !csv_out) {
    return fail(CBAMP_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    const cbamp::ExperimentConfig config =
        cbamp::experiment_config_from_json(config_json);
    *csv_out = dup_string(cbamp::run_mse_curve(config));
  });
}

cbamp_status cbamp_phase_run(const char* config_json, char** grid_csv_out,
                             char** boundary_csv_out) {
  if (!config_json || !grid_csv_out || !boundary_csv_out) {
    return fail(CBAMP_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    cbamp::ExperimentConfig config =
        cbamp::experiment_config_from_json(config_json);
    config.experiment = "phase";
    const cbamp::PhaseCsv csv = cbamp::run_phase(config);
    *grid_csv_out = dup_string(csv.grid);
    *boundary_csv_out = dup_string(csv.boundary);
  });
}

cbamp_status cbamp_se_boundary_run(const char* config_json, char** csv_out) {
  if (!config_json || !csv_out) {
    return fail(CBAMP_ERROR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    const nlohmann::json j = nlohmann::json::parse(config_json);
    cbamp::PriorBG prior;
    prior.rho = 0.1;  // replaced per grid point
    prior.mu = {j.value("mu_re", 0.0), j.value("mu_im", 0.0)};
    prior.tau = j.value("tau", 1.0);
    std::vector<double> rho_grid{0.1};
    if (j.contains("rho")) {
      if (j["rho"].is_string()) {
        rho_grid = cbamp::parse_grid(j["rho"].get<std::string>());
      } else if (j["rho"].is_array()) {
        rho_grid.clear();
        for (const auto& e : j["rho"]) rho_grid.push_back(e.get<double>());
      } else {
        rho_grid = {j["rho"].get<double>()};
      }
    }
    cbamp::SEBoundaryConfig cfg;
    cfg.alpha_lo = j.value("alpha_lo", cfg.alpha_lo);
    cfg.alpha_hi = j.value("alpha_hi", cfg.alpha_hi);
    cfg.iters = j.value("iters", cfg.iters);
    cfg.success_mse = j.value("success_mse", cfg.success_mse);
    cfg.gamma_n = j.value("gamma_n", cfg.gamma_n);
    cfg.mc_samples = j.value("mc_samples", cfg.mc_samples);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    const double tol = j.value("tol", 0.01);
    *csv_out = dup_string(cbamp::run_se_boundary_csv(prior, rho_grid, tol, cfg));
  });
}

}  // extern "C"
