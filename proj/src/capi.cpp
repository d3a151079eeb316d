// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#include "hisparse/hisparse.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "hisparse/bench.hpp"
#include "hisparse/error.hpp"
#include "hisparse/hsparse.hpp"
#include "hisparse/recovery.hpp"
#include "hisparse/sensing.hpp"
#include "hisparse/studies.hpp"

struct hs_operator {
  hisparse::MeasurementOperator op;
};

struct hs_solution {
  hisparse::SolveResult result;
};

struct hs_experiment {
  hisparse::ExperimentConfig config;
  std::optional<hisparse::ExperimentResult> result;
};

namespace {

thread_local std::string g_last_error;

hs_status fail(hs_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

hs_status status_of(hisparse::ErrorKind k) {
  switch (k) {
    case hisparse::ErrorKind::dimension: return HS_ERR_DIMENSION;
    case hisparse::ErrorKind::capacity: return HS_ERR_CAPACITY;
    case hisparse::ErrorKind::configuration: return HS_ERR_CONFIG;
    case hisparse::ErrorKind::domain: return HS_ERR_DOMAIN;
    case hisparse::ErrorKind::io: return HS_ERR_IO;
  }
  return HS_ERR_INTERNAL;
}

// Runs `body` and converts exceptions into status codes.
template <class F>
hs_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const hisparse::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(HS_ERR_CONFIG, std::string("invalid JSON: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(HS_ERR_CAPACITY, "out of memory");
  } catch (const std::exception& e) {
    return fail(HS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(HS_ERR_INTERNAL, "unknown exception");
  }
}

hisparse::CVector read_complex(const double* in, std::size_t len) {
  hisparse::CVector v(static_cast<Eigen::Index>(len));
  for (std::size_t i = 0; i < len; ++i) {
    v[static_cast<Eigen::Index>(i)] = {in[2 * i], in[2 * i + 1]};
  }
  return v;
}

void write_complex(const hisparse::CVector& v, double* out) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out[2 * i] = v[i].real();
    out[2 * i + 1] = v[i].imag();
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

hisparse::SolverConfig solver_config(hisparse::HierPattern pattern, const hs_solver_options* o) {
  hisparse::SolverConfig cfg(std::move(pattern));
  if (o != nullptr) {
    if (o->max_iterations != 0) cfg.max_iterations = o->max_iterations;
    if (o->ls_tolerance > 0.0) cfg.ls_tolerance = o->ls_tolerance;
    if (o->ls_max_iterations != 0) cfg.ls_max_iterations = o->ls_max_iterations;
  }
  return cfg;
}

hs_status check_measurements(const hs_operator* op, const double* x, std::size_t x_len) {
  if (op == nullptr || x == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null argument");
  if (x_len != op->op.output_size()) {
    return fail(HS_ERR_DIMENSION, "measurement length " + std::to_string(x_len) +
                                      " does not match operator output " +
                                      std::to_string(op->op.output_size()));
  }
  return HS_OK;
}

hs_status copy_indices(std::span<const std::size_t> src, size_t* indices, size_t capacity,
                       size_t* count) {
  if (count == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null count");
  *count = src.size();
  if (src.size() > capacity) {
    return fail(HS_ERR_CAPACITY, "index buffer holds " + std::to_string(capacity) + " entries, " +
                                     std::to_string(src.size()) + " needed");
  }
  if (!src.empty() && indices == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null index buffer");
  std::copy(src.begin(), src.end(), indices);
  return HS_OK;
}

}  // namespace

extern "C" {

const char* hs_version(void) { return "0.1.0"; }

const char* hs_status_name(hs_status s) {
  switch (s) {
    case HS_OK: return "ok";
    case HS_ERR_DIMENSION: return "dimension error";
    case HS_ERR_CAPACITY: return "capacity error";
    case HS_ERR_CONFIG: return "configuration error";
    case HS_ERR_DOMAIN: return "domain error";
    case HS_ERR_IO: return "I/O error";
    case HS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case HS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* hs_last_error(void) { return g_last_error.c_str(); }

void hs_string_free(char* s) { std::free(s); }

hs_status hs_operator_create(size_t subcarriers, size_t antennas, size_t delay_taps, size_t slots,
                             const size_t* freq, size_t o_tau, const size_t* space,
                             size_t o_theta, hs_operator** out) {
  return guarded([&] {
    if (out == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null output handle");
    *out = nullptr;
    if ((o_tau > 0 && freq == nullptr) || (o_theta > 0 && space == nullptr)) {
      return fail(HS_ERR_INVALID_ARGUMENT, "null sampling index array");
    }
    hisparse::SteeringConfig steering{subcarriers, antennas, delay_taps};
    hisparse::SamplingPattern f(subcarriers, std::vector<std::size_t>(freq, freq + o_tau));
    hisparse::SamplingPattern s(antennas, std::vector<std::size_t>(space, space + o_theta));
    *out = new hs_operator{hisparse::MeasurementOperator(steering, std::move(f), std::move(s), slots)};
    return HS_OK;
  });
}

void hs_operator_destroy(hs_operator* op) { delete op; }

hs_status hs_operator_sizes(const hs_operator* op, size_t* input_size, size_t* output_size) {
  if (op == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null operator");
  if (input_size != nullptr) *input_size = op->op.input_size();
  if (output_size != nullptr) *output_size = op->op.output_size();
  return HS_OK;
}

hs_status hs_operator_forward(const hs_operator* op, const double* in, size_t in_len, double* out,
                              size_t out_len) {
  return guarded([&] {
    if (op == nullptr || in == nullptr || out == nullptr) {
      return fail(HS_ERR_INVALID_ARGUMENT, "null argument");
    }
    if (in_len != op->op.input_size() || out_len != op->op.output_size()) {
      return fail(HS_ERR_DIMENSION, "forward expects input " + std::to_string(op->op.input_size()) +
                                        " and output " + std::to_string(op->op.output_size()));
    }
    write_complex(op->op.forward(read_complex(in, in_len)), out);
    return HS_OK;
  });
}

hs_status hs_operator_adjoint(const hs_operator* op, const double* in, size_t in_len, double* out,
                              size_t out_len) {
  return guarded([&] {
    if (op == nullptr || in == nullptr || out == nullptr) {
      return fail(HS_ERR_INVALID_ARGUMENT, "null argument");
    }
    if (in_len != op->op.output_size() || out_len != op->op.input_size()) {
      return fail(HS_ERR_DIMENSION, "adjoint expects input " + std::to_string(op->op.output_size()) +
                                        " and output " + std::to_string(op->op.input_size()));
    }
    write_complex(op->op.adjoint(read_complex(in, in_len)), out);
    return HS_OK;
  });
}

hs_status hs_hier_threshold(const double* x, size_t len, const size_t* blocks,
                            const size_t* sparsity, size_t depth, size_t* indices,
                            size_t capacity, size_t* count) {
  return guarded([&] {
    if (x == nullptr || blocks == nullptr || sparsity == nullptr || depth == 0) {
      return fail(HS_ERR_INVALID_ARGUMENT, "null argument or empty pattern");
    }
    std::vector<hisparse::Level> levels;
    for (std::size_t k = 0; k < depth; ++k) levels.push_back({blocks[k], sparsity[k]});
    const hisparse::HierPattern pattern(std::move(levels));
    const hisparse::CVector v = read_complex(x, len);
    const hisparse::HierSupport s = hisparse::hier_threshold(
        std::span<const hisparse::cdouble>(v.data(), len), pattern);
    return copy_indices(s.indices(), indices, capacity, count);
  });
}

hs_status hs_hihtp(const hs_operator* op, const double* x, size_t x_len, size_t s_angle,
                   size_t s_delay, const hs_solver_options* opts, hs_solution** out) {
  return guarded([&] {
    if (out == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null output handle");
    *out = nullptr;
    if (hs_status st = check_measurements(op, x, x_len); st != HS_OK) return st;
    const auto& steer = op->op.steering();
    const std::size_t t = op->op.slots();
    hisparse::HierPattern pattern(
        {{steer.antennas, s_angle}, {steer.delay_taps, s_delay}, {t, t}});
    auto cfg = solver_config(std::move(pattern), opts);
    *out = new hs_solution{hisparse::hihtp(read_complex(x, x_len), op->op, cfg)};
    return HS_OK;
  });
}

hs_status hs_htp(const hs_operator* op, const double* x, size_t x_len, size_t sparsity,
                 const hs_solver_options* opts, hs_solution** out) {
  return guarded([&] {
    if (out == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null output handle");
    *out = nullptr;
    if (hs_status st = check_measurements(op, x, x_len); st != HS_OK) return st;
    auto cfg = solver_config(hisparse::HierPattern::flat(op->op.input_size(), sparsity), opts);
    *out = new hs_solution{hisparse::htp_baseline(read_complex(x, x_len), op->op, sparsity, cfg)};
    return HS_OK;
  });
}

void hs_solution_destroy(hs_solution* sol) { delete sol; }

hs_status hs_solution_estimate(const hs_solution* sol, double* out, size_t len) {
  if (sol == nullptr || out == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null argument");
  if (len != sol->result.estimate.size()) {
    return fail(HS_ERR_DIMENSION,
                "estimate has " + std::to_string(sol->result.estimate.size()) + " entries");
  }
  write_complex(sol->result.estimate.data(), out);
  return HS_OK;
}

hs_status hs_solution_support(const hs_solution* sol, size_t* indices, size_t capacity,
                              size_t* count) {
  if (sol == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null solution");
  return copy_indices(sol->result.support.indices(), indices, capacity, count);
}

hs_status hs_solution_stats(const hs_solution* sol, size_t* iterations, double* residual_norm,
                            int* ls_converged) {
  if (sol == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null solution");
  if (iterations != nullptr) *iterations = sol->result.iterations;
  if (residual_norm != nullptr) *residual_norm = sol->result.residual_norm;
  if (ls_converged != nullptr) *ls_converged = sol->result.ls_converged ? 1 : 0;
  return HS_OK;
}

hs_status hs_experiment_create(const char* preset, const char* config_json, hs_experiment** out) {
  return guarded([&] {
    if (out == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null output handle");
    *out = nullptr;
    hisparse::ExperimentConfig cfg;
    if (config_json != nullptr) {
      const auto doc = nlohmann::json::parse(config_json);
      cfg = preset != nullptr ? hisparse::config_from_json(doc, hisparse::preset(preset))
                              : hisparse::config_from_json(doc);
    } else {
      cfg = hisparse::preset(preset != nullptr ? preset : "fig3");
    }
    cfg.validate();
    *out = new hs_experiment{std::move(cfg), std::nullopt};
    return HS_OK;
  });
}

void hs_experiment_destroy(hs_experiment* exp) { delete exp; }

hs_status hs_experiment_set_seed(hs_experiment* exp, uint64_t seed) {
  if (exp == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null experiment");
  exp->config.master_seed = seed;
  return HS_OK;
}

hs_status hs_experiment_set_trials(hs_experiment* exp, size_t trials) {
  if (exp == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null experiment");
  if (trials == 0) return fail(HS_ERR_CONFIG, "invalid field 'trials': must be >= 1");
  exp->config.trials = trials;
  return HS_OK;
}

hs_status hs_experiment_set_threads(hs_experiment* exp, size_t threads) {
  if (exp == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null experiment");
  exp->config.threads = threads;
  return HS_OK;
}

hs_status hs_experiment_set_snr(hs_experiment* exp, const double* snr_db, size_t count) {
  return guarded([&] {
    if (exp == nullptr || (count > 0 && snr_db == nullptr)) {
      return fail(HS_ERR_INVALID_ARGUMENT, "null argument");
    }
    auto cfg = exp->config;
    cfg.snr_db.assign(snr_db, snr_db + count);
    cfg.validate();
    exp->config = std::move(cfg);
    return HS_OK;
  });
}

hs_status hs_experiment_set_output(hs_experiment* exp, const char* path, hs_format format) {
  if (exp == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null experiment");
  if (format != HS_FORMAT_CSV && format != HS_FORMAT_JSON) {
    return fail(HS_ERR_CONFIG, "invalid field 'output.format'");
  }
  if (path != nullptr) exp->config.output_path = path;
  exp->config.format =
      format == HS_FORMAT_CSV ? hisparse::OutputFormat::csv : hisparse::OutputFormat::json;
  return HS_OK;
}

hs_status hs_experiment_config_json(const hs_experiment* exp, char** json) {
  return guarded([&] {
    if (exp == nullptr || json == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null argument");
    *json = copy_string(hisparse::to_json(exp->config).dump(2));
    return HS_OK;
  });
}

hs_status hs_experiment_run(hs_experiment* exp) {
  return guarded([&] {
    if (exp == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null experiment");
    exp->result = hisparse::run_experiment(exp->config);
    return HS_OK;
  });
}

hs_status hs_experiment_run_phase(hs_experiment* exp, char** grid_json) {
  return guarded([&] {
    if (exp == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null experiment");
    hisparse::PhaseGrid grid = hisparse::run_phase_transition(exp->config);
    if (grid_json != nullptr) *grid_json = copy_string(hisparse::to_json(grid).dump(2));
    exp->result = std::move(grid.runs);
    return HS_OK;
  });
}

hs_status hs_experiment_trial_count(const hs_experiment* exp, size_t* count) {
  if (exp == nullptr || count == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null argument");
  *count = exp->result ? exp->result->trials.size() : 0;
  return HS_OK;
}

hs_status hs_experiment_summary_json(const hs_experiment* exp, char** json) {
  return guarded([&] {
    if (exp == nullptr || json == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null argument");
    if (!exp->result) return fail(HS_ERR_CONFIG, "experiment has not been run");
    *json = copy_string(hisparse::results_json(*exp->result)["summary"].dump(2));
    return HS_OK;
  });
}

hs_status hs_experiment_write(const hs_experiment* exp, const char* path, hs_format format) {
  return guarded([&] {
    if (exp == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null experiment");
    if (!exp->result) return fail(HS_ERR_CONFIG, "experiment has not been run");
    const std::string target = path != nullptr ? path : exp->config.output_path;
    if (target.empty()) return fail(HS_ERR_CONFIG, "invalid field 'output.path': empty");
    if (format != HS_FORMAT_CSV && format != HS_FORMAT_JSON) {
      return fail(HS_ERR_CONFIG, "invalid field 'output.format'");
    }
    hisparse::emit_results(*exp->result,
                           format == HS_FORMAT_CSV ? hisparse::OutputFormat::csv
                                                   : hisparse::OutputFormat::json,
                           target);
    return HS_OK;
  });
}

hs_status hs_analysis_run(const char* study, const char* params_json, char** report) {
  return guarded([&] {
    if (study == nullptr || report == nullptr) return fail(HS_ERR_INVALID_ARGUMENT, "null argument");
    *report = nullptr;
    const nlohmann::json params =
        params_json != nullptr ? nlohmann::json::parse(params_json) : nlohmann::json::object();
    *report = copy_string(hisparse::run_study(study, params).dump(2));
    return HS_OK;
  });
}

}  // extern "C"
