// Copyright 2026 The hisparse Authors
// SPDX-License-Identifier: Apache-2.0

#include "hisparse/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "hisparse/error.hpp"
#include "hisparse/recovery.hpp"
#include "hisparse/rng.hpp"
#include "hisparse/sensing.hpp"

namespace hisparse {

using nlohmann::json;

std::string_view to_string(Algorithm a) { return a == Algorithm::hihtp ? "hihtp" : "htp"; }
std::string_view to_string(GridMode m) { return m == GridMode::on_grid ? "on_grid" : "off_grid"; }

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  raise(ErrorKind::configuration, "invalid field '" + field + "': " + why);
}

Algorithm parse_algorithm(const std::string& s, const std::string& field) {
  if (s == "hihtp") return Algorithm::hihtp;
  if (s == "htp") return Algorithm::htp;
  bad_field(field, "unknown algorithm '" + s + "' (expected hihtp or htp)");
}

GridMode parse_mode(const std::string& s, const std::string& field) {
  if (s == "on_grid" || s == "on-grid" || s == "on") return GridMode::on_grid;
  if (s == "off_grid" || s == "off-grid" || s == "off") return GridMode::off_grid;
  bad_field(field, "unknown mode '" + s + "' (expected on_grid or off_grid)");
}

OutputFormat parse_format(const std::string& s, const std::string& field) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  bad_field(field, "unknown format '" + s + "' (expected csv or json)");
}

std::size_t as_count(const json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_number_integer()) bad_field(field, "must be non-negative");
  bad_field(field, "expected an integer");
}

double as_real(const json& v, const std::string& field) {
  if (!v.is_number()) bad_field(field, "expected a number");
  return v.get<double>();
}

std::string as_text(const json& v, const std::string& field) {
  if (!v.is_string()) bad_field(field, "expected a string");
  return v.get<std::string>();
}

// Accepts a scalar or an array of scalars.
std::vector<std::size_t> as_counts(const json& v, const std::string& field) {
  std::vector<std::size_t> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_count(v[i], field + "[" + std::to_string(i) + "]"));
    }
  } else {
    out.push_back(as_count(v, field));
  }
  return out;
}

double as_snr(const json& v, const std::string& field) {
  if (v.is_null()) return kNoiseless;
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "noiseless") return kNoiseless;
    bad_field(field, "expected a number or \"inf\"");
  }
  return as_real(v, field);
}

const json& object_at(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_object()) bad_field(key, "expected an object");
  return v;
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known,
                    const std::string& prefix) {
  for (const auto& item : obj.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      bad_field(prefix + item.key(), "unknown key");
    }
  }
}

json snr_json(double snr) { return std::isinf(snr) ? json("inf") : json(snr); }

double noise_variance(double snr_db) {
  return std::isinf(snr_db) ? 0.0 : std::pow(10.0, -snr_db / 10.0);
}

struct TrialTask {
  std::size_t slots, paths, o_tau;
  double snr_db;
  std::size_t trial;
};

std::vector<TrialResult> run_trial(const ExperimentConfig& cfg, const TrialTask& task) {
  const std::uint64_t seed =
      derive_seed(cfg.master_seed, {task.slots, task.paths, task.o_tau, cfg.space_samples,
                                    std::bit_cast<std::uint64_t>(task.snr_db), task.trial});
  std::vector<TrialResult> out;
  out.reserve(cfg.algorithms.size());
  for (Algorithm a : cfg.algorithms) {
    TrialResult r;
    r.trial = task.trial;
    r.algorithm = a;
    r.slots = task.slots;
    r.paths = task.paths;
    r.o_tau = task.o_tau;
    r.o_theta = cfg.space_samples;
    r.snr_db = task.snr_db;
    r.seed = seed;
    out.push_back(r);
  }

  auto fail_all = [&](const std::string& why) {
    for (auto& r : out) {
      r.failure = why;
      r.mse = std::numeric_limits<double>::quiet_NaN();
      r.w_error = std::numeric_limits<double>::quiet_NaN();
      r.ls_converged = false;
    }
  };

  try {
    Rng rng(seed);
    ChannelDims dims{cfg.subcarriers, cfg.antennas, cfg.delay_taps, task.slots};
    const ChannelRealization real =
        draw_channel(cfg.mode, task.paths, cfg.per_angle, cfg.k_theta, dims, rng);
    const SamplingPattern freq = draw_sampling(cfg.subcarriers, task.o_tau, rng);
    const SamplingPattern space = draw_sampling(cfg.antennas, cfg.space_samples, rng);
    const CVector x = observe(real.h_true, noise_variance(task.snr_db), freq, space, rng);

    const SteeringConfig steering = dims.steering(cfg.mode);
    const MeasurementOperator op(steering, freq, space, task.slots);
    SolverConfig solver(cfg.pattern(task.slots, task.paths));
    solver.max_iterations = cfg.max_iterations;
    solver.ls_tolerance = cfg.ls_tolerance;
    solver.ls_max_iterations = cfg.ls_max_iterations;
    const std::size_t htp_s = cfg.htp_sparsity.value_or(solver.pattern.max_nonzeros());

    const CVector& w = real.w_true.data();
    const double w_norm = w.norm();

    for (auto& r : out) {
      try {
        const auto start = std::chrono::steady_clock::now();
        SolveResult sol = r.algorithm == Algorithm::hihtp ? hihtp(x, op, solver)
                                                          : htp_baseline(x, op, htp_s, solver);
        const auto stop = std::chrono::steady_clock::now();
        r.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        r.iterations = sol.iterations;
        r.ls_converged = sol.ls_converged;
        r.mse = channel_mse(real.h_true, assemble_h(sol.estimate, steering));
        const double diff = (sol.estimate.data() - w).norm();
        r.w_error = w_norm > 0.0 ? diff / w_norm : diff;
        if (cfg.mode == GridMode::on_grid) {
          bool exact = true;
          for (Eigen::Index i = 0; i < w.size() && exact; ++i) {
            if (w[i] != cdouble{} && !sol.support.contains(static_cast<std::size_t>(i))) {
              exact = false;
            }
          }
          r.support_exact = exact;
        }
      } catch (const std::exception& e) {
        r.failure = e.what();
        r.mse = std::numeric_limits<double>::quiet_NaN();
        r.w_error = std::numeric_limits<double>::quiet_NaN();
        r.ls_converged = false;
      }
    }
  } catch (const std::exception& e) {
    fail_all(e.what());
  }
  return out;
}

void append_number(std::string& s, double v) {
  if (std::isnan(v)) {
    s += "nan";
    return;
  }
  if (std::isinf(v)) {
    s += v > 0 ? "inf" : "-inf";
    return;
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, res.ptr);
}

void append_fixed(std::string& s, double v, int digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  s.append(buf, res.ptr);
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void ExperimentConfig::validate() const {
  if (subcarriers == 0) bad_field("dims.N", "must be >= 1");
  if (antennas == 0) bad_field("dims.M", "must be >= 1");
  if (delay_taps == 0) bad_field("dims.D", "must be >= 1");
  if (delay_taps > subcarriers) bad_field("dims.D", "must not exceed N");
  if (slots.empty()) bad_field("dims.T", "needs at least one value");
  for (std::size_t t : slots) {
    if (t == 0) bad_field("dims.T", "values must be >= 1");
  }
  if (path_counts.empty()) bad_field("channel.L", "needs at least one value");
  if (per_angle == 0) bad_field("channel.K", "must be >= 1");
  for (std::size_t l : path_counts) {
    if (l == 0) bad_field("channel.L", "values must be >= 1");
    if (mode == GridMode::on_grid && l > antennas) {
      bad_field("channel.L", "on-grid draws need L <= M distinct angles");
    }
    if (mode == GridMode::off_grid && l * 2 * k_theta > antennas) {
      bad_field("channel.L", "off-grid separation needs L * 2 K_theta <= M");
    }
  }
  if (mode == GridMode::on_grid && per_angle > delay_taps) {
    bad_field("channel.K", "must not exceed D");
  }
  if (mode == GridMode::off_grid && k_theta == 0) bad_field("channel.K_theta", "must be >= 1");
  if (freq_samples.empty()) bad_field("sampling.O_tau", "needs at least one value");
  for (std::size_t o : freq_samples) {
    if (o == 0 || o > subcarriers) bad_field("sampling.O_tau", "values must lie in [1, N]");
  }
  if (space_samples == 0 || space_samples > antennas) {
    bad_field("sampling.O_theta", "must lie in [1, M]");
  }
  if (snr_db.empty()) bad_field("noise.snr_db", "needs at least one value");
  for (double s : snr_db) {
    if (std::isnan(s) || s == -kNoiseless) bad_field("noise.snr_db", "values must be finite or inf");
  }
  if (algorithms.empty()) bad_field("algorithms", "needs at least one entry");
  if (trials == 0) bad_field("trials", "must be >= 1");
  if (max_iterations == 0) bad_field("solver.max_iterations", "must be >= 1");
  if (ls_max_iterations == 0) bad_field("solver.ls_max_iterations", "must be >= 1");
  if (!(ls_tolerance >= 0.0)) bad_field("solver.ls_tolerance", "must be >= 0");
  if (htp_sparsity) {
    const std::size_t taps = mode == GridMode::on_grid ? delay_taps : subcarriers;
    const std::size_t max_t = *std::max_element(slots.begin(), slots.end());
    if (*htp_sparsity == 0) bad_field("solver.htp_sparsity", "must be >= 1");
    if (*htp_sparsity > antennas * taps * max_t) {
      bad_field("solver.htp_sparsity", "exceeds the coefficient count");
    }
  }
}

HierPattern ExperimentConfig::pattern(std::size_t slots_in_cell, std::size_t paths) const {
  if (mode == GridMode::on_grid) {
    return HierPattern({{antennas, std::min(paths, antennas)},
                        {delay_taps, std::min(per_angle, delay_taps)},
                        {slots_in_cell, slots_in_cell}});
  }
  return HierPattern({{antennas, std::min(antennas, paths * (2 * k_theta + 1))},
                      {subcarriers, std::min(subcarriers, per_angle * (2 * k_tau + 1))},
                      {slots_in_cell, slots_in_cell}});
}

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  c.name = std::string(name);
  if (name == "fig3") {
    c.slots = {1, 2, 4};
    c.freq_samples = {4, 5, 6, 8, 10, 12, 16, 24, 32, 48, 64};
    c.snr_db = {10.0};
    c.algorithms = {Algorithm::hihtp, Algorithm::htp};
    c.trials = 200;
  } else if (name == "fig4") {
    c.slots = {1, 2, 4};
    c.freq_samples = {8};
    c.snr_db = {0.0, 5.0, 10.0, 15.0, 20.0};
    c.algorithms = {Algorithm::hihtp};
    c.trials = 200;
  } else if (name == "phase") {
    c.slots = {1};
    c.path_counts = {1, 2, 3, 4, 6, 8};
    c.freq_samples = {1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 24, 32};
    c.snr_db = {kNoiseless};
    c.algorithms = {Algorithm::hihtp};
    c.trials = 100;
  } else if (name == "offgrid") {
    c.mode = GridMode::off_grid;
    c.slots = {1, 4};
    c.k_theta = 1;
    c.k_tau = 1;
    c.freq_samples = {8, 16, 24, 32, 48, 64};
    c.snr_db = {10.0, 20.0};
    c.algorithms = {Algorithm::hihtp, Algorithm::htp};
    c.trials = 100;
  } else {
    raise(ErrorKind::configuration, "unknown experiment '" + std::string(name) +
                                        "' (expected fig3, fig4, phase or offgrid)");
  }
  return c;
}

ExperimentConfig config_from_json(const json& doc, ExperimentConfig c) {
  if (!doc.is_object()) raise(ErrorKind::configuration, "configuration must be a JSON object");
  reject_unknown(doc,
                 {"experiment", "name", "dims", "channel", "sampling", "noise", "algorithms",
                  "trials", "master_seed", "threads", "solver", "output"},
                 "");
  if (doc.contains("name")) c.name = as_text(doc["name"], "name");
  if (doc.contains("dims")) {
    const json& d = object_at(doc, "dims");
    reject_unknown(d, {"N", "M", "D", "T"}, "dims.");
    if (d.contains("N")) c.subcarriers = as_count(d["N"], "dims.N");
    if (d.contains("M")) c.antennas = as_count(d["M"], "dims.M");
    if (d.contains("D")) c.delay_taps = as_count(d["D"], "dims.D");
    if (d.contains("T")) c.slots = as_counts(d["T"], "dims.T");
  }
  if (doc.contains("channel")) {
    const json& ch = object_at(doc, "channel");
    reject_unknown(ch, {"L", "K", "mode", "K_theta", "K_tau"}, "channel.");
    if (ch.contains("L")) c.path_counts = as_counts(ch["L"], "channel.L");
    if (ch.contains("K")) c.per_angle = as_count(ch["K"], "channel.K");
    if (ch.contains("mode")) c.mode = parse_mode(as_text(ch["mode"], "channel.mode"), "channel.mode");
    if (ch.contains("K_theta")) c.k_theta = as_count(ch["K_theta"], "channel.K_theta");
    if (ch.contains("K_tau")) c.k_tau = as_count(ch["K_tau"], "channel.K_tau");
  }
  if (doc.contains("sampling")) {
    const json& s = object_at(doc, "sampling");
    reject_unknown(s, {"O_tau", "overhead", "O_theta"}, "sampling.");
    if (s.contains("O_tau") && s.contains("overhead")) {
      bad_field("sampling.overhead", "give either O_tau or overhead, not both");
    }
    if (s.contains("O_tau")) c.freq_samples = as_counts(s["O_tau"], "sampling.O_tau");
    if (s.contains("overhead")) {
      const json& f = s["overhead"];
      std::vector<double> fractions;
      if (f.is_array()) {
        for (std::size_t i = 0; i < f.size(); ++i) {
          fractions.push_back(as_real(f[i], "sampling.overhead[" + std::to_string(i) + "]"));
        }
      } else {
        fractions.push_back(as_real(f, "sampling.overhead"));
      }
      c.freq_samples.clear();
      for (double frac : fractions) {
        if (!(frac > 0.0 && frac <= 1.0)) bad_field("sampling.overhead", "fractions must lie in (0, 1]");
        const double n = std::round(frac * static_cast<double>(c.subcarriers));
        c.freq_samples.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(n)));
      }
    }
    if (s.contains("O_theta")) c.space_samples = as_count(s["O_theta"], "sampling.O_theta");
  }
  if (doc.contains("noise")) {
    const json& n = object_at(doc, "noise");
    reject_unknown(n, {"snr_db"}, "noise.");
    if (n.contains("snr_db")) {
      const json& v = n["snr_db"];
      c.snr_db.clear();
      if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          c.snr_db.push_back(as_snr(v[i], "noise.snr_db[" + std::to_string(i) + "]"));
        }
      } else {
        c.snr_db.push_back(as_snr(v, "noise.snr_db"));
      }
    }
  }
  if (doc.contains("algorithms")) {
    const json& a = doc["algorithms"];
    c.algorithms.clear();
    if (a.is_array()) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string field = "algorithms[" + std::to_string(i) + "]";
        c.algorithms.push_back(parse_algorithm(as_text(a[i], field), field));
      }
    } else {
      c.algorithms.push_back(parse_algorithm(as_text(a, "algorithms"), "algorithms"));
    }
  }
  if (doc.contains("trials")) c.trials = as_count(doc["trials"], "trials");
  if (doc.contains("master_seed")) {
    const json& s = doc["master_seed"];
    if (!s.is_number_unsigned()) bad_field("master_seed", "expected a non-negative 64-bit integer");
    c.master_seed = s.get<std::uint64_t>();
  }
  if (doc.contains("threads")) c.threads = as_count(doc["threads"], "threads");
  if (doc.contains("solver")) {
    const json& s = object_at(doc, "solver");
    reject_unknown(s, {"max_iterations", "ls_tolerance", "ls_max_iterations", "htp_sparsity"},
                   "solver.");
    if (s.contains("max_iterations")) c.max_iterations = as_count(s["max_iterations"], "solver.max_iterations");
    if (s.contains("ls_tolerance")) c.ls_tolerance = as_real(s["ls_tolerance"], "solver.ls_tolerance");
    if (s.contains("ls_max_iterations")) {
      c.ls_max_iterations = as_count(s["ls_max_iterations"], "solver.ls_max_iterations");
    }
    if (s.contains("htp_sparsity")) {
      if (s["htp_sparsity"].is_null()) {
        c.htp_sparsity.reset();
      } else {
        c.htp_sparsity = as_count(s["htp_sparsity"], "solver.htp_sparsity");
      }
    }
  }
  if (doc.contains("output")) {
    const json& o = object_at(doc, "output");
    reject_unknown(o, {"path", "format"}, "output.");
    if (o.contains("path")) c.output_path = as_text(o["path"], "output.path");
    if (o.contains("format")) c.format = parse_format(as_text(o["format"], "output.format"), "output.format");
  }
  c.validate();
  return c;
}

ExperimentConfig config_from_json(const json& doc) {
  std::string name = "fig3";
  if (doc.is_object() && doc.contains("experiment")) name = as_text(doc["experiment"], "experiment");
  return config_from_json(doc, preset(name));
}

json to_json(const ExperimentConfig& c) {
  json snr = json::array();
  for (double s : c.snr_db) snr.push_back(snr_json(s));
  json algs = json::array();
  for (Algorithm a : c.algorithms) algs.push_back(std::string(to_string(a)));
  return json{
      {"name", c.name},
      {"dims", {{"N", c.subcarriers}, {"M", c.antennas}, {"D", c.delay_taps}, {"T", c.slots}}},
      {"channel",
       {{"L", c.path_counts},
        {"K", c.per_angle},
        {"mode", std::string(to_string(c.mode))},
        {"K_theta", c.k_theta},
        {"K_tau", c.k_tau}}},
      {"sampling", {{"O_tau", c.freq_samples}, {"O_theta", c.space_samples}}},
      {"noise", {{"snr_db", snr}}},
      {"algorithms", algs},
      {"trials", c.trials},
      {"master_seed", c.master_seed},
      {"threads", c.threads},
      {"solver",
       {{"max_iterations", c.max_iterations},
        {"ls_tolerance", c.ls_tolerance},
        {"ls_max_iterations", c.ls_max_iterations},
        {"htp_sparsity", c.htp_sparsity ? json(*c.htp_sparsity) : json(nullptr)}}},
      {"output",
       {{"path", c.output_path}, {"format", c.format == OutputFormat::csv ? "csv" : "json"}}},
  };
}

const CellSummary* ExperimentResult::find(Algorithm a, std::size_t t, std::size_t o_tau,
                                          double snr, std::optional<std::size_t> paths) const {
  for (const auto& c : summary) {
    if (c.algorithm == a && c.slots == t && c.o_tau == o_tau && c.snr_db == snr &&
        (!paths || c.paths == *paths)) {
      return &c;
    }
  }
  return nullptr;
}

std::vector<CellSummary> summarize(const std::vector<TrialResult>& trials) {
  using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, double, int>;
  struct Acc {
    CellSummary cell;
    std::vector<double> mse, w_err;
    std::size_t exact = 0, exact_known = 0;
    double iterations = 0.0;
  };
  std::map<Key, std::size_t> index;
  std::vector<Acc> accs;
  for (const auto& r : trials) {
    const Key key{r.slots, r.paths, r.o_tau, r.o_theta, r.snr_db, static_cast<int>(r.algorithm)};
    auto [it, inserted] = index.emplace(key, accs.size());
    if (inserted) {
      Acc a;
      a.cell.algorithm = r.algorithm;
      a.cell.slots = r.slots;
      a.cell.paths = r.paths;
      a.cell.o_tau = r.o_tau;
      a.cell.o_theta = r.o_theta;
      a.cell.snr_db = r.snr_db;
      accs.push_back(std::move(a));
    }
    Acc& a = accs[it->second];
    ++a.cell.count;
    if (!r.failure.empty()) {
      ++a.cell.failures;
      continue;
    }
    a.mse.push_back(r.mse);
    a.w_err.push_back(r.w_error);
    a.iterations += static_cast<double>(r.iterations);
    if (r.support_exact) {
      ++a.exact_known;
      if (*r.support_exact) ++a.exact;
    }
  }

  auto mean_ci = [](const std::vector<double>& v) -> std::pair<double, double> {
    if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    if (v.size() < 2) return {m, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    return {m, 1.96 * sd / std::sqrt(static_cast<double>(v.size()))};
  };

  std::vector<CellSummary> out;
  out.reserve(accs.size());
  for (auto& a : accs) {
    std::tie(a.cell.mean_mse, a.cell.mse_ci95) = mean_ci(a.mse);
    std::tie(a.cell.mean_w_error, a.cell.w_error_ci95) = mean_ci(a.w_err);
    const std::size_t ok = a.cell.count - a.cell.failures;
    a.cell.mean_iterations = ok > 0 ? a.iterations / static_cast<double>(ok) : 0.0;
    if (a.exact_known > 0) {
      a.cell.exact_rate = static_cast<double>(a.exact) / static_cast<double>(a.exact_known);
    }
    out.push_back(a.cell);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressCallback& progress) {
  cfg.validate();
  std::vector<TrialTask> tasks;
  for (std::size_t t : cfg.slots) {
    for (std::size_t l : cfg.path_counts) {
      for (std::size_t o : cfg.freq_samples) {
        for (double snr : cfg.snr_db) {
          for (std::size_t k = 0; k < cfg.trials; ++k) tasks.push_back({t, l, o, snr, k});
        }
      }
    }
  }

  std::vector<std::vector<TrialResult>> slots_out(tasks.size());
  std::size_t workers = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, tasks.size());

  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex sink;
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      auto r = run_trial(cfg, tasks[i]);
      std::lock_guard lock(sink);
      slots_out[i] = std::move(r);
      ++done;
      if (progress) progress(done, tasks.size());
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  ExperimentResult result;
  result.config = cfg;
  result.trials.reserve(tasks.size() * cfg.algorithms.size());
  // Tasks of one cell are contiguous; emit them algorithm-major.
  for (std::size_t begin = 0; begin < tasks.size(); begin += cfg.trials) {
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
      for (std::size_t k = 0; k < cfg.trials; ++k) {
        result.trials.push_back(slots_out[begin + k][a]);
      }
    }
  }
  result.summary = summarize(result.trials);
  return result;
}

PhaseGrid run_phase_transition(const ExperimentConfig& cfg, const ProgressCallback& progress) {
  ExperimentConfig c = cfg;
  c.mode = GridMode::on_grid;
  c.snr_db = {kNoiseless};
  if (c.algorithms.empty()) bad_field("algorithms", "needs at least one entry");
  c.algorithms = {c.algorithms.front()};
  if (c.slots.empty()) bad_field("dims.T", "needs at least one value");
  c.slots = {c.slots.front()};

  PhaseGrid grid;
  grid.freq_samples = c.freq_samples;
  grid.path_counts = c.path_counts;
  grid.runs = run_experiment(c, progress);
  for (std::size_t l : grid.path_counts) {
    std::vector<double> row;
    for (std::size_t o : grid.freq_samples) {
      const CellSummary* cell =
          grid.runs.find(c.algorithms.front(), c.slots.front(), o, kNoiseless, l);
      row.push_back(cell && cell->exact_rate ? *cell->exact_rate : 0.0);
    }
    grid.probability.push_back(std::move(row));
  }
  return grid;
}

void write_csv(std::ostream& os, const std::vector<TrialResult>& trials) {
  std::string line;
  os << kCsvHeader << '\n';
  for (const auto& r : trials) {
    line.clear();
    line += std::to_string(r.trial);
    line += ',';
    line += to_string(r.algorithm);
    line += ',';
    line += std::to_string(r.slots);
    line += ',';
    line += std::to_string(r.o_tau);
    line += ',';
    line += std::to_string(r.o_theta);
    line += ',';
    append_number(line, r.snr_db);
    line += ',';
    append_number(line, r.mse);
    line += ',';
    append_number(line, r.w_error);
    line += ',';
    if (r.support_exact) line += *r.support_exact ? "true" : "false";
    line += ',';
    line += std::to_string(r.iterations);
    line += ',';
    append_fixed(line, r.runtime_ms, 3);
    line += ',';
    line += std::to_string(r.seed);
    os << line << '\n';
  }
}

json results_json(const ExperimentResult& result) {
  json trials = json::array();
  for (const auto& r : result.trials) {
    json t{{"trial", r.trial},
           {"algorithm", std::string(to_string(r.algorithm))},
           {"T", r.slots},
           {"L", r.paths},
           {"O_tau", r.o_tau},
           {"O_theta", r.o_theta},
           {"snr_db", snr_json(r.snr_db)},
           {"mse", number_or_null(r.mse)},
           {"w_error", number_or_null(r.w_error)},
           {"support_exact", r.support_exact ? json(*r.support_exact) : json(nullptr)},
           {"iterations", r.iterations},
           {"runtime_ms", r.runtime_ms},
           {"seed", r.seed}};
    if (!r.failure.empty()) t["failure"] = r.failure;
    trials.push_back(std::move(t));
  }
  json summary = json::array();
  for (const auto& c : result.summary) {
    summary.push_back({{"algorithm", std::string(to_string(c.algorithm))},
                       {"T", c.slots},
                       {"L", c.paths},
                       {"O_tau", c.o_tau},
                       {"O_theta", c.o_theta},
                       {"snr_db", snr_json(c.snr_db)},
                       {"count", c.count},
                       {"failures", c.failures},
                       {"mean_mse", number_or_null(c.mean_mse)},
                       {"mse_ci95", c.mse_ci95},
                       {"mean_w_error", number_or_null(c.mean_w_error)},
                       {"w_error_ci95", c.w_error_ci95},
                       {"exact_rate", c.exact_rate ? json(*c.exact_rate) : json(nullptr)},
                       {"mean_iterations", c.mean_iterations}});
  }
  return json{{"config", to_json(result.config)}, {"trials", trials}, {"summary", summary}};
}

json to_json(const PhaseGrid& g) {
  return json{{"O_tau", g.freq_samples}, {"L", g.path_counts}, {"probability", g.probability}};
}

void emit_results(const ExperimentResult& result, OutputFormat format, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) raise(ErrorKind::io, "cannot open '" + path + "' for writing");
  if (format == OutputFormat::csv) {
    write_csv(os, result.trials);
  } else {
    os << results_json(result).dump(2) << '\n';
  }
  os.flush();
  if (!os) raise(ErrorKind::io, "write to '" + path + "' failed");
}

}  // namespace hisparse
