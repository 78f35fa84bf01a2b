#pragma once

// Monte-Carlo harness for the tracking experiments: paired runs of every
// filter variant on identical measurement sequences, RMSE aggregation and
// CSV / JSON output.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "vbakf/beliefs.hpp"
#include "vbakf/experiment_config.hpp"
#include "vbakf/filters.hpp"
#include "vbakf/models.hpp"

namespace vbakf::exp {

/// Root mean squared Euclidean error over `components` of each state.
inline double rmse(std::span<const Vector> truth, std::span<const Vector> estimates,
                   std::span<const Eigen::Index> components) {
  if (truth.size() != estimates.size()) {
    throw std::invalid_argument("rmse: length mismatch (" + std::to_string(truth.size()) +
                                " vs " + std::to_string(estimates.size()) + ")");
  }
  if (truth.empty()) throw std::invalid_argument("rmse: empty sequences");
  double acc = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    for (Eigen::Index c : components) {
      const double e = estimates[k](c) - truth[k](c);
      acc += e * e;
    }
  }
  return std::sqrt(acc / static_cast<double>(truth.size()));
}

struct VariantResult {
  std::string name;
  VariantType type = VariantType::vb_full;
  /// Fixed standard deviation for fixed_diag, NaN otherwise.
  double param = std::numeric_limits<double>::quiet_NaN();
  /// Per-run RMSE; NaN marks a run that failed numerically.
  std::vector<double> run_rmse;
  /// [run][step] Euclidean position error; empty row for a failed run.
  std::vector<std::vector<double>> step_errors;
  /// Mean VB sweeps per update over successful runs (1 for non-VB variants).
  double mean_iterations = 0.0;

  std::size_t runs_ok() const {
    return static_cast<std::size_t>(
        std::count_if(run_rmse.begin(), run_rmse.end(), [](double v) { return !std::isnan(v); }));
  }
  std::size_t failures() const { return run_rmse.size() - runs_ok(); }

  double rmse_mean() const {
    double acc = 0.0;
    std::size_t n = 0;
    for (double v : run_rmse) {
      if (std::isnan(v)) continue;
      acc += v;
      ++n;
    }
    return n ? acc / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
  }

  /// Sample standard deviation over successful runs (0 for a single run).
  double rmse_std() const {
    const std::size_t n = runs_ok();
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    if (n == 1) return 0.0;
    const double mean = rmse_mean();
    double acc = 0.0;
    for (double v : run_rmse) {
      if (!std::isnan(v)) acc += (v - mean) * (v - mean);
    }
    return std::sqrt(acc / static_cast<double>(n - 1));
  }
};

struct RunResult {
  std::string experiment;
  std::string scheme;
  std::size_t steps = 0;
  std::size_t mc_runs = 0;
  std::uint64_t seed = 0;
  Eigen::Index meas_dim = 0;
  std::vector<VariantResult> variants;
  /// Variant whose covariance estimates of run 0 are stored in cov_est.
  std::string cov_variant;
  TrueCovTrace cov_true;  // run 0
  TrueCovTrace cov_est;   // run 0, empty without a VB variant

  const VariantResult* find(const std::string& name) const {
    for (const auto& v : variants) {
      if (v.name == name) return &v;
    }
    return nullptr;
  }

  /// True when some variant failed in every run (CLI exit code 3).
  bool any_variant_failed_all() const {
    return std::any_of(variants.begin(), variants.end(),
                       [](const VariantResult& v) { return v.runs_ok() == 0; });
  }
};

/// Observes the measurement sequence handed to each variant.
struct RunHooks {
  std::function<void(std::size_t run, const std::string& variant, std::span<const Vector> data)>
      on_variant_input;
};

inline std::string variant_name(VariantType type, SchemeKind scheme) {
  const std::string s = scheme_short_name(scheme);
  switch (type) {
    case VariantType::true_cov: return s + "-t";
    case VariantType::fixed_diag: return s + "-o";
    case VariantType::vb_full: return "VB-A" + s + "-f";
    case VariantType::vb_diag: return "VB-A" + s + "-d";
  }
  return s;
}

/// Everything an experiment needs that does not change between runs.
struct Scenario {
  AdditiveModel model;
  PositionLayout layout;
  std::vector<Eigen::Index> position_components;
  /// Fixed true trajectory (range-only); empty when simulated per run.
  std::vector<Vector> fixed_states;
  Vector initial_state;
  TrueCovTrace cov_trace;
  Matrix P0;
};

inline Scenario build_scenario(const ExperimentConfig& cfg) {
  cfg.validate();
  Scenario sc;
  if (cfg.experiment == ExperimentKind::range_only) {
    sc.model = range_only_model(cfg.sensors, cfg.q, cfg.dt);
    sc.layout = kWienerLayout;
    sc.position_components = {0, 1};
    sc.fixed_states = cfg.trajectory.states(cfg.steps, cfg.dt);
    sc.initial_state = cfg.trajectory.state_at(0, cfg.steps, cfg.dt);
    sc.cov_trace.reserve(cfg.steps);
    for (const auto& x : sc.fixed_states) {
      sc.cov_trace.push_back(noise_field_cov(sc.layout.extract(x), cfg.sensors, cfg.noise_field));
    }
    Vector p0(4);
    p0 << cfg.prior.position_var, cfg.prior.position_var, cfg.prior.velocity_var,
        cfg.prior.velocity_var;
    sc.P0 = p0.asDiagonal();
  } else {
    sc.model = bearings_only_model(cfg.sensors, cfg.dt,
                                   coordinated_turn_Q(cfg.turn_qc, cfg.turn_qw, cfg.dt));
    sc.layout = kTurnLayout;
    sc.position_components = {0, 2};
    sc.initial_state = cfg.initial_state;
    sc.cov_trace = smooth_cov_trace(cfg.steps, cfg.cov_trace);
    Vector p0(5);
    p0 << cfg.prior.position_var, cfg.prior.velocity_var, cfg.prior.position_var,
        cfg.prior.velocity_var, cfg.prior.turn_rate_var;
    sc.P0 = p0.asDiagonal();
  }
  return sc;
}

/// Simulation of Monte-Carlo run `run`, seeded with seed + run.
inline Simulation simulate_run(const ExperimentConfig& cfg, const Scenario& sc, std::size_t run) {
  const std::uint64_t seed = cfg.seed + run;
  if (!sc.fixed_states.empty()) {
    return simulate_measurements(sc.fixed_states, sc.model, cfg.sensors, sc.cov_trace, seed,
                                 sc.layout);
  }
  return simulate(sc.model, cfg.sensors, sc.cov_trace, cfg.steps, sc.initial_state, seed,
                  sc.layout);
}

/// Initial state belief of run `run`: mean drawn from N(x0, P0).
inline GaussianState initial_state_belief(const ExperimentConfig& cfg, const Scenario& sc,
                                          std::size_t run) {
  std::mt19937_64 gen((cfg.seed + run) ^ 0xd1b54a32d192ed03ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(sc.initial_state.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(gen);
  return {sc.initial_state + cholesky_lower(sc.P0) * z, sc.P0};
}

namespace detail {

struct FilterOutcome {
  bool ok = false;
  double rmse = 0.0;
  std::vector<double> errors;
  double mean_iterations = 0.0;
  TrueCovTrace cov_est;
};

inline std::vector<double> position_errors(const std::vector<Vector>& truth,
                                           const std::vector<Vector>& est,
                                           std::span<const Eigen::Index> comps) {
  std::vector<double> out(truth.size());
  for (std::size_t k = 0; k < truth.size(); ++k) {
    double acc = 0.0;
    for (Eigen::Index c : comps) {
      const double e = est[k](c) - truth[k](c);
      acc += e * e;
    }
    out[k] = std::sqrt(acc);
  }
  return out;
}

struct VariantSlot {
  VariantType type;
  double sigma;  // fixed_diag only
  std::string name;
};

inline FilterOutcome run_variant(const ExperimentConfig& cfg, const Scenario& sc,
                                 const VariantSlot& slot, const Simulation& sim,
                                 const GaussianState& x0, bool record_cov) {
  FilterOutcome out;
  const std::span<const Vector> data(sim.measurements);
  const Eigen::Index d = sc.model.meas_dim;
  std::vector<Vector> estimates;
  estimates.reserve(data.size());
  try {
    if (slot.type == VariantType::true_cov || slot.type == VariantType::fixed_diag) {
      const Matrix fixed = slot.sigma * slot.sigma * Matrix::Identity(d, d);
      auto sigma_at = [&](std::size_t k) -> Matrix {
        return slot.type == VariantType::true_cov ? sim.covs[k] : fixed;
      };
      const auto steps = gf_run(sc.model, data, x0, sigma_at, cfg.scheme);
      for (const auto& s : steps) estimates.push_back(s.state.mean);
      out.mean_iterations = 1.0;
    } else {
      VbConfig vb;
      vb.iterations = cfg.iterations;
      vb.tol = cfg.tol;
      vb.diagonal = cfg.diagonal || slot.type == VariantType::vb_diag;
      vb.dyn = CovarianceDynamics::forgetting(cfg.rho, d);
      vb.scheme = cfg.scheme;
      const JointBelief initial{x0, InverseWishartState::weak_prior(d, cfg.prior.sigma0_sq,
                                                                    cfg.prior.eps)};
      const auto steps = filter_run(sc.model, data, initial, vb);
      double iters = 0.0;
      for (const auto& s : steps) {
        estimates.push_back(s.belief.state.mean);
        iters += s.diagnostics.iterations_run;
        if (record_cov) out.cov_est.push_back(iw_expected_cov(s.belief.noise));
      }
      out.mean_iterations = iters / static_cast<double>(steps.size());
    }
  } catch (const FilterRunError&) {
    out.ok = false;
    return out;
  }
  out.errors = position_errors(sim.states, estimates, sc.position_components);
  double acc = 0.0;
  for (double e : out.errors) acc += e * e;
  out.rmse = std::sqrt(acc / static_cast<double>(out.errors.size()));
  out.ok = std::isfinite(out.rmse);
  if (!out.ok) out.errors.clear();
  return out;
}

}  // namespace detail

/// Runs every variant on each Monte-Carlo run's measurement sequence.
/// Results are independent of the thread count and completion order.
inline RunResult run_experiment(const ExperimentConfig& cfg, const RunHooks& hooks = {}) {
  const Scenario sc = build_scenario(cfg);

  std::vector<detail::VariantSlot> slots;
  for (const auto& v : cfg.variants) {
    if (v.type == VariantType::fixed_diag) {
      for (double s : v.sigmas) slots.push_back({v.type, s, variant_name(v.type, cfg.scheme.kind)});
    } else {
      slots.push_back({v.type, 0.0, variant_name(v.type, cfg.scheme.kind)});
    }
  }

  RunResult result;
  result.experiment = experiment_name(cfg.experiment);
  result.scheme = to_string(cfg.scheme.kind);
  result.steps = cfg.steps;
  result.mc_runs = cfg.mc_runs;
  result.seed = cfg.seed;
  result.meas_dim = sc.model.meas_dim;
  std::optional<std::size_t> cov_slot;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].type == VariantType::vb_full) {
      cov_slot = i;
      break;
    }
  }
  if (!cov_slot) {
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (slots[i].type == VariantType::vb_diag) {
        cov_slot = i;
        break;
      }
    }
  }
  if (cov_slot) result.cov_variant = slots[*cov_slot].name;

  // outcomes[run][slot]
  std::vector<std::vector<detail::FilterOutcome>> outcomes(cfg.mc_runs);
  std::mutex hook_mutex;
  auto do_run = [&](std::size_t run) {
    const Simulation sim = simulate_run(cfg, sc, run);
    const GaussianState x0 = initial_state_belief(cfg, sc, run);
    auto& row = outcomes[run];
    row.resize(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (hooks.on_variant_input) {
        std::lock_guard lock(hook_mutex);
        hooks.on_variant_input(run, slots[i].name, sim.measurements);
      }
      row[i] = detail::run_variant(cfg, sc, slots[i], sim, x0, run == 0 && cov_slot == i);
    }
    if (run == 0) result.cov_true = sim.covs;
  };

  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.mc_runs));
  if (threads <= 1) {
    for (std::size_t r = 0; r < cfg.mc_runs; ++r) do_run(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t r = next++; r < cfg.mc_runs; r = next++) do_run(r);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (std::size_t i = 0; i < slots.size(); ++i) {
    VariantResult v;
    v.name = slots[i].name;
    v.type = slots[i].type;
    if (slots[i].type == VariantType::fixed_diag) v.param = slots[i].sigma;
    double iters = 0.0;
    std::size_t ok = 0;
    for (std::size_t r = 0; r < cfg.mc_runs; ++r) {
      auto& o = outcomes[r][i];
      v.run_rmse.push_back(o.ok ? o.rmse : std::numeric_limits<double>::quiet_NaN());
      v.step_errors.push_back(std::move(o.errors));
      if (o.ok) {
        iters += o.mean_iterations;
        ++ok;
      }
      if (r == 0 && cov_slot == i) result.cov_est = std::move(o.cov_est);
    }
    v.mean_iterations = ok ? iters / static_cast<double>(ok) : 0.0;
    result.variants.push_back(std::move(v));
  }
  return result;
}

// ---------------------------------------------------------------------------
// output

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError("unknown output format '" + s + "'");
}

namespace detail {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// RFC-4180 field quoting.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

inline json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

inline double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline json matrix_rows(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

inline Matrix matrix_from(const json& rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

}  // namespace detail

inline std::string summary_csv(const RunResult& r) {
  std::string out = "variant,param,rmse_mean,rmse_std,runs_ok\n";
  for (const auto& v : r.variants) {
    out += detail::csv_field(v.name) + ',' + (std::isnan(v.param) ? "" : detail::format_double(v.param)) +
           ',' + detail::format_double(v.rmse_mean()) + ',' + detail::format_double(v.rmse_std()) +
           ',' + std::to_string(v.runs_ok()) + '\n';
  }
  return out;
}

inline std::string variant_column(const VariantResult& v) {
  return std::isnan(v.param) ? v.name : v.name + "(" + detail::format_double(v.param) + ")";
}

/// One row per (run, step); each variant column holds the position error
/// at that step, empty for a failed run.
inline std::string trace_csv(const RunResult& r) {
  std::string out = "run,step";
  for (const auto& v : r.variants) out += ',' + detail::csv_field(variant_column(v));
  out += '\n';
  for (std::size_t run = 0; run < r.mc_runs; ++run) {
    for (std::size_t k = 0; k < r.steps; ++k) {
      out += std::to_string(run) + ',' + std::to_string(k);
      for (const auto& v : r.variants) {
        out += ',';
        const auto& row = v.step_errors[run];
        if (!row.empty()) out += detail::format_double(row[k]);
      }
      out += '\n';
    }
  }
  return out;
}

/// step, then sigma_i_j_true, sigma_i_j_est for every pair i <= j (1-based).
inline std::string cov_trace_csv(const RunResult& r) {
  const Eigen::Index d = r.meas_dim;
  std::string out = "step";
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      const std::string tag = "sigma_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
      out += ',' + tag + "_true," + tag + "_est";
    }
  }
  out += '\n';
  for (std::size_t k = 0; k < r.cov_true.size(); ++k) {
    out += std::to_string(k);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = i; j < d; ++j) {
        out += ',' + detail::format_double(r.cov_true[k](i, j)) + ',';
        if (k < r.cov_est.size()) out += detail::format_double(r.cov_est[k](i, j));
      }
    }
    out += '\n';
  }
  return out;
}

inline json result_to_json(const RunResult& r) {
  using detail::number_or_null;
  json j;
  j["experiment"] = r.experiment;
  j["scheme"] = r.scheme;
  j["steps"] = r.steps;
  j["mc_runs"] = r.mc_runs;
  j["seed"] = r.seed;
  j["meas_dim"] = r.meas_dim;
  json vs = json::array();
  for (const auto& v : r.variants) {
    json o;
    o["name"] = v.name;
    o["type"] = variant_type_name(v.type);
    o["param"] = number_or_null(v.param);
    json runs = json::array();
    for (double x : v.run_rmse) runs.push_back(number_or_null(x));
    o["run_rmse"] = runs;
    o["rmse_mean"] = number_or_null(v.rmse_mean());
    o["rmse_std"] = number_or_null(v.rmse_std());
    o["runs_ok"] = v.runs_ok();
    o["mean_iterations"] = v.mean_iterations;
    o["step_errors"] = v.step_errors;
    vs.push_back(o);
  }
  j["variants"] = vs;
  j["cov_variant"] = r.cov_variant;
  json ct = json::array();
  for (const auto& m : r.cov_true) ct.push_back(detail::matrix_rows(m));
  json ce = json::array();
  for (const auto& m : r.cov_est) ce.push_back(detail::matrix_rows(m));
  j["cov_true"] = ct;
  j["cov_est"] = ce;
  return j;
}

inline RunResult result_from_json(const json& j) {
  RunResult r;
  r.experiment = j.at("experiment").get<std::string>();
  r.scheme = j.at("scheme").get<std::string>();
  r.steps = j.at("steps").get<std::size_t>();
  r.mc_runs = j.at("mc_runs").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.meas_dim = j.at("meas_dim").get<Eigen::Index>();
  for (const auto& o : j.at("variants")) {
    VariantResult v;
    v.name = o.at("name").get<std::string>();
    v.type = parse_variant_type(o.at("type").get<std::string>());
    v.param = detail::number_from(o.at("param"));
    for (const auto& x : o.at("run_rmse")) v.run_rmse.push_back(detail::number_from(x));
    v.mean_iterations = o.at("mean_iterations").get<double>();
    v.step_errors = o.at("step_errors").get<std::vector<std::vector<double>>>();
    r.variants.push_back(std::move(v));
  }
  r.cov_variant = j.at("cov_variant").get<std::string>();
  for (const auto& m : j.at("cov_true")) r.cov_true.push_back(detail::matrix_from(m));
  for (const auto& m : j.at("cov_est")) r.cov_est.push_back(detail::matrix_from(m));
  return r;
}

inline RunResult load_result_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  try {
    return result_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw std::runtime_error("invalid result document '" + path.string() + "': " + e.what());
  }
}

/// Writes summary.csv, trace.csv and cov_trace.csv, or result.json, into `dir`.
inline std::vector<std::filesystem::path> emit(const RunResult& r, OutputFormat format,
                                               const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  if (format == OutputFormat::csv) {
    written = {dir / "summary.csv", dir / "trace.csv", dir / "cov_trace.csv"};
    detail::write_file(written[0], summary_csv(r));
    detail::write_file(written[1], trace_csv(r));
    detail::write_file(written[2], cov_trace_csv(r));
  } else {
    written = {dir / "result.json"};
    detail::write_file(written[0], result_to_json(r).dump(1) + '\n');
  }
  return written;
}

inline bool nan_equal(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

inline bool operator==(const VariantResult& a, const VariantResult& b) {
  if (a.name != b.name || a.type != b.type || !nan_equal(a.param, b.param) ||
      a.run_rmse.size() != b.run_rmse.size() || a.step_errors != b.step_errors ||
      a.mean_iterations != b.mean_iterations) {
    return false;
  }
  for (std::size_t i = 0; i < a.run_rmse.size(); ++i) {
    if (!nan_equal(a.run_rmse[i], b.run_rmse[i])) return false;
  }
  return true;
}

inline bool operator==(const RunResult& a, const RunResult& b) {
  auto same_trace = [](const TrueCovTrace& x, const TrueCovTrace& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (x[k].rows() != y[k].rows() || x[k].cols() != y[k].cols() || x[k] != y[k]) return false;
    }
    return true;
  };
  return a.experiment == b.experiment && a.scheme == b.scheme && a.steps == b.steps &&
         a.mc_runs == b.mc_runs && a.seed == b.seed && a.meas_dim == b.meas_dim &&
         a.variants == b.variants && a.cov_variant == b.cov_variant &&
         same_trace(a.cov_true, b.cov_true) && same_trace(a.cov_est, b.cov_est);
}

}  // namespace vbakf::exp
