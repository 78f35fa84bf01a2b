#pragma once

// Scenario configuration for the tracking experiments and its JSON mapping.

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "vbakf/models.hpp"
#include "vbakf/moments.hpp"

namespace vbakf::exp {

using json = nlohmann::json;

/// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { range_only, bearings_only };

enum class VariantType { true_cov, fixed_diag, vb_full, vb_diag };

struct VariantSpec {
  VariantType type = VariantType::vb_full;
  /// Standard deviations of the fixed diagonal covariance (fixed_diag only).
  std::vector<double> sigmas;
};

/// sigma = 0.1, 0.2, ..., 3.0
inline std::vector<double> default_sigma_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 30; ++i) grid.push_back(static_cast<double>(i) / 10.0);
  return grid;
}

struct PriorConfig {
  double position_var = 0.01;
  double velocity_var = 0.01;
  double turn_rate_var = 0.01;
  double sigma0_sq = 1.0;
  double eps = 1.0;
};

struct OutputConfig {
  std::string dir = "out";
  std::string format = "csv";
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::range_only;
  IntegrationScheme scheme = IntegrationScheme::unscented();
  std::vector<VariantSpec> variants;
  double rho = 1.0 - std::exp(-3.0);
  int iterations = 5;
  double tol = 1e-8;
  /// Forces every VB variant to estimate a diagonal covariance.
  bool diagonal = false;
  std::size_t steps = 1000;
  std::size_t mc_runs = 1;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double dt = 0.01;
  double q = 2.0;
  SensorArray sensors;
  PriorConfig prior;
  // range_only
  NoiseFieldConfig noise_field;
  LoopTrajectory trajectory;
  // bearings_only
  Vector initial_state;
  double turn_qc = 0.01;
  double turn_qw = 0.001;
  SmoothCovParams cov_trace;
  OutputConfig output;

  void validate() const {
    if (mc_runs < 1) throw ConfigError("mc_runs must be >= 1");
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (!(tol >= 0.0)) throw ConfigError("tol must be >= 0");
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in (0, 1]");
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (sensors.positions.empty()) throw ConfigError("at least one sensor is required");
    for (const auto& v : variants) {
      if (v.type == VariantType::fixed_diag) {
        if (v.sigmas.empty()) throw ConfigError("fixed_diag requires at least one sigma");
        for (double s : v.sigmas) {
          if (!(s > 0.0)) throw ConfigError("fixed_diag sigma must be > 0");
        }
      }
    }
    if (!(prior.sigma0_sq > 0.0) || !(prior.eps > 0.0)) {
      throw ConfigError("prior.sigma0_sq and prior.eps must be > 0");
    }
    if (!(prior.position_var > 0.0) || !(prior.velocity_var > 0.0) ||
        !(prior.turn_rate_var > 0.0)) {
      throw ConfigError("prior variances must be > 0");
    }
    if (output.format != "csv" && output.format != "json") {
      throw ConfigError("output.format must be csv or json");
    }
    try {
      scheme.validate();
      if (experiment == ExperimentKind::range_only) {
        noise_field.validate();
        if (!(q > 0.0)) throw ConfigError("q must be > 0");
      } else {
        if (initial_state.size() != 5) throw ConfigError("initial_state must have 5 entries");
        if (cov_trace.base_std.size() != static_cast<Eigen::Index>(sensors.size())) {
          throw ConfigError("cov_trace.base_std must have one entry per sensor");
        }
        if (!(cov_trace.base_std.array() > 0.0).all()) {
          throw ConfigError("cov_trace.base_std must be positive");
        }
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

// ---------------------------------------------------------------------------
// names

inline std::string experiment_name(ExperimentKind k) {
  return k == ExperimentKind::range_only ? "range_only" : "bearings_only";
}

inline std::string variant_type_name(VariantType t) {
  switch (t) {
    case VariantType::true_cov: return "true_cov";
    case VariantType::fixed_diag: return "fixed_diag";
    case VariantType::vb_full: return "vb_full";
    case VariantType::vb_diag: return "vb_diag";
  }
  return "unknown";
}

/// Short filter name of a scheme: EKF, UKF, CKF, GHKF.
inline std::string scheme_short_name(SchemeKind k) {
  switch (k) {
    case SchemeKind::taylor: return "EKF";
    case SchemeKind::unscented: return "UKF";
    case SchemeKind::cubature: return "CKF";
    case SchemeKind::gauss_hermite: return "GHKF";
  }
  return "GF";
}

inline SchemeKind parse_scheme_kind(const std::string& s) {
  if (s == "ekf" || s == "taylor") return SchemeKind::taylor;
  if (s == "ukf" || s == "unscented") return SchemeKind::unscented;
  if (s == "ckf" || s == "cubature") return SchemeKind::cubature;
  if (s == "ghkf" || s == "gauss_hermite") return SchemeKind::gauss_hermite;
  throw ConfigError("unknown scheme kind '" + s + "'");
}

inline VariantType parse_variant_type(const std::string& s) {
  if (s == "true_cov") return VariantType::true_cov;
  if (s == "fixed_diag") return VariantType::fixed_diag;
  if (s == "vb_full") return VariantType::vb_full;
  if (s == "vb_diag") return VariantType::vb_diag;
  throw ConfigError("unknown variant type '" + s + "'");
}

// ---------------------------------------------------------------------------
// defaults

inline std::vector<VariantSpec> default_variants() {
  return {{VariantType::true_cov, {}},
          {VariantType::fixed_diag, default_sigma_grid()},
          {VariantType::vb_full, {}},
          {VariantType::vb_diag, {}}};
}

inline ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.experiment = kind;
  cfg.variants = default_variants();
  if (kind == ExperimentKind::range_only) {
    cfg.scheme = IntegrationScheme::unscented(1.0, 0.0);
    cfg.dt = 0.01;
    cfg.q = 2.0;
    cfg.steps = 1000;
    cfg.sensors.positions = {{-3.0, -2.5}, {3.0, -2.5}, {0.0, 3.5}};
    cfg.trajectory.center = {0.0, 0.0};
    cfg.trajectory.radii = {2.0, 1.5};
    cfg.noise_field.sigma_bg2 = 0.01 * 0.01;
    cfg.noise_field.line_resolution = 5.0;
    cfg.noise_field.regions = {
        {RectRegion{-4.0, 0.0, -3.0, 0.0}, 0.01 * 0.01, 0.1 * 0.1, 2.0},
        {RectRegion{0.0, 4.0, 0.0, 4.0}, 0.01 * 0.01, 0.2 * 0.2, 2.0}};
    cfg.prior = {0.01, 0.1, 0.01, 0.01, 1.0};
  } else {
    cfg.scheme = IntegrationScheme::cubature();
    cfg.dt = 0.05;
    cfg.steps = 500;
    cfg.sensors.positions = {{-3.0, -3.0}, {3.0, -3.0}, {3.0, 3.0}, {-3.0, 3.0}};
    cfg.initial_state = Vector(5);
    cfg.initial_state << 0.0, 1.0, -1.5, 0.0, 1.0 / 1.5;
    cfg.turn_qc = 0.01;
    cfg.turn_qw = 0.001;
    cfg.cov_trace.base_std = Vector::Constant(4, 0.1);
    cfg.cov_trace.log_std_amplitude = 0.8;
    cfg.cov_trace.corr_amplitude = 1.0;
    cfg.cov_trace.cycles = 1.0;
    cfg.prior = {0.01, 0.01, 0.01, 1.0, 1.0};
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& at) {
  if (!j.is_object()) throw ConfigError(at + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.contains(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + at);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    const json& v = j.at(key);
    if (!v.is_number_unsigned()) {
      throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
    }
  }
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid value for '") + key + "': " + e.what());
  }
}

inline Eigen::Vector2d read_point(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(what + " must be a [u, v] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Vector read_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(what + " must be an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline json point_json(const Eigen::Vector2d& p) { return json::array({p(0), p(1)}); }

inline json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline NoiseRegion parse_region(const json& j) {
  check_keys(j, {"shape", "u_min", "u_max", "v_min", "v_max", "center", "radius", "sigma_bg2",
                 "sigma_magn2", "length_scale"},
             "noise_field.regions[]");
  NoiseRegion r;
  const std::string shape = j.value("shape", "rect");
  if (shape == "rect") {
    RectRegion rect{};
    for (const char* k : {"u_min", "u_max", "v_min", "v_max"}) {
      if (!j.contains(k)) throw ConfigError(std::string("rect region requires ") + k);
    }
    read(j, "u_min", rect.u_min);
    read(j, "u_max", rect.u_max);
    read(j, "v_min", rect.v_min);
    read(j, "v_max", rect.v_max);
    r.shape = rect;
  } else if (shape == "circle") {
    if (!j.contains("center") || !j.contains("radius")) {
      throw ConfigError("circle region requires center and radius");
    }
    CircleRegion c{read_point(j.at("center"), "region center"), 0.0};
    read(j, "radius", c.radius);
    r.shape = c;
  } else {
    throw ConfigError("unknown region shape '" + shape + "'");
  }
  read(j, "sigma_bg2", r.sigma_bg2);
  read(j, "sigma_magn2", r.sigma_magn2);
  read(j, "length_scale", r.length_scale);
  return r;
}

inline json region_json(const NoiseRegion& r) {
  json j;
  if (const auto* rect = std::get_if<RectRegion>(&r.shape)) {
    j["shape"] = "rect";
    j["u_min"] = rect->u_min;
    j["u_max"] = rect->u_max;
    j["v_min"] = rect->v_min;
    j["v_max"] = rect->v_max;
  } else {
    const auto& c = std::get<CircleRegion>(r.shape);
    j["shape"] = "circle";
    j["center"] = point_json(c.center);
    j["radius"] = c.radius;
  }
  j["sigma_bg2"] = r.sigma_bg2;
  j["sigma_magn2"] = r.sigma_magn2;
  j["length_scale"] = r.length_scale;
  return j;
}

}  // namespace detail

/// Parses a config document. Missing fields take the defaults of the named
/// experiment; unknown keys are rejected.
inline ExperimentConfig parse_config(const json& j) {
  using namespace detail;
  check_keys(j, {"schema_version", "experiment", "scheme", "variants", "rho", "iterations", "tol",
                 "diagonal", "steps", "mc_runs", "seed", "threads", "dt", "q", "sensors", "prior",
                 "noise_field", "trajectory", "initial_state", "turn_noise", "cov_trace", "output"},
             "config");
  if (!j.contains("schema_version") || j.at("schema_version") != 1) {
    throw ConfigError("config requires \"schema_version\": 1");
  }
  if (!j.contains("experiment") || !j.at("experiment").is_string()) {
    throw ConfigError("config requires \"experiment\"");
  }
  const std::string exp_name = j.at("experiment").get<std::string>();
  ExperimentKind kind;
  if (exp_name == "range_only") {
    kind = ExperimentKind::range_only;
  } else if (exp_name == "bearings_only") {
    kind = ExperimentKind::bearings_only;
  } else {
    throw ConfigError("unknown experiment '" + exp_name + "'");
  }
  ExperimentConfig cfg = default_config(kind);

  if (j.contains("scheme")) {
    const json& s = j.at("scheme");
    check_keys(s, {"kind", "alpha", "beta", "kappa", "gh_order", "fd_step"}, "scheme");
    if (s.contains("kind")) cfg.scheme.kind = parse_scheme_kind(s.at("kind").get<std::string>());
    read(s, "alpha", cfg.scheme.ut_alpha);
    read(s, "beta", cfg.scheme.ut_beta);
    if (s.contains("kappa")) {
      if (s.at("kappa").is_null()) {
        cfg.scheme.ut_kappa.reset();
      } else {
        double kappa = 0.0;
        read(s, "kappa", kappa);
        cfg.scheme.ut_kappa = kappa;
      }
    }
    read(s, "gh_order", cfg.scheme.gh_order);
    read(s, "fd_step", cfg.scheme.fd_step);
  }
  if (j.contains("variants")) {
    const json& vs = j.at("variants");
    if (!vs.is_array()) throw ConfigError("variants must be an array");
    cfg.variants.clear();
    for (const auto& v : vs) {
      check_keys(v, {"type", "sigmas"}, "variants[]");
      if (!v.contains("type")) throw ConfigError("variant requires a type");
      VariantSpec spec;
      spec.type = parse_variant_type(v.at("type").get<std::string>());
      if (spec.type == VariantType::fixed_diag) {
        spec.sigmas = default_sigma_grid();
        read(v, "sigmas", spec.sigmas);
      }
      cfg.variants.push_back(std::move(spec));
    }
  }
  read(j, "rho", cfg.rho);
  read(j, "iterations", cfg.iterations);
  read(j, "tol", cfg.tol);
  read(j, "diagonal", cfg.diagonal);
  read(j, "steps", cfg.steps);
  read(j, "mc_runs", cfg.mc_runs);
  read(j, "seed", cfg.seed);
  read(j, "threads", cfg.threads);
  read(j, "dt", cfg.dt);
  read(j, "q", cfg.q);
  if (j.contains("sensors")) {
    const json& s = j.at("sensors");
    if (!s.is_array()) throw ConfigError("sensors must be an array of [u, v] pairs");
    cfg.sensors.positions.clear();
    for (const auto& p : s) cfg.sensors.positions.push_back(read_point(p, "sensor"));
  }
  if (j.contains("prior")) {
    const json& p = j.at("prior");
    check_keys(p, {"position_var", "velocity_var", "turn_rate_var", "sigma0_sq", "eps"}, "prior");
    read(p, "position_var", cfg.prior.position_var);
    read(p, "velocity_var", cfg.prior.velocity_var);
    read(p, "turn_rate_var", cfg.prior.turn_rate_var);
    read(p, "sigma0_sq", cfg.prior.sigma0_sq);
    read(p, "eps", cfg.prior.eps);
  }
  if (j.contains("noise_field")) {
    const json& n = j.at("noise_field");
    check_keys(n, {"sigma_bg2", "line_resolution", "regions"}, "noise_field");
    read(n, "sigma_bg2", cfg.noise_field.sigma_bg2);
    read(n, "line_resolution", cfg.noise_field.line_resolution);
    if (n.contains("regions")) {
      if (!n.at("regions").is_array()) throw ConfigError("noise_field.regions must be an array");
      cfg.noise_field.regions.clear();
      for (const auto& r : n.at("regions")) cfg.noise_field.regions.push_back(parse_region(r));
    }
  }
  if (j.contains("trajectory")) {
    const json& t = j.at("trajectory");
    check_keys(t, {"center", "radii", "laps", "phase"}, "trajectory");
    if (t.contains("center")) cfg.trajectory.center = read_point(t.at("center"), "trajectory.center");
    if (t.contains("radii")) cfg.trajectory.radii = read_point(t.at("radii"), "trajectory.radii");
    read(t, "laps", cfg.trajectory.laps);
    read(t, "phase", cfg.trajectory.phase);
  }
  if (j.contains("initial_state")) cfg.initial_state = read_vector(j.at("initial_state"), "initial_state");
  if (j.contains("turn_noise")) {
    const json& t = j.at("turn_noise");
    check_keys(t, {"qc", "qw"}, "turn_noise");
    read(t, "qc", cfg.turn_qc);
    read(t, "qw", cfg.turn_qw);
  }
  if (j.contains("cov_trace")) {
    const json& c = j.at("cov_trace");
    check_keys(c, {"base_std", "log_std_amplitude", "corr_amplitude", "cycles"}, "cov_trace");
    if (c.contains("base_std")) cfg.cov_trace.base_std = read_vector(c.at("base_std"), "cov_trace.base_std");
    read(c, "log_std_amplitude", cfg.cov_trace.log_std_amplitude);
    read(c, "corr_amplitude", cfg.cov_trace.corr_amplitude);
    read(c, "cycles", cfg.cov_trace.cycles);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, {"dir", "format"}, "output");
    read(o, "dir", cfg.output.dir);
    read(o, "format", cfg.output.format);
  }
  cfg.validate();
  return cfg;
}

inline json to_json(const ExperimentConfig& cfg) {
  using namespace detail;
  json j;
  j["schema_version"] = 1;
  j["experiment"] = experiment_name(cfg.experiment);
  json s;
  s["kind"] = to_string(cfg.scheme.kind);
  s["alpha"] = cfg.scheme.ut_alpha;
  s["beta"] = cfg.scheme.ut_beta;
  s["kappa"] = cfg.scheme.ut_kappa ? json(*cfg.scheme.ut_kappa) : json(nullptr);
  s["gh_order"] = cfg.scheme.gh_order;
  s["fd_step"] = cfg.scheme.fd_step;
  j["scheme"] = s;
  json vs = json::array();
  for (const auto& v : cfg.variants) {
    json o;
    o["type"] = variant_type_name(v.type);
    if (v.type == VariantType::fixed_diag) o["sigmas"] = v.sigmas;
    vs.push_back(o);
  }
  j["variants"] = vs;
  j["rho"] = cfg.rho;
  j["iterations"] = cfg.iterations;
  j["tol"] = cfg.tol;
  j["diagonal"] = cfg.diagonal;
  j["steps"] = cfg.steps;
  j["mc_runs"] = cfg.mc_runs;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["dt"] = cfg.dt;
  j["q"] = cfg.q;
  json sensors = json::array();
  for (const auto& p : cfg.sensors.positions) sensors.push_back(point_json(p));
  j["sensors"] = sensors;
  j["prior"] = {{"position_var", cfg.prior.position_var},
                {"velocity_var", cfg.prior.velocity_var},
                {"turn_rate_var", cfg.prior.turn_rate_var},
                {"sigma0_sq", cfg.prior.sigma0_sq},
                {"eps", cfg.prior.eps}};
  if (cfg.experiment == ExperimentKind::range_only) {
    json regions = json::array();
    for (const auto& r : cfg.noise_field.regions) regions.push_back(region_json(r));
    j["noise_field"] = {{"sigma_bg2", cfg.noise_field.sigma_bg2},
                        {"line_resolution", cfg.noise_field.line_resolution},
                        {"regions", regions}};
    j["trajectory"] = {{"center", point_json(cfg.trajectory.center)},
                       {"radii", point_json(cfg.trajectory.radii)},
                       {"laps", cfg.trajectory.laps},
                       {"phase", cfg.trajectory.phase}};
  } else {
    j["initial_state"] = vector_json(cfg.initial_state);
    j["turn_noise"] = {{"qc", cfg.turn_qc}, {"qw", cfg.turn_qw}};
    j["cov_trace"] = {{"base_std", vector_json(cfg.cov_trace.base_std)},
                      {"log_std_amplitude", cfg.cov_trace.log_std_amplitude},
                      {"corr_amplitude", cfg.cov_trace.corr_amplitude},
                      {"cycles", cfg.cov_trace.cycles}};
  }
  j["output"] = {{"dir", cfg.output.dir}, {"format", cfg.output.format}};
  return j;
}

/// JSON Schema (draft 2020-12) of the config document.
inline json config_schema() {
  const json number = {{"type", "number"}};
  const json positive = {{"type", "number"}, {"exclusiveMinimum", 0}};
  const json point = {{"type", "array"}, {"items", number}, {"minItems", 2}, {"maxItems", 2}};
  const json numbers = {{"type", "array"}, {"items", number}};
  json region = {
      {"type", "object"},
      {"additionalProperties", false},
      {"properties",
       {{"shape", {{"enum", {"rect", "circle"}}}},
        {"u_min", number}, {"u_max", number}, {"v_min", number}, {"v_max", number},
        {"center", point}, {"radius", positive},
        {"sigma_bg2", positive}, {"sigma_magn2", positive}, {"length_scale", positive}}}};
  json variant = {
      {"type", "object"},
      {"additionalProperties", false},
      {"required", {"type"}},
      {"properties",
       {{"type", {{"enum", {"true_cov", "fixed_diag", "vb_full", "vb_diag"}}}},
        {"sigmas", {{"type", "array"}, {"items", positive}, {"minItems", 1}}}}}};
  json schema = {
      {"$schema", "https://json-schema.org/draft/2020-12/schema"},
      {"title", "vbakf experiment configuration"},
      {"type", "object"},
      {"additionalProperties", false},
      {"required", {"schema_version", "experiment"}},
      {"properties",
       {{"schema_version", {{"const", 1}}},
        {"experiment", {{"enum", {"range_only", "bearings_only"}}}},
        {"scheme",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties",
           {{"kind", {{"enum", {"ekf", "ukf", "ckf", "ghkf", "taylor", "unscented", "cubature",
                                "gauss_hermite"}}}},
            {"alpha", positive},
            {"beta", number},
            {"kappa", {{"type", {"number", "null"}}, {"description", "null means 3 - state dimension"}}},
            {"gh_order", {{"type", "integer"}, {"minimum", 1}}},
            {"fd_step", positive}}}}},
        {"variants", {{"type", "array"}, {"items", variant}}},
        {"rho", {{"type", "number"}, {"exclusiveMinimum", 0}, {"maximum", 1}}},
        {"iterations", {{"type", "integer"}, {"minimum", 1}}},
        {"tol", {{"type", "number"}, {"minimum", 0}}},
        {"diagonal", {{"type", "boolean"}}},
        {"steps", {{"type", "integer"}, {"minimum", 1}}},
        {"mc_runs", {{"type", "integer"}, {"minimum", 1}}},
        {"seed", {{"type", "integer"}, {"minimum", 0}}},
        {"threads", {{"type", "integer"}, {"minimum", 0}}},
        {"dt", positive},
        {"q", positive},
        {"sensors", {{"type", "array"}, {"items", point}, {"minItems", 1}}},
        {"prior",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties",
           {{"position_var", positive}, {"velocity_var", positive}, {"turn_rate_var", positive},
            {"sigma0_sq", positive}, {"eps", positive}}}}},
        {"noise_field",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties",
           {{"sigma_bg2", positive},
            {"line_resolution", {{"type", "number"}, {"minimum", 1}}},
            {"regions", {{"type", "array"}, {"items", region}}}}}}},
        {"trajectory",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties", {{"center", point}, {"radii", point}, {"laps", number}, {"phase", number}}}}},
        {"initial_state", {{"type", "array"}, {"items", number}, {"minItems", 5}, {"maxItems", 5}}},
        {"turn_noise",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties", {{"qc", {{"type", "number"}, {"minimum", 0}}},
                          {"qw", {{"type", "number"}, {"minimum", 0}}}}}}},
        {"cov_trace",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties",
           {{"base_std", numbers}, {"log_std_amplitude", number}, {"corr_amplitude", number},
            {"cycles", number}}}}},
        {"output",
         {{"type", "object"},
          {"additionalProperties", false},
          {"properties", {{"dir", {{"type", "string"}}}, {"format", {{"enum", {"csv", "json"}}}}}}}}}}};
  return schema;
}

}  // namespace vbakf::exp
