#pragma once

// Concrete tracking models: Wiener-velocity and coordinated-turn dynamics,
// range and bearing sensor arrays, the spatially correlated noise field that
// induces the true measurement covariance, and a seeded simulator.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "vbakf/additive_model.hpp"
#include "vbakf/errors.hpp"
#include "vbakf/linalg.hpp"

namespace vbakf {

struct LinearDynamics {
  Matrix A;
  Matrix Q;
};

/// Discretized Wiener velocity model. The state stacks all positions first
/// and then all velocities, i.e. (u, v, du, dv) for two axes.
inline LinearDynamics wiener_velocity(double q, double dt, int axes = 2) {
  if (!(q > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("wiener_velocity: q and dt must be positive");
  }
  if (axes < 1) throw std::invalid_argument("wiener_velocity: axes must be >= 1");
  const Eigen::Index a = axes;
  const Matrix I = Matrix::Identity(a, a);
  LinearDynamics out;
  out.A = Matrix::Identity(2 * a, 2 * a);
  out.A.topRightCorner(a, a) = dt * I;
  out.Q.resize(2 * a, 2 * a);
  out.Q.topLeftCorner(a, a) = q * dt * dt * dt / 3.0 * I;
  out.Q.topRightCorner(a, a) = q * dt * dt / 2.0 * I;
  out.Q.bottomLeftCorner(a, a) = q * dt * dt / 2.0 * I;
  out.Q.bottomRightCorner(a, a) = q * dt * I;
  return out;
}

/// Coordinated turn with state (u, du, v, dv, omega).
inline Vector coordinated_turn_f(const Vector& x, double dt) {
  if (x.size() != 5) throw DimensionMismatch("coordinated_turn_f: state must have 5 entries");
  const double w = x(4);
  const double wt = w * dt;
  double s_over_w;     // sin(w dt) / w
  double omc_over_w;   // (1 - cos(w dt)) / w
  if (std::abs(wt) < 1e-4) {
    s_over_w = dt * (1.0 - wt * wt / 6.0);
    omc_over_w = w * dt * dt / 2.0 * (1.0 - wt * wt / 12.0);
  } else {
    s_over_w = std::sin(wt) / w;
    omc_over_w = (1.0 - std::cos(wt)) / w;
  }
  const double c = std::cos(wt);
  const double s = std::sin(wt);
  Vector out(5);
  out(0) = x(0) + s_over_w * x(1) - omc_over_w * x(3);
  out(1) = c * x(1) - s * x(3);
  out(2) = omc_over_w * x(1) + x(2) + s_over_w * x(3);
  out(3) = s * x(1) + c * x(3);
  out(4) = w;
  return out;
}

/// Process noise for the coordinated turn: Wiener-velocity blocks with
/// spectral density qc on (u, du) and (v, dv), and qw * dt on omega.
inline Matrix coordinated_turn_Q(double qc, double qw, double dt) {
  if (!(qc >= 0.0) || !(qw >= 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("coordinated_turn_Q: invalid parameters");
  }
  Matrix block(2, 2);
  block << dt * dt * dt / 3.0, dt * dt / 2.0, dt * dt / 2.0, dt;
  Matrix Q = Matrix::Zero(5, 5);
  Q.block(0, 0, 2, 2) = qc * block;
  Q.block(2, 2, 2, 2) = qc * block;
  Q(4, 4) = qw * dt;
  return Q;
}

struct SensorArray {
  std::vector<Eigen::Vector2d> positions;

  std::size_t size() const noexcept { return positions.size(); }

  void validate() const {
    if (positions.empty()) throw std::invalid_argument("SensorArray: no sensors");
    for (const auto& p : positions) {
      if (!p.allFinite()) throw std::invalid_argument("SensorArray: non-finite position");
    }
  }
};

/// Indices of the planar position (u, v) inside a state vector.
struct PositionLayout {
  Eigen::Index u = 0;
  Eigen::Index v = 1;

  Eigen::Vector2d extract(const Vector& x) const { return {x(u), x(v)}; }
};

inline constexpr PositionLayout kWienerLayout{0, 1};
inline constexpr PositionLayout kTurnLayout{0, 2};

inline Vector range_h(const Vector& x, const SensorArray& sensors,
                      PositionLayout layout = kWienerLayout) {
  const Eigen::Vector2d p = layout.extract(x);
  Vector out(static_cast<Eigen::Index>(sensors.size()));
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = (sensors.positions[i] - p).norm();
  }
  return out;
}

/// Undefined (NaN rows) when the target sits on a sensor.
inline Matrix range_jacobian(const Vector& x, const SensorArray& sensors,
                             PositionLayout layout = kWienerLayout) {
  const Eigen::Vector2d p = layout.extract(x);
  Matrix J = Matrix::Zero(static_cast<Eigen::Index>(sensors.size()), x.size());
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const Eigen::Vector2d diff = p - sensors.positions[i];
    const double r = diff.norm();
    const auto row = static_cast<Eigen::Index>(i);
    J(row, layout.u) = diff(0) / r;
    J(row, layout.v) = diff(1) / r;
  }
  return J;
}

/// Maps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(a, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

inline Vector angle_residual(const Vector& a, const Vector& b) {
  Vector out = a - b;
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = wrap_angle(out(i));
  return out;
}

/// Full-quadrant bearing from each sensor to the target, in (-pi, pi].
inline Vector bearings_h(const Vector& x, const SensorArray& sensors,
                         PositionLayout layout = kTurnLayout) {
  const Eigen::Vector2d p = layout.extract(x);
  Vector out(static_cast<Eigen::Index>(sensors.size()));
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const Eigen::Vector2d diff = p - sensors.positions[i];
    if (diff(0) == 0.0 && diff(1) == 0.0) {
      throw std::domain_error("bearings_h: target coincides with sensor " + std::to_string(i));
    }
    out(static_cast<Eigen::Index>(i)) = std::atan2(diff(1), diff(0));
  }
  return out;
}

/// Wiener-velocity dynamics with range measurements, state (u, v, du, dv).
inline AdditiveModel range_only_model(const SensorArray& sensors, double q, double dt) {
  sensors.validate();
  const LinearDynamics lin = wiener_velocity(q, dt, 2);
  AdditiveModel model;
  model.state_dim = 4;
  model.meas_dim = static_cast<Eigen::Index>(sensors.size());
  const Matrix A = lin.A;
  model.f = Mapping([A](const Vector& x) { return Vector(A * x); },
                    [A](const Vector&) { return A; });
  model.h = Mapping([sensors](const Vector& x) { return range_h(x, sensors); },
                    [sensors](const Vector& x) { return range_jacobian(x, sensors); });
  model.Q = lin.Q;
  return model;
}

/// Coordinated-turn dynamics with bearing measurements, state (u, du, v, dv, omega).
/// Innovations are wrapped to (-pi, pi] through the residual hook.
inline AdditiveModel bearings_only_model(const SensorArray& sensors, double dt, Matrix Q) {
  sensors.validate();
  AdditiveModel model;
  model.state_dim = 5;
  model.meas_dim = static_cast<Eigen::Index>(sensors.size());
  model.f = Mapping([dt](const Vector& x) { return coordinated_turn_f(x, dt); });
  model.h = Mapping([sensors](const Vector& x) { return bearings_h(x, sensors); },
                    JacobianFunction{}, angle_residual);
  model.Q = std::move(Q);
  return model;
}

// ---------------------------------------------------------------------------
// Noise field

struct RectRegion {
  double u_min, u_max, v_min, v_max;
  bool contains(const Eigen::Vector2d& p) const {
    return p(0) >= u_min && p(0) <= u_max && p(1) >= v_min && p(1) <= v_max;
  }
};

struct CircleRegion {
  Eigen::Vector2d center;
  double radius;
  bool contains(const Eigen::Vector2d& p) const { return (p - center).norm() <= radius; }
};

/// Bounded area with white variance sigma_bg2 plus a squared-exponential
/// component sigma_magn2 * exp(-|p - q|^2 / length_scale^2).
struct NoiseRegion {
  std::variant<RectRegion, CircleRegion> shape;
  double sigma_bg2 = 0.0;
  double sigma_magn2 = 0.0;
  double length_scale = 1.0;

  bool contains(const Eigen::Vector2d& p) const {
    return std::visit([&](const auto& s) { return s.contains(p); }, shape);
  }
};

struct NoiseFieldConfig {
  double sigma_bg2 = 1e-4;
  std::vector<NoiseRegion> regions;
  /// Discretization points per unit length of a sensor-target segment.
  double line_resolution = 10.0;

  void validate() const {
    if (!(sigma_bg2 > 0.0)) throw std::invalid_argument("NoiseFieldConfig: sigma_bg2 must be > 0");
    if (!(line_resolution >= 1.0)) {
      throw std::invalid_argument("NoiseFieldConfig: line_resolution must be >= 1");
    }
    for (const auto& r : regions) {
      if (!(r.sigma_bg2 > 0.0) || !(r.sigma_magn2 > 0.0) || !(r.length_scale > 0.0)) {
        throw std::invalid_argument("NoiseFieldConfig: region variances and length scale must be > 0");
      }
    }
  }
};

namespace detail {

struct DiscretizedLine {
  std::vector<Eigen::Vector2d> points;
  std::vector<double> white;                 // white variance at each point
  std::vector<std::vector<char>> inside;     // [region][point]
};

inline DiscretizedLine discretize_line(const Eigen::Vector2d& from, const Eigen::Vector2d& to,
                                       const NoiseFieldConfig& cfg) {
  DiscretizedLine line;
  const double len = (to - from).norm();
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len * cfg.line_resolution)));
  line.points.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = len > 0.0 ? (static_cast<double>(j) + 0.5) / static_cast<double>(n) : 0.0;
    line.points.push_back(from + t * (to - from));
  }
  line.white.assign(n, cfg.sigma_bg2);
  line.inside.assign(cfg.regions.size(), std::vector<char>(n, 0));
  for (std::size_t r = 0; r < cfg.regions.size(); ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      if (cfg.regions[r].contains(line.points[j])) {
        line.inside[r][j] = 1;
        line.white[j] += cfg.regions[r].sigma_bg2;
      }
    }
  }
  return line;
}

}  // namespace detail

/// Covariance of the line-averaged field between each sensor and the target.
///
/// Entry (i, j) averages the squared-exponential kernel over point pairs of
/// the discretized segments L_i and L_j, restricted to pairs inside a common
/// region. White terms count only for coinciding points and are scaled by
/// 1 / sqrt(n_i n_j), so the diagonal carries the line-averaged white
/// variance independently of the resolution.
inline Matrix noise_field_cov(const Eigen::Vector2d& target, const SensorArray& sensors,
                              const NoiseFieldConfig& cfg) {
  sensors.validate();
  cfg.validate();
  std::vector<detail::DiscretizedLine> lines;
  lines.reserve(sensors.size());
  for (const auto& s : sensors.positions) lines.push_back(detail::discretize_line(s, target, cfg));

  const auto d = static_cast<Eigen::Index>(sensors.size());
  Matrix sigma = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      const auto& li = lines[static_cast<std::size_t>(i)];
      const auto& lj = lines[static_cast<std::size_t>(j)];
      const double ni = static_cast<double>(li.points.size());
      const double nj = static_cast<double>(lj.points.size());
      double correlated = 0.0;
      for (std::size_t r = 0; r < cfg.regions.size(); ++r) {
        const auto& region = cfg.regions[r];
        const double inv_l2 = 1.0 / (region.length_scale * region.length_scale);
        double acc = 0.0;
        for (std::size_t p = 0; p < li.points.size(); ++p) {
          if (!li.inside[r][p]) continue;
          for (std::size_t q = 0; q < lj.points.size(); ++q) {
            if (!lj.inside[r][q]) continue;
            acc += std::exp(-(li.points[p] - lj.points[q]).squaredNorm() * inv_l2);
          }
        }
        correlated += region.sigma_magn2 * acc;
      }
      double white = 0.0;
      if (i == j) {
        for (double w : li.white) white += w;
      } else {
        for (std::size_t p = 0; p < li.points.size(); ++p) {
          for (std::size_t q = 0; q < lj.points.size(); ++q) {
            if ((li.points[p] - lj.points[q]).squaredNorm() < 1e-24) white += li.white[p];
          }
        }
      }
      sigma(i, j) = correlated / (ni * nj) + white / std::sqrt(ni * nj);
      sigma(j, i) = sigma(i, j);
    }
  }
  return ensure_spd(sigma, "noise field covariance");
}

// ---------------------------------------------------------------------------
// Smoothly varying covariance trace

using TrueCovTrace = std::vector<Matrix>;

/// Sigma(tau) = D(tau) R(tau) D(tau), tau = k / steps. Standard deviations
/// vary as base_std_i * exp(log_std_amplitude * sin(.)), the correlation R
/// is the normalized Gram matrix of a unit lower-triangular factor whose
/// sub-diagonal entries are corr_amplitude * sin(.). `cycles` sets how many
/// periods the slowest component completes over the trace.
struct SmoothCovParams {
  Vector base_std;
  double log_std_amplitude = 0.5;
  double corr_amplitude = 0.8;
  double cycles = 1.0;
};

inline Matrix smooth_cov_at(double tau, const SmoothCovParams& params) {
  const Eigen::Index d = params.base_std.size();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Matrix L = Matrix::Identity(d, d);
  for (Eigen::Index i = 1; i < d; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double freq = params.cycles * (1.0 + 0.25 * static_cast<double>((i + j) % 3));
      const double phase = 0.7 * static_cast<double>(i) + 1.3 * static_cast<double>(j);
      L(i, j) = params.corr_amplitude * std::sin(two_pi * freq * tau + phase);
    }
  }
  Matrix gram = L * L.transpose();
  const Vector inv_sd = gram.diagonal().cwiseSqrt().cwiseInverse();
  Vector sd(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double freq = params.cycles * (1.0 + 0.5 * static_cast<double>(i) / static_cast<double>(d));
    const double phase = two_pi * static_cast<double>(i) / static_cast<double>(d);
    sd(i) = params.base_std(i) *
            std::exp(params.log_std_amplitude * std::sin(two_pi * freq * tau + phase));
  }
  const Vector scale = sd.cwiseProduct(inv_sd);
  return symmetrize(scale.asDiagonal() * gram * scale.asDiagonal());
}

inline TrueCovTrace smooth_cov_trace(std::size_t steps, const SmoothCovParams& params) {
  if (steps < 1) throw std::invalid_argument("smooth_cov_trace: steps must be >= 1");
  if (params.base_std.size() < 1 || !(params.base_std.array() > 0.0).all()) {
    throw std::invalid_argument("smooth_cov_trace: base_std must be positive");
  }
  TrueCovTrace trace;
  trace.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    trace.push_back(
        smooth_cov_at(static_cast<double>(k) / static_cast<double>(steps), params));
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Simulation

/// Closed loop u = cu + a cos(phi), v = cv + b sin(phi), phi = phase + 2 pi laps k / steps,
/// sampled every dt; returned states are (u, v, du, dv).
struct LoopTrajectory {
  Eigen::Vector2d center{0.0, 0.0};
  Eigen::Vector2d radii{1.0, 1.0};
  double laps = 1.0;
  double phase = 0.0;

  /// State at sample k of a loop traced over `steps` samples of length dt;
  /// k = 0 is the state one step before the first sample of states().
  Vector state_at(std::size_t k, std::size_t steps, double dt) const {
    const double rate = 2.0 * std::numbers::pi * laps / (static_cast<double>(steps) * dt);
    const double phi = phase + rate * static_cast<double>(k) * dt;
    Vector x(4);
    x << center(0) + radii(0) * std::cos(phi), center(1) + radii(1) * std::sin(phi),
        -radii(0) * rate * std::sin(phi), radii(1) * rate * std::cos(phi);
    return x;
  }

  std::vector<Vector> states(std::size_t steps, double dt) const {
    std::vector<Vector> out;
    out.reserve(steps);
    for (std::size_t k = 1; k <= steps; ++k) out.push_back(state_at(k, steps, dt));
    return out;
  }
};

using CovSource = std::variant<NoiseFieldConfig, TrueCovTrace>;

struct Simulation {
  std::vector<Vector> states;
  std::vector<Vector> measurements;
  TrueCovTrace covs;
};

namespace detail {

// Factor for sampling N(0, C); a zero matrix yields a zero factor.
inline Matrix sampling_factor(const Matrix& c, const char* what) {
  if (c.isZero(0.0)) return Matrix::Zero(c.rows(), c.cols());
  const Matrix s = symmetrize(c);
  if (is_spd(s)) return cholesky_lower(s, what);
  return cholesky_lower(ensure_spd(s, what), what);
}

inline Vector standard_normal(Eigen::Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(gen);
  return z;
}

inline Matrix cov_from_source(const CovSource& source, std::size_t k, const Vector& x,
                              const SensorArray& sensors, PositionLayout layout) {
  if (const auto* field = std::get_if<NoiseFieldConfig>(&source)) {
    return noise_field_cov(layout.extract(x), sensors, *field);
  }
  const auto& trace = std::get<TrueCovTrace>(source);
  if (k >= trace.size()) throw std::invalid_argument("simulate: covariance trace too short");
  return trace[k];
}

}  // namespace detail

/// Measurements along given true states with r_k ~ N(0, Sigma_k).
inline Simulation simulate_measurements(std::vector<Vector> states, const AdditiveModel& model,
                                        const SensorArray& sensors, const CovSource& source,
                                        std::uint64_t seed, PositionLayout layout) {
  std::mt19937_64 gen(seed);
  Simulation sim;
  sim.states = std::move(states);
  sim.measurements.reserve(sim.states.size());
  sim.covs.reserve(sim.states.size());
  for (std::size_t k = 0; k < sim.states.size(); ++k) {
    Matrix sigma = detail::cov_from_source(source, k, sim.states[k], sensors, layout);
    const Matrix factor = detail::sampling_factor(sigma, "measurement covariance");
    sim.measurements.push_back(model.h(sim.states[k]) +
                               factor * detail::standard_normal(sigma.rows(), gen));
    sim.covs.push_back(std::move(sigma));
  }
  return sim;
}

/// Draws x_k = f(x_{k-1}) + q_k from x0 for `steps` steps, then measurements.
/// Deterministic given `seed`: process noise and measurement noise come from
/// two generators seeded from it.
inline Simulation simulate(const AdditiveModel& model, const SensorArray& sensors,
                           const CovSource& source, std::size_t steps, const Vector& x0,
                           std::uint64_t seed, PositionLayout layout) {
  model.validate();
  if (x0.size() != model.state_dim) throw DimensionMismatch("simulate: x0 has wrong size");
  std::mt19937_64 gen(seed);
  const Matrix qf = detail::sampling_factor(model.Q, "process noise covariance");
  std::vector<Vector> states;
  states.reserve(steps);
  Vector x = x0;
  for (std::size_t k = 0; k < steps; ++k) {
    x = model.f(x) + qf * detail::standard_normal(model.state_dim, gen);
    states.push_back(x);
  }
  return simulate_measurements(std::move(states), model, sensors, source,
                               seed ^ 0x9e3779b97f4a7c15ULL, layout);
}

}  // namespace vbakf
