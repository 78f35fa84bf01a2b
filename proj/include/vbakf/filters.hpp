#pragma once

// Gaussian filter with known measurement covariance, the linear
// variational-Bayes adaptive Kalman filter and its sigma-point / Taylor
// generalization over a Gaussian x inverse-Wishart posterior.

#include <cstddef>
#include <exception>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "vbakf/additive_model.hpp"
#include "vbakf/beliefs.hpp"
#include "vbakf/errors.hpp"
#include "vbakf/linalg.hpp"
#include "vbakf/moments.hpp"

namespace vbakf {

struct VbConfig {
  int iterations = 5;
  /// Early stop once the Frobenius change of V in a sweep drops below tol.
  double tol = 1e-8;
  /// Only the diagonal of the V increment is accumulated.
  bool diagonal = false;
  CovarianceDynamics dyn;
  IntegrationScheme scheme;

  void validate() const {
    if (iterations < 1) throw std::invalid_argument("VbConfig: iterations must be >= 1");
    if (!(tol >= 0.0)) throw std::invalid_argument("VbConfig: tol must be >= 0");
    dyn.validate();
    scheme.validate();
  }
};

struct UpdateDiagnostics {
  int iterations_run = 0;
  double final_delta = 0.0;
  Vector innovation;          // y - mu
  Matrix predicted_meas_cov;  // final S
  Matrix gain;                // final K
};

struct GaussianUpdate {
  GaussianState state;
  UpdateDiagnostics diagnostics;
};

struct JointUpdate {
  JointBelief belief;
  UpdateDiagnostics diagnostics;
};

inline GaussianState gf_predict(const GaussianState& belief, const Mapping& f, const Matrix& Q,
                                const IntegrationScheme& scheme) {
  if (Q.rows() != belief.dim() || Q.cols() != belief.dim()) {
    throw DimensionMismatch("gf_predict: Q does not match the state dimension");
  }
  const PropagatedMoments pm = propagate(f, belief.mean, belief.cov, scheme);
  if (pm.mean.size() != belief.dim()) {
    throw DimensionMismatch("gf_predict: dynamic function changes the state dimension");
  }
  return {pm.mean, ensure_spd(pm.cov + Q, "predicted covariance")};
}

inline GaussianUpdate gf_update(const GaussianState& belief, const Vector& y, const Mapping& h,
                                const Matrix& Sigma, const IntegrationScheme& scheme) {
  if (Sigma.rows() != y.size() || Sigma.cols() != y.size()) {
    throw DimensionMismatch("gf_update: Sigma does not match the measurement");
  }
  if (!is_spd(symmetrize(Sigma))) throw InvalidCovariance("gf_update: Sigma is not SPD");
  const PropagatedMoments pm = propagate(h, belief.mean, belief.cov, scheme);
  if (pm.mean.size() != y.size()) {
    throw DimensionMismatch("gf_update: measurement function output size mismatch");
  }
  GaussianUpdate out;
  const Matrix S = symmetrize(pm.cov + Sigma);
  const Matrix K = right_solve_spd(pm.cross_cov, S, "innovation covariance");
  const Vector r = h.difference(y, pm.mean);
  out.state.mean = belief.mean + K * r;
  out.state.cov = ensure_spd(belief.cov - K * S * K.transpose(), "updated covariance");
  out.diagnostics.iterations_run = 1;
  out.diagnostics.innovation = r;
  out.diagnostics.predicted_meas_cov = S;
  out.diagnostics.gain = K;
  return out;
}

namespace detail {

// Fixed-point sweeps shared by the linear and nonlinear updates. The
// measurement moments (mu, T, C) are fixed at the predicted state; each sweep
// recomputes S, K, m, P from the current V and then V from the newest (m, P).
template <typename Increment>
JointUpdate vb_sweeps(const JointBelief& predicted, const Vector& innovation, const Matrix& T,
                      const Matrix& C, const VbConfig& cfg, Increment&& increment) {
  predicted.noise.validate();
  const Eigen::Index d = innovation.size();
  if (predicted.noise.dim() != d || T.rows() != d || C.cols() != d) {
    throw DimensionMismatch("vb update: noise belief does not match the measurement");
  }
  const GaussianState& prior = predicted.state;
  JointUpdate out;
  out.belief.noise.dof = predicted.noise.dof + 1.0;
  const double coef = out.belief.noise.dof - static_cast<double>(d) - 1.0;
  Matrix V = predicted.noise.scale;
  GaussianState state = prior;
  Matrix S;
  Matrix K;
  double delta = 0.0;
  int sweeps = 0;
  for (int i = 0; i < cfg.iterations; ++i) {
    S = symmetrize(T + V / coef);
    K = right_solve_spd(C, S, "innovation covariance");
    state.mean = prior.mean + K * innovation;
    state.cov = ensure_spd(prior.cov - K * S * K.transpose(), "updated covariance");
    Matrix inc = increment(state);
    if (cfg.diagonal) inc = Matrix(inc.diagonal().asDiagonal());
    Matrix next = symmetrize(predicted.noise.scale + inc);
    delta = (next - V).norm();
    V = std::move(next);
    sweeps = i + 1;
    if (delta < cfg.tol) break;
  }
  out.belief.state = std::move(state);
  out.belief.noise.scale = std::move(V);
  out.diagnostics.iterations_run = sweeps;
  out.diagnostics.final_delta = delta;
  out.diagnostics.innovation = innovation;
  out.diagnostics.predicted_meas_cov = std::move(S);
  out.diagnostics.gain = std::move(K);
  return out;
}

}  // namespace detail

/// VB update of an already predicted belief for the linear measurement y = H x + r.
inline JointUpdate vbakf_update(const JointBelief& predicted, const Vector& y, const Matrix& H,
                                const VbConfig& cfg) {
  cfg.validate();
  if (H.cols() != predicted.state.dim() || H.rows() != y.size()) {
    throw DimensionMismatch("vbakf_update: H has the wrong shape");
  }
  const Matrix& Pm = predicted.state.cov;
  const Vector innovation = y - H * predicted.state.mean;
  const Matrix T = symmetrize(H * Pm * H.transpose());
  const Matrix C = Pm * H.transpose();
  return detail::vb_sweeps(predicted, innovation, T, C, cfg, [&](const GaussianState& s) {
    const Vector r = y - H * s.mean;
    return Matrix(H * s.cov * H.transpose() + r * r.transpose());
  });
}

/// One predict/update cycle of the linear VB adaptive Kalman filter.
inline JointUpdate vbakf_step(const JointBelief& belief, const Vector& y, const Matrix& A,
                              const Matrix& H, const Matrix& Q, const VbConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = belief.state.dim();
  if (A.rows() != n || A.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw DimensionMismatch("vbakf_step: A or Q does not match the state dimension");
  }
  JointBelief predicted;
  predicted.state.mean = A * belief.state.mean;
  predicted.state.cov =
      ensure_spd(A * belief.state.cov * A.transpose() + Q, "predicted covariance");
  predicted.noise = iw_predict(belief.noise, cfg.dyn);
  return vbakf_update(predicted, y, H, cfg);
}

inline JointBelief vbagf_predict(const JointBelief& belief, const Mapping& f, const Matrix& Q,
                                 const VbConfig& cfg) {
  cfg.validate();
  return {gf_predict(belief.state, f, Q, cfg.scheme), iw_predict(belief.noise, cfg.dyn)};
}

inline JointUpdate vbagf_update(const JointBelief& predicted, const Vector& y, const Mapping& h,
                                const VbConfig& cfg) {
  cfg.validate();
  const PropagatedMoments pm =
      propagate(h, predicted.state.mean, predicted.state.cov, cfg.scheme);
  if (pm.mean.size() != y.size()) {
    throw DimensionMismatch("vbagf_update: measurement function output size mismatch");
  }
  const Vector innovation = h.difference(y, pm.mean);
  return detail::vb_sweeps(predicted, innovation, pm.cov, pm.cross_cov, cfg,
                           [&](const GaussianState& s) {
                             return expected_outer_residual(y, h, s.mean, s.cov, cfg.scheme);
                           });
}

/// Folds vbagf_predict + vbagf_update over `data`. The first failing step
/// is rethrown as FilterRunError carrying its index.
inline std::vector<JointUpdate> filter_run(const AdditiveModel& model,
                                           std::span<const Vector> data,
                                           const JointBelief& initial, const VbConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("filter_run: no measurements");
  model.validate();
  cfg.validate();
  initial.validate();
  std::vector<JointUpdate> out;
  out.reserve(data.size());
  JointBelief belief = initial;
  for (std::size_t k = 0; k < data.size(); ++k) {
    try {
      JointBelief predicted = vbagf_predict(belief, model.f, model.Q, cfg);
      out.push_back(vbagf_update(predicted, data[k], model.h, cfg));
    } catch (const std::exception& e) {
      throw FilterRunError(k, e.what());
    }
    belief = out.back().belief;
  }
  return out;
}

/// Gaussian filter over `data` with a known covariance sequence Sigma(k).
inline std::vector<GaussianUpdate> gf_run(const AdditiveModel& model, std::span<const Vector> data,
                                          const GaussianState& initial,
                                          const std::function<Matrix(std::size_t)>& sigma_at,
                                          const IntegrationScheme& scheme) {
  if (data.empty()) throw std::invalid_argument("gf_run: no measurements");
  model.validate();
  initial.validate();
  std::vector<GaussianUpdate> out;
  out.reserve(data.size());
  GaussianState state = initial;
  for (std::size_t k = 0; k < data.size(); ++k) {
    try {
      GaussianState predicted = gf_predict(state, model.f, model.Q, scheme);
      out.push_back(gf_update(predicted, data[k], model.h, sigma_at(k), scheme));
    } catch (const std::exception& e) {
      throw FilterRunError(k, e.what());
    }
    state = out.back().state;
  }
  return out;
}

}  // namespace vbakf
