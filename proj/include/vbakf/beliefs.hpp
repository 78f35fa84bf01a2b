#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>
#include <Eigen/LU>

#include "vbakf/errors.hpp"
#include "vbakf/linalg.hpp"

namespace vbakf {

/// N(x | mean, cov).
struct GaussianState {
  Vector mean;
  Matrix cov;

  Eigen::Index dim() const noexcept { return mean.size(); }

  void validate() const {
    if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
      throw DimensionMismatch("GaussianState: covariance does not match mean");
    }
    if (!(cov - cov.transpose()).isZero(1e-10 * (1.0 + cov.cwiseAbs().maxCoeff()))) {
      throw InvalidCovariance("GaussianState: covariance is not symmetric");
    }
    if (!is_spd(cov)) throw InvalidCovariance("GaussianState: covariance is not SPD");
  }
};

/// IW(Sigma | dof, scale) over d x d covariances, density
/// |Sigma|^{-(dof + d + 1)/2} exp(-tr(scale Sigma^{-1}) / 2).
struct InverseWishartState {
  double dof = 0.0;
  Matrix scale;

  Eigen::Index dim() const noexcept { return scale.rows(); }

  /// dof - d - 1, the coefficient of scale^{-1} in the mean precision.
  double precision_coefficient() const { return dof - static_cast<double>(dim()) - 1.0; }

  void validate() const {
    if (scale.rows() != scale.cols() || scale.rows() == 0) {
      throw DimensionMismatch("InverseWishartState: scale must be square and non-empty");
    }
    if (!(precision_coefficient() > 0.0)) {
      throw InvalidBelief("InverseWishartState: dof must exceed d + 1 (dof = " +
                          std::to_string(dof) + ", d = " + std::to_string(dim()) + ")");
    }
    if (!is_spd(symmetrize(scale))) {
      throw InvalidBelief("InverseWishartState: scale is not SPD");
    }
  }

  /// Weakly informative prior: dof = d + 1 + eps, scale = eps * sigma0_sq * I,
  /// so the expected covariance is sigma0_sq * I.
  static InverseWishartState weak_prior(Eigen::Index d, double sigma0_sq = 1.0,
                                        double eps = 1.0) {
    if (!(sigma0_sq > 0.0) || !(eps > 0.0)) {
      throw InvalidBelief("weak_prior: sigma0_sq and eps must be positive");
    }
    return {static_cast<double>(d) + 1.0 + eps,
            eps * sigma0_sq * Matrix::Identity(d, d)};
  }
};

/// Sufficient-statistic transform applied to the IW factor between steps.
struct CovarianceDynamics {
  double rho = 1.0;
  Matrix B;

  /// B = sqrt(rho) I.
  static CovarianceDynamics forgetting(double rho, Eigen::Index d) {
    return {rho, std::sqrt(rho) * Matrix::Identity(d, d)};
  }

  bool is_diagonal() const { return B.isDiagonal(0.0); }

  void validate() const {
    if (!(rho > 0.0 && rho <= 1.0)) {
      throw std::invalid_argument("CovarianceDynamics: rho must lie in (0, 1]");
    }
    if (B.rows() != B.cols() || B.rows() == 0) {
      throw DimensionMismatch("CovarianceDynamics: B must be square and non-empty");
    }
    const double det = std::abs(B.determinant());
    if (!(det > 0.0 && det <= 1.0 + 1e-12)) {
      throw std::invalid_argument("CovarianceDynamics: |det B| must lie in (0, 1]");
    }
  }
};

/// Factored posterior N(x) * IW(Sigma) carried between time steps.
struct JointBelief {
  GaussianState state;
  InverseWishartState noise;

  void validate() const {
    state.validate();
    noise.validate();
  }
};

/// <Sigma^{-1}> = (dof - d - 1) scale^{-1}.
inline Matrix iw_mean_precision(const InverseWishartState& iw) {
  iw.validate();
  Eigen::LLT<Matrix> llt(iw.scale);
  const Eigen::Index d = iw.dim();
  return symmetrize(iw.precision_coefficient() * llt.solve(Matrix::Identity(d, d)));
}

/// Point estimate of Sigma: scale / (dof - d - 1), the inverse of the mean precision.
inline Matrix iw_expected_cov(const InverseWishartState& iw) {
  iw.validate();
  return symmetrize(iw.scale / iw.precision_coefficient());
}

/// dof' = rho (dof - d - 1) + d + 1, scale' = B scale B^T.
inline InverseWishartState iw_predict(const InverseWishartState& iw,
                                      const CovarianceDynamics& dyn) {
  iw.validate();
  dyn.validate();
  if (dyn.B.rows() != iw.dim()) {
    throw DimensionMismatch("iw_predict: B does not match the IW dimension");
  }
  const double d = static_cast<double>(iw.dim());
  InverseWishartState out;
  out.dof = dyn.rho * (iw.dof - d - 1.0) + d + 1.0;
  out.scale = symmetrize(dyn.B * iw.scale * dyn.B.transpose());
  return out;
}

}  // namespace vbakf
