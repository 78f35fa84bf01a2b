#pragma once

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "vbakf/errors.hpp"

namespace vbakf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline bool is_spd(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0 || !m.allFinite()) return false;
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

/// Lower-triangular Cholesky factor; throws InvalidCovariance if `m` is not SPD.
inline Matrix cholesky_lower(const Matrix& m, const char* what = "covariance") {
  if (m.rows() != m.cols()) {
    throw InvalidCovariance(std::string(what) + " is not square");
  }
  if (!m.allFinite()) {
    throw InvalidCovariance(std::string(what) + " has non-finite entries");
  }
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw InvalidCovariance(std::string(what) + " is not positive definite");
  }
  return llt.matrixL();
}

/// Symmetrizes `m` and, if Cholesky fails, adds jitter 1e-12 * trace / dim to
/// the diagonal, escalating by a factor 10 for up to three attempts.
inline Matrix ensure_spd(const Matrix& m, const char* what = "covariance") {
  Matrix s = symmetrize(m);
  if (is_spd(s)) return s;
  if (!s.allFinite()) {
    throw NumericalFailure(std::string(what) + " has non-finite entries");
  }
  const double n = static_cast<double>(s.rows());
  double jitter = 1e-12 * std::abs(s.trace()) / n;
  if (jitter == 0.0) jitter = 1e-12;
  for (int attempt = 0; attempt < 3; ++attempt, jitter *= 10.0) {
    Matrix trial = s;
    trial.diagonal().array() += jitter;
    if (is_spd(trial)) return trial;
  }
  throw NumericalFailure(std::string(what) + " is not positive definite after jitter");
}

/// Solves X * S = B for X with S SPD, i.e. X = B * S^{-1}.
inline Matrix right_solve_spd(const Matrix& b, const Matrix& s, const char* what) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure(std::string(what) + " is singular or not positive definite");
  }
  return llt.solve(b.transpose()).transpose();
}

}  // namespace vbakf
