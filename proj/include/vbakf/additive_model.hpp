#pragma once

#include <string>

#include <Eigen/Core>

#include "vbakf/errors.hpp"
#include "vbakf/linalg.hpp"
#include "vbakf/moments.hpp"

namespace vbakf {

/// x_k = f(x_{k-1}) + q,  q ~ N(0, Q);  y_k = h(x_k) + r,  r ~ N(0, Sigma_k).
///
/// Analytic Jacobians and the measurement residual hook (for wrapped
/// angles) travel inside the two Mappings.
struct AdditiveModel {
  Eigen::Index state_dim = 0;
  Eigen::Index meas_dim = 0;
  Mapping f;
  Mapping h;
  Matrix Q;

  void validate() const {
    if (state_dim <= 0 || meas_dim <= 0) {
      throw DimensionMismatch("AdditiveModel: dimensions must be positive");
    }
    if (!f.fn || !h.fn) throw std::invalid_argument("AdditiveModel: f and h must be set");
    if (Q.rows() != state_dim || Q.cols() != state_dim) {
      throw DimensionMismatch("AdditiveModel: Q does not match state_dim");
    }
  }
};

}  // namespace vbakf
