#pragma once

// Gaussian-weighted integrals of vector functions: transformed mean,
// transformed covariance, cross-covariance and the expected outer residual,
// computed with Taylor linearization or one of the sigma-point rules.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "vbakf/errors.hpp"
#include "vbakf/linalg.hpp"

namespace vbakf {

enum class SchemeKind { taylor, unscented, cubature, gauss_hermite };

inline const char* to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::taylor: return "taylor";
    case SchemeKind::unscented: return "unscented";
    case SchemeKind::cubature: return "cubature";
    case SchemeKind::gauss_hermite: return "gauss_hermite";
  }
  return "unknown";
}

/// Selects the Gaussian integration rule and carries its tuning parameters.
///
/// Unscented weights follow lambda = alpha^2 (n + kappa) - n with the extra
/// (1 - alpha^2 + beta) on the center covariance weight. An empty `ut_kappa`
/// means kappa = 3 - n for the dimension being integrated.
struct IntegrationScheme {
  SchemeKind kind = SchemeKind::cubature;
  double ut_alpha = 1.0;
  double ut_beta = 0.0;
  std::optional<double> ut_kappa;
  int gh_order = 3;
  /// Relative central-difference step: h_i = fd_step * (1 + |m_i|).
  double fd_step = 1e-6;

  static IntegrationScheme taylor(double fd_step = 1e-6) {
    IntegrationScheme s;
    s.kind = SchemeKind::taylor;
    s.fd_step = fd_step;
    return s;
  }
  static IntegrationScheme unscented(double alpha = 1.0, double beta = 0.0,
                                     std::optional<double> kappa = std::nullopt) {
    IntegrationScheme s;
    s.kind = SchemeKind::unscented;
    s.ut_alpha = alpha;
    s.ut_beta = beta;
    s.ut_kappa = kappa;
    return s;
  }
  static IntegrationScheme cubature() { return IntegrationScheme{}; }
  static IntegrationScheme gauss_hermite(int order = 3) {
    IntegrationScheme s;
    s.kind = SchemeKind::gauss_hermite;
    s.gh_order = order;
    return s;
  }

  double kappa_for(std::size_t n) const {
    return ut_kappa ? *ut_kappa : 3.0 - static_cast<double>(n);
  }

  void validate() const {
    if (gh_order < 1) throw std::invalid_argument("gh_order must be >= 1");
    if (!(fd_step > 0.0)) throw std::invalid_argument("fd_step must be > 0");
    if (kind == SchemeKind::unscented && !(ut_alpha > 0.0)) {
      throw std::invalid_argument("ut_alpha must be > 0");
    }
  }
};

struct WeightedPointSet {
  std::vector<Vector> points;
  std::vector<double> mean_weights;
  std::vector<double> cov_weights;

  std::size_t size() const noexcept { return points.size(); }
};

/// Moments of g(x) for x ~ N(m, P). `cov` excludes any additive noise.
struct PropagatedMoments {
  Vector mean;
  Matrix cov;
  Matrix cross_cov;  // input dim x output dim
};

using VectorFunction = std::function<Vector(const Vector&)>;
using JacobianFunction = std::function<Matrix(const Vector&)>;
/// Returns a "minus" b in the output space (e.g. wrapped angle differences).
using ResidualFunction = std::function<Vector(const Vector&, const Vector&)>;

/// A vector function together with its optional analytic Jacobian and an
/// optional residual hook for outputs that live on a manifold (angles).
struct Mapping {
  VectorFunction fn;
  JacobianFunction jacobian;
  ResidualFunction residual;

  Mapping() = default;

  template <typename F>
    requires(!std::same_as<std::remove_cvref_t<F>, Mapping> &&
             std::is_invocable_r_v<Vector, F, const Vector&>)
  Mapping(F f) : fn(std::move(f)) {}  // NOLINT(google-explicit-constructor)

  Mapping(VectorFunction f, JacobianFunction j, ResidualFunction r = {})
      : fn(std::move(f)), jacobian(std::move(j)), residual(std::move(r)) {}

  Vector operator()(const Vector& x) const { return fn(x); }

  Vector difference(const Vector& a, const Vector& b) const {
    return residual ? residual(a, b) : Vector(a - b);
  }
};

namespace detail {

struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Golub-Welsch for the probabilists' Hermite polynomials: the Jacobi matrix
// has zero diagonal and off-diagonal sqrt(k). Nodes are its eigenvalues, the
// weights the squared first components of the normalized eigenvectors.
inline HermiteRule hermite_rule(int order) {
  const int p = order;
  Matrix jacobi = Matrix::Zero(p, p);
  for (int k = 1; k < p; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  HermiteRule rule;
  rule.nodes.resize(p);
  rule.weights.resize(p);
  for (int i = 0; i < p; ++i) {
    rule.nodes[i] = eig.eigenvalues()(i);
    const double v0 = eig.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;
  }
  return rule;
}

inline void check_finite(const Vector& value, const Vector& point) {
  if (!value.allFinite()) {
    throw PropagationError("propagated function returned non-finite values", point);
  }
}

inline Matrix finite_difference_jacobian(const Mapping& g, const Vector& m,
                                         Eigen::Index out_dim, double fd_step) {
  const Eigen::Index n = m.size();
  Matrix jac(out_dim, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = fd_step * (1.0 + std::abs(m(i)));
    Vector plus = m;
    Vector minus = m;
    plus(i) += h;
    minus(i) -= h;
    const Vector gp = g(plus);
    const Vector gm = g(minus);
    check_finite(gp, plus);
    check_finite(gm, minus);
    jac.col(i) = g.difference(gp, gm) / (2.0 * h);
  }
  return jac;
}

}  // namespace detail

/// Canonical point set of `scheme`, translated by m and scaled by the
/// lower Cholesky factor of P.
inline WeightedPointSet sigma_points(const Vector& m, const Matrix& P,
                                     const IntegrationScheme& scheme) {
  scheme.validate();
  if (P.rows() != m.size() || P.cols() != m.size()) {
    throw DimensionMismatch("sigma_points: covariance does not match mean");
  }
  if (scheme.kind == SchemeKind::taylor) {
    throw UnsupportedScheme("taylor scheme has no sigma-point set");
  }
  const Matrix L = cholesky_lower(P, "sigma_points covariance");
  const auto n = static_cast<std::size_t>(m.size());
  const double nd = static_cast<double>(n);
  WeightedPointSet set;

  switch (scheme.kind) {
    case SchemeKind::unscented: {
      const double alpha2 = scheme.ut_alpha * scheme.ut_alpha;
      const double lambda = alpha2 * (nd + scheme.kappa_for(n)) - nd;
      if (!(nd + lambda > 0.0)) {
        throw std::invalid_argument("unscented scheme requires alpha^2 (n + kappa) > 0");
      }
      const double scale = std::sqrt(nd + lambda);
      const double wi = 1.0 / (2.0 * (nd + lambda));
      set.points.reserve(2 * n + 1);
      set.points.push_back(m);
      set.mean_weights.push_back(lambda / (nd + lambda));
      set.cov_weights.push_back(lambda / (nd + lambda) + (1.0 - alpha2 + scheme.ut_beta));
      for (std::size_t i = 0; i < n; ++i) {
        set.points.push_back(m + scale * L.col(static_cast<Eigen::Index>(i)));
      }
      for (std::size_t i = 0; i < n; ++i) {
        set.points.push_back(m - scale * L.col(static_cast<Eigen::Index>(i)));
      }
      set.mean_weights.insert(set.mean_weights.end(), 2 * n, wi);
      set.cov_weights.insert(set.cov_weights.end(), 2 * n, wi);
      break;
    }
    case SchemeKind::cubature: {
      const double scale = std::sqrt(nd);
      const double w = 1.0 / (2.0 * nd);
      set.points.reserve(2 * n);
      for (std::size_t i = 0; i < n; ++i) {
        set.points.push_back(m + scale * L.col(static_cast<Eigen::Index>(i)));
      }
      for (std::size_t i = 0; i < n; ++i) {
        set.points.push_back(m - scale * L.col(static_cast<Eigen::Index>(i)));
      }
      set.mean_weights.assign(2 * n, w);
      set.cov_weights.assign(2 * n, w);
      break;
    }
    case SchemeKind::gauss_hermite: {
      const auto rule = detail::hermite_rule(scheme.gh_order);
      const auto p = static_cast<std::size_t>(scheme.gh_order);
      std::size_t total = 1;
      for (std::size_t i = 0; i < n; ++i) total *= p;
      set.points.reserve(total);
      set.mean_weights.reserve(total);
      std::vector<std::size_t> index(n, 0);
      Vector unit(static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < total; ++k) {
        double w = 1.0;
        for (std::size_t d = 0; d < n; ++d) {
          unit(static_cast<Eigen::Index>(d)) = rule.nodes[index[d]];
          w *= rule.weights[index[d]];
        }
        set.points.push_back(m + L * unit);
        set.mean_weights.push_back(w);
        for (std::size_t d = 0; d < n; ++d) {
          if (++index[d] < p) break;
          index[d] = 0;
        }
      }
      set.cov_weights = set.mean_weights;
      break;
    }
    case SchemeKind::taylor:
      break;
  }
  return set;
}

/// Approximates mean, covariance and cross-covariance of g(x), x ~ N(m, P).
/// The Taylor kind uses g(m), J P J^T and P J^T with J the analytic Jacobian
/// when `g.jacobian` is set, central finite differences otherwise.
inline PropagatedMoments propagate(const Mapping& g, const Vector& m, const Matrix& P,
                                   const IntegrationScheme& scheme) {
  PropagatedMoments out;
  if (scheme.kind == SchemeKind::taylor) {
    scheme.validate();
    if (P.rows() != m.size() || P.cols() != m.size()) {
      throw DimensionMismatch("propagate: covariance does not match mean");
    }
    cholesky_lower(P, "propagate covariance");
    out.mean = g(m);
    detail::check_finite(out.mean, m);
    Matrix jac = g.jacobian ? g.jacobian(m)
                            : detail::finite_difference_jacobian(g, m, out.mean.size(), scheme.fd_step);
    if (!jac.allFinite()) {
      throw PropagationError("Jacobian has non-finite entries", m);
    }
    if (jac.rows() != out.mean.size() || jac.cols() != m.size()) {
      throw DimensionMismatch("propagate: Jacobian has wrong shape");
    }
    out.cross_cov = P * jac.transpose();
    out.cov = symmetrize(jac * out.cross_cov);
    return out;
  }

  const WeightedPointSet set = sigma_points(m, P, scheme);
  std::vector<Vector> values;
  values.reserve(set.size());
  for (const auto& x : set.points) {
    values.push_back(g(x));
    detail::check_finite(values.back(), x);
  }
  const Eigen::Index dim = values.front().size();
  for (const auto& v : values) {
    if (v.size() != dim) throw DimensionMismatch("propagate: inconsistent output size");
  }

  out.mean = Vector::Zero(dim);
  if (g.residual) {
    // Accumulate offsets from a reference value so wrapped outputs average
    // correctly across a branch cut.
    const Vector& ref = values.front();
    for (std::size_t i = 0; i < set.size(); ++i) {
      out.mean += set.mean_weights[i] * g.difference(values[i], ref);
    }
    out.mean += ref;
  } else {
    for (std::size_t i = 0; i < set.size(); ++i) out.mean += set.mean_weights[i] * values[i];
  }

  out.cov = Matrix::Zero(dim, dim);
  out.cross_cov = Matrix::Zero(m.size(), dim);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Vector dy = g.difference(values[i], out.mean);
    const Vector dx = set.points[i] - m;
    out.cov += set.cov_weights[i] * dy * dy.transpose();
    out.cross_cov += set.cov_weights[i] * dx * dy.transpose();
  }
  out.cov = symmetrize(out.cov);
  return out;
}

/// E[(y - h(x))(y - h(x))^T] for x ~ N(m, P): (y - mu)(y - mu)^T + T, with
/// (mu, T) the propagated moments of h.
inline Matrix expected_outer_residual(const Vector& y, const Mapping& h, const Vector& m,
                                      const Matrix& P, const IntegrationScheme& scheme) {
  const PropagatedMoments pm = propagate(h, m, P, scheme);
  if (pm.mean.size() != y.size()) {
    throw DimensionMismatch("expected_outer_residual: measurement size mismatch");
  }
  const Vector r = h.difference(y, pm.mean);
  return symmetrize(r * r.transpose() + pm.cov);
}

}  // namespace vbakf
