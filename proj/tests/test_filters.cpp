#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "vbakf/filters.hpp"
#include "vbakf/models.hpp"

namespace {

using vbakf::CovarianceDynamics;
using vbakf::GaussianState;
using vbakf::IntegrationScheme;
using vbakf::InverseWishartState;
using vbakf::JointBelief;
using vbakf::Mapping;
using vbakf::Matrix;
using vbakf::VbConfig;
using vbakf::Vector;

std::vector<IntegrationScheme> schemes() {
  return {IntegrationScheme::unscented(), IntegrationScheme::cubature(),
          IntegrationScheme::gauss_hermite(3), IntegrationScheme::taylor()};
}

Matrix mat1(double x) { return Matrix::Constant(1, 1, x); }
Vector vec1(double x) { return Vector::Constant(1, x); }

VbConfig vb_config(double rho, Eigen::Index d, int iterations = 5, double tol = 0.0,
                   IntegrationScheme scheme = IntegrationScheme::cubature()) {
  VbConfig cfg;
  cfg.iterations = iterations;
  cfg.tol = tol;
  cfg.dyn = CovarianceDynamics::forgetting(rho, d);
  cfg.scheme = scheme;
  return cfg;
}

Mapping linear_map(const Matrix& A) {
  return Mapping([A](const Vector& x) { return Vector(A * x); },
                 [A](const Vector&) { return A; });
}

struct RandomLinearCase {
  JointBelief belief;
  Matrix A, H, Q;
  Vector y;
  double rho;
};

RandomLinearCase random_linear_case(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> state_dim(1, 4), meas_dim(1, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Index n = state_dim(gen);
  const Eigen::Index d = meas_dim(gen);
  RandomLinearCase c;
  c.A = oracle::random_stable(n, gen);
  c.H = oracle::random_matrix(d, n, gen);
  c.Q = oracle::random_spd(n, gen) * 0.1;
  c.belief.state = {oracle::random_vector(n, gen), oracle::random_spd(n, gen)};
  c.belief.noise = {static_cast<double>(d) + 1.0 + 0.2 + 5.0 * unit(gen),
                    oracle::random_spd(d, gen)};
  c.y = c.H * c.A * c.belief.state.mean + oracle::random_vector(d, gen);
  c.rho = 0.3 + 0.7 * unit(gen);
  return c;
}

// ---------------------------------------------------------------------------

TEST(GfPredict, IdentityWithoutNoiseKeepsBelief) {
  std::mt19937_64 gen(1);
  const GaussianState b{oracle::random_vector(3, gen), oracle::random_spd(3, gen)};
  for (const auto& scheme : schemes()) {
    const auto out =
        vbakf::gf_predict(b, [](const Vector& x) { return x; }, Matrix::Zero(3, 3), scheme);
    EXPECT_LT((out.mean - b.mean).norm(), 1e-10);
    EXPECT_LT((out.cov - b.cov).norm(), 1e-10);
  }
}

TEST(GfPredict, LinearMatchesClosedForm) {
  std::mt19937_64 gen(2);
  const GaussianState b{oracle::random_vector(3, gen), oracle::random_spd(3, gen)};
  const Matrix A = oracle::random_matrix(3, 3, gen);
  const Matrix Q = oracle::random_spd(3, gen);
  for (const auto& scheme : schemes()) {
    const auto out = vbakf::gf_predict(b, linear_map(A), Q, scheme);
    EXPECT_LT(oracle::rel_diff(out.mean, A * b.mean), 1e-10);
    EXPECT_LT(oracle::rel_diff(out.cov, A * b.cov * A.transpose() + Q), 1e-10);
  }
}

TEST(GfPredict, WienerVelocityOneAxis) {
  const double dt = 0.01, q = 2.0;
  const auto lin = vbakf::wiener_velocity(q, dt, 1);
  const GaussianState b{Vector::Constant(2, 1.0), Matrix::Identity(2, 2)};
  const auto out = vbakf::gf_predict(b, linear_map(lin.A), lin.Q, IntegrationScheme::cubature());
  // Hand-expanded A P A^T + Q with A = [[1, dt], [0, 1]], P = I.
  Matrix expected(2, 2);
  expected << 1.0 + dt * dt + q * dt * dt * dt / 3.0, dt + q * dt * dt / 2.0,
      dt + q * dt * dt / 2.0, 1.0 + q * dt;
  EXPECT_NEAR(out.mean(0), 1.0 + dt, 1e-14);
  EXPECT_NEAR(out.mean(1), 1.0, 1e-14);
  EXPECT_LT((out.cov - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(GfUpdate, IdentityMeasurementIsStandardKalmanUpdate) {
  std::mt19937_64 gen(3);
  const GaussianState b{oracle::random_vector(2, gen), oracle::random_spd(2, gen)};
  const Matrix R = oracle::random_spd(2, gen);
  const Vector y = oracle::random_vector(2, gen);
  const Matrix K = b.cov * (b.cov + R).inverse();
  for (const auto& scheme : schemes()) {
    const auto out = vbakf::gf_update(b, y, [](const Vector& x) { return x; }, R, scheme);
    EXPECT_LT(oracle::rel_diff(out.state.mean, b.mean + K * (y - b.mean)), 1e-10);
    EXPECT_LT(oracle::rel_diff(out.state.cov, b.cov - K * b.cov), 1e-10);
  }
}

TEST(GfUpdate, HugeNoiseLeavesPriorUnchanged) {
  std::mt19937_64 gen(4);
  const GaussianState b{oracle::random_vector(2, gen), oracle::random_spd(2, gen)};
  const auto out = vbakf::gf_update(b, Vector::Constant(2, 5.0), [](const Vector& x) { return x; },
                                    1e12 * Matrix::Identity(2, 2), IntegrationScheme::cubature());
  EXPECT_LT((out.state.mean - b.mean).norm() / b.mean.norm(), 1e-4);
  EXPECT_LT((out.state.cov - b.cov).norm() / b.cov.norm(), 1e-4);
}

TEST(GfUpdate, ScalarHandExample) {
  const auto ref = oracle::scalar_kf_update(0.0, 1.0, 2.0, 1.0, 2.0);
  ASSERT_DOUBLE_EQ(ref.S, 5.0);
  ASSERT_DOUBLE_EQ(ref.K, 0.4);
  for (const auto& scheme : schemes()) {
    const auto out =
        vbakf::gf_update({vec1(0.0), mat1(1.0)}, vec1(2.0),
                         linear_map(mat1(2.0)), mat1(1.0), scheme);
    EXPECT_NEAR(out.diagnostics.predicted_meas_cov(0, 0), 5.0, 1e-12);
    EXPECT_NEAR(out.diagnostics.gain(0, 0), 0.4, 1e-12);
    EXPECT_NEAR(out.state.mean(0), 0.8, 1e-12);
    EXPECT_NEAR(out.state.cov(0, 0), 0.2, 1e-12);
  }
}

TEST(GfUpdate, RejectsNonSpdSigma) {
  EXPECT_THROW(vbakf::gf_update({vec1(0.0), mat1(1.0)}, vec1(1.0),
                                [](const Vector& x) { return x; }, mat1(-1.0),
                                IntegrationScheme::cubature()),
               vbakf::InvalidCovariance);
}

TEST(VbakfStep, StationaryScalarConvergesToTrueVariance) {
  const double R = 0.5, Qv = 0.01;
  const double rho = 1.0 - std::exp(-3.0);
  std::mt19937_64 gen(42);
  std::normal_distribution<double> normal;
  VbConfig cfg = vb_config(rho, 1, 20, 1e-10);
  JointBelief belief{{vec1(0.0), mat1(1.0)}, InverseWishartState::weak_prior(1)};
  double x = 0.0, acc = 0.0;
  int count = 0;
  for (int k = 1; k <= 1000; ++k) {
    x += std::sqrt(Qv) * normal(gen);
    const double y = x + std::sqrt(R) * normal(gen);
    belief = vbakf::vbakf_step(belief, vec1(y), mat1(1.0), mat1(1.0), mat1(Qv), cfg).belief;
    if (k > 500) {
      acc += vbakf::iw_expected_cov(belief.noise)(0, 0);
      ++count;
    }
  }
  EXPECT_NEAR(acc / count, R, 0.3 * R);
}

TEST(VbakfStep, SingleSweepIsKalmanUpdateWithScaledNoise) {
  std::mt19937_64 gen(5);
  auto c = random_linear_case(gen);
  const Eigen::Index d = c.y.size();
  // nu_pred = d + 2 so that the updated coefficient nu - d - 1 equals 2.
  c.belief.noise.dof = static_cast<double>(d) + 2.0;
  VbConfig cfg = vb_config(1.0, d, 1);
  const auto vb = vbakf::vbakf_step(c.belief, c.y, c.A, c.H, c.Q, cfg);
  const GaussianState pred{c.A * c.belief.state.mean,
                           c.A * c.belief.state.cov * c.A.transpose() + c.Q};
  const auto kf = vbakf::gf_update(pred, c.y, linear_map(c.H), c.belief.noise.scale / 2.0,
                                   IntegrationScheme::cubature());
  EXPECT_LT((vb.belief.state.mean - kf.state.mean).norm(), 1e-12);
  EXPECT_LT((vb.belief.state.cov - kf.state.cov).norm(), 1e-12);
  const Vector r = c.y - c.H * kf.state.mean;
  const Matrix V = c.belief.noise.scale + c.H * kf.state.cov * c.H.transpose() + r * r.transpose();
  EXPECT_LT(oracle::rel_diff(vb.belief.noise.scale, V), 1e-12);
}

TEST(VbakfStep, ZeroInnovationAddsOnlyProjectedCovariance) {
  Matrix H(2, 3);
  H << 1.0, 0.0, 2.0, 0.0, 1.0, -1.0;
  const Vector m = Vector::LinSpaced(3, 0.5, 1.5);
  const Matrix P = 1e-12 * Matrix::Identity(3, 3);
  const JointBelief belief{{m, P}, {5.0, Matrix::Identity(2, 2)}};
  VbConfig cfg = vb_config(1.0, 2, 5);
  const auto out = vbakf::vbakf_step(belief, H * m, Matrix::Identity(3, 3), H, Matrix::Zero(3, 3),
                                     cfg);
  EXPECT_LT((out.belief.state.mean - m).norm(), 1e-14);
  const Matrix expected = Matrix::Identity(2, 2) + H * out.belief.state.cov * H.transpose();
  EXPECT_LT((out.belief.noise.scale - expected).norm(), 1e-14);
}

TEST(VbagfPredict, IdentityStationaryKeepsBelief) {
  std::mt19937_64 gen(6);
  const JointBelief b{{oracle::random_vector(2, gen), oracle::random_spd(2, gen)},
                      {4.5, oracle::random_spd(2, gen)}};
  const auto out = vbakf::vbagf_predict(b, [](const Vector& x) { return x; }, Matrix::Zero(2, 2),
                                        vb_config(1.0, 2));
  EXPECT_LT((out.state.mean - b.state.mean).norm(), 1e-10);
  EXPECT_LT((out.state.cov - b.state.cov).norm(), 1e-10);
  EXPECT_DOUBLE_EQ(out.noise.dof, b.noise.dof);
  EXPECT_LT((out.noise.scale - b.noise.scale).norm(), 1e-14);
}

TEST(VbagfPredict, LinearMatchesKalmanPredictionAndDofMap) {
  std::mt19937_64 gen(7);
  const auto c = random_linear_case(gen);
  const Eigen::Index d = c.y.size();
  JointBelief b = c.belief;
  b.noise.dof = static_cast<double>(d) + 2.0;
  for (const auto& scheme : schemes()) {
    const auto out = vbakf::vbagf_predict(b, linear_map(c.A), c.Q, vb_config(0.5, d, 5, 0.0, scheme));
    EXPECT_LT(oracle::rel_diff(out.state.mean, c.A * b.state.mean), 1e-10);
    EXPECT_LT(oracle::rel_diff(out.state.cov, c.A * b.state.cov * c.A.transpose() + c.Q), 1e-10);
    EXPECT_NEAR(out.noise.dof, 0.5 + static_cast<double>(d) + 1.0, 1e-14);
  }
}

TEST(VbagfUpdate, HugeScaleLeavesPriorUnchanged) {
  std::mt19937_64 gen(8);
  const JointBelief b{{oracle::random_vector(2, gen), oracle::random_spd(2, gen)},
                      {4.0, 1e12 * Matrix::Identity(2, 2)}};
  const auto out = vbakf::vbagf_update(b, Vector::Constant(2, 3.0),
                                       [](const Vector& x) { return x; }, vb_config(1.0, 2, 1));
  EXPECT_LT((out.belief.state.mean - b.state.mean).norm() / b.state.mean.norm(), 1e-4);
  EXPECT_LT((out.belief.state.cov - b.state.cov).norm() / b.state.cov.norm(), 1e-4);
}

TEST(VbagfUpdate, ScalarTwoSweepHandIteration) {
  // Independent scalar iteration of the coupled equations.
  const double m_pred = 0.0, P_pred = 1.0, V_pred = 3.0, y = 1.0;
  const double coef = 3.0;
  double V = V_pred, m = 0.0, P = 0.0, S = 0.0, K = 0.0;
  std::vector<double> ms, Vs;
  for (int i = 0; i < 2; ++i) {
    S = P_pred + V / coef;
    K = P_pred / S;
    m = m_pred + K * (y - m_pred);
    P = P_pred - K * S * K;
    V = V_pred + P + (y - m) * (y - m);
    ms.push_back(m);
    Vs.push_back(V);
  }
  ASSERT_DOUBLE_EQ(ms[0], 0.5);
  ASSERT_DOUBLE_EQ(Vs[0], 3.75);
  ASSERT_NEAR(ms[1], 4.0 / 9.0, 1e-15);

  const JointBelief pred{{vec1(m_pred), mat1(P_pred)}, {4.0, mat1(V_pred)}};
  for (const auto& scheme : schemes()) {
    const auto out = vbakf::vbagf_update(pred, vec1(y), linear_map(mat1(1.0)),
                                         vb_config(1.0, 1, 2, 0.0, scheme));
    EXPECT_EQ(out.diagnostics.iterations_run, 2);
    EXPECT_DOUBLE_EQ(out.belief.noise.dof, 5.0);
    EXPECT_NEAR(out.diagnostics.predicted_meas_cov(0, 0), 2.25, 1e-12);
    EXPECT_NEAR(out.diagnostics.gain(0, 0), 1.0 / 2.25, 1e-12);
    EXPECT_NEAR(out.belief.state.mean(0), 4.0 / 9.0, 1e-12);
    EXPECT_NEAR(out.belief.state.cov(0, 0), 1.0 - 1.0 / 2.25, 1e-12);
    EXPECT_NEAR(out.belief.noise.scale(0, 0), V, 1e-12);
  }
}

TEST(VbagfUpdate, EarlyStopRespectsTolerance) {
  const JointBelief pred{{vec1(0.0), mat1(1.0)}, {4.0, mat1(3.0)}};
  const auto out = vbakf::vbagf_update(pred, vec1(1.0), [](const Vector& x) { return x; },
                                       vb_config(1.0, 1, 100, 1e-9));
  EXPECT_LT(out.diagnostics.iterations_run, 100);
  EXPECT_LT(out.diagnostics.final_delta, 1e-9);
}

TEST(FilterRun, EmptyDataThrows) {
  vbakf::AdditiveModel model{1, 1, [](const Vector& x) { return x; },
                             [](const Vector& x) { return x; }, mat1(0.1)};
  const JointBelief b{{vec1(0.0), mat1(1.0)}, InverseWishartState::weak_prior(1)};
  EXPECT_THROW(vbakf::filter_run(model, {}, b, vb_config(1.0, 1)), std::invalid_argument);
}

TEST(FilterRun, FailingStepCarriesIndex) {
  vbakf::AdditiveModel model{1, 1, [](const Vector& x) { return x; },
                             [](const Vector& x) { return x; }, mat1(0.1)};
  const JointBelief b{{vec1(0.0), mat1(1.0)}, InverseWishartState::weak_prior(1)};
  std::vector<Vector> data(5, vec1(1.0));
  data[3] = Vector::Zero(2);
  try {
    vbakf::filter_run(model, data, b, vb_config(1.0, 1));
    FAIL() << "expected FilterRunError";
  } catch (const vbakf::FilterRunError& e) {
    EXPECT_EQ(e.step(), 3u);
  }
}

TEST(FilterRun, ConstantMeasurementConvergesMonotonically) {
  vbakf::AdditiveModel model{2, 2, [](const Vector& x) { return x; },
                             [](const Vector& x) { return x; }, 1e-4 * Matrix::Identity(2, 2)};
  const JointBelief b{{Vector::Zero(2), Matrix::Identity(2, 2)}, InverseWishartState::weak_prior(2)};
  const Vector y = Vector::Constant(2, 3.0);
  const std::vector<Vector> data(200, y);
  const auto out = vbakf::filter_run(model, data, b, vb_config(0.95, 2));
  double prev = (b.state.mean - y).norm();
  for (const auto& step : out) {
    const double dist = (step.belief.state.mean - y).norm();
    EXPECT_LE(dist, prev + 1e-12);
    prev = dist;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(FilterRun, LinearModelMatchesReferenceRecursion) {
  std::mt19937_64 gen(9);
  const auto c = random_linear_case(gen);
  const Eigen::Index n = c.A.rows(), d = c.H.rows();
  vbakf::AdditiveModel model{n, d, linear_map(c.A), linear_map(c.H), c.Q};
  std::vector<Vector> data;
  for (int k = 0; k < 50; ++k) data.push_back(oracle::random_vector(d, gen));
  for (const auto& scheme : schemes()) {
    const auto out = vbakf::filter_run(model, data, c.belief, vb_config(c.rho, d, 5, 0.0, scheme));
    oracle::VbState ref{c.belief.state.mean, c.belief.state.cov, c.belief.noise.dof,
                        c.belief.noise.scale};
    for (std::size_t k = 0; k < data.size(); ++k) {
      ref = oracle::linear_vb_step(ref, data[k], c.A, c.H, c.Q, c.rho, 5);
      EXPECT_LT(oracle::rel_diff(out[k].belief.state.mean, ref.m), 1e-10);
      EXPECT_LT(oracle::rel_diff(out[k].belief.state.cov, ref.P), 1e-10);
      EXPECT_NEAR(out[k].belief.noise.dof, ref.nu, 1e-10);
      EXPECT_LT(oracle::rel_diff(out[k].belief.noise.scale, ref.V), 1e-10);
    }
  }
}

// ---------------------------------------------------------------------------

TEST(FiltersProperty, LinearEquivalenceAcrossSchemes) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = random_linear_case(gen);
    const Eigen::Index d = c.y.size();
    const JointBelief pred{{c.A * c.belief.state.mean,
                            c.A * c.belief.state.cov * c.A.transpose() + c.Q},
                           vbakf::iw_predict(c.belief.noise,
                                             CovarianceDynamics::forgetting(c.rho, d))};
    const auto ref = vbakf::vbakf_update(pred, c.y, c.H, vb_config(c.rho, d));
    for (const auto& scheme : schemes()) {
      const auto out =
          vbakf::vbagf_update(pred, c.y, linear_map(c.H), vb_config(c.rho, d, 5, 0.0, scheme));
      EXPECT_LT(oracle::rel_diff(out.belief.state.mean, ref.belief.state.mean), 1e-10);
      EXPECT_LT(oracle::rel_diff(out.belief.state.cov, ref.belief.state.cov), 1e-10);
      EXPECT_NEAR(out.belief.noise.dof, ref.belief.noise.dof, 1e-12);
      EXPECT_LT(oracle::rel_diff(out.belief.noise.scale, ref.belief.noise.scale), 1e-10);
    }
  }
}

TEST(FiltersProperty, FirstSweepEqualsGaussianUpdate) {
  std::mt19937_64 gen(32);
  const Mapping h([](const Vector& x) {
    Vector y(2);
    y << std::hypot(x(0) - 2.0, x(1) + 1.0), std::sin(x(0)) * x(1);
    return y;
  });
  for (int trial = 0; trial < 30; ++trial) {
    const JointBelief pred{{oracle::random_vector(2, gen), 0.2 * oracle::random_spd(2, gen)},
                           {3.0 + 0.2 + 4.0 * trial / 30.0, oracle::random_spd(2, gen)}};
    const Vector y = oracle::random_vector(2, gen);
    for (const auto& scheme : schemes()) {
      const auto vb = vbakf::vbagf_update(pred, y, h, vb_config(1.0, 2, 1, 0.0, scheme));
      const double coef = pred.noise.dof + 1.0 - 3.0;
      const auto kf = vbakf::gf_update(pred.state, y, h, pred.noise.scale / coef, scheme);
      EXPECT_LT(oracle::rel_diff(vb.belief.state.mean, kf.state.mean), 1e-12);
      EXPECT_LT(oracle::rel_diff(vb.belief.state.cov, kf.state.cov), 1e-12);
    }
  }
}

TEST(FiltersProperty, DofRecursion) {
  vbakf::AdditiveModel model{1, 2, [](const Vector& x) { return x; },
                             [](const Vector& x) { return Vector(Vector::Constant(2, x(0))); },
                             mat1(0.01)};
  std::mt19937_64 gen(33);
  std::vector<Vector> data;
  for (int k = 0; k < 40; ++k) data.push_back(oracle::random_vector(2, gen));
  const JointBelief b{{vec1(0.0), mat1(1.0)}, InverseWishartState::weak_prior(2, 1.0, 0.5)};
  const auto stationary = vbakf::filter_run(model, data, b, vb_config(1.0, 2));
  for (std::size_t k = 0; k < data.size(); ++k) {
    EXPECT_NEAR(stationary[k].belief.noise.dof, b.noise.dof + static_cast<double>(k + 1), 1e-12);
  }
  const double rho = 0.7;
  const auto forgetting = vbakf::filter_run(model, data, b, vb_config(rho, 2));
  double nu = b.noise.dof;
  for (std::size_t k = 0; k < data.size(); ++k) {
    nu = rho * (nu - 3.0) + 3.0 + 1.0;
    EXPECT_NEAR(forgetting[k].belief.noise.dof, nu, 1e-12);
  }
}

TEST(FiltersProperty, CovariancesStaySpdThroughBearingsRun) {
  const vbakf::SensorArray sensors{{{-3.0, -3.0}, {3.0, -3.0}, {3.0, 3.0}, {-3.0, 3.0}}};
  const double dt = 0.05;
  const auto model = vbakf::bearings_only_model(sensors, dt, vbakf::coordinated_turn_Q(0.01, 0.001, dt));
  Vector x0(5);
  x0 << 0.0, 1.0, -1.5, 0.0, 1.0 / 1.5;
  vbakf::SmoothCovParams params;
  params.base_std = Vector::Constant(4, 0.1);
  const auto sim = vbakf::simulate(model, sensors, vbakf::smooth_cov_trace(300, params), 300, x0, 7,
                                   vbakf::kTurnLayout);
  Matrix P0 = 0.01 * Matrix::Identity(5, 5);
  const JointBelief b{{x0, P0}, InverseWishartState::weak_prior(4)};
  for (const auto& scheme : schemes()) {
    const auto out = vbakf::filter_run(model, sim.measurements, b,
                                       vb_config(1.0 - std::exp(-3.0), 4, 5, 1e-8, scheme));
    for (const auto& step : out) {
      EXPECT_TRUE(vbakf::is_spd(step.belief.state.cov));
      EXPECT_TRUE(vbakf::is_spd(step.diagnostics.predicted_meas_cov));
      EXPECT_TRUE(vbakf::is_spd(step.belief.noise.scale));
      EXPECT_LE(step.diagnostics.iterations_run, 5);
    }
  }
}

TEST(FiltersProperty, FixedPointStability) {
  std::mt19937_64 gen(34);
  const Mapping h([](const Vector& x) {
    Vector y(2);
    y << x(0) * x(0) + x(1), std::cos(x(1));
    return y;
  });
  const double tol = 1e-9;
  for (int trial = 0; trial < 20; ++trial) {
    const JointBelief pred{{oracle::random_vector(2, gen), 0.1 * oracle::random_spd(2, gen)},
                           {3.5 + trial * 0.1, oracle::random_spd(2, gen)}};
    const Vector y = oracle::random_vector(2, gen);
    const auto stopped = vbakf::vbagf_update(pred, y, h, vb_config(1.0, 2, 200, tol));
    ASSERT_LT(stopped.diagnostics.final_delta, tol);
    const auto extra = vbakf::vbagf_update(
        pred, y, h, vb_config(1.0, 2, stopped.diagnostics.iterations_run + 1, 0.0));
    EXPECT_LE((extra.belief.noise.scale - stopped.belief.noise.scale).norm(), tol);
  }
}

TEST(FiltersProperty, DiagonalVariantKeepsZeroOffDiagonals) {
  const vbakf::SensorArray sensors{{{-3.0, -2.5}, {3.0, -2.5}, {0.0, 3.5}}};
  const auto model = vbakf::range_only_model(sensors, 2.0, 0.01);
  vbakf::LoopTrajectory loop;
  loop.radii = {2.0, 1.5};
  Matrix sigma(3, 3);
  sigma << 0.01, 0.004, 0.0, 0.004, 0.02, 0.003, 0.0, 0.003, 0.015;
  const auto sim = vbakf::simulate_measurements(loop.states(300, 0.01), model, sensors,
                                                vbakf::TrueCovTrace(300, sigma), 3,
                                                vbakf::kWienerLayout);
  const JointBelief b{{loop.state_at(0, 300, 0.01), 0.01 * Matrix::Identity(4, 4)},
                      InverseWishartState::weak_prior(3)};
  for (const auto& scheme : schemes()) {
    VbConfig cfg = vb_config(0.9, 3, 5, 1e-8, scheme);
    cfg.diagonal = true;
    ASSERT_TRUE(cfg.dyn.is_diagonal());
    const auto out = vbakf::filter_run(model, sim.measurements, b, cfg);
    for (const auto& step : out) {
      const Matrix& V = step.belief.noise.scale;
      for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 3; ++j)
          if (i != j) {
            EXPECT_EQ(V(i, j), 0.0);
          }
    }
  }
}

}  // namespace
