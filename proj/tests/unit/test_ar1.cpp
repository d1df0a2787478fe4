#include <gtest/gtest.h>

#include "mssc/ar1.hpp"

namespace {

using namespace mssc;

TEST(Transition, PaperMatrices) {
  const Eigen::MatrixXd h0 = build_transition({3, 0.5, 0.0, Ar1Variant::H0});
  EXPECT_EQ(h0, (0.5 * Eigen::MatrixXd::Identity(3, 3)).eval());

  Eigen::MatrixXd loc = 0.5 * Eigen::MatrixXd::Identity(3, 3);
  loc(1, 0) = 0.1;
  EXPECT_EQ(build_transition({3, 0.5, 0.1, Ar1Variant::H1Local}), loc);

  Eigen::MatrixXd glob = loc;
  glob(2, 1) = 0.1;
  EXPECT_EQ(build_transition({3, 0.5, 0.1, Ar1Variant::H1Global}), glob);

  EXPECT_THROW(build_transition({3, 1.0, 0.0, Ar1Variant::H0}), InvalidInput);
}

TEST(StationaryCovariance, ClosedForms) {
  for (double theta : {0.0, 0.3, -0.6, 0.95}) {
    const auto cov = stationary_covariance(theta * Eigen::MatrixXd::Identity(4, 4));
    EXPECT_LE((cov.R0 - Eigen::MatrixXd::Identity(4, 4) / (1.0 - theta * theta)).norm(), 1e-12);
  }
  const auto zero = stationary_covariance(Eigen::MatrixXd::Zero(2, 2));
  EXPECT_EQ(zero.R0, Eigen::MatrixXd::Identity(2, 2));
}

TEST(StationaryCovariance, ResidualAndComplexInput) {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(3, 3);
  A(0, 0) = Complex(0.3, 0.4);
  A(1, 1) = 0.5;
  A(2, 2) = Complex(0.0, -0.7);
  A(1, 0) = Complex(0.2, 0.1);
  A(2, 1) = 0.3;
  const auto cov = stationary_covariance(A);
  const Eigen::MatrixXcd res = cov.R0 - A * cov.R0 * A.adjoint() - Eigen::MatrixXcd::Identity(3, 3);
  EXPECT_LE(res.norm(), 1e-10 * cov.R0.norm());
  EXPECT_LE((cov.R0 - cov.R0.adjoint()).norm(), 0.0);
  EXPECT_EQ(cov.lag(-2), cov.lag(2).adjoint().eval());
}

TEST(StationaryCovariance, ExplosiveTransitionFails) {
  EXPECT_THROW(stationary_covariance(1.01 * Eigen::MatrixXd::Identity(2, 2)), NumericalFailure);
}

TEST(Simulate, WhiteNoiseVariance) {
  const Ar1Simulator sim({4, 0.0, 0.0, Ar1Variant::H0});
  const auto panel = sim.simulate(25000, {1, 0, 0});
  double s = 0.0;
  for (Index m = 0; m < 4; ++m) {
    for (Index n = 0; n < 25000; ++n) s += std::norm(panel(m, n));
  }
  const double n = 1e5;
  EXPECT_NEAR(s / n, 1.0, 3.0 / std::sqrt(n));  // |z|^2 is Exp(1), sd 1
}

TEST(Simulate, LagOneAutocorrelation) {
  const double theta = 0.6;
  const Ar1Simulator sim({2, theta, 0.0, Ar1Variant::H0});
  const Index N = 200000;
  const auto panel = sim.simulate(N, {2, 0, 0});
  for (Index m = 0; m < 2; ++m) {
    Complex c1(0.0, 0.0);
    double c0 = 0.0;
    for (Index n = 0; n + 1 < N; ++n) {
      c1 += panel(m, n + 1) * std::conj(panel(m, n));
      c0 += std::norm(panel(m, n));
    }
    // Bartlett: var(rho_1) ~ (1 - rho^2) / N, halved again for complex data.
    const double se = std::sqrt((1.0 - theta * theta) / (2.0 * N));
    EXPECT_NEAR(c1.real() / c0, theta, 4.0 * se);
    EXPECT_NEAR(c1.imag() / c0, 0.0, 4.0 * se);
  }
}

TEST(Simulate, DeterministicPerStream) {
  const Ar1Simulator sim({3, 0.5, 0.2, Ar1Variant::H1Global});
  EXPECT_EQ(sim.simulate(100, {5, 1, 2}), sim.simulate(100, {5, 1, 2}));
  EXPECT_FALSE(sim.simulate(100, {5, 1, 2}) == sim.simulate(100, {5, 1, 3}));
  const auto path = sim.simulate_with_innovations(100, {5, 1, 2});
  EXPECT_EQ(path.observations, sim.simulate(100, {5, 1, 2}));
  // The recursion links innovations and observations.
  const Eigen::MatrixXd A = sim.transition();
  for (Index n = 1; n < 100; ++n) {
    const Eigen::VectorXcd lhs = path.observations.data().col(n);
    const Eigen::VectorXcd rhs =
        A.cast<Complex>() * path.observations.data().col(n - 1) + path.innovations.data().col(n);
    EXPECT_LE((lhs - rhs).norm(), 1e-13);
  }
}

TEST(Simulate, StationaryStartCovariance) {
  // Sample covariance of y_0 across replications matches R0.
  const Ar1Simulator sim({2, 0.5, 0.4, Ar1Variant::H1Global});
  Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
  const int reps = 40000;
  for (int r = 0; r < reps; ++r) {
    const auto y = sim.simulate(1, {9, 0, static_cast<std::uint32_t>(r)});
    const Eigen::Vector2cd v = y.data().col(0);
    acc += v * v.adjoint();
  }
  acc /= reps;
  const Eigen::MatrixXd& R0 = sim.covariance();
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      const double se = std::sqrt(R0(i, i) * R0(j, j) / reps);
      EXPECT_NEAR(acc(i, j).real(), R0(i, j), 4.0 * se);
    }
  }
}

TEST(DependenceMeasure, ZeroUnderH0) {
  EXPECT_EQ(dependence_measure(Ar1Spec{5, 0.5, 0.0, Ar1Variant::H0}), 0.0);
  EXPECT_EQ(dependence_measure(0.5 * Eigen::MatrixXd::Identity(5, 5)), 0.0);
}

TEST(DependenceMeasure, FiniteLagBruteForce) {
  // theta = 0: A is nilpotent, so only lags -1, 0, 1 are non-zero.
  const double beta = 0.1;
  const Eigen::MatrixXd A = build_transition({2, 0.0, beta, Ar1Variant::H1Global});
  const auto cov = stationary_covariance(A);
  double num = 0.0;
  double den = 0.0;
  for (Index u = -2; u <= 2; ++u) {
    const Eigen::MatrixXd R = cov.lag(u);
    num += R.squaredNorm() - R.diagonal().squaredNorm();
    den += R.squaredNorm();
  }
  EXPECT_NEAR(dependence_measure(A), num / den, 1e-15);
  const double b2 = beta * beta;
  EXPECT_NEAR(num / den, 2.0 * b2 / (1.0 + (1.0 + b2) * (1.0 + b2) + 2.0 * b2), 1e-15);
}

TEST(DependenceMeasure, MonotoneInBetaAndM) {
  // H1loc at M = 6 rises over the whole bracket.
  double prev = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double r = dependence_measure(Ar1Spec{6, 0.5, 0.09 * k, Ar1Variant::H1Local});
    EXPECT_GT(r, prev);
    prev = r;
  }
  // H1glob rises up to a peak near beta = 0.54 and then falls again.
  prev = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double r = dependence_measure(Ar1Spec{6, 0.5, 0.05 * k, Ar1Variant::H1Global});
    EXPECT_GT(r, prev);
    prev = r;
  }
  EXPECT_GT(dependence_measure(Ar1Spec{6, 0.5, 0.54, Ar1Variant::H1Global}),
            dependence_measure(Ar1Spec{6, 0.5, 0.9, Ar1Variant::H1Global}));
  const double r10 = dependence_measure(Ar1Spec{10, 0.5, 0.1, Ar1Variant::H1Global});
  const double r50 = dependence_measure(Ar1Spec{50, 0.5, 0.1, Ar1Variant::H1Global});
  const double r90 = dependence_measure(Ar1Spec{90, 0.5, 0.1, Ar1Variant::H1Global});
  EXPECT_LT(r10, r50);
  EXPECT_LT(r50, r90);
}

TEST(CalibrateBeta, PicksTheRisingBranch) {
  // r(0.9) < 0.49 here, but the target is crossed on the way up to the peak.
  const double beta = calibrate_beta(6, 0.5, Ar1Variant::H1Global, 0.49);
  EXPECT_LT(beta, 0.54);
  EXPECT_NEAR(dependence_measure(Ar1Spec{6, 0.5, beta, Ar1Variant::H1Global}), 0.49, 1e-6);
}

TEST(CalibrateBeta, HitsTargetAndOrdersByDimension) {
  EXPECT_EQ(calibrate_beta(10, 0.5, Ar1Variant::H1Global, 0.0), 0.0);
  const double b50 = calibrate_beta(50, 0.5, Ar1Variant::H1Global, 0.01);
  EXPECT_NEAR(dependence_measure(Ar1Spec{50, 0.5, b50, Ar1Variant::H1Global}), 0.01, 1e-6);
  const double b120 = calibrate_beta(120, 0.5, Ar1Variant::H1Global, 0.01);
  EXPECT_GT(b50, b120);
  EXPECT_GT(b120, 0.0);
}

TEST(CalibrateBeta, Errors) {
  EXPECT_THROW(calibrate_beta(10, 0.5, Ar1Variant::H0, 0.01), InvalidInput);
  EXPECT_THROW(calibrate_beta(10, 0.5, Ar1Variant::H1Global, 0.5), InvalidInput);
  EXPECT_THROW(calibrate_beta(10, 0.5, Ar1Variant::H1Global, -0.1), InvalidInput);
  EXPECT_THROW(calibrate_beta(100, 0.5, Ar1Variant::H1Local, 0.3), CalibrationFailure);
}

TEST(SpectralRadius, TriangularAndGeneral) {
  EXPECT_DOUBLE_EQ(spectral_radius(build_transition({4, -0.7, 0.3, Ar1Variant::H1Global})), 0.7);
  Eigen::Matrix2d rot;
  rot << 0.0, -0.5, 0.5, 0.0;
  EXPECT_NEAR(spectral_radius(rot), 0.5, 1e-14);
}

}  // namespace
