#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mssc/errors.hpp"
#include "mssc/panel.hpp"
#include "mssc/rng.hpp"

namespace mssc {

enum class Ar1Variant {
  H0,       // A = theta I
  H1Local,  // theta I plus beta at (2, 1): only series 1 and 2 are coupled
  H1Global  // theta I plus beta on the whole first subdiagonal
};

inline const char* to_string(Ar1Variant v) {
  switch (v) {
    case Ar1Variant::H0: return "H0";
    case Ar1Variant::H1Local: return "H1loc";
    case Ar1Variant::H1Global: return "H1glob";
  }
  return "?";
}

// y_{n+1} = A y_n + eps_n with eps_n ~ N_C(0, I) and a lower bidiagonal A.
struct Ar1Spec {
  Index M = 2;
  double theta = 0.5;
  double beta = 0.0;
  Ar1Variant variant = Ar1Variant::H0;

  void validate() const {
    if (M < 1) throw InvalidInput("AR(1) model needs M >= 1");
    if (!(std::abs(theta) < 1.0)) {
      throw InvalidInput("AR(1) coefficient must satisfy |theta| < 1, got " +
                         std::to_string(theta));
    }
    if (!std::isfinite(beta)) throw InvalidInput("AR(1) coupling beta must be finite");
  }

  // Coefficient on y_{m-1} in the update of y_m (entry (m, m-1) of A).
  double subdiagonal(Index m) const {
    if (m == 0) return 0.0;
    switch (variant) {
      case Ar1Variant::H0: return 0.0;
      case Ar1Variant::H1Local: return m == 1 ? beta : 0.0;
      case Ar1Variant::H1Global: return beta;
    }
    return 0.0;
  }
};

inline Eigen::MatrixXd build_transition(const Ar1Spec& spec) {
  spec.validate();
  Eigen::MatrixXd A = spec.theta * Eigen::MatrixXd::Identity(spec.M, spec.M);
  for (Index m = 1; m < spec.M; ++m) A(m, m - 1) = spec.subdiagonal(m);
  return A;
}

// Lag-0 covariance R0 of the stationary solution together with the
// transition; R(u) = A^u R0 for u >= 0 and R(-u) = R(u)^*.
template <typename Scalar>
struct CovarianceSequence {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix A;
  Matrix R0;

  Matrix lag(Index u) const {
    Matrix R = R0;
    for (Index k = 0; k < std::abs(u); ++k) R = A * R;
    return u >= 0 ? R : Matrix(R.adjoint());
  }
};

// Solves R0 = A R0 A^* + I by the doubling iteration
//   R <- R + A_k R A_k^*,  A_k <- A_k^2,
// which sums 2^k terms of sum_j A^j (A^j)^* per step.
template <typename Derived>
CovarianceSequence<typename Derived::Scalar> stationary_covariance(
    const Eigen::MatrixBase<Derived>& transition, int max_doublings = 64) {
  using Scalar = typename Derived::Scalar;
  using Matrix = typename CovarianceSequence<Scalar>::Matrix;
  const Index M = transition.rows();
  if (transition.cols() != M) throw InvalidInput("transition matrix must be square");

  Matrix A = transition;
  Matrix R = Matrix::Identity(M, M);
  Matrix Ak = A;
  bool converged = false;
  for (int it = 0; it < max_doublings; ++it) {
    const Matrix increment = Ak * R * Ak.adjoint();
    R += increment;
    if (!detail::all_finite(R)) break;
    if (increment.norm() <= 1e-17 * R.norm()) {
      converged = true;
      break;
    }
    Ak = (Ak * Ak).eval();
  }
  if (!converged) {
    throw NumericalFailure("Lyapunov iteration did not converge; is the spectral radius < 1?");
  }
  R = (0.5 * (R + R.adjoint())).eval();
  const double residual = (R - A * R * A.adjoint() - Matrix::Identity(M, M)).norm();
  if (!std::isfinite(residual) || !(residual <= 1e-10 * R.norm())) {
    throw NumericalFailure("Lyapunov residual " + std::to_string(residual) + " too large");
  }
  return {std::move(A), std::move(R)};
}

// Panel together with the innovations that produced it. Column 0 of the
// innovation panel holds the standard normal vector z with y_0 = R0^{1/2} z;
// column n >= 1 holds eps with y_n = A y_{n-1} + eps.
struct SimulatedPath {
  TimeSeriesPanel observations;
  TimeSeriesPanel innovations;
};

// Draws exactly stationary paths of an Ar1Spec. The Lyapunov solve and the
// square root of R0 are done once at construction.
class Ar1Simulator {
 public:
  explicit Ar1Simulator(const Ar1Spec& spec) : spec_(spec) {
    spec_.validate();
    transition_ = build_transition(spec_);
    covariance_ = stationary_covariance(transition_).R0;
    if (spec_.variant == Ar1Variant::H0 || spec_.beta == 0.0) {
      // Diagonal covariance; keep the square root exact.
      init_root_ = Eigen::MatrixXd::Zero(spec_.M, spec_.M);
      for (Index m = 0; m < spec_.M; ++m) init_root_(m, m) = std::sqrt(covariance_(m, m));
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance_);
      if (eig.info() != Eigen::Success) {
        throw NumericalFailure("eigendecomposition of the stationary covariance failed");
      }
      init_root_ = eig.operatorSqrt();
    }
    subdiag_.resize(static_cast<std::size_t>(spec_.M));
    for (Index m = 0; m < spec_.M; ++m) subdiag_[static_cast<std::size_t>(m)] = spec_.subdiagonal(m);
  }

  const Ar1Spec& spec() const { return spec_; }
  const Eigen::MatrixXd& transition() const { return transition_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }

  SimulatedPath simulate_with_innovations(Index N, const RngStream& stream) const {
    RowComplexMatrix eps = draw_innovations(N, stream);
    RowComplexMatrix y = run(eps);
    return {TimeSeriesPanel(std::move(y)), TimeSeriesPanel(std::move(eps))};
  }

  TimeSeriesPanel simulate(Index N, const RngStream& stream) const {
    return TimeSeriesPanel(run(draw_innovations(N, stream)));
  }

 private:
  RowComplexMatrix draw_innovations(Index N, const RngStream& stream) const {
    if (N < 1) throw InvalidInput("simulation length must be at least 1");
    const Index M = spec_.M;
    RowComplexMatrix eps(M, N);
    for (Index m = 0; m < M; ++m) {
      for (Index n = 0; n < N; ++n) {
        eps(m, n) = stream.complex_normal(static_cast<std::uint32_t>(m),
                                          static_cast<std::uint32_t>(n));
      }
    }
    return eps;
  }

  RowComplexMatrix run(const RowComplexMatrix& eps) const {
    const Index M = spec_.M;
    const Index N = eps.cols();
    RowComplexMatrix y(M, N);
    for (Index m = 0; m < M; ++m) {
      Complex acc(0.0, 0.0);
      for (Index l = 0; l < M; ++l) acc += init_root_(m, l) * eps(l, 0);
      y(m, 0) = acc;
    }
    const double theta = spec_.theta;
    for (Index n = 1; n < N; ++n) {
      for (Index m = 0; m < M; ++m) {
        Complex next = theta * y(m, n - 1) + eps(m, n);
        const double c = subdiag_[static_cast<std::size_t>(m)];
        if (c != 0.0) next += c * y(m - 1, n - 1);
        y(m, n) = next;
      }
    }
    return y;
  }

  Ar1Spec spec_;
  Eigen::MatrixXd transition_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd init_root_;
  std::vector<double> subdiag_;
};

inline TimeSeriesPanel simulate_panel(const Ar1Spec& spec, Index N, const RngStream& stream) {
  return Ar1Simulator(spec).simulate(N, stream);
}

// Spectral radius for the triangular transitions built here, or the largest
// eigenvalue modulus in general.
template <typename Derived>
double spectral_radius(const Eigen::MatrixBase<Derived>& A) {
  using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Matrix dense = A;
  if (dense.isLowerTriangular(0.0) || dense.isUpperTriangular(0.0)) {
    return dense.diagonal().cwiseAbs().maxCoeff();
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(dense.template cast<Complex>(), false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

// Share of the Frobenius mass of {R(u)} off the diagonal:
//   r = sum_u ||R(u) - dg R(u)||_F^2 / sum_u ||R(u)||_F^2.
// Lags u and -u contribute equally. The sum stops once both the current lag
// and the geometric tail bound rho^{2u} ||R0||^2 / (1 - rho^2) fall below
// tail_tol relative to the accumulated denominator.
template <typename Derived>
double dependence_measure(const Eigen::MatrixBase<Derived>& transition, double tail_tol = 1e-12) {
  const auto cov = stationary_covariance(transition);
  const double rho = spectral_radius(transition);
  const double r0_mass = cov.R0.squaredNorm();
  auto off_mass = [](const auto& R) { return R.squaredNorm() - R.diagonal().squaredNorm(); };

  double num = off_mass(cov.R0);
  double den = r0_mass;
  auto R = cov.R0;
  for (Index u = 1;; ++u) {
    if (u > 100000) throw NumericalFailure("dependence measure lag sum did not terminate");
    R = (cov.A * R).eval();
    const double term = R.squaredNorm();
    num += 2.0 * off_mass(R);
    den += 2.0 * term;
    const double tail = rho < 1.0 ? std::pow(rho, 2.0 * static_cast<double>(u)) * r0_mass /
                                        (1.0 - rho * rho)
                                  : term;
    if (term <= tail_tol * den && 2.0 * tail <= tail_tol * den) break;
  }
  return den > 0.0 ? num / den : 0.0;
}

inline double dependence_measure(const Ar1Spec& spec, double tail_tol = 1e-12) {
  if (spec.variant == Ar1Variant::H0) return 0.0;
  return dependence_measure(build_transition(spec), tail_tol);
}

// Smallest coupling beta in [0, 0.9] with dependence_measure = r_target.
// r rises from 0 at beta = 0 but is not monotone on the whole bracket (the
// diagonal mass eventually outgrows the off-diagonal mass), so the crossing is
// first bracketed by an ascending scan and then refined by bisection.
inline double calibrate_beta(Index M, double theta, Ar1Variant variant, double r_target) {
  if (variant == Ar1Variant::H0) throw InvalidInput("calibrate_beta: H0 has no coupling");
  if (!(r_target >= 0.0 && r_target < 0.5)) {
    throw InvalidInput("calibrate_beta: target must lie in [0, 0.5), got " +
                       std::to_string(r_target));
  }
  if (M < 2) throw InvalidInput("calibrate_beta: need M >= 2");
  if (r_target == 0.0) return 0.0;
  auto r_of = [&](double beta) {
    return dependence_measure(Ar1Spec{M, theta, beta, variant});
  };
  constexpr double kMaxBeta = 0.9;
  constexpr int kScan = 64;
  double lo = 0.0;
  double hi = -1.0;
  double r_max = 0.0;
  for (int k = 1; k <= kScan; ++k) {
    const double beta = kMaxBeta * k / kScan;
    const double r = r_of(beta);
    r_max = std::max(r_max, r);
    if (r >= r_target) {
      hi = beta;
      break;
    }
    lo = beta;
  }
  if (hi < 0.0) {
    throw CalibrationFailure("dependence " + std::to_string(r_target) +
                             " unreachable with beta <= 0.9 (max " + std::to_string(r_max) + ")");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double r = r_of(mid);
    if (std::abs(r - r_target) <= 1e-12 || hi - lo < 1e-15) break;
    (r < r_target ? lo : hi) = mid;
  }
  if (std::abs(r_of(mid) - r_target) > 1e-6) {
    throw CalibrationFailure("bisection for beta did not reach the target dependence");
  }
  return mid;
}

}  // namespace mssc
