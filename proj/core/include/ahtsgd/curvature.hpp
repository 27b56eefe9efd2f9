#ifndef AHTSGD_CURVATURE_HPP
#define AHTSGD_CURVATURE_HPP

#include <Eigen/Core>
#include <cstdint>
#include <functional>

#include "ahtsgd/rng.hpp"

namespace ahtsgd {

// Callable contract mapping (theta, v) -> H(theta) * v. Implementations
// must be linear in v up to finite-difference tolerance.
using HvpOracle = std::function<Eigen::VectorXd(const Eigen::VectorXd& theta, const Eigen::VectorXd& v)>;

using GradOracle = std::function<Eigen::VectorXd(const Eigen::VectorXd& theta)>;

// EMA tracker for the log-compressed sharpness signal s_t.
// ema starts at 0 and moves as ema <- (1 - rho) * ema + rho * s_t.
struct SharpnessState {
  double ema = 0.0;
  double last_raw = 0.0;
  double rho = 0.05;
  int probes_per_step = 1;  // in [1, 3]
  uint64_t step_count = 0;
};

// Unbiased Hutchinson trace estimate (1/probes) * sum_j v_j' H v_j with
// Rademacher probes. Throws CurvatureError if the oracle returns
// non-finite values.
double hutchinson_trace(const HvpOracle& hvp, const Eigen::VectorXd& theta, int probes, RngStream& rng);

// s_t = log(1 + |trace|); nonnegative, monotone in |trace|.
double sharpness_signal(double trace);

SharpnessState update_ema(SharpnessState state, double s_t);

struct LambdaMaxEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Power iteration from a random unit start. Returns the Rayleigh quotient
// once successive estimates differ by less than tol, or the last estimate
// flagged unconverged at the iteration cap. For symmetric H this is the
// eigenvalue of largest magnitude, sign included; compare |value| against
// edge_of_stability(eta).
LambdaMaxEstimate estimate_lambda_max(const HvpOracle& hvp, const Eigen::VectorXd& theta,
                                      int iterations, double tol, RngStream& rng);

// The edge-of-stability threshold 2 / eta.
double edge_of_stability(double eta);

// Central-difference Hessian-vector product
//   (grad(theta + eps v) - grad(theta - eps v)) / (2 eps),
// O(eps^2) accurate; realizes HvpOracle for objectives without analytic
// second derivatives. v == 0 returns an exact zero vector.
Eigen::VectorXd fd_hvp(const GradOracle& grad, const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                       double eps);

// Default step: sqrt(machine epsilon) * (1 + max|theta_i|).
double fd_default_eps(const Eigen::VectorXd& theta);

Eigen::VectorXd fd_hvp(const GradOracle& grad, const Eigen::VectorXd& theta, const Eigen::VectorXd& v);

}  // namespace ahtsgd

#endif  // AHTSGD_CURVATURE_HPP
