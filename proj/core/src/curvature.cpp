#include "ahtsgd/curvature.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ahtsgd/errors.hpp"

namespace ahtsgd {

double hutchinson_trace(const HvpOracle& hvp, const Eigen::VectorXd& theta, int probes, RngStream& rng) {
  if (probes < 1) throw ParameterError("hutchinson_trace requires probes >= 1");
  const Eigen::Index d = theta.size();
  double acc = 0.0;
  Eigen::VectorXd v(d);
  for (int j = 0; j < probes; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.rademacher();
    Eigen::VectorXd hv = hvp(theta, v);
    if (!hv.allFinite()) throw CurvatureError("Hessian-vector product returned non-finite values");
    acc += v.dot(hv);
  }
  return acc / probes;
}

double sharpness_signal(double trace) { return std::log1p(std::abs(trace)); }

SharpnessState update_ema(SharpnessState state, double s_t) {
  state.ema = (1.0 - state.rho) * state.ema + state.rho * s_t;
  state.last_raw = s_t;
  state.step_count += 1;
  return state;
}

LambdaMaxEstimate estimate_lambda_max(const HvpOracle& hvp, const Eigen::VectorXd& theta,
                                      int iterations, double tol, RngStream& rng) {
  if (iterations < 1) throw ParameterError("estimate_lambda_max requires iterations >= 1");
  if (!(tol > 0.0)) throw ParameterError("estimate_lambda_max requires tol > 0");
  const Eigen::Index d = theta.size();
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.gaussian();
  double norm = v.norm();
  if (norm == 0.0) v.setConstant(1.0 / std::sqrt(static_cast<double>(d)));
  else v /= norm;

  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= iterations; ++it) {
    Eigen::VectorXd hv = hvp(theta, v);
    if (!hv.allFinite()) throw CurvatureError("Hessian-vector product returned non-finite values");
    double rayleigh = v.dot(hv);  // v is unit
    double hv_norm = hv.norm();
    if (hv_norm == 0.0) return {0.0, true, it};  // v lies in the kernel
    if (it > 1 && std::abs(rayleigh - prev) < tol) return {rayleigh, true, it};
    prev = rayleigh;
    v = hv / hv_norm;
  }
  return {prev, false, iterations};
}

double edge_of_stability(double eta) {
  if (!(eta > 0.0)) throw ParameterError("edge_of_stability requires eta > 0, got " + std::to_string(eta));
  return 2.0 / eta;
}

double fd_default_eps(const Eigen::VectorXd& theta) {
  double scale = theta.size() > 0 ? theta.cwiseAbs().maxCoeff() : 0.0;
  return std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + scale);
}

Eigen::VectorXd fd_hvp(const GradOracle& grad, const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                       double eps) {
  if (!(eps > 0.0)) throw ParameterError("fd_hvp requires eps > 0");
  if (v.isZero(0.0)) return Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd gp = grad(theta + eps * v);
  Eigen::VectorXd gm = grad(theta - eps * v);
  if (!gp.allFinite() || !gm.allFinite())
    throw CurvatureError("gradient oracle returned non-finite values in fd_hvp");
  return (gp - gm) / (2.0 * eps);
}

Eigen::VectorXd fd_hvp(const GradOracle& grad, const Eigen::VectorXd& theta, const Eigen::VectorXd& v) {
  return fd_hvp(grad, theta, v, fd_default_eps(theta));
}

}  // namespace ahtsgd
