#include "ahtsgd/stable_noise.hpp"

#include <cmath>

#include "ahtsgd/errors.hpp"

namespace ahtsgd {
namespace {

constexpr double kHalfPi = 1.5707963267948966192313216916398;

// Below this distance from alpha = 1 the general-case exponents
// (1 - alpha)/alpha catastrophically cancel; use the exact alpha = 1 branch.
constexpr double kAlphaOneWindow = 1e-8;

void check_alpha(double alpha) {
  if (!(alpha >= 1.0 && alpha <= 2.0))
    throw ParameterError("stable tail index alpha must be in [1, 2], got " + std::to_string(alpha));
}

}  // namespace

StableNoiseParams::StableNoiseParams(double alpha_, double sigma_) : alpha(alpha_), sigma(sigma_) {
  check_alpha(alpha);
  if (!(sigma >= 0.0))
    throw ParameterError("stable scale sigma must be >= 0, got " + std::to_string(sigma));
}

double sample_standard(double alpha, RngStream& rng) {
  check_alpha(alpha);
  const bool cauchy = std::abs(alpha - 1.0) < kAlphaOneWindow;
  for (;;) {
    double v = rng.uniform(-kHalfPi, kHalfPi);
    double x;
    if (cauchy) {
      x = std::tan(v);
    } else {
      double w = rng.exponential();
      x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
          std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
    }
    if (std::isfinite(x)) return x;
  }
}

Eigen::VectorXd sample_vector(const StableNoiseParams& params, Eigen::Index dim, RngStream& rng) {
  if (params.sigma == 0.0) return Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd out(dim);
  for (Eigen::Index i = 0; i < dim; ++i) out[i] = params.sigma * sample_standard(params.alpha, rng);
  return out;
}

}  // namespace ahtsgd
