#ifndef AHTSGD_STABLE_NOISE_HPP
#define AHTSGD_STABLE_NOISE_HPP

#include <Eigen/Core>

#include "ahtsgd/rng.hpp"

namespace ahtsgd {

// Parameters of the injected symmetric alpha-stable noise, S_alpha(sigma,
// beta=0, mu=0) in the type-1 convention. Under this convention alpha = 2
// gives a Gaussian with variance 2*sigma^2 (not sigma^2); every
// variance-based check in the tests uses 2*sigma^2.
struct StableNoiseParams {
  double alpha;       // tail index, restricted to [1, 2]
  double sigma;       // scale, >= 0
  double beta = 0.0;  // skew, fixed
  double mu = 0.0;    // location, fixed

  StableNoiseParams(double alpha_, double sigma_);
};

// One draw from the standard symmetric alpha-stable law S_alpha(1, 0, 0)
// via the Chambers-Mallows-Stuck transform of V ~ U(-pi/2, pi/2) and
// W ~ Exp(1). alpha == 2 is Gaussian with variance 2, alpha == 1 is
// standard Cauchy (the transform degenerates to tan(V)). Non-finite
// intermediates are resampled; the result is always finite.
double sample_standard(double alpha, RngStream& rng);

// dim i.i.d. draws scaled by params.sigma. sigma == 0 yields an exact
// zero vector, dim == 0 an empty one.
Eigen::VectorXd sample_vector(const StableNoiseParams& params, Eigen::Index dim, RngStream& rng);

}  // namespace ahtsgd

#endif  // AHTSGD_STABLE_NOISE_HPP
