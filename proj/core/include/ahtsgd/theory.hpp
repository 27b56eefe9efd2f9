#ifndef AHTSGD_THEORY_HPP
#define AHTSGD_THEORY_HPP

#include <cstdint>
#include <functional>

namespace ahtsgd {

// Analytic escape/convergence calculators. These evaluate the closed forms
// as printed — they are plot diagnostics and simulation cross-checks, not
// certified bounds. Exponents above ~700 would overflow exp(), so every
// exponential here returns +infinity as an explicit overflow sentinel
// (check with std::isinf); nothing throws on large inputs.

// Expected escape time exp(H / sigma^alpha) from a basin behind barrier H.
// Strictly increasing in H, strictly decreasing in sigma.
double escape_time(double h, double sigma, double alpha);

// Escape-rate ratio exp(H/sigma^2 - (H/sigma^alpha) * Gamma(1 + 2/alpha)^(alpha/2)).
// Equals 1 at alpha = 2; grows as the tail gets heavier at sigma < 1.
double escape_ratio(double h, double sigma, double alpha);

// (lambda_max / (2/eta))^(2 - alpha): below 1 exactly when the sharpness
// sits under the edge-of-stability threshold 2/eta and alpha < 2.
double suboptimality_factor(double lambda_max, double eta, double alpha);

// T^(gamma - min(gamma, 1 - 1/alpha_T)): the early-iterations error ratio
// of a gamma-decay Gaussian baseline to the heavy-tailed run.
double early_acceleration_ratio(double gamma, double alpha_t, double t);

struct BoundInputs {
  double init_dist = 1.0;  // distance from the initial iterate to the optimum
  double c_alpha = 1.0;    // caller-supplied prefactor constant (see note below)
  double gamma = 0.55;
  uint64_t horizon = 1;  // T
};

// Expected-squared-distance bound
//   init^2 / T^gamma
//     + (c_alpha / T^min(gamma, 1 - 1/alpha(T))) * sum_{t=1..T} sigma(t)^alpha(t) / t^gamma
// evaluated by direct summation. c_alpha is nominally the noise second
// moment, which diverges for alpha < 2 — the caller picks the constant and
// this function just evaluates the printed expression.
double convergence_bound(const BoundInputs& in, const std::function<double(uint64_t)>& sigma_at,
                         const std::function<double(uint64_t)>& alpha_at);

// The fixed-Gaussian special case as printed for plain SGD:
//   init^2 / T^gamma + (sigma^2 / T^gamma) * sum_{t=1..T} 1 / t^gamma.
// Matches convergence_bound with alpha == 2, constant sigma and c_alpha = 1
// exactly when gamma <= 1/2 (the prefactor exponents coincide there); for
// gamma > 1/2 the two printed forms differ by the factor T^(gamma - 1/2).
double sgd_convergence_bound(double init_dist, double sigma, double gamma, uint64_t horizon);

}  // namespace ahtsgd

#endif  // AHTSGD_THEORY_HPP
