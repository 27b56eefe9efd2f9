#include "ahtsgd/theory.hpp"

#include <cmath>
#include <limits>

#include "ahtsgd/errors.hpp"

namespace ahtsgd {
namespace {

constexpr double kExpOverflow = 700.0;  // exp() overflows just above 709
constexpr double kInf = std::numeric_limits<double>::infinity();

double guarded_exp(double exponent) { return exponent > kExpOverflow ? kInf : std::exp(exponent); }

void check_alpha(double alpha) {
  if (!(alpha >= 1.0 && alpha <= 2.0)) throw ParameterError("alpha must be in [1, 2]");
}

}  // namespace

double escape_time(double h, double sigma, double alpha) {
  if (!(h >= 0.0)) throw ParameterError("barrier height must be >= 0");
  if (!(sigma > 0.0)) throw ParameterError("sigma must be > 0");
  check_alpha(alpha);
  return guarded_exp(h / std::pow(sigma, alpha));
}

double escape_ratio(double h, double sigma, double alpha) {
  if (!(h >= 0.0)) throw ParameterError("barrier height must be >= 0");
  if (!(sigma > 0.0)) throw ParameterError("sigma must be > 0");
  check_alpha(alpha);
  double g = std::pow(std::tgamma(1.0 + 2.0 / alpha), alpha / 2.0);
  double gaussian_rate = h / (sigma * sigma);
  double stable_rate = h / std::pow(sigma, alpha) * g;
  double exponent;
  if (std::isinf(gaussian_rate) && std::isinf(stable_rate))
    // sigma so small both rates overflow: 1/sigma^2 dominates 1/sigma^alpha
    // for alpha < 2, and at alpha = 2 the rates cancel exactly (g = 1).
    exponent = alpha < 2.0 ? kInf : 0.0;
  else
    exponent = gaussian_rate - stable_rate;
  return guarded_exp(exponent);
}

double suboptimality_factor(double lambda_max, double eta, double alpha) {
  if (!(lambda_max > 0.0)) throw ParameterError("lambda_max must be > 0");
  if (!(eta > 0.0)) throw ParameterError("eta must be > 0");
  check_alpha(alpha);
  return std::pow(lambda_max * eta / 2.0, 2.0 - alpha);
}

double early_acceleration_ratio(double gamma, double alpha_t, double t) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("gamma must be in (0, 1)");
  if (!(alpha_t > 1.0 && alpha_t <= 2.0)) throw ParameterError("alpha_t must be in (1, 2]");
  if (!(t >= 1.0)) throw ParameterError("horizon must be >= 1");
  return std::pow(t, gamma - std::min(gamma, 1.0 - 1.0 / alpha_t));
}

double convergence_bound(const BoundInputs& in, const std::function<double(uint64_t)>& sigma_at,
                         const std::function<double(uint64_t)>& alpha_at) {
  if (in.horizon < 1) throw ParameterError("horizon must be >= 1");
  if (!(in.gamma > 0.0 && in.gamma < 1.0)) throw ParameterError("gamma must be in (0, 1)");
  if (!(in.init_dist >= 0.0)) throw ParameterError("init_dist must be >= 0");
  const double t_final = static_cast<double>(in.horizon);
  double sum = 0.0;
  for (uint64_t t = 1; t <= in.horizon; ++t) {
    double a = alpha_at(t);
    check_alpha(a);
    sum += std::pow(sigma_at(t), a) / std::pow(static_cast<double>(t), in.gamma);
  }
  double alpha_final = alpha_at(in.horizon);
  double prefactor_exp = std::min(in.gamma, 1.0 - 1.0 / alpha_final);
  return in.init_dist * in.init_dist / std::pow(t_final, in.gamma) +
         in.c_alpha / std::pow(t_final, prefactor_exp) * sum;
}

double sgd_convergence_bound(double init_dist, double sigma, double gamma, uint64_t horizon) {
  if (horizon < 1) throw ParameterError("horizon must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("gamma must be in (0, 1)");
  if (!(init_dist >= 0.0)) throw ParameterError("init_dist must be >= 0");
  if (!(sigma >= 0.0)) throw ParameterError("sigma must be >= 0");
  const double t_final = static_cast<double>(horizon);
  double sum = 0.0;
  for (uint64_t t = 1; t <= horizon; ++t) sum += 1.0 / std::pow(static_cast<double>(t), gamma);
  return (init_dist * init_dist + sigma * sigma * sum) / std::pow(t_final, gamma);
}

}  // namespace ahtsgd
