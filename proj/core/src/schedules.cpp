#include "ahtsgd/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ahtsgd/errors.hpp"

namespace ahtsgd {

AlphaSchedule adaptive_alpha_step(AlphaSchedule sched, double ema_sharpness) {
  double z = 1.0 / (1.0 + std::exp(-sched.v * (ema_sharpness - sched.c)));
  double alpha_raw = sched.alpha_min + (sched.alpha_max - sched.alpha_min) * z;
  sched.alpha += sched.lambda * (alpha_raw - sched.alpha);
  sched.alpha = std::clamp(sched.alpha, sched.alpha_min, sched.alpha_max);
  return sched;
}

double annealing_alpha(double k, double t) {
  if (!(k > 0.0)) throw ParameterError("annealing rate k must be > 0, got " + std::to_string(k));
  return 2.0 - std::exp(-k * t);
}

double noise_sigma(const NoiseScale& ns) {
  return std::sqrt(ns.noise_init) / std::pow(1.0 + static_cast<double>(ns.t), ns.gamma / 2.0);
}

}  // namespace ahtsgd
