#ifndef AHTSGD_SCHEDULES_HPP
#define AHTSGD_SCHEDULES_HPP

#include <cstdint>

namespace ahtsgd {

// Controller for the time-varying tail index alpha_t.
//
// adaptive mode squashes the EMA-smoothed sharpness through a sigmoid
//   z = 1 / (1 + exp(-v * (ema - c)))
// maps it linearly onto [alpha_min, alpha_max] and moves alpha a fraction
// lambda of the way toward that target each step. annealing mode is the
// closed form alpha_t = 2 - exp(-k t).
struct AlphaSchedule {
  enum class Mode { adaptive, annealing };

  Mode mode = Mode::adaptive;
  double alpha = 1.0;  // current tail index, always in [alpha_min, alpha_max]
  double alpha_min = 1.0;
  double alpha_max = 2.0;
  double v = 2.0;       // sigmoid steepness
  double c = 0.0;       // sigmoid midpoint, in log-sharpness units
  double lambda = 0.1;  // incremental smoothing rate, in (0, 1]
  double k = 0.1;       // annealing decay rate
};

// One adaptive update. Saturates cleanly for extreme ema values (z
// clamps to 0 or 1 through IEEE semantics); the returned alpha stays in
// [alpha_min, alpha_max].
AlphaSchedule adaptive_alpha_step(AlphaSchedule sched, double ema_sharpness);

// alpha_t = 2 - exp(-k t), in [1, 2), nondecreasing in t. k must be > 0.
double annealing_alpha(double k, double t);

// Decaying noise scale sigma(t) = sqrt(noise_init) / (1 + t)^(gamma/2).
struct NoiseScale {
  double noise_init = 0.0;  // initial variance-like scale
  double gamma = 0.55;      // decay exponent
  uint64_t t = 0;           // global step count
};

double noise_sigma(const NoiseScale& ns);

}  // namespace ahtsgd

#endif  // AHTSGD_SCHEDULES_HPP
