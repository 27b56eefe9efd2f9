#ifndef AHTSGD_OPTIMIZER_HPP
#define AHTSGD_OPTIMIZER_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "ahtsgd/curvature.hpp"
#include "ahtsgd/objectives.hpp"
#include "ahtsgd/rng.hpp"
#include "ahtsgd/schedules.hpp"

namespace ahtsgd {

// The four update rules sharing one step interface: plain SGD, SGD with
// Gaussian (Langevin) noise, SGD with fixed-tail-index stable noise, and
// the adaptive heavy-tailed variant whose tail index tracks sharpness.
enum class Method { sgd, sgld, levy_fixed, ahtsgd };

Method parse_method(const std::string& name);  // throws ParameterError on unknown names
const char* method_name(Method m);

struct OptimizerConfig {
  Method method = Method::sgd;
  double eta = 0.01;
  uint64_t seed = 0;

  double fixed_alpha = 1.5;      // levy_fixed only
  AlphaSchedule alpha_schedule;  // ahtsgd only
  NoiseScale noise_scale;        // scale schedule for levy_fixed and ahtsgd

  double momentum = 0.0;
  double weight_decay = 0.0;

  // Sharpness probing (ahtsgd): probes per measurement, measurement cadence
  // in steps (0 disables probing entirely — annealing mode does not consume
  // the signal), and the EMA rate.
  int probes_per_step = 1;
  uint64_t probe_every = 1;
  double rho = 0.05;

  // Adaptive mode with c_auto calibrates the sigmoid midpoint c to the
  // median of the first warmup_steps sharpness readings, holding the tail
  // index at alpha_min until calibration completes.
  bool c_auto = true;
  int warmup_steps = 50;
};

// Everything measured during one step. alpha_used/sigma_used describe the
// noise path (baselines report the Gaussian-limit convention alpha = 2;
// sgld reports its sqrt(2*eta) multiplier as sigma). noise_norm is the norm
// of the injected perturbation after all scaling; grad_norm is the raw
// objective gradient norm before weight decay.
struct StepReport {
  double loss = 0.0;
  double grad_norm = 0.0;
  double alpha_used = 0.0;
  double sigma_used = 0.0;
  double noise_norm = 0.0;
  double sharpness_raw = 0.0;
  double sharpness_ema = 0.0;
};

// Stateless single updates. All throw NumericError on non-finite gradients
// (theta is left untouched since the update never happens).
Eigen::VectorXd step_sgd(const Eigen::VectorXd& theta, const Eigen::VectorXd& grad, double eta);

// theta - eta*grad + sqrt(2*eta)*N(0, I).
Eigen::VectorXd step_sgld(const Eigen::VectorXd& theta, const Eigen::VectorXd& grad, double eta,
                          RngStream& rng);

// theta - eta*grad + eta^(1/alpha)*L with L i.i.d. alpha-stable of scale
// sigma per coordinate. sigma = 0 reduces bitwise to step_sgd.
Eigen::VectorXd step_levy(const Eigen::VectorXd& theta, const Eigen::VectorXd& grad, double eta,
                          double alpha, double sigma, RngStream& rng);

// The noise premultiplier eta^(1/alpha): smaller for heavier tails.
double levy_premultiplier(double eta, double alpha);

// One training run's update engine. Owns the parameter vector, the momentum
// buffer, the schedule state, and two private random streams (noise and
// probes), all derived from config.seed. Per step, in order: evaluate loss
// and gradient at theta; measure sharpness at the same pre-update theta;
// update the EMA and the tail index; compute the decayed scale; draw noise;
// apply the update (noise bypasses the momentum buffer).
class Optimizer {
 public:
  Optimizer(OptimizerConfig cfg, Eigen::VectorXd theta0);

  StepReport step(const Objective& obj, const Batch& batch);

  const Eigen::VectorXd& theta() const { return theta_; }

  // Constraint handling for bounded search domains; call between steps.
  // clamp projects onto the box [lo, hi]^dim; reflect folds overshoot back
  // across the walls instead (billiard boundary), which avoids pinning
  // long jumps at the corners.
  void clamp(double lo, double hi) { theta_ = theta_.cwiseMax(lo).cwiseMin(hi); }
  void reflect(double lo, double hi);

  uint64_t step_count() const { return t_; }
  double alpha() const;
  const SharpnessState& sharpness() const { return sharp_; }
  const OptimizerConfig& config() const { return cfg_; }

  // Sigmoid midpoint in effect (differs from the config value only until
  // c_auto calibration has finished).
  double effective_c() const { return alpha_sched_.c; }
  bool calibrating() const { return calibrating_; }

 private:
  double update_alpha();
  void measure_sharpness(const Objective& obj, const Batch& batch);

  OptimizerConfig cfg_;
  Eigen::VectorXd theta_;
  Eigen::VectorXd momentum_buf_;
  AlphaSchedule alpha_sched_;
  NoiseScale noise_;
  SharpnessState sharp_;
  RngStream noise_rng_;
  RngStream probe_rng_;
  uint64_t t_ = 0;
  bool calibrating_ = false;
  std::vector<double> warmup_s_;
};

}  // namespace ahtsgd

#endif  // AHTSGD_OPTIMIZER_HPP
