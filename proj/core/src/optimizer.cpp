#include "ahtsgd/optimizer.hpp"

#include <cmath>
#include <utility>

#include "ahtsgd/errors.hpp"
#include "ahtsgd/stable_noise.hpp"
#include "ahtsgd/stats.hpp"

namespace ahtsgd {

Method parse_method(const std::string& name) {
  if (name == "sgd") return Method::sgd;
  if (name == "sgld") return Method::sgld;
  if (name == "levy_fixed" || name == "levy") return Method::levy_fixed;
  if (name == "ahtsgd") return Method::ahtsgd;
  throw ParameterError("unknown method '" + name + "' (want sgd, sgld, levy_fixed, or ahtsgd)");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::sgd: return "sgd";
    case Method::sgld: return "sgld";
    case Method::levy_fixed: return "levy_fixed";
    case Method::ahtsgd: return "ahtsgd";
  }
  return "?";
}

namespace {

void check_step_inputs(const Eigen::VectorXd& theta, const Eigen::VectorXd& grad, double eta) {
  if (theta.size() != grad.size()) throw ParameterError("theta/grad dimension mismatch");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ParameterError("eta must be finite and >= 0");
  if (!grad.allFinite()) throw NumericError("non-finite gradient in step");
}

}  // namespace

Eigen::VectorXd step_sgd(const Eigen::VectorXd& theta, const Eigen::VectorXd& grad, double eta) {
  check_step_inputs(theta, grad, eta);
  return theta - eta * grad;
}

Eigen::VectorXd step_sgld(const Eigen::VectorXd& theta, const Eigen::VectorXd& grad, double eta,
                          RngStream& rng) {
  check_step_inputs(theta, grad, eta);
  Eigen::VectorXd out = theta - eta * grad;
  double s = std::sqrt(2.0 * eta);
  if (s > 0.0)
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += s * rng.gaussian();
  return out;
}

double levy_premultiplier(double eta, double alpha) {
  if (!(eta >= 0.0)) throw ParameterError("eta must be >= 0");
  if (!(alpha >= 1.0 && alpha <= 2.0)) throw ParameterError("alpha must be in [1, 2]");
  return std::pow(eta, 1.0 / alpha);
}

Eigen::VectorXd step_levy(const Eigen::VectorXd& theta, const Eigen::VectorXd& grad, double eta,
                          double alpha, double sigma, RngStream& rng) {
  check_step_inputs(theta, grad, eta);
  StableNoiseParams params(alpha, sigma);  // validates alpha and sigma
  Eigen::VectorXd out = theta - eta * grad;
  if (sigma > 0.0)
    out += levy_premultiplier(eta, alpha) * sample_vector(params, theta.size(), rng);
  return out;
}

Optimizer::Optimizer(OptimizerConfig cfg, Eigen::VectorXd theta0)
    : cfg_(std::move(cfg)),
      theta_(std::move(theta0)),
      momentum_buf_(Eigen::VectorXd::Zero(theta_.size())),
      alpha_sched_(cfg_.alpha_schedule),
      noise_(cfg_.noise_scale),
      noise_rng_(cfg_.seed, stream_ids::kNoise),
      probe_rng_(cfg_.seed, stream_ids::kProbe) {
  if (!(cfg_.eta > 0.0)) throw ParameterError("eta must be > 0");
  if (cfg_.momentum < 0.0) throw ParameterError("momentum must be >= 0");
  if (cfg_.weight_decay < 0.0) throw ParameterError("weight_decay must be >= 0");
  if (cfg_.probes_per_step < 1 || cfg_.probes_per_step > 3)
    throw ParameterError("probes_per_step must be in [1, 3]");
  if (!(cfg_.rho > 0.0 && cfg_.rho <= 1.0)) throw ParameterError("rho must be in (0, 1]");
  if (cfg_.method == Method::levy_fixed &&
      !(cfg_.fixed_alpha >= 1.0 && cfg_.fixed_alpha <= 2.0))
    throw ParameterError("fixed_alpha must be in [1, 2]");
  sharp_.rho = cfg_.rho;
  sharp_.probes_per_step = cfg_.probes_per_step;

  const bool adaptive = cfg_.method == Method::ahtsgd &&
                        alpha_sched_.mode == AlphaSchedule::Mode::adaptive;
  if (adaptive && cfg_.probe_every == 0)
    throw ParameterError("adaptive tail index needs sharpness probing enabled");
  calibrating_ = adaptive && cfg_.c_auto;
  if (calibrating_) {
    alpha_sched_.alpha = alpha_sched_.alpha_min;
    warmup_s_.reserve(static_cast<std::size_t>(cfg_.warmup_steps));
  }
}

void Optimizer::reflect(double lo, double hi) {
  if (!(hi > lo)) throw ParameterError("reflect needs hi > lo");
  const double period = 2.0 * (hi - lo);
  for (Eigen::Index i = 0; i < theta_.size(); ++i) {
    double y = std::fmod(theta_[i] - lo, period);
    if (y < 0.0) y += period;
    theta_[i] = lo + (y <= hi - lo ? y : period - y);
  }
}

double Optimizer::alpha() const {
  switch (cfg_.method) {
    case Method::sgd:
    case Method::sgld: return 2.0;
    case Method::levy_fixed: return cfg_.fixed_alpha;
    case Method::ahtsgd: return alpha_sched_.alpha;
  }
  return 2.0;
}

void Optimizer::measure_sharpness(const Objective& obj, const Batch& batch) {
  if (cfg_.probe_every == 0 || t_ % cfg_.probe_every != 0) return;
  double s_t;
  try {
    double tr = hutchinson_trace(
        [&](const Eigen::VectorXd& th, const Eigen::VectorXd& v) { return obj.hvp(th, v, batch); },
        theta_, cfg_.probes_per_step, probe_rng_);
    s_t = sharpness_signal(tr);
  } catch (const CurvatureError&) {
    s_t = sharp_.last_raw;  // probe failed; reuse the previous reading and keep going
  }
  sharp_ = update_ema(sharp_, s_t);
  if (calibrating_) {
    warmup_s_.push_back(s_t);
    if (warmup_s_.size() >= static_cast<std::size_t>(cfg_.warmup_steps)) {
      alpha_sched_.c = median(warmup_s_);
      warmup_s_.clear();
      calibrating_ = false;
    }
  }
}

double Optimizer::update_alpha() {
  if (alpha_sched_.mode == AlphaSchedule::Mode::annealing) {
    alpha_sched_.alpha = annealing_alpha(alpha_sched_.k, static_cast<double>(t_));
    return alpha_sched_.alpha;
  }
  if (calibrating_) return alpha_sched_.alpha;  // held at alpha_min during calibration
  alpha_sched_ = adaptive_alpha_step(alpha_sched_, sharp_.ema);
  return alpha_sched_.alpha;
}

StepReport Optimizer::step(const Objective& obj, const Batch& batch) {
  auto [loss, grad] = obj.loss_grad(theta_, batch);
  if (!std::isfinite(loss))
    throw NumericError("non-finite loss at step " + std::to_string(t_));
  if (!grad.allFinite())
    throw NumericError("non-finite gradient at step " + std::to_string(t_));

  StepReport rep;
  rep.loss = loss;
  rep.grad_norm = grad.norm();

  // Sharpness is measured at the pre-update parameters.
  if (cfg_.method == Method::ahtsgd) measure_sharpness(obj, batch);
  rep.sharpness_raw = sharp_.last_raw;
  rep.sharpness_ema = sharp_.ema;

  noise_.t = t_;
  double alpha = 2.0, sigma = 0.0;
  switch (cfg_.method) {
    case Method::sgd: break;
    case Method::sgld: sigma = std::sqrt(2.0 * cfg_.eta); break;
    case Method::levy_fixed:
      alpha = cfg_.fixed_alpha;
      sigma = noise_sigma(noise_);
      break;
    case Method::ahtsgd:
      alpha = update_alpha();
      sigma = noise_sigma(noise_);
      break;
  }
  rep.alpha_used = alpha;
  rep.sigma_used = sigma;

  // Gradient term through the (optional) weight decay and momentum buffer;
  // with momentum = 0 the buffer is exactly the decayed gradient.
  if (cfg_.weight_decay > 0.0)
    momentum_buf_ = cfg_.momentum * momentum_buf_ + grad + cfg_.weight_decay * theta_;
  else
    momentum_buf_ = cfg_.momentum * momentum_buf_ + grad;
  theta_ -= cfg_.eta * momentum_buf_;

  // Noise bypasses the buffer and is added straight to the parameters.
  switch (cfg_.method) {
    case Method::sgd: break;
    case Method::sgld: {
      if (sigma > 0.0) {
        Eigen::VectorXd injected(theta_.size());
        for (Eigen::Index i = 0; i < injected.size(); ++i)
          injected[i] = sigma * noise_rng_.gaussian();
        theta_ += injected;
        rep.noise_norm = injected.norm();
      }
      break;
    }
    case Method::levy_fixed:
    case Method::ahtsgd: {
      if (sigma > 0.0) {
        Eigen::VectorXd injected = levy_premultiplier(cfg_.eta, alpha) *
                                   sample_vector(StableNoiseParams(alpha, sigma), theta_.size(),
                                                 noise_rng_);
        theta_ += injected;
        rep.noise_norm = injected.norm();
      }
      break;
    }
  }

  if (!theta_.allFinite())
    throw NumericError("non-finite parameters after step " + std::to_string(t_));
  ++t_;
  return rep;
}

}  // namespace ahtsgd
