#include "ahtsgd/objectives.hpp"

#include <cmath>

#include "ahtsgd/curvature.hpp"
#include "ahtsgd/errors.hpp"

namespace ahtsgd {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kAckleyA = 20.0;
constexpr double kAckleyB = 0.2;

}  // namespace

Eigen::VectorXd Objective::hvp(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                               const Batch& batch) const {
  return fd_hvp([this, &batch](const Eigen::VectorXd& t) { return grad(t, batch); }, theta, v);
}

QuadraticObjective::QuadraticObjective(Eigen::MatrixXd a, Eigen::VectorXd b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols()) throw ParameterError("quadratic matrix must be square");
  if (b_.size() == 0) b_ = Eigen::VectorXd::Zero(a_.rows());
  if (b_.size() != a_.rows()) throw ParameterError("quadratic linear term dimension mismatch");
}

double QuadraticObjective::loss(const Eigen::VectorXd& theta, const Batch&) const {
  return 0.5 * theta.dot(a_ * theta) + b_.dot(theta);
}

Eigen::VectorXd QuadraticObjective::grad(const Eigen::VectorXd& theta, const Batch&) const {
  return a_ * theta + b_;
}

Eigen::VectorXd QuadraticObjective::hvp(const Eigen::VectorXd&, const Eigen::VectorXd& v,
                                        const Batch&) const {
  return a_ * v;
}

double AckleyObjective::loss(const Eigen::VectorXd& x, const Batch&) const {
  const double n = static_cast<double>(x.size());
  double rms = std::sqrt(x.squaredNorm() / n);
  double mean_cos = x.array().unaryExpr([](double xi) { return std::cos(kTwoPi * xi); }).mean();
  return -kAckleyA * std::exp(-kAckleyB * rms) - std::exp(mean_cos) + kAckleyA + std::exp(1.0);
}

Eigen::VectorXd AckleyObjective::grad(const Eigen::VectorXd& x, const Batch&) const {
  const double n = static_cast<double>(x.size());
  double rms = std::sqrt(x.squaredNorm() / n);
  double mean_cos = x.array().unaryExpr([](double xi) { return std::cos(kTwoPi * xi); }).mean();
  Eigen::VectorXd g(x.size());
  double radial = rms > 0.0 ? kAckleyA * kAckleyB * std::exp(-kAckleyB * rms) / (n * rms) : 0.0;
  double oscillatory = std::exp(mean_cos) * kTwoPi / n;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    g[i] = radial * x[i] + oscillatory * std::sin(kTwoPi * x[i]);
  return g;
}

DoubleWellObjective::DoubleWellObjective(double barrier_height, double sharpness_ratio,
                                         Eigen::Index dim)
    : h_(barrier_height), s_(std::sqrt(sharpness_ratio)), dim_(dim) {
  if (!(barrier_height > 0.0)) throw ParameterError("double-well barrier height must be > 0");
  if (!(sharpness_ratio >= 1.0)) throw ParameterError("double-well sharpness ratio must be >= 1");
}

double DoubleWellObjective::loss(const Eigen::VectorXd& x, const Batch&) const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double phi = x[i] < 0.0 ? s_ * x[i] : x[i];
    double q = phi * phi - 1.0;
    acc += h_ * q * q;
  }
  return acc;
}

Eigen::VectorXd DoubleWellObjective::grad(const Eigen::VectorXd& x, const Batch&) const {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double dphi = x[i] < 0.0 ? s_ : 1.0;
    double phi = dphi * x[i];
    g[i] = 4.0 * h_ * phi * (phi * phi - 1.0) * dphi;
  }
  return g;
}

Eigen::VectorXd DoubleWellObjective::hvp(const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                                         const Batch&) const {
  // Hessian is diagonal: u''(x_i) = 4 H phi'^2 (3 phi^2 - 1) per piece.
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = curvature_at(x[i]) * v[i];
  return out;
}

double DoubleWellObjective::curvature_at(double x) const {
  double dphi = x < 0.0 ? s_ : 1.0;
  double phi = dphi * x;
  return 4.0 * h_ * dphi * dphi * (3.0 * phi * phi - 1.0);
}

}  // namespace ahtsgd
