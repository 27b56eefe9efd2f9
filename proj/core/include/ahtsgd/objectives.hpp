#ifndef AHTSGD_OBJECTIVES_HPP
#define AHTSGD_OBJECTIVES_HPP

#include <Eigen/Core>
#include <utility>

namespace ahtsgd {

// Mini-batch of supervised data: x holds one example per column, y the
// integer labels. Synthetic objectives ignore it; Batch{} is fine there.
struct Batch {
  Eigen::MatrixXd x;
  Eigen::VectorXi y;
  Eigen::Index size() const { return x.cols(); }
};

// Differentiable function contract: value, gradient and Hessian-vector
// product over a flat parameter vector. grad must match central finite
// differences of loss, and hvp must match fd_hvp of grad; the default hvp
// is exactly that central difference.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual Eigen::Index dim() const = 0;
  virtual double loss(const Eigen::VectorXd& theta, const Batch& batch) const = 0;
  virtual Eigen::VectorXd grad(const Eigen::VectorXd& theta, const Batch& batch) const = 0;

  // Overridden where one pass yields both.
  virtual std::pair<double, Eigen::VectorXd> loss_grad(const Eigen::VectorXd& theta,
                                                       const Batch& batch) const {
    return {loss(theta, batch), grad(theta, batch)};
  }

  virtual Eigen::VectorXd hvp(const Eigen::VectorXd& theta, const Eigen::VectorXd& v,
                              const Batch& batch) const;
};

// f(theta) = 0.5 theta' A theta + b' theta, constant Hessian A. The
// workhorse of the curvature tests: trace and spectrum are known exactly.
class QuadraticObjective : public Objective {
 public:
  explicit QuadraticObjective(Eigen::MatrixXd a, Eigen::VectorXd b = Eigen::VectorXd());

  Eigen::Index dim() const override { return a_.rows(); }
  double loss(const Eigen::VectorXd& theta, const Batch&) const override;
  Eigen::VectorXd grad(const Eigen::VectorXd& theta, const Batch&) const override;
  Eigen::VectorXd hvp(const Eigen::VectorXd&, const Eigen::VectorXd& v, const Batch&) const override;

  const Eigen::MatrixXd& matrix() const { return a_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
};

// The Ackley benchmark in the standard form
//   f(x) = -a exp(-b sqrt(mean x_i^2)) - exp(mean cos(2 pi x_i)) + a + e
// with a = 20, b = 0.2. Global minimum f(0) = 0, local minima spaced
// roughly one unit apart, symmetric under sign flips and coordinate
// permutations. The radial term is not differentiable at the origin; the
// gradient there is defined as 0.
class AckleyObjective : public Objective {
 public:
  explicit AckleyObjective(Eigen::Index dim) : dim_(dim) {}

  Eigen::Index dim() const override { return dim_; }
  double loss(const Eigen::VectorXd& x, const Batch&) const override;
  Eigen::VectorXd grad(const Eigen::VectorXd& x, const Batch&) const override;

 private:
  Eigen::Index dim_;
};

// 1D-per-coordinate double-well potential
//   u(x) = H ((phi(x))^2 - 1)^2,  phi(x) = s x for x < 0, x otherwise,
// summed over coordinates. Sharp narrow minimum at x = -1/s with
// curvature 8 H s^2, wide minimum at x = +1 with curvature 8 H, barrier
// top at x = 0 sitting exactly H above both minima. s = sqrt(sharpness_ratio).
class DoubleWellObjective : public Objective {
 public:
  explicit DoubleWellObjective(double barrier_height, double sharpness_ratio = 10.0,
                               Eigen::Index dim = 1);

  Eigen::Index dim() const override { return dim_; }
  double loss(const Eigen::VectorXd& x, const Batch&) const override;
  Eigen::VectorXd grad(const Eigen::VectorXd& x, const Batch&) const override;
  Eigen::VectorXd hvp(const Eigen::VectorXd& x, const Eigen::VectorXd& v, const Batch&) const override;

  double barrier_height() const { return h_; }
  double sharp_minimum() const { return -1.0 / s_; }   // location, per coordinate
  double wide_minimum() const { return 1.0; }
  double barrier_top() const { return 0.0; }
  double curvature_at(double x) const;

 private:
  double h_;
  double s_;
  Eigen::Index dim_;
};

}  // namespace ahtsgd

#endif  // AHTSGD_OBJECTIVES_HPP
