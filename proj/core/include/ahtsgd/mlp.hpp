#ifndef AHTSGD_MLP_HPP
#define AHTSGD_MLP_HPP

#include <Eigen/Core>
#include <vector>

#include "ahtsgd/objectives.hpp"

namespace ahtsgd {

class RngStream;

// Fully connected ReLU classifier with softmax cross-entropy, mean-reduced
// over the batch. layer_sizes lists input, hidden, and class counts; the
// default is the 3-weight-layer MNIST shape.
struct MlpSpec {
  enum class Init { zeros, kaiming_uniform };
  std::vector<Eigen::Index> layer_sizes{784, 256, 128, 10};
  Init init = Init::kaiming_uniform;
};

// Parameters live in one flat vector packed [W1, b1, W2, b2, ...] with each
// W stored column-major. Gradients are exact reverse-mode; relu'(0) = 0, so
// an all-zero parameter vector leaves every hidden weight and bias with an
// exactly zero gradient (only the output bias moves).
class MlpObjective final : public Objective {
 public:
  explicit MlpObjective(MlpSpec spec);

  Eigen::Index dim() const override { return dim_; }
  double loss(const Eigen::VectorXd& theta, const Batch& batch) const override;
  Eigen::VectorXd grad(const Eigen::VectorXd& theta, const Batch& batch) const override;
  std::pair<double, Eigen::VectorXd> loss_grad(const Eigen::VectorXd& theta,
                                               const Batch& batch) const override;

  // Fresh parameters: all zeros, or Kaiming-uniform weights on
  // [-sqrt(6/fan_in), +sqrt(6/fan_in)] with zero biases.
  Eigen::VectorXd init_theta(RngStream& rng) const;

  // Pre-softmax outputs, one column per sample.
  Eigen::MatrixXd logits(const Eigen::VectorXd& theta, const Eigen::MatrixXd& x) const;

  // Argmax classification accuracy; ties break to the lowest class index.
  double accuracy(const Eigen::VectorXd& theta, const Batch& batch) const;

  const MlpSpec& spec() const { return spec_; }
  Eigen::Index num_layers() const { return static_cast<Eigen::Index>(spec_.layer_sizes.size()) - 1; }

 private:
  void check_batch(const Eigen::VectorXd& theta, const Batch& batch) const;

  MlpSpec spec_;
  std::vector<Eigen::Index> w_off_, b_off_;
  Eigen::Index dim_ = 0;
};

}  // namespace ahtsgd

#endif  // AHTSGD_MLP_HPP
