#include "ahtsgd/mlp.hpp"

#include <cmath>
#include <utility>

#include "ahtsgd/errors.hpp"
#include "ahtsgd/rng.hpp"

namespace ahtsgd {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

using ConstWMap = Eigen::Map<const MatrixXd>;
using ConstBMap = Eigen::Map<const VectorXd>;
using WMap = Eigen::Map<MatrixXd>;
using BMap = Eigen::Map<VectorXd>;

Index argmax_lowest(const Eigen::Ref<const VectorXd>& col) {
  Index best = 0;
  for (Index i = 1; i < col.size(); ++i)
    if (col[i] > col[best]) best = i;
  return best;
}

}  // namespace

MlpObjective::MlpObjective(MlpSpec spec) : spec_(std::move(spec)) {
  const auto& ls = spec_.layer_sizes;
  if (ls.size() < 2) throw ParameterError("mlp needs at least one weight layer");
  for (Index n : ls)
    if (n < 1) throw ParameterError("mlp layer sizes must be >= 1");
  for (size_t l = 0; l + 1 < ls.size(); ++l) {
    w_off_.push_back(dim_);
    dim_ += ls[l + 1] * ls[l];
    b_off_.push_back(dim_);
    dim_ += ls[l + 1];
  }
}

void MlpObjective::check_batch(const VectorXd& theta, const Batch& batch) const {
  if (theta.size() != dim_) throw ParameterError("mlp parameter vector has wrong dimension");
  if (batch.x.rows() != spec_.layer_sizes.front())
    throw ParameterError("mlp batch feature dimension mismatch");
  if (batch.y.size() != batch.x.cols()) throw ParameterError("mlp batch label count mismatch");
  const int classes = static_cast<int>(spec_.layer_sizes.back());
  for (Index j = 0; j < batch.y.size(); ++j)
    if (batch.y[j] < 0 || batch.y[j] >= classes)
      throw ParameterError("mlp label out of range");
}

MatrixXd MlpObjective::logits(const VectorXd& theta, const MatrixXd& x) const {
  const auto& ls = spec_.layer_sizes;
  MatrixXd a = x;
  for (Index l = 0; l < num_layers(); ++l) {
    ConstWMap w(theta.data() + w_off_[l], ls[l + 1], ls[l]);
    ConstBMap b(theta.data() + b_off_[l], ls[l + 1]);
    MatrixXd z = (w * a).colwise() + b;
    if (l + 1 < num_layers())
      a = z.cwiseMax(0.0);
    else
      a = std::move(z);
  }
  return a;
}

double MlpObjective::loss(const VectorXd& theta, const Batch& batch) const {
  check_batch(theta, batch);
  MatrixXd z = logits(theta, batch.x);
  double acc = 0.0;
  for (Index j = 0; j < z.cols(); ++j) {
    double m = z.col(j).maxCoeff();
    double lse = m + std::log((z.col(j).array() - m).exp().sum());
    acc += lse - z(batch.y[j], j);
  }
  return acc / static_cast<double>(z.cols());
}

std::pair<double, VectorXd> MlpObjective::loss_grad(const VectorXd& theta,
                                                    const Batch& batch) const {
  check_batch(theta, batch);
  const auto& ls = spec_.layer_sizes;
  const Index n_layers = num_layers();
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  // Forward, keeping post-activation values for the backward pass.
  std::vector<MatrixXd> acts;  // acts[l] feeds weight layer l
  acts.reserve(n_layers);
  acts.push_back(batch.x);
  MatrixXd z;
  for (Index l = 0; l < n_layers; ++l) {
    ConstWMap w(theta.data() + w_off_[l], ls[l + 1], ls[l]);
    ConstBMap b(theta.data() + b_off_[l], ls[l + 1]);
    z = (w * acts.back()).colwise() + b;
    if (l + 1 < n_layers) acts.push_back(z.cwiseMax(0.0));
  }

  // Softmax cross-entropy on the final pre-activations, mean over the batch.
  double loss_acc = 0.0;
  MatrixXd delta(z.rows(), z.cols());
  for (Index j = 0; j < z.cols(); ++j) {
    double m = z.col(j).maxCoeff();
    VectorXd e = (z.col(j).array() - m).exp();
    double sum = e.sum();
    loss_acc += m + std::log(sum) - z(batch.y[j], j);
    delta.col(j) = e * (inv_b / sum);
    delta(batch.y[j], j) -= inv_b;
  }

  // Backward: relu'(z) = [z > 0] read off the stored post-activations
  // (a > 0 iff z > 0, so relu'(0) = 0 comes out exactly).
  VectorXd g = VectorXd::Zero(dim_);
  for (Index l = n_layers - 1; l >= 0; --l) {
    WMap gw(g.data() + w_off_[l], ls[l + 1], ls[l]);
    BMap gb(g.data() + b_off_[l], ls[l + 1]);
    gw = delta * acts[l].transpose();
    gb = delta.rowwise().sum();
    if (l > 0) {
      ConstWMap w(theta.data() + w_off_[l], ls[l + 1], ls[l]);
      delta = (w.transpose() * delta).cwiseProduct(
          (acts[l].array() > 0.0).cast<double>().matrix());
    }
  }
  return {loss_acc * inv_b, std::move(g)};
}

VectorXd MlpObjective::grad(const VectorXd& theta, const Batch& batch) const {
  return loss_grad(theta, batch).second;
}

VectorXd MlpObjective::init_theta(RngStream& rng) const {
  VectorXd theta = VectorXd::Zero(dim_);
  if (spec_.init == MlpSpec::Init::zeros) return theta;
  const auto& ls = spec_.layer_sizes;
  for (Index l = 0; l < num_layers(); ++l) {
    double bound = std::sqrt(6.0 / static_cast<double>(ls[l]));
    WMap w(theta.data() + w_off_[l], ls[l + 1], ls[l]);
    for (Index k = 0; k < w.size(); ++k) w.data()[k] = rng.uniform(-bound, bound);
  }
  return theta;
}

double MlpObjective::accuracy(const VectorXd& theta, const Batch& batch) const {
  check_batch(theta, batch);
  if (batch.size() == 0) throw ParameterError("accuracy needs a nonempty batch");
  MatrixXd z = logits(theta, batch.x);
  Index hits = 0;
  for (Index j = 0; j < z.cols(); ++j)
    if (argmax_lowest(z.col(j)) == batch.y[j]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(z.cols());
}

}  // namespace ahtsgd
