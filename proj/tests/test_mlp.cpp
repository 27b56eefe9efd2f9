#include "ahtsgd/mlp.hpp"

#include <doctest.h>

#include <cmath>

#include "ahtsgd/curvature.hpp"
#include "ahtsgd/errors.hpp"
#include "ahtsgd/rng.hpp"

using namespace ahtsgd;

namespace {

// Small network + synthetic batch keep every case fast while exercising the
// same code paths as the full-size model.
MlpSpec small_spec(MlpSpec::Init init) {
  MlpSpec spec;
  spec.layer_sizes = {8, 7, 5, 3};
  spec.init = init;
  return spec;
}

Batch synthetic_batch(Eigen::Index features, Eigen::Index n, int classes, uint64_t seed) {
  RngStream rng(seed);
  Batch b;
  b.x.resize(features, n);
  b.y.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < features; ++i) b.x(i, j) = rng.gaussian();
    b.y[j] = static_cast<int>(rng.bounded_u64(static_cast<uint64_t>(classes)));
  }
  return b;
}

}  // namespace

TEST_CASE("zero initialization gives the uniform-prediction loss exactly") {
  MlpObjective net(small_spec(MlpSpec::Init::zeros));
  Batch b = synthetic_batch(8, 16, 3, 1);
  RngStream rng(0, stream_ids::kInit);
  Eigen::VectorXd theta = net.init_theta(rng);
  CHECK(theta.isZero(0.0));
  // All logits are zero, so every class gets probability 1/3.
  CHECK(net.loss(theta, b) == doctest::Approx(std::log(3.0)).epsilon(1e-14));

  MlpSpec ten = small_spec(MlpSpec::Init::zeros);
  ten.layer_sizes = {12, 6, 10};
  MlpObjective net10(ten);
  Batch b10 = synthetic_batch(12, 8, 10, 2);
  Eigen::VectorXd theta10 = Eigen::VectorXd::Zero(net10.dim());
  CHECK(net10.loss(theta10, b10) == doctest::Approx(2.302585092994046).epsilon(1e-14));
}

TEST_CASE("at zero parameters only the output bias receives gradient") {
  // ReLU of a zero pre-activation is zero, so hidden activations vanish and
  // with them every weight gradient; the softmax residual lands exactly and
  // only on the final bias. This is what keeps noise-free SGD pinned at the
  // zero-logit baseline.
  MlpObjective net(small_spec(MlpSpec::Init::zeros));
  Batch b = synthetic_batch(8, 32, 3, 3);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(net.dim());
  Eigen::VectorXd g = net.grad(theta, b);

  const Eigen::Index out_bias = 3;  // last layer width
  CHECK(g.head(net.dim() - out_bias).isZero(0.0));
  CHECK(g.tail(out_bias).norm() > 0.0);
  // The bias gradient is softmax(0) minus the empirical label frequencies.
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(out_bias);
  for (Eigen::Index j = 0; j < b.y.size(); ++j) counts[b.y[j]] += 1.0;
  Eigen::VectorXd expected =
      Eigen::VectorXd::Constant(out_bias, 1.0 / 3.0) - counts / static_cast<double>(b.size());
  CHECK((g.tail(out_bias) - expected).norm() < 1e-14);
}

TEST_CASE("gradient matches central finite differences in 100 directions") {
  MlpObjective net(small_spec(MlpSpec::Init::kaiming_uniform));
  Batch b = synthetic_batch(8, 12, 3, 5);
  RngStream init(7, stream_ids::kInit);
  Eigen::VectorXd theta = net.init_theta(init);

  auto [loss, grad] = net.loss_grad(theta, b);
  CHECK(loss == doctest::Approx(net.loss(theta, b)).epsilon(1e-14));

  RngStream dirs(11);
  const double eps = 1e-6;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd v(net.dim());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dirs.gaussian();
    v.normalize();
    double fd = (net.loss(theta + eps * v, b) - net.loss(theta - eps * v, b)) / (2.0 * eps);
    CHECK(grad.dot(v) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("finite-difference HVP is consistent with the gradient field") {
  MlpObjective net(small_spec(MlpSpec::Init::kaiming_uniform));
  Batch b = synthetic_batch(8, 12, 3, 6);
  RngStream init(9, stream_ids::kInit);
  Eigen::VectorXd theta = net.init_theta(init);

  // Symmetry of the Hessian: u' H v == v' H u for the default fd-based HVP.
  RngStream dirs(13);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::VectorXd u(net.dim()), v(net.dim());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      u[i] = dirs.gaussian();
      v[i] = dirs.gaussian();
    }
    double uhv = u.dot(net.hvp(theta, v, b));
    double vhu = v.dot(net.hvp(theta, u, b));
    CHECK(uhv == doctest::Approx(vhu).epsilon(5e-4));
  }
}

TEST_CASE("duplicating every sample leaves loss and gradient unchanged") {
  MlpObjective net(small_spec(MlpSpec::Init::kaiming_uniform));
  Batch b = synthetic_batch(8, 10, 3, 8);
  Batch doubled;
  doubled.x.resize(8, 20);
  doubled.y.resize(20);
  doubled.x << b.x, b.x;
  doubled.y << b.y, b.y;

  RngStream init(3, stream_ids::kInit);
  Eigen::VectorXd theta = net.init_theta(init);
  auto [l1, g1] = net.loss_grad(theta, b);
  auto [l2, g2] = net.loss_grad(theta, doubled);
  CHECK(l1 == doctest::Approx(l2).epsilon(1e-14));
  CHECK((g1 - g2).norm() < 1e-14);
}

TEST_CASE("kaiming initialization respects per-layer bounds and zero biases") {
  MlpSpec spec;
  spec.layer_sizes = {784, 256, 128, 10};
  spec.init = MlpSpec::Init::kaiming_uniform;
  MlpObjective net(spec);
  RngStream rng(5, stream_ids::kInit);
  Eigen::VectorXd theta = net.init_theta(rng);
  REQUIRE(theta.size() == net.dim());
  REQUIRE(net.dim() == 784 * 256 + 256 + 256 * 128 + 128 + 128 * 10 + 10);

  // Walk the flat layout: weights for layer l live ahead of its biases.
  Eigen::Index off = 0;
  const Eigen::Index fans[] = {784, 256, 128};
  const Eigen::Index outs[] = {256, 128, 10};
  for (int l = 0; l < 3; ++l) {
    double bound = std::sqrt(6.0 / static_cast<double>(fans[l]));
    Eigen::Index n_w = fans[l] * outs[l];
    double w_max = theta.segment(off, n_w).cwiseAbs().maxCoeff();
    CHECK(w_max <= bound);
    CHECK(w_max > 0.5 * bound);  // the draw actually fills the range
    off += n_w;
    CHECK(theta.segment(off, outs[l]).isZero(0.0));
    off += outs[l];
  }
  CHECK(off == net.dim());

  // Same seed reproduces the vector; a different seed does not.
  RngStream again(5, stream_ids::kInit);
  CHECK((theta - net.init_theta(again)).norm() == 0.0);
  RngStream other(6, stream_ids::kInit);
  CHECK((theta - net.init_theta(other)).norm() > 0.0);
}

TEST_CASE("accuracy breaks logit ties toward the lowest class index") {
  MlpObjective net(small_spec(MlpSpec::Init::zeros));
  Batch b = synthetic_batch(8, 30, 3, 10);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(net.dim());
  // All logits equal: every prediction is class 0.
  double frac0 = 0.0;
  for (Eigen::Index j = 0; j < b.y.size(); ++j) frac0 += b.y[j] == 0;
  frac0 /= static_cast<double>(b.size());
  CHECK(net.accuracy(theta, b) == doctest::Approx(frac0).epsilon(1e-14));
}

TEST_CASE("batch validation rejects malformed inputs") {
  MlpObjective net(small_spec(MlpSpec::Init::zeros));
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(net.dim());

  Batch wrong_features = synthetic_batch(9, 4, 3, 11);
  CHECK_THROWS_AS(net.loss(theta, wrong_features), ParameterError);

  Batch bad_label = synthetic_batch(8, 4, 3, 12);
  bad_label.y[2] = 3;  // classes are 0..2
  CHECK_THROWS_AS(net.loss(theta, bad_label), ParameterError);
  bad_label.y[2] = -1;
  CHECK_THROWS_AS(net.loss(theta, bad_label), ParameterError);

  Batch count_mismatch = synthetic_batch(8, 4, 3, 13);
  count_mismatch.y.resize(3);
  CHECK_THROWS_AS(net.loss(theta, count_mismatch), ParameterError);

  Eigen::VectorXd short_theta = Eigen::VectorXd::Zero(net.dim() - 1);
  Batch ok = synthetic_batch(8, 4, 3, 14);
  CHECK_THROWS_AS(net.loss(short_theta, ok), ParameterError);

  Batch empty;
  empty.x.resize(8, 0);
  empty.y.resize(0);
  CHECK_THROWS_AS(net.accuracy(theta, empty), ParameterError);
}

TEST_CASE("spec validation rejects degenerate layer lists") {
  MlpSpec too_short;
  too_short.layer_sizes = {5};
  CHECK_THROWS_AS(MlpObjective{too_short}, ParameterError);
  MlpSpec zero_width;
  zero_width.layer_sizes = {5, 0, 3};
  CHECK_THROWS_AS(MlpObjective{zero_width}, ParameterError);
}
