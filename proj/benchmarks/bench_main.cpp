// Microbenchmarks for the library hot paths.  These are not run by ctest;
// build the ahtsgd_bench target and run it directly.

#include <benchmark/benchmark.h>

#include "ahtsgd/curvature.hpp"
#include "ahtsgd/mlp.hpp"
#include "ahtsgd/objectives.hpp"
#include "ahtsgd/optimizer.hpp"
#include "ahtsgd/rng.hpp"
#include "ahtsgd/stable_noise.hpp"

namespace {

// Draw one standard stable deviate per iteration across the alpha range the
// optimizer actually visits.
void BM_StableSample(benchmark::State& state) {
  const double alpha = static_cast<double>(state.range(0)) / 100.0;
  ahtsgd::RngStream rng(42, ahtsgd::stream_ids::kNoise);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ahtsgd::sample_standard(alpha, rng));
  }
}
BENCHMARK(BM_StableSample)->Arg(120)->Arg(150)->Arg(180)->Arg(200);

// Vector-valued sampling at the dimensionality of the 784-256-128-10 MLP.
void BM_StableSampleVector(benchmark::State& state) {
  ahtsgd::RngStream rng(42, ahtsgd::stream_ids::kNoise);
  const ahtsgd::StableNoiseParams params(1.5, 0.01);
  for (auto _ : state) {
    Eigen::VectorXd out = ahtsgd::sample_vector(params, 235146, rng);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_StableSampleVector);

ahtsgd::Batch random_batch(Eigen::Index batch) {
  ahtsgd::RngStream rng(7, ahtsgd::stream_ids::kExperiment);
  ahtsgd::Batch b;
  b.x.resize(784, batch);
  b.y.resize(batch);
  for (Eigen::Index j = 0; j < batch; ++j) {
    for (Eigen::Index i = 0; i < 784; ++i) b.x(i, j) = rng.uniform01();
    b.y[j] = static_cast<int>(rng.bounded_u64(10));
  }
  return b;
}

// Forward + backward through the default network at the training batch size.
void BM_MlpLossGrad(benchmark::State& state) {
  ahtsgd::MlpObjective net{ahtsgd::MlpSpec{}};
  ahtsgd::Batch b = random_batch(state.range(0));
  ahtsgd::RngStream rng(3, ahtsgd::stream_ids::kInit);
  Eigen::VectorXd theta = net.init_theta(rng);
  for (auto _ : state) {
    auto [loss, grad] = net.loss_grad(theta, b);
    benchmark::DoNotOptimize(loss);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_MlpLossGrad)->Arg(64)->Arg(256);

// One Hutchinson trace probe (two extra gradient evaluations via the
// finite-difference Hessian-vector product) on the same network.
void BM_HutchinsonProbe(benchmark::State& state) {
  ahtsgd::MlpObjective net{ahtsgd::MlpSpec{}};
  ahtsgd::Batch b = random_batch(64);
  ahtsgd::RngStream init(3, ahtsgd::stream_ids::kInit);
  Eigen::VectorXd theta = net.init_theta(init);
  ahtsgd::RngStream probe(3, ahtsgd::stream_ids::kProbe);
  ahtsgd::HvpOracle hvp = [&](const Eigen::VectorXd& p, const Eigen::VectorXd& v) {
    return net.hvp(p, v, b);
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(ahtsgd::hutchinson_trace(hvp, theta, 1, probe));
  }
}
BENCHMARK(BM_HutchinsonProbe);

// Full optimizer step on a mid-sized quadratic: the noise-injection and
// bookkeeping overhead of each method, without network cost.
void BM_OptimizerStep(benchmark::State& state) {
  const auto method = static_cast<ahtsgd::Method>(state.range(0));
  const Eigen::Index dim = 1000;
  ahtsgd::QuadraticObjective quad{Eigen::MatrixXd::Identity(dim, dim)};
  ahtsgd::OptimizerConfig cfg;
  cfg.method = method;
  cfg.seed = 11;
  ahtsgd::Optimizer opt(cfg, Eigen::VectorXd::Ones(dim));
  const ahtsgd::Batch empty;
  for (auto _ : state) {
    auto rep = opt.step(quad, empty);
    benchmark::DoNotOptimize(rep.loss);
  }
}
BENCHMARK(BM_OptimizerStep)
    ->Arg(static_cast<int>(ahtsgd::Method::sgd))
    ->Arg(static_cast<int>(ahtsgd::Method::levy_fixed))
    ->Arg(static_cast<int>(ahtsgd::Method::ahtsgd));

}  // namespace

BENCHMARK_MAIN();
