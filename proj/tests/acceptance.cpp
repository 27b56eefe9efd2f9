// Acceptance harness: each numbered check re-derives one headline behavior
// end to end and prints a single [PASS]/[FAIL] line with the measured
// quantities. Run as `ahtsgd_acceptance <n>` with n in 1..11; the process
// exits nonzero when the check fails.
#include <sys/wait.h>

#include <Eigen/Core>
#include <Eigen/QR>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ahtsgd/curvature.hpp"
#include "ahtsgd/data_io.hpp"
#include "ahtsgd/experiments.hpp"
#include "ahtsgd/mlp.hpp"
#include "ahtsgd/objectives.hpp"
#include "ahtsgd/optimizer.hpp"
#include "ahtsgd/rng.hpp"
#include "ahtsgd/schedules.hpp"
#include "ahtsgd/stable_noise.hpp"
#include "ahtsgd/stats.hpp"
#include "ahtsgd/theory.hpp"
#include "testutil.hpp"

using namespace ahtsgd;

namespace {

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

void report(int n, bool pass, const std::string& desc, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", n, desc.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

int run_cli(const std::string& args) {
  std::string cmd = std::string("\"") + AHTSGD_CLI_PATH + "\" " + args;
  int status = std::system(cmd.c_str());
  return (status == -1) ? 127 : WEXITSTATUS(status);
}

// Symmetric matrix with eigenvalues 1..dim in a random orientation, so
// nothing about the estimators can exploit diagonality.
Eigen::MatrixXd rotated_spectrum(Eigen::Index dim, uint64_t seed) {
  RngStream rng(seed, stream_ids::kInit);
  Eigen::MatrixXd g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = rng.gaussian();
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  Eigen::VectorXd eigs = Eigen::VectorXd::LinSpaced(dim, 1.0, static_cast<double>(dim));
  return q * eigs.asDiagonal() * q.transpose();
}

IdxDataset load_split(IdxDataset::Split split) {
  std::string dir = AHTSGD_TEST_DATA_DIR;
  bool train = split == IdxDataset::Split::train;
  std::string img = dir + (train ? "/train-images-idx3-ubyte.gz" : "/t10k-images-idx3-ubyte.gz");
  std::string lab = dir + (train ? "/train-labels-idx1-ubyte.gz" : "/t10k-labels-idx1-ubyte.gz");
  return load_idx(img, lab, split);
}

// ---- 1: the Gaussian endpoint of the sampler, through the CLI --------------

bool check1() {
  testutil::TmpDir tmp("acc1");
  Timer cli_timer;
  int code = run_cli("sample --alpha 2 --sigma 1 -n 1000000 --seed 1 -o " + tmp.str() +
                     " > /dev/null 2>&1");
  double cli_s = cli_timer.seconds();
  if (code != 0) {
    report(1, false, "million-draw Gaussian-limit sample", "driver exited " + std::to_string(code));
    return false;
  }

  std::ifstream in(tmp / "draws.csv");
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> xs;
  xs.reserve(1000000);
  while (std::getline(in, line)) {
    auto comma = line.find(',');
    xs.push_back(std::stod(line.substr(comma + 1)));
  }

  double var = sample_variance(xs);
  double p = ks_test_pvalue(xs, [](double x) { return normal_cdf(x / std::sqrt(2.0)); });
  bool pass = xs.size() == 1000000 && var >= 1.96 && var <= 2.04 && p > 0.001 && cli_s < 5.0;
  report(1, pass, "million-draw Gaussian-limit sample",
         "n=" + std::to_string(xs.size()) + ", variance " + fmt(var, "%.5g") +
             " in [1.96,2.04], KS-vs-N(0,2) p " + fmt(p) + " > 0.001, sampler took " +
             fmt(cli_s, "%.2f") + "s < 5s");
  return pass;
}

// ---- 2: the defining stability property under summation ---------------------

bool check2() {
  Timer timer;
  const std::vector<double> alphas{1.1, 1.5, 1.9};
  const std::vector<int> ns{2, 8, 32};
  const std::vector<double> qs{0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9};
  const int kRef = 400000, kSums = 200000;

  double worst = 0.0;
  std::string worst_at;
  bool pass = true;
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    double alpha = alphas[ai];
    RngStream ref_rng(100 + ai, stream_ids::kNoise);
    std::vector<double> ref(kRef);
    for (auto& x : ref) x = sample_standard(alpha, ref_rng);

    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
      int n = ns[ni];
      RngStream sum_rng(1000 + 10 * ai + ni, stream_ids::kNoise);
      double scale = std::pow(static_cast<double>(n), 1.0 / alpha);
      std::vector<double> sums(kSums);
      for (auto& s : sums) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += sample_standard(alpha, sum_rng);
        s = acc / scale;
      }
      // The median is excluded: both quantiles sit at ~0 there, so a
      // relative comparison is meaningless by symmetry.
      for (double q : qs) {
        double want = quantile(ref, q);
        double got = quantile(sums, q);
        double err = std::abs(got - want) / std::max(1.0, std::abs(want));
        if (err > worst) {
          worst = err;
          worst_at = "alpha=" + fmt(alpha, "%.2g") + ",n=" + std::to_string(n) + ",q=" +
                     fmt(q, "%.2g");
        }
        if (err > 0.03) pass = false;
      }
    }
  }
  double secs = timer.seconds();
  pass = pass && secs < 30.0;
  report(2, pass, "sum-stability of rescaled draws across batch sizes",
         "worst decile error " + fmt(worst) + " at " + worst_at +
             ", tolerance 0.03 of max(1,|q|), " + fmt(secs, "%.1f") + "s < 30s");
  return pass;
}

// ---- 3: trace estimation accuracy and unbiasedness ---------------------------

bool check3() {
  Timer timer;
  const Eigen::Index dim = 50;
  Eigen::MatrixXd h = rotated_spectrum(dim, 3);
  const double truth = dim * (dim + 1) / 2.0;  // 1275
  auto hvp = [&](const Eigen::VectorXd&, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return h * v;
  };
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);

  RngStream rng(11, stream_ids::kProbe);
  double big = hutchinson_trace(hvp, theta, 1000, rng);
  double rel = std::abs(big - truth) / truth;

  const int reps = 10000;
  std::vector<double> singles(reps);
  for (auto& s : singles) s = hutchinson_trace(hvp, theta, 1, rng);
  double m = mean(singles);
  double se = sample_sd(singles) / std::sqrt(static_cast<double>(reps));
  double dev = std::abs(m - truth);

  double secs = timer.seconds();
  bool pass = rel < 0.05 && dev < 3.0 * se && secs < 10.0;
  report(3, pass, "stochastic trace estimate on a rotated known spectrum",
         "1000-probe estimate " + fmt(big, "%.6g") + " vs " + fmt(truth, "%.6g") + " (rel " +
             fmt(rel) + " < 0.05), single-probe mean off by " + fmt(dev, "%.3g") + " < 3*SE=" +
             fmt(3.0 * se, "%.3g") + ", " + fmt(secs, "%.1f") + "s < 10s");
  return pass;
}

// ---- 4: network gradient and curvature products vs finite differences -------

bool check4() {
  IdxDataset train = load_split(IdxDataset::Split::train);
  EpochBatches eb(train, 64, 0, 0);
  Batch batch = eb.batch(0);

  MlpObjective mlp{MlpSpec{}};
  RngStream init_rng(0, stream_ids::kInit);
  Eigen::VectorXd theta = mlp.init_theta(init_rng);
  Eigen::VectorXd g = mlp.grad(theta, batch);

  RngStream dir_rng(7, stream_ids::kProbe);
  const double eps = 1e-6;
  double worst_grad = 0.0;
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd u(theta.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = dir_rng.gaussian();
    u.normalize();
    double fd = (mlp.loss(theta + eps * u, batch) - mlp.loss(theta - eps * u, batch)) / (2 * eps);
    double an = g.dot(u);
    double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-12});
    worst_grad = std::max(worst_grad, rel);
    if (rel >= 1e-5) ++bad;
  }

  // Curvature products against the exact constant-Hessian case.
  const Eigen::Index qdim = 40;
  Eigen::MatrixXd a = rotated_spectrum(qdim, 4);
  QuadraticObjective quad(a);
  GradOracle go = [&](const Eigen::VectorXd& th) { return quad.grad(th, Batch{}); };
  RngStream qrng(9, stream_ids::kProbe);
  Eigen::VectorXd th0(qdim);
  for (Eigen::Index j = 0; j < qdim; ++j) th0[j] = qrng.gaussian();
  double worst_hvp = 0.0;
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd v(qdim);
    for (Eigen::Index j = 0; j < qdim; ++j) v[j] = qrng.gaussian();
    Eigen::VectorXd fd = fd_hvp(go, th0, v);
    double rel = (fd - a * v).norm() / (a * v).norm();
    worst_hvp = std::max(worst_hvp, rel);
  }

  bool pass = bad == 0 && worst_hvp < 1e-6;
  report(4, pass, "classifier gradient and curvature products vs finite differences",
         "100 directional gradient checks on a real 64-example batch, worst rel " +
             fmt(worst_grad) + " < 1e-5 (" + std::to_string(bad) +
             " failures), 100 curvature-product checks worst rel " + fmt(worst_hvp) + " < 1e-6");
  return pass;
}

// ---- 5: tail-index schedule closed form and bounds ---------------------------

bool check5() {
  // Annealing must be bit-identical to its closed form across rates.
  bool exact = true;
  for (double k : {0.2, 0.1, 0.02, 0.01, 0.001}) {
    for (int t = 0; t <= 2000; ++t) {
      double a = annealing_alpha(k, static_cast<double>(t));
      if (a != 2.0 - std::exp(-k * static_cast<double>(t))) exact = false;
      if (!(a >= 1.0 && a <= 2.0)) exact = false;
    }
    for (double t : {1e6, 1e9})
      if (annealing_alpha(k, t) != 2.0 - std::exp(-k * t)) exact = false;
  }

  // Adaptive updates can never leave [alpha_min, alpha_max], whatever the
  // parameters or the sharpness input do.
  RngStream rng(5, stream_ids::kExperiment);
  bool bounded = true;
  for (int seq = 0; seq < 2000; ++seq) {
    AlphaSchedule s;
    s.alpha = rng.uniform(1.0, 2.0);
    s.v = rng.uniform(0.0, 20.0);
    s.c = rng.uniform(-10.0, 10.0);
    s.lambda = rng.uniform(0.01, 1.0);
    for (int t = 0; t < 50; ++t) {
      s = adaptive_alpha_step(s, rng.uniform(-50.0, 50.0));
      if (!(s.alpha >= 1.0 && s.alpha <= 2.0)) bounded = false;
    }
  }

  // One adaptive step is monotone in the smoothed sharpness.
  bool monotone = true;
  double prev = -1.0;
  for (double ema = -5.0; ema <= 5.0; ema += 0.125) {
    AlphaSchedule s;
    s.alpha = 1.4;
    s.v = 2.0;
    s.c = 1.0;
    double next = adaptive_alpha_step(s, ema).alpha;
    if (next < prev) monotone = false;
    prev = next;
  }

  bool pass = exact && bounded && monotone;
  report(5, pass, "tail-index schedules: closed form, bounds, monotonicity",
         std::string("annealing bitwise-exact over 5 rates x 2003 steps: ") +
             (exact ? "yes" : "NO") + ", 100k fuzzed adaptive updates stayed in [1,2]: " +
             (bounded ? "yes" : "NO") + ", monotone in sharpness: " + (monotone ? "yes" : "NO"));
  return pass;
}

// ---- 6: escape from a sharp well orders by tail index ------------------------

bool check6() {
  testutil::TmpDir tmp("acc6");
  EscapeConfig cfg;
  cfg.out_dir = tmp.str();
  EscapeResult res = run_escape(cfg);

  const auto& a12 = res.per_alpha[0];
  const auto& a16 = res.per_alpha[1];
  const auto& a20 = res.per_alpha[2];
  bool ordered = a12.median_steps < a16.median_steps && a16.median_steps < a20.median_steps;
  double p = mann_whitney_less_pvalue(a12.steps, a20.steps);
  bool pass = ordered && p < 0.01;
  report(6, pass, "sharp-well first-passage times order by tail index",
         "median steps " + fmt(a12.median_steps, "%.6g") + " (alpha 1.2) < " +
             fmt(a16.median_steps, "%.6g") + " (alpha 1.6) < " + fmt(a20.median_steps, "%.6g") +
             " (alpha 2.0), one-sided rank test p " + fmt(p) + " < 0.01");
  return pass;
}

// ---- 7: heavy-tailed exploration advantage on a multimodal surface ----------

bool check7() {
  testutil::TmpDir tmp("acc7");
  AckleyConfig levy_cfg;
  levy_cfg.method = Method::levy_fixed;
  levy_cfg.fixed_alpha = 1.5;
  levy_cfg.out_dir = tmp / "levy";
  AckleyResult levy = run_ackley(levy_cfg);

  AckleyConfig sgd_cfg = levy_cfg;
  sgd_cfg.method = Method::sgd;
  sgd_cfg.out_dir = tmp / "sgd";
  AckleyResult sgd = run_ackley(sgd_cfg);

  double gap = levy.success_fraction - sgd.success_fraction;
  bool pass = gap >= 0.1;
  report(7, pass, "multimodal-search success of heavy-tailed noise over plain descent",
         "200 basin-excluded starts each: heavy-tailed success " +
             fmt(levy.success_fraction, "%.3g") + ", plain descent " +
             fmt(sgd.success_fraction, "%.3g") + ", gap " + fmt(gap, "%.3g") + " >= 0.1");
  return pass;
}

// ---- 8: recovery from the all-zeros initialization ---------------------------

bool check8() {
  IdxDataset train = load_split(IdxDataset::Split::train);
  IdxDataset test = load_split(IdxDataset::Split::test);
  testutil::TmpDir tmp("acc8");

  // The mechanism: at exactly zero, every hidden unit is dead, so the only
  // nonzero gradient entries are the output biases.
  MlpObjective mlp{MlpSpec{}};
  EpochBatches eb(train, 64, 0, 0);
  Eigen::VectorXd g = mlp.grad(Eigen::VectorXd::Zero(mlp.dim()), eb.batch(0));
  bool structure = g.head(g.size() - 10).isZero(0.0) && g.tail(10).norm() > 0.0;

  TrainConfig base;
  base.data_dir = AHTSGD_TEST_DATA_DIR;
  base.mlp.init = MlpSpec::Init::zeros;
  base.epochs = 3;
  base.subset = 10000;
  base.log_every = 500;
  base.track_lambda_max = false;

  // Plain SGD cannot revive the dead units: the logits stay label-frequency
  // constants and accuracy never leaves the majority-class plateau.
  TrainConfig sgd_cfg = base;
  sgd_cfg.opt.method = Method::sgd;
  sgd_cfg.seeds = {0};
  sgd_cfg.out_dir = tmp / "sgd";
  TrainSweepResult sgd = run_train(sgd_cfg, train, test);
  double sgd_best = *std::max_element(sgd.per_seed[0].test_accuracy.begin(),
                                      sgd.per_seed[0].test_accuracy.end());

  // Heavy-tailed parameter noise with an annealing tail index kicks the
  // network off the dead manifold and trains it to useful accuracy.
  TrainConfig aht_cfg = base;
  aht_cfg.opt.method = Method::ahtsgd;
  aht_cfg.opt.alpha_schedule.mode = AlphaSchedule::Mode::annealing;
  aht_cfg.opt.alpha_schedule.k = 0.1;
  aht_cfg.opt.noise_scale.noise_init = 0.005;
  aht_cfg.opt.probe_every = 0;  // annealing ignores the sharpness signal
  aht_cfg.seeds = {0, 1, 2, 3, 4};
  aht_cfg.out_dir = tmp / "ahtsgd";
  TrainSweepResult aht = run_train(aht_cfg, train, test);

  int recovered = 0;
  std::string peaks;
  for (const auto& run : aht.per_seed) {
    double best = *std::max_element(run.test_accuracy.begin(), run.test_accuracy.end());
    recovered += best > 0.70;
    peaks += (peaks.empty() ? "" : "/") + fmt(best, "%.3g");
  }

  bool pass = structure && sgd_best <= 0.15 && recovered >= 4;
  report(8, pass, "escape from the all-zeros initialization within three epochs",
         std::string("dead-gradient structure holds: ") + (structure ? "yes" : "NO") +
             ", plain-SGD best accuracy " + fmt(sgd_best, "%.3g") +
             " <= 0.15, heavy-tailed peak accuracies " + peaks + ", " +
             std::to_string(recovered) + "/5 seeds above 0.70 (need >= 4)");
  return pass;
}

// ---- 9: healthy initialization, single-epoch comparison ----------------------

bool check9() {
  IdxDataset train = load_split(IdxDataset::Split::train);
  IdxDataset test = load_split(IdxDataset::Split::test);
  testutil::TmpDir tmp("acc9");

  TrainConfig base;
  base.data_dir = AHTSGD_TEST_DATA_DIR;
  base.epochs = 1;
  base.subset = 10000;
  base.log_every = 500;
  base.track_lambda_max = false;

  TrainConfig sgd_cfg = base;
  sgd_cfg.opt.method = Method::sgd;
  sgd_cfg.out_dir = tmp / "sgd";
  TrainSweepResult sgd = run_train(sgd_cfg, train, test);

  // The gentlest tail schedule measured: annealing with the smallest
  // injected scale on the experiment grid.
  TrainConfig aht_cfg = base;
  aht_cfg.opt.method = Method::ahtsgd;
  aht_cfg.opt.alpha_schedule.mode = AlphaSchedule::Mode::annealing;
  aht_cfg.opt.alpha_schedule.k = 0.1;
  aht_cfg.opt.noise_scale.noise_init = 0.001;
  aht_cfg.opt.probe_every = 0;
  aht_cfg.out_dir = tmp / "ahtsgd";
  TrainSweepResult aht = run_train(aht_cfg, train, test);

  auto epoch1_mean = [](const TrainSweepResult& r) {
    std::vector<double> accs;
    for (const auto& run : r.per_seed) accs.push_back(run.test_accuracy[0]);
    return mean(accs);
  };
  double sgd_mean = epoch1_mean(sgd);
  double aht_mean = epoch1_mean(aht);

  std::ofstream cmp(tmp / "comparison.csv");
  cmp << "method,seed,epoch1_accuracy\n";
  for (const auto& run : sgd.per_seed)
    cmp << "sgd," << run.seed << ',' << run.test_accuracy[0] << '\n';
  for (const auto& run : aht.per_seed)
    cmp << "ahtsgd," << run.seed << ',' << run.test_accuracy[0] << '\n';
  cmp << "# mean sgd=" << sgd_mean << " ahtsgd=" << aht_mean << " gap=" << (aht_mean - sgd_mean)
      << '\n';

  // Reported as measured: per-coordinate heavy-tailed parameter noise taxes
  // a well-initialized first epoch at this subset scale, so this check is
  // expected to fail until that trade-off moves.
  bool pass = aht_mean >= sgd_mean;
  report(9, pass, "healthy-init single-epoch mean accuracy comparison",
         "5-seed epoch-1 means: heavy-tailed " + fmt(aht_mean, "%.4g") + " vs plain " +
             fmt(sgd_mean, "%.4g") + ", gap " + fmt(aht_mean - sgd_mean, "%.3g") +
             "; comparison table in " + (tmp / "comparison.csv"));
  return pass;
}

// ---- 10: bitwise rerun determinism -------------------------------------------

bool check10() {
  IdxDataset train = load_split(IdxDataset::Split::train);
  IdxDataset test = load_split(IdxDataset::Split::test);
  testutil::TmpDir tmp("acc10");

  TrainConfig cfg;
  cfg.data_dir = AHTSGD_TEST_DATA_DIR;
  cfg.opt.method = Method::ahtsgd;
  cfg.opt.alpha_schedule.mode = AlphaSchedule::Mode::annealing;
  cfg.opt.alpha_schedule.k = 0.1;
  cfg.opt.noise_scale.noise_init = 0.005;
  cfg.epochs = 1;
  cfg.seeds = {0};
  cfg.subset = 2000;
  cfg.log_every = 10;
  cfg.track_lambda_max = false;

  cfg.out_dir = tmp / "first";
  TrainSweepResult r1 = run_train(cfg, train, test);
  cfg.out_dir = tmp / "second";
  TrainSweepResult r2 = run_train(cfg, train, test);

  // Run CSVs must agree except for the wall-clock column (last field).
  auto strip_wall = [](const std::string& text) {
    std::vector<std::string> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) rows.push_back(line.substr(0, line.rfind(',')));
    return rows;
  };
  std::vector<std::string> rows1 = strip_wall(testutil::slurp(r1.per_seed[0].csv_path));
  std::vector<std::string> rows2 = strip_wall(testutil::slurp(r2.per_seed[0].csv_path));
  bool runs_equal = !rows1.empty() && rows1 == rows2;

  std::string agg1 = testutil::slurp(r1.aggregate_path);
  std::string agg2 = testutil::slurp(r2.aggregate_path);
  bool agg_equal = !agg1.empty() && agg1 == agg2;

  bool acc_equal = r1.per_seed[0].test_accuracy == r2.per_seed[0].test_accuracy;

  bool pass = runs_equal && agg_equal && acc_equal;
  report(10, pass, "identical rerun reproduces every logged value",
         std::to_string(rows1.size()) + " log rows identical modulo wall-clock: " +
             (runs_equal ? "yes" : "NO") + ", aggregate byte-identical: " +
             (agg_equal ? "yes" : "NO") + ", epoch accuracies identical: " +
             (acc_equal ? "yes" : "NO"));
  return pass;
}

// ---- 11: analytic calculators against fixed references -----------------------

bool check11() {
  Timer timer;
  struct Case {
    const char* name;
    double got;
    double want;
  };
  const std::vector<Case> cases{
      {"escape_time(1,0.5,1.2)", escape_time(1.0, 0.5, 1.2), 9.94825053411},
      {"escape_time(2,1,1.5)", escape_time(2.0, 1.0, 1.5), 7.38905609893065},
      {"escape_ratio(1,1,1)", escape_ratio(1.0, 1.0, 1.0), 0.660859801407},
      {"escape_ratio(1.3,0.7,1.5)", escape_ratio(1.3, 0.7, 1.5), 1.13088155528},
      {"suboptimality(400,0.01,1.5)", suboptimality_factor(400.0, 0.01, 1.5), 1.4142135623730951},
      {"early_accel(0.55,1.5,1000)", early_acceleration_ratio(0.55, 1.5, 1000.0), 4.46683592151},
      {"early_accel(0.55,2,1000)", early_acceleration_ratio(0.55, 2.0, 1000.0), 1.41253754462},
      {"sgd_bound(1,0.3,0.55,1000)", sgd_convergence_bound(1.0, 0.3, 0.55, 1000), 0.119264843016},
  };
  BoundInputs in;
  in.init_dist = 1.0;
  in.c_alpha = 1.0;
  in.gamma = 0.55;
  in.horizon = 1000;
  double annealed = convergence_bound(
      in, [](uint64_t t) { return 0.1 / std::pow(static_cast<double>(t), 0.275); },
      [](uint64_t t) { return 2.0 - std::exp(-0.01 * static_cast<double>(t)); });

  double worst = std::abs(annealed / 0.038140969318 - 1.0);
  std::string worst_name = "annealed bound";
  bool pass = worst < 1e-6;
  for (const auto& c : cases) {
    double rel = std::abs(c.got / c.want - 1.0);
    if (rel > worst) {
      worst = rel;
      worst_name = c.name;
    }
    if (rel >= 1e-6) pass = false;
  }

  // The Gaussian endpoint collapses cleanly.
  pass = pass && escape_ratio(1.0, 1.0, 2.0) == 1.0 &&
         suboptimality_factor(123.0, 0.01, 2.0) == 1.0;

  // Monotonicity fuzz: more barrier means slower escape, more noise faster.
  RngStream rng(13, stream_ids::kExperiment);
  bool monotone = true;
  for (int i = 0; i < 10000; ++i) {
    double alpha = rng.uniform(1.0, 2.0);
    double sigma = rng.uniform(0.5, 2.0);
    double h = rng.uniform(0.0, 5.0);
    if (escape_time(h + 0.1, sigma, alpha) <= escape_time(h, sigma, alpha)) monotone = false;
    if (escape_time(h + 0.1, sigma * 1.1, alpha) >= escape_time(h + 0.1, sigma, alpha))
      monotone = false;
    if (early_acceleration_ratio(0.55, rng.uniform(1.01, 2.0), rng.uniform(1.0, 1e6)) < 1.0)
      monotone = false;
  }

  double secs = timer.seconds();
  pass = pass && monotone && secs < 5.0;
  report(11, pass, "analytic calculators match fixed references to 6 digits",
         "9 reference values, worst rel dev " + fmt(worst) + " (" + worst_name +
             "), Gaussian endpoints exact, 10k monotonicity probes clean: " +
             (monotone ? "yes" : "NO") + ", " + fmt(secs, "%.1f") + "s < 5s");
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <criterion 1..11>\n", argv[0]);
    return 2;
  }
  int n = std::atoi(argv[1]);
  bool pass = false;
  try {
    switch (n) {
      case 1: pass = check1(); break;
      case 2: pass = check2(); break;
      case 3: pass = check3(); break;
      case 4: pass = check4(); break;
      case 5: pass = check5(); break;
      case 6: pass = check6(); break;
      case 7: pass = check7(); break;
      case 8: pass = check8(); break;
      case 9: pass = check9(); break;
      case 10: pass = check10(); break;
      case 11: pass = check11(); break;
      default: std::fprintf(stderr, "usage: %s <criterion 1..11>\n", argv[0]); return 2;
    }
  } catch (const std::exception& e) {
    report(n, false, "check aborted by exception", e.what());
    return 1;
  }
  return pass ? 0 : 1;
}
