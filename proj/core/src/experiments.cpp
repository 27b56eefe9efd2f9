#include "ahtsgd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>
#include <utility>

#include "ahtsgd/curvature.hpp"
#include "ahtsgd/errors.hpp"
#include "ahtsgd/objectives.hpp"
#include "ahtsgd/stable_noise.hpp"
#include "ahtsgd/stats.hpp"
#include "ahtsgd/theory.hpp"

namespace ahtsgd {
namespace {

namespace fs = std::filesystem;

// Per-run seeds within a sweep: mix the run index into the base seed so
// every run gets its own independent family of streams.
uint64_t derive_seed(uint64_t seed, uint64_t index) {
  return splitmix64(splitmix64(seed) + index + 1);
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw ParameterError("output directory must be set");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

std::string fmt(double v, const char* spec = "%.10g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  auto us = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - t0);
  return static_cast<double>(us.count()) / 1000.0;
}

}  // namespace

// ---- stable-noise sampling ----------------------------------------------

SampleSummary run_sample(const SampleConfig& cfg) {
  StableNoiseParams params(cfg.alpha, cfg.sigma);  // validates
  ensure_dir(cfg.out_dir);
  auto draws_csv = open_out(cfg.out_dir + "/draws.csv");
  draws_csv << "index,value\n";

  RngStream rng(cfg.seed, stream_ids::kNoise);
  std::vector<double> xs;
  xs.reserve(cfg.n);
  for (uint64_t i = 0; i < cfg.n; ++i) {
    double x = cfg.sigma * sample_standard(cfg.alpha, rng);
    xs.push_back(x);
    draws_csv << i << ',' << fmt(x) << '\n';
  }
  draws_csv.flush();
  if (!draws_csv) throw IoError("write failed in " + cfg.out_dir);

  SampleSummary s;
  s.n = cfg.n;
  if (!xs.empty()) {
    s.median = median(xs);
    s.q25 = quantile(xs, 0.25);
    s.q75 = quantile(xs, 0.75);
    s.iqr = s.q75 - s.q25;
    s.variance = xs.size() >= 2 ? sample_variance(xs) : 0.0;
    double g1 = 0, g3 = 0, g10 = 0;
    for (double x : xs) {
      double a = std::abs(x);
      g1 += a > 1.0;
      g3 += a > 3.0;
      g10 += a > 10.0;
    }
    s.frac_abs_gt1 = g1 / static_cast<double>(xs.size());
    s.frac_abs_gt3 = g3 / static_cast<double>(xs.size());
    s.frac_abs_gt10 = g10 / static_cast<double>(xs.size());
  }

  auto summary_csv = open_out(cfg.out_dir + "/summary.csv");
  summary_csv << "n,median,q25,q75,iqr,variance,frac_abs_gt1,frac_abs_gt3,frac_abs_gt10\n";
  summary_csv << s.n << ',' << fmt(s.median) << ',' << fmt(s.q25) << ',' << fmt(s.q75) << ','
              << fmt(s.iqr) << ',' << fmt(s.variance) << ',' << fmt(s.frac_abs_gt1) << ','
              << fmt(s.frac_abs_gt3) << ',' << fmt(s.frac_abs_gt10) << '\n';
  return s;
}

// ---- Ackley exploration --------------------------------------------------

AckleyResult run_ackley(const AckleyConfig& cfg) {
  if (cfg.dims < 1) throw ParameterError("dims must be >= 1");
  if (cfg.n_runs < 1) throw ParameterError("n_runs must be >= 1");
  if (cfg.steps < 0) throw ParameterError("steps must be >= 0");
  if (cfg.start_min_radius < 0.0 || cfg.start_min_radius > cfg.init_box)
    throw ParameterError("start_min_radius must be in [0, init_box]");
  ensure_dir(cfg.out_dir);

  AckleyObjective ackley(cfg.dims);
  Batch none;
  auto traj_csv = open_out(cfg.out_dir + "/trajectories.csv");
  traj_csv << "run,step,f\n";
  auto runs_csv = open_out(cfg.out_dir + "/runs.csv");
  runs_csv << "run,f_start,f_final,success\n";

  AckleyResult result;
  result.final_values.reserve(cfg.n_runs);
  int successes = 0;
  for (int r = 0; r < cfg.n_runs; ++r) {
    uint64_t run_seed = derive_seed(cfg.seed, static_cast<uint64_t>(r));
    RngStream init_rng(run_seed, stream_ids::kInit);
    Eigen::VectorXd x(cfg.dims);
    do {
      for (Eigen::Index i = 0; i < cfg.dims; ++i)
        x[i] = init_rng.uniform(-cfg.init_box, cfg.init_box);
    } while (x.norm() < cfg.start_min_radius);

    OptimizerConfig oc;
    oc.method = cfg.method;
    oc.eta = cfg.eta;
    oc.seed = run_seed;
    oc.fixed_alpha = cfg.fixed_alpha;
    oc.noise_scale = NoiseScale{cfg.noise_init, cfg.gamma, 0};
    Optimizer opt(oc, x);

    double f0 = ackley.loss(x, none);
    traj_csv << r << ",0," << fmt(f0) << '\n';
    for (int t = 0; t < cfg.steps; ++t) {
      StepReport rep = opt.step(ackley, none);
      opt.reflect(-cfg.init_box, cfg.init_box);
      bool last = t + 1 == cfg.steps;
      if (last || (cfg.log_every > 0 && (t + 1) % cfg.log_every == 0)) {
        double f = last ? ackley.loss(opt.theta(), none) : rep.loss;
        traj_csv << r << ',' << (t + 1) << ',' << fmt(f) << '\n';
      }
    }
    double f_final = ackley.loss(opt.theta(), none);
    bool success = f_final < cfg.success_threshold;
    successes += success;
    result.final_values.push_back(f_final);
    runs_csv << r << ',' << fmt(f0) << ',' << fmt(f_final) << ',' << (success ? 1 : 0) << '\n';
    traj_csv.flush();
    runs_csv.flush();
  }
  result.success_fraction = static_cast<double>(successes) / cfg.n_runs;
  result.median_final = median(result.final_values);

  auto summary_csv = open_out(cfg.out_dir + "/summary.csv");
  summary_csv << "method,n_runs,success_fraction,median_final\n";
  summary_csv << method_name(cfg.method) << ',' << cfg.n_runs << ','
              << fmt(result.success_fraction) << ',' << fmt(result.median_final) << '\n';
  return result;
}

// ---- double-well escape times --------------------------------------------

EscapeResult run_escape(const EscapeConfig& cfg) {
  if (cfg.trials < 1) throw ParameterError("trials must be >= 1");
  if (cfg.max_steps < 1) throw ParameterError("max_steps must be >= 1");
  if (!(cfg.sigma >= 0.0)) throw ParameterError("sigma must be >= 0");
  DoubleWellObjective well(cfg.barrier, cfg.sharpness_ratio, 1);
  if (!(cfg.clamp_lo < well.sharp_minimum()))
    throw ParameterError("clamp_lo must sit left of the sharp minimum");

  // A noise-free update from the floor must not cross the barrier top,
  // otherwise clamped iterates would be catapulted out by the gradient.
  Batch none;
  Eigen::VectorXd floor(1);
  floor[0] = cfg.clamp_lo;
  double kicked = (floor - cfg.eta * well.grad(floor, none))[0];
  if (kicked >= well.barrier_top())
    throw ParameterError(
        "clamp_lo is too far from the well for this eta: one gradient step from the floor "
        "crosses the barrier; move clamp_lo closer to the sharp minimum");

  ensure_dir(cfg.out_dir);
  auto trials_csv = open_out(cfg.out_dir + "/trials.csv");
  trials_csv << "alpha,trial,steps,escaped\n";

  EscapeResult result;
  for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
    double alpha = cfg.alphas[a];
    EscapeAlphaStats stats;
    stats.alpha = alpha;
    stats.steps.reserve(cfg.trials);
    int escaped_count = 0;
    for (int trial = 0; trial < cfg.trials; ++trial) {
      uint64_t trial_seed =
          derive_seed(cfg.seed, a * static_cast<uint64_t>(cfg.trials) + trial);
      RngStream rng(trial_seed, stream_ids::kNoise);
      Eigen::VectorXd x(1);
      x[0] = well.sharp_minimum();
      int escape_step = cfg.max_steps;
      bool escaped = false;
      for (int t = 1; t <= cfg.max_steps; ++t) {
        x = step_levy(x, well.grad(x, none), cfg.eta, alpha, cfg.sigma, rng);
        if (x[0] > well.barrier_top()) {
          escape_step = t;
          escaped = true;
          break;
        }
        if (x[0] < cfg.clamp_lo) x[0] = cfg.clamp_lo;
      }
      stats.steps.push_back(static_cast<double>(escape_step));
      escaped_count += escaped;
      trials_csv << fmt(alpha) << ',' << trial << ',' << escape_step << ',' << (escaped ? 1 : 0)
                 << '\n';
    }
    trials_csv.flush();
    stats.median_steps = median(stats.steps);
    stats.escaped_fraction = static_cast<double>(escaped_count) / cfg.trials;
    result.per_alpha.push_back(std::move(stats));
  }

  auto medians_csv = open_out(cfg.out_dir + "/medians.csv");
  medians_csv << "alpha,median_steps,escaped_fraction\n";
  for (const auto& s : result.per_alpha)
    medians_csv << fmt(s.alpha) << ',' << fmt(s.median_steps) << ',' << fmt(s.escaped_fraction)
                << '\n';
  return result;
}

// ---- MNIST training -------------------------------------------------------

namespace {

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
};

EvalResult evaluate(const MlpObjective& mlp, const Eigen::VectorXd& theta, const IdxDataset& ds,
                    Eigen::Index eval_batch) {
  if (ds.size() == 0) throw ParameterError("evaluation dataset is empty");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(ds.size()));
  for (Eigen::Index i = 0; i < ds.size(); ++i) order[i] = i;
  EvalResult r;
  Eigen::Index done = 0;
  while (done < ds.size()) {
    Eigen::Index count = std::min(eval_batch, ds.size() - done);
    Batch b = make_batch(ds, order.data() + done, count);
    double w = static_cast<double>(count) / static_cast<double>(ds.size());
    r.loss += w * mlp.loss(theta, b);
    r.accuracy += w * mlp.accuracy(theta, b);
    done += count;
  }
  return r;
}

TrainRunResult train_one_seed(const TrainConfig& cfg, const IdxDataset& train,
                              const IdxDataset& test, uint64_t seed) {
  const IdxDataset* tr = &train;
  IdxDataset local;
  if (cfg.subset > 0 && cfg.subset < train.size()) {
    RngStream subset_rng(seed, stream_ids::kExperiment);
    auto perm = shuffled_indices(train.size(), subset_rng);
    perm.resize(static_cast<std::size_t>(cfg.subset));
    local = select(train, perm);
    tr = &local;
  }

  MlpObjective mlp(cfg.mlp);
  RngStream init_rng(seed, stream_ids::kInit);
  OptimizerConfig oc = cfg.opt;
  oc.seed = seed;
  Optimizer opt(oc, mlp.init_theta(init_rng));

  TrainRunResult result;
  result.seed = seed;
  result.csv_path = cfg.out_dir + "/run_seed" + std::to_string(seed) + ".csv";
  RunCsvWriter csv(result.csv_path);
  auto t0 = std::chrono::steady_clock::now();

  uint64_t gstep = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    EpochBatches batches(*tr, cfg.batch_size, seed, static_cast<uint64_t>(epoch));
    Batch batch;
    for (Eigen::Index b = 0; b < batches.num_batches(); ++b) {
      batch = batches.batch(b);
      StepReport rep = opt.step(mlp, batch);
      if (cfg.log_every > 0 && gstep % static_cast<uint64_t>(cfg.log_every) == 0) {
        RunRecord row;
        row.step = gstep;
        row.epoch = static_cast<uint64_t>(epoch);
        row.split = "train";
        row.loss = rep.loss;
        row.alpha = rep.alpha_used;
        row.sigma = rep.sigma_used;
        row.sharpness_raw = rep.sharpness_raw;
        row.sharpness_ema = rep.sharpness_ema;
        row.grad_norm = rep.grad_norm;
        row.wall_ms = elapsed_ms(t0);
        csv.append(row);
      }
      ++gstep;
    }

    EvalResult ev = evaluate(mlp, opt.theta(), test, cfg.test_batch);
    RunRecord row;
    row.step = gstep == 0 ? 0 : gstep - 1;
    row.epoch = static_cast<uint64_t>(epoch);
    row.split = "test";
    row.loss = ev.loss;
    row.accuracy = ev.accuracy;
    row.alpha = opt.alpha();
    if (cfg.track_lambda_max && batch.size() > 0) {
      RngStream lam_rng(derive_seed(seed, static_cast<uint64_t>(epoch)), stream_ids::kLambdaMax);
      auto est = estimate_lambda_max(
          [&](const Eigen::VectorXd& th, const Eigen::VectorXd& v) {
            return mlp.hvp(th, v, batch);
          },
          opt.theta(), 30, 1e-4, lam_rng);
      row.lambda_max = est.value;
    }
    row.wall_ms = elapsed_ms(t0);
    csv.append(row);
    result.test_accuracy.push_back(ev.accuracy);
    result.test_loss.push_back(ev.loss);
  }
  return result;
}

}  // namespace

std::string resolve_data_dir(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("AHTSGD_DATA_DIR"); env && *env) return env;
  return "data/mnist";
}

namespace {

// Accepts either the gzipped or the unpacked file, preferring the former.
std::string mnist_file(const std::string& dir, const std::string& stem) {
  std::string gz = dir + "/" + stem + ".gz";
  if (fs::exists(gz)) return gz;
  std::string plain = dir + "/" + stem;
  if (fs::exists(plain)) return plain;
  throw IoError("missing dataset file " + gz + " (or uncompressed " + stem + ")");
}

}  // namespace

TrainSweepResult run_train(const TrainConfig& cfg) {
  std::string dir = resolve_data_dir(cfg.data_dir);
  IdxDataset train = load_idx(mnist_file(dir, "train-images-idx3-ubyte"),
                              mnist_file(dir, "train-labels-idx1-ubyte"),
                              IdxDataset::Split::train);
  IdxDataset test = load_idx(mnist_file(dir, "t10k-images-idx3-ubyte"),
                             mnist_file(dir, "t10k-labels-idx1-ubyte"), IdxDataset::Split::test);
  return run_train(cfg, train, test);
}

TrainSweepResult run_train(const TrainConfig& cfg, const IdxDataset& train,
                           const IdxDataset& test) {
  if (cfg.epochs < 1) throw ParameterError("epochs must be >= 1");
  if (cfg.seeds.empty()) throw ParameterError("need at least one seed");
  if (cfg.batch_size < 1 || cfg.test_batch < 1) throw ParameterError("batch sizes must be >= 1");
  if (cfg.subset < 0 || cfg.subset > train.size())
    throw ParameterError("subset exceeds the training set");
  if (train.feature_dim() != cfg.mlp.layer_sizes.front())
    throw ParameterError("dataset feature dimension does not match the network input");
  ensure_dir(cfg.out_dir);

  TrainSweepResult sweep;
  sweep.per_seed.resize(cfg.seeds.size());

  int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || cfg.seeds.size() == 1) {
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
      sweep.per_seed[i] = train_one_seed(cfg, train, test, cfg.seeds[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= cfg.seeds.size()) return;
        try {
          sweep.per_seed[i] = train_one_seed(cfg, train, test, cfg.seeds[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    std::size_t n_threads = std::min<std::size_t>(jobs, cfg.seeds.size());
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  sweep.aggregate_path = cfg.out_dir + "/aggregate.csv";
  auto agg = open_out(sweep.aggregate_path);
  agg << "epoch,mean_test_accuracy,sd_test_accuracy,min_test_accuracy,max_test_accuracy,n_seeds\n";
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<double> accs;
    accs.reserve(cfg.seeds.size());
    for (const auto& run : sweep.per_seed) accs.push_back(run.test_accuracy[epoch]);
    double sd = accs.size() >= 2 ? sample_sd(accs) : 0.0;
    agg << epoch << ',' << fmt(mean(accs)) << ',' << fmt(sd) << ','
        << fmt(*std::min_element(accs.begin(), accs.end())) << ','
        << fmt(*std::max_element(accs.begin(), accs.end())) << ',' << accs.size() << '\n';
  }
  return sweep;
}

// ---- schedule traces -------------------------------------------------------

void run_schedules(const SchedulesConfig& cfg) {
  if (cfg.steps < 1) throw ParameterError("steps must be >= 1");
  ensure_dir(cfg.out_dir);
  auto trace = open_out(cfg.out_dir + "/trace.csv");
  trace << "step,alpha,sigma\n";
  AlphaSchedule sched = cfg.schedule;
  NoiseScale ns = cfg.noise;
  for (int t = 0; t < cfg.steps; ++t) {
    ns.t = static_cast<uint64_t>(t);
    double alpha;
    if (sched.mode == AlphaSchedule::Mode::annealing) {
      alpha = annealing_alpha(sched.k, static_cast<double>(t));
    } else {
      sched = adaptive_alpha_step(sched, cfg.fed_sharpness);
      alpha = sched.alpha;
    }
    trace << t << ',' << fmt(alpha, "%.17g") << ',' << fmt(noise_sigma(ns), "%.17g") << '\n';
  }
}

// ---- theory tables ---------------------------------------------------------

std::vector<double> GridSpec::values() const {
  if (!(step > 0.0)) throw ParameterError("grid step must be > 0");
  if (stop < start) throw ParameterError("grid stop must be >= start");
  std::vector<double> vals;
  for (int i = 0;; ++i) {
    double v = start + step * i;
    if (v > stop + step * 0.5) break;
    vals.push_back(std::min(v, stop));
  }
  return vals;
}

void run_theory(const TheoryConfig& cfg) {
  ensure_dir(cfg.out_dir);
  auto table = open_out(cfg.out_dir + "/table.csv");
  if (cfg.calculator == "escape_time") {
    table << "h,sigma,alpha,escape_time\n";
    for (double s : cfg.sigma.values())
      for (double a : cfg.alpha.values())
        table << fmt(cfg.h) << ',' << fmt(s) << ',' << fmt(a) << ','
              << fmt(escape_time(cfg.h, s, a)) << '\n';
  } else if (cfg.calculator == "escape_ratio") {
    table << "h,sigma,alpha,escape_ratio\n";
    for (double s : cfg.sigma.values())
      for (double a : cfg.alpha.values())
        table << fmt(cfg.h) << ',' << fmt(s) << ',' << fmt(a) << ','
              << fmt(escape_ratio(cfg.h, s, a)) << '\n';
  } else if (cfg.calculator == "suboptimality") {
    table << "lambda_max,eta,alpha,suboptimality_factor\n";
    for (double lm : cfg.lambda_max.values())
      for (double a : cfg.alpha.values())
        table << fmt(lm) << ',' << fmt(cfg.eta) << ',' << fmt(a) << ','
              << fmt(suboptimality_factor(lm, cfg.eta, a)) << '\n';
  } else if (cfg.calculator == "early_acceleration") {
    table << "gamma,alpha_t,horizon,early_acceleration_ratio\n";
    for (double a : cfg.alpha.values()) {
      if (a <= 1.0) continue;  // ratio needs alpha_t > 1
      table << fmt(cfg.gamma) << ',' << fmt(a) << ',' << cfg.horizon << ','
            << fmt(early_acceleration_ratio(cfg.gamma, a, static_cast<double>(cfg.horizon)))
            << '\n';
    }
  } else if (cfg.calculator == "convergence") {
    // Annealing-tail bound vs the fixed-Gaussian form over the horizon.
    table << "horizon,annealed_bound,sgd_bound\n";
    double k = 0.1;
    double sigma0 = cfg.sigma.start;
    for (uint64_t t = 1; t <= cfg.horizon; ++t) {
      BoundInputs in;
      in.gamma = cfg.gamma;
      in.horizon = t;
      double annealed = convergence_bound(
          in, [&](uint64_t u) { return sigma0 / std::pow(1.0 + u, cfg.gamma / 2.0); },
          [&](uint64_t u) { return annealing_alpha(k, static_cast<double>(u)); });
      table << t << ',' << fmt(annealed) << ','
            << fmt(sgd_convergence_bound(in.init_dist, sigma0, cfg.gamma, t)) << '\n';
    }
  } else {
    throw ParameterError("unknown calculator '" + cfg.calculator +
                         "' (want escape_time, escape_ratio, suboptimality, early_acceleration, "
                         "or convergence)");
  }
}

}  // namespace ahtsgd
