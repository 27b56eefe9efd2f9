#ifndef AHTSGD_EXPERIMENTS_HPP
#define AHTSGD_EXPERIMENTS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "ahtsgd/data_io.hpp"
#include "ahtsgd/mlp.hpp"
#include "ahtsgd/optimizer.hpp"

namespace ahtsgd {

// Experiment drivers behind the CLI subcommands. Every runner creates its
// output directory, streams CSV artifacts into it, and returns the summary
// numbers the caller wants to assert on. All randomness comes from the
// config seed through named streams, so reruns are byte-identical apart
// from the wall_ms column.

// ---- stable-noise sampling ----------------------------------------------

struct SampleConfig {
  double alpha = 1.5;
  double sigma = 1.0;
  uint64_t n = 100000;
  uint64_t seed = 0;
  std::string out_dir;
};

struct SampleSummary {
  uint64_t n = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double iqr = 0.0;
  double variance = 0.0;  // empirical; diverges in expectation for alpha < 2
  double frac_abs_gt1 = 0.0;
  double frac_abs_gt3 = 0.0;
  double frac_abs_gt10 = 0.0;
};

// Writes draws.csv (index, value) and summary.csv; returns the summary.
SampleSummary run_sample(const SampleConfig& cfg);

// ---- Ackley exploration --------------------------------------------------

struct AckleyConfig {
  Method method = Method::levy_fixed;
  double fixed_alpha = 1.5;
  Eigen::Index dims = 2;
  int n_runs = 200;
  int steps = 2000;
  double eta = 0.01;
  double noise_init = 2.0;  // stable scale starts at sqrt(noise_init)
  double gamma = 0.55;      // decay keeps late iterates settled
  // Starts are drawn uniformly from [-box, box]^dims and iterates reflect
  // off the box walls after every step, so heavy-tailed jumps stay on the
  // benchmark's domain instead of stranding in the outer plateau where the
  // gradient vanishes. The default box covers the first two rings of local
  // minima around the global one.
  double init_box = 2.5;
  // Starts with ||x0||_2 below this radius are redrawn, so no run begins
  // inside the global basin it is being scored on reaching; success then
  // measures transport, not initialization luck. 0 disables the filter.
  double start_min_radius = 1.5;
  double success_threshold = 0.5;
  int log_every = 20;
  uint64_t seed = 0;
  std::string out_dir;
};

struct AckleyResult {
  double success_fraction = 0.0;
  double median_final = 0.0;
  std::vector<double> final_values;  // one per run
};

// Writes trajectories.csv (run, step, f) at the logging cadence (first and
// last step always) and runs.csv (run, f_start, f_final, success).
AckleyResult run_ackley(const AckleyConfig& cfg);

// ---- double-well escape times --------------------------------------------

struct EscapeConfig {
  std::vector<double> alphas{1.2, 1.6, 2.0};
  double sigma = 0.1;  // constant stable scale
  double barrier = 1.0;
  double sharpness_ratio = 10.0;
  int trials = 200;
  int max_steps = 20000;
  double eta = 0.01;
  // Reflecting floor just left of the sharp well. It must sit where the
  // explicit Euler update is still contracting, else a clamped iterate
  // would be catapulted over the barrier by one huge gradient step; the
  // runner validates this against barrier/sharpness_ratio/eta.
  double clamp_lo = -0.45;
  uint64_t seed = 0;
  std::string out_dir;
};

struct EscapeAlphaStats {
  double alpha = 0.0;
  double median_steps = 0.0;  // censored trials count at max_steps
  double escaped_fraction = 0.0;
  std::vector<double> steps;  // per-trial first-passage step (or max_steps)
};

struct EscapeResult {
  std::vector<EscapeAlphaStats> per_alpha;
};

// Starts each trial at the sharp minimum and records the first step whose
// iterate crosses the barrier top into the wide basin, censoring at
// max_steps. Writes trials.csv (alpha, trial, steps, escaped) and
// medians.csv (alpha, median_steps, escaped_fraction).
EscapeResult run_escape(const EscapeConfig& cfg);

// ---- MNIST training -------------------------------------------------------

struct TrainConfig {
  std::string data_dir;  // directory with the four MNIST idx.gz files
  MlpSpec mlp;
  OptimizerConfig opt;  // opt.seed is overridden per sweep seed
  int epochs = 3;
  std::vector<uint64_t> seeds{0, 1, 2, 3, 4};
  Eigen::Index subset = 0;  // 0 = full training set
  Eigen::Index batch_size = 64;
  Eigen::Index test_batch = 1000;
  int log_every = 50;           // training-row cadence in steps
  bool track_lambda_max = true;  // per-epoch power-iteration diagnostic
  int jobs = 1;                  // concurrent seeds
  std::string out_dir;
};

struct TrainRunResult {
  uint64_t seed = 0;
  std::vector<double> test_accuracy;  // one entry per epoch
  std::vector<double> test_loss;
  std::string csv_path;
};

struct TrainSweepResult {
  std::vector<TrainRunResult> per_seed;
  std::string aggregate_path;
};

// Trains one MLP per seed (concurrently when jobs > 1), writing
// run_seed<N>.csv per run and aggregate.csv with per-epoch mean/sd test
// accuracy over seeds. Throws DataError-ish IoError/ParseError if the
// dataset is missing, NumericError if a run diverges.
TrainSweepResult run_train(const TrainConfig& cfg, const IdxDataset& train,
                           const IdxDataset& test);

// Convenience: load MNIST from cfg.data_dir (train + t10k pairs) and train.
TrainSweepResult run_train(const TrainConfig& cfg);

// Resolves the dataset root: explicit value if nonempty, else the
// AHTSGD_DATA_DIR environment variable, else "data/mnist".
std::string resolve_data_dir(const std::string& explicit_dir);

// ---- schedule traces -------------------------------------------------------

struct SchedulesConfig {
  AlphaSchedule schedule;  // mode + parameters
  NoiseScale noise;
  double fed_sharpness = 0.0;  // constant EMA input driving adaptive mode
  int steps = 100;
  std::string out_dir;
};

// Writes trace.csv (step, alpha, sigma) at full %.17g precision.
void run_schedules(const SchedulesConfig& cfg);

// ---- theory tables ---------------------------------------------------------

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;  // inclusive endpoints within a half-step tolerance
  std::vector<double> values() const;
};

struct TheoryConfig {
  std::string calculator;  // escape_time | escape_ratio | suboptimality | early_acceleration
  double h = 1.0;
  double eta = 0.01;
  double gamma = 0.55;
  uint64_t horizon = 1000;
  GridSpec alpha{1.0, 2.0, 0.1};
  GridSpec sigma{0.1, 1.0, 0.1};
  GridSpec lambda_max{10.0, 400.0, 39.0};
  std::string out_dir;
};

// Tabulates the chosen calculator over its grid into table.csv.
void run_theory(const TheoryConfig& cfg);

}  // namespace ahtsgd

#endif  // AHTSGD_EXPERIMENTS_HPP
