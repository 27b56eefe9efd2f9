// Command-line front end: wires flags/config files to the experiment
// drivers and emits CSV artifacts plus a config.txt echo per run directory.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 data error
// (missing/corrupt files, failed downloads), 4 numeric failure.

#include <CLI11.hpp>
#include <openssl/evp.h>
#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ahtsgd/errors.hpp"
#include "ahtsgd/experiments.hpp"
#include "ahtsgd/stats.hpp"

#define CPPHTTPLIB_NO_EXCEPTIONS
#include <httplib.h>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Resolved-config echo: key=value lines for every option of the
// subcommand, defaults included, so `--config <out>/config.txt` replays
// the run exactly (flags still override file values).  The section header
// scopes the keys to the subcommand when the file is read back through the
// top-level --config option.
void echo_config(CLI::App* sub, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::string path = out_dir + "/config.txt";
  std::ofstream out(path);
  if (!out) throw ahtsgd::IoError("cannot write " + path);
  out << "[" << sub->get_name() << "]\n" << sub->config_to_str(true, false);
}

double parse_double_flag(const std::string& text, const std::string& flag) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ahtsgd::ParameterError("cannot parse " + flag + " value '" + text + "'");
}

ahtsgd::MlpSpec::Init parse_init(const std::string& name) {
  if (name == "zeros") return ahtsgd::MlpSpec::Init::zeros;
  if (name == "kaiming" || name == "kaiming_uniform") return ahtsgd::MlpSpec::Init::kaiming_uniform;
  throw ahtsgd::ParameterError("unknown init '" + name + "' (want zeros or kaiming)");
}

ahtsgd::AlphaSchedule::Mode parse_alpha_mode(const std::string& name) {
  if (name == "adaptive") return ahtsgd::AlphaSchedule::Mode::adaptive;
  if (name == "annealing") return ahtsgd::AlphaSchedule::Mode::annealing;
  throw ahtsgd::ParameterError("unknown alpha mode '" + name + "' (want adaptive or annealing)");
}

ahtsgd::GridSpec parse_grid(const std::vector<double>& v) {
  ahtsgd::GridSpec g;
  g.start = v.at(0);
  g.stop = v.at(1);
  g.step = v.at(2);
  return g;
}

// ---- fetch-mnist ----------------------------------------------------------

struct MnistFile {
  const char* name;
  const char* md5;  // digest of the decompressed idx payload
};

// MD5s of the decompressed idx payloads.  Gzip containers re-deflated by
// different tools differ byte-for-byte while holding identical data, so
// integrity is pinned to the payload, not the container.
constexpr MnistFile kMnistFiles[] = {
    {"train-images-idx3-ubyte.gz", "6bbc9ace898e44ae57da46a324031adb"},
    {"train-labels-idx1-ubyte.gz", "a25bea736e30d166cdddb491f175f624"},
    {"t10k-images-idx3-ubyte.gz", "2646ac647ad5339dbf082846283269ea"},
    {"t10k-labels-idx1-ubyte.gz", "27ae3e4e09519cfbb04c329615203637"},
};

std::string md5_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_md5(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

bool gunzip(const std::string& in, std::string* out) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) return false;
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  char buf[1 << 15];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof buf;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) break;
    out->append(buf, sizeof buf - zs.avail_out);
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) break;  // truncated stream
  }
  inflateEnd(&zs);
  return rc == Z_STREAM_END;
}

// MD5 of the decompressed payload when `raw` is a gzip container, of the raw
// bytes otherwise.  Undecodable gzip data hashes to "" (matches nothing).
std::string payload_md5(const std::string& raw) {
  if (raw.size() >= 2 && static_cast<unsigned char>(raw[0]) == 0x1f &&
      static_cast<unsigned char>(raw[1]) == 0x8b) {
    std::string payload;
    if (!gunzip(raw, &payload)) return {};
    return md5_hex(payload);
  }
  return md5_hex(raw);
}

std::string payload_md5_of_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return payload_md5(data);
}

// Splits "https://host/prefix" into client base and path prefix.
bool split_mirror(const std::string& mirror, std::string* base, std::string* prefix) {
  auto scheme_end = mirror.find("://");
  if (scheme_end == std::string::npos) return false;
  auto path_start = mirror.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    *base = mirror;
    *prefix = "/";
  } else {
    *base = mirror.substr(0, path_start);
    *prefix = mirror.substr(path_start);
    if (prefix->back() != '/') prefix->push_back('/');
  }
  return true;
}

bool download(const std::string& mirror, const std::string& file, std::string* body) {
  std::string base, prefix;
  if (!split_mirror(mirror, &base, &prefix)) return false;
  httplib::Client cli(base);
  cli.set_follow_location(true);
  cli.set_connection_timeout(15, 0);
  cli.set_read_timeout(120, 0);
  auto res = cli.Get(prefix + file);
  if (!res || res->status != 200) return false;
  *body = std::move(res->body);
  return true;
}

int run_fetch_mnist(const std::string& dir, const std::vector<std::string>& mirrors, bool force) {
  std::filesystem::create_directories(dir);
  bool all_ok = true;
  for (const auto& f : kMnistFiles) {
    std::string dest = dir + "/" + f.name;
    if (!force && payload_md5_of_file(dest) == f.md5) {
      std::cout << f.name << ": already present, checksum ok\n";
      continue;
    }
    bool got = false;
    for (const auto& mirror : mirrors) {
      std::string body;
      if (!download(mirror, f.name, &body)) {
        std::cerr << f.name << ": fetch failed from " << mirror << "\n";
        continue;
      }
      std::string sum = payload_md5(body);
      if (sum != f.md5) {
        std::cerr << f.name << ": checksum mismatch from " << mirror << " (got "
                  << (sum.empty() ? "undecodable gzip" : sum) << ")\n";
        continue;
      }
      std::ofstream out(dest, std::ios::binary);
      out.write(body.data(), static_cast<std::streamsize>(body.size()));
      if (!out) throw ahtsgd::IoError("cannot write " + dest);
      std::cout << f.name << ": fetched and verified (" << body.size() << " bytes)\n";
      got = true;
      break;
    }
    all_ok = all_ok && got;
  }
  if (!all_ok) {
    std::cerr << "some files could not be fetched; dataset incomplete\n";
    return kExitData;
  }
  std::cout << "dataset ready in " << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heavy-tailed SGD experiment driver"};
  app.require_subcommand(1);
  // Config files are processed by the root app only, with [subcommand]
  // sections routing keys to the matching subcommand.  Fallthrough lets
  // `--config` be written after the subcommand name; it is inherited by
  // subcommands created below.
  app.fallthrough();
  app.set_config("--config", "", "Read options from a key=value file");
  int exit_code = 0;

  // ---- sample ----
  auto* sample = app.add_subcommand("sample", "Draw alpha-stable variates and summarize them");
  ahtsgd::SampleConfig scfg;
  scfg.out_dir = "runs/sample";
  double sample_n = 100000;
  sample->add_option("--alpha", scfg.alpha, "Tail index in [1,2]")->capture_default_str();
  sample->add_option("--sigma", scfg.sigma, "Scale parameter")->capture_default_str();
  sample->add_option("-n,--draws", sample_n, "Number of draws")->capture_default_str();
  sample->add_option("--seed", scfg.seed, "Random seed")->capture_default_str();
  sample->add_option("-o,--out", scfg.out_dir, "Output directory")->capture_default_str();
  sample->callback([&] {
    if (sample_n < 0) throw ahtsgd::ParameterError("draw count must be >= 0");
    scfg.n = static_cast<uint64_t>(sample_n);
    echo_config(sample, scfg.out_dir);
    auto s = ahtsgd::run_sample(scfg);
    std::cout << "n=" << s.n << " median=" << fmt(s.median) << " iqr=" << fmt(s.iqr)
              << " variance=" << fmt(s.variance) << " frac|x|>3=" << fmt(s.frac_abs_gt3) << "\n"
              << "wrote " << scfg.out_dir << "/draws.csv\n";
  });

  // ---- ackley ----
  auto* ackley = app.add_subcommand("ackley", "Multistart optimization runs on the Ackley surface");
  ahtsgd::AckleyConfig acfg;
  acfg.out_dir = "runs/ackley";
  std::string ackley_method = "levy_fixed";
  int64_t ackley_dims = 2;
  ackley->add_option("--method", ackley_method, "sgd | sgld | levy_fixed | ahtsgd")
      ->capture_default_str();
  ackley->add_option("--fixed-alpha", acfg.fixed_alpha, "Tail index for levy_fixed")
      ->capture_default_str();
  ackley->add_option("--dims", ackley_dims, "Problem dimension")->capture_default_str();
  ackley->add_option("--runs", acfg.n_runs, "Number of restarts")->capture_default_str();
  ackley->add_option("--steps", acfg.steps, "Steps per run")->capture_default_str();
  ackley->add_option("--eta", acfg.eta, "Learning rate")->capture_default_str();
  ackley->add_option("--noise-init", acfg.noise_init, "Initial noise variance scale")
      ->capture_default_str();
  ackley->add_option("--gamma", acfg.gamma, "Noise decay exponent")->capture_default_str();
  ackley->add_option("--init-box", acfg.init_box, "Starts drawn uniformly from [-box, box]^dims")
      ->capture_default_str();
  ackley->add_option("--start-min-radius", acfg.start_min_radius,
                     "Redraw starts closer to the origin than this (0 disables)")
      ->capture_default_str();
  ackley->add_option("--threshold", acfg.success_threshold, "Success cutoff on final value")
      ->capture_default_str();
  ackley->add_option("--log-every", acfg.log_every, "Trajectory logging cadence")
      ->capture_default_str();
  ackley->add_option("--seed", acfg.seed, "Random seed")->capture_default_str();
  ackley->add_option("-o,--out", acfg.out_dir, "Output directory")->capture_default_str();
  ackley->callback([&] {
    acfg.method = ahtsgd::parse_method(ackley_method);
    acfg.dims = ackley_dims;
    echo_config(ackley, acfg.out_dir);
    auto r = ahtsgd::run_ackley(acfg);
    std::cout << "method=" << ackley_method << " runs=" << acfg.n_runs
              << " success_fraction=" << fmt(r.success_fraction)
              << " median_final=" << fmt(r.median_final) << "\n"
              << "wrote " << acfg.out_dir << "/runs.csv\n";
  });

  // ---- escape ----
  auto* escape = app.add_subcommand("escape", "First-passage times out of a sharp double-well");
  ahtsgd::EscapeConfig ecfg;
  ecfg.out_dir = "runs/escape";
  escape->add_option("--alphas", ecfg.alphas, "Tail indices to compare")->capture_default_str();
  escape->add_option("--sigma", ecfg.sigma, "Stable noise scale")->capture_default_str();
  escape->add_option("--barrier", ecfg.barrier, "Barrier height H")->capture_default_str();
  escape->add_option("--ratio", ecfg.sharpness_ratio, "Sharp/wide curvature ratio")
      ->capture_default_str();
  escape->add_option("--trials", ecfg.trials, "Trials per alpha")->capture_default_str();
  escape->add_option("--max-steps", ecfg.max_steps, "Censoring horizon")->capture_default_str();
  escape->add_option("--eta", ecfg.eta, "Learning rate")->capture_default_str();
  escape->add_option("--clamp-lo", ecfg.clamp_lo, "Reflecting floor left of the sharp well")
      ->capture_default_str();
  escape->add_option("--seed", ecfg.seed, "Random seed")->capture_default_str();
  escape->add_option("-o,--out", ecfg.out_dir, "Output directory")->capture_default_str();
  escape->callback([&] {
    echo_config(escape, ecfg.out_dir);
    auto r = ahtsgd::run_escape(ecfg);
    for (const auto& s : r.per_alpha)
      std::cout << "alpha=" << fmt(s.alpha) << " median_steps=" << fmt(s.median_steps)
                << " escaped=" << fmt(s.escaped_fraction) << "\n";
    std::cout << "wrote " << ecfg.out_dir << "/trials.csv\n";
  });

  // ---- train ----
  auto* train = app.add_subcommand("train", "Train the MLP classifier on MNIST");
  ahtsgd::TrainConfig tcfg;
  tcfg.out_dir = "runs/train";
  std::string train_method = "ahtsgd";
  std::string train_init = "kaiming";
  std::string train_alpha_mode = "adaptive";
  std::string train_c = "auto";
  std::vector<int64_t> hidden{256, 128};
  int64_t subset = 0, batch_size = 64, test_batch = 1000;
  tcfg.opt.method = ahtsgd::Method::ahtsgd;
  tcfg.opt.noise_scale.noise_init = 0.005;
  train->add_option("--data-dir", tcfg.data_dir,
                    "Dataset directory (default: $AHTSGD_DATA_DIR or data/mnist)");
  train->add_option("--init", train_init, "zeros | kaiming")->capture_default_str();
  train->add_option("--method", train_method, "sgd | sgld | levy_fixed | ahtsgd")
      ->capture_default_str();
  train->add_option("--alpha-mode", train_alpha_mode, "adaptive | annealing")
      ->capture_default_str();
  train->add_option("--fixed-alpha", tcfg.opt.fixed_alpha, "Tail index for levy_fixed")
      ->capture_default_str();
  train->add_option("--eta", tcfg.opt.eta, "Learning rate")->capture_default_str();
  train->add_option("--noise-init", tcfg.opt.noise_scale.noise_init,
                    "Initial noise variance scale")
      ->capture_default_str();
  train->add_option("--gamma", tcfg.opt.noise_scale.gamma, "Noise decay exponent")
      ->capture_default_str();
  train->add_option("--k", tcfg.opt.alpha_schedule.k, "Annealing rate for alpha")
      ->capture_default_str();
  train->add_option("--v", tcfg.opt.alpha_schedule.v, "Sigmoid steepness (adaptive)")
      ->capture_default_str();
  train->add_option("--c", train_c, "Sigmoid midpoint (adaptive), number or 'auto'")
      ->capture_default_str();
  train->add_option("--lambda", tcfg.opt.alpha_schedule.lambda, "Alpha smoothing rate")
      ->capture_default_str();
  train->add_option("--rho", tcfg.opt.rho, "Sharpness EMA rate")->capture_default_str();
  train->add_option("--probes", tcfg.opt.probes_per_step, "Hutchinson probes per measurement")
      ->capture_default_str();
  train->add_option("--probe-every", tcfg.opt.probe_every,
                    "Steps between sharpness measurements (0 disables)")
      ->capture_default_str();
  train->add_option("--warmup-steps", tcfg.opt.warmup_steps,
                    "Sharpness readings used to calibrate c=auto")
      ->capture_default_str();
  train->add_option("--momentum", tcfg.opt.momentum, "Momentum coefficient")
      ->capture_default_str();
  train->add_option("--weight-decay", tcfg.opt.weight_decay, "L2 coefficient")
      ->capture_default_str();
  train->add_option("--hidden", hidden, "Hidden layer sizes")->capture_default_str();
  train->add_option("--epochs", tcfg.epochs, "Training epochs")->capture_default_str();
  train->add_option("--seeds", tcfg.seeds, "Seeds to sweep")->capture_default_str();
  train->add_option("--subset", subset, "Train on the first n shuffled examples (0 = all)")
      ->capture_default_str();
  train->add_option("--batch-size", batch_size, "Training batch size")->capture_default_str();
  train->add_option("--test-batch", test_batch, "Evaluation batch size")->capture_default_str();
  train->add_option("--log-every", tcfg.log_every, "Training-row logging cadence")
      ->capture_default_str();
  train->add_flag("--track-lambda-max,!--no-track-lambda-max", tcfg.track_lambda_max,
                  "Per-epoch largest-eigenvalue diagnostic")
      ->capture_default_str();
  train->add_option("--jobs", tcfg.jobs, "Concurrent seeds")->capture_default_str();
  train->add_option("-o,--out", tcfg.out_dir, "Output directory")->capture_default_str();
  train->callback([&] {
    tcfg.opt.method = ahtsgd::parse_method(train_method);
    tcfg.mlp.init = parse_init(train_init);
    tcfg.opt.alpha_schedule.mode = parse_alpha_mode(train_alpha_mode);
    if (train_c == "auto") {
      tcfg.opt.c_auto = true;
    } else {
      tcfg.opt.c_auto = false;
      tcfg.opt.alpha_schedule.c = parse_double_flag(train_c, "--c");
    }
    tcfg.mlp.layer_sizes.assign({784});
    for (int64_t h : hidden) tcfg.mlp.layer_sizes.push_back(h);
    tcfg.mlp.layer_sizes.push_back(10);
    tcfg.subset = subset;
    tcfg.batch_size = batch_size;
    tcfg.test_batch = test_batch;
    echo_config(train, tcfg.out_dir);
    auto sweep = ahtsgd::run_train(tcfg);
    for (const auto& run : sweep.per_seed)
      std::cout << "seed=" << run.seed << " final_test_accuracy=" << fmt(run.test_accuracy.back())
                << "\n";
    std::vector<double> finals;
    for (const auto& run : sweep.per_seed) finals.push_back(run.test_accuracy.back());
    std::cout << "mean_final_test_accuracy=" << fmt(ahtsgd::mean(finals)) << "\n"
              << "wrote " << sweep.aggregate_path << "\n";
  });

  // ---- schedules ----
  auto* schedules = app.add_subcommand("schedules", "Trace the alpha/sigma schedules");
  ahtsgd::SchedulesConfig hcfg;
  hcfg.out_dir = "runs/schedules";
  std::string sched_mode = "annealing";
  schedules->add_option("--mode", sched_mode, "adaptive | annealing")->capture_default_str();
  schedules->add_option("--k", hcfg.schedule.k, "Annealing rate")->capture_default_str();
  schedules->add_option("--v", hcfg.schedule.v, "Sigmoid steepness")->capture_default_str();
  schedules->add_option("--c", hcfg.schedule.c, "Sigmoid midpoint")->capture_default_str();
  schedules->add_option("--lambda", hcfg.schedule.lambda, "Alpha smoothing rate")
      ->capture_default_str();
  schedules->add_option("--alpha0", hcfg.schedule.alpha, "Starting alpha (adaptive)")
      ->capture_default_str();
  schedules->add_option("--sharpness", hcfg.fed_sharpness, "Constant EMA input (adaptive)")
      ->capture_default_str();
  schedules->add_option("--noise-init", hcfg.noise.noise_init, "Initial noise variance scale")
      ->capture_default_str();
  schedules->add_option("--gamma", hcfg.noise.gamma, "Noise decay exponent")
      ->capture_default_str();
  schedules->add_option("--steps", hcfg.steps, "Trace length")->capture_default_str();
  schedules->add_option("-o,--out", hcfg.out_dir, "Output directory")->capture_default_str();
  schedules->callback([&] {
    hcfg.schedule.mode = parse_alpha_mode(sched_mode);
    echo_config(schedules, hcfg.out_dir);
    ahtsgd::run_schedules(hcfg);
    std::cout << "wrote " << hcfg.out_dir << "/trace.csv\n";
  });

  // ---- theory ----
  auto* theory = app.add_subcommand("theory", "Tabulate the analytic calculators over a grid");
  ahtsgd::TheoryConfig ycfg;
  ycfg.out_dir = "runs/theory";
  std::string calc = "escape_time";
  std::vector<double> alpha_grid{1.0, 2.0, 0.1}, sigma_grid{0.1, 1.0, 0.1},
      lambda_grid{10.0, 400.0, 39.0};
  theory
      ->add_option("--calc", calc,
                   "escape_time | escape_ratio | suboptimality | early_acceleration | convergence")
      ->capture_default_str();
  theory->add_option("--barrier", ycfg.h, "Barrier height H")->capture_default_str();
  theory->add_option("--eta", ycfg.eta, "Learning rate")->capture_default_str();
  theory->add_option("--gamma", ycfg.gamma, "Decay exponent")->capture_default_str();
  theory->add_option("--horizon", ycfg.horizon, "Step horizon T")->capture_default_str();
  theory->add_option("--alpha-grid", alpha_grid, "start stop step")
      ->expected(3)
      ->capture_default_str();
  theory->add_option("--sigma-grid", sigma_grid, "start stop step")
      ->expected(3)
      ->capture_default_str();
  theory->add_option("--lambda-grid", lambda_grid, "start stop step")
      ->expected(3)
      ->capture_default_str();
  theory->add_option("-o,--out", ycfg.out_dir, "Output directory")->capture_default_str();
  theory->callback([&] {
    ycfg.calculator = calc;
    ycfg.alpha = parse_grid(alpha_grid);
    ycfg.sigma = parse_grid(sigma_grid);
    ycfg.lambda_max = parse_grid(lambda_grid);
    echo_config(theory, ycfg.out_dir);
    ahtsgd::run_theory(ycfg);
    std::cout << "wrote " << ycfg.out_dir << "/table.csv\n";
  });

  // ---- fetch-mnist ----
  auto* fetch = app.add_subcommand("fetch-mnist", "Download and checksum-verify the dataset");
  std::string fetch_dir;
  std::vector<std::string> mirrors{
      "https://ossci-datasets.s3.amazonaws.com/mnist",
      "https://storage.googleapis.com/cvdf-datasets/mnist",
      "http://yann.lecun.com/exdb/mnist",
  };
  bool force = false;
  fetch->add_option("--data-dir", fetch_dir,
                    "Destination directory (default: $AHTSGD_DATA_DIR or data/mnist)");
  fetch->add_option("--mirror", mirrors, "Mirror base URLs, tried in order")
      ->capture_default_str();
  fetch->add_flag("--force", force, "Re-download even if files verify");
  fetch->callback([&] {
    exit_code = run_fetch_mnist(ahtsgd::resolve_data_dir(fetch_dir), mirrors, force);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  } catch (const ahtsgd::ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ahtsgd::ParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ahtsgd::IoError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ahtsgd::CurvatureError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ahtsgd::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
