#include "ahtsgd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ahtsgd/errors.hpp"

namespace ahtsgd {

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw ParameterError("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("quantile level must be in [0, 1]");
  std::sort(xs.begin(), xs.end());
  double pos = q * static_cast<double>(xs.size() - 1);
  auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= xs.size()) return xs.back();
  double frac = pos - static_cast<double>(lo);
  return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw ParameterError("mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) throw ParameterError("sample variance needs n >= 2");
  double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

double sample_sd(const std::vector<double>& xs) { return std::sqrt(sample_variance(xs)); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

namespace {

// Kolmogorov tail function Q_KS(lambda) = 2 sum_k (-1)^(k-1) exp(-2 k^2 lambda^2).
double ks_q(double lambda) {
  double acc = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    acc += sign * term;
    if (term < 1e-16 * std::abs(acc)) break;
    sign = -sign;
  }
  return std::min(1.0, std::max(0.0, 2.0 * acc));
}

}  // namespace

double ks_test_pvalue(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw ParameterError("KS test on empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = cdf(xs[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  double sqrt_n = std::sqrt(n);
  return ks_q((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
}

double mann_whitney_less_pvalue(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.empty() || ys.empty()) throw ParameterError("Mann-Whitney needs two nonempty samples");
  const std::size_t n = xs.size(), m = ys.size(), total = n + m;

  // Pool, tagging each value with its sample, then midrank.
  std::vector<std::pair<double, int>> pooled;
  pooled.reserve(total);
  for (double x : xs) pooled.emplace_back(x, 0);
  for (double y : ys) pooled.emplace_back(y, 1);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double rank_sum_x = 0.0;
  double tie_term = 0.0;  // sum over tie groups of t^3 - t
  std::size_t i = 0;
  while (i < total) {
    std::size_t j = i;
    while (j < total && pooled[j].first == pooled[i].first) ++j;
    double t = static_cast<double>(j - i);
    double midrank = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k)
      if (pooled[k].second == 0) rank_sum_x += midrank;
    tie_term += t * t * t - t;
    i = j;
  }

  const double nd = static_cast<double>(n), md = static_cast<double>(m),
               nt = static_cast<double>(total);
  double u = rank_sum_x - nd * (nd + 1.0) / 2.0;
  double mu = nd * md / 2.0;
  double var = nd * md / 12.0 * ((nt + 1.0) - tie_term / (nt * (nt - 1.0)));
  if (var <= 0.0) {
    // Everything tied: no evidence either way.
    if (u < mu) return 0.0;
    return u > mu ? 1.0 : 0.5;
  }
  double z = (u - mu + 0.5) / std::sqrt(var);  // continuity-corrected, small U favored
  return normal_cdf(z);
}

}  // namespace ahtsgd
