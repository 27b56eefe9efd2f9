#ifndef AHTSGD_STATS_HPP
#define AHTSGD_STATS_HPP

#include <functional>
#include <vector>

namespace ahtsgd {

// Quantile with linear interpolation between order statistics (the common
// "type 7" rule): position (n-1)*q between sorted neighbors. q in [0, 1],
// xs nonempty (throws ParameterError otherwise).
double quantile(std::vector<double> xs, double q);
double median(std::vector<double> xs);

double mean(const std::vector<double>& xs);
// Unbiased (n-1 denominator) sample variance; needs n >= 2.
double sample_variance(const std::vector<double>& xs);
double sample_sd(const std::vector<double>& xs);

// Standard normal CDF.
double normal_cdf(double x);

// One-sample Kolmogorov-Smirnov test of xs against a continuous CDF.
// Returns the asymptotic p-value Q_KS((sqrt(n) + 0.12 + 0.11/sqrt(n)) * D)
// where D is the sup-distance between the empirical and reference CDFs.
double ks_test_pvalue(std::vector<double> xs, const std::function<double(double)>& cdf);

// One-sided Mann-Whitney U test with the alternative "xs stochastically
// smaller than ys". Normal approximation with midranks, tie correction,
// and continuity correction; returns the p-value. Ties are routine here:
// censored escape times pile up at the step cap.
double mann_whitney_less_pvalue(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace ahtsgd

#endif  // AHTSGD_STATS_HPP
