#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace cbbre {

/// Monte Carlo (or deterministic) estimate with the manifest needed to reproduce it.
struct MCEstimate {
  double value = 0.0;
  double se = 0.0;  // zero for deterministic methods
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::string method;
};

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
  double var = 0.0;
};

/// Mean and standard error, accumulated in index order.
MeanSE mean_se(const std::vector<double>& x);

/// Weighted-sample ratio estimate sum(w f)/sum(w) with delta-method SE.
MeanSE weighted_mean_se(const std::vector<double>& f, const std::vector<double>& w);

/// Kish effective sample size of nonnegative weights.
double effective_sample_size(const std::vector<double>& w);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// KS distance between a weighted empirical CDF and an unweighted one.
double ks_weighted(const std::vector<double>& a, const std::vector<double>& wa, std::vector<double> b);

/// KS distance between samples and a continuous CDF.
double ks_vs_cdf(std::vector<double> x, const std::function<double(double)>& cdf);

/// Least-squares slope of y on x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cbbre
