#include "cbbre/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cbbre/error.hpp"

namespace cbbre {

MeanSE mean_se(const std::vector<double>& x) {
  MeanSE r;
  const std::size_t n = x.size();
  if (n == 0) return r;
  double s = 0.0;
  for (double v : x) s += v;
  r.mean = s / static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) ss += (v - r.mean) * (v - r.mean);
  r.var = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
  r.se = std::sqrt(r.var / static_cast<double>(n));
  return r;
}

MeanSE weighted_mean_se(const std::vector<double>& f, const std::vector<double>& w) {
  require(f.size() == w.size(), ErrorKind::Parameter, "weighted_mean_se size mismatch");
  MeanSE r;
  const std::size_t n = f.size();
  double sw = 0.0, swf = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    swf += w[i] * f[i];
  }
  if (sw <= 0.0) return r;
  r.mean = swf / sw;
  const double wbar = sw / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = w[i] * (f[i] - r.mean);
    acc += d * d;
  }
  r.var = acc / static_cast<double>(n) / (wbar * wbar);
  r.se = std::sqrt(r.var / static_cast<double>(n));
  return r;
}

double effective_sample_size(const std::vector<double>& w) {
  double s = 0.0, s2 = 0.0;
  for (double v : w) {
    s += v;
    s2 += v * v;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), ErrorKind::Parameter, "KS needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j])) x = a[i];
    else x = b[j];
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_weighted(const std::vector<double>& a, const std::vector<double>& wa, std::vector<double> b) {
  require(a.size() == wa.size() && !a.empty() && !b.empty(), ErrorKind::Parameter, "weighted KS size mismatch");
  std::vector<std::size_t> idx(a.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t p, std::size_t q) { return a[p] < a[q]; });
  std::sort(b.begin(), b.end());
  const double wsum = std::accumulate(wa.begin(), wa.end(), 0.0);
  require(wsum > 0.0, ErrorKind::Parameter, "weighted KS needs positive total weight");
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double fa = 0.0, d = 0.0;
  while (i < idx.size() || j < b.size()) {
    double x;
    if (j >= b.size() || (i < idx.size() && a[idx[i]] <= b[j])) x = a[idx[i]];
    else x = b[j];
    while (i < idx.size() && a[idx[i]] <= x) fa += wa[idx[i++]];
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(fa / wsum - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_vs_cdf(std::vector<double> x, const std::function<double(double)>& cdf) {
  require(!x.empty(), ErrorKind::Parameter, "KS needs samples");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace cbbre
