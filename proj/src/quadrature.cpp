#include "cbbre/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "cbbre/error.hpp"

namespace cbbre {

namespace {

GammaRule build_rule(double shape, int n) {
  // Jacobi matrix of the monic Laguerre polynomials L^{(a)}, a = shape - 1.
  const double a = shape - 1.0;
  Eigen::VectorXd diag(n), sub(n - 1);
  for (int i = 0; i < n; ++i) diag(i) = 2.0 * i + a + 1.0;
  for (int i = 1; i < n; ++i) sub(i - 1) = std::sqrt(static_cast<double>(i) * (i + a));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  GammaRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    r.x[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.w[i] = v0 * v0;
  }
  return r;
}

}  // namespace

const GammaRule& gamma_rule(double shape, int n) {
  require(shape > 0.0 && n >= 2, ErrorKind::Parameter, "gamma rule needs shape > 0 and n >= 2");
  static std::mutex mu;
  static std::map<std::pair<double, int>, std::unique_ptr<GammaRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{shape, n}];
  if (!slot) slot = std::make_unique<GammaRule>(build_rule(shape, n));
  return *slot;
}

GammaExpectation gamma_expectation(double shape, const std::function<double(double)>& g, double tol) {
  require(shape > 0.0, ErrorKind::Parameter, "Gamma shape must be positive");
  GammaExpectation out;
  double prev = 0.0;
  bool have_prev = false;
  for (int n : {16, 32, 64, 128, 256}) {
    const GammaRule& rule = gamma_rule(shape, n);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += rule.w[i] * g(rule.x[i]);
    if (have_prev) {
      out.delta = std::abs(s - prev);
      if (out.delta <= tol * std::max(1.0, std::abs(s))) {
        out.value = s;
        out.order = n;
        return out;
      }
    }
    prev = s;
    have_prev = true;
  }
  const double lg = boost::math::lgamma(shape);
  auto integrand = [&](double x) {
    if (x <= 0.0) return 0.0;
    const double logw = (shape - 1.0) * std::log(x) - x - lg;
    return std::exp(logw) * g(x);
  };
  double err = 0.0;
  out.value = integrate_half_line(integrand, 0.0, 1e-13, &err);
  out.fallback = true;
  out.order = 0;
  out.delta = err;
  return out;
}

double integrate_gk(const std::function<double(double)>& f, double a, double b, double tol, double* err, double* l1,
                    int max_depth) {
  double e = 0.0, l = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, max_depth, tol, &e, &l);
  if (err) *err = e;
  if (l1) *l1 = l;
  return v;
}

double integrate_half_line(const std::function<double(double)>& f, double a, double tol, double* err) {
  boost::math::quadrature::exp_sinh<double> integrator;
  double e = 0.0, l1 = 0.0;
  const double v = integrator.integrate([&](double x) { return f(x); }, a, std::numeric_limits<double>::infinity(),
                                        tol, &e, &l1);
  if (err) *err = e;
  return v;
}

double integrate_finite_de(const std::function<double(double)>& f, double a, double b, double tol, double* err) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  double e = 0.0, l1 = 0.0;
  const double v = integrator.integrate([&](double x) { return f(x); }, a, b, tol, &e, &l1);
  if (err) *err = e;
  return v;
}

std::vector<double> trapezoid_weights(std::size_t n, double h) {
  std::vector<double> w(n, h);
  if (n > 0) {
    w.front() *= 0.5;
    w.back() *= 0.5;
  }
  return w;
}

std::vector<double> simpson_weights(std::size_t n, double h) {
  require(n >= 3 && n % 2 == 1, ErrorKind::Parameter, "Simpson needs an odd number of nodes");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = (i == 0 || i == n - 1) ? h / 3.0 : (i % 2 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
  return w;
}

}  // namespace cbbre
