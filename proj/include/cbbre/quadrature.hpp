#pragma once

#include <functional>
#include <vector>

namespace cbbre {

/// Nodes and probability weights of the generalized Gauss-Laguerre rule for
/// the Gamma(shape, 1) law (weight x^{shape-1} e^{-x} / Gamma(shape)).
struct GammaRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Cached Golub-Welsch rule with n nodes.
const GammaRule& gamma_rule(double shape, int n);

struct GammaExpectation {
  double value = 0.0;
  int order = 0;          // Laguerre order reached, 0 if the adaptive fallback was used
  double delta = 0.0;     // difference between the last two orders
  bool fallback = false;
};

/// E[g(Gamma_shape)] with order escalation until two successive orders agree to tol
/// (relative to max(1,|value|)); falls back to adaptive double-exponential quadrature.
GammaExpectation gamma_expectation(double shape, const std::function<double(double)>& g, double tol = 1e-10);

/// Adaptive Gauss-Kronrod (61-point) on [a,b].
double integrate_gk(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                    double* err = nullptr, double* l1 = nullptr, int max_depth = 18);

/// Double-exponential rule on [a, inf) (exp-sinh), handles endpoint singularities at a.
double integrate_half_line(const std::function<double(double)>& f, double a = 0.0, double tol = 1e-12,
                           double* err = nullptr);

/// Double-exponential rule on finite [a,b] (tanh-sinh).
double integrate_finite_de(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                           double* err = nullptr);

/// Uniform grid integration weights (trapezoid) for n points with spacing h.
std::vector<double> trapezoid_weights(std::size_t n, double h);

/// Composite Simpson weights; n must be odd.
std::vector<double> simpson_weights(std::size_t n, double h);

}  // namespace cbbre
