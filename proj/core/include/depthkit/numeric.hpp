#pragma once

#include <functional>
#include <span>
#include <vector>

namespace depthkit::num {

/// Standard normal CDF, Phi(x) = erfc(-x / sqrt(2)) / 2.
double normal_cdf(double x);

/// Standard normal quantile, bisection-inverted to an |Phi(x) - p| <= 1e-12
/// bracket.  Requires p in (0, 1).
double normal_quantile(double p);

/// Regularized incomplete beta function I_x(a, b), continued-fraction
/// evaluation (modified Lentz).
double reg_inc_beta(double a, double b, double x);

/// Upper-alpha quantile of the F(d1, d2) distribution: the x with
/// P(F > x) = alpha, solved through the incomplete beta to 1e-10.
double f_quantile_upper(double d1, double d2, double alpha);

/// Recursive adaptive Simpson quadrature with an absolute error target.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth = 50);

/// Sample median (average of middle pair for even n).  Copies and sorts.
double median(std::vector<double> v);

/// Linear-interpolation quantile of an unsorted sample, q in [0, 1]
/// (the convention most stats packages default to).
double quantile(std::vector<double> v, double q);

double mean(std::span<const double> v);
double stddev(std::span<const double> v);  // sample (n-1) denominator

}  // namespace depthkit::num
