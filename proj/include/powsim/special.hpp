#pragma once

#include <cstdint>

// Special functions backing the distribution kernel: regularized incomplete
// gamma/beta, the standard normal cdf/quantile, and Kolmogorov-Smirnov
// distribution helpers.

namespace powsim::special {

// Regularized lower incomplete gamma P(a, x).  Series for x < a+1,
// continued fraction otherwise.  a > 0, x >= 0.
double reg_inc_gamma(double a, double x);

// Upper tail Q(a, x) = 1 - P(a, x), computed without cancellation.
double reg_inc_gamma_upper(double a, double x);

// Regularized incomplete beta I_x(a, b).  Continued fraction (modified
// Lentz), switching to the symmetric form at x > (a+1)/(a+b+2).
double reg_inc_beta(double a, double b, double x);

// log Beta(a, b)
double log_beta(double a, double b);

// log C(n, k)
double log_choose(double n, double k);

// Standard normal cdf, double precision via erfc.
double normal_cdf(double x);

// Standard normal quantile.  Wichura's algorithm AS 241 (PPND16).
double normal_quantile(double p);

// Inverse of reg_inc_beta in x for fixed (a, b).  Used for Clopper-Pearson
// bounds and the F/t quantiles.
double inc_beta_inv(double a, double b, double p);

// Asymptotic Kolmogorov distribution: P(sqrt(n) D <= t) as n -> infinity.
double kolmogorov_cdf(double t);

// Exact P(D_n < d) for the one-sample KS statistic (no ties), via the
// Marsaglia-Tsang-Wang matrix method.  Intended for n <= ~140.
double ks_exact_cdf(int n, double d);

}  // namespace powsim::special
