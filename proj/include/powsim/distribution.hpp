#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "powsim/rng.hpp"

// Distribution kernel: parametric families used by the data-generating
// models, with cdf/quantile evaluation and inverse-cdf sampling.

namespace powsim::prob {

struct Normal {
    double mu, sigma;
};
struct LogNormal {
    double meanlog, sdlog;
};
struct Uniform {
    double min, max;
};
struct Binomial {
    int64_t n;
    double p;
};
struct Bernoulli {
    double p;
};
struct ChiSquared {
    double df;
};
struct StudentT {
    double df;
};
struct FisherF {
    double df1, df2;
};
struct NoncentralT {
    double df, ncp;
};
struct NoncentralChiSquared {
    double df, ncp;
};
struct NoncentralF {
    double df1, df2, ncp;
};

using Distribution =
    std::variant<Normal, LogNormal, Uniform, Binomial, Bernoulli, ChiSquared, StudentT,
                 FisherF, NoncentralT, NoncentralChiSquared, NoncentralF>;

// Throws std::invalid_argument when parameters violate the family's domain
// (sigma > 0, min < max, 0 <= p <= 1, df > 0, ncp >= 0, ...).
void validate(const Distribution& d);

// P(X <= x).  Right-continuous step function for the discrete kinds.
double cdf(const Distribution& d, double x);

// inf{x : cdf(x) >= p}.  Continuous kinds invert the cdf numerically to
// |cdf(q) - p| <= 1e-10; discrete kinds use the generalized inverse.
double quantile(const Distribution& d, double p);

// Binomial point mass, computed in log space.
double binom_pmf(int64_t k, int64_t n, double p);

// One inverse-cdf draw; exactly one uniform consumed per variate.
double sample(const Distribution& d, RandomSource& rng);
std::vector<double> sample_n(const Distribution& d, size_t n, RandomSource& rng);

// Multinomial draw by conditional binomials.  probs must sum to 1 (1e-12).
std::vector<int64_t> sample_multinomial(int64_t size, const std::vector<double>& probs,
                                        RandomSource& rng);

// Symmetric positive semi-definite covariance matrix (row-major storage).
struct CovarianceMatrix {
    int dim = 0;
    std::vector<double> entries;

    CovarianceMatrix() = default;
    CovarianceMatrix(int d, std::vector<double> e);

    double operator()(int i, int j) const { return entries[static_cast<size_t>(i) * dim + j]; }
    double& operator()(int i, int j) { return entries[static_cast<size_t>(i) * dim + j]; }

    // Lower-triangular factor L with Sigma = L L'.  Pivot tolerance
    // 1e-10 * max|entry|; zero pivots allowed, negative pivots rejected.
    std::vector<double> cholesky_psd() const;
};

// n i.i.d. rows from N(mu, sigma); row-major n x dim.
std::vector<double> sample_mvnormal(size_t n, const std::vector<double>& mu,
                                    const CovarianceMatrix& sigma, RandomSource& rng);

}  // namespace powsim::prob
