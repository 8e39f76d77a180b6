#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "powsim/distribution.hpp"
#include "powsim/rng.hpp"

// Classical hypothesis tests.  Each returns a TestResult whose p-value is
// Uniform(0,1) under the null, exactly or asymptotically.  Degenerate data
// (zero variance, empty groups, all ties) yields valid == false instead of
// an exception; parameter errors throw std::invalid_argument.

namespace powsim::tests {

struct TestResult {
    double statistic = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> df;   // first (or only) degrees of freedom
    std::optional<double> df2;  // denominator df where applicable
    double p_value = std::numeric_limits<double>::quiet_NaN();
    bool valid = true;
    std::string note;

    static TestResult invalid(std::string why) {
        TestResult r;
        r.valid = false;
        r.note = std::move(why);
        return r;
    }
};

struct ContingencyTable {
    int rows = 0, cols = 0;
    std::vector<double> cells;  // row-major counts

    ContingencyTable(int r, int c, std::vector<double> v);
    double operator()(int i, int j) const { return cells[static_cast<size_t>(i) * cols + j]; }
    double row_total(int i) const;
    double col_total(int j) const;
    double total() const;
};

// -- one-sample ------------------------------------------------------------

// Exact two-sided binomial test (minimum-likelihood method, relative
// tolerance 1e-7 on the pmf comparison).
TestResult binom_exact_test(int64_t x, int64_t n, double p0);

// Score test of a proportion, chi-squared form, no continuity correction.
TestResult prop_score_test(int64_t x, int64_t n, double p0);

TestResult z_test_one_sample(std::span<const double> x, double mu0, double sigma);
TestResult t_test_one_sample(std::span<const double> x, double mu0);
TestResult paired_t_test(std::span<const double> x, std::span<const double> y);

// Two-sided chi-squared variance test; p = min(1, 2 min(F(t), 1-F(t))).
TestResult variance_chisq_test(std::span<const double> x, double sigma0_sq);

TestResult sign_test(std::span<const double> x, double median0);

// Wilcoxon signed-rank; exact null distribution when n <= 25 and magnitudes
// untied, otherwise normal approximation with tie and continuity correction.
TestResult wilcoxon_signed_rank(std::span<const double> x, double mu0);
TestResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y);

// Goodness of fit against fixed cell probabilities, with an optional df
// reduction for parameters estimated from the raw data.
TestResult chisq_gof(std::span<const int64_t> counts, std::span<const double> probs0,
                     int df_reduction);

// Count observations into right-closed bins (-inf,b1],(b1,b2],...,(bk,inf).
std::vector<int64_t> bin_continuous(std::span<const double> x,
                                    std::span<const double> breakpoints);
// Turn cdf values at the finite breakpoints into bin probabilities.
std::vector<double> model_probs(std::span<const double> cdf_at_breakpoints);

// One-sample Kolmogorov-Smirnov.  Exact p for n <= 100 without ties, else
// asymptotic Kolmogorov distribution of sqrt(n) D.
TestResult ks_test_one_sample(std::span<const double> x, const prob::Distribution& target);

// -- two-sample ------------------------------------------------------------

TestResult t_test_two_sample(std::span<const double> x, std::span<const double> y, bool pooled);
TestResult z_test_two_sample(std::span<const double> x, std::span<const double> y, double sigma_x,
                             double sigma_y);
TestResult var_ratio_f_test(std::span<const double> x, std::span<const double> y);

// Monte Carlo randomization tests; the base test is the Welch two-sample t
// (unpaired) or the one-sample t on differences (paired).
TestResult randomization_test_unpaired(std::span<const double> x, std::span<const double> y,
                                       int inner_reps, prob::RandomSource& rng);
TestResult randomization_test_paired(std::span<const double> d, int inner_reps,
                                     prob::RandomSource& rng);

// -- association -----------------------------------------------------------

TestResult chisq_contingency(const ContingencyTable& tab);

// rho0 == 0: t form with df n-2; otherwise Fisher z transform.
TestResult cor_test(std::span<const double> x, std::span<const double> y, double rho0);

// -- multivariate ----------------------------------------------------------

// Hotelling T^2 against mu0; X is row-major n x p.  F = (n-p)/(p(n-1)) T^2.
TestResult hotelling_one_sample(std::span<const double> X, int n, int p,
                                std::span<const double> mu0);
// Two-sample Hotelling with pooled covariance; df (p, n1+n2-p-1).
TestResult hotelling_two_sample(std::span<const double> X, int n1, std::span<const double> Y,
                                int n2, int p);

}  // namespace powsim::tests
