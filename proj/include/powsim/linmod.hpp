#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "powsim/testkit.hpp"

// Linear-model engine: design matrices with factor/contrast coding, OLS with
// Wald and nested-F inference, balanced ANOVA with error strata, and the
// binomial GLM with likelihood-ratio tests.

namespace powsim::linmod {

struct FactorSpec {
    std::string name;
    std::vector<std::string> levels;
    // Custom contrast matrix, row-major levels x (levels-1); empty means
    // treatment coding (first level is the baseline).
    std::vector<double> contrast;

    int n_levels() const { return static_cast<int>(levels.size()); }
    bool has_contrast() const { return !contrast.empty(); }
    double contrast_at(int level, int col) const {
        return contrast[static_cast<size_t>(level) * (levels.size() - 1) + col];
    }
    // Every custom contrast column must sum to zero.
    bool columns_sum_to_zero(double tol = 1e-9) const;
    // sum_i c_ij c_ik == 0 for all column pairs j != k.
    bool orthogonal(double tol = 1e-9) const;
};

// One input variable: either a numeric covariate or a coded factor.
struct Variable {
    std::string name;
    bool is_factor = false;
    std::vector<double> values;   // numeric covariate
    std::vector<int> level_idx;   // 0-based level per row
    FactorSpec factor;

    static Variable numeric(std::string name, std::vector<double> v);
    static Variable from_factor(FactorSpec spec, std::vector<int> level_idx);
    size_t size() const { return is_factor ? level_idx.size() : values.size(); }
};

struct TermSpan {
    std::string name;
    int start = 0;
    int width = 0;
};

struct DesignMatrix {
    Eigen::MatrixXd X;
    std::vector<std::string> colnames;
    std::vector<TermSpan> terms;

    int n_rows() const { return static_cast<int>(X.rows()); }
    int n_cols() const { return static_cast<int>(X.cols()); }
};

// Build the model matrix for the given terms (each term is a list of
// variable names; several names form an interaction).  Treatment coding
// drops the first level; custom contrasts substitute where specified.
// Throws when the resulting matrix is rank deficient, naming the aliased
// columns.
DesignMatrix build_design(const std::vector<Variable>& vars,
                          const std::vector<std::vector<std::string>>& formula_terms,
                          bool intercept = true);

struct OlsFit {
    std::vector<std::string> names;
    Eigen::VectorXd coef;
    double rss = 0.0;
    double df_residual = 0.0;
    double sigma2 = 0.0;
    int rank = 0;
    Eigen::MatrixXd xtx_inv;  // for coefficient standard errors
    Eigen::MatrixXd X;        // retained for nestedness checks
    Eigen::VectorXd y;
};

OlsFit ols_fit(const DesignMatrix& design, std::span<const double> y);

// t test of a single coefficient against zero.
tests::TestResult wald_coef_test(const OlsFit& fit, const std::string& coef_name);

// F test of the full model against a nested null model (same response).
tests::TestResult nested_f_test(const OlsFit& fit_null, const OlsFit& fit_full);

struct OneWayAnova {
    tests::TestResult omnibus;
    double ss_between = 0.0, ss_within = 0.0;
    double df_between = 0.0, df_within = 0.0;
    std::vector<tests::TestResult> contrast_tests;
    std::vector<double> contrast_ss;
};

// One-way fixed-effects ANOVA; contrasts (row-major k x c) yield
// single-df F tests against the within mean square.
OneWayAnova anova_oneway(std::span<const double> y, std::span<const int> group,
                         int n_groups, const std::vector<double>& contrasts = {},
                         int n_contrasts = 0);

// ---- error-strata ANOVA (balanced designs only) ---------------------------

struct TermRef {
    std::string name;
    std::vector<std::string> factors;  // factor names forming the term
};

struct StratumSpec {
    std::string name;
    std::vector<std::string> grouping;  // factors whose cells span the stratum
    std::vector<TermRef> tested;        // fixed terms tested inside this stratum
};

struct StrataLayout {
    std::vector<StratumSpec> strata;  // in Error(...) order; Within is implicit
    std::vector<TermRef> within_terms;
};

struct TermResult {
    std::string name;
    double ss = 0.0, df = 0.0, ms = 0.0;
};

struct StratumResult {
    std::string name;
    double ss = 0.0, df = 0.0, ms = 0.0;
    std::vector<TermResult> terms;
    double resid_ss = 0.0, resid_df = 0.0, resid_ms = 0.0;
};

struct StrataResults {
    std::vector<StratumResult> strata;  // layout strata followed by "Within"
    double total_ss = 0.0, total_df = 0.0;

    const StratumResult& stratum(const std::string& name) const;
};

// Balanced-design sums of squares per stratum.  Unbalanced input throws.
StrataResults anova_strata(const StrataLayout& layout, const std::vector<Variable>& factors,
                           std::span<const double> y);

tests::TestResult f_ratio(double ms_num, double df_num, double ms_den, double df_den);

// ---- method-of-moments variance components --------------------------------

struct VcTerm {
    std::string stratum;
    bool use_residual = false;  // stratum residual MS instead of the stratum MS
    double coef = 1.0;
};

struct VcSpec {
    std::string name;
    std::vector<VcTerm> terms;
    double divisor = 1.0;
};

struct VarianceComponent {
    std::string name;
    double value = 0.0;         // sd scale, truncated at zero
    double raw_variance = 0.0;  // possibly negative
    bool truncated = false;
};

std::vector<VarianceComponent> variance_components(const StrataResults& ms,
                                                   const std::vector<VcSpec>& specs);

// ---- binomial GLM ----------------------------------------------------------

struct GlmFit {
    std::vector<std::string> names;
    Eigen::VectorXd coef;
    double deviance = 0.0;
    int iterations = 0;
    bool converged = false;
    bool separated = false;
};

// Logit-link ML via IRLS with step halving; convergence max|d beta| < 1e-8,
// cap 50 iterations; |beta| beyond 30 on the logit scale flags separation.
GlmFit glm_binomial_fit(const DesignMatrix& design, std::span<const double> successes,
                        std::span<const double> trials);

tests::TestResult glm_lrt(const GlmFit& null_fit, const GlmFit& full_fit);

}  // namespace powsim::linmod
