#include "powsim/linmod.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "powsim/special.hpp"

namespace powsim::linmod {

using special::reg_inc_beta;

namespace {

double f_upper(double x, double df1, double df2) {
    if (x <= 0.0) return 1.0;
    return reg_inc_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * x));
}

double t_two_sided(double t, double df) {
    return reg_inc_beta(df / 2.0, 0.5, df / (t * t + df));
}

const Variable& find_var(const std::vector<Variable>& vars, const std::string& name) {
    for (const auto& v : vars)
        if (v.name == name) return v;
    throw std::invalid_argument("unknown variable: " + name);
}

}  // namespace

bool FactorSpec::columns_sum_to_zero(double tol) const {
    int k = n_levels(), c = k - 1;
    for (int j = 0; j < c; ++j) {
        double s = 0.0;
        for (int i = 0; i < k; ++i) s += contrast_at(i, j);
        if (std::fabs(s) > tol) return false;
    }
    return true;
}

bool FactorSpec::orthogonal(double tol) const {
    int k = n_levels(), c = k - 1;
    for (int j = 0; j < c; ++j)
        for (int l = j + 1; l < c; ++l) {
            double s = 0.0;
            for (int i = 0; i < k; ++i) s += contrast_at(i, j) * contrast_at(i, l);
            if (std::fabs(s) > tol) return false;
        }
    return true;
}

Variable Variable::numeric(std::string name, std::vector<double> v) {
    Variable out;
    out.name = std::move(name);
    out.values = std::move(v);
    return out;
}

Variable Variable::from_factor(FactorSpec spec, std::vector<int> level_idx) {
    if (spec.n_levels() < 2) throw std::invalid_argument("factor needs at least two levels");
    if (spec.has_contrast()) {
        if (spec.contrast.size() !=
            static_cast<size_t>(spec.n_levels()) * (spec.n_levels() - 1))
            throw std::invalid_argument("contrast matrix must be levels x (levels-1)");
        if (!spec.columns_sum_to_zero())
            throw std::invalid_argument("contrast columns must sum to zero");
    }
    for (int ix : level_idx)
        if (ix < 0 || ix >= spec.n_levels())
            throw std::invalid_argument("factor level index out of range");
    Variable out;
    out.name = spec.name;
    out.is_factor = true;
    out.level_idx = std::move(level_idx);
    out.factor = std::move(spec);
    return out;
}

DesignMatrix build_design(const std::vector<Variable>& vars,
                          const std::vector<std::vector<std::string>>& formula_terms,
                          bool intercept) {
    if (vars.empty()) throw std::invalid_argument("build_design: no variables");
    size_t n = vars.front().size();
    for (const auto& v : vars)
        if (v.size() != n) throw std::invalid_argument("build_design: unequal variable lengths");

    // Per-variable coding columns (shared across terms).
    struct Coding {
        std::vector<std::string> labels;
        std::vector<std::vector<double>> cols;
    };
    auto code_var = [&](const Variable& v) {
        Coding c;
        if (!v.is_factor) {
            c.labels.push_back(v.name);
            c.cols.push_back(v.values);
            return c;
        }
        int k = v.factor.n_levels();
        for (int j = 0; j < k - 1; ++j) {
            std::vector<double> col(n, 0.0);
            std::string label;
            if (v.factor.has_contrast()) {
                for (size_t r = 0; r < n; ++r)
                    col[r] = v.factor.contrast_at(v.level_idx[r], j);
                label = v.name + "<c" + std::to_string(j + 1) + ">";
            } else {
                for (size_t r = 0; r < n; ++r)
                    col[r] = (v.level_idx[r] == j + 1) ? 1.0 : 0.0;
                label = v.name + v.factor.levels[static_cast<size_t>(j) + 1];
            }
            c.labels.push_back(label);
            c.cols.push_back(std::move(col));
        }
        return c;
    };

    std::vector<std::vector<double>> cols;
    std::vector<std::string> names;
    std::vector<TermSpan> spans;
    if (intercept) {
        cols.emplace_back(n, 1.0);
        names.emplace_back("(Intercept)");
        spans.push_back({"(Intercept)", 0, 1});
    }
    for (const auto& term : formula_terms) {
        if (term.empty()) throw std::invalid_argument("build_design: empty term");
        std::vector<Coding> parts;
        std::string term_name;
        for (const auto& vn : term) {
            parts.push_back(code_var(find_var(vars, vn)));
            term_name += (term_name.empty() ? "" : ":") + vn;
        }
        int start = static_cast<int>(cols.size());
        // cross product of the component codings
        std::vector<size_t> idx(parts.size(), 0);
        while (true) {
            std::vector<double> col(n, 1.0);
            std::string label;
            for (size_t p = 0; p < parts.size(); ++p) {
                const auto& src = parts[p].cols[idx[p]];
                for (size_t r = 0; r < n; ++r) col[r] *= src[r];
                label += (label.empty() ? "" : ":") + parts[p].labels[idx[p]];
            }
            cols.push_back(std::move(col));
            names.push_back(label);
            size_t p = 0;
            while (p < parts.size()) {
                if (++idx[p] < parts[p].cols.size()) break;
                idx[p] = 0;
                ++p;
            }
            if (p == parts.size()) break;
        }
        spans.push_back({term_name, start, static_cast<int>(cols.size()) - start});
    }

    DesignMatrix d;
    d.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j)
        for (size_t r = 0; r < n; ++r)
            d.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = cols[j][r];
    d.colnames = std::move(names);
    d.terms = std::move(spans);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.X);
    qr.setThreshold(1e-10);
    if (qr.rank() < d.X.cols()) {
        std::string aliased;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index i = qr.rank(); i < d.X.cols(); ++i) {
            if (!aliased.empty()) aliased += ", ";
            aliased += d.colnames[static_cast<size_t>(perm[i])];
        }
        throw std::invalid_argument("build_design: rank-deficient design, aliased columns: " +
                                    aliased);
    }
    return d;
}

OlsFit ols_fit(const DesignMatrix& design, std::span<const double> y) {
    const Eigen::MatrixXd& X = design.X;
    if (static_cast<Eigen::Index>(y.size()) != X.rows())
        throw std::invalid_argument("ols_fit: response length mismatch");
    Eigen::VectorXd yv(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) yv(i) = y[static_cast<size_t>(i)];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    int rank = static_cast<int>(qr.rank());
    if (X.rows() <= rank) throw std::invalid_argument("ols_fit: need n > rank(X)");
    OlsFit fit;
    fit.names = design.colnames;
    fit.coef = qr.solve(yv);
    Eigen::VectorXd resid = yv - X * fit.coef;
    fit.rss = resid.squaredNorm();
    fit.rank = rank;
    fit.df_residual = static_cast<double>(X.rows()) - rank;
    fit.sigma2 = fit.rss / fit.df_residual;
    fit.xtx_inv = (X.transpose() * X)
                      .ldlt()
                      .solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
    fit.X = X;
    fit.y = yv;
    return fit;
}

tests::TestResult wald_coef_test(const OlsFit& fit, const std::string& coef_name) {
    auto it = std::find(fit.names.begin(), fit.names.end(), coef_name);
    if (it == fit.names.end())
        throw std::invalid_argument("wald_coef_test: unknown coefficient " + coef_name);
    if (fit.df_residual < 1.0) return tests::TestResult::invalid("no residual degrees of freedom");
    if (fit.sigma2 <= 0.0) return tests::TestResult::invalid("zero residual variance");
    Eigen::Index j = it - fit.names.begin();
    double se = std::sqrt(fit.sigma2 * fit.xtx_inv(j, j));
    tests::TestResult r;
    r.statistic = fit.coef(j) / se;
    r.df = fit.df_residual;
    r.p_value = t_two_sided(r.statistic, fit.df_residual);
    return r;
}

tests::TestResult nested_f_test(const OlsFit& fit_null, const OlsFit& fit_full) {
    if (fit_null.y.size() != fit_full.y.size() || (fit_null.y - fit_full.y).cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument("nested_f_test: responses differ");
    double ddf = fit_full.rank - fit_null.rank;
    if (ddf <= 0.0) throw std::invalid_argument("nested_f_test: models have equal rank");
    // null design must lie in the span of the full design
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(fit_full.X);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(fit_full.X.rows(), fit_full.rank);
    Eigen::MatrixXd resid = fit_null.X - Q * (Q.transpose() * fit_null.X);
    double scale = std::fmax(1.0, fit_null.X.cwiseAbs().maxCoeff());
    if (resid.cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw std::invalid_argument("nested_f_test: null model not nested in full model");
    if (fit_full.df_residual < 1.0)
        return tests::TestResult::invalid("no residual degrees of freedom");
    tests::TestResult r;
    r.statistic = ((fit_null.rss - fit_full.rss) / ddf) / (fit_full.rss / fit_full.df_residual);
    r.df = ddf;
    r.df2 = fit_full.df_residual;
    if (fit_full.rss <= 0.0) return tests::TestResult::invalid("saturated full model");
    r.p_value = f_upper(r.statistic, ddf, fit_full.df_residual);
    return r;
}

OneWayAnova anova_oneway(std::span<const double> y, std::span<const int> group, int n_groups,
                         const std::vector<double>& contrasts, int n_contrasts) {
    if (n_groups < 2) throw std::invalid_argument("anova_oneway: need at least two groups");
    if (y.size() != group.size()) throw std::invalid_argument("anova_oneway: length mismatch");
    size_t n = y.size();
    std::vector<double> gsum(static_cast<size_t>(n_groups), 0.0);
    std::vector<double> gcnt(static_cast<size_t>(n_groups), 0.0);
    double tot = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (group[i] < 0 || group[i] >= n_groups)
            throw std::invalid_argument("anova_oneway: group index out of range");
        gsum[static_cast<size_t>(group[i])] += y[i];
        gcnt[static_cast<size_t>(group[i])] += 1.0;
        tot += y[i];
    }
    for (double c : gcnt)
        if (c < 1.0) throw std::invalid_argument("anova_oneway: empty group");
    double grand = tot / static_cast<double>(n);
    OneWayAnova out;
    out.df_between = n_groups - 1.0;
    out.df_within = static_cast<double>(n) - n_groups;
    if (out.df_within < 1.0) throw std::invalid_argument("anova_oneway: no within degrees of freedom");
    std::vector<double> gmean(static_cast<size_t>(n_groups));
    for (int g = 0; g < n_groups; ++g)
        gmean[static_cast<size_t>(g)] = gsum[static_cast<size_t>(g)] / gcnt[static_cast<size_t>(g)];
    for (int g = 0; g < n_groups; ++g)
        out.ss_between += gcnt[static_cast<size_t>(g)] *
                          (gmean[static_cast<size_t>(g)] - grand) * (gmean[static_cast<size_t>(g)] - grand);
    for (size_t i = 0; i < n; ++i) {
        double d = y[i] - gmean[static_cast<size_t>(group[i])];
        out.ss_within += d * d;
    }
    double msw = out.ss_within / out.df_within;
    out.omnibus = f_ratio(out.ss_between / out.df_between, out.df_between, msw, out.df_within);
    if (n_contrasts > 0) {
        if (contrasts.size() != static_cast<size_t>(n_groups) * n_contrasts)
            throw std::invalid_argument("anova_oneway: contrast matrix shape mismatch");
        for (int c = 0; c < n_contrasts; ++c) {
            double L = 0.0, scale = 0.0, csum = 0.0;
            for (int g = 0; g < n_groups; ++g) {
                double cg = contrasts[static_cast<size_t>(g) * n_contrasts + c];
                L += cg * gmean[static_cast<size_t>(g)];
                scale += cg * cg / gcnt[static_cast<size_t>(g)];
                csum += cg;
            }
            if (std::fabs(csum) > 1e-9)
                throw std::invalid_argument("anova_oneway: contrast coefficients must sum to zero");
            double ss = L * L / scale;
            out.contrast_ss.push_back(ss);
            out.contrast_tests.push_back(f_ratio(ss, 1.0, msw, out.df_within));
        }
    }
    return out;
}

tests::TestResult f_ratio(double ms_num, double df_num, double ms_den, double df_den) {
    tests::TestResult r;
    if (ms_den <= 0.0) return tests::TestResult::invalid("zero denominator mean square");
    r.statistic = ms_num / ms_den;
    r.df = df_num;
    r.df2 = df_den;
    r.p_value = f_upper(r.statistic, df_num, df_den);
    return r;
}

// ---- strata ----------------------------------------------------------------

namespace {

struct CellIndex {
    std::vector<int> cell_of_row;  // cell id per observation
    int n_cells = 0;
};

// Cells of the cross-classification of the named factors; throws when the
// cell counts are unequal (unbalanced).
CellIndex cross_cells(const std::vector<Variable>& factors, const std::vector<std::string>& names,
                      size_t n) {
    CellIndex ci;
    ci.cell_of_row.assign(n, 0);
    int mult = 1;
    for (const auto& fname : names) {
        const Variable& v = find_var(factors, fname);
        if (!v.is_factor) throw std::invalid_argument("anova_strata: " + fname + " is not a factor");
        int k = v.factor.n_levels();
        for (size_t r = 0; r < n; ++r) ci.cell_of_row[r] += mult * v.level_idx[r];
        mult *= k;
    }
    ci.n_cells = mult;
    return ci;
}

struct MarginStats {
    double ss = 0.0;       // between-cell SS about the grand mean
    double df = 0.0;       // cells - 1
    std::vector<double> cell_mean;
    double per_cell = 0.0;  // observations per cell
};

MarginStats margin_stats(const CellIndex& ci, std::span<const double> y, double grand) {
    size_t n = y.size();
    std::vector<double> sum(static_cast<size_t>(ci.n_cells), 0.0);
    std::vector<double> cnt(static_cast<size_t>(ci.n_cells), 0.0);
    for (size_t r = 0; r < n; ++r) {
        sum[static_cast<size_t>(ci.cell_of_row[r])] += y[r];
        cnt[static_cast<size_t>(ci.cell_of_row[r])] += 1.0;
    }
    MarginStats m;
    m.per_cell = cnt.empty() ? 0.0 : cnt[0];
    for (double c : cnt)
        if (c != m.per_cell || c < 1.0)
            throw std::invalid_argument("anova_strata: design is unbalanced (unequal cell counts)");
    m.cell_mean.resize(static_cast<size_t>(ci.n_cells));
    for (int c = 0; c < ci.n_cells; ++c) {
        m.cell_mean[static_cast<size_t>(c)] = sum[static_cast<size_t>(c)] / cnt[static_cast<size_t>(c)];
        double d = m.cell_mean[static_cast<size_t>(c)] - grand;
        m.ss += cnt[static_cast<size_t>(c)] * d * d;
    }
    m.df = ci.n_cells - 1.0;
    return m;
}

// Classical balanced SS of a fixed term by inclusion-exclusion over the
// margins of its subsets (Yates).
TermResult term_ss(const TermRef& term, const std::vector<Variable>& factors,
                   std::span<const double> y, double grand) {
    size_t n = y.size();
    size_t k = term.factors.size();
    // means over every subset margin
    std::vector<CellIndex> sub_idx;
    std::vector<MarginStats> sub_stats;
    std::vector<std::vector<std::string>> subsets;
    for (size_t mask = 0; mask < (size_t{1} << k); ++mask) {
        std::vector<std::string> names;
        for (size_t b = 0; b < k; ++b)
            if (mask & (size_t{1} << b)) names.push_back(term.factors[b]);
        subsets.push_back(names);
        CellIndex ci = cross_cells(factors, names, n);
        sub_stats.push_back(margin_stats(ci, y, grand));
        sub_idx.push_back(std::move(ci));
    }
    size_t full = (size_t{1} << k) - 1;
    double per_cell = sub_stats[full].per_cell;
    TermResult out;
    out.name = term.name;
    // effect value per full cell via inclusion-exclusion, evaluated rowwise
    std::vector<double> eff(static_cast<size_t>(sub_idx[full].n_cells), 0.0);
    std::vector<bool> seen(eff.size(), false);
    for (size_t r = 0; r < n; ++r) {
        size_t cell = static_cast<size_t>(sub_idx[full].cell_of_row[r]);
        if (seen[cell]) continue;
        seen[cell] = true;
        double v = 0.0;
        for (size_t mask = 0; mask <= full; ++mask) {
            double mean = (mask == 0) ? grand
                                      : sub_stats[mask].cell_mean[static_cast<size_t>(
                                            sub_idx[mask].cell_of_row[r])];
            size_t omitted = k - static_cast<size_t>(std::popcount(mask));
            v += ((omitted % 2 == 0) ? 1.0 : -1.0) * mean;
        }
        eff[cell] = v;
    }
    for (double v : eff) out.ss += v * v;
    out.ss *= per_cell;
    out.df = 1.0;
    for (const auto& fn : term.factors)
        out.df *= find_var(factors, fn).factor.n_levels() - 1.0;
    out.ms = out.ss / out.df;
    return out;
}

}  // namespace

const StratumResult& StrataResults::stratum(const std::string& name) const {
    for (const auto& s : strata)
        if (s.name == name) return s;
    throw std::invalid_argument("unknown stratum: " + name);
}

StrataResults anova_strata(const StrataLayout& layout, const std::vector<Variable>& factors,
                           std::span<const double> y) {
    size_t n = y.size();
    if (n < 2) throw std::invalid_argument("anova_strata: need at least two observations");
    double grand = 0.0;
    for (double v : y) grand += v;
    grand /= static_cast<double>(n);
    StrataResults out;
    for (double v : y) out.total_ss += (v - grand) * (v - grand);
    out.total_df = static_cast<double>(n) - 1.0;

    // margin SS per stratum grouping, then peel contained strata
    std::vector<double> margin_ss(layout.strata.size()), margin_df(layout.strata.size());
    std::vector<std::set<std::string>> groups;
    for (size_t s = 0; s < layout.strata.size(); ++s) {
        const auto& spec = layout.strata[s];
        CellIndex ci = cross_cells(factors, spec.grouping, n);
        MarginStats ms = margin_stats(ci, y, grand);
        margin_ss[s] = ms.ss;
        margin_df[s] = ms.df;
        groups.emplace_back(spec.grouping.begin(), spec.grouping.end());
    }
    double strata_ss_sum = 0.0, strata_df_sum = 0.0;
    std::vector<StratumResult> results(layout.strata.size());
    for (size_t s = 0; s < layout.strata.size(); ++s) {
        double ss = margin_ss[s], df = margin_df[s];
        for (size_t t = 0; t < layout.strata.size(); ++t) {
            if (t == s) continue;
            bool contained = std::includes(groups[s].begin(), groups[s].end(), groups[t].begin(),
                                           groups[t].end()) &&
                             groups[t] != groups[s];
            if (contained) {
                ss -= results[t].ss;
                df -= results[t].df;
            }
        }
        // containment requires processing contained strata first; layouts list
        // coarse strata before fine ones, as R's Error() terms do
        StratumResult& res = results[s];
        res.name = layout.strata[s].name;
        res.ss = ss;
        res.df = df;
        res.ms = df > 0.0 ? ss / df : 0.0;
        double tss = 0.0, tdf = 0.0;
        for (const auto& term : layout.strata[s].tested) {
            TermResult tr = term_ss(term, factors, y, grand);
            tss += tr.ss;
            tdf += tr.df;
            res.terms.push_back(tr);
        }
        res.resid_ss = res.ss - tss;
        res.resid_df = res.df - tdf;
        res.resid_ms = res.resid_df > 0.0 ? res.resid_ss / res.resid_df : 0.0;
        strata_ss_sum += res.ss;
        strata_df_sum += res.df;
    }
    StratumResult within;
    within.name = "Within";
    within.ss = out.total_ss - strata_ss_sum;
    within.df = out.total_df - strata_df_sum;
    within.ms = within.df > 0.0 ? within.ss / within.df : 0.0;
    double tss = 0.0, tdf = 0.0;
    for (const auto& term : layout.within_terms) {
        TermResult tr = term_ss(term, factors, y, grand);
        tss += tr.ss;
        tdf += tr.df;
        within.terms.push_back(tr);
    }
    within.resid_ss = within.ss - tss;
    within.resid_df = within.df - tdf;
    within.resid_ms = within.resid_df > 0.0 ? within.resid_ss / within.resid_df : 0.0;
    out.strata = std::move(results);
    out.strata.push_back(std::move(within));
    return out;
}

std::vector<VarianceComponent> variance_components(const StrataResults& ms,
                                                   const std::vector<VcSpec>& specs) {
    std::vector<VarianceComponent> out;
    for (const auto& spec : specs) {
        double v = 0.0;
        for (const auto& term : spec.terms) {
            const StratumResult& s = ms.stratum(term.stratum);
            v += term.coef * (term.use_residual ? s.resid_ms : s.ms);
        }
        v /= spec.divisor;
        VarianceComponent c;
        c.name = spec.name;
        c.raw_variance = v;
        c.truncated = v < 0.0;
        c.value = std::sqrt(std::fmax(0.0, v));
        out.push_back(c);
    }
    return out;
}

// ---- binomial GLM -----------------------------------------------------------

namespace {

double binomial_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& m,
                         const Eigen::VectorXd& mu) {
    double dev = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) > 0.0) dev += y(i) * std::log(y(i) / mu(i));
        if (m(i) - y(i) > 0.0) dev += (m(i) - y(i)) * std::log((m(i) - y(i)) / (m(i) - mu(i)));
    }
    return 2.0 * dev;
}

}  // namespace

GlmFit glm_binomial_fit(const DesignMatrix& design, std::span<const double> successes,
                        std::span<const double> trials) {
    const Eigen::MatrixXd& X = design.X;
    Eigen::Index n = X.rows(), p = X.cols();
    if (static_cast<Eigen::Index>(successes.size()) != n ||
        static_cast<Eigen::Index>(trials.size()) != n)
        throw std::invalid_argument("glm_binomial_fit: length mismatch");
    Eigen::VectorXd y(n), m(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i) = successes[static_cast<size_t>(i)];
        m(i) = trials[static_cast<size_t>(i)];
        if (m(i) < 1.0 || y(i) < 0.0 || y(i) > m(i))
            throw std::invalid_argument("glm_binomial_fit: need 0 <= successes <= trials >= 1");
    }
    GlmFit fit;
    fit.names = design.colnames;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    auto mu_of = [&](const Eigen::VectorXd& b) {
        Eigen::VectorXd eta = X * b;
        Eigen::VectorXd mu(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double e = std::clamp(eta(i), -30.0, 30.0);
            mu(i) = m(i) / (1.0 + std::exp(-e));
        }
        return mu;
    };
    double dev = binomial_deviance(y, m, mu_of(beta));
    for (int it = 1; it <= 50; ++it) {
        Eigen::VectorXd eta = X * beta;
        Eigen::VectorXd w(n), z(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double e = std::clamp(eta(i), -30.0, 30.0);
            double pr = 1.0 / (1.0 + std::exp(-e));
            double wi = m(i) * pr * (1.0 - pr);
            wi = std::fmax(wi, 1e-10);
            w(i) = wi;
            z(i) = e + (y(i) - m(i) * pr) / wi;
        }
        Eigen::MatrixXd xtwx = X.transpose() * w.asDiagonal() * X;
        Eigen::VectorXd xtwz = X.transpose() * (w.asDiagonal() * z);
        Eigen::VectorXd beta_new = xtwx.ldlt().solve(xtwz);
        // step halving keeps the deviance nonincreasing
        double dev_new = binomial_deviance(y, m, mu_of(beta_new));
        int halv = 0;
        while (dev_new > dev + 1e-12 && halv < 30) {
            beta_new = 0.5 * (beta_new + beta);
            dev_new = binomial_deviance(y, m, mu_of(beta_new));
            ++halv;
        }
        double delta = (beta_new - beta).cwiseAbs().maxCoeff();
        beta = beta_new;
        dev = dev_new;
        fit.iterations = it;
        if (delta < 1e-8) {
            fit.converged = true;
            break;
        }
    }
    // separation: fitted logits diverging rather than settling
    if ((X * beta).cwiseAbs().maxCoeff() > 30.0) {
        fit.separated = true;
        fit.converged = false;
    }
    fit.coef = beta;
    fit.deviance = dev;
    return fit;
}

tests::TestResult glm_lrt(const GlmFit& null_fit, const GlmFit& full_fit) {
    if (null_fit.separated || full_fit.separated)
        return tests::TestResult::invalid("separation: coefficients diverged on the logit scale");
    if (!null_fit.converged || !full_fit.converged)
        return tests::TestResult::invalid("IRLS did not converge");
    double ddf = static_cast<double>(full_fit.coef.size()) - static_cast<double>(null_fit.coef.size());
    if (ddf <= 0.0) {
        if (full_fit.coef.size() == null_fit.coef.size()) {
            tests::TestResult r;
            r.statistic = 0.0;
            r.df = 0.0;
            r.p_value = 1.0;
            return r;
        }
        throw std::invalid_argument("glm_lrt: full model must extend the null model");
    }
    tests::TestResult r;
    r.statistic = std::fmax(0.0, null_fit.deviance - full_fit.deviance);
    r.df = ddf;
    r.p_value = special::reg_inc_gamma_upper(ddf / 2.0, r.statistic / 2.0);
    return r;
}

}  // namespace powsim::linmod
