#include "powsim/testkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "powsim/special.hpp"

namespace powsim::tests {

using special::normal_cdf;
using special::reg_inc_gamma;
using special::reg_inc_gamma_upper;

namespace {

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double var_of(std::span<const double> x) {
    double m = mean_of(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double chisq_upper(double stat, double df) {
    return reg_inc_gamma_upper(df / 2.0, stat / 2.0);
}

double t_two_sided(double t, double df) {
    double xx = df / (t * t + df);
    return special::reg_inc_beta(df / 2.0, 0.5, xx);
}

double f_cdf(double x, double df1, double df2) {
    if (x <= 0.0) return 0.0;
    return special::reg_inc_beta(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2));
}

double binom_cdf(int64_t k, int64_t n, double p) {
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    return special::reg_inc_beta(static_cast<double>(n - k), static_cast<double>(k + 1), 1.0 - p);
}

// Midranks with tie-group sizes.
std::vector<double> midranks(std::span<const double> v, std::vector<int64_t>& tie_sizes) {
    size_t n = v.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    tie_sizes.clear();
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        tie_sizes.push_back(static_cast<int64_t>(j - i + 1));
        i = j + 1;
    }
    return r;
}

// Signed-rank null distribution: counts of subset sums of {1..n}.
std::vector<double> signrank_counts(int n) {
    int maxs = n * (n + 1) / 2;
    std::vector<double> c(static_cast<size_t>(maxs) + 1, 0.0);
    c[0] = 1.0;
    for (int k = 1; k <= n; ++k)
        for (int s = maxs; s >= k; --s) c[static_cast<size_t>(s)] += c[static_cast<size_t>(s - k)];
    return c;
}

// Mann-Whitney null distribution: counts over U = 0..nm.
// Recurrence f(i, j, u) = f(i-1, j, u-j) + f(i, j-1, u).
std::vector<double> ranksum_counts(int n, int m) {
    int umax = n * m;
    std::vector<std::vector<std::vector<double>>> tab(
        static_cast<size_t>(n) + 1,
        std::vector<std::vector<double>>(static_cast<size_t>(m) + 1,
                                         std::vector<double>(static_cast<size_t>(umax) + 1, 0.0)));
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= m; ++j) {
            if (i == 0 || j == 0) {
                tab[i][j][0] = 1.0;
                continue;
            }
            for (int u = 0; u <= i * j; ++u) {
                double a = (u - j >= 0) ? tab[i - 1][j][u - j] : 0.0;
                double b = tab[i][j - 1][u];
                tab[i][j][u] = a + b;
            }
        }
    return tab[static_cast<size_t>(n)][static_cast<size_t>(m)];
}

bool solve_spd(std::vector<double> a, int p, std::vector<double>& rhs) {
    // Cholesky solve of a (p x p, row-major) * out = rhs; false if not PD.
    double maxd = 0.0;
    for (int i = 0; i < p; ++i) maxd = std::fmax(maxd, std::fabs(a[static_cast<size_t>(i) * p + i]));
    double tol = 1e-12 * std::fmax(maxd, 1.0);
    for (int j = 0; j < p; ++j) {
        double s = a[static_cast<size_t>(j) * p + j];
        for (int k = 0; k < j; ++k) s -= a[static_cast<size_t>(j) * p + k] * a[static_cast<size_t>(j) * p + k];
        if (s <= tol) return false;
        double piv = std::sqrt(s);
        a[static_cast<size_t>(j) * p + j] = piv;
        for (int i = j + 1; i < p; ++i) {
            double v = a[static_cast<size_t>(i) * p + j];
            for (int k = 0; k < j; ++k)
                v -= a[static_cast<size_t>(i) * p + k] * a[static_cast<size_t>(j) * p + k];
            a[static_cast<size_t>(i) * p + j] = v / piv;
        }
    }
    for (int i = 0; i < p; ++i) {
        double v = rhs[static_cast<size_t>(i)];
        for (int k = 0; k < i; ++k) v -= a[static_cast<size_t>(i) * p + k] * rhs[static_cast<size_t>(k)];
        rhs[static_cast<size_t>(i)] = v / a[static_cast<size_t>(i) * p + i];
    }
    for (int i = p - 1; i >= 0; --i) {
        double v = rhs[static_cast<size_t>(i)];
        for (int k = i + 1; k < p; ++k) v -= a[static_cast<size_t>(k) * p + i] * rhs[static_cast<size_t>(k)];
        rhs[static_cast<size_t>(i)] = v / a[static_cast<size_t>(i) * p + i];
    }
    return true;
}

uint64_t uniform_below(prob::RandomSource& rng, uint64_t bound) {
    return static_cast<uint64_t>(rng.next_double() * static_cast<double>(bound));
}

}  // namespace

ContingencyTable::ContingencyTable(int r, int c, std::vector<double> v)
    : rows(r), cols(c), cells(std::move(v)) {
    if (rows <= 0 || cols <= 0 || cells.size() != static_cast<size_t>(rows) * cols)
        throw std::invalid_argument("ContingencyTable: shape mismatch");
    for (double x : cells)
        if (x < 0.0) throw std::invalid_argument("ContingencyTable: negative cell count");
}

double ContingencyTable::row_total(int i) const {
    double s = 0.0;
    for (int j = 0; j < cols; ++j) s += (*this)(i, j);
    return s;
}

double ContingencyTable::col_total(int j) const {
    double s = 0.0;
    for (int i = 0; i < rows; ++i) s += (*this)(i, j);
    return s;
}

double ContingencyTable::total() const {
    double s = 0.0;
    for (double x : cells) s += x;
    return s;
}

TestResult binom_exact_test(int64_t x, int64_t n, double p0) {
    if (x < 0 || x > n) throw std::invalid_argument("binom_exact_test: x must be in [0, n]");
    if (!(p0 > 0.0 && p0 < 1.0))
        throw std::invalid_argument("binom_exact_test: p0 must be in (0, 1)");
    const double rel_err = 1.0 + 1e-7;
    double m = static_cast<double>(n) * p0;
    double d = prob::binom_pmf(x, n, p0);
    TestResult r;
    r.statistic = static_cast<double>(x);
    if (std::fabs(static_cast<double>(x) - m) < 1e-9 * (m + 1.0)) {
        r.p_value = 1.0;
        return r;
    }
    double thresh = d * rel_err;
    if (static_cast<double>(x) < m) {
        // pmf is non-increasing on [ceil(m), n]; count the upper tail with pmf <= thresh
        int64_t lo = static_cast<int64_t>(std::ceil(m)), hi = n;
        if (prob::binom_pmf(lo, n, p0) <= thresh) {
            r.p_value = std::fmin(1.0, binom_cdf(x, n, p0) + 1.0 - binom_cdf(lo - 1, n, p0));
            return r;
        }
        while (lo < hi) {
            int64_t mid = lo + (hi - lo) / 2;
            if (prob::binom_pmf(mid, n, p0) <= thresh)
                hi = mid;
            else
                lo = mid + 1;
        }
        double upper = (prob::binom_pmf(lo, n, p0) <= thresh) ? 1.0 - binom_cdf(lo - 1, n, p0) : 0.0;
        r.p_value = std::fmin(1.0, binom_cdf(x, n, p0) + upper);
    } else {
        // pmf is non-decreasing on [0, floor(m)]; count the lower tail with pmf <= thresh
        int64_t lo = 0, hi = static_cast<int64_t>(std::floor(m));
        if (prob::binom_pmf(hi, n, p0) <= thresh) {
            r.p_value = std::fmin(1.0, binom_cdf(hi, n, p0) + 1.0 - binom_cdf(x - 1, n, p0));
            return r;
        }
        // find first index with pmf > thresh; lower tail is everything before it
        while (lo < hi) {
            int64_t mid = lo + (hi - lo) / 2;
            if (prob::binom_pmf(mid, n, p0) > thresh)
                hi = mid;
            else
                lo = mid + 1;
        }
        double lower = (lo > 0 || prob::binom_pmf(0, n, p0) <= thresh)
                           ? ((prob::binom_pmf(lo, n, p0) > thresh) ? binom_cdf(lo - 1, n, p0)
                                                                    : binom_cdf(lo, n, p0))
                           : 0.0;
        r.p_value = std::fmin(1.0, lower + 1.0 - binom_cdf(x - 1, n, p0));
    }
    return r;
}

TestResult prop_score_test(int64_t x, int64_t n, double p0) {
    if (n < 1) throw std::invalid_argument("prop_score_test: n must be >= 1");
    if (!(p0 > 0.0 && p0 < 1.0))
        throw std::invalid_argument("prop_score_test: p0 must be in (0, 1)");
    double phat = static_cast<double>(x) / static_cast<double>(n);
    TestResult r;
    r.statistic = (phat - p0) * (phat - p0) * static_cast<double>(n) / (p0 * (1.0 - p0));
    r.df = 1.0;
    r.p_value = chisq_upper(r.statistic, 1.0);
    return r;
}

TestResult z_test_one_sample(std::span<const double> x, double mu0, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("z_test_one_sample: sigma must be positive");
    if (x.empty()) return TestResult::invalid("empty sample");
    TestResult r;
    r.statistic = (mean_of(x) - mu0) * std::sqrt(static_cast<double>(x.size())) / sigma;
    r.p_value = 2.0 * normal_cdf(-std::fabs(r.statistic));
    return r;
}

TestResult t_test_one_sample(std::span<const double> x, double mu0) {
    if (x.size() < 2) return TestResult::invalid("need at least two observations");
    double n = static_cast<double>(x.size());
    double v = var_of(x);
    if (v <= 0.0) return TestResult::invalid("zero sample variance");
    TestResult r;
    r.statistic = (mean_of(x) - mu0) * std::sqrt(n) / std::sqrt(v);
    r.df = n - 1.0;
    r.p_value = t_two_sided(r.statistic, n - 1.0);
    return r;
}

TestResult paired_t_test(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("paired_t_test: length mismatch");
    std::vector<double> d(x.size());
    for (size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
    return t_test_one_sample(d, 0.0);
}

TestResult variance_chisq_test(std::span<const double> x, double sigma0_sq) {
    if (!(sigma0_sq > 0.0))
        throw std::invalid_argument("variance_chisq_test: sigma0_sq must be positive");
    if (x.size() < 2) return TestResult::invalid("need at least two observations");
    double n = static_cast<double>(x.size());
    TestResult r;
    r.statistic = (n - 1.0) * var_of(x) / sigma0_sq;
    r.df = n - 1.0;
    double lower = reg_inc_gamma((n - 1.0) / 2.0, r.statistic / 2.0);
    r.p_value = std::fmin(1.0, 2.0 * std::fmin(lower, 1.0 - lower));
    return r;
}

TestResult sign_test(std::span<const double> x, double median0) {
    int64_t smaller = 0, equal = 0;
    for (double v : x) {
        if (v < median0) ++smaller;
        if (v == median0) ++equal;
    }
    int64_t n = static_cast<int64_t>(x.size());
    int64_t eff = n - equal;
    if (eff < 1) return TestResult::invalid("all observations equal the hypothesized median");
    int64_t count = std::min(smaller, eff - smaller);
    TestResult r;
    r.statistic = static_cast<double>(count);
    r.p_value = std::fmin(1.0, 2.0 * binom_cdf(count, eff, 0.5));
    return r;
}

TestResult wilcoxon_signed_rank(std::span<const double> x, double mu0) {
    std::vector<double> absd;
    std::vector<int> sign;
    for (double v : x) {
        double d = v - mu0;
        if (d == 0.0) continue;
        absd.push_back(std::fabs(d));
        sign.push_back(d > 0.0 ? 1 : -1);
    }
    int n = static_cast<int>(absd.size());
    if (n < 1) return TestResult::invalid("all observations equal mu0");
    std::vector<int64_t> tie_sizes;
    std::vector<double> r = midranks(absd, tie_sizes);
    double V = 0.0;
    for (int i = 0; i < n; ++i)
        if (sign[static_cast<size_t>(i)] > 0) V += r[static_cast<size_t>(i)];
    bool ties = tie_sizes.size() != static_cast<size_t>(n);
    TestResult out;
    out.statistic = V;
    if (n <= 25 && !ties) {
        auto counts = signrank_counts(n);
        double total = std::pow(2.0, n);
        int v = static_cast<int>(std::llround(V));
        double lower = 0.0;
        for (int s = 0; s <= v; ++s) lower += counts[static_cast<size_t>(s)];
        lower /= total;
        double upper = 0.0;
        for (size_t s = static_cast<size_t>(v); s < counts.size(); ++s) upper += counts[s];
        upper /= total;
        double p = (V > n * (n + 1) / 4.0) ? 2.0 * upper : 2.0 * lower;
        out.p_value = std::fmin(1.0, p);
    } else {
        double zc = V - n * (n + 1) / 4.0;
        double tie_adj = 0.0;
        for (int64_t t : tie_sizes)
            tie_adj += static_cast<double>(t) * t * t - static_cast<double>(t);
        double sigma = std::sqrt(n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_adj / 48.0);
        if (sigma <= 0.0) return TestResult::invalid("degenerate signed-rank variance");
        double z = (zc - (zc > 0 ? 0.5 : (zc < 0 ? -0.5 : 0.0))) / sigma;
        out.p_value = 2.0 * std::fmin(normal_cdf(z), 1.0 - normal_cdf(z));
        out.p_value = std::fmin(1.0, out.p_value);
        if (ties) out.note = "ties; normal approximation";
    }
    return out;
}

TestResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y) {
    int n = static_cast<int>(x.size()), m = static_cast<int>(y.size());
    if (n < 1 || m < 1) return TestResult::invalid("empty group");
    std::vector<double> all(x.begin(), x.end());
    all.insert(all.end(), y.begin(), y.end());
    std::vector<int64_t> tie_sizes;
    std::vector<double> r = midranks(all, tie_sizes);
    double W = 0.0;
    for (int i = 0; i < n; ++i) W += r[static_cast<size_t>(i)];
    W -= n * (n + 1) / 2.0;  // Mann-Whitney U of x
    bool ties = tie_sizes.size() != static_cast<size_t>(n + m);
    TestResult out;
    out.statistic = W;
    if (n <= 25 && m <= 25 && !ties) {
        auto counts = ranksum_counts(n, m);
        double total = std::exp(special::log_choose(n + m, n));
        int u = static_cast<int>(std::llround(W));
        double lower = 0.0, upper = 0.0;
        for (int s = 0; s <= u; ++s) lower += counts[static_cast<size_t>(s)];
        for (size_t s = static_cast<size_t>(u); s < counts.size(); ++s) upper += counts[s];
        lower /= total;
        upper /= total;
        double p = (W > n * m / 2.0) ? 2.0 * upper : 2.0 * lower;
        out.p_value = std::fmin(1.0, p);
    } else {
        double zc = W - n * m / 2.0;
        double tie_adj = 0.0;
        for (int64_t t : tie_sizes)
            tie_adj += static_cast<double>(t) * t * t - static_cast<double>(t);
        double N = n + m;
        double sigma = std::sqrt(n * m / 12.0 * ((N + 1.0) - tie_adj / (N * (N - 1.0))));
        if (sigma <= 0.0) return TestResult::invalid("degenerate rank-sum variance");
        double z = (zc - (zc > 0 ? 0.5 : (zc < 0 ? -0.5 : 0.0))) / sigma;
        out.p_value = std::fmin(1.0, 2.0 * std::fmin(normal_cdf(z), 1.0 - normal_cdf(z)));
        if (ties) out.note = "ties; normal approximation";
    }
    return out;
}

TestResult chisq_gof(std::span<const int64_t> counts, std::span<const double> probs0,
                     int df_reduction) {
    if (counts.size() != probs0.size() || counts.empty())
        throw std::invalid_argument("chisq_gof: counts and probs0 must have equal nonzero length");
    double psum = 0.0;
    for (double p : probs0) psum += p;
    if (std::fabs(psum - 1.0) > 1e-8)
        throw std::invalid_argument("chisq_gof: probs0 must sum to 1");
    if (df_reduction < 0) throw std::invalid_argument("chisq_gof: df_reduction must be >= 0");
    double df = static_cast<double>(counts.size()) - 1.0 - df_reduction;
    if (df <= 0.0) throw std::invalid_argument("chisq_gof: nonpositive degrees of freedom");
    int64_t n = 0;
    for (int64_t c : counts) n += c;
    TestResult r;
    double x2 = 0.0;
    bool small_expected = false;
    for (size_t k = 0; k < counts.size(); ++k) {
        double e = static_cast<double>(n) * probs0[k];
        if (e <= 0.0) throw std::invalid_argument("chisq_gof: zero expected count");
        if (e < 1.0) small_expected = true;
        double d = static_cast<double>(counts[k]) - e;
        x2 += d * d / e;
    }
    r.statistic = x2;
    r.df = df;
    r.p_value = chisq_upper(x2, df);
    if (small_expected) r.note = "expected count below 1; chi-squared approximation doubtful";
    return r;
}

std::vector<int64_t> bin_continuous(std::span<const double> x,
                                    std::span<const double> breakpoints) {
    for (size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw std::invalid_argument("bin_continuous: breakpoints must be strictly ascending");
    std::vector<int64_t> counts(breakpoints.size() + 1, 0);
    for (double v : x) {
        // right-closed bins: index of first breakpoint >= v
        size_t idx = static_cast<size_t>(
            std::lower_bound(breakpoints.begin(), breakpoints.end(), v) - breakpoints.begin());
        ++counts[idx];
    }
    return counts;
}

std::vector<double> model_probs(std::span<const double> cdf_at_breakpoints) {
    std::vector<double> p;
    p.reserve(cdf_at_breakpoints.size() + 1);
    double prev = 0.0;
    for (double c : cdf_at_breakpoints) {
        p.push_back(c - prev);
        prev = c;
    }
    p.push_back(1.0 - prev);
    return p;
}

TestResult ks_test_one_sample(std::span<const double> x, const prob::Distribution& target) {
    if (std::holds_alternative<prob::Binomial>(target) ||
        std::holds_alternative<prob::Bernoulli>(target))
        throw std::invalid_argument("ks_test_one_sample: target must be continuous");
    size_t n = x.size();
    if (n == 0) return TestResult::invalid("empty sample");
    std::vector<double> xs(x.begin(), x.end());
    std::sort(xs.begin(), xs.end());
    bool ties = std::adjacent_find(xs.begin(), xs.end()) != xs.end();
    double dplus = 0.0, dminus = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double F = prob::cdf(target, xs[i]);
        dplus = std::fmax(dplus, static_cast<double>(i + 1) / n - F);
        dminus = std::fmax(dminus, F - static_cast<double>(i) / n);
    }
    TestResult r;
    r.statistic = std::fmax(dplus, dminus);
    if (n <= 100 && !ties) {
        r.p_value = std::fmax(0.0, 1.0 - special::ks_exact_cdf(static_cast<int>(n), r.statistic));
    } else {
        r.p_value = 1.0 - special::kolmogorov_cdf(std::sqrt(static_cast<double>(n)) * r.statistic);
        if (ties) r.note = "ties present; asymptotic p-value";
    }
    return r;
}

TestResult t_test_two_sample(std::span<const double> x, std::span<const double> y, bool pooled) {
    if (x.size() < 2 || y.size() < 2) return TestResult::invalid("need two observations per group");
    double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
    double vx = var_of(x), vy = var_of(y);
    double diff = mean_of(x) - mean_of(y);
    TestResult r;
    if (pooled) {
        double sp2 = ((n - 1.0) * vx + (m - 1.0) * vy) / (n + m - 2.0);
        if (sp2 <= 0.0) return TestResult::invalid("zero pooled variance");
        r.statistic = diff / std::sqrt(sp2 * (1.0 / n + 1.0 / m));
        r.df = n + m - 2.0;
    } else {
        double se2 = vx / n + vy / m;
        if (se2 <= 0.0) return TestResult::invalid("zero variance in both samples");
        r.statistic = diff / std::sqrt(se2);
        r.df = se2 * se2 /
               ((vx / n) * (vx / n) / (n - 1.0) + (vy / m) * (vy / m) / (m - 1.0));
    }
    r.p_value = t_two_sided(r.statistic, *r.df);
    return r;
}

TestResult z_test_two_sample(std::span<const double> x, std::span<const double> y, double sigma_x,
                             double sigma_y) {
    if (!(sigma_x > 0.0) || !(sigma_y > 0.0))
        throw std::invalid_argument("z_test_two_sample: sigmas must be positive");
    if (x.empty() || y.empty()) return TestResult::invalid("empty group");
    double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
    TestResult r;
    r.statistic = (mean_of(x) - mean_of(y)) / std::sqrt(sigma_x * sigma_x / n + sigma_y * sigma_y / m);
    r.p_value = 2.0 * normal_cdf(-std::fabs(r.statistic));
    return r;
}

TestResult var_ratio_f_test(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 2 || y.size() < 2) return TestResult::invalid("need two observations per group");
    double vy = var_of(y);
    if (vy <= 0.0) return TestResult::invalid("zero denominator variance");
    TestResult r;
    r.statistic = var_of(x) / vy;
    r.df = static_cast<double>(x.size()) - 1.0;
    r.df2 = static_cast<double>(y.size()) - 1.0;
    double lower = f_cdf(r.statistic, *r.df, *r.df2);
    r.p_value = std::fmin(1.0, 2.0 * std::fmin(lower, 1.0 - lower));
    return r;
}

TestResult randomization_test_unpaired(std::span<const double> x, std::span<const double> y,
                                       int inner_reps, prob::RandomSource& rng) {
    if (inner_reps < 1) throw std::invalid_argument("randomization_test_unpaired: inner_reps >= 1");
    TestResult base = t_test_two_sample(x, y, /*pooled=*/false);
    if (!base.valid) return TestResult::invalid("base test undefined: " + base.note);
    double p0 = base.p_value;
    size_t n = x.size();
    std::vector<double> pool(x.begin(), x.end());
    pool.insert(pool.end(), y.begin(), y.end());
    int at_or_below = 0;
    int degenerate = 0;
    std::vector<double> perm(pool);
    for (int rep = 0; rep < inner_reps; ++rep) {
        for (size_t i = perm.size() - 1; i > 0; --i) {
            size_t j = static_cast<size_t>(uniform_below(rng, i + 1));
            std::swap(perm[i], perm[j]);
        }
        TestResult t = t_test_two_sample(std::span<const double>(perm.data(), n),
                                         std::span<const double>(perm.data() + n, pool.size() - n),
                                         /*pooled=*/false);
        if (!t.valid) {
            ++at_or_below;  // conservative
            ++degenerate;
        } else if (t.p_value <= p0) {
            ++at_or_below;
        }
    }
    TestResult r;
    r.statistic = base.statistic;
    r.p_value = static_cast<double>(at_or_below) / inner_reps;
    if (degenerate > 0)
        r.note = std::to_string(degenerate) + " degenerate resamples counted as extreme";
    return r;
}

TestResult randomization_test_paired(std::span<const double> d, int inner_reps,
                                     prob::RandomSource& rng) {
    if (inner_reps < 1) throw std::invalid_argument("randomization_test_paired: inner_reps >= 1");
    TestResult base = t_test_one_sample(d, 0.0);
    if (!base.valid) return TestResult::invalid("base test undefined: " + base.note);
    double p0 = base.p_value;
    int at_or_below = 0;
    int degenerate = 0;
    std::vector<double> flipped(d.size());
    for (int rep = 0; rep < inner_reps; ++rep) {
        for (size_t i = 0; i < d.size(); ++i)
            flipped[i] = (rng.next_double() < 0.5 ? -1.0 : 1.0) * d[i];
        TestResult t = t_test_one_sample(flipped, 0.0);
        if (!t.valid) {
            ++at_or_below;
            ++degenerate;
        } else if (t.p_value <= p0) {
            ++at_or_below;
        }
    }
    TestResult r;
    r.statistic = base.statistic;
    r.p_value = static_cast<double>(at_or_below) / inner_reps;
    if (degenerate > 0)
        r.note = std::to_string(degenerate) + " degenerate resamples counted as extreme";
    return r;
}

TestResult chisq_contingency(const ContingencyTable& tab) {
    double n = tab.total();
    for (int i = 0; i < tab.rows; ++i)
        if (tab.row_total(i) <= 0.0) return TestResult::invalid("zero row margin");
    for (int j = 0; j < tab.cols; ++j)
        if (tab.col_total(j) <= 0.0) return TestResult::invalid("zero column margin");
    TestResult r;
    double x2 = 0.0;
    bool small_expected = false;
    for (int i = 0; i < tab.rows; ++i)
        for (int j = 0; j < tab.cols; ++j) {
            double e = tab.row_total(i) * tab.col_total(j) / n;
            if (e < 5.0) small_expected = true;
            double d = tab(i, j) - e;
            x2 += d * d / e;
        }
    r.statistic = x2;
    r.df = (tab.rows - 1.0) * (tab.cols - 1.0);
    r.p_value = chisq_upper(x2, *r.df);
    if (small_expected) r.note = "expected cell count below 5";
    return r;
}

TestResult cor_test(std::span<const double> x, std::span<const double> y, double rho0) {
    if (!(rho0 > -1.0 && rho0 < 1.0))
        throw std::invalid_argument("cor_test: rho0 must be in (-1, 1)");
    if (x.size() != y.size()) throw std::invalid_argument("cor_test: length mismatch");
    size_t n = x.size();
    if ((rho0 == 0.0 && n < 3) || (rho0 != 0.0 && n < 4))
        return TestResult::invalid("sample too small");
    double mx = mean_of(x), my = mean_of(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return TestResult::invalid("constant column");
    double r = sxy / std::sqrt(sxx * syy);
    TestResult out;
    if (rho0 == 0.0) {
        double df = static_cast<double>(n) - 2.0;
        if (std::fabs(r) >= 1.0) {
            out.statistic = std::copysign(std::numeric_limits<double>::infinity(), r);
            out.df = df;
            out.p_value = 0.0;
            return out;
        }
        out.statistic = r * std::sqrt(df) / std::sqrt(1.0 - r * r);
        out.df = df;
        out.p_value = t_two_sided(out.statistic, df);
    } else {
        out.statistic = (std::atanh(r) - std::atanh(rho0)) * std::sqrt(static_cast<double>(n) - 3.0);
        out.p_value = 2.0 * normal_cdf(-std::fabs(out.statistic));
    }
    return out;
}

TestResult hotelling_one_sample(std::span<const double> X, int n, int p,
                                std::span<const double> mu0) {
    if (n <= p) return TestResult::invalid("need n > p");
    if (static_cast<int>(mu0.size()) != p || X.size() != static_cast<size_t>(n) * p)
        throw std::invalid_argument("hotelling_one_sample: shape mismatch");
    std::vector<double> xbar(static_cast<size_t>(p), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) xbar[static_cast<size_t>(j)] += X[static_cast<size_t>(i) * p + j];
    for (auto& v : xbar) v /= n;
    std::vector<double> S(static_cast<size_t>(p) * p, 0.0);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < p; ++a)
            for (int b = 0; b <= a; ++b)
                S[static_cast<size_t>(a) * p + b] += (X[static_cast<size_t>(i) * p + a] - xbar[static_cast<size_t>(a)]) *
                                                     (X[static_cast<size_t>(i) * p + b] - xbar[static_cast<size_t>(b)]);
    for (int a = 0; a < p; ++a)
        for (int b = 0; b <= a; ++b) {
            S[static_cast<size_t>(a) * p + b] /= (n - 1.0);
            S[static_cast<size_t>(b) * p + a] = S[static_cast<size_t>(a) * p + b];
        }
    std::vector<double> d(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) d[static_cast<size_t>(j)] = xbar[static_cast<size_t>(j)] - mu0[static_cast<size_t>(j)];
    std::vector<double> sol = d;
    if (!solve_spd(S, p, sol)) return TestResult::invalid("singular sample covariance");
    double t2 = 0.0;
    for (int j = 0; j < p; ++j) t2 += d[static_cast<size_t>(j)] * sol[static_cast<size_t>(j)];
    t2 *= n;
    TestResult r;
    r.statistic = (static_cast<double>(n) - p) / (p * (static_cast<double>(n) - 1.0)) * t2;
    r.df = static_cast<double>(p);
    r.df2 = static_cast<double>(n - p);
    r.p_value = 1.0 - f_cdf(r.statistic, *r.df, *r.df2);
    return r;
}

TestResult hotelling_two_sample(std::span<const double> X, int n1, std::span<const double> Y,
                                int n2, int p) {
    if (n1 + n2 <= p + 1) return TestResult::invalid("need n1 + n2 > p + 1");
    auto colmeans = [p](std::span<const double> M, int n) {
        std::vector<double> mu(static_cast<size_t>(p), 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < p; ++j) mu[static_cast<size_t>(j)] += M[static_cast<size_t>(i) * p + j];
        for (auto& v : mu) v /= n;
        return mu;
    };
    auto scatter = [p](std::span<const double> M, int n, const std::vector<double>& mu,
                       std::vector<double>& S) {
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < p; ++a)
                for (int b = 0; b <= a; ++b)
                    S[static_cast<size_t>(a) * p + b] += (M[static_cast<size_t>(i) * p + a] - mu[static_cast<size_t>(a)]) *
                                                         (M[static_cast<size_t>(i) * p + b] - mu[static_cast<size_t>(b)]);
    };
    std::vector<double> mx = colmeans(X, n1), my = colmeans(Y, n2);
    std::vector<double> S(static_cast<size_t>(p) * p, 0.0);
    scatter(X, n1, mx, S);
    scatter(Y, n2, my, S);
    for (int a = 0; a < p; ++a)
        for (int b = 0; b <= a; ++b) {
            S[static_cast<size_t>(a) * p + b] /= (n1 + n2 - 2.0);
            S[static_cast<size_t>(b) * p + a] = S[static_cast<size_t>(a) * p + b];
        }
    std::vector<double> d(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) d[static_cast<size_t>(j)] = mx[static_cast<size_t>(j)] - my[static_cast<size_t>(j)];
    std::vector<double> sol = d;
    if (!solve_spd(S, p, sol)) return TestResult::invalid("singular pooled covariance");
    double t2 = 0.0;
    for (int j = 0; j < p; ++j) t2 += d[static_cast<size_t>(j)] * sol[static_cast<size_t>(j)];
    t2 *= static_cast<double>(n1) * n2 / (n1 + n2);
    TestResult r;
    double df2 = n1 + n2 - p - 1.0;
    r.statistic = df2 / (p * (n1 + n2 - 2.0)) * t2;
    r.df = static_cast<double>(p);
    r.df2 = df2;
    r.p_value = 1.0 - f_cdf(r.statistic, *r.df, *r.df2);
    return r;
}

}  // namespace powsim::tests
