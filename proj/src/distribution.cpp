#include "powsim/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "powsim/special.hpp"

namespace powsim::prob {

using special::reg_inc_beta;
using special::reg_inc_gamma;
using special::reg_inc_gamma_upper;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long kMaxTerms = 1000000;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// ---- noncentral series -------------------------------------------------

// Noncentral chi-squared cdf: Poisson mixture of central gamma cdfs,
// summed outward from the mode of the weights with a remainder bound
// (Benton & Krishnamoorthy 2003).
double nc_chisq_cdf(double x, double df, double ncp) {
    if (x <= 0.0) return 0.0;
    if (ncp == 0.0) return reg_inc_gamma(df / 2.0, x / 2.0);
    double lambda = ncp / 2.0;
    double a0 = df / 2.0;
    double hx = x / 2.0;
    long k = static_cast<long>(lambda);
    auto pois = [&](long j) {
        return std::exp(-lambda + j * std::log(lambda) - std::lgamma(j + 1.0));
    };
    // g(j) = P(a0 + j, hx); g(j+1) = g(j) - t(j), t(j) = hx^(a0+j) e^-hx / Gamma(a0+j+1)
    auto gterm = [&](long j) {
        return std::exp((a0 + j) * std::log(hx) - hx - std::lgamma(a0 + j + 1.0));
    };
    double gk = reg_inc_gamma(a0 + k, hx);
    double pk = pois(k);
    double sum = pk * gk;
    double pois_used = pk;
    // forward: g decreasing in j
    {
        double g = gk, p = pk, t = gterm(k);
        for (long j = k; j < k + kMaxTerms; ++j) {
            p *= lambda / (j + 1.0);
            g -= t;
            if (g < 0.0) g = 0.0;
            t *= hx / (a0 + j + 1.0);
            sum += p * g;
            pois_used += p;
            if ((1.0 - pois_used) * g < 1e-14 && j > k + 2) break;
        }
    }
    // backward
    {
        double g = gk, p = pk;
        for (long j = k; j > 0; --j) {
            p *= j / lambda;
            g += gterm(j - 1);
            sum += p * g;
            pois_used += p;
            if (1.0 - pois_used < 1e-15) break;
        }
    }
    return std::fmin(1.0, sum);
}

// Noncentral F cdf: Poisson mixture of incomplete beta terms.
double nc_f_cdf(double x, double df1, double df2, double ncp) {
    if (x <= 0.0) return 0.0;
    double q = df1 * x / (df1 * x + df2);
    if (ncp == 0.0) return reg_inc_beta(df1 / 2.0, df2 / 2.0, q);
    double lambda = ncp / 2.0;
    double b = df2 / 2.0;
    long k = static_cast<long>(lambda);
    auto pois = [&](long j) {
        return std::exp(-lambda + j * std::log(lambda) - std::lgamma(j + 1.0));
    };
    // I_q(a+1, b) = I_q(a, b) - q^a (1-q)^b / (a B(a, b))
    auto bterm = [&](double a) {
        return std::exp(a * std::log(q) + b * std::log1p(-q) - special::log_beta(a, b)) / a;
    };
    double a_k = df1 / 2.0 + k;
    double ik = reg_inc_beta(a_k, b, q);
    double pk = pois(k);
    double sum = pk * ik;
    double pois_used = pk;
    {
        double ii = ik, p = pk;
        for (long j = k; j < k + kMaxTerms; ++j) {
            p *= lambda / (j + 1.0);
            ii -= bterm(df1 / 2.0 + j);
            if (ii < 0.0) ii = 0.0;
            sum += p * ii;
            pois_used += p;
            if ((1.0 - pois_used) * ii < 1e-14 && j > k + 2) break;
        }
    }
    {
        double ii = ik, p = pk;
        for (long j = k; j > 0; --j) {
            p *= j / lambda;
            ii += bterm(df1 / 2.0 + j - 1);
            sum += p * ii;
            pois_used += p;
            if (1.0 - pois_used < 1e-15) break;
        }
    }
    return std::fmin(1.0, sum);
}

// Noncentral t cdf, series of incomplete beta terms (Lenth 1989, AS 243
// structure), extended to negative t / delta by reflection.
double nc_t_cdf(double t, double df, double delta) {
    if (delta == 0.0) {
        double xx = df / (t * t + df);
        double tail = 0.5 * reg_inc_beta(df / 2.0, 0.5, xx);
        return t >= 0.0 ? 1.0 - tail : tail;
    }
    if (t < 0.0) return 1.0 - nc_t_cdf(-t, df, -delta);
    // t >= 0 from here; delta may be negative.
    double base = special::normal_cdf(-delta);
    if (t == 0.0) return base;
    double x = t * t / (t * t + df);
    double lambda = delta * delta / 2.0;
    double p = std::exp(-lambda);
    // q_0 = delta exp(-lambda) / (sqrt(2) Gamma(3/2)) = delta exp(-lambda) sqrt(2/pi)
    double q = delta * std::exp(-lambda) * std::sqrt(2.0 / M_PI);
    double a = 0.5, bb = df / 2.0;
    double ia = reg_inc_beta(a, bb, x);        // I_x(j + 1/2, df/2) at j = 0
    double ib = reg_inc_beta(1.0, bb, x);      // I_x(j + 1, df/2) at j = 0
    auto bstep = [&](double aa) {
        return std::exp(aa * std::log(x) + bb * std::log1p(-x) - special::log_beta(aa, bb)) / aa;
    };
    double sum = 0.0;
    double pois_used = std::exp(-lambda);  // mass of p_j used so far (j = 0)
    double s = 0.5 * (p * ia + q * ib);
    sum = s;
    for (long j = 0; j < kMaxTerms; ++j) {
        ia -= bstep(j + 0.5);
        ib -= bstep(j + 1.0);
        if (ia < 0.0) ia = 0.0;
        if (ib < 0.0) ib = 0.0;
        p *= lambda / (j + 1.0);
        q *= lambda / (j + 1.5);
        double term = 0.5 * (p * ia + q * ib);
        sum += term;
        pois_used += p;
        if (j > lambda && (1.0 - pois_used) * (ia + std::fabs(ib)) < 1e-14) break;
    }
    double val = base + sum;
    return std::fmin(1.0, std::fmax(0.0, val));
}

// generic numeric inversion for continuous kinds: returns the upper end of
// a collapsed bracket so that cdf(result) >= p.
double invert_cdf(const Distribution& d, double p, double lo, double hi, bool lo_open) {
    // expand bracket if needed
    double flo = lo_open ? 0.0 : cdf(d, lo);
    int guard = 0;
    while (flo > p && guard++ < 200) {
        lo = lo - std::fmax(1.0, std::fabs(lo)) * 2.0;
        flo = cdf(d, lo);
    }
    double fhi = cdf(d, hi);
    guard = 0;
    while (fhi < p && guard++ < 200) {
        hi = hi + std::fmax(1.0, std::fabs(hi)) * 2.0;
        fhi = cdf(d, hi);
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (cdf(d, mid) >= p)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

int64_t discrete_quantile(const Distribution& d, double p, int64_t lo, int64_t hi) {
    // left-continuous generalized inverse: smallest k with cdf(k) >= p
    while (lo < hi) {
        int64_t mid = lo + (hi - lo) / 2;
        if (cdf(d, static_cast<double>(mid)) >= p)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

}  // namespace

void validate(const Distribution& d) {
    std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Normal>)
                require(v.sigma > 0.0, "Normal: sigma must be positive");
            else if constexpr (std::is_same_v<T, LogNormal>)
                require(v.sdlog > 0.0, "LogNormal: sdlog must be positive");
            else if constexpr (std::is_same_v<T, Uniform>)
                require(v.min < v.max, "Uniform: min must be below max");
            else if constexpr (std::is_same_v<T, Binomial>)
                require(v.n >= 0 && v.p >= 0.0 && v.p <= 1.0, "Binomial: need n >= 0, p in [0,1]");
            else if constexpr (std::is_same_v<T, Bernoulli>)
                require(v.p >= 0.0 && v.p <= 1.0, "Bernoulli: p must be in [0,1]");
            else if constexpr (std::is_same_v<T, ChiSquared>)
                require(v.df > 0.0, "ChiSquared: df must be positive");
            else if constexpr (std::is_same_v<T, StudentT>)
                require(v.df > 0.0, "StudentT: df must be positive");
            else if constexpr (std::is_same_v<T, FisherF>)
                require(v.df1 > 0.0 && v.df2 > 0.0, "FisherF: df must be positive");
            else if constexpr (std::is_same_v<T, NoncentralT>)
                require(v.df > 0.0 && v.ncp >= 0.0, "NoncentralT: need df > 0, ncp >= 0");
            else if constexpr (std::is_same_v<T, NoncentralChiSquared>)
                require(v.df > 0.0 && v.ncp >= 0.0, "NoncentralChiSquared: need df > 0, ncp >= 0");
            else if constexpr (std::is_same_v<T, NoncentralF>)
                require(v.df1 > 0.0 && v.df2 > 0.0 && v.ncp >= 0.0,
                        "NoncentralF: need df > 0, ncp >= 0");
        },
        d);
}

double binom_pmf(int64_t k, int64_t n, double p) {
    if (k < 0 || k > n) return 0.0;
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == n ? 1.0 : 0.0;
    return std::exp(special::log_choose(static_cast<double>(n), static_cast<double>(k)) +
                    k * std::log(p) + (n - k) * std::log1p(-p));
}

double cdf(const Distribution& d, double x) {
    validate(d);
    return std::visit(
        [x](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Normal>) {
                return special::normal_cdf((x - v.mu) / v.sigma);
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                if (x <= 0.0) return 0.0;
                return special::normal_cdf((std::log(x) - v.meanlog) / v.sdlog);
            } else if constexpr (std::is_same_v<T, Uniform>) {
                if (x <= v.min) return 0.0;
                if (x >= v.max) return 1.0;
                return (x - v.min) / (v.max - v.min);
            } else if constexpr (std::is_same_v<T, Binomial>) {
                if (x < 0.0) return 0.0;
                int64_t k = static_cast<int64_t>(std::floor(x));
                if (k >= v.n) return 1.0;
                if (v.p == 0.0) return 1.0;
                if (v.p == 1.0) return 0.0;
                // P(X <= k) = I_{1-p}(n-k, k+1)
                return reg_inc_beta(static_cast<double>(v.n - k), static_cast<double>(k + 1),
                                    1.0 - v.p);
            } else if constexpr (std::is_same_v<T, Bernoulli>) {
                if (x < 0.0) return 0.0;
                if (x >= 1.0) return 1.0;
                return 1.0 - v.p;
            } else if constexpr (std::is_same_v<T, ChiSquared>) {
                if (x <= 0.0) return 0.0;
                return reg_inc_gamma(v.df / 2.0, x / 2.0);
            } else if constexpr (std::is_same_v<T, StudentT>) {
                double xx = v.df / (x * x + v.df);
                double tail = 0.5 * reg_inc_beta(v.df / 2.0, 0.5, xx);
                return x >= 0.0 ? 1.0 - tail : tail;
            } else if constexpr (std::is_same_v<T, FisherF>) {
                if (x <= 0.0) return 0.0;
                return reg_inc_beta(v.df1 / 2.0, v.df2 / 2.0,
                                    v.df1 * x / (v.df1 * x + v.df2));
            } else if constexpr (std::is_same_v<T, NoncentralT>) {
                return nc_t_cdf(x, v.df, v.ncp);
            } else if constexpr (std::is_same_v<T, NoncentralChiSquared>) {
                return nc_chisq_cdf(x, v.df, v.ncp);
            } else {
                return nc_f_cdf(x, v.df1, v.df2, v.ncp);
            }
        },
        d);
}

double quantile(const Distribution& d, double p) {
    validate(d);
    bool discrete = std::holds_alternative<Binomial>(d) || std::holds_alternative<Bernoulli>(d);
    if (discrete) {
        require(p >= 0.0 && p <= 1.0, "quantile: p must be in [0, 1]");
    } else {
        require(p > 0.0 && p < 1.0, "quantile: p must be in (0, 1)");
    }
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Normal>) {
                return v.mu + v.sigma * special::normal_quantile(p);
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                return std::exp(v.meanlog + v.sdlog * special::normal_quantile(p));
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return v.min + p * (v.max - v.min);
            } else if constexpr (std::is_same_v<T, Binomial>) {
                if (p == 0.0) return 0.0;
                if (p == 1.0) return static_cast<double>(v.n);
                return static_cast<double>(discrete_quantile(d, p, 0, v.n));
            } else if constexpr (std::is_same_v<T, Bernoulli>) {
                if (p == 0.0) return 0.0;
                return p <= 1.0 - v.p ? 0.0 : 1.0;
            } else if constexpr (std::is_same_v<T, ChiSquared>) {
                return invert_cdf(d, p, 0.0, v.df + 10.0, true);
            } else if constexpr (std::is_same_v<T, StudentT>) {
                // exact inversion through the incomplete beta inverse
                double tail = p < 0.5 ? p : 1.0 - p;
                double xx = special::inc_beta_inv(v.df / 2.0, 0.5, 2.0 * tail);
                double t = std::sqrt(std::fmax(0.0, v.df * (1.0 - xx) / xx));
                return p < 0.5 ? -t : t;
            } else if constexpr (std::is_same_v<T, FisherF>) {
                double q = special::inc_beta_inv(v.df1 / 2.0, v.df2 / 2.0, p);
                if (q >= 1.0) return kInf;
                return v.df2 * q / (v.df1 * (1.0 - q));
            } else if constexpr (std::is_same_v<T, NoncentralT>) {
                double c = v.ncp + 10.0 * std::sqrt(1.0 + v.ncp * v.ncp);
                return invert_cdf(d, p, -c, c, false);
            } else if constexpr (std::is_same_v<T, NoncentralChiSquared>) {
                return invert_cdf(d, p, 0.0, v.df + v.ncp + 10.0, true);
            } else {
                return invert_cdf(d, p, 0.0, (v.df1 + v.ncp) / v.df1 * 10.0 + 10.0, true);
            }
        },
        d);
}

double sample(const Distribution& d, RandomSource& rng) {
    validate(d);
    double u = rng.next_double();
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Normal>) {
                return v.mu + v.sigma * special::normal_quantile(u);
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                return std::exp(v.meanlog + v.sdlog * special::normal_quantile(u));
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return v.min + u * (v.max - v.min);
            } else if constexpr (std::is_same_v<T, Bernoulli>) {
                return u < v.p ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<T, Binomial>) {
                return static_cast<double>(discrete_quantile(d, u, 0, v.n));
            } else {
                return quantile(d, u);
            }
        },
        d);
}

std::vector<double> sample_n(const Distribution& d, size_t n, RandomSource& rng) {
    std::vector<double> out(n);
    for (auto& x : out) x = sample(d, rng);
    return out;
}

std::vector<int64_t> sample_multinomial(int64_t size, const std::vector<double>& probs,
                                        RandomSource& rng) {
    double tot = 0.0;
    for (double p : probs) {
        require(p >= 0.0, "sample_multinomial: probabilities must be nonnegative");
        tot += p;
    }
    require(std::fabs(tot - 1.0) <= 1e-12, "sample_multinomial: probabilities must sum to 1");
    require(size >= 0, "sample_multinomial: size must be nonnegative");
    std::vector<int64_t> out(probs.size(), 0);
    int64_t remaining = size;
    double prob_left = 1.0;
    for (size_t k = 0; k + 1 < probs.size() && remaining > 0; ++k) {
        double cond = probs[k] / prob_left;
        if (cond >= 1.0) {
            out[k] = remaining;
            remaining = 0;
            break;
        }
        int64_t draw = static_cast<int64_t>(sample(Binomial{remaining, cond}, rng));
        out[k] = draw;
        remaining -= draw;
        prob_left -= probs[k];
    }
    if (!probs.empty()) out.back() += remaining;
    return out;
}

CovarianceMatrix::CovarianceMatrix(int d, std::vector<double> e) : dim(d), entries(std::move(e)) {
    require(dim > 0, "CovarianceMatrix: dim must be positive");
    require(entries.size() == static_cast<size_t>(dim) * dim,
            "CovarianceMatrix: entry count must equal dim*dim");
    double maxabs = 0.0;
    for (double v : entries) maxabs = std::fmax(maxabs, std::fabs(v));
    double tol = 1e-10 * maxabs;
    for (int i = 0; i < dim; ++i) {
        require((*this)(i, i) >= -tol, "CovarianceMatrix: negative diagonal entry");
        for (int j = 0; j < i; ++j)
            require(std::fabs((*this)(i, j) - (*this)(j, i)) <= tol,
                    "CovarianceMatrix: matrix must be symmetric");
    }
}

std::vector<double> CovarianceMatrix::cholesky_psd() const {
    double maxabs = 0.0;
    for (double v : entries) maxabs = std::fmax(maxabs, std::fabs(v));
    double tol = 1e-10 * maxabs;
    std::vector<double> L(static_cast<size_t>(dim) * dim, 0.0);
    auto at = [&](int i, int j) -> double& { return L[static_cast<size_t>(i) * dim + j]; };
    for (int j = 0; j < dim; ++j) {
        double s = (*this)(j, j);
        for (int k = 0; k < j; ++k) s -= at(j, k) * at(j, k);
        if (s <= tol) {
            if (s < -tol)
                throw std::invalid_argument("cholesky_psd: matrix is not positive semi-definite");
            // zero pivot: the whole column collapses
            for (int i = j; i < dim; ++i) at(i, j) = 0.0;
            continue;
        }
        double piv = std::sqrt(s);
        at(j, j) = piv;
        for (int i = j + 1; i < dim; ++i) {
            double v = (*this)(i, j);
            for (int k = 0; k < j; ++k) v -= at(i, k) * at(j, k);
            at(i, j) = v / piv;
        }
    }
    return L;
}

std::vector<double> sample_mvnormal(size_t n, const std::vector<double>& mu,
                                    const CovarianceMatrix& sigma, RandomSource& rng) {
    require(static_cast<int>(mu.size()) == sigma.dim,
            "sample_mvnormal: mean length must equal sigma.dim");
    int d = sigma.dim;
    std::vector<double> L = sigma.cholesky_psd();
    std::vector<double> out(n * static_cast<size_t>(d));
    std::vector<double> z(static_cast<size_t>(d));
    for (size_t r = 0; r < n; ++r) {
        for (auto& v : z) v = rng.next_normal();
        for (int i = 0; i < d; ++i) {
            double s = mu[static_cast<size_t>(i)];
            for (int k = 0; k <= i; ++k)
                s += L[static_cast<size_t>(i) * d + k] * z[static_cast<size_t>(k)];
            out[r * static_cast<size_t>(d) + i] = s;
        }
    }
    return out;
}

}  // namespace powsim::prob
