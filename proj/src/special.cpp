#include "powsim/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace powsim::special {

namespace {

constexpr double kEps = 1e-16;
constexpr long kMaxIter = 1000000;

// P(a, x) by power series around x = 0.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (long i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("reg_inc_gamma: series did not converge");
}

// Q(a, x) by continued fraction (modified Lentz).
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (long i = 1; i < kMaxIter; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("reg_inc_gamma: continued fraction did not converge");
}

// Continued fraction for the incomplete beta (Numerical Recipes betacf).
double beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (long m = 1; m < kMaxIter; ++m) {
        double m2 = 2.0 * static_cast<double>(m);
        double aa = static_cast<double>(m) * (b - static_cast<double>(m)) * x /
                    ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + static_cast<double>(m)) * (qab + static_cast<double>(m)) * x /
             ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("reg_inc_beta: continued fraction did not converge");
}

}  // namespace

double reg_inc_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("reg_inc_gamma: a must be positive");
    if (!(x >= 0.0)) throw std::invalid_argument("reg_inc_gamma: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double reg_inc_gamma_upper(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("reg_inc_gamma_upper: a must be positive");
    if (!(x >= 0.0)) throw std::invalid_argument("reg_inc_gamma_upper: x must be nonnegative");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double log_choose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("reg_inc_beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("reg_inc_beta: x must be in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_cf(a, b, x) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(a, b)) *
                     beta_cf(b, a, 1.0 - x) / b;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must be in (0, 1)");
    // AS 241, PPND16: |relative error| < 1e-15 over the whole range.
    double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                  3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                5.99322937301419247453e+0) * r + 6.65790464350110377720e+0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

double inc_beta_inv(double a, double b, double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("inc_beta_inv: p must be in [0, 1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    // Bisection with Newton acceleration on I_x(a, b) = p.
    double lo = 0.0, hi = 1.0;
    double x = a / (a + b);
    for (int it = 0; it < 300; ++it) {
        double f = reg_inc_beta(a, b, x) - p;
        if (f > 0.0) hi = x; else lo = x;
        double logpdf = (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b);
        double step = f * std::exp(-logpdf);
        double xn = x - step;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) <= 1e-16 * (1.0 + std::fabs(x))) { x = xn; break; }
        x = xn;
    }
    return x;
}

double kolmogorov_cdf(double t) {
    if (t <= 0.0) return 0.0;
    if (t < 1.0) {
        // theta-function form, rapidly convergent for small t
        double sum = 0.0;
        double c = M_PI * M_PI / (8.0 * t * t);
        for (int j = 1; j <= 20; j += 2) {
            double term = std::exp(-c * j * j);
            sum += term;
            if (term < 1e-300) break;
        }
        return std::sqrt(2.0 * M_PI) / t * sum;
    }
    double sum = 0.0;
    for (int j = 1; j <= 200; ++j) {
        double term = std::exp(-2.0 * j * j * t * t);
        sum += (j % 2 == 1) ? term : -term;
        if (term < 1e-18) break;
    }
    return std::fmax(0.0, 1.0 - 2.0 * sum);
}

double ks_exact_cdf(int n, double d) {
    // Marsaglia, Tsang & Wang (2003), "Evaluating Kolmogorov's Distribution".
    if (d <= 0.0) return 0.0;
    if (d >= 1.0) return 1.0;
    double t = n * d;
    int k = static_cast<int>(t) + 1;
    double h = k - t;
    int m = 2 * k - 1;
    std::vector<double> H(static_cast<size_t>(m) * m, 0.0);
    auto at = [&](std::vector<double>& M, int i, int j) -> double& {
        return M[static_cast<size_t>(i) * m + j];
    };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i - j + 1 >= 0) at(H, i, j) = 1.0;
    for (int i = 0; i < m; ++i) {
        at(H, i, 0) -= std::pow(h, i + 1);
        at(H, m - 1, i) -= std::pow(h, m - i);
    }
    at(H, m - 1, 0) += (2.0 * h - 1.0 > 0.0) ? std::pow(2.0 * h - 1.0, m) : 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i - j + 1 > 0)
                for (int g = 1; g <= i - j + 1; ++g) at(H, i, j) /= g;
    // H^n with power-of-two scaling to avoid overflow.
    std::vector<double> Q(H);
    int eQ = 0;
    std::vector<double> P(static_cast<size_t>(m) * m, 0.0);
    int eP = 0;
    bool p_set = false;
    int e_cur = 0;
    int nn = n;
    auto matmul = [&](const std::vector<double>& A, const std::vector<double>& B,
                      std::vector<double>& C) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double s = 0.0;
                for (int g = 0; g < m; ++g)
                    s += A[static_cast<size_t>(i) * m + g] * B[static_cast<size_t>(g) * m + j];
                C[static_cast<size_t>(i) * m + j] = s;
            }
    };
    auto rescale = [&](std::vector<double>& M, int& e) {
        if (M[static_cast<size_t>(k - 1) * m + (k - 1)] > 1e140) {
            for (auto& v : M) v *= 1e-140;
            e += 140;
        }
    };
    std::vector<double> tmp(static_cast<size_t>(m) * m);
    while (nn > 0) {
        if (nn & 1) {
            if (!p_set) {
                P = Q;
                eP = eQ;
                p_set = true;
            } else {
                matmul(P, Q, tmp);
                P.swap(tmp);
                eP += eQ;
                rescale(P, eP);
            }
        }
        nn >>= 1;
        if (nn > 0) {
            matmul(Q, Q, tmp);
            Q.swap(tmp);
            eQ *= 2;
            rescale(Q, eQ);
        }
    }
    e_cur = eP;
    double s = P[static_cast<size_t>(k - 1) * m + (k - 1)];
    // multiply by n!/n^n
    for (int i = 1; i <= n; ++i) {
        s *= static_cast<double>(i) / n;
        if (s < 1e-140) {
            s *= 1e140;
            e_cur -= 140;
        }
    }
    return std::fmin(1.0, std::fmax(0.0, s * std::pow(10.0, e_cur)));
}

}  // namespace powsim::special
