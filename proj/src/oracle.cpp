#include "powsim/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "powsim/distribution.hpp"
#include "powsim/special.hpp"

namespace powsim::oracle {

using namespace powsim::prob;
using special::normal_cdf;
using special::normal_quantile;

namespace {

double check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
    return alpha;
}

double normal_two_sided(double shift, double alpha) {
    double z = normal_quantile(1.0 - alpha / 2.0);
    return normal_cdf(-z + shift) + normal_cdf(-z - shift);
}

}  // namespace

AnalyticPower power_z_one_sample(double n, double delta, double sigma, double alpha) {
    check_alpha(alpha);
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    double shift = std::fabs(delta) * std::sqrt(n) / sigma;
    return {normal_two_sided(shift, alpha), Method::normal};
}

AnalyticPower power_z_two_sample(double n, double m, double delta, double sigma_x, double sigma_y,
                                 double alpha) {
    check_alpha(alpha);
    if (!(sigma_x > 0.0) || !(sigma_y > 0.0))
        throw std::invalid_argument("sigmas must be positive");
    double se = std::sqrt(sigma_x * sigma_x / n + sigma_y * sigma_y / m);
    return {normal_two_sided(std::fabs(delta) / se, alpha), Method::normal};
}

AnalyticPower power_t_one_sample(double n, double delta, double sigma, double alpha) {
    check_alpha(alpha);
    double df = n - 1.0;
    if (df < 1.0) throw std::invalid_argument("need n >= 2");
    double ncp = std::fabs(delta) * std::sqrt(n) / sigma;
    double tcrit = quantile(StudentT{df}, 1.0 - alpha / 2.0);
    double pw = 1.0 - cdf(NoncentralT{df, ncp}, tcrit) + cdf(NoncentralT{df, ncp}, -tcrit);
    return {pw, Method::noncentral_t};
}

AnalyticPower power_t_two_sample_pooled(double n, double m, double delta, double sigma,
                                        double alpha) {
    check_alpha(alpha);
    double df = n + m - 2.0;
    if (df < 1.0) throw std::invalid_argument("need n + m >= 3");
    double ncp = std::fabs(delta) / (sigma * std::sqrt(1.0 / n + 1.0 / m));
    double tcrit = quantile(StudentT{df}, 1.0 - alpha / 2.0);
    double pw = 1.0 - cdf(NoncentralT{df, ncp}, tcrit) + cdf(NoncentralT{df, ncp}, -tcrit);
    return {pw, Method::noncentral_t};
}

AnalyticPower power_chisq_gof(double n, std::span<const double> p0, std::span<const double> p1,
                              double alpha) {
    check_alpha(alpha);
    if (p0.size() != p1.size() || p0.empty())
        throw std::invalid_argument("p0 and p1 must have equal nonzero length");
    double ncp = 0.0;
    for (size_t k = 0; k < p0.size(); ++k) {
        if (!(p0[k] > 0.0)) throw std::invalid_argument("p0 entries must be positive");
        double d = p1[k] - p0[k];
        ncp += d * d / p0[k];
    }
    ncp *= n;
    double df = static_cast<double>(p0.size()) - 1.0;
    double crit = quantile(ChiSquared{df}, 1.0 - alpha);
    double pw = 1.0 - cdf(NoncentralChiSquared{df, ncp}, crit);
    return {pw, Method::noncentral_chisq};
}

AnalyticPower power_anova_fixed(std::span<const double> cell_means, double sigma,
                                std::span<const double> cell_n, double alpha) {
    check_alpha(alpha);
    if (cell_means.size() != cell_n.size() || cell_means.size() < 2)
        throw std::invalid_argument("need at least two cells");
    double ntot = 0.0, wsum = 0.0;
    for (size_t i = 0; i < cell_n.size(); ++i) {
        ntot += cell_n[i];
        wsum += cell_n[i] * cell_means[i];
    }
    double grand = wsum / ntot;
    double ncp = 0.0;
    for (size_t i = 0; i < cell_n.size(); ++i)
        ncp += cell_n[i] * (cell_means[i] - grand) * (cell_means[i] - grand);
    ncp /= sigma * sigma;
    double df1 = static_cast<double>(cell_means.size()) - 1.0;
    double df2 = ntot - static_cast<double>(cell_means.size());
    double crit = quantile(FisherF{df1, df2}, 1.0 - alpha);
    double pw = 1.0 - cdf(NoncentralF{df1, df2, ncp}, crit);
    return {pw, Method::noncentral_f};
}

AnalyticPower power_correlation(double n, double rho, double rho0, double alpha) {
    check_alpha(alpha);
    if (!(std::fabs(rho) < 1.0) || !(std::fabs(rho0) < 1.0))
        throw std::invalid_argument("correlations must be inside (-1, 1)");
    if (n < 4.0) throw std::invalid_argument("need n >= 4");
    double shift = (std::atanh(rho) - std::atanh(rho0)) * std::sqrt(n - 3.0);
    return {normal_two_sided(std::fabs(shift), alpha), Method::fisher_z};
}

std::string method_name(Method m) {
    switch (m) {
        case Method::normal: return "normal";
        case Method::noncentral_t: return "noncentral-t";
        case Method::noncentral_chisq: return "noncentral-chisq";
        case Method::noncentral_f: return "noncentral-f";
        case Method::fisher_z: return "fisher-z";
    }
    return "?";
}

}  // namespace powsim::oracle
