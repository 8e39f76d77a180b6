#pragma once

#include <span>
#include <string>

// Closed-form power calculators used to validate the simulator where an
// analytic answer exists.

namespace powsim::oracle {

enum class Method { normal, noncentral_t, noncentral_chisq, noncentral_f, fisher_z };

struct AnalyticPower {
    double power = 0.0;
    Method method = Method::normal;
};

AnalyticPower power_z_one_sample(double n, double delta, double sigma, double alpha);
AnalyticPower power_z_two_sample(double n, double m, double delta, double sigma_x, double sigma_y,
                                 double alpha);
AnalyticPower power_t_one_sample(double n, double delta, double sigma, double alpha);
AnalyticPower power_t_two_sample_pooled(double n, double m, double delta, double sigma,
                                        double alpha);

// Pearson chi-squared GOF against p0 when the truth is p1; ncp = n sum
// (p1-p0)^2/p0, df k-1.
AnalyticPower power_chisq_gof(double n, std::span<const double> p0, std::span<const double> p1,
                              double alpha);

// One-way fixed-effects ANOVA F test; ncp = sum n_i (mu_i - mu_bar)^2 / sigma^2.
AnalyticPower power_anova_fixed(std::span<const double> cell_means, double sigma,
                                std::span<const double> cell_n, double alpha);

// Correlation test via the Fisher z transform.
AnalyticPower power_correlation(double n, double rho, double rho0, double alpha);

std::string method_name(Method m);

}  // namespace powsim::oracle
