#include <cmath>
#include <vector>

#include "doctest.h"
#include "powsim/distribution.hpp"
#include "powsim/special.hpp"

using namespace powsim::prob;

TEST_CASE("cdf reference values") {
    CHECK(cdf(Normal{0, 1}, 0.0) == doctest::Approx(0.5));
    CHECK(cdf(Binomial{10, 0.5}, 2.0) == doctest::Approx(56.0 / 1024.0).epsilon(1e-12));
    CHECK(cdf(ChiSquared{1}, 3.841458820694124) == doctest::Approx(0.95).epsilon(1e-9));
    // discrete cdf is a right-continuous step function
    CHECK(cdf(Binomial{10, 0.5}, 2.5) == doctest::Approx(cdf(Binomial{10, 0.5}, 2.0)));
    CHECK(cdf(Binomial{10, 0.5}, 1.9999) == doctest::Approx(cdf(Binomial{10, 0.5}, 1.0)));
    CHECK(cdf(Normal{0, 1}, -60.0) == 0.0);
    CHECK(cdf(Normal{0, 1}, 60.0) == 1.0);
}

TEST_CASE("quantile reference values and round trips") {
    CHECK(quantile(StudentT{7}, 0.5) == doctest::Approx(0.0));
    CHECK(quantile(Normal{0, 1}, 0.975) == doctest::Approx(1.959964).epsilon(1e-5));
    CHECK(quantile(FisherF{5, 5}, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
    std::vector<Distribution> kinds = {
        Normal{3, 2},       LogNormal{0.5, 0.6}, Uniform{-1, 4},
        ChiSquared{4},      StudentT{11},        FisherF{4, 17},
        NoncentralT{9, 2},  NoncentralChiSquared{5, 7}, NoncentralF{3, 21, 6}};
    for (const auto& d : kinds)
        for (double p = 0.001; p < 0.9995; p += 0.0513) {
            double q = quantile(d, p);
            CHECK(cdf(d, q) == doctest::Approx(p).epsilon(1e-10));
        }
}

TEST_CASE("cdf is monotone") {
    RandomSource rng(2024, 0);
    std::vector<Distribution> kinds = {Normal{1, 2},  LogNormal{0, 1},  Uniform{0, 3},
                                       ChiSquared{3}, StudentT{6},      FisherF{3, 9},
                                       Binomial{20, 0.4}, NoncentralT{5, 1.5}};
    for (const auto& d : kinds)
        for (int i = 0; i < 200; ++i) {
            double a = -10.0 + 40.0 * rng.next_double();
            double b = a + 10.0 * rng.next_double();
            CHECK(cdf(d, a) <= cdf(d, b) + 1e-14);
        }
}

TEST_CASE("noncentral cdfs with zero ncp equal the central ones") {
    for (double x = 0.1; x < 12.0; x += 0.7) {
        CHECK(cdf(NoncentralChiSquared{4, 0}, x) ==
              doctest::Approx(cdf(ChiSquared{4}, x)).epsilon(1e-10));
        CHECK(cdf(NoncentralF{3, 11, 0}, x) ==
              doctest::Approx(cdf(FisherF{3, 11}, x)).epsilon(1e-10));
        CHECK(cdf(NoncentralT{8, 0}, x - 6.0) ==
              doctest::Approx(cdf(StudentT{8}, x - 6.0)).epsilon(1e-10));
    }
}

TEST_CASE("noncentral cdf frozen reference values") {
    // cross-checked against an independent Poisson-mixture partial sum with
    // explicit remainder bound
    CHECK(cdf(NoncentralChiSquared{5, 15}, 11.0705) ==
          doctest::Approx(0.13353472446546324).epsilon(1e-9));
    CHECK(cdf(NoncentralT{29, 2.921}, 2.04523) ==
          doctest::Approx(0.1940397906299348).epsilon(1e-9));
    CHECK(cdf(NoncentralF{2, 27, 8.3}, 3.0) ==
          doctest::Approx(0.26958247254726847).epsilon(1e-9));
}

TEST_CASE("sampler moments: normal") {
    RandomSource rng(7, 0);
    const int n = 1000000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < n; ++i) {
        double v = sample(Normal{1000, 7.5}, rng);
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / n;
    double sd = std::sqrt(sumsq / n - mean * mean);
    CHECK(mean == doctest::Approx(1000.0).epsilon(0.03 / 1000.0));
    CHECK(sd == doctest::Approx(7.5).epsilon(0.02 / 7.5));
}

TEST_CASE("sampler median: log-normal") {
    RandomSource rng(8, 0);
    const int n = 1000000;
    std::vector<double> v(n);
    for (auto& x : v) x = sample(LogNormal{std::log(130.0), 0.6}, rng);
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    CHECK(v[n / 2] == doctest::Approx(130.0).epsilon(0.5 / 130.0));
}

TEST_CASE("uniform draws stay inside the support") {
    RandomSource rng(9, 0);
    for (int i = 0; i < 10000; ++i) {
        double v = sample(Uniform{2.0, 2.0 + 1e-9}, rng);
        CHECK(v >= 2.0);
        CHECK(v <= 2.0 + 1e-9);
    }
}

TEST_CASE("binomial sampler matches its cdf") {
    RandomSource rng(11, 0);
    const int n = 200000;
    int64_t le2 = 0;
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        double v = sample(Binomial{10, 0.3}, rng);
        sum += v;
        if (v <= 2.0) ++le2;
    }
    CHECK(sum / n == doctest::Approx(3.0).epsilon(0.01));
    CHECK(static_cast<double>(le2) / n ==
          doctest::Approx(cdf(Binomial{10, 0.3}, 2.0)).epsilon(0.02));
}

TEST_CASE("multinomial conservation and degenerate cells") {
    RandomSource rng(12, 0);
    auto deg = sample_multinomial(57, {1.0, 0.0, 0.0}, rng);
    CHECK(deg[0] == 57);
    CHECK(deg[1] == 0);
    CHECK(deg[2] == 0);
    std::vector<double> probs = {0.15, 0.15, 0.15, 0.15, 0.15, 0.25};
    double cell6 = 0.0;
    const int reps = 100000;
    for (int i = 0; i < reps; ++i) {
        auto c = sample_multinomial(300, probs, rng);
        int64_t tot = 0;
        for (auto v : c) tot += v;
        REQUIRE(tot == 300);
        cell6 += static_cast<double>(c[5]);
    }
    CHECK(cell6 / reps == doctest::Approx(75.0).epsilon(0.5 / 75.0));
    CHECK_THROWS(sample_multinomial(10, {0.5, 0.6}, rng));
    CHECK_THROWS(sample_multinomial(10, {1.2, -0.2}, rng));
}

TEST_CASE("covariance matrix validation and PSD factorization") {
    CHECK_THROWS(CovarianceMatrix(2, {1.0, 0.5, 0.2, 1.0}));   // asymmetric
    CHECK_THROWS(CovarianceMatrix(2, {-1.0, 0.0, 0.0, 1.0}));  // negative diagonal
    CovarianceMatrix psd(2, {1.0, 1.0, 1.0, 1.0});             // rank 1, zero pivot allowed
    auto L = psd.cholesky_psd();
    CHECK(L[0] == doctest::Approx(1.0));
    CHECK(L[3] == doctest::Approx(0.0));
    CovarianceMatrix notpsd(2, {1.0, 2.0, 2.0, 1.0});
    CHECK_THROWS(notpsd.cholesky_psd());
}

TEST_CASE("multivariate normal sampling hits the requested covariance") {
    RandomSource rng(13, 0);
    double s = 15.0, r = 0.9;
    CovarianceMatrix sigma(2, {s * s, r * s * s, r * s * s, s * s});
    const size_t n = 1000000;
    auto rows = sample_mvnormal(n, {105.0, 100.0}, sigma, rng);
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += rows[2 * i];
        my += rows[2 * i + 1];
    }
    mx /= n;
    my /= n;
    double cov = 0;
    for (size_t i = 0; i < n; ++i) cov += (rows[2 * i] - mx) * (rows[2 * i + 1] - my);
    cov /= n - 1;
    CHECK(mx == doctest::Approx(105.0).epsilon(0.1 / 105.0));
    CHECK(cov == doctest::Approx(202.5).epsilon(1.5 / 202.5));
}

TEST_CASE("identity covariance gives uncorrelated columns") {
    RandomSource rng(14, 0);
    CovarianceMatrix sigma(2, {1.0, 0.0, 0.0, 1.0});
    const size_t n = 100000;
    auto rows = sample_mvnormal(n, {0.0, 0.0}, sigma, rng);
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxy += rows[2 * i] * rows[2 * i + 1];
        sxx += rows[2 * i] * rows[2 * i];
        syy += rows[2 * i + 1] * rows[2 * i + 1];
    }
    double rr = sxy / std::sqrt(sxx * syy);
    CHECK(std::fabs(rr) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("parameter validation raises") {
    CHECK_THROWS(cdf(Normal{0, -1}, 0.0));
    CHECK_THROWS(cdf(Uniform{3, 2}, 0.0));
    CHECK_THROWS(cdf(Binomial{5, 1.2}, 1.0));
    CHECK_THROWS(cdf(NoncentralT{5, -1}, 0.0));
    CHECK_THROWS(quantile(Normal{0, 1}, 1.5));
    RandomSource rng(1, 0);
    CHECK_THROWS(sample(ChiSquared{-2}, rng));
}
