#include <cmath>

#include "doctest.h"
#include "powsim/engine.hpp"
#include "powsim/oracle.hpp"

using namespace powsim;
using namespace powsim::engine;

TEST_CASE("alpha near 1 rejects every continuous replication") {
    const auto& s = scenarios::find("t-one-sample");
    auto e = estimate_power(s, s.defaults, 30, 0.999999, 500, 7, 2);
    CHECK(e.power == doctest::Approx(1.0));
}

TEST_CASE("mc_se and ci follow the estimate") {
    const auto& s = scenarios::find("t-one-sample");
    auto e = estimate_power(s, s.defaults, 30, 0.05, 2000, 11, 4);
    CHECK(e.mc_se == doctest::Approx(std::sqrt(e.power * (1.0 - e.power) / 2000.0)));
    CHECK(e.ci95.first <= e.power);
    CHECK(e.ci95.second >= e.power);
    CHECK(e.reps == 2000);
    CHECK(e.n == 30);
}

TEST_CASE("worker count does not change the estimate") {
    const auto& s = scenarios::find("paired-t-bivariate");
    auto e1 = estimate_power(s, s.defaults, 18, 0.05, 800, 42, 1);
    auto e2 = estimate_power(s, s.defaults, 18, 0.05, 800, 42, 2);
    auto e8 = estimate_power(s, s.defaults, 18, 0.05, 800, 42, 8);
    CHECK(e1.power == e2.power);
    CHECK(e1.power == e8.power);
    CHECK(e1.invalid_count == e8.invalid_count);
}

TEST_CASE("null variant estimates the size near alpha") {
    const auto& s = scenarios::find("z-one-sample");
    auto e = estimate_size(s, s.defaults, 30, 0.05, 4000, 33, 4);
    CHECK(e.power == doctest::Approx(0.05).epsilon(0.35));  // 4000 reps, loose gate
}

TEST_CASE("power curve keeps input order and matches single estimates") {
    const auto& s = scenarios::find("t-one-sample");
    auto curve = power_curve(s, s.defaults, {10, 20, 30, 40}, 0.05, 1500, 5, 4);
    REQUIRE(curve.size() == 4);
    CHECK(curve[0].n == 10);
    CHECK(curve[3].n == 40);
    // power of about 0.8 is bracketed between n = 20 and n = 40
    CHECK(curve[1].power < 0.8);
    CHECK(curve[3].power > 0.8);
    auto single = estimate_power(s, s.defaults, 10, 0.05, 1500, 5, 3);
    CHECK(curve[0].power == single.power);
}

TEST_CASE("solver finds the one-sample t size") {
    const auto& s = scenarios::find("t-one-sample");
    auto res = solve_sample_size(s, s.defaults, 0.8, 0.05, 1500, 99, 4);
    CHECK(res.n_star >= 26);
    CHECK(res.n_star <= 34);
    CHECK(res.trace.size() >= 2);
    for (size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i - 1].n <= res.trace[i].n);
    // trivial target: the smallest grid n already beats it
    auto res2 = solve_sample_size(s, s.defaults, 0.05, 0.05, 400, 99, 4);
    CHECK(res2.n_star == s.min_n);
}

TEST_CASE("solver reproduces the exact binomial sizing") {
    const auto& s = scenarios::find("binom-exact");
    auto res = solve_sample_size(s, s.defaults, 0.8, 0.05, 2000, 17, 0);
    CHECK(res.n_star >= 8300);
    CHECK(res.n_star <= 9700);
}

TEST_CASE("unreachable target reports an error with its trace") {
    const auto& s = scenarios::find("t-one-sample");
    scenarios::Params nul = scenarios::null_params(s, s.defaults);
    CHECK_THROWS_AS(solve_sample_size(s, nul, 0.5, 0.05, 300, 1, 4, 2000), std::runtime_error);
}

TEST_CASE("ci width: deterministic closed form for known variance") {
    auto w = ci_width(CiKind::mean_known_var, {{"sigma", 7.5}}, 55, 0.95, 50, 3, 2);
    CHECK(w.mean_width == doctest::Approx(3.9642223464294).epsilon(1e-9));
    CHECK(w.sd_width == doctest::Approx(0.0));
}

TEST_CASE("ci width: nesting in the confidence level") {
    auto w90 = ci_width(CiKind::mean_t, {{"sigma", 7.5}}, 65, 0.90, 400, 12, 2);
    auto w99 = ci_width(CiKind::mean_t, {{"sigma", 7.5}}, 65, 0.99, 400, 12, 2);
    CHECK(w90.mean_width < w99.mean_width);
    auto v90 = ci_width(CiKind::variance, {{"sigma", 7.5}}, 55, 0.90, 400, 12, 2);
    auto v99 = ci_width(CiKind::variance, {{"sigma", 7.5}}, 55, 0.99, 400, 12, 2);
    CHECK(v90.mean_width < v99.mean_width);
    CHECK(v90.q90_width >= v90.mean_width * 0.8);
}

TEST_CASE("ci width kinds parse and reject unknowns") {
    CHECK(parse_ci_kind("binom-exact") == CiKind::binom_exact);
    CHECK(ci_kind_name(CiKind::mean_t) == "mean-t");
    CHECK_THROWS(parse_ci_kind("bogus"));
}

TEST_CASE("oracle agreement for the z test") {
    const auto& s = scenarios::find("z-one-sample");
    auto e = estimate_power(s, s.defaults, 30, 0.05, 4000, 2024, 4);
    auto a = oracle::power_z_one_sample(30, 4, 7.5, 0.05);
    CHECK(std::fabs(e.power - a.power) <= 3.5 * e.mc_se);
}
