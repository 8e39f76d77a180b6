#include <cmath>
#include <set>

#include "doctest.h"
#include "powsim/scenario.hpp"

using namespace powsim;
using namespace powsim::scenarios;

TEST_CASE("catalog ids and frozen defaults") {
    const auto& all = catalog();
    CHECK(all.size() == 40);
    std::set<std::string> ids;
    for (const auto& s : all) CHECK(ids.insert(s.id).second);

    const auto& be = find("binom-exact");
    CHECK(be.default_n == 9000);
    CHECK(be.defaults.at("effect") == doctest::Approx(0.015));
    CHECK(be.defaults.at("p0") == doctest::Approx(0.5));

    const auto& pt = find("paired-t-bivariate");
    CHECK(pt.default_n == 18);
    CHECK(pt.defaults.at("s") == doctest::Approx(15.0));
    CHECK(pt.defaults.at("r") == doctest::Approx(0.9));
    CHECK(pt.defaults.at("effect") == doctest::Approx(5.0));

    CHECK(find("t-one-sample").default_n == 30);
    CHECK(find("variance").default_n == 50);
    CHECK(find("sign").default_n == 75);
    CHECK(find("wilcoxon-signed").default_n == 32);
    CHECK(find("gof-multinomial").default_n == 300);
    CHECK(find("gof-normal-known").default_n == 140);
    CHECK(find("gof-lognormal-estimated").default_n == 850);
    CHECK(find("ks-normal").default_n == 250);
    CHECK(find("z-two-sample").default_n == 85);
    CHECK(find("z-two-sample").defaults.at("m") == doctest::Approx(70.0));
    CHECK(find("t-pooled").default_n == 115);
    CHECK(find("var-ratio").defaults.at("ratio") == doctest::Approx(2.5));
    CHECK(find("rank-sum").defaults.at("effect") == doctest::Approx(40.0));
    CHECK(find("randomization-unpaired").defaults.at("inner_reps") == doctest::Approx(800.0));
    CHECK(find("chisq-homogeneity").default_n == 250);
    CHECK(find("chisq-independence-latent").defaults.at("rho") == doctest::Approx(0.4));
    CHECK(find("cor-rho0-nonzero").defaults.at("rho0") == doctest::Approx(0.6));
    CHECK(find("regression-simple-wald").defaults.at("b1") == doctest::Approx(-2.5));
    CHECK(find("regression-multiple").defaults.at("b2") == doctest::Approx(0.1));
    CHECK(find("regression-binomial").defaults.at("odds_ratio") == doctest::Approx(1.5));
    CHECK(find("anova-oneway-fixed").defaults.at("a3") == doctest::Approx(-3.0));
    CHECK(find("anova-oneway-random").defaults.at("sigma_a") == doctest::Approx(10.0));
    CHECK(find("anova-twoway-fixed").defaults.at("ab22") == doctest::Approx(12.0));
    CHECK(find("anova-twoway-random").defaults.at("sigma_ab") == doctest::Approx(7.0));
    CHECK(find("anova-rm-one-factor").defaults.at("b4") == doctest::Approx(6.0));
    CHECK(find("anova-rm-two-factor").defaults.at("ab22") == doctest::Approx(-150.0));
    CHECK(find("ancova").defaults.at("a3") == doctest::Approx(4.0));
    CHECK(find("mv-one-sample").defaults.at("d2") == doctest::Approx(-1.0));
    CHECK(find("mv-two-sample").defaults.at("d3") == doctest::Approx(15.0));
    CHECK(find("mv-paired").defaults.at("d3") == doctest::Approx(0.7));
    CHECK_THROWS(find("no-such-scenario"));
}

TEST_CASE("null variants zero exactly the effect parameters") {
    for (const auto& s : catalog()) {
        Params p = s.defaults;
        Params np = null_params(s, p);
        CHECK(np.size() == p.size());
        bool changed = false;
        for (const auto& [k, v] : np) {
            if (p.at(k) != v) changed = true;
        }
        // the correlation scenario with rho0 = 0 keeps rho = 0.3 -> 0.0, so
        // every scenario must change at least one parameter except when the
        // default already equals the null (none in the catalog)
        CHECK(changed);
    }
    Params np = null_params(find("cor-rho0-nonzero"), find("cor-rho0-nonzero").defaults);
    CHECK(np.at("rho") == doctest::Approx(0.6));
    Params nv = null_params(find("var-ratio"), find("var-ratio").defaults);
    CHECK(nv.at("ratio") == doctest::Approx(1.0));
}

TEST_CASE("parameter overrides are checked") {
    const auto& s = find("t-one-sample");
    Params merged = merged_params(s, {{"effect", 2.0}});
    CHECK(merged.at("effect") == doctest::Approx(2.0));
    CHECK(merged.at("sigma") == doctest::Approx(7.5));
    CHECK_THROWS(merged_params(s, {{"nonsense", 1.0}}));
}

TEST_CASE("incompatible n is rejected with the divisibility requirement") {
    CHECK_THROWS(check_n(find("regression-multiple"), 31));
    CHECK_THROWS(check_n(find("regression-simple-wald"), 33));
    CHECK_THROWS(check_n(find("anova-twoway-random"), 100));
    CHECK_THROWS(check_n(find("t-one-sample"), 1));
    CHECK_NOTHROW(check_n(find("regression-multiple"), 45));
}

TEST_CASE("generation is deterministic given the stream") {
    for (const auto& s : catalog()) {
        prob::RandomSource r1(99, 1234), r2(99, 1234);
        auto t1 = run_once(s, s.defaults, s.default_n, r1);
        auto t2 = run_once(s, s.defaults, s.default_n, r2);
        CHECK(t1.valid == t2.valid);
        if (t1.valid) {
            CHECK(t1.p_value == t2.p_value);
            CHECK(t1.statistic == t2.statistic);
        }
    }
}

TEST_CASE("generated dataset shapes follow n") {
    prob::RandomSource rng(1, 0);
    auto d = generate(find("t-one-sample"), find("t-one-sample").defaults, 30, rng);
    CHECK(std::get<VectorData>(d).x.size() == 30);
    auto d2 = generate(find("z-two-sample"), find("z-two-sample").defaults, 85, rng);
    CHECK(std::get<TwoVectorData>(d2).x.size() == 85);
    CHECK(std::get<TwoVectorData>(d2).y.size() == 70);
    auto d3 = generate(find("mv-one-sample"), find("mv-one-sample").defaults, 30, rng);
    CHECK(std::get<MatrixData>(d3).n == 30);
    CHECK(std::get<MatrixData>(d3).p == 4);
    auto d4 = generate(find("anova-rm-one-factor"), find("anova-rm-one-factor").defaults, 22, rng);
    CHECK(std::get<DesignResponseData>(d4).y.size() == 88);  // 4 responses per subject
    auto d5 = generate(find("regression-binomial"), find("regression-binomial").defaults, 70, rng);
    CHECK(std::get<DesignResponseData>(d5).y.size() == 7);  // successes per dose
}

TEST_CASE("t-one-sample generator draws from the shifted model") {
    const auto& s = find("t-one-sample");
    prob::RandomSource rng(2, 7);
    double sum = 0.0;
    const int reps = 2000;
    for (int i = 0; i < reps; ++i) {
        auto d = generate(s, s.defaults, 30, rng);
        for (double v : std::get<VectorData>(d).x) sum += v;
    }
    CHECK(sum / (30.0 * reps) == doctest::Approx(1004.0).epsilon(0.1 / 1004.0));
}
