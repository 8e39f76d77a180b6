#include "powsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "powsim/distribution.hpp"

namespace powsim::scenarios {

using namespace powsim::prob;
using linmod::Variable;
using tests::TestResult;

namespace {

double get(const Params& p, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end()) throw std::invalid_argument("missing parameter: " + key);
    return it->second;
}

int geti(const Params& p, const std::string& key) {
    return static_cast<int>(std::llround(get(p, key)));
}

std::vector<double> normal_vec(int n, double mu, double sd, RandomSource& rng) {
    std::vector<double> out(static_cast<size_t>(n));
    for (auto& v : out) v = mu + sd * rng.next_normal();
    return out;
}

// n pairs from a bivariate normal with equal sds s and correlation r.
PairedData bivariate_pairs(int n, double mu1, double mu2, double s, double r,
                           RandomSource& rng) {
    CovarianceMatrix sigma(2, {s * s, r * s * s, r * s * s, s * s});
    std::vector<double> rows = sample_mvnormal(static_cast<size_t>(n), {mu1, mu2}, sigma, rng);
    PairedData d;
    d.x.resize(static_cast<size_t>(n));
    d.y.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        d.x[static_cast<size_t>(i)] = rows[static_cast<size_t>(i) * 2];
        d.y[static_cast<size_t>(i)] = rows[static_cast<size_t>(i) * 2 + 1];
    }
    return d;
}

// Equal-width binning of the data range, as R's cut(x, breaks = k): interior
// cuts at equal spacing between min and max, outer limits pushed out, bins
// right-closed.
std::vector<int> range_cut(const std::vector<double>& x, int k) {
    double lo = *std::min_element(x.begin(), x.end());
    double hi = *std::max_element(x.begin(), x.end());
    std::vector<int> idx(x.size());
    if (hi <= lo) return idx;
    for (size_t i = 0; i < x.size(); ++i) {
        int b = 0;
        for (int j = 1; j < k; ++j)
            if (x[i] > lo + (hi - lo) * j / k) b = j;
        idx[i] = b;
    }
    return idx;
}

const std::vector<double> kGofBreaks = {80, 85, 90, 95, 100, 105, 110, 115, 120};

std::vector<double> normal_bin_probs(double mu, double sd) {
    std::vector<double> cdfs;
    cdfs.reserve(kGofBreaks.size());
    for (double b : kGofBreaks) cdfs.push_back(cdf(Normal{mu, sd}, b));
    return tests::model_probs(cdfs);
}

// grade distributions of the two courses (homogeneity scenario)
const std::vector<double> kCourse1 = {0.09, 0.25, 0.32, 0.25, 0.09};
const std::vector<double> kCourse2 = {0.16, 0.22, 0.24, 0.22, 0.16};
// pooled at the default group sizes 250 and 190; the null draws both groups
// from this common distribution
std::vector<double> pooled_grades() {
    std::vector<double> p(5);
    for (int k = 0; k < 5; ++k)
        p[static_cast<size_t>(k)] =
            (250.0 * kCourse1[static_cast<size_t>(k)] + 190.0 * kCourse2[static_cast<size_t>(k)]) /
            440.0;
    return p;
}

// joint 2x3 cell probabilities, column-major in Y (X fastest)
const std::vector<double> kJoint = {0.10, 0.23, 0.17, 0.17, 0.23, 0.10};
std::vector<double> independent_joint() {
    double row1 = kJoint[0] + kJoint[2] + kJoint[4];
    double row2 = kJoint[1] + kJoint[3] + kJoint[5];
    std::vector<double> out(6);
    for (int j = 0; j < 3; ++j) {
        double colm = kJoint[static_cast<size_t>(2 * j)] + kJoint[static_cast<size_t>(2 * j + 1)];
        out[static_cast<size_t>(2 * j)] = row1 * colm;
        out[static_cast<size_t>(2 * j + 1)] = row2 * colm;
    }
    return out;
}

std::vector<double> mix_probs(const std::vector<double>& base, const std::vector<double>& alt,
                              double theta) {
    std::vector<double> out(base.size());
    for (size_t i = 0; i < base.size(); ++i) out[i] = base[i] + theta * (alt[i] - base[i]);
    return out;
}

Variable factor_var(const std::string& name, int n_levels, std::vector<int> idx) {
    linmod::FactorSpec spec;
    spec.name = name;
    for (int l = 1; l <= n_levels; ++l) spec.levels.push_back(std::to_string(l));
    return Variable::from_factor(std::move(spec), std::move(idx));
}

void set_zero(Params& p, std::initializer_list<const char*> keys) {
    for (const char* k : keys) p[k] = 0.0;
}

// covariance with unit-free structure sigma_ij = r s_i s_j off the diagonal
CovarianceMatrix const_corr_cov(const std::vector<double>& s, double r) {
    int p = static_cast<int>(s.size());
    std::vector<double> e(static_cast<size_t>(p) * p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            e[static_cast<size_t>(i) * p + j] =
                (i == j) ? s[static_cast<size_t>(i)] * s[static_cast<size_t>(i)]
                         : r * s[static_cast<size_t>(i)] * s[static_cast<size_t>(j)];
    return CovarianceMatrix(p, std::move(e));
}

// ---- individual scenarios --------------------------------------------------

Scenario binom_scenario(bool exact) {
    Scenario s;
    s.id = exact ? "binom-exact" : "binom-approx";
    s.title = exact ? "exact binomial test of a proportion"
                    : "approximate (score) test of a proportion";
    s.defaults = {{"p0", 0.5}, {"effect", 0.015}};
    s.default_n = 9000;
    s.exact_test = exact;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        double prob = get(p, "p0") + get(p, "effect");
        CountData d;
        d.n = n;
        d.x = static_cast<int64_t>(sample(Binomial{n, prob}, rng));
        return d;
    };
    s.apply_fn = [exact](const Params& p, const Dataset& d, RandomSource&) {
        const auto& c = std::get<CountData>(d);
        return exact ? tests::binom_exact_test(c.x, c.n, get(p, "p0"))
                     : tests::prop_score_test(c.x, c.n, get(p, "p0"));
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect"}); };
    return s;
}

Scenario z_one_sample_scenario() {
    Scenario s;
    s.id = "z-one-sample";
    s.title = "one-sample z test, variance known";
    s.defaults = {{"mu0", 1000}, {"effect", 4}, {"sigma", 7.5}};
    s.default_n = 30;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        return VectorData{normal_vec(n, get(p, "mu0") + get(p, "effect"), get(p, "sigma"), rng)};
    };
    s.apply_fn = [](const Params& p, const Dataset& d, RandomSource&) {
        return tests::z_test_one_sample(std::get<VectorData>(d).x, get(p, "mu0"), get(p, "sigma"));
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect"}); };
    return s;
}

Scenario t_one_sample_scenario() {
    Scenario s;
    s.id = "t-one-sample";
    s.title = "one-sample t test";
    s.defaults = {{"mu0", 1000}, {"effect", 4}, {"sigma", 7.5}};
    s.default_n = 30;
    s.min_n = 2;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        return VectorData{normal_vec(n, get(p, "mu0") + get(p, "effect"), get(p, "sigma"), rng)};
    };
    s.apply_fn = [](const Params& p, const Dataset& d, RandomSource&) {
        return tests::t_test_one_sample(std::get<VectorData>(d).x, get(p, "mu0"));
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect"}); };
    return s;
}

Scenario variance_scenario() {
    Scenario s;
    s.id = "variance";
    s.title = "chi-squared test of a variance";
    s.defaults = {{"mu", 1000}, {"sigma0", 7.5}, {"effect", 2.5}};
    s.default_n = 50;
    s.min_n = 2;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        return VectorData{normal_vec(n, get(p, "mu"), get(p, "sigma0") + get(p, "effect"), rng)};
    };
    s.apply_fn = [](const Params& p, const Dataset& d, RandomSource&) {
        double s0 = get(p, "sigma0");
        return tests::variance_chisq_test(std::get<VectorData>(d).x, s0 * s0);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect"}); };
    return s;
}

Scenario sign_scenario() {
    Scenario s;
    s.id = "sign";
    s.title = "sign test of a median, log-normal data";
    s.defaults = {{"median0", 100}, {"effect", 30}, {"sdlog", 0.6}};
    s.default_n = 75;
    s.exact_test = true;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        double med = get(p, "median0") + get(p, "effect");
        return VectorData{sample_n(LogNormal{std::log(med), get(p, "sdlog")},
                                   static_cast<size_t>(n), rng)};
    };
    s.apply_fn = [](const Params& p, const Dataset& d, RandomSource&) {
        return tests::sign_test(std::get<VectorData>(d).x, get(p, "median0"));
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect"}); };
    return s;
}

Scenario wilcoxon_signed_scenario() {
    Scenario s;
    s.id = "wilcoxon-signed";
    s.title = "Wilcoxon signed-rank test, uniform data";
    s.defaults = {{"mu0", 100}, {"effect", 25}, {"halfwidth", 75}};
    s.default_n = 32;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        double center = get(p, "mu0") + get(p, "effect");
        double h = get(p, "halfwidth");
        return VectorData{sample_n(Uniform{center - h, center + h}, static_cast<size_t>(n), rng)};
    };
    s.apply_fn = [](const Params& p, const Dataset& d, RandomSource&) {
        return tests::wilcoxon_signed_rank(std::get<VectorData>(d).x, get(p, "mu0"));
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect"}); };
    return s;
}

Scenario gof_multinomial_scenario() {
    Scenario s;
    s.id = "gof-multinomial";
    s.title = "chi-squared goodness of fit, loaded die";
    s.defaults = {{"p_six", 0.25}};
    s.default_n = 300;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        double p6 = get(p, "p_six");
        std::vector<double> probs(6, (1.0 - p6) / 5.0);
        probs[5] = p6;
        auto counts = sample_multinomial(n, probs, rng);
        VectorData v;
        v.x.assign(counts.begin(), counts.end());
        return v;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& v = std::get<VectorData>(d).x;
        std::vector<int64_t> counts(v.size());
        for (size_t i = 0; i < v.size(); ++i) counts[i] = static_cast<int64_t>(v[i]);
        std::vector<double> probs0(6, 1.0 / 6.0);
        return tests::chisq_gof(counts, probs0, 0);
    };
    s.nullify_fn = [](Params& p) { p["p_six"] = 1.0 / 6.0; };
    return s;
}

Scenario gof_normal_known_scenario() {
    Scenario s;
    s.id = "gof-normal-known";
    s.title = "chi-squared goodness of fit to a normal, parameters known";
    s.defaults = {{"mu", 100}, {"sd0", 15}, {"effect_sd", 5}};
    s.default_n = 140;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        return VectorData{normal_vec(n, get(p, "mu"), get(p, "sd0") + get(p, "effect_sd"), rng)};
    };
    s.apply_fn = [](const Params& p, const Dataset& d, RandomSource&) {
        auto counts = tests::bin_continuous(std::get<VectorData>(d).x, kGofBreaks);
        auto probs = normal_bin_probs(get(p, "mu"), get(p, "sd0"));
        return tests::chisq_gof(counts, probs, 0);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect_sd"}); };
    return s;
}

Scenario gof_lognormal_scenario() {
    Scenario s;
    s.id = "gof-lognormal-estimated";
    s.title = "chi-squared goodness of fit to a normal, parameters estimated";
    s.defaults = {{"mean", 100}, {"sdlog", 0.25}, {"lognormal", 1}, {"df_reduction", 2}};
    s.default_n = 850;
    s.min_n = 3;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        double mean = get(p, "mean");
        double sdlog = get(p, "sdlog");
        if (get(p, "lognormal") != 0.0) {
            double meanlog = std::log(mean) - sdlog * sdlog / 2.0;
            return VectorData{sample_n(LogNormal{meanlog, sdlog}, static_cast<size_t>(n), rng)};
        }
        double sd = mean * std::sqrt(std::exp(sdlog * sdlog) - 1.0);
        return VectorData{normal_vec(n, mean, sd, rng)};
    };
    s.apply_fn = [](const Params& p, const Dataset& d, RandomSource&) {
        const auto& x = std::get<VectorData>(d).x;
        auto counts = tests::bin_continuous(x, kGofBreaks);
        double m = 0.0;
        for (double v : x) m += v;
        m /= static_cast<double>(x.size());
        double ss = 0.0;
        for (double v : x) ss += (v - m) * (v - m);
        double sd = std::sqrt(ss / (static_cast<double>(x.size()) - 1.0));
        auto probs = normal_bin_probs(m, sd);
        return tests::chisq_gof(counts, probs, geti(p, "df_reduction"));
    };
    s.nullify_fn = [](Params& p) { p["lognormal"] = 0.0; };
    return s;
}

Scenario ks_scenario() {
    Scenario s;
    s.id = "ks-normal";
    s.title = "Kolmogorov-Smirnov goodness of fit to a normal";
    s.defaults = {{"mu", 100}, {"sd0", 15}, {"effect_sd", 5}};
    s.default_n = 250;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        return VectorData{normal_vec(n, get(p, "mu"), get(p, "sd0") + get(p, "effect_sd"), rng)};
    };
    s.apply_fn = [](const Params& p, const Dataset& d, RandomSource&) {
        return tests::ks_test_one_sample(std::get<VectorData>(d).x,
                                         Normal{get(p, "mu"), get(p, "sd0")});
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect_sd"}); };
    return s;
}

Scenario z_two_sample_scenario() {
    Scenario s;
    s.id = "z-two-sample";
    s.title = "two-sample z test, variances known";
    s.defaults = {{"mu", 1000}, {"effect", 4}, {"sigma_x", 7}, {"sigma_y", 10}, {"m", 70}};
    s.default_n = 85;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        TwoVectorData d;
        d.x = normal_vec(n, get(p, "mu") + get(p, "effect"), get(p, "sigma_x"), rng);
        d.y = normal_vec(geti(p, "m"), get(p, "mu"), get(p, "sigma_y"), rng);
        return d;
    };
    s.apply_fn = [](const Params& p, const Dataset& d, RandomSource&) {
        const auto& t = std::get<TwoVectorData>(d);
        return tests::z_test_two_sample(t.x, t.y, get(p, "sigma_x"), get(p, "sigma_y"));
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect"}); };
    return s;
}

Scenario t_pooled_scenario() {
    Scenario s;
    s.id = "t-pooled";
    s.title = "two-sample pooled t test";
    s.defaults = {{"mu", 1000}, {"effect", 4}, {"sigma", 10}, {"m", 90}};
    s.default_n = 115;
    s.min_n = 2;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        TwoVectorData d;
        d.x = normal_vec(n, get(p, "mu") + get(p, "effect"), get(p, "sigma"), rng);
        d.y = normal_vec(geti(p, "m"), get(p, "mu"), get(p, "sigma"), rng);
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& t = std::get<TwoVectorData>(d);
        return tests::t_test_two_sample(t.x, t.y, /*pooled=*/true);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect"}); };
    return s;
}

Scenario var_ratio_scenario() {
    Scenario s;
    s.id = "var-ratio";
    s.title = "F test comparing two variances";
    s.defaults = {{"mu", 1000}, {"ratio", 2.5}, {"sigma_y", 7}, {"m", 40}};
    s.default_n = 45;
    s.min_n = 2;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        double sy = get(p, "sigma_y");
        TwoVectorData d;
        d.x = normal_vec(n, get(p, "mu"), sy * std::sqrt(get(p, "ratio")), rng);
        d.y = normal_vec(geti(p, "m"), get(p, "mu"), sy, rng);
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& t = std::get<TwoVectorData>(d);
        return tests::var_ratio_f_test(t.x, t.y);
    };
    s.nullify_fn = [](Params& p) { p["ratio"] = 1.0; };
    return s;
}

Scenario rank_sum_scenario() {
    Scenario s;
    s.id = "rank-sum";
    s.title = "Wilcoxon rank-sum test, log-normal data";
    s.defaults = {{"base", 100}, {"effect", 40}, {"sdlog", 0.6}, {"m", 50}};
    s.default_n = 60;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        double sdlog = get(p, "sdlog");
        TwoVectorData d;
        d.x = sample_n(LogNormal{std::log(get(p, "base") + get(p, "effect")), sdlog},
                       static_cast<size_t>(n), rng);
        d.y = sample_n(LogNormal{std::log(get(p, "base")), sdlog},
                       static_cast<size_t>(geti(p, "m")), rng);
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& t = std::get<TwoVectorData>(d);
        return tests::wilcoxon_rank_sum(t.x, t.y);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect"}); };
    return s;
}

Scenario randomization_unpaired_scenario() {
    Scenario s;
    s.id = "randomization-unpaired";
    s.title = "unpaired randomization test (Welch t base)";
    s.defaults = {{"mu", 1000}, {"effect", 4}, {"sigma", 5}, {"m", 35}, {"inner_reps", 800}};
    s.default_n = 40;
    s.min_n = 2;
    s.exact_test = true;
    s.randomization = true;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        TwoVectorData d;
        d.x = normal_vec(n, get(p, "mu") + get(p, "effect"), get(p, "sigma"), rng);
        d.y = normal_vec(geti(p, "m"), get(p, "mu"), get(p, "sigma"), rng);
        return d;
    };
    s.apply_fn = [](const Params& p, const Dataset& d, RandomSource& rng) {
        const auto& t = std::get<TwoVectorData>(d);
        return tests::randomization_test_unpaired(t.x, t.y, geti(p, "inner_reps"), rng);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect"}); };
    return s;
}

Scenario paired_t_bivariate_scenario() {
    Scenario s;
    s.id = "paired-t-bivariate";
    s.title = "paired t test, bivariate normal scores";
    s.defaults = {{"mu", 100}, {"effect", 5}, {"s", 15}, {"r", 0.9}};
    s.default_n = 18;
    s.min_n = 2;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        double mu = get(p, "mu");
        return bivariate_pairs(n, mu + get(p, "effect"), mu, get(p, "s"), get(p, "r"), rng);
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& t = std::get<PairedData>(d);
        return tests::paired_t_test(t.x, t.y);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect"}); };
    return s;
}

Scenario paired_t_differences_scenario() {
    Scenario s;
    s.id = "paired-t-differences";
    s.title = "paired t test on normally distributed differences";
    s.defaults = {{"effect", 5}, {"s", 15}, {"r", 0.9}};
    s.default_n = 18;
    s.min_n = 2;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        double ss = get(p, "s");
        double sd = std::sqrt(2.0 * ss * ss * (1.0 - get(p, "r")));
        return VectorData{normal_vec(n, get(p, "effect"), sd, rng)};
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        return tests::t_test_one_sample(std::get<VectorData>(d).x, 0.0);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect"}); };
    return s;
}

Scenario paired_wilcoxon_scenario() {
    Scenario s;
    s.id = "paired-wilcoxon";
    s.title = "paired Wilcoxon signed-rank test";
    s.defaults = {{"mu", 100}, {"effect", 5}, {"s", 15}, {"r", 0.9}};
    s.default_n = 18;
    s.min_n = 2;
    s.exact_test = true;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        double mu = get(p, "mu");
        return bivariate_pairs(n, mu + get(p, "effect"), mu, get(p, "s"), get(p, "r"), rng);
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& t = std::get<PairedData>(d);
        std::vector<double> diff(t.x.size());
        for (size_t i = 0; i < diff.size(); ++i) diff[i] = t.x[i] - t.y[i];
        return tests::wilcoxon_signed_rank(diff, 0.0);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect"}); };
    return s;
}

Scenario randomization_paired_scenario() {
    Scenario s;
    s.id = "randomization-paired";
    s.title = "paired randomization test (sign flips)";
    s.defaults = {{"effect", 5}, {"s", 15}, {"r", 0.9}, {"inner_reps", 800}};
    s.default_n = 18;
    s.min_n = 2;
    s.exact_test = true;
    s.randomization = true;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        double ss = get(p, "s");
        double sd = std::sqrt(2.0 * ss * ss * (1.0 - get(p, "r")));
        return VectorData{normal_vec(n, get(p, "effect"), sd, rng)};
    };
    s.apply_fn = [](const Params& p, const Dataset& d, RandomSource& rng) {
        return tests::randomization_test_paired(std::get<VectorData>(d).x, geti(p, "inner_reps"),
                                                rng);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"effect"}); };
    return s;
}

Scenario homogeneity_scenario() {
    Scenario s;
    s.id = "chisq-homogeneity";
    s.title = "chi-squared test of homogeneity, two courses";
    s.defaults = {{"theta", 1}, {"m", 190}};
    s.default_n = 250;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        double theta = get(p, "theta");
        auto pooled = pooled_grades();
        auto c1 = sample_multinomial(n, mix_probs(pooled, kCourse1, theta), rng);
        auto c2 = sample_multinomial(geti(p, "m"), mix_probs(pooled, kCourse2, theta), rng);
        std::vector<double> cells(10);
        for (int k = 0; k < 5; ++k) {
            cells[static_cast<size_t>(k)] = static_cast<double>(c1[static_cast<size_t>(k)]);
            cells[static_cast<size_t>(5 + k)] = static_cast<double>(c2[static_cast<size_t>(k)]);
        }
        return TableData{tests::ContingencyTable(2, 5, std::move(cells))};
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        return tests::chisq_contingency(std::get<TableData>(d).tab);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"theta"}); };
    return s;
}

Scenario independence_multinomial_scenario() {
    Scenario s;
    s.id = "chisq-independence-multinomial";
    s.title = "chi-squared test of independence, joint multinomial";
    s.defaults = {{"theta", 1}};
    s.default_n = 90;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        auto probs = mix_probs(independent_joint(), kJoint, get(p, "theta"));
        auto counts = sample_multinomial(n, probs, rng);
        std::vector<double> cells(6);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 3; ++j)
                cells[static_cast<size_t>(i) * 3 + j] =
                    static_cast<double>(counts[static_cast<size_t>(2 * j + i)]);
        return TableData{tests::ContingencyTable(2, 3, std::move(cells))};
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        return tests::chisq_contingency(std::get<TableData>(d).tab);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"theta"}); };
    return s;
}

Scenario independence_latent_scenario() {
    Scenario s;
    s.id = "chisq-independence-latent";
    s.title = "chi-squared test of independence, latent continuous variables";
    s.defaults = {{"rho", 0.4}};
    s.default_n = 130;
    s.min_n = 2;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        auto d = bivariate_pairs(n, 0.0, 0.0, 1.0, get(p, "rho"), rng);
        auto bx = range_cut(d.x, 2);
        auto by = range_cut(d.y, 3);
        std::vector<double> cells(6, 0.0);
        for (int i = 0; i < n; ++i)
            cells[static_cast<size_t>(bx[static_cast<size_t>(i)]) * 3 +
                  by[static_cast<size_t>(i)]] += 1.0;
        return TableData{tests::ContingencyTable(2, 3, std::move(cells))};
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        return tests::chisq_contingency(std::get<TableData>(d).tab);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"rho"}); };
    return s;
}

Scenario cor_scenario(bool zero_null) {
    Scenario s;
    s.id = zero_null ? "cor-rho0-zero" : "cor-rho0-nonzero";
    s.title = zero_null ? "test of zero correlation" : "test of a nonzero correlation (Fisher z)";
    s.defaults = {{"rho", 0.3}, {"rho0", zero_null ? 0.0 : 0.6}, {"mu", 100}, {"s", 15}};
    s.default_n = zero_null ? 90 : 60;
    s.min_n = 4;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        double mu = get(p, "mu");
        return bivariate_pairs(n, mu, mu, get(p, "s"), get(p, "rho"), rng);
    };
    s.apply_fn = [](const Params& p, const Dataset& d, RandomSource&) {
        const auto& t = std::get<PairedData>(d);
        return tests::cor_test(t.x, t.y, get(p, "rho0"));
    };
    s.nullify_fn = [](Params& p) { p["rho"] = p["rho0"]; };
    return s;
}

Dataset simple_regression_data(const Params& p, int n, RandomSource& rng) {
    int per = n / 5;
    std::vector<double> x(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = 2.0 * (i / per);
    DesignResponseData d;
    d.vars.push_back(Variable::numeric("x", x));
    d.y.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        d.y[static_cast<size_t>(i)] = get(p, "b0") + get(p, "b1") * x[static_cast<size_t>(i)] +
                                      get(p, "sigma") * rng.next_normal();
    return d;
}

Scenario regression_simple_scenario(bool wald) {
    Scenario s;
    s.id = wald ? "regression-simple-wald" : "regression-simple-f";
    s.title = wald ? "simple regression, Wald test of the slope"
                   : "simple regression, overall F test";
    s.defaults = {{"b0", 35}, {"b1", -2.5}, {"sigma", 14}};
    s.default_n = 35;
    s.granularity = 5;
    s.min_n = 10;
    s.generate_fn = simple_regression_data;
    s.apply_fn = [wald](const Params&, const Dataset& d, RandomSource&) {
        const auto& dr = std::get<DesignResponseData>(d);
        auto full = linmod::build_design(dr.vars, {{"x"}});
        auto fit_full = linmod::ols_fit(full, dr.y);
        if (wald) return linmod::wald_coef_test(fit_full, "x");
        auto null_design = linmod::build_design(dr.vars, {});
        auto fit_null = linmod::ols_fit(null_design, dr.y);
        return linmod::nested_f_test(fit_null, fit_full);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"b1"}); };
    return s;
}

Scenario regression_multiple_scenario() {
    Scenario s;
    s.id = "regression-multiple";
    s.title = "multiple regression, F test of both slopes";
    s.defaults = {{"b0", 35}, {"b1", -2.5}, {"b2", 0.1}, {"sigma", 14}};
    s.default_n = 30;
    s.granularity = 15;
    s.min_n = 15;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        int per = n / 15;
        std::vector<double> x1(static_cast<size_t>(n)), x2(static_cast<size_t>(n));
        const double ages[3] = {30, 50, 80};
        for (int i = 0; i < n; ++i) {
            int within = i % (n / 3);
            x1[static_cast<size_t>(i)] = 2.0 * (within / per);
            x2[static_cast<size_t>(i)] = ages[i / (n / 3)];
        }
        DesignResponseData d;
        d.vars.push_back(Variable::numeric("x1", x1));
        d.vars.push_back(Variable::numeric("x2", x2));
        d.y.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            d.y[static_cast<size_t>(i)] = get(p, "b0") + get(p, "b1") * x1[static_cast<size_t>(i)] +
                                          get(p, "b2") * x2[static_cast<size_t>(i)] +
                                          get(p, "sigma") * rng.next_normal();
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& dr = std::get<DesignResponseData>(d);
        auto fit_null = linmod::ols_fit(linmod::build_design(dr.vars, {}), dr.y);
        auto fit_full = linmod::ols_fit(linmod::build_design(dr.vars, {{"x1"}, {"x2"}}), dr.y);
        return linmod::nested_f_test(fit_null, fit_full);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"b1", "b2"}); };
    return s;
}

Scenario regression_binomial_scenario() {
    Scenario s;
    s.id = "regression-binomial";
    s.title = "binomial regression, likelihood-ratio test of the slope";
    s.defaults = {{"odds_ratio", 1.5}, {"x_ref", 40}};
    s.default_n = 70;
    s.granularity = 7;
    s.min_n = 7;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        double beta = std::log(get(p, "odds_ratio"));
        double xref = get(p, "x_ref");
        int trials = n / 7;
        DesignResponseData d;
        std::vector<double> x(7);
        d.y.resize(7);  // successes per dose
        for (int k = 0; k < 7; ++k) {
            x[static_cast<size_t>(k)] = 37.0 + k;
            double logit = (x[static_cast<size_t>(k)] - xref) * beta;
            double pr = 1.0 / (1.0 + std::exp(-logit));
            d.y[static_cast<size_t>(k)] = sample(Binomial{trials, pr}, rng);
        }
        d.vars.push_back(Variable::numeric("x", x));
        d.vars.push_back(Variable::numeric("trials", std::vector<double>(7, trials)));
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& dr = std::get<DesignResponseData>(d);
        const auto& trials = dr.vars[1].values;
        auto fit_null = linmod::glm_binomial_fit(linmod::build_design(dr.vars, {}), dr.y, trials);
        auto fit_full =
            linmod::glm_binomial_fit(linmod::build_design(dr.vars, {{"x"}}), dr.y, trials);
        return linmod::glm_lrt(fit_null, fit_full);
    };
    s.nullify_fn = [](Params& p) { p["odds_ratio"] = 1.0; };
    return s;
}

Scenario anova_oneway_fixed_scenario() {
    Scenario s;
    s.id = "anova-oneway-fixed";
    s.title = "one-way fixed-effects ANOVA, treatment vs control";
    s.defaults = {{"mu", 10}, {"a2", 2}, {"a3", -3}, {"sigma", 5}, {"n2", 24}, {"n3", 18}};
    s.default_n = 22;
    s.min_n = 2;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        int sizes[3] = {n, geti(p, "n2"), geti(p, "n3")};
        double means[3] = {get(p, "mu"), get(p, "mu") + get(p, "a2"), get(p, "mu") + get(p, "a3")};
        DesignResponseData d;
        std::vector<int> grp;
        for (int g = 0; g < 3; ++g)
            for (int i = 0; i < sizes[g]; ++i) {
                grp.push_back(g);
                d.y.push_back(means[g] + get(p, "sigma") * rng.next_normal());
            }
        d.vars.push_back(factor_var("grp", 3, std::move(grp)));
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& dr = std::get<DesignResponseData>(d);
        auto res = linmod::anova_oneway(dr.y, dr.vars[0].level_idx, 3);
        return res.omnibus;
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"a2", "a3"}); };
    return s;
}

Scenario anova_oneway_contrast_scenario() {
    Scenario s;
    s.id = "anova-oneway-contrast";
    s.title = "one-way ANOVA, control-vs-treatments contrast";
    s.defaults = {{"mu", 10}, {"a2", 3}, {"a3", 4.5}, {"sigma", 5}};
    s.default_n = 72;
    s.granularity = 3;
    s.min_n = 6;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        int per = n / 3;
        double means[3] = {get(p, "mu"), get(p, "mu") + get(p, "a2"), get(p, "mu") + get(p, "a3")};
        DesignResponseData d;
        std::vector<int> grp;
        for (int g = 0; g < 3; ++g)
            for (int i = 0; i < per; ++i) {
                grp.push_back(g);
                d.y.push_back(means[g] + get(p, "sigma") * rng.next_normal());
            }
        d.vars.push_back(factor_var("grp", 3, std::move(grp)));
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& dr = std::get<DesignResponseData>(d);
        // contrasts: control vs treatment average, treatment 1 vs treatment 2
        std::vector<double> contrasts = {-1.0, 0.0, 0.5, -1.0, 0.5, 1.0};  // 3 x 2 row-major
        auto res = linmod::anova_oneway(dr.y, dr.vars[0].level_idx, 3, contrasts, 2);
        return res.contrast_tests[0];
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"a2", "a3"}); };
    return s;
}

Scenario anova_oneway_random_scenario() {
    Scenario s;
    s.id = "anova-oneway-random";
    s.title = "one-way random-effects ANOVA, item variation";
    s.defaults = {{"mu", 120}, {"sigma_a", 10}, {"sigma", 15}, {"items", 10}};
    s.default_n = 60;
    s.granularity = 10;
    s.min_n = 20;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        int items = geti(p, "items");
        std::vector<double> a(static_cast<size_t>(items));
        for (auto& v : a) v = get(p, "sigma_a") * rng.next_normal();
        DesignResponseData d;
        std::vector<int> item_idx(static_cast<size_t>(n));
        d.y.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            int it = i % items;
            item_idx[static_cast<size_t>(i)] = it;
            d.y[static_cast<size_t>(i)] =
                get(p, "mu") + a[static_cast<size_t>(it)] + get(p, "sigma") * rng.next_normal();
        }
        d.vars.push_back(factor_var("item", items, std::move(item_idx)));
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& dr = std::get<DesignResponseData>(d);
        linmod::StrataLayout layout;
        layout.strata.push_back({"item", {"item"}, {}});
        auto res = linmod::anova_strata(layout, dr.vars, dr.y);
        const auto& item = res.stratum("item");
        const auto& within = res.stratum("Within");
        return linmod::f_ratio(item.ms, item.df, within.ms, within.df);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"sigma_a"}); };
    return s;
}

Scenario anova_twoway_fixed_scenario() {
    Scenario s;
    s.id = "anova-twoway-fixed";
    s.title = "two-way fixed-effects ANOVA, test of interaction";
    s.defaults = {{"mu", 30}, {"a2", 30}, {"b2", 5}, {"ab22", 12}, {"sigma", 10}};
    s.default_n = 96;
    s.granularity = 4;
    s.min_n = 8;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        int quarter = n / 4;
        DesignResponseData d;
        std::vector<int> ai(static_cast<size_t>(n)), bi(static_cast<size_t>(n));
        d.y.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            int a = i / (n / 2);           // first half low, second half high
            int b = (i / quarter) % 2;     // alternates within each half
            ai[static_cast<size_t>(i)] = a;
            bi[static_cast<size_t>(i)] = b;
            double mean = get(p, "mu") + (a == 1 ? get(p, "a2") : 0.0) +
                          (b == 1 ? get(p, "b2") : 0.0) +
                          (a == 1 && b == 1 ? get(p, "ab22") : 0.0);
            d.y[static_cast<size_t>(i)] = mean + get(p, "sigma") * rng.next_normal();
        }
        d.vars.push_back(factor_var("A", 2, std::move(ai)));
        d.vars.push_back(factor_var("B", 2, std::move(bi)));
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& dr = std::get<DesignResponseData>(d);
        linmod::StrataLayout layout;
        layout.within_terms = {{"A", {"A"}}, {"B", {"B"}}, {"A:B", {"A", "B"}}};
        auto res = linmod::anova_strata(layout, dr.vars, dr.y);
        const auto& within = res.stratum("Within");
        const auto& ab = within.terms[2];
        return linmod::f_ratio(ab.ms, ab.df, within.resid_ms, within.resid_df);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"ab22"}); };
    return s;
}

Scenario anova_twoway_random_scenario() {
    Scenario s;
    s.id = "anova-twoway-random";
    s.title = "two-way random-effects ANOVA, interaction variation";
    s.defaults = {{"mu", 50},      {"sigma_a", 10}, {"sigma_b", 10},
                  {"sigma_ab", 7}, {"sigma", 13},   {"levels_a", 6},
                  {"levels_b", 8}};
    s.default_n = 192;
    s.granularity = 48;
    s.min_n = 96;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        int la = geti(p, "levels_a"), lb = geti(p, "levels_b");
        int cells = la * lb;
        int k = n / cells;
        std::vector<double> a(static_cast<size_t>(la)), b(static_cast<size_t>(lb)),
            ab(static_cast<size_t>(cells));
        for (auto& v : a) v = get(p, "sigma_a") * rng.next_normal();
        for (auto& v : b) v = get(p, "sigma_b") * rng.next_normal();
        for (auto& v : ab) v = get(p, "sigma_ab") * rng.next_normal();
        DesignResponseData d;
        std::vector<int> ai(static_cast<size_t>(n)), bi(static_cast<size_t>(n));
        d.y.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            int cell = i / k;
            int ia = cell % la, ib = cell / la;
            ai[static_cast<size_t>(i)] = ia;
            bi[static_cast<size_t>(i)] = ib;
            d.y[static_cast<size_t>(i)] = get(p, "mu") + a[static_cast<size_t>(ia)] +
                                          b[static_cast<size_t>(ib)] +
                                          ab[static_cast<size_t>(cell)] +
                                          get(p, "sigma") * rng.next_normal();
        }
        d.vars.push_back(factor_var("order", la, std::move(ai)));
        d.vars.push_back(factor_var("admin", lb, std::move(bi)));
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& dr = std::get<DesignResponseData>(d);
        linmod::StrataLayout layout;
        layout.strata.push_back({"order", {"order"}, {}});
        layout.strata.push_back({"admin", {"admin"}, {}});
        layout.strata.push_back({"order:admin", {"order", "admin"}, {}});
        auto res = linmod::anova_strata(layout, dr.vars, dr.y);
        const auto& oa = res.stratum("order:admin");
        const auto& within = res.stratum("Within");
        return linmod::f_ratio(oa.ms, oa.df, within.ms, within.df);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"sigma_ab"}); };
    return s;
}

Scenario anova_rm_one_scenario() {
    Scenario s;
    s.id = "anova-rm-one-factor";
    s.title = "repeated measures ANOVA, one within-subject factor";
    s.defaults = {{"mu", 15},      {"b2", 2},      {"b3", 4},
                  {"b4", 6},       {"sigma_p", 7}, {"sigma", 6}};
    s.default_n = 22;  // subjects
    s.min_n = 2;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        std::vector<double> subj_eff(static_cast<size_t>(n));
        for (auto& v : subj_eff) v = get(p, "sigma_p") * rng.next_normal();
        double beta[4] = {0.0, get(p, "b2"), get(p, "b3"), get(p, "b4")};
        DesignResponseData d;
        std::vector<int> shape_idx, subj_idx;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < 4; ++j) {
                shape_idx.push_back(j);
                subj_idx.push_back(i);
                d.y.push_back(get(p, "mu") + beta[j] + subj_eff[static_cast<size_t>(i)] +
                              get(p, "sigma") * rng.next_normal());
            }
        d.vars.push_back(factor_var("shape", 4, std::move(shape_idx)));
        d.vars.push_back(factor_var("subj", n, std::move(subj_idx)));
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& dr = std::get<DesignResponseData>(d);
        linmod::StrataLayout layout;
        layout.strata.push_back({"subj", {"subj"}, {}});
        layout.within_terms = {{"shape", {"shape"}}};
        auto res = linmod::anova_strata(layout, dr.vars, dr.y);
        const auto& within = res.stratum("Within");
        const auto& shape = within.terms[0];
        return linmod::f_ratio(shape.ms, shape.df, within.resid_ms, within.resid_df);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"b2", "b3", "b4"}); };
    return s;
}

Scenario anova_rm_two_scenario() {
    Scenario s;
    s.id = "anova-rm-two-factor";
    s.title = "repeated measures ANOVA, two within-subject factors";
    s.defaults = {{"mu", 1500},      {"a2", 300},       {"b2", 200},
                  {"ab22", -150},    {"sigma_p", 150},  {"sigma_pa", 100},
                  {"sigma_pb", 80},  {"sigma", 300}};
    s.default_n = 136;  // subjects
    s.min_n = 2;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        std::vector<double> pe(static_cast<size_t>(n)), pa(static_cast<size_t>(2 * n)),
            pb(static_cast<size_t>(2 * n));
        for (auto& v : pe) v = get(p, "sigma_p") * rng.next_normal();
        for (auto& v : pa) v = get(p, "sigma_pa") * rng.next_normal();
        for (auto& v : pb) v = get(p, "sigma_pb") * rng.next_normal();
        DesignResponseData d;
        std::vector<int> ai, bi, si;
        for (int i = 0; i < n; ++i)
            for (int b = 0; b < 2; ++b)
                for (int a = 0; a < 2; ++a) {
                    ai.push_back(a);
                    bi.push_back(b);
                    si.push_back(i);
                    double mean = get(p, "mu") + (a == 1 ? get(p, "a2") : 0.0) +
                                  (b == 1 ? get(p, "b2") : 0.0) +
                                  (a == 1 && b == 1 ? get(p, "ab22") : 0.0);
                    d.y.push_back(mean + pe[static_cast<size_t>(i)] +
                                  pa[static_cast<size_t>(a * n + i)] +
                                  pb[static_cast<size_t>(b * n + i)] +
                                  get(p, "sigma") * rng.next_normal());
                }
        d.vars.push_back(factor_var("A", 2, std::move(ai)));
        d.vars.push_back(factor_var("B", 2, std::move(bi)));
        d.vars.push_back(factor_var("subj", n, std::move(si)));
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& dr = std::get<DesignResponseData>(d);
        linmod::StrataLayout layout;
        layout.strata.push_back({"subj", {"subj"}, {}});
        layout.strata.push_back({"subj:A", {"subj", "A"}, {{"A", {"A"}}}});
        layout.strata.push_back({"subj:B", {"subj", "B"}, {{"B", {"B"}}}});
        layout.within_terms = {{"A:B", {"A", "B"}}};
        auto res = linmod::anova_strata(layout, dr.vars, dr.y);
        const auto& within = res.stratum("Within");
        const auto& ab = within.terms[0];
        return linmod::f_ratio(ab.ms, ab.df, within.resid_ms, within.resid_df);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"ab22"}); };
    return s;
}

Scenario ancova_scenario() {
    Scenario s;
    s.id = "ancova";
    s.title = "ANCOVA, incremental F test of the group effect";
    s.defaults = {{"mu", 5},      {"b_pre", 0.7}, {"a2", 0.5}, {"a3", 4},
                  {"pre_mu", 20}, {"pre_sd", 8},  {"sigma", 5}};
    s.default_n = 84;
    s.granularity = 3;
    s.min_n = 6;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        int per = n / 3;
        double alpha[3] = {0.0, get(p, "a2"), get(p, "a3")};
        DesignResponseData d;
        std::vector<double> pre(static_cast<size_t>(n));
        std::vector<int> grp(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            pre[static_cast<size_t>(i)] = get(p, "pre_mu") + get(p, "pre_sd") * rng.next_normal();
            grp[static_cast<size_t>(i)] = i / per;
        }
        d.y.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            d.y[static_cast<size_t>(i)] = get(p, "mu") + get(p, "b_pre") * pre[static_cast<size_t>(i)] +
                                          alpha[grp[static_cast<size_t>(i)]] +
                                          get(p, "sigma") * rng.next_normal();
        d.vars.push_back(Variable::numeric("pre", std::move(pre)));
        d.vars.push_back(factor_var("grp", 3, std::move(grp)));
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& dr = std::get<DesignResponseData>(d);
        auto fit_null = linmod::ols_fit(linmod::build_design(dr.vars, {{"pre"}}), dr.y);
        auto fit_full = linmod::ols_fit(linmod::build_design(dr.vars, {{"pre"}, {"grp"}}), dr.y);
        return linmod::nested_f_test(fit_null, fit_full);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"a2", "a3"}); };
    return s;
}

Scenario mv_one_sample_scenario() {
    Scenario s;
    s.id = "mv-one-sample";
    s.title = "multivariate one-sample t test, four subtests";
    s.defaults = {{"d1", 0.5}, {"d2", -1}, {"d3", 1}, {"d4", 0}};
    s.default_n = 30;
    s.min_n = 5;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        std::vector<double> sds = {3.5, 3.5, 3.5, 2.0};
        std::vector<double> R = {1.0, 0.7, 0.5, 0.3,
                                 0.7, 1.0, 0.5, 0.1,
                                 0.5, 0.5, 1.0, 0.3,
                                 0.3, 0.1, 0.3, 1.0};
        std::vector<double> e(16);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                e[static_cast<size_t>(i) * 4 + j] = R[static_cast<size_t>(i) * 4 + j] *
                                                    sds[static_cast<size_t>(i)] *
                                                    sds[static_cast<size_t>(j)];
        CovarianceMatrix sigma(4, std::move(e));
        std::vector<double> mu = {12 + get(p, "d1"), 10 + get(p, "d2"), 10 + get(p, "d3"),
                                  8 + get(p, "d4")};
        MatrixData d;
        d.values = sample_mvnormal(static_cast<size_t>(n), mu, sigma, rng);
        d.n = n;
        d.p = 4;
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& m = std::get<MatrixData>(d);
        std::vector<double> mu0 = {12, 10, 10, 8};
        return tests::hotelling_one_sample(m.values, m.n, m.p, mu0);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"d1", "d2", "d3", "d4"}); };
    return s;
}

Scenario mv_two_sample_scenario() {
    Scenario s;
    s.id = "mv-two-sample";
    s.title = "multivariate two-sample t test, patient profiles";
    s.defaults = {{"d1", 10}, {"d2", 5}, {"d3", 15}, {"r", 0.3}};
    s.default_n = 50;  // per group
    s.min_n = 3;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        CovarianceMatrix sigma = const_corr_cov({15, 15, 44}, get(p, "r"));
        std::vector<double> mu1 = {45 + get(p, "d1"), 85 + get(p, "d2"), 200 + get(p, "d3")};
        std::vector<double> mu2 = {45, 85, 200};
        TwoMatrixData d;
        d.x = sample_mvnormal(static_cast<size_t>(n), mu1, sigma, rng);
        d.y = sample_mvnormal(static_cast<size_t>(n), mu2, sigma, rng);
        d.n1 = n;
        d.n2 = n;
        d.p = 3;
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& m = std::get<TwoMatrixData>(d);
        return tests::hotelling_two_sample(m.x, m.n1, m.y, m.n2, m.p);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"d1", "d2", "d3"}); };
    return s;
}

Scenario mv_paired_scenario() {
    Scenario s;
    s.id = "mv-paired";
    s.title = "paired multivariate t test on difference scores";
    s.defaults = {{"d1", 0.5}, {"d2", -0.5}, {"d3", 0.7},
                  {"within_r", 0.8}, {"cross_r", 0.5}, {"s", 2}};
    s.default_n = 25;
    s.min_n = 4;
    s.generate_fn = [](const Params& p, int n, RandomSource& rng) -> Dataset {
        // d = x - y with Var(d) = 2 A - 2 B from the block-structured
        // covariance of (x, y): within-occasion correlation a, cross b.
        double a = get(p, "within_r"), b = get(p, "cross_r"), ss = get(p, "s");
        double v = 2.0 * ss * ss * (1.0 - b);
        double c = 2.0 * ss * ss * (a - b);
        std::vector<double> e = {v, c, c, c, v, c, c, c, v};
        CovarianceMatrix sigma(3, std::move(e));
        std::vector<double> mu = {get(p, "d1"), get(p, "d2"), get(p, "d3")};
        MatrixData d;
        d.values = sample_mvnormal(static_cast<size_t>(n), mu, sigma, rng);
        d.n = n;
        d.p = 3;
        return d;
    };
    s.apply_fn = [](const Params&, const Dataset& d, RandomSource&) {
        const auto& m = std::get<MatrixData>(d);
        std::vector<double> mu0 = {0, 0, 0};
        return tests::hotelling_one_sample(m.values, m.n, m.p, mu0);
    };
    s.nullify_fn = [](Params& p) { set_zero(p, {"d1", "d2", "d3"}); };
    return s;
}

std::vector<Scenario> build_catalog() {
    std::vector<Scenario> all;
    all.push_back(binom_scenario(true));
    all.push_back(binom_scenario(false));
    all.push_back(z_one_sample_scenario());
    all.push_back(t_one_sample_scenario());
    all.push_back(variance_scenario());
    all.push_back(sign_scenario());
    all.push_back(wilcoxon_signed_scenario());
    all.push_back(gof_multinomial_scenario());
    all.push_back(gof_normal_known_scenario());
    all.push_back(gof_lognormal_scenario());
    all.push_back(ks_scenario());
    all.push_back(z_two_sample_scenario());
    all.push_back(t_pooled_scenario());
    all.push_back(var_ratio_scenario());
    all.push_back(rank_sum_scenario());
    all.push_back(randomization_unpaired_scenario());
    all.push_back(paired_t_bivariate_scenario());
    all.push_back(paired_t_differences_scenario());
    all.push_back(paired_wilcoxon_scenario());
    all.push_back(randomization_paired_scenario());
    all.push_back(homogeneity_scenario());
    all.push_back(independence_multinomial_scenario());
    all.push_back(independence_latent_scenario());
    all.push_back(cor_scenario(true));
    all.push_back(cor_scenario(false));
    all.push_back(regression_simple_scenario(true));
    all.push_back(regression_simple_scenario(false));
    all.push_back(regression_multiple_scenario());
    all.push_back(regression_binomial_scenario());
    all.push_back(anova_oneway_fixed_scenario());
    all.push_back(anova_oneway_contrast_scenario());
    all.push_back(anova_oneway_random_scenario());
    all.push_back(anova_twoway_fixed_scenario());
    all.push_back(anova_twoway_random_scenario());
    all.push_back(anova_rm_one_scenario());
    all.push_back(anova_rm_two_scenario());
    all.push_back(ancova_scenario());
    all.push_back(mv_one_sample_scenario());
    all.push_back(mv_two_sample_scenario());
    all.push_back(mv_paired_scenario());
    return all;
}

}  // namespace

const std::vector<Scenario>& catalog() {
    static const std::vector<Scenario> all = build_catalog();
    return all;
}

const Scenario& find(const std::string& id) {
    for (const auto& s : catalog())
        if (s.id == id) return s;
    std::string ids;
    for (const auto& s : catalog()) ids += (ids.empty() ? "" : ", ") + s.id;
    throw std::invalid_argument("unknown scenario '" + id + "'; valid ids: " + ids);
}

Params merged_params(const Scenario& s, const Params& overrides) {
    Params p = s.defaults;
    for (const auto& [k, v] : overrides) {
        if (p.find(k) == p.end())
            throw std::invalid_argument("scenario " + s.id + " has no parameter '" + k + "'");
        p[k] = v;
    }
    return p;
}

Params null_params(const Scenario& s, Params p) {
    s.nullify_fn(p);
    return p;
}

void check_n(const Scenario& s, int n) {
    if (n < s.min_n)
        throw std::invalid_argument("scenario " + s.id + " requires n >= " +
                                    std::to_string(s.min_n));
    if (n % s.granularity != 0)
        throw std::invalid_argument("scenario " + s.id + " requires n divisible by " +
                                    std::to_string(s.granularity));
}

Dataset generate(const Scenario& s, const Params& p, int n, prob::RandomSource& rng) {
    check_n(s, n);
    return s.generate_fn(p, n, rng);
}

tests::TestResult run_once(const Scenario& s, const Params& p, int n, prob::RandomSource& rng) {
    check_n(s, n);
    Dataset d = s.generate_fn(p, n, rng);
    prob::RandomSource inner = rng.child(1);
    return s.apply_fn(p, d, inner);
}

}  // namespace powsim::scenarios
