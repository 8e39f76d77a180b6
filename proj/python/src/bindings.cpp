#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "powsim/distribution.hpp"
#include "powsim/engine.hpp"
#include "powsim/oracle.hpp"
#include "powsim/scenario.hpp"
#include "powsim/testkit.hpp"

namespace py = pybind11;
using namespace powsim;

namespace {

prob::Distribution dist_from(const std::string& kind, const std::map<std::string, double>& a) {
    auto get = [&](const char* k) {
        auto it = a.find(k);
        if (it == a.end()) throw std::invalid_argument(std::string("missing parameter ") + k);
        return it->second;
    };
    if (kind == "normal") return prob::Normal{get("mu"), get("sigma")};
    if (kind == "lognormal") return prob::LogNormal{get("meanlog"), get("sdlog")};
    if (kind == "uniform") return prob::Uniform{get("min"), get("max")};
    if (kind == "binomial")
        return prob::Binomial{static_cast<int64_t>(get("n")), get("p")};
    if (kind == "bernoulli") return prob::Bernoulli{get("p")};
    if (kind == "chisq") return prob::ChiSquared{get("df")};
    if (kind == "t") return prob::StudentT{get("df")};
    if (kind == "f") return prob::FisherF{get("df1"), get("df2")};
    if (kind == "nc-t") return prob::NoncentralT{get("df"), get("ncp")};
    if (kind == "nc-chisq") return prob::NoncentralChiSquared{get("df"), get("ncp")};
    if (kind == "nc-f") return prob::NoncentralF{get("df1"), get("df2"), get("ncp")};
    throw std::invalid_argument("unknown distribution kind '" + kind + "'");
}

py::dict estimate_dict(const engine::PowerEstimate& e) {
    py::dict d;
    d["scenario"] = e.scenario_id;
    d["n"] = e.n;
    d["alpha"] = e.alpha;
    d["reps"] = e.reps;
    d["seed"] = e.seed;
    d["power"] = e.power;
    d["mc_se"] = e.mc_se;
    d["ci95"] = py::make_tuple(e.ci95.first, e.ci95.second);
    d["invalid"] = e.invalid_count;
    return d;
}

py::dict result_dict(const tests::TestResult& r) {
    py::dict d;
    d["statistic"] = r.statistic;
    d["p_value"] = r.p_value;
    d["valid"] = r.valid;
    if (r.df) d["df"] = *r.df;
    if (r.df2) d["df2"] = *r.df2;
    if (!r.note.empty()) d["note"] = r.note;
    return d;
}

}  // namespace

PYBIND11_MODULE(_powsim, m) {
    m.doc() = "Monte Carlo power analysis engine (C++ core)";

    m.def(
        "cdf",
        [](const std::string& kind, const std::map<std::string, double>& params, double x) {
            return prob::cdf(dist_from(kind, params), x);
        },
        py::arg("kind"), py::arg("params"), py::arg("x"));
    m.def(
        "quantile",
        [](const std::string& kind, const std::map<std::string, double>& params, double p) {
            return prob::quantile(dist_from(kind, params), p);
        },
        py::arg("kind"), py::arg("params"), py::arg("p"));
    m.def(
        "sample",
        [](const std::string& kind, const std::map<std::string, double>& params, size_t n,
           uint64_t seed, uint64_t stream) {
            prob::RandomSource rng(seed, stream);
            return prob::sample_n(dist_from(kind, params), n, rng);
        },
        py::arg("kind"), py::arg("params"), py::arg("n"), py::arg("seed"),
        py::arg("stream") = 0);

    m.def(
        "t_test_one_sample",
        [](const std::vector<double>& x, double mu0) {
            return result_dict(tests::t_test_one_sample(x, mu0));
        },
        py::arg("x"), py::arg("mu0") = 0.0);
    m.def(
        "binom_exact_test",
        [](int64_t x, int64_t n, double p0) {
            return result_dict(tests::binom_exact_test(x, n, p0));
        },
        py::arg("x"), py::arg("n"), py::arg("p0") = 0.5);
    m.def(
        "wilcoxon_signed_rank",
        [](const std::vector<double>& x, double mu0) {
            return result_dict(tests::wilcoxon_signed_rank(x, mu0));
        },
        py::arg("x"), py::arg("mu0") = 0.0);

    m.def("list_scenarios", []() {
        py::list out;
        for (const auto& s : scenarios::catalog()) {
            py::dict d;
            d["id"] = s.id;
            d["title"] = s.title;
            d["default_n"] = s.default_n;
            d["granularity"] = s.granularity;
            d["params"] = s.defaults;
            out.append(d);
        }
        return out;
    });

    m.def(
        "estimate_power",
        [](const std::string& scenario, int n, double alpha, int64_t reps, uint64_t seed,
           int workers, const scenarios::Params& params, bool null_variant) {
            const auto& s = scenarios::find(scenario);
            scenarios::Params p = scenarios::merged_params(s, params);
            py::gil_scoped_release release;
            auto e = null_variant ? engine::estimate_size(s, p, n, alpha, reps, seed, workers)
                                  : engine::estimate_power(s, p, n, alpha, reps, seed, workers);
            py::gil_scoped_acquire acquire;
            return estimate_dict(e);
        },
        py::arg("scenario"), py::arg("n"), py::arg("alpha") = 0.05, py::arg("reps") = 5000,
        py::arg("seed") = 1, py::arg("workers") = 0,
        py::arg("params") = scenarios::Params{}, py::arg("null_variant") = false);

    m.def(
        "solve_sample_size",
        [](const std::string& scenario, double target, double alpha, int64_t reps, uint64_t seed,
           int workers, const scenarios::Params& params) {
            const auto& s = scenarios::find(scenario);
            scenarios::Params p = scenarios::merged_params(s, params);
            py::gil_scoped_release release;
            auto res = engine::solve_sample_size(s, p, target, alpha, reps, seed, workers);
            py::gil_scoped_acquire acquire;
            py::dict d;
            d["n_star"] = res.n_star;
            d["target"] = res.target;
            py::list tr;
            for (const auto& e : res.trace) tr.append(estimate_dict(e));
            d["trace"] = tr;
            return d;
        },
        py::arg("scenario"), py::arg("target"), py::arg("alpha") = 0.05, py::arg("reps") = 5000,
        py::arg("seed") = 1, py::arg("workers") = 0, py::arg("params") = scenarios::Params{});

    m.def(
        "power_curve",
        [](const std::string& scenario, const std::vector<int>& n_list, double alpha,
           int64_t reps, uint64_t seed, int workers, const scenarios::Params& params) {
            const auto& s = scenarios::find(scenario);
            scenarios::Params p = scenarios::merged_params(s, params);
            py::gil_scoped_release release;
            auto pts = engine::power_curve(s, p, n_list, alpha, reps, seed, workers);
            py::gil_scoped_acquire acquire;
            py::list out;
            for (const auto& e : pts) out.append(estimate_dict(e));
            return out;
        },
        py::arg("scenario"), py::arg("n_list"), py::arg("alpha") = 0.05, py::arg("reps") = 5000,
        py::arg("seed") = 1, py::arg("workers") = 0, py::arg("params") = scenarios::Params{});

    m.def(
        "ci_width",
        [](const std::string& kind, int n, double level, int64_t reps, uint64_t seed, int workers,
           const std::map<std::string, double>& params) {
            py::gil_scoped_release release;
            auto w = engine::ci_width(engine::parse_ci_kind(kind), params, n, level, reps, seed,
                                      workers);
            py::gil_scoped_acquire acquire;
            py::dict d;
            d["kind"] = kind;
            d["mean_width"] = w.mean_width;
            d["sd_width"] = w.sd_width;
            d["q90_width"] = w.q90_width;
            d["reps"] = w.reps;
            return d;
        },
        py::arg("kind"), py::arg("n"), py::arg("level") = 0.95, py::arg("reps") = 2000,
        py::arg("seed") = 1, py::arg("workers") = 0,
        py::arg("params") = std::map<std::string, double>{});

    auto oracle_mod = m.def_submodule("oracle", "closed-form power calculators");
    oracle_mod.def("power_z_one_sample", [](double n, double delta, double sigma, double alpha) {
        return oracle::power_z_one_sample(n, delta, sigma, alpha).power;
    });
    oracle_mod.def("power_t_one_sample", [](double n, double delta, double sigma, double alpha) {
        return oracle::power_t_one_sample(n, delta, sigma, alpha).power;
    });
    oracle_mod.def("power_t_two_sample_pooled",
                   [](double n, double m_, double delta, double sigma, double alpha) {
                       return oracle::power_t_two_sample_pooled(n, m_, delta, sigma, alpha).power;
                   });
    oracle_mod.def("power_correlation", [](double n, double rho, double rho0, double alpha) {
        return oracle::power_correlation(n, rho, rho0, alpha).power;
    });
}
