// powsim: Monte Carlo power analysis for the classical test catalog.
//
// Subcommands: power, solve, curve, calibrate, ci-width, oracle, list.
// Reports are deterministic given --seed (timestamps aside) and can be
// emitted as json, csv, or a human-readable table.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "powsim/engine.hpp"
#include "powsim/oracle.hpp"
#include "powsim/scenario.hpp"

using json = nlohmann::ordered_json;
using namespace powsim;

namespace {

struct CommonOpts {
    std::string scenario;
    double alpha = 0.05;
    int64_t reps = 5000;
    std::optional<uint64_t> seed;
    int workers = 0;  // 0 = all cores
    std::string format = "json";
    std::vector<std::string> params;
    std::string out;
};

uint64_t resolve_seed(const std::optional<uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device rd;
    return (static_cast<uint64_t>(rd()) << 32) ^ rd();
}

scenarios::Params parse_overrides(const std::vector<std::string>& kvs) {
    scenarios::Params out;
    for (const auto& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw CLI::ValidationError("--param", "expected key=value, got '" + kv + "'");
        std::string key = kv.substr(0, eq);
        try {
            out[key] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--param", "value of '" + key + "' is not a number");
        }
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(item, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != item.size())
            throw std::invalid_argument(flag + ": '" + item + "' is not an integer");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument(flag + ": empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != item.size())
            throw std::invalid_argument(flag + ": '" + item + "' is not a number");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument(flag + ": empty list");
    return out;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json estimate_json(const engine::PowerEstimate& e) {
    return json{{"scenario", e.scenario_id},
                {"n", e.n},
                {"alpha", e.alpha},
                {"reps", e.reps},
                {"seed", e.seed},
                {"power", e.power},
                {"mc_se", e.mc_se},
                {"ci95", {e.ci95.first, e.ci95.second}},
                {"invalid", e.invalid_count}};
}

std::string estimate_csv_header() {
    return "scenario,n,alpha,reps,seed,power,mc_se,ci_lo,ci_hi,invalid";
}

std::string estimate_csv_row(const engine::PowerEstimate& e) {
    std::string s = e.scenario_id;
    s += "," + std::to_string(e.n);
    s += "," + fmt17(e.alpha);
    s += "," + std::to_string(e.reps);
    s += "," + std::to_string(e.seed);
    s += "," + fmt17(e.power);
    s += "," + fmt17(e.mc_se);
    s += "," + fmt17(e.ci95.first);
    s += "," + fmt17(e.ci95.second);
    s += "," + std::to_string(e.invalid_count);
    return s;
}

void estimate_table(std::ostream& os, const engine::PowerEstimate& e) {
    os << "scenario : " << e.scenario_id << "\n"
       << "n        : " << e.n << "\n"
       << "alpha    : " << e.alpha << "\n"
       << "reps     : " << e.reps << "\n"
       << "seed     : " << e.seed << "\n"
       << "power    : " << fmt17(e.power) << "\n"
       << "mc_se    : " << fmt17(e.mc_se) << "\n"
       << "ci95     : [" << fmt17(e.ci95.first) << ", " << fmt17(e.ci95.second) << "]\n"
       << "invalid  : " << e.invalid_count << "\n";
}

void emit(const std::string& text, const std::string& out_file) {
    if (out_file.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << "\n";
    } else {
        std::ofstream f(out_file);
        if (!f) throw std::runtime_error("cannot open output file " + out_file);
        f << text;
        if (text.empty() || text.back() != '\n') f << "\n";
    }
}

json params_json(const scenarios::Params& p) {
    json j = json::object();
    for (const auto& [k, v] : p) j[k] = v;
    return j;
}

// minimal SVG power curve
std::string curve_svg(const std::vector<engine::PowerEstimate>& pts, double target) {
    const double W = 640, H = 420, L = 70, R = 20, T = 20, B = 50;
    double nmin = pts.front().n, nmax = pts.front().n;
    for (const auto& e : pts) {
        nmin = std::min(nmin, static_cast<double>(e.n));
        nmax = std::max(nmax, static_cast<double>(e.n));
    }
    if (nmax == nmin) nmax = nmin + 1;
    auto xof = [&](double n) { return L + (n - nmin) / (nmax - nmin) * (W - L - R); };
    auto yof = [&](double p) { return H - B - p * (H - T - B); };
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << yof(0) << "\" x2=\"" << W - R << "\" y2=\"" << yof(0)
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << yof(0) << "\" x2=\"" << L << "\" y2=\"" << yof(1)
      << "\" stroke=\"black\"/>\n";
    for (double p = 0.0; p <= 1.0001; p += 0.2) {
        s << "<line x1=\"" << L - 4 << "\" y1=\"" << yof(p) << "\" x2=\"" << L << "\" y2=\""
          << yof(p) << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << L - 8 << "\" y=\"" << yof(p) + 4
          << "\" font-size=\"12\" text-anchor=\"end\">" << p << "</text>\n";
    }
    for (const auto& e : pts) {
        s << "<line x1=\"" << xof(e.n) << "\" y1=\"" << yof(0) << "\" x2=\"" << xof(e.n)
          << "\" y2=\"" << yof(0) + 4 << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << xof(e.n) << "\" y=\"" << yof(0) + 18
          << "\" font-size=\"12\" text-anchor=\"middle\">" << e.n << "</text>\n";
    }
    if (target > 0) {
        s << "<line x1=\"" << L << "\" y1=\"" << yof(target) << "\" x2=\"" << W - R << "\" y2=\""
          << yof(target) << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    }
    s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (const auto& e : pts) s << xof(e.n) << "," << yof(e.power) << " ";
    s << "\"/>\n";
    for (const auto& e : pts) {
        s << "<circle cx=\"" << xof(e.n) << "\" cy=\"" << yof(e.power)
          << "\" r=\"3.4\" fill=\"steelblue\"/>\n";
        // 95% interval whiskers
        s << "<line x1=\"" << xof(e.n) << "\" y1=\"" << yof(e.ci95.first) << "\" x2=\"" << xof(e.n)
          << "\" y2=\"" << yof(e.ci95.second) << "\" stroke=\"steelblue\"/>\n";
    }
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
      << "\" font-size=\"13\" text-anchor=\"middle\">sample size n</text>\n";
    s << "<text x=\"16\" y=\"" << (T + H - B) / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (T + H - B) / 2 << ")\">power</text>\n";
    s << "</svg>\n";
    return s.str();
}

int64_t elapsed_ms_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
        .count();
}

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_scenario = true) {
    if (needs_scenario)
        cmd->add_option("--scenario", o.scenario, "scenario id (see `powsim list`)")->required()->take_last();
    cmd->add_option("--alpha", o.alpha, "significance level")->check(CLI::Range(1e-9, 1.0))->take_last();
    cmd->add_option("--reps", o.reps, "Monte Carlo replications")->take_last();
    cmd->add_option("--seed", o.seed, "RNG seed (echoed in the report; random when omitted)")->take_last();
    cmd->add_option("--workers", o.workers, "worker threads (default: all cores)")->take_last();
    cmd->add_option("--format", o.format, "json | csv | table")
        ->check(CLI::IsMember({"json", "csv", "table"}))->take_last();
    cmd->add_option("--param", o.params, "scenario parameter override key=value (repeatable)");
    cmd->add_option("--out", o.out, "write the report to a file instead of stdout")->take_last();
}

// Flat key = value config file; `param.NAME = value` is the one nesting
// level, carrying scenario parameter overrides.  Command-line flags override
// config values.
std::vector<std::string> load_config_args(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CLI::ValidationError("--config", "cannot open config file " + path);
    std::vector<std::string> args;
    std::string line;
    auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r");
        size_t b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError(
                "--config", path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.rfind("param.", 0) == 0) {
            args.push_back("--param");
            args.push_back(key.substr(6) + "=" + value);
        } else {
            args.push_back("--" + key);
            args.push_back(value);
        }
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo power analysis engine"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string kind, svg_file, n_list_text;
    std::optional<int> n_opt;
    double target = 0.8;
    double level = 0.95;
    std::string oracle_p0, oracle_p1, oracle_means, oracle_cells;

    auto* cmd_power = app.add_subcommand("power", "estimate power at a sample size");
    add_common(cmd_power, o);
    cmd_power->add_option("--n", n_opt, "sample size")->required()->take_last();

    auto* cmd_calibrate =
        app.add_subcommand("calibrate", "type-I error rate of the null variant");
    add_common(cmd_calibrate, o);
    cmd_calibrate->add_option("--n", n_opt, "sample size")->required()->take_last();

    auto* cmd_solve = app.add_subcommand("solve", "smallest n reaching a target power");
    add_common(cmd_solve, o);
    cmd_solve->add_option("--target", target, "target power")->required()->take_last();

    auto* cmd_curve = app.add_subcommand("curve", "power at several sample sizes");
    add_common(cmd_curve, o);
    cmd_curve->add_option("--n-list", n_list_text, "comma-separated sample sizes")->required()->take_last();
    cmd_curve->add_option("--svg", svg_file, "also write an SVG power-curve plot");

    auto* cmd_ci = app.add_subcommand("ci-width", "replicated confidence-interval widths");
    add_common(cmd_ci, o, /*needs_scenario=*/false);
    cmd_ci->add_option("--kind", kind,
                       "binom-exact | binom-approx | mean-known-var | mean-t | variance")
        ->required();
    cmd_ci->add_option("--n", n_opt, "sample size")->required()->take_last();
    cmd_ci->add_option("--level", level, "confidence level")->take_last();

    auto* cmd_oracle = app.add_subcommand("oracle", "closed-form power where it exists");
    add_common(cmd_oracle, o, /*needs_scenario=*/false);
    cmd_oracle
        ->add_option("--kind", kind,
                     "z-one-sample | z-two-sample | t-one-sample | t-pooled | chisq-gof | "
                     "anova-fixed | correlation")
        ->required();
    cmd_oracle->add_option("--p0", oracle_p0, "null cell probabilities (comma list)");
    cmd_oracle->add_option("--p1", oracle_p1, "true cell probabilities (comma list)");
    cmd_oracle->add_option("--means", oracle_means, "cell means (comma list)");
    cmd_oracle->add_option("--cell-n", oracle_cells, "cell sizes (comma list)");

    auto* cmd_list = app.add_subcommand("list", "available scenarios");
    cmd_list->add_option("--format", o.format, "json | csv | table")
        ->check(CLI::IsMember({"json", "csv", "table"}));

    // expand --config FILE into its flags, keeping explicit flags on top
    std::vector<std::string> args;
    try {
        for (int i = 1; i < argc; ++i) {
            std::string a = argv[i];
            if (a == "--config") {
                if (i + 1 >= argc) throw CLI::ValidationError("--config", "missing file name");
                auto cfg = load_config_args(argv[++i]);
                // config values go right after the subcommand so that any
                // explicit flag parsed later overrides them
                args.insert(args.size() <= 1 ? args.end() : args.begin() + 1, cfg.begin(),
                            cfg.end());
            } else if (a.rfind("--config=", 0) == 0) {
                auto cfg = load_config_args(a.substr(9));
                args.insert(args.size() <= 1 ? args.end() : args.begin() + 1, cfg.begin(),
                            cfg.end());
            } else {
                args.push_back(a);
            }
        }
    } catch (const CLI::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    try {
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    auto t0 = std::chrono::steady_clock::now();
    try {
        if (cmd_list->parsed()) {
            if (o.format == "json") {
                json arr = json::array();
                for (const auto& s : scenarios::catalog())
                    arr.push_back(json{{"id", s.id},
                                       {"title", s.title},
                                       {"default_n", s.default_n},
                                       {"granularity", s.granularity},
                                       {"params", params_json(s.defaults)}});
                emit(arr.dump(2), o.out);
            } else if (o.format == "csv") {
                std::string text = "id,title,default_n,granularity\n";
                for (const auto& s : scenarios::catalog())
                    text += s.id + ",\"" + s.title + "\"," + std::to_string(s.default_n) + "," +
                            std::to_string(s.granularity) + "\n";
                emit(text, o.out);
            } else {
                std::ostringstream os;
                for (const auto& s : scenarios::catalog()) {
                    os << s.id;
                    for (size_t i = s.id.size(); i < 32; ++i) os << ' ';
                    os << "n=" << s.default_n << "\t" << s.title << "\n";
                }
                emit(os.str(), o.out);
            }
            return 0;
        }

        uint64_t seed = resolve_seed(o.seed);
        scenarios::Params overrides = parse_overrides(o.params);

        if (cmd_ci->parsed()) {
            auto k = engine::parse_ci_kind(kind);
            auto w = engine::ci_width(k, overrides, *n_opt, level, o.reps, seed, o.workers);
            json j{{"kind", engine::ci_kind_name(k)}, {"params", params_json(overrides)},
                   {"n", *n_opt},                     {"level", level},
                   {"reps", w.reps},                  {"seed", seed},
                   {"mean_width", w.mean_width},      {"sd_width", w.sd_width},
                   {"q90_width", w.q90_width},        {"elapsed_ms", elapsed_ms_since(t0)}};
            if (o.format == "json")
                emit(j.dump(2), o.out);
            else if (o.format == "csv")
                emit("kind,n,level,reps,seed,mean_width,sd_width,q90_width\n" +
                         engine::ci_kind_name(k) + "," + std::to_string(*n_opt) + "," +
                         fmt17(level) + "," + std::to_string(w.reps) + "," + std::to_string(seed) +
                         "," + fmt17(w.mean_width) + "," + fmt17(w.sd_width) + "," +
                         fmt17(w.q90_width),
                     o.out);
            else {
                std::ostringstream os;
                os << "kind       : " << engine::ci_kind_name(k) << "\n"
                   << "n          : " << *n_opt << "\n"
                   << "level      : " << level << "\n"
                   << "reps       : " << w.reps << "\n"
                   << "seed       : " << seed << "\n"
                   << "mean width : " << fmt17(w.mean_width) << "\n"
                   << "sd width   : " << fmt17(w.sd_width) << "\n"
                   << "q90 width  : " << fmt17(w.q90_width) << "\n";
                emit(os.str(), o.out);
            }
            return 0;
        }

        if (cmd_oracle->parsed()) {
            auto need = [&](const std::string& key) {
                auto it = overrides.find(key);
                if (it == overrides.end())
                    throw std::invalid_argument("oracle " + kind + " needs --param " + key + "=...");
                return it->second;
            };
            auto opt = [&](const std::string& key, double fb) {
                auto it = overrides.find(key);
                return it == overrides.end() ? fb : it->second;
            };
            oracle::AnalyticPower a;
            if (kind == "z-one-sample")
                a = oracle::power_z_one_sample(need("n"), need("delta"), need("sigma"), o.alpha);
            else if (kind == "z-two-sample")
                a = oracle::power_z_two_sample(need("n"), need("m"), need("delta"),
                                               need("sigma_x"), need("sigma_y"), o.alpha);
            else if (kind == "t-one-sample")
                a = oracle::power_t_one_sample(need("n"), need("delta"), need("sigma"), o.alpha);
            else if (kind == "t-pooled")
                a = oracle::power_t_two_sample_pooled(need("n"), need("m"), need("delta"),
                                                      need("sigma"), o.alpha);
            else if (kind == "chisq-gof")
                a = oracle::power_chisq_gof(need("n"), parse_double_list(oracle_p0, "--p0"),
                                            parse_double_list(oracle_p1, "--p1"), o.alpha);
            else if (kind == "anova-fixed")
                a = oracle::power_anova_fixed(parse_double_list(oracle_means, "--means"), need("sigma"),
                                              parse_double_list(oracle_cells, "--cell-n"), o.alpha);
            else if (kind == "correlation")
                a = oracle::power_correlation(need("n"), need("rho"), opt("rho0", 0.0), o.alpha);
            else
                throw std::invalid_argument("unknown oracle kind '" + kind + "'");
            json j{{"kind", kind},
                   {"alpha", o.alpha},
                   {"params", params_json(overrides)},
                   {"power", a.power},
                   {"method", oracle::method_name(a.method)}};
            if (o.format == "csv")
                emit("kind,alpha,power,method\n" + kind + "," + fmt17(o.alpha) + "," +
                         fmt17(a.power) + "," + oracle::method_name(a.method),
                     o.out);
            else if (o.format == "table")
                emit("kind   : " + kind + "\npower  : " + fmt17(a.power) +
                         "\nmethod : " + oracle::method_name(a.method) + "\n",
                     o.out);
            else
                emit(j.dump(2), o.out);
            return 0;
        }

        const auto& s = scenarios::find(o.scenario);
        scenarios::Params params = scenarios::merged_params(s, overrides);

        if (cmd_power->parsed() || cmd_calibrate->parsed()) {
            bool null_variant = cmd_calibrate->parsed();
            engine::PowerEstimate e =
                null_variant
                    ? engine::estimate_size(s, params, *n_opt, o.alpha, o.reps, seed, o.workers)
                    : engine::estimate_power(s, params, *n_opt, o.alpha, o.reps, seed, o.workers);
            json j = estimate_json(e);
            j["params"] = params_json(params);
            j["null_variant"] = null_variant;
            j["elapsed_ms"] = elapsed_ms_since(t0);
            if (o.format == "json")
                emit(j.dump(2), o.out);
            else if (o.format == "csv")
                emit(estimate_csv_header() + "\n" + estimate_csv_row(e), o.out);
            else {
                std::ostringstream os;
                estimate_table(os, e);
                emit(os.str(), o.out);
            }
            return 0;
        }

        if (cmd_solve->parsed()) {
            auto res =
                engine::solve_sample_size(s, params, target, o.alpha, o.reps, seed, o.workers);
            json tr = json::array();
            for (const auto& e : res.trace) tr.push_back(estimate_json(e));
            json j{{"scenario", s.id},          {"params", params_json(params)},
                   {"target", res.target},      {"alpha", o.alpha},
                   {"reps", o.reps},            {"seed", seed},
                   {"n_star", res.n_star},      {"trace", tr},
                   {"elapsed_ms", elapsed_ms_since(t0)}};
            if (o.format == "json")
                emit(j.dump(2), o.out);
            else if (o.format == "csv") {
                std::string text = estimate_csv_header() + ",n_star\n";
                for (const auto& e : res.trace)
                    text += estimate_csv_row(e) + "," + std::to_string(res.n_star) + "\n";
                emit(text, o.out);
            } else {
                std::ostringstream os;
                os << "scenario : " << s.id << "\n"
                   << "target   : " << target << "\n"
                   << "n_star   : " << res.n_star << "\n"
                   << "seed     : " << seed << "\n"
                   << "trace    :\n";
                for (const auto& e : res.trace)
                    os << "  n=" << e.n << "  power=" << fmt17(e.power) << " (se " << fmt17(e.mc_se)
                       << ")\n";
                emit(os.str(), o.out);
            }
            return 0;
        }

        if (cmd_curve->parsed()) {
            std::vector<int> ns = parse_int_list(n_list_text, "--n-list");
            auto pts = engine::power_curve(s, params, ns, o.alpha, o.reps, seed, o.workers);
            if (!svg_file.empty()) {
                std::ofstream f(svg_file);
                if (!f) throw std::runtime_error("cannot open svg file " + svg_file);
                f << curve_svg(pts, 0.0);
            }
            json arr = json::array();
            for (const auto& e : pts) arr.push_back(estimate_json(e));
            json j{{"scenario", s.id},
                   {"params", params_json(params)},
                   {"alpha", o.alpha},
                   {"reps", o.reps},
                   {"seed", seed},
                   {"points", arr},
                   {"elapsed_ms", elapsed_ms_since(t0)}};
            if (o.format == "json")
                emit(j.dump(2), o.out);
            else if (o.format == "csv") {
                std::string text = estimate_csv_header() + "\n";
                for (const auto& e : pts) text += estimate_csv_row(e) + "\n";
                emit(text, o.out);
            } else {
                std::ostringstream os;
                os << "scenario : " << s.id << "  (seed " << seed << ")\n";
                for (const auto& e : pts)
                    os << "  n=" << e.n << "  power=" << fmt17(e.power) << " (se " << fmt17(e.mc_se)
                       << ")\n";
                emit(os.str(), o.out);
            }
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
