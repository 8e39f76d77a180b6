#include "powsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "powsim/distribution.hpp"
#include "powsim/special.hpp"

namespace powsim::engine {

using scenarios::Params;
using scenarios::Scenario;

namespace {

int effective_workers(int workers) {
    if (workers > 0) return workers;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs fn(i) for i in [0, count) across a pool; exceptions are collected and
// the first one is rethrown after all threads join.
template <typename Fn>
void parallel_for(int64_t count, int workers, Fn&& fn) {
    workers = std::min<int64_t>(effective_workers(workers), std::max<int64_t>(count, 1));
    if (workers <= 1) {
        for (int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int64_t> next{0};
    std::mutex err_mutex;
    std::string first_error;
    auto body = [&]() {
        for (;;) {
            int64_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (first_error.empty()) first_error = e.what();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (!first_error.empty()) throw std::runtime_error(first_error);
}

PowerEstimate summarize(const Scenario& s, int n, double alpha, int64_t reps, uint64_t seed,
                        int64_t rejections, int64_t invalid, InvalidPolicy policy) {
    if (policy == InvalidPolicy::strict && invalid * 10 > reps)
        throw std::runtime_error("scenario " + s.id + ": " + std::to_string(invalid) + " of " +
                                 std::to_string(reps) +
                                 " replications invalid; model/test mismatch?");
    int64_t denom = (policy == InvalidPolicy::drop) ? reps - invalid : reps;
    if (denom <= 0) throw std::runtime_error("scenario " + s.id + ": no valid replications");
    PowerEstimate e;
    e.scenario_id = s.id;
    e.n = n;
    e.alpha = alpha;
    e.reps = reps;
    e.seed = seed;
    e.invalid_count = invalid;
    e.power = static_cast<double>(rejections) / static_cast<double>(denom);
    e.mc_se = std::sqrt(e.power * (1.0 - e.power) / static_cast<double>(denom));
    e.ci95 = {std::fmax(0.0, e.power - 1.959963984540054 * e.mc_se),
              std::fmin(1.0, e.power + 1.959963984540054 * e.mc_se)};
    return e;
}

}  // namespace

PowerEstimate estimate_power(const Scenario& s, const Params& params, int n, double alpha,
                             int64_t reps, uint64_t seed, int workers, InvalidPolicy policy,
                             uint64_t stream_offset) {
    if (reps < 1) throw std::invalid_argument("estimate_power: reps must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("estimate_power: alpha must be in (0, 1)");
    scenarios::check_n(s, n);
    std::atomic<int64_t> rejections{0}, invalid{0};
    parallel_for(reps, workers, [&](int64_t i) {
        prob::RandomSource rng(seed, stream_offset + static_cast<uint64_t>(i));
        tests::TestResult r = scenarios::run_once(s, params, n, rng);
        if (!r.valid)
            invalid.fetch_add(1);
        else if (r.p_value < alpha)
            rejections.fetch_add(1);
    });
    return summarize(s, n, alpha, reps, seed, rejections.load(), invalid.load(), policy);
}

PowerEstimate estimate_size(const Scenario& s, const Params& params, int n, double alpha,
                            int64_t reps, uint64_t seed, int workers, InvalidPolicy policy) {
    return estimate_power(s, scenarios::null_params(s, params), n, alpha, reps, seed, workers,
                          policy);
}

SolveResult solve_sample_size(const Scenario& s, const Params& params, double target, double alpha,
                              int64_t reps, uint64_t seed, int workers, int n_max) {
    if (!(target > 0.0 && target < 1.0))
        throw std::invalid_argument("solve_sample_size: target must be in (0, 1)");
    int g = s.granularity;
    auto round_up = [g](int v) { return ((v + g - 1) / g) * g; };
    SolveResult out;
    out.target = target;
    uint64_t offset = 0;
    auto evaluate = [&](int n) {
        PowerEstimate e =
            estimate_power(s, params, n, alpha, reps, seed, workers, InvalidPolicy::strict, offset);
        offset += static_cast<uint64_t>(reps);
        out.trace.push_back(e);
        return e;
    };
    int start = round_up(std::max(s.min_n, g));
    int lo = start - g;  // exclusive lower bound, never evaluated
    int n = start;
    int hi = -1;
    for (;;) {
        if (n > n_max)
            throw std::runtime_error("solve_sample_size: target " + std::to_string(target) +
                                     " not reached below n_max = " + std::to_string(n_max) +
                                     " (" + std::to_string(out.trace.size()) + " evaluations)");
        PowerEstimate e = evaluate(n);
        if (e.power >= target) {
            hi = n;
            break;
        }
        lo = n;
        n = round_up(2 * std::max(n, 1));
    }
    while (hi - lo > g) {
        int mid = round_up(lo + (hi - lo) / 2);
        if (mid >= hi) mid = hi - g;
        if (mid <= lo) break;
        PowerEstimate e = evaluate(mid);
        if (e.power >= target)
            hi = mid;
        else
            lo = mid;
    }
    // confirmation run at 4x replications; step up if it clearly misses
    for (;;) {
        PowerEstimate confirm = estimate_power(s, params, hi, alpha, 4 * reps, seed, workers,
                                               InvalidPolicy::strict, offset);
        offset += static_cast<uint64_t>(4 * reps);
        out.trace.push_back(confirm);
        if (confirm.power >= target - confirm.mc_se) break;
        hi += g;
        if (hi > n_max)
            throw std::runtime_error("solve_sample_size: confirmation failed below n_max");
    }
    out.n_star = hi;
    std::stable_sort(out.trace.begin(), out.trace.end(),
                     [](const PowerEstimate& a, const PowerEstimate& b) { return a.n < b.n; });
    return out;
}

std::vector<PowerEstimate> power_curve(const Scenario& s, const Params& params,
                                       const std::vector<int>& n_list, double alpha, int64_t reps,
                                       uint64_t seed, int workers) {
    if (n_list.empty()) throw std::invalid_argument("power_curve: empty n list");
    std::vector<PowerEstimate> out;
    out.reserve(n_list.size());
    uint64_t offset = 0;
    for (int n : n_list) {
        out.push_back(estimate_power(s, params, n, alpha, reps, seed, workers,
                                     InvalidPolicy::strict, offset));
        offset += static_cast<uint64_t>(reps);
    }
    return out;
}

CiKind parse_ci_kind(const std::string& name) {
    if (name == "binom-exact") return CiKind::binom_exact;
    if (name == "binom-approx") return CiKind::binom_approx;
    if (name == "mean-known-var") return CiKind::mean_known_var;
    if (name == "mean-t") return CiKind::mean_t;
    if (name == "variance") return CiKind::variance;
    throw std::invalid_argument(
        "unknown interval kind '" + name +
        "'; valid: binom-exact, binom-approx, mean-known-var, mean-t, variance");
}

std::string ci_kind_name(CiKind k) {
    switch (k) {
        case CiKind::binom_exact: return "binom-exact";
        case CiKind::binom_approx: return "binom-approx";
        case CiKind::mean_known_var: return "mean-known-var";
        case CiKind::mean_t: return "mean-t";
        case CiKind::variance: return "variance";
    }
    return "?";
}

WidthEstimate ci_width(CiKind kind, const std::map<std::string, double>& params, int n,
                       double level, int64_t reps, uint64_t seed, int workers) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("ci_width: level must be in (0, 1)");
    if (reps < 1) throw std::invalid_argument("ci_width: reps must be >= 1");
    bool needs_two = kind == CiKind::mean_t || kind == CiKind::variance;
    if (n < (needs_two ? 2 : 1)) throw std::invalid_argument("ci_width: n too small");
    double alpha = 1.0 - level;
    auto param = [&](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    double p = param("p", 0.5);
    double mu = param("mu", 1000.0);
    double sigma = param("sigma", 7.5);
    double zq = special::normal_quantile(1.0 - alpha / 2.0);
    double tq = n >= 2 ? prob::quantile(prob::StudentT{static_cast<double>(n - 1)},
                                        1.0 - alpha / 2.0)
                       : 0.0;
    double chi_lo = n >= 2 ? prob::quantile(prob::ChiSquared{static_cast<double>(n - 1)}, alpha / 2.0)
                           : 0.0;
    double chi_hi = n >= 2
                        ? prob::quantile(prob::ChiSquared{static_cast<double>(n - 1)}, 1.0 - alpha / 2.0)
                        : 0.0;
    std::vector<double> widths(static_cast<size_t>(reps));
    parallel_for(reps, workers, [&](int64_t i) {
        prob::RandomSource rng(seed, static_cast<uint64_t>(i));
        double w = 0.0;
        switch (kind) {
            case CiKind::binom_exact: {
                int64_t x = static_cast<int64_t>(prob::sample(prob::Binomial{n, p}, rng));
                double lo = (x == 0) ? 0.0
                                     : special::inc_beta_inv(static_cast<double>(x),
                                                             static_cast<double>(n - x + 1),
                                                             alpha / 2.0);
                double hi = (x == n) ? 1.0
                                     : special::inc_beta_inv(static_cast<double>(x + 1),
                                                             static_cast<double>(n - x),
                                                             1.0 - alpha / 2.0);
                w = hi - lo;
                break;
            }
            case CiKind::binom_approx: {
                int64_t x = static_cast<int64_t>(prob::sample(prob::Binomial{n, p}, rng));
                double ph = static_cast<double>(x) / n;
                double z2n = zq * zq / n;
                w = 2.0 * zq * std::sqrt(ph * (1.0 - ph) / n + z2n / (4.0 * n)) / (1.0 + z2n);
                break;
            }
            case CiKind::mean_known_var:
                w = 2.0 * zq * sigma / std::sqrt(static_cast<double>(n));
                break;
            case CiKind::mean_t: {
                double sum = 0.0, sumsq = 0.0;
                for (int j = 0; j < n; ++j) {
                    double v = mu + sigma * rng.next_normal();
                    sum += v;
                    sumsq += v * v;
                }
                double s2 = (sumsq - sum * sum / n) / (n - 1.0);
                w = 2.0 * tq * std::sqrt(std::fmax(0.0, s2) / n);
                break;
            }
            case CiKind::variance: {
                double sum = 0.0, sumsq = 0.0;
                for (int j = 0; j < n; ++j) {
                    double v = mu + sigma * rng.next_normal();
                    sum += v;
                    sumsq += v * v;
                }
                double ss = std::fmax(0.0, sumsq - sum * sum / n);
                w = ss / chi_lo - ss / chi_hi;
                break;
            }
        }
        widths[static_cast<size_t>(i)] = w;
    });
    WidthEstimate out;
    out.reps = reps;
    double sum = 0.0;
    for (double w : widths) sum += w;
    out.mean_width = sum / static_cast<double>(reps);
    double ss = 0.0;
    for (double w : widths) ss += (w - out.mean_width) * (w - out.mean_width);
    out.sd_width = reps > 1 ? std::sqrt(ss / static_cast<double>(reps - 1)) : 0.0;
    std::sort(widths.begin(), widths.end());
    size_t q_idx = static_cast<size_t>(std::ceil(0.9 * static_cast<double>(reps))) - 1;
    out.q90_width = widths[std::min(q_idx, widths.size() - 1)];
    return out;
}

}  // namespace powsim::engine
