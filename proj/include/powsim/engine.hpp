#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "powsim/scenario.hpp"

// The Monte Carlo loop: power estimation, type-I calibration, sample-size
// solving, power curves, and confidence-interval width studies.
// Replications are scheduled over a worker pool; replication i always uses
// the (seed, stream_offset + i) substream, so results are bit-identical for
// any worker count.

namespace powsim::engine {

enum class InvalidPolicy {
    strict,   // invalids count as non-rejections; > 10% invalid is an error
    lenient,  // invalids count as non-rejections, never an error
    drop      // invalids leave the denominator
};

struct PowerEstimate {
    std::string scenario_id;
    int n = 0;
    double alpha = 0.05;
    int64_t reps = 0;
    double power = 0.0;
    double mc_se = 0.0;
    std::pair<double, double> ci95{0.0, 0.0};
    int64_t invalid_count = 0;
    uint64_t seed = 0;
};

// Rejection proportion of the bound test at level alpha over reps
// replications (strict inequality p < alpha).
PowerEstimate estimate_power(const scenarios::Scenario& s, const scenarios::Params& params, int n,
                             double alpha, int64_t reps, uint64_t seed, int workers,
                             InvalidPolicy policy = InvalidPolicy::strict,
                             uint64_t stream_offset = 0);

// estimate_power on the null variant: the simulated type-I error rate.
PowerEstimate estimate_size(const scenarios::Scenario& s, const scenarios::Params& params, int n,
                            double alpha, int64_t reps, uint64_t seed, int workers,
                            InvalidPolicy policy = InvalidPolicy::strict);

struct SolveResult {
    int n_star = 0;
    double target = 0.0;
    std::vector<PowerEstimate> trace;
};

// Coarse doubling until the target power is reached, then bisection on the
// design grid; the final candidate is confirmed at 4x reps.
SolveResult solve_sample_size(const scenarios::Scenario& s, const scenarios::Params& params,
                              double target, double alpha, int64_t reps, uint64_t seed,
                              int workers, int n_max = 1000000);

// One estimate per n, with substreams disjoint across the whole run.
std::vector<PowerEstimate> power_curve(const scenarios::Scenario& s,
                                       const scenarios::Params& params,
                                       const std::vector<int>& n_list, double alpha, int64_t reps,
                                       uint64_t seed, int workers);

enum class CiKind { binom_exact, binom_approx, mean_known_var, mean_t, variance };

CiKind parse_ci_kind(const std::string& name);
std::string ci_kind_name(CiKind k);

struct WidthEstimate {
    double mean_width = 0.0;
    double sd_width = 0.0;
    double q90_width = 0.0;
    int64_t reps = 0;
};

// Replicated confidence-interval widths.  Exact binomial intervals are
// Clopper-Pearson; the approximate interval is the Wilson score interval.
WidthEstimate ci_width(CiKind kind, const std::map<std::string, double>& params, int n,
                       double level, int64_t reps, uint64_t seed, int workers);

}  // namespace powsim::engine
