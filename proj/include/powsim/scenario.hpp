#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "powsim/linmod.hpp"
#include "powsim/rng.hpp"
#include "powsim/testkit.hpp"

// The catalog of data-generating models, each binding a generator carrying a
// minimum relevant effect to the hypothesis test applied to it.

namespace powsim::scenarios {

using Params = std::map<std::string, double>;

struct CountData {
    int64_t x = 0;
    int64_t n = 0;
};
struct VectorData {
    std::vector<double> x;
};
struct TwoVectorData {
    std::vector<double> x, y;
};
struct PairedData {
    std::vector<double> x, y;
};
struct TableData {
    tests::ContingencyTable tab;
};
struct MatrixData {
    std::vector<double> values;  // row-major n x p
    int n = 0, p = 0;
};
struct TwoMatrixData {
    std::vector<double> x, y;  // row-major
    int n1 = 0, n2 = 0, p = 0;
};
struct DesignResponseData {
    std::vector<linmod::Variable> vars;
    std::vector<double> y;
};

using Dataset = std::variant<CountData, VectorData, TwoVectorData, PairedData, TableData,
                             MatrixData, TwoMatrixData, DesignResponseData>;

struct Scenario {
    std::string id;
    std::string title;
    Params defaults;
    int default_n = 0;
    int granularity = 1;  // accepted n are multiples of this
    int min_n = 1;
    bool exact_test = false;     // conservative-by-construction test
    bool randomization = false;  // nested Monte Carlo inside the test

    std::function<Dataset(const Params&, int n, prob::RandomSource&)> generate_fn;
    std::function<tests::TestResult(const Params&, const Dataset&, prob::RandomSource&)> apply_fn;
    std::function<void(Params&)> nullify_fn;
};

// All scenarios; ids and defaults are frozen fixtures.
const std::vector<Scenario>& catalog();

// Throws std::invalid_argument listing the valid ids when unknown.
const Scenario& find(const std::string& id);

// Defaults overlaid with overrides; unknown override keys are rejected.
Params merged_params(const Scenario& s, const Params& overrides);

// Effectless copy of the parameters.
Params null_params(const Scenario& s, Params p);

// Throws when n is incompatible with the scenario's design.
void check_n(const Scenario& s, int n);

Dataset generate(const Scenario& s, const Params& p, int n, prob::RandomSource& rng);

// generate + bound test; randomization scenarios draw their inner resamples
// from a child substream of rng.
tests::TestResult run_once(const Scenario& s, const Params& p, int n, prob::RandomSource& rng);

}  // namespace powsim::scenarios
