#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptdp/collector.hpp"

namespace ptdp {

struct ExperimentParams {
    std::string name = "solve";  // solve | gap | pt | refpoint | mismatch | hetero | noise-demo
    int grid_points = 10000;

    std::vector<long long> n_values{4000, 10000, 20000, 40000};

    std::vector<double> lambdas{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5};
    std::vector<double> betas{0.5, 0.6, 0.75, 0.88, 1.0};
    double eps_ref = 0.01;

    std::vector<double> mismatch_lambdas{1.0, 1.5, 1.95, 2.5, 3.0, 3.5, 4.0, 4.5};
    double mismatch_beta = 0.88;
    std::vector<double> mismatch_betas{1.0, 0.88, 0.75, 0.6, 0.5};
    double mismatch_lambda = 1.95;

    std::string which = "lambda";
    std::vector<double> variances;
    int reps = 50;

    long long trials = 0;
    double noise_eps = 0.1;
    std::string data_path;

    bool operator==(const ExperimentParams&) const = default;
};

struct RunConfig {
    MarketConfig market;  // its pt member is serialized as the top-level "pt" object
    ExperimentParams experiment;
    std::uint64_t seed = 1;
    std::string output_path = "results";

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    bool operator==(const RunConfig&) const;
};

/// Shipped defaults for an experiment (and, for hetero, the varied parameter).
RunConfig default_run_config(const std::string& experiment, const std::string& which = "lambda");

/// Overlay `j` onto `base`. Unknown keys and type mismatches throw
/// std::invalid_argument with the dotted field path.
RunConfig parse_run_config(const nlohmann::json& j, RunConfig base);

nlohmann::json to_json(const RunConfig& cfg);

/// FNV-1a 64 of the canonical dump, excluding output_path. Lower-case hex.
std::string config_digest(const RunConfig& cfg);

}  // namespace ptdp
