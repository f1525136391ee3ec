#pragma once

// Experiment sweeps. Each returns its rows plus the qualitative assertions
// evaluated on them; nothing here compares against hard-coded magnitudes.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ptdp/collector.hpp"
#include "ptdp/csv.hpp"
#include "ptdp/solver.hpp"

namespace ptdp {

using NamedValues = std::vector<std::pair<std::string, double>>;

struct SweepRecord {
    NamedValues inputs;  // full configuration of the cell, in column order
    double eps_star = std::numeric_limits<double>::quiet_NaN();
    double eps_star_approx = std::numeric_limits<double>::quiet_NaN();
    double utility = std::numeric_limits<double>::quiet_NaN();
    double participants = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    NamedValues extras;  // experiment-specific outputs
};

struct Assertion {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SweepOutput {
    std::string experiment;
    std::vector<SweepRecord> records;
    std::vector<Assertion> assertions;

    bool all_pass() const;
    /// Column set is taken from the first record; all rows must share it.
    CsvTable to_csv() const;
};

/// Runs body(i) for i in [0, count) on `jobs` threads. Results must be written
/// to per-index slots; the first exception thrown is rethrown.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

/// Market parameters as CSV input columns.
NamedValues market_inputs(const MarketConfig& cfg);

/// Strictly monotone checks used by the sweep assertions.
bool strictly_decreasing(const std::vector<double>& v);
bool strictly_increasing(const std::vector<double>& v);

SweepOutput approximation_gap_sweep(const MarketConfig& cfg, const std::vector<long long>& n_values, int jobs = 1);

SweepOutput pt_parameter_sweep(const MarketConfig& cfg, const std::vector<double>& lambdas,
                               const std::vector<double>& betas, int jobs = 1);

SweepOutput reference_point_sweep(const MarketConfig& cfg, double eps_ref, const std::vector<double>& lambdas,
                                  const std::vector<double>& betas, int jobs = 1);

/// Relative utility the collector loses by designing for expected-utility
/// individuals when they actually follow cfg.pt. An infeasible mismatched
/// design counts as a total loss; the result is clamped to [0, 1].
double mismatch_loss(const MarketConfig& cfg);

/// Loss along lambda at fixed beta, then along beta at fixed lambda.
SweepOutput mismatch_sweep(const MarketConfig& cfg, const std::vector<double>& lambdas, double beta_for_lambdas,
                           const std::vector<double>& betas, double lambda_for_betas, int jobs = 1);

enum class HeteroParam { Lambda, Beta };

const char* to_string(HeteroParam which);
HeteroParam hetero_param_from_string(const std::string& s);

/// Market used by the heterogeneity sweeps unless overridden.
MarketConfig hetero_default_market(HeteroParam which);
std::vector<double> hetero_default_variances(HeteroParam which);

struct UShape {
    bool found = false;
    std::size_t argmin = 0;
    std::string detail;
};

/// Interior argmin whose neighbours both exceed it by more than one standard
/// error (the larger of the two cells' errors).
UShape detect_u_shape(const std::vector<double>& means, const std::vector<double>& std_errors);

/// One row per variance: mean eps* over `reps` rosters with its standard error
/// and the mean participation threshold (largest participating lambda).
SweepOutput hetero_variance_sweep(const MarketConfig& base, HeteroParam which, const std::vector<double>& variances,
                                  int reps, std::uint64_t seed, int jobs = 1);

}  // namespace ptdp
