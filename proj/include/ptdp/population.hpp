#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "ptdp/pt_core.hpp"

namespace ptdp {

/// Reward-valuation distribution W on [0, w_max].
struct ValuationDist {
    enum class Kind { Uniform, TruncatedNormal };

    Kind kind = Kind::Uniform;
    double w_max = 1.0;
    double mu = 0.5;      // TruncatedNormal only
    double sigma = 0.25;  // TruncatedNormal only

    static ValuationDist uniform(double w_max);
    static ValuationDist truncated_normal(double w_max, double mu, double sigma);

    void validate() const;

    /// Pr(W >= w). 1 for w <= 0, 0 for w >= w_max.
    double survival(double w) const;
    double density(double w) const;

    /// Draw one valuation by inverse-CDF sampling.
    double sample(std::mt19937_64& rng) const;

    bool operator==(const ValuationDist&) const = default;
};

const char* to_string(ValuationDist::Kind kind);

struct Individual {
    double w = 0.0;
    PTParamsd pt;
};

struct Roster {
    std::vector<Individual> individuals;
    std::uint64_t seed = 0;

    std::size_t size() const { return individuals.size(); }
    bool empty() const { return individuals.empty(); }
};

struct GammaSpec {
    double shape = 1.0;  // k
    double scale = 1.0;  // theta

    void validate() const;
    double mean() const { return shape * scale; }
    double variance() const { return shape * scale * scale; }
};

/// Behavioural fits used for heterogeneous populations.
inline constexpr GammaSpec kLambdaFit{3.2433, 0.6018};
inline constexpr GammaSpec kBetaFit{12.8662, 0.0583};

GammaSpec gamma_from_mean_var(double mean, double variance);

/// Participation threshold on W: c * (nonparticipation level - participation level).
double participation_threshold(const PTParamsd& pt, double eps, double c);

/// Weak inequality: ties participate.
bool participate(const Individual& ind, double eps, double c);

/// Expected number of participants N * Pr(W >= threshold), unrounded.
double participation_count(double eps, const ValuationDist& dist, const PTParamsd& pt,
                           long long n_total, double c);

/// Exact number of roster members that participate at eps.
long long count_roster(const Roster& roster, double eps, double c);

struct FixedPT {
    PTParamsd pt;
};

/// Heterogeneous population: lambda and/or beta drawn from Gamma laws
/// (resampled until admissible). An unset law keeps the value in `base`.
struct GammaHeteroPT {
    PTParamsd base;
    std::optional<GammaSpec> lambda;
    std::optional<GammaSpec> beta;
};

using PTModel = std::variant<FixedPT, GammaHeteroPT>;

/// Deterministic given (dist, model, n, seed).
Roster sample_roster(const ValuationDist& dist, const PTModel& model, std::size_t n, std::uint64_t seed);

/// Rejection-sample a Gamma variate restricted to [lo, hi].
double sample_gamma_in(std::mt19937_64& rng, const GammaSpec& spec, double lo, double hi);

struct ChiSquaredResult {
    double statistic = 0.0;
    double p_value = 0.0;
    int dof = 0;
    bool degenerate = false;  // some expected bin count < 5
};

/// Pearson chi-squared test of samples against Gamma(spec), equal-probability bins.
ChiSquaredResult chi_squared_gof(const std::vector<double>& samples, const GammaSpec& spec, int bins);

/// CSV with header `w,lambda,beta,eps_ref`. `m` and `weighting` are not stored
/// per row and are taken from `defaults` on read.
void write_roster_csv(std::ostream& os, const Roster& roster);
Roster read_roster_csv(std::istream& is, const PTParamsd& defaults);

/// Mix a base seed with a stream index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace ptdp
