#pragma once

// Stage-I economics: what the data collector gains from n participants, what
// the Laplace noise costs her, and the large-population polynomials whose roots
// approximate her optimal privacy level.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "ptdp/population.hpp"
#include "ptdp/pt_core.hpp"

namespace ptdp {

struct MarketConfig {
    long long n_total = 10000;  // N
    double c = 1.0;             // privacy cost per unit prospect level
    double k = 0.8;             // benefit shape, (0, 1]
    double l = 0.001;           // benefit scale, > 0
    ValuationDist dist = ValuationDist::uniform(1.0);
    PTParamsd pt{1.95, 0.75, 0.0, 10, RefWeighting::SplitShare};

    void validate() const;
    double w_max() const { return dist.w_max; }

    /// C = kN / (4l), the constant multiplying eps^3 g' in f.
    double large_population_constant() const { return k * static_cast<double>(n_total) / (4.0 * l); }
};

struct UtilityBreakdown {
    double benefit = 0.0;
    double penalty = 0.0;
    double utility = 0.0;
    double participants = 0.0;
};

/// R(n) = 1 - k / (1 + l n).
double benefit(double n, double k, double l);

/// Expected squared Laplace noise for the normalized mean query: 2 / (n eps)^2.
/// +inf when n == 0.
double accuracy_penalty(double eps, double n);

/// Utility at eps with the expected participant count. Infeasible eps (no
/// participants) yields utility = -inf and penalty = +inf.
UtilityBreakdown collector_utility(double eps, const MarketConfig& cfg);

/// Analytic dU/d eps. Uniform valuations and zero reference only.
double utility_derivative(double eps, const MarketConfig& cfg);

/// Numerator polynomial of the large-population derivative, zero reference.
double poly_f(double eps, const MarketConfig& cfg);

/// Same numerator with g(eps_p) replaced by g(eps_p_pos) - g(eps_n_pos).
double poly_f_pos(double eps, const MarketConfig& cfg);

/// Descending coefficients of f for beta = 1: C a^2, -C a, 0, -2a, 1 with a = M / W_max.
Eigen::Matrix<double, 5, 1> quartic_coefficients(const MarketConfig& cfg);

/// Largest eps with at least one participant under uniform valuations.
double feasible_upper(const MarketConfig& cfg);

struct NoisyMean {
    double noisy_mean = 0.0;
    double true_mean = 0.0;
    double scale = 0.0;  // Laplace scale b = 1 / (n eps)
};

/// Laplace mechanism on the mean of data in [0, 1].
NoisyMean laplace_noise_demo(const std::vector<double>& data, double eps, std::uint64_t seed);

/// Draws from Lap(scale) by inverse CDF.
double sample_laplace(std::mt19937_64& rng, double scale);

}  // namespace ptdp
