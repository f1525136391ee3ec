#include "ptdp/collector.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ptdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_zero_reference(const MarketConfig& cfg, const char* who)
{
    if (cfg.pt.eps_ref != 0.0) throw std::domain_error(std::string(who) + ": requires eps_ref == 0");
}

}  // namespace

void MarketConfig::validate() const
{
    if (n_total < 1) throw std::invalid_argument("n_total must be >= 1");
    if (!(c > 0) || !std::isfinite(c)) throw std::invalid_argument("c must be > 0");
    if (!(k > 0 && k <= 1)) throw std::invalid_argument("k must be in (0, 1]");
    if (!(l > 0) || !std::isfinite(l)) throw std::invalid_argument("l must be > 0");
    dist.validate();
    pt.validate();
}

double benefit(double n, double k, double l)
{
    if (!(n >= 0)) throw std::domain_error("benefit: n must be >= 0");
    return 1.0 - k / (1.0 + l * n);
}

double accuracy_penalty(double eps, double n)
{
    if (!(eps > 0)) throw std::domain_error("accuracy_penalty: eps must be > 0");
    if (n == 0.0) return kInf;
    if (!(n > 0)) throw std::domain_error("accuracy_penalty: n must be >= 0");
    const double s = 1.0 / n;  // sensitivity of the normalized mean
    return 2.0 * s * s / (eps * eps);
}

UtilityBreakdown collector_utility(double eps, const MarketConfig& cfg)
{
    UtilityBreakdown u;
    u.participants = participation_count(eps, cfg.dist, cfg.pt, cfg.n_total, cfg.c);
    u.benefit = benefit(u.participants, cfg.k, cfg.l);
    if (!(u.participants > 0)) {
        u.participants = 0.0;
        u.penalty = kInf;
        u.utility = -kInf;
        return u;
    }
    u.penalty = accuracy_penalty(eps, u.participants);
    u.utility = u.benefit - u.penalty;
    return u;
}

double utility_derivative(double eps, const MarketConfig& cfg)
{
    require_zero_reference(cfg, "utility_derivative");
    if (cfg.dist.kind != ValuationDist::Kind::Uniform) throw std::domain_error("utility_derivative: requires uniform valuations");
    if (!(eps > 0)) throw std::domain_error("utility_derivative: eps must be > 0");

    const double w = cfg.w_max();
    const double big_m = cost_slope_M(cfg.pt, cfg.c);
    const double g = -big_m * std::pow(eps, cfg.pt.beta);
    const double dg = -big_m * cfg.pt.beta * std::pow(eps, cfg.pt.beta - 1.0);
    const double share = (w + g) / w;
    if (!(share > 0)) throw std::domain_error("utility_derivative: eps outside the feasible set");

    const double ln = cfg.l * static_cast<double>(cfg.n_total);
    const double n2 = static_cast<double>(cfg.n_total) * static_cast<double>(cfg.n_total);
    const double denom = 1.0 + ln * share;
    const double benefit_term = cfg.k * ln * (dg / w) / (denom * denom);
    const double penalty_term = 4.0 / n2 * ((w + g + dg * eps) / w) / (share * share * share * eps * eps * eps);
    return benefit_term + penalty_term;
}

double poly_f(double eps, const MarketConfig& cfg)
{
    require_zero_reference(cfg, "poly_f");
    const double w = cfg.w_max();
    const double big_m = cost_slope_M(cfg.pt, cfg.c);
    const double g = -big_m * std::pow(eps, cfg.pt.beta);
    const double dg = -big_m * cfg.pt.beta * std::pow(eps, cfg.pt.beta - 1.0);
    const double big_c = cfg.large_population_constant();
    return ((w + g) / w) * (1.0 + big_c * eps * eps * eps * dg / w) + eps * dg / w;
}

double poly_f_pos(double eps, const MarketConfig& cfg)
{
    if (!(eps > 0)) throw std::domain_error("poly_f_pos: eps must be > 0");
    const double w = cfg.w_max();
    // g(eps_n_pos) is constant in eps, so only the participation level contributes to g'.
    const double dgap = privacy_cost(prospect_participation_level(eps, cfg.pt), cfg.c)
                      - privacy_cost(prospect_nonparticipation_level(cfg.pt), cfg.c);
    const double dg = privacy_cost(prospect_participation_slope(eps, cfg.pt), cfg.c);
    const double big_c = cfg.large_population_constant();
    return ((w + dgap) / w) * (1.0 + big_c * eps * eps * eps * dg / w) + eps * dg / w;
}

Eigen::Matrix<double, 5, 1> quartic_coefficients(const MarketConfig& cfg)
{
    require_zero_reference(cfg, "quartic_coefficients");
    if (cfg.pt.beta != 1.0) throw std::domain_error("quartic_coefficients: requires beta == 1");
    const double a = cost_slope_M(cfg.pt, cfg.c) / cfg.w_max();
    const double big_c = cfg.large_population_constant();
    Eigen::Matrix<double, 5, 1> coeffs;
    coeffs << big_c * a * a, -big_c * a, 0.0, -2.0 * a, 1.0;
    return coeffs;
}

double feasible_upper(const MarketConfig& cfg)
{
    const double w = cfg.w_max();
    if (cfg.pt.eps_ref == 0.0) return std::pow(w / cost_slope_M(cfg.pt, cfg.c), 1.0 / cfg.pt.beta);

    // c (eps_n - eps_p(eps)) is non-decreasing in eps; find where it reaches W_max.
    auto feasible = [&](double eps) { return participation_threshold(cfg.pt, eps, cfg.c) < w; };
    double lo = 0.0;
    double hi = std::max(cfg.pt.eps_ref, 1e-12);
    while (feasible(hi)) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw std::runtime_error("feasible_upper: participation never vanishes");
    }
    for (int it = 0; it < 2000 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

double sample_laplace(std::mt19937_64& rng, double scale)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (true) {
        const double u = unit(rng) - 0.5;
        const double tail = 1.0 - 2.0 * std::abs(u);
        if (tail > 0.0) return -scale * std::copysign(1.0, u) * std::log(tail);
    }
}

NoisyMean laplace_noise_demo(const std::vector<double>& data, double eps, std::uint64_t seed)
{
    if (data.empty()) throw std::invalid_argument("laplace_noise_demo: data must be non-empty");
    if (!(eps > 0)) throw std::domain_error("laplace_noise_demo: eps must be > 0");
    for (double x : data)
        if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("laplace_noise_demo: data must lie in [0, 1]");

    NoisyMean out;
    const double n = static_cast<double>(data.size());
    out.true_mean = std::accumulate(data.begin(), data.end(), 0.0) / n;
    out.scale = 1.0 / (n * eps);
    std::mt19937_64 rng(seed);
    out.noisy_mean = out.true_mean + sample_laplace(rng, out.scale);
    return out;
}

}  // namespace ptdp
