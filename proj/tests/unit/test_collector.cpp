#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ptdp/collector.hpp"

using namespace ptdp;
using doctest::Approx;

namespace {

MarketConfig market(double lambda, double beta, double l = 1e-3, double c = 1.0, double w_max = 1.0, int m = 10)
{
    MarketConfig cfg;
    cfg.l = l;
    cfg.c = c;
    cfg.dist = ValuationDist::uniform(w_max);
    cfg.pt = PTParamsd{lambda, beta, 0.0, m, RefWeighting::SplitShare};
    return cfg;
}

// Uniform, zero-reference utility written out from its closed form.
double closed_form_utility(double eps, const MarketConfig& cfg)
{
    const double n = static_cast<double>(cfg.n_total);
    const double x = 1.0 - cost_slope_M(cfg.pt, cfg.c) * std::pow(eps, cfg.pt.beta) / cfg.w_max();
    return 1.0 - cfg.k / (1.0 + cfg.l * n * x) - 2.0 / (n * n * eps * eps * x * x);
}

}  // namespace

TEST_CASE("benefit and penalty")
{
    CHECK(benefit(0, 0.8, 0.01) == Approx(0.2));
    CHECK(benefit(100, 0.8, 0.01) == Approx(0.6));
    CHECK(accuracy_penalty(0.1, 100) == Approx(2e-2));
    CHECK(accuracy_penalty(0.1, 0) == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(accuracy_penalty(0.0, 10), std::domain_error);
}

TEST_CASE("utility reproduces the uniform closed form")
{
    for (double lambda : {1.0, 2.0, 4.5})
        for (double beta : {0.5, 0.88, 1.0}) {
            const auto cfg = market(lambda, beta);
            const double upper = feasible_upper(cfg);
            for (double frac : {1e-4, 0.01, 0.3, 0.9}) {
                const double eps = frac * upper;
                CHECK(collector_utility(eps, cfg).utility == Approx(closed_form_utility(eps, cfg)).epsilon(1e-12));
            }
        }
}

TEST_CASE("utility is -inf with no participants")
{
    const auto cfg = market(2.0, 0.75);
    const auto u = collector_utility(1.0001 * feasible_upper(cfg), cfg);
    CHECK(u.participants == 0.0);
    CHECK(u.utility == -std::numeric_limits<double>::infinity());
}

TEST_CASE("feasible upper bound")
{
    CHECK(feasible_upper(market(1.0, 0.5, 1e-3, 1.0, 2.0, 1)) == Approx(4.0).epsilon(1e-14));
    const auto cfg = market(2.0, 1.0);
    CHECK(feasible_upper(cfg) == Approx(1.0 / cost_slope_M(cfg.pt, cfg.c)).epsilon(1e-14));

    auto pos = market(2.0, 0.75);
    pos.pt.eps_ref = 0.01;
    const double upper = feasible_upper(pos);
    CHECK(participation_threshold(pos.pt, upper, pos.c) < pos.w_max());
    CHECK(participation_threshold(pos.pt, upper * (1 + 1e-12), pos.c) >= pos.w_max());
}

TEST_CASE("analytic derivative matches a central difference")
{
    for (double beta : {0.5, 0.75, 1.0}) {
        const auto cfg = market(1.95, beta);
        const double upper = feasible_upper(cfg);
        for (double frac : {1e-3, 0.05, 0.5, 0.95}) {
            const double eps = frac * upper;
            const double h = 1e-6 * eps;
            const double fd = (collector_utility(eps + h, cfg).utility - collector_utility(eps - h, cfg).utility) / (2 * h);
            CHECK(utility_derivative(eps, cfg) == Approx(fd).epsilon(1e-4));
        }
    }
    auto tn = market(2, 1);
    tn.dist = ValuationDist::truncated_normal(1, 0.5, 0.2);
    CHECK_THROWS_AS(utility_derivative(0.1, tn), std::domain_error);
}

TEST_CASE("poly_f: bracketing and the explicit quartic")
{
    for (double lambda : {1.0, 2.0, 4.5})
        for (double l : {1e-4, 1e-3, 1e-2}) {
            const auto cfg = market(lambda, 1.0, l);
            const double upper = feasible_upper(cfg);
            CHECK(poly_f(1e-12 * upper, cfg) > 0);
            CHECK(poly_f(upper, cfg) == Approx(-1.0).epsilon(1e-12));

            const auto q = quartic_coefficients(cfg);
            for (double frac : {0.01, 0.2, 0.7}) {
                const double e = frac * upper;
                const double expanded = (((q(0) * e + q(1)) * e + q(2)) * e + q(3)) * e + q(4);
                const double scale = std::abs(q(0) * e * e * e * e) + std::abs(q(1) * e * e * e) + std::abs(q(3) * e) + 1;
                CHECK(std::abs(expanded - poly_f(e, cfg)) <= 1e-12 * scale);
            }
        }
    // general beta: f at the upper end is -beta
    const auto cfg = market(2.0, 0.6);
    CHECK(poly_f(feasible_upper(cfg), cfg) == Approx(-0.6).epsilon(1e-12));
    CHECK_THROWS_AS(quartic_coefficients(cfg), std::domain_error);
}

TEST_CASE("poly_f_pos tends to poly_f as the reference vanishes (per-outcome weighting)")
{
    auto cfg = market(1.95, 0.75);
    auto pos = cfg;
    pos.pt.weighting = RefWeighting::PerOutcome;
    pos.pt.eps_ref = 1e-14;
    for (double eps : {1e-3, 5e-3, 0.02}) CHECK(poly_f_pos(eps, pos) == Approx(poly_f(eps, cfg)).epsilon(1e-6));

    pos.pt.eps_ref = 0.0;
    for (double eps : {1e-3, 5e-3, 0.02}) CHECK(poly_f_pos(eps, pos) == Approx(poly_f(eps, cfg)).epsilon(1e-13));
}

TEST_CASE("laplace demo")
{
    std::vector<double> data(100, 0.25);
    data[0] = 1.0;
    const auto r = laplace_noise_demo(data, 0.1, 7);
    CHECK(r.true_mean == Approx(0.2575));
    CHECK(r.scale == Approx(0.1));
    CHECK(laplace_noise_demo(data, 0.1, 7).noisy_mean == r.noisy_mean);
    CHECK(laplace_noise_demo(data, 1e9, 7).noisy_mean == Approx(r.true_mean).epsilon(1e-9));
    CHECK_THROWS_AS(laplace_noise_demo({}, 0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(laplace_noise_demo({0.5, 1.5}, 0.1, 1), std::domain_error);
    CHECK_THROWS_AS(laplace_noise_demo({0.5}, 0.0, 1), std::domain_error);
}

TEST_CASE("laplace noise is centred")
{
    std::mt19937_64 rng(123);
    const int trials = 200000;
    const double b = 0.5;
    double sum = 0;
    for (int i = 0; i < trials; ++i) sum += sample_laplace(rng, b);
    CHECK(std::abs(sum / trials) < 3 * std::sqrt(2.0) * b / std::sqrt(double(trials)));
}

TEST_CASE("market validation names the field")
{
    auto message = [](MarketConfig cfg) {
        try {
            cfg.validate();
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    auto cfg = market(2, 1);
    CHECK(message(cfg).empty());
    cfg.k = 1.5;
    CHECK(message(cfg).find("k ") == 0);
    cfg = market(2, 1);
    cfg.l = 0;
    CHECK(message(cfg).find("l ") == 0);
    cfg = market(2, 1);
    cfg.c = -1;
    CHECK(message(cfg).find("c ") == 0);
    cfg = market(2, 1);
    cfg.n_total = 0;
    CHECK(message(cfg).find("n_total") == 0);
}
