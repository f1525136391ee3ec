#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ptdp/pt_core.hpp"

using namespace ptdp;
using doctest::Approx;

namespace {

PTParamsd pt(double lambda, double beta, int m = 10, double eps_ref = 0.0,
             RefWeighting w = RefWeighting::SplitShare)
{
    return PTParamsd{lambda, beta, eps_ref, m, w};
}

// Direct transcription of the discretized outcome average, kept separate from the library.
double oracle_level(double eps, const PTParamsd& p)
{
    double sum = 0;
    for (int i = 1; i <= p.m; ++i) {
        const double x = i * eps / p.m;
        sum += x <= p.eps_ref ? std::pow(p.eps_ref - x, p.beta) : -p.lambda * std::pow(x - p.eps_ref, p.beta);
    }
    return sum / p.m;
}

}  // namespace

TEST_CASE("valuation: gains below the reference, scaled losses above")
{
    CHECK(valuation(0.04, pt(2, 0.5)) == Approx(-0.4).epsilon(1e-14));
    CHECK(valuation(0.0, pt(2, 0.5)) == 0.0);
    CHECK(valuation(0.01, pt(3, 0.5, 10, 0.05)) == Approx(0.2).epsilon(1e-14));
    CHECK(valuation(0.06, pt(3, 1.0, 10, 0.05)) == Approx(-0.03).epsilon(1e-12));
    CHECK_THROWS_AS(valuation(-1e-9, pt(1, 1)), std::domain_error);
}

TEST_CASE("participation level: worked examples")
{
    CHECK(prospect_participation_level(1.0, pt(1, 1, 2)) == Approx(-0.75).epsilon(1e-15));
    CHECK(prospect_participation_level(1.0, pt(2, 1, 4)) == Approx(-1.25).epsilon(1e-15));
    CHECK_THROWS_AS(prospect_participation_level(0.0, pt(1, 1)), std::domain_error);
}

TEST_CASE("cost slope M: worked examples and the linear special case")
{
    CHECK(cost_slope_M(pt(2, 1, 3), 1.0) == Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(cost_slope_M(pt(1, 0.5, 2), 1.0) == Approx(0.5 * std::sqrt(0.5) * (1 + std::sqrt(2.0))).epsilon(1e-15));
    for (int m : {1, 2, 7, 40})
        for (double lambda : {1.0, 2.25, 4.5})
            CHECK(cost_slope_M(pt(lambda, 1, m), 1.5) == Approx(1.5 * lambda * (m + 1) / (2.0 * m)).epsilon(1e-14));
    CHECK_THROWS_AS(cost_slope_M(pt(2, 1, 10, 0.01), 1.0), std::domain_error);
}

TEST_CASE("zero-reference level matches the outcome average and the power law")
{
    for (double lambda : {1.0, 1.95, 4.5})
        for (double beta : {0.2, 0.5, 0.88, 1.0})
            for (int m : {1, 3, 10})
                for (double eps : {1e-3, 0.3, 2.0}) {
                    const auto p = pt(lambda, beta, m);
                    const double lvl = prospect_participation_level(eps, p);
                    CHECK(lvl == Approx(oracle_level(eps, p)).epsilon(1e-13));
                    CHECK(lvl == Approx(-cost_slope_M(p, 1.0) * std::pow(eps, beta)).epsilon(1e-13));
                }
}

TEST_CASE("positive reference: per-outcome weighting matches the outcome average")
{
    for (double eps : {0.002, 0.0123, 0.05, 0.4}) {
        const auto p = pt(2.5, 0.6, 10, 0.01, RefWeighting::PerOutcome);
        CHECK(prospect_participation_level(eps, p) == Approx(oracle_level(eps, p)).epsilon(1e-13));
    }
}

TEST_CASE("positive reference: split-share weighting splits gains and losses by t/m")
{
    const auto p = pt(2.0, 1.0, 4, 0.5);
    // eps = 1: outcomes 0.25, 0.5 are gains (t = 2); 0.75, 1 are losses.
    const double gains = 0.25 + 0.0;
    const double losses = 0.25 + 0.5;
    CHECK(prospect_participation_level(1.0, p) == Approx(0.5 * gains - 0.5 * 2.0 * losses).epsilon(1e-15));

    // with no gains the split-share form is m times the per-outcome form
    auto q = p;
    q.weighting = RefWeighting::PerOutcome;
    CHECK(prospect_participation_level(100.0, p) == Approx(4 * prospect_participation_level(100.0, q)).epsilon(1e-14));
}

TEST_CASE("participation slope agrees with finite differences away from the split points")
{
    for (auto w : {RefWeighting::SplitShare, RefWeighting::PerOutcome})
        for (double eps_ref : {0.0, 0.01})
            for (double eps : {0.0031, 0.0173, 0.21}) {
                const auto p = pt(1.95, 0.75, 10, eps_ref, w);
                const double h = 1e-7 * eps;
                const double fd =
                    (prospect_participation_level(eps + h, p) - prospect_participation_level(eps - h, p)) / (2 * h);
                CHECK(prospect_participation_slope(eps, p) == Approx(fd).epsilon(1e-5));
            }
}

TEST_CASE("participation level decreases in eps and lambda")
{
    double prev = 1e300;
    for (double eps = 1e-3; eps < 1; eps *= 1.3) {
        const double lvl = prospect_participation_level(eps, pt(2, 0.7));
        CHECK(lvl < prev);
        prev = lvl;
    }
    CHECK(prospect_participation_level(0.2, pt(3, 0.7)) < prospect_participation_level(0.2, pt(2, 0.7)));
}

TEST_CASE("nonparticipation level and cost")
{
    CHECK(prospect_nonparticipation_level(pt(2, 0.5)) == 0.0);
    CHECK(prospect_nonparticipation_level(pt(2, 0.5, 10, 0.04)) == Approx(0.2).epsilon(1e-15));
    CHECK(privacy_cost(-0.5, 3.0) == -1.5);
}

TEST_CASE("validation names the field")
{
    auto message = [](PTParamsd p) {
        try {
            p.validate();
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message(pt(0.5, 1)).find("lambda") != std::string::npos);
    CHECK(message(pt(1, 0)).find("beta") != std::string::npos);
    CHECK(message(pt(1, 1.01)).find("beta") != std::string::npos);
    CHECK(message(pt(1, 1, 0)).find("m") != std::string::npos);
    CHECK(message(pt(1, 1, 10, -0.1)).find("eps_ref") != std::string::npos);
    CHECK(message(pt(1, 1)).empty());
}

TEST_CASE("templated on the scalar type")
{
    const PTParams<long double> p{2.0L, 0.5L, 0.0L, 3, RefWeighting::SplitShare};
    const long double lvl = prospect_participation_level(0.7L, p);
    CHECK(static_cast<double>(lvl) == Approx(prospect_participation_level(0.7, pt(2, 0.5, 3))).epsilon(1e-15));
    CHECK(ref_weighting_from_string("per_outcome") == RefWeighting::PerOutcome);
    CHECK_THROWS_AS(ref_weighting_from_string("other"), std::invalid_argument);
}
