#include <doctest.h>

#include <atomic>
#include <stdexcept>

#include "ptdp/experiments.hpp"

using namespace ptdp;
using doctest::Approx;

TEST_CASE("u-shape detector")
{
    CHECK(detect_u_shape({3, 2, 1, 2, 3}, {0.1, 0.1, 0.1, 0.1, 0.1}).found);
    CHECK(detect_u_shape({3, 2, 1, 2, 3}, {0.1, 0.1, 0.1, 0.1, 0.1}).argmin == 2);
    CHECK_FALSE(detect_u_shape({1, 2, 3}, {0.1, 0.1, 0.1}).found);
    CHECK_FALSE(detect_u_shape({3, 2, 1}, {0.1, 0.1, 0.1}).found);
    // rise smaller than the neighbour's error bar
    CHECK_FALSE(detect_u_shape({3, 1.05, 1, 3}, {0.01, 0.1, 0.01, 0.01}).found);
    CHECK_FALSE(detect_u_shape({1, 0}, {0, 0}).found);
}

TEST_CASE("monotone helpers are strict")
{
    CHECK(strictly_decreasing({3, 2, 1}));
    CHECK_FALSE(strictly_decreasing({3, 3, 1}));
    CHECK(strictly_increasing({1, 2}));
    CHECK_FALSE(strictly_increasing({1, 0}));
}

TEST_CASE("parallel_for visits every index once and rethrows")
{
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(100, 3, [](std::size_t i) { if (i == 57) throw std::runtime_error("x"); }),
                    std::runtime_error);
}

TEST_CASE("mismatch loss is zero for expected-utility individuals and positive otherwise")
{
    MarketConfig cfg;
    cfg.dist = ValuationDist::truncated_normal(1.0, 0.5, 0.25);
    cfg.pt.lambda = 1.0;
    cfg.pt.beta = 1.0;
    CHECK(mismatch_loss(cfg) == 0.0);
    cfg.pt.lambda = 3.0;
    const double loss = mismatch_loss(cfg);
    CHECK(loss > 0.0);
    CHECK(loss <= 1.0);
}

TEST_CASE("gap sweep rows and csv shape")
{
    MarketConfig cfg;
    cfg.pt.beta = 1.0;
    const auto out = approximation_gap_sweep(cfg, {4000, 10000}, 2);
    REQUIRE(out.records.size() == 2);
    const auto table = out.to_csv();
    CHECK(table.rows() == 2);
    CHECK(table.header().front() == "n_total");
    const std::string text = table.render();
    CHECK(text.find("\r") == std::string::npos);
    CHECK(text.back() == '\n');
    CHECK(out.all_pass());

    cfg.pt.beta = 0.5;
    CHECK_THROWS_AS(approximation_gap_sweep(cfg, {4000}), std::invalid_argument);
}

TEST_CASE("sweeps are identical across worker counts")
{
    MarketConfig cfg;
    const auto a = pt_parameter_sweep(cfg, {1.0, 2.0, 3.0}, {0.5, 1.0}, 1).to_csv().render();
    const auto b = pt_parameter_sweep(cfg, {1.0, 2.0, 3.0}, {0.5, 1.0}, 3).to_csv().render();
    CHECK(a == b);

    const auto base = hetero_default_market(HeteroParam::Beta);
    const std::vector<double> vars{0.01, 0.05};
    const auto h1 = hetero_variance_sweep(base, HeteroParam::Beta, vars, 4, 9, 1).to_csv().render();
    const auto h2 = hetero_variance_sweep(base, HeteroParam::Beta, vars, 4, 9, 4).to_csv().render();
    CHECK(h1 == h2);
}

TEST_CASE("tiny heterogeneity matches the homogeneous roster optimum")
{
    auto base = hetero_default_market(HeteroParam::Lambda);
    base.n_total = 4000;
    const auto out = hetero_variance_sweep(base, HeteroParam::Lambda, {1e-10}, 2, 5, 1);
    const auto roster = sample_roster(base.dist, FixedPT{base.pt}, 4000, derive_seed(5, 0));
    const double homogeneous = solve_roster(roster, base).eps_star;
    const double mean_eps = out.records.front().eps_star;
    CHECK(mean_eps == Approx(homogeneous).epsilon(2e-2));
}

TEST_CASE("hetero parameter names")
{
    CHECK(hetero_param_from_string("beta") == HeteroParam::Beta);
    CHECK(std::string(to_string(HeteroParam::Lambda)) == "lambda");
    CHECK_THROWS_AS(hetero_param_from_string("gamma"), std::invalid_argument);
    CHECK(hetero_default_variances(HeteroParam::Lambda).size() == 8);
    CHECK(hetero_default_variances(HeteroParam::Beta).back() == Approx(0.1));
}
