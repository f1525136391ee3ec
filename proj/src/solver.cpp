#include "ptdp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ptdp/quartic.hpp"

namespace ptdp {

const char* to_string(SolveMethod method)
{
    switch (method) {
    case SolveMethod::ClosedForm: return "closed_form";
    case SolveMethod::PolyRoot: return "poly_root";
    case SolveMethod::ExhaustiveExact: return "exhaustive";
    }
    return "unknown";
}

std::vector<double> log_grid(double lo, double hi, int points)
{
    if (!(lo > 0 && hi > lo)) throw std::invalid_argument("log_grid: need 0 < lo < hi");
    if (points < 2) throw std::invalid_argument("log_grid: need at least 2 points");
    const Eigen::ArrayXd expo = Eigen::ArrayXd::LinSpaced(points, std::log(lo), std::log(hi));
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = std::exp(expo(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi, double tol)
{
    while (hi - lo >= tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                             double rel_width)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - inv_phi * (hi - lo);
    double b = lo + inv_phi * (hi - lo);
    double fa = f(a), fb = f(b);
    while (hi - lo > rel_width * 0.5 * (lo + hi)) {
        if (fa >= fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        }
        if (!(a < b)) break;
    }
    return {lo, hi};
}

namespace {

void require_uniform(const MarketConfig& cfg, const char* who)
{
    if (cfg.dist.kind != ValuationDist::Kind::Uniform) throw std::domain_error(std::string(who) + ": requires uniform valuations");
}

SolveResult finish(const MarketConfig& cfg, double eps, SolveMethod method, double residual)
{
    const auto u = collector_utility(eps, cfg);
    return SolveResult{eps, u.utility, u.participants, method, residual};
}

}  // namespace

SolveResult solve_closed_form(const MarketConfig& cfg)
{
    cfg.validate();
    require_uniform(cfg, "solve_closed_form");
    if (cfg.pt.eps_ref != 0.0) throw std::domain_error("solve_closed_form: requires eps_ref == 0");
    if (cfg.pt.beta != 1.0) throw std::domain_error("solve_closed_form: requires beta == 1");

    const double upper = feasible_upper(cfg);
    std::vector<double> inside;
    for (double r : real_roots(quartic_coefficients(cfg)))
        if (r > 0 && r < upper) inside.push_back(r);
    if (inside.size() != 1)
        throw std::logic_error("solve_closed_form: expected one root in the feasible set, found " + std::to_string(inside.size()));
    return finish(cfg, inside.front(), SolveMethod::ClosedForm, std::abs(poly_f(inside.front(), cfg)));
}

SolveResult solve_poly_root(const MarketConfig& cfg, int grid_points)
{
    cfg.validate();
    require_uniform(cfg, "solve_poly_root");
    if (grid_points < 2) throw std::invalid_argument("grid_points must be >= 2");

    const bool zero_ref = cfg.pt.eps_ref == 0.0;
    const std::function<double(double)> f = [&](double eps) { return zero_ref ? poly_f(eps, cfg) : poly_f_pos(eps, cfg); };
    const double upper = feasible_upper(cfg);
    const auto grid = log_grid(1e-12 * upper, upper, grid_points);

    double prev = f(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = f(grid[i]);
        if (prev > 0 && cur <= 0) {
            const double eps = bisect_decreasing(f, grid[i - 1], grid[i], 1e-12 * upper);
            return finish(cfg, eps, SolveMethod::PolyRoot, std::abs(f(eps)));
        }
        prev = cur;
    }
    throw std::runtime_error("solve_poly_root: no sign change in the feasible set");
}

SolveResult solve_exhaustive(const MarketConfig& cfg, int grid_points)
{
    cfg.validate();
    if (grid_points < 100) throw std::invalid_argument("grid_points must be >= 100");

    const double upper = feasible_upper(cfg);
    const auto grid = log_grid(1e-6 * upper, upper, grid_points);
    auto utility = [&](double eps) { return collector_utility(eps, cfg).utility; };

    std::size_t best = 0;
    double best_u = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double u = utility(grid[i]);
        if (u > best_u) {
            best_u = u;
            best = i;
        }
    }
    if (!std::isfinite(best_u)) throw std::runtime_error("solve_exhaustive: every grid point is infeasible");

    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    const auto [a, b] = golden_section_max(utility, lo, hi, 1e-9);
    double eps = 0.5 * (a + b);
    if (utility(eps) < best_u) eps = grid[best];
    return finish(cfg, eps, SolveMethod::ExhaustiveExact, b - a);
}

double participation_cutoff(const Individual& ind, double c)
{
    const auto& pt = ind.pt;
    if (pt.eps_ref == 0.0) {
        if (!(ind.w > 0)) return 0.0;
        return std::pow(ind.w / (c * pt.lambda * mean_power_weight(pt.beta, pt.m)), 1.0 / pt.beta);
    }

    constexpr double kTiny = 1e-300;
    if (!participate(ind, kTiny, c)) return 0.0;
    double lo = kTiny;
    double hi = std::max(pt.eps_ref, 1e-12);
    while (participate(ind, hi, c)) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) return std::numeric_limits<double>::infinity();
    }
    while (hi - lo > 1e-15 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (participate(ind, mid, c) ? lo : hi) = mid;
    }
    return lo;
}

SolveResult solve_roster(const Roster& roster, const MarketConfig& cfg)
{
    if (roster.empty()) throw std::invalid_argument("solve_roster: roster must be non-empty");
    cfg.validate();

    std::vector<double> cutoffs;
    cutoffs.reserve(roster.size());
    for (const auto& ind : roster.individuals) {
        const double e = participation_cutoff(ind, cfg.c);
        if (e > 0 && std::isfinite(e)) cutoffs.push_back(e);
    }
    if (cutoffs.empty()) throw std::runtime_error("solve_roster: nobody participates at any eps");
    std::sort(cutoffs.begin(), cutoffs.end(), std::greater<>());

    SolveResult best{0.0, -std::numeric_limits<double>::infinity(), 0.0, SolveMethod::ExhaustiveExact, 0.0};
    for (std::size_t j = 0; j < cutoffs.size();) {
        // everyone with an equal cutoff joins together
        std::size_t end = j + 1;
        while (end < cutoffs.size() && cutoffs[end] == cutoffs[j]) ++end;
        const double eps = cutoffs[j];
        const double n = static_cast<double>(end);
        const double u = benefit(n, cfg.k, cfg.l) - accuracy_penalty(eps, n);
        if (u > best.utility || (u == best.utility && eps < best.eps_star)) {
            best.eps_star = eps;
            best.utility = u;
            best.participants = n;
        }
        j = end;
    }
    return best;
}

}  // namespace ptdp
