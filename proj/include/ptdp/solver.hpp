#pragma once

#include <functional>
#include <vector>

#include "ptdp/collector.hpp"
#include "ptdp/population.hpp"

namespace ptdp {

enum class SolveMethod { ClosedForm, PolyRoot, ExhaustiveExact };

const char* to_string(SolveMethod method);

struct SolveResult {
    double eps_star = 0.0;
    double utility = 0.0;
    double participants = 0.0;
    SolveMethod method = SolveMethod::PolyRoot;
    double residual = 0.0;  // |f(eps_star)| for root methods, final bracket width for searches
};

inline constexpr int kDefaultGridPoints = 10000;

/// `points` log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int points);

/// Bisection on a bracket with f(lo) > 0 >= f(hi); stops once hi - lo < tol.
double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi, double tol);

/// Golden-section maximization of f on [lo, hi] until the bracket is
/// narrower than rel_width times its midpoint. Returns the final bracket.
std::pair<double, double> golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                             double rel_width);

/// Unique root of the beta = 1 quartic inside (0, W_max / M).
/// Throws std::domain_error outside that regime and std::logic_error if the
/// root is not unique.
SolveResult solve_closed_form(const MarketConfig& cfg);

/// First downward sign change of poly_f (or poly_f_pos when eps_ref > 0) on a
/// log scan, refined by bisection. Throws std::runtime_error when none exists.
SolveResult solve_poly_root(const MarketConfig& cfg, int grid_points = kDefaultGridPoints);

/// Maximizer of the exact expected-count utility: log grid plus golden section.
SolveResult solve_exhaustive(const MarketConfig& cfg, int grid_points = kDefaultGridPoints);

/// Largest eps at which the individual still participates; 0 if none.
double participation_cutoff(const Individual& ind, double c);

/// Exact optimum for a finite roster using realized counts. Utility rises in
/// eps between cutoffs, so the maximizer is one of the individual cutoffs.
/// Uses cfg.k, cfg.l and cfg.c; the roster supplies valuations and PT params.
SolveResult solve_roster(const Roster& roster, const MarketConfig& cfg);

}  // namespace ptdp
