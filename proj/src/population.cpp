#include "ptdp/population.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "ptdp/csv.hpp"

namespace ptdp {

namespace bm = boost::math;

ValuationDist ValuationDist::uniform(double w_max)
{
    ValuationDist d;
    d.kind = Kind::Uniform;
    d.w_max = w_max;
    d.mu = w_max / 2;
    d.sigma = w_max / 4;
    d.validate();
    return d;
}

ValuationDist ValuationDist::truncated_normal(double w_max, double mu, double sigma)
{
    ValuationDist d{Kind::TruncatedNormal, w_max, mu, sigma};
    d.validate();
    return d;
}

void ValuationDist::validate() const
{
    if (!(w_max > 0) || !std::isfinite(w_max)) throw std::invalid_argument("w_max must be > 0");
    if (kind == Kind::TruncatedNormal) {
        if (!(sigma > 0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be > 0");
        if (!std::isfinite(mu)) throw std::invalid_argument("mu must be finite");
    }
}

const char* to_string(ValuationDist::Kind kind)
{
    return kind == ValuationDist::Kind::Uniform ? "uniform" : "truncated_normal";
}

namespace {

// Mass of N(mu, sigma) on [lo, hi], computed on whichever side keeps the
// tails accurate.
struct NormalWindow {
    bm::normal_distribution<double> law;
    bool upper_side;  // work with survival functions instead of CDFs
    double at_lo, at_hi;

    NormalWindow(double mu, double sigma, double lo, double hi) : law(mu, sigma), upper_side(lo > mu)
    {
        if (upper_side) {
            at_lo = bm::cdf(bm::complement(law, lo));
            at_hi = bm::cdf(bm::complement(law, hi));
        } else {
            at_lo = bm::cdf(law, lo);
            at_hi = bm::cdf(law, hi);
        }
    }

    double mass() const { return upper_side ? at_lo - at_hi : at_hi - at_lo; }

    // Mass on [x, hi].
    double mass_above(double x) const
    {
        return upper_side ? bm::cdf(bm::complement(law, x)) - at_hi : at_hi - bm::cdf(law, x);
    }

    double quantile(double u) const
    {
        if (upper_side) return bm::quantile(bm::complement(law, at_lo - u * (at_lo - at_hi)));
        return bm::quantile(law, at_lo + u * (at_hi - at_lo));
    }
};

}  // namespace

double ValuationDist::survival(double w) const
{
    if (w <= 0) return 1.0;
    if (w >= w_max) return 0.0;
    if (kind == Kind::Uniform) return (w_max - w) / w_max;
    const NormalWindow win(mu, sigma, 0.0, w_max);
    return std::clamp(win.mass_above(w) / win.mass(), 0.0, 1.0);
}

double ValuationDist::density(double w) const
{
    if (w < 0 || w > w_max) return 0.0;
    if (kind == Kind::Uniform) return 1.0 / w_max;
    const NormalWindow win(mu, sigma, 0.0, w_max);
    return bm::pdf(win.law, w) / win.mass();
}

double ValuationDist::sample(std::mt19937_64& rng) const
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    if (kind == Kind::Uniform) return u * w_max;
    const NormalWindow win(mu, sigma, 0.0, w_max);
    return std::clamp(win.quantile(u), 0.0, w_max);
}

void GammaSpec::validate() const
{
    if (!(shape > 0) || !std::isfinite(shape)) throw std::invalid_argument("gamma shape must be > 0");
    if (!(scale > 0) || !std::isfinite(scale)) throw std::invalid_argument("gamma scale must be > 0");
}

GammaSpec gamma_from_mean_var(double mean, double variance)
{
    if (!(mean > 0)) throw std::domain_error("gamma_from_mean_var: mean must be > 0");
    if (!(variance > 0)) throw std::domain_error("gamma_from_mean_var: variance must be > 0");
    return GammaSpec{mean * mean / variance, variance / mean};
}

double participation_threshold(const PTParamsd& pt, double eps, double c)
{
    return privacy_cost(prospect_nonparticipation_level(pt), c)
         - privacy_cost(prospect_participation_level(eps, pt), c);
}

bool participate(const Individual& ind, double eps, double c)
{
    if (!(eps > 0)) throw std::domain_error("participate: eps must be > 0");
    return ind.w + privacy_cost(prospect_participation_level(eps, ind.pt), c)
        >= privacy_cost(prospect_nonparticipation_level(ind.pt), c);
}

double participation_count(double eps, const ValuationDist& dist, const PTParamsd& pt, long long n_total, double c)
{
    if (!(eps > 0)) throw std::domain_error("participation_count: eps must be > 0");
    return static_cast<double>(n_total) * dist.survival(participation_threshold(pt, eps, c));
}

long long count_roster(const Roster& roster, double eps, double c)
{
    return std::count_if(roster.individuals.begin(), roster.individuals.end(),
                         [&](const Individual& ind) { return participate(ind, eps, c); });
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index)
{
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double sample_gamma_in(std::mt19937_64& rng, const GammaSpec& spec, double lo, double hi)
{
    spec.validate();
    std::gamma_distribution<double> law(spec.shape, spec.scale);
    constexpr int kMaxTries = 1'000'000;
    for (int i = 0; i < kMaxTries; ++i) {
        const double x = law(rng);
        if (x >= lo && x <= hi && x > 0) return x;
    }
    throw std::runtime_error("sample_gamma_in: admissible region has negligible mass");
}

Roster sample_roster(const ValuationDist& dist, const PTModel& model, std::size_t n, std::uint64_t seed)
{
    if (n < 1) throw std::invalid_argument("sample_roster: N must be >= 1");
    dist.validate();
    Roster roster;
    roster.seed = seed;
    roster.individuals.reserve(n);
    std::mt19937_64 rng(seed);

    if (const auto* fixed = std::get_if<FixedPT>(&model)) {
        fixed->pt.validate();
        for (std::size_t i = 0; i < n; ++i) roster.individuals.push_back({dist.sample(rng), fixed->pt});
        return roster;
    }

    const auto& hetero = std::get<GammaHeteroPT>(model);
    hetero.base.validate();
    if (hetero.lambda) hetero.lambda->validate();
    if (hetero.beta) hetero.beta->validate();
    for (std::size_t i = 0; i < n; ++i) {
        Individual ind{dist.sample(rng), hetero.base};
        if (hetero.lambda)
            ind.pt.lambda = sample_gamma_in(rng, *hetero.lambda, 1.0, std::numeric_limits<double>::infinity());
        if (hetero.beta) ind.pt.beta = sample_gamma_in(rng, *hetero.beta, 0.0, 1.0);
        roster.individuals.push_back(ind);
    }
    return roster;
}

ChiSquaredResult chi_squared_gof(const std::vector<double>& samples, const GammaSpec& spec, int bins)
{
    if (samples.empty()) throw std::invalid_argument("chi_squared_gof: samples must be non-empty");
    if (bins < 2) throw std::invalid_argument("chi_squared_gof: bins must be >= 2");
    spec.validate();
    const int dof = bins - 1 - 2;
    if (dof < 1) throw std::domain_error("chi_squared_gof: need bins >= 4 for a positive dof");

    const bm::gamma_distribution<double> law(spec.shape, spec.scale);
    std::vector<double> edges(static_cast<std::size_t>(bins - 1));
    for (int b = 1; b < bins; ++b) edges[static_cast<std::size_t>(b - 1)] = bm::quantile(law, double(b) / bins);

    std::vector<long long> observed(static_cast<std::size_t>(bins), 0);
    for (double x : samples) {
        const auto bin = std::upper_bound(edges.begin(), edges.end(), x) - edges.begin();
        ++observed[static_cast<std::size_t>(bin)];
    }

    const double expected = static_cast<double>(samples.size()) / bins;
    ChiSquaredResult r;
    r.dof = dof;
    r.degenerate = expected < 5.0;
    for (long long o : observed) {
        const double d = static_cast<double>(o) - expected;
        r.statistic += d * d / expected;
    }
    r.p_value = bm::cdf(bm::complement(bm::chi_squared_distribution<double>(dof), r.statistic));
    return r;
}

void write_roster_csv(std::ostream& os, const Roster& roster)
{
    os << "w,lambda,beta,eps_ref\n";
    for (const auto& ind : roster.individuals) {
        os << format_real(ind.w) << ',' << format_real(ind.pt.lambda) << ',' << format_real(ind.pt.beta) << ','
           << format_real(ind.pt.eps_ref) << '\n';
    }
}

Roster read_roster_csv(std::istream& is, const PTParamsd& defaults)
{
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("roster csv: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "w,lambda,beta,eps_ref") throw std::invalid_argument("roster csv: header must be w,lambda,beta,eps_ref");

    Roster roster;
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 4) throw std::invalid_argument("roster csv: row " + std::to_string(row) + " needs 4 columns");
        Individual ind{parse_real(cells[0]), defaults};
        ind.pt.lambda = parse_real(cells[1]);
        ind.pt.beta = parse_real(cells[2]);
        ind.pt.eps_ref = parse_real(cells[3]);
        try {
            ind.pt.validate();
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("roster csv: row " + std::to_string(row) + ": " + e.what());
        }
        if (!(ind.w >= 0)) throw std::invalid_argument("roster csv: row " + std::to_string(row) + ": w must be >= 0");
        roster.individuals.push_back(ind);
    }
    return roster;
}

}  // namespace ptdp
