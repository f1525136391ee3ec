#pragma once

// Prospect-theoretic valuation of differential-privacy levels.
//
// A privacy level eps is valued against a reference eps_ref: outcomes below
// the reference are gains, outcomes above it are losses scaled by lambda.
// The continuous outcome range [0, eps] is discretized into m equally
// weighted outcomes i*eps/m.

#include <cmath>
#include <stdexcept>
#include <string>

namespace ptdp {

/// How the gain and loss sums are weighted when eps_ref > 0.
///
/// SplitShare: (t/m) * gains - (1 - t/m) * lambda * losses
/// PerOutcome: (1/m) * (gains - lambda * losses), the same 1/m weight as the
///             zero-reference level.
enum class RefWeighting { SplitShare, PerOutcome };

inline const char* to_string(RefWeighting w)
{
    return w == RefWeighting::SplitShare ? "split_share" : "per_outcome";
}

inline RefWeighting ref_weighting_from_string(const std::string& s)
{
    if (s == "split_share") return RefWeighting::SplitShare;
    if (s == "per_outcome") return RefWeighting::PerOutcome;
    throw std::invalid_argument("weighting must be 'split_share' or 'per_outcome', got '" + s + "'");
}

template <typename Scalar = double>
struct PTParams {
    Scalar lambda = Scalar(1);   // loss aversion, >= 1
    Scalar beta = Scalar(1);     // risk parameter, in (0, 1]
    Scalar eps_ref = Scalar(0);  // reference privacy level, >= 0
    int m = 10;                  // discretization granularity, >= 1
    RefWeighting weighting = RefWeighting::SplitShare;

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const
    {
        if (!(lambda >= Scalar(1))) throw std::invalid_argument("lambda must be >= 1");
        if (!(beta > Scalar(0) && beta <= Scalar(1))) throw std::invalid_argument("beta must be in (0, 1]");
        if (!(eps_ref >= Scalar(0))) throw std::invalid_argument("eps_ref must be >= 0");
        if (m < 1) throw std::invalid_argument("m must be >= 1");
    }

    bool operator==(const PTParams&) const = default;
};

using PTParamsd = PTParams<double>;

/// Subjective value of realized privacy level eps.
template <typename Scalar>
Scalar valuation(Scalar eps, const PTParams<Scalar>& pt)
{
    using std::pow;
    if (eps < Scalar(0)) throw std::domain_error("valuation: eps must be >= 0");
    if (eps <= pt.eps_ref) return pow(pt.eps_ref - eps, pt.beta);
    return -pt.lambda * pow(eps - pt.eps_ref, pt.beta);
}

namespace detail {

// Number of discrete outcomes i*eps/m (i = 1..t) at or below the reference.
template <typename Scalar>
int gain_count(Scalar eps, const PTParams<Scalar>& pt)
{
    using std::floor;
    const Scalar raw = floor(Scalar(pt.m) * pt.eps_ref / eps);
    if (!(raw > Scalar(0))) return 0;
    if (raw >= Scalar(pt.m)) return pt.m;
    return static_cast<int>(raw);
}

// Gain and loss sums for the positive-reference level, together with their
// derivatives in eps at fixed t.
template <typename Scalar>
struct RefSums {
    int t;
    Scalar gains, losses, d_gains, d_losses;
};

template <typename Scalar>
RefSums<Scalar> ref_sums(Scalar eps, const PTParams<Scalar>& pt)
{
    using std::pow;
    RefSums<Scalar> s{gain_count(eps, pt), Scalar(0), Scalar(0), Scalar(0), Scalar(0)};
    const Scalar inv_m = Scalar(1) / Scalar(pt.m);
    for (int i = 1; i <= pt.m; ++i) {
        const Scalar x = Scalar(i) * eps * inv_m;
        const Scalar di = Scalar(i) * inv_m;
        if (i <= s.t) {
            const Scalar gap = pt.eps_ref - x;
            if (gap > Scalar(0)) {
                s.gains += pow(gap, pt.beta);
                s.d_gains -= pt.beta * pow(gap, pt.beta - Scalar(1)) * di;
            }
        } else {
            const Scalar gap = x - pt.eps_ref;
            if (gap > Scalar(0)) {
                s.losses += pow(gap, pt.beta);
                s.d_losses += pt.beta * pow(gap, pt.beta - Scalar(1)) * di;
            }
        }
    }
    return s;
}

}  // namespace detail

/// Sum over i of (i/m)^beta scaled by 1/m: the zero-reference level is
/// -lambda * this * eps^beta.
template <typename Scalar>
Scalar mean_power_weight(Scalar beta, int m)
{
    using std::pow;
    Scalar sum(0);
    for (int i = 1; i <= m; ++i) sum += pow(Scalar(i), beta);
    return pow(Scalar(1) / Scalar(m), Scalar(1) + beta) * sum;
}

/// Prospect privacy level of participating under an eps-DP mechanism.
/// Strictly decreasing in eps.
template <typename Scalar>
Scalar prospect_participation_level(Scalar eps, const PTParams<Scalar>& pt)
{
    if (!(eps > Scalar(0))) throw std::domain_error("prospect_participation_level: eps must be > 0");
    if (pt.eps_ref == Scalar(0)) {
        Scalar sum(0);
        for (int i = 1; i <= pt.m; ++i) sum += valuation(Scalar(i) * eps / Scalar(pt.m), pt);
        return sum / Scalar(pt.m);
    }
    const auto s = detail::ref_sums(eps, pt);
    if (pt.weighting == RefWeighting::PerOutcome) return (s.gains - pt.lambda * s.losses) / Scalar(pt.m);
    const Scalar share = Scalar(s.t) / Scalar(pt.m);
    return share * s.gains - (Scalar(1) - share) * pt.lambda * s.losses;
}

/// d/d eps of prospect_participation_level, taken within the current gain/loss
/// split (the split index is piecewise constant in eps).
template <typename Scalar>
Scalar prospect_participation_slope(Scalar eps, const PTParams<Scalar>& pt)
{
    using std::pow;
    if (!(eps > Scalar(0))) throw std::domain_error("prospect_participation_slope: eps must be > 0");
    if (pt.eps_ref == Scalar(0))
        return -pt.lambda * mean_power_weight(pt.beta, pt.m) * pt.beta * pow(eps, pt.beta - Scalar(1));
    const auto s = detail::ref_sums(eps, pt);
    if (pt.weighting == RefWeighting::PerOutcome) return (s.d_gains - pt.lambda * s.d_losses) / Scalar(pt.m);
    const Scalar share = Scalar(s.t) / Scalar(pt.m);
    return share * s.d_gains - (Scalar(1) - share) * pt.lambda * s.d_losses;
}

/// Value of staying out: the reference level itself, eps_ref^beta.
template <typename Scalar>
Scalar prospect_nonparticipation_level(const PTParams<Scalar>& pt)
{
    using std::pow;
    if (pt.eps_ref == Scalar(0)) return Scalar(0);
    return pow(pt.eps_ref, pt.beta);
}

template <typename Scalar>
Scalar privacy_cost(Scalar level, Scalar c)
{
    return c * level;
}

/// M with c * prospect_participation_level(eps) == -M * eps^beta (zero reference only).
template <typename Scalar>
Scalar cost_slope_M(const PTParams<Scalar>& pt, Scalar c)
{
    if (pt.eps_ref != Scalar(0)) throw std::domain_error("cost_slope_M: requires eps_ref == 0");
    return c * pt.lambda * mean_power_weight(pt.beta, pt.m);
}

}  // namespace ptdp
