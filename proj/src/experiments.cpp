#include "ptdp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace ptdp {

namespace {

std::string fmt(double x) { return format_real(x); }

std::string join(const std::vector<double>& v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + "]";
}

double lookup(const NamedValues& values, const std::string& key)
{
    for (const auto& [k, v] : values)
        if (k == key) return v;
    throw std::logic_error("missing column " + key);
}

double extra(const SweepRecord& r, const std::string& key) { return lookup(r.extras, key); }

MarketConfig with_pt(MarketConfig cfg, double lambda, double beta)
{
    cfg.pt.lambda = lambda;
    cfg.pt.beta = beta;
    return cfg;
}

}  // namespace

bool SweepOutput::all_pass() const
{
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

CsvTable SweepOutput::to_csv() const
{
    std::vector<std::string> header;
    if (!records.empty()) {
        for (const auto& [k, v] : records.front().inputs) header.push_back(k);
        for (const char* k : {"eps_star", "eps_star_approx", "utility", "participants", "seed"}) header.emplace_back(k);
        for (const auto& [k, v] : records.front().extras) header.push_back(k);
    }
    CsvTable table(header);
    for (const auto& r : records) {
        std::vector<std::string> row;
        for (const auto& [k, v] : r.inputs) row.push_back(fmt(v));
        row.push_back(fmt(r.eps_star));
        row.push_back(fmt(r.eps_star_approx));
        row.push_back(fmt(r.utility));
        row.push_back(fmt(r.participants));
        row.push_back(std::to_string(r.seed));
        for (const auto& [k, v] : r.extras) row.push_back(fmt(v));
        table.add_row(std::move(row));
    }
    return table;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body)
{
    const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

NamedValues market_inputs(const MarketConfig& cfg)
{
    return {
        {"n_total", static_cast<double>(cfg.n_total)},
        {"c", cfg.c},
        {"k", cfg.k},
        {"l", cfg.l},
        {"w_max", cfg.dist.w_max},
        {"truncated_normal", cfg.dist.kind == ValuationDist::Kind::TruncatedNormal ? 1.0 : 0.0},
        {"w_mu", cfg.dist.mu},
        {"w_sigma", cfg.dist.sigma},
        {"lambda", cfg.pt.lambda},
        {"beta", cfg.pt.beta},
        {"eps_ref", cfg.pt.eps_ref},
        {"m", static_cast<double>(cfg.pt.m)},
        {"per_outcome_weighting", cfg.pt.weighting == RefWeighting::PerOutcome ? 1.0 : 0.0},
    };
}

bool strictly_decreasing(const std::vector<double>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

bool strictly_increasing(const std::vector<double>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

SweepOutput approximation_gap_sweep(const MarketConfig& cfg, const std::vector<long long>& n_values, int jobs)
{
    if (cfg.pt.beta != 1.0) throw std::invalid_argument("beta must be 1 for the approximation gap sweep");
    if (n_values.empty()) throw std::invalid_argument("n_values must be non-empty");

    SweepOutput out{"gap", std::vector<SweepRecord>(n_values.size()), {}};
    parallel_for(n_values.size(), jobs, [&](std::size_t i) {
        MarketConfig cell = cfg;
        cell.n_total = n_values[i];
        const auto approx = solve_closed_form(cell);
        const auto exact = solve_exhaustive(cell);
        auto& r = out.records[i];
        r.inputs = market_inputs(cell);
        r.eps_star = exact.eps_star;
        r.eps_star_approx = approx.eps_star;
        r.utility = exact.utility;
        r.participants = exact.participants;
        r.extras = {{"utility_approx", approx.utility},
                    {"relative_gap", std::abs(approx.eps_star - exact.eps_star) / exact.eps_star}};
    });

    std::vector<double> gaps, approx, exact;
    for (const auto& r : out.records) {
        gaps.push_back(extra(r, "relative_gap"));
        approx.push_back(r.eps_star_approx);
        exact.push_back(r.eps_star);
    }
    out.assertions = {
        {"gap_positive", std::all_of(gaps.begin(), gaps.end(), [](double g) { return g > 0; }), "gaps " + join(gaps)},
        {"gap_decreasing_in_n", strictly_decreasing(gaps), "gaps " + join(gaps)},
        {"approx_decreasing_in_n", strictly_decreasing(approx), "eps_approx " + join(approx)},
        {"exact_decreasing_in_n", strictly_decreasing(exact), "eps_exact " + join(exact)},
    };
    return out;
}

SweepOutput pt_parameter_sweep(const MarketConfig& cfg, const std::vector<double>& lambdas,
                               const std::vector<double>& betas, int jobs)
{
    if (cfg.pt.eps_ref != 0.0) throw std::invalid_argument("eps_ref must be 0 for the PT parameter sweep");
    if (lambdas.empty() || betas.empty()) throw std::invalid_argument("lambdas and betas must be non-empty");

    const std::size_t nl = lambdas.size(), nb = betas.size();
    SweepOutput out{"pt", std::vector<SweepRecord>(nl * nb), {}};
    parallel_for(nl * nb, jobs, [&](std::size_t idx) {
        const MarketConfig cell = with_pt(cfg, lambdas[idx / nb], betas[idx % nb]);
        const auto exact = solve_exhaustive(cell);
        auto& r = out.records[idx];
        r.inputs = market_inputs(cell);
        r.eps_star = exact.eps_star;
        r.utility = exact.utility;
        r.participants = exact.participants;
    });

    auto eps = [&](std::size_t i, std::size_t j) { return out.records[i * nb + j].eps_star; };
    bool dec_lambda = true, inc_beta = true;
    std::string bad_lambda, bad_beta;
    for (std::size_t j = 0; j < nb; ++j) {
        std::vector<double> slice;
        for (std::size_t i = 0; i < nl; ++i) slice.push_back(eps(i, j));
        if (!strictly_decreasing(slice)) {
            dec_lambda = false;
            bad_lambda += " beta=" + fmt(betas[j]);
        }
    }
    for (std::size_t i = 0; i < nl; ++i) {
        std::vector<double> slice;
        for (std::size_t j = 0; j < nb; ++j) slice.push_back(eps(i, j));
        if (!strictly_increasing(slice)) {
            inc_beta = false;
            bad_beta += " lambda=" + fmt(lambdas[i]);
        }
    }
    out.assertions.push_back({"decreasing_in_lambda", dec_lambda,
                              dec_lambda ? "every beta slice decreases" : "violations at" + bad_lambda});
    out.assertions.push_back({"increasing_in_beta", inc_beta,
                              inc_beta ? "every lambda slice increases" : "violations at" + bad_beta});

    const auto li = std::find(lambdas.begin(), lambdas.end(), 1.0);
    const auto bi = std::find(betas.begin(), betas.end(), 1.0);
    if (li != lambdas.end() && bi != betas.end()) {
        const double corner = eps(static_cast<std::size_t>(li - lambdas.begin()), static_cast<std::size_t>(bi - betas.begin()));
        double best = 0;
        for (const auto& r : out.records) best = std::max(best, r.eps_star);
        out.assertions.push_back({"eut_cell_is_maximum", corner == best, "eps(1,1)=" + fmt(corner) + " max=" + fmt(best)});
    }
    return out;
}

SweepOutput reference_point_sweep(const MarketConfig& cfg, double eps_ref, const std::vector<double>& lambdas,
                                  const std::vector<double>& betas, int jobs)
{
    if (!(eps_ref > 0)) throw std::invalid_argument("eps_ref must be > 0 for the reference point sweep");
    if (lambdas.empty() || betas.empty()) throw std::invalid_argument("lambdas and betas must be non-empty");
    constexpr double kBand = 1e-9;

    const std::size_t nl = lambdas.size(), nb = betas.size();
    SweepOutput out{"refpoint", std::vector<SweepRecord>(nl * nb), {}};
    parallel_for(nl * nb, jobs, [&](std::size_t idx) {
        MarketConfig zero = with_pt(cfg, lambdas[idx / nb], betas[idx % nb]);
        zero.pt.eps_ref = 0.0;
        MarketConfig pos = zero;
        pos.pt.eps_ref = eps_ref;
        const auto r0 = solve_poly_root(zero);
        const auto rp = solve_poly_root(pos);
        const double f_at = poly_f_pos(r0.eps_star, pos);
        const double predicted = std::abs(f_at) < kBand ? 0.0 : (f_at > 0 ? 1.0 : -1.0);
        const double diff = rp.eps_star - r0.eps_star;
        auto& r = out.records[idx];
        r.inputs = market_inputs(pos);
        r.eps_star_approx = rp.eps_star;
        r.utility = rp.utility;
        r.participants = rp.participants;
        r.extras = {{"eps_star_approx_zero_ref", r0.eps_star},
                    {"difference", diff},
                    {"f_pos_at_zero_ref_root", f_at},
                    {"predicted_sign", predicted},
                    {"observed_sign", diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0)}};
    });

    std::size_t checked = 0, agree = 0, positive = 0, negative = 0;
    std::string mismatches;
    for (const auto& r : out.records) {
        const double lambda = lookup(r.inputs, "lambda"), beta = lookup(r.inputs, "beta");
        const double pred = extra(r, "predicted_sign"), obs = extra(r, "observed_sign");
        if (pred != 0.0) {
            ++checked;
            if (pred == obs) ++agree;
            else mismatches += " (" + fmt(lambda) + "," + fmt(beta) + ")";
        }
        if (obs > 0 && lambda >= 2.0 && beta <= 0.5) ++positive;
        if (obs < 0 && (lambda <= 1.5 || beta > 0.5)) ++negative;
    }
    out.assertions = {
        {"trichotomy_prediction", agree == checked,
         std::to_string(agree) + "/" + std::to_string(checked) + " cells agree" + (mismatches.empty() ? "" : ";" + mismatches)},
        {"positive_region_nonempty", positive > 0, std::to_string(positive) + " positive cells with lambda>=2, beta<=0.5"},
        {"negative_region_nonempty", negative > 0, std::to_string(negative) + " negative cells with lambda<=1.5 or beta>0.5"},
    };
    return out;
}

double mismatch_loss(const MarketConfig& cfg)
{
    if (cfg.pt.eps_ref != 0.0) throw std::invalid_argument("eps_ref must be 0 for the mismatch loss");
    const MarketConfig eut = with_pt(cfg, 1.0, 1.0);
    const auto designed = solve_exhaustive(eut);
    const auto best = solve_exhaustive(cfg);
    const double realized = collector_utility(designed.eps_star, cfg).utility;
    if (!std::isfinite(realized)) return 1.0;
    if (!(best.utility > 0)) throw std::domain_error("mismatch_loss: optimal utility must be positive");
    return std::clamp((best.utility - realized) / best.utility, 0.0, 1.0);
}

SweepOutput mismatch_sweep(const MarketConfig& cfg, const std::vector<double>& lambdas, double beta_for_lambdas,
                           const std::vector<double>& betas, double lambda_for_betas, int jobs)
{
    std::vector<std::pair<double, double>> cells{{1.0, 1.0}};
    for (double l : lambdas) cells.emplace_back(l, beta_for_lambdas);
    for (double b : betas) cells.emplace_back(lambda_for_betas, b);

    SweepOutput out{"mismatch", std::vector<SweepRecord>(cells.size()), {}};
    parallel_for(cells.size(), jobs, [&](std::size_t i) {
        const MarketConfig cell = with_pt(cfg, cells[i].first, cells[i].second);
        const auto eut = solve_exhaustive(with_pt(cfg, 1.0, 1.0));
        const auto best = solve_exhaustive(cell);
        auto& r = out.records[i];
        r.inputs = market_inputs(cell);
        r.inputs.emplace_back("axis", i == 0 ? 0.0 : (i <= lambdas.size() ? 1.0 : 2.0));
        r.eps_star = best.eps_star;
        r.utility = best.utility;
        r.participants = best.participants;
        r.extras = {{"eps_star_eut", eut.eps_star},
                    {"utility_mismatched", collector_utility(eut.eps_star, cell).utility},
                    {"loss", mismatch_loss(cell)}};
    });

    std::vector<double> along_lambda, along_beta;
    std::vector<std::pair<double, double>> beta_cells;
    for (std::size_t i = 1; i < cells.size(); ++i) {
        if (i <= lambdas.size()) along_lambda.push_back(extra(out.records[i], "loss"));
        else beta_cells.emplace_back(cells[i].second, extra(out.records[i], "loss"));
    }
    // order by decreasing beta so "moving away from 1" reads left to right
    std::sort(beta_cells.begin(), beta_cells.end(), [](auto a, auto b) { return a.first > b.first; });
    for (const auto& [b, loss] : beta_cells) along_beta.push_back(loss);

    auto loss_at = [&](double lambda, double beta) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (cells[i] == std::make_pair(lambda, beta)) return extra(out.records[i], "loss");
        return std::numeric_limits<double>::quiet_NaN();
    };
    const double eut_loss = extra(out.records[0], "loss");
    const double hi = loss_at(4.5, beta_for_lambdas), lo = loss_at(1.5, beta_for_lambdas);

    out.assertions = {
        {"zero_loss_at_eut", eut_loss == 0.0, "loss(1,1)=" + fmt(eut_loss)},
        {"increasing_in_lambda", strictly_increasing(along_lambda), "losses " + join(along_lambda)},
        {"increasing_as_beta_decreases", strictly_increasing(along_beta), "losses " + join(along_beta)},
    };
    if (!std::isnan(hi) && !std::isnan(lo))
        out.assertions.push_back({"high_lambda_exceeds_low_lambda", hi > lo, "loss(4.5)=" + fmt(hi) + " loss(1.5)=" + fmt(lo)});
    return out;
}

const char* to_string(HeteroParam which) { return which == HeteroParam::Lambda ? "lambda" : "beta"; }

HeteroParam hetero_param_from_string(const std::string& s)
{
    if (s == "lambda") return HeteroParam::Lambda;
    if (s == "beta") return HeteroParam::Beta;
    throw std::invalid_argument("which must be 'lambda' or 'beta', got '" + s + "'");
}

MarketConfig hetero_default_market(HeteroParam which)
{
    MarketConfig cfg;
    cfg.n_total = 10000;
    cfg.k = 0.8;
    cfg.l = 1.0;
    cfg.c = which == HeteroParam::Lambda ? 20.0 : 5.0;
    cfg.dist = ValuationDist::truncated_normal(1.0, 0.5, 0.02);
    cfg.pt = PTParamsd{1.95, 0.75, 0.0, 10, RefWeighting::SplitShare};
    return cfg;
}

std::vector<double> hetero_default_variances(HeteroParam which)
{
    const double lo = which == HeteroParam::Lambda ? 0.05 : 0.005;
    const double hi = which == HeteroParam::Lambda ? 3.0 : 0.1;
    std::vector<double> v(8);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / 7.0;
    return v;
}

UShape detect_u_shape(const std::vector<double>& means, const std::vector<double>& std_errors)
{
    UShape u;
    if (means.size() < 3 || means.size() != std_errors.size()) {
        u.detail = "need at least 3 points";
        return u;
    }
    u.argmin = static_cast<std::size_t>(std::min_element(means.begin(), means.end()) - means.begin());
    if (u.argmin == 0 || u.argmin + 1 == means.size()) {
        u.detail = "argmin at endpoint " + std::to_string(u.argmin);
        return u;
    }
    const std::size_t i = u.argmin;
    const double left = means[i - 1] - means[i], right = means[i + 1] - means[i];
    const double se_left = std::max(std_errors[i], std_errors[i - 1]);
    const double se_right = std::max(std_errors[i], std_errors[i + 1]);
    u.found = left > se_left && right > se_right;
    u.detail = "argmin " + std::to_string(i) + ", rises " + fmt(left) + " (se " + fmt(se_left) + ") and " + fmt(right) +
               " (se " + fmt(se_right) + ")";
    return u;
}

SweepOutput hetero_variance_sweep(const MarketConfig& base, HeteroParam which, const std::vector<double>& variances,
                                  int reps, std::uint64_t seed, int jobs)
{
    base.validate();
    if (reps < 2) throw std::invalid_argument("reps must be >= 2");
    if (variances.empty()) throw std::invalid_argument("variances must be non-empty");
    for (double v : variances)
        if (!(v > 0)) throw std::invalid_argument("variances must be > 0");

    const double mean = which == HeteroParam::Lambda ? base.pt.lambda : base.pt.beta;
    const std::size_t nr = static_cast<std::size_t>(reps);
    const std::size_t cells = variances.size() * nr;
    std::vector<double> eps(cells), threshold(cells), participants(cells), utility(cells);

    parallel_for(cells, jobs, [&](std::size_t idx) {
        const GammaSpec law = gamma_from_mean_var(mean, variances[idx / nr]);
        GammaHeteroPT model{base.pt, std::nullopt, std::nullopt};
        (which == HeteroParam::Lambda ? model.lambda : model.beta) = law;
        const Roster roster = sample_roster(base.dist, model, static_cast<std::size_t>(base.n_total), derive_seed(seed, idx));
        const auto sol = solve_roster(roster, base);
        double max_lambda = 0;
        for (const auto& ind : roster.individuals)
            if (participation_cutoff(ind, base.c) >= sol.eps_star) max_lambda = std::max(max_lambda, ind.pt.lambda);
        eps[idx] = sol.eps_star;
        threshold[idx] = max_lambda;
        participants[idx] = sol.participants;
        utility[idx] = sol.utility;
    });

    SweepOutput out{"hetero", {}, {}};
    std::vector<double> means, errors, thresholds;
    for (std::size_t v = 0; v < variances.size(); ++v) {
        double s = 0, s2 = 0, th = 0, part = 0, ut = 0;
        for (std::size_t r = 0; r < nr; ++r) {
            const std::size_t idx = v * nr + r;
            s += eps[idx];
            th += threshold[idx];
            part += participants[idx];
            ut += utility[idx];
        }
        const double mu = s / double(nr);
        for (std::size_t r = 0; r < nr; ++r) s2 += (eps[v * nr + r] - mu) * (eps[v * nr + r] - mu);
        const double se = std::sqrt(s2 / double(nr - 1) / double(nr));

        SweepRecord rec;
        rec.inputs = market_inputs(base);
        rec.inputs.emplace_back("hetero_lambda", which == HeteroParam::Lambda ? 1.0 : 0.0);
        rec.inputs.emplace_back("mean", mean);
        rec.inputs.emplace_back("variance", variances[v]);
        rec.inputs.emplace_back("variance_index", double(v));
        rec.inputs.emplace_back("reps", double(nr));
        rec.eps_star = mu;
        rec.utility = ut / double(nr);
        rec.participants = part / double(nr);
        rec.seed = seed;
        rec.extras = {{"eps_star_stderr", se}, {"threshold_lambda", th / double(nr)}};
        out.records.push_back(std::move(rec));
        means.push_back(mu);
        errors.push_back(se);
        thresholds.push_back(th / double(nr));
    }

    const auto u = detect_u_shape(means, errors);
    out.assertions.push_back({"u_shape", u.found, u.detail + "; means " + join(means)});
    if (which == HeteroParam::Lambda) {
        const double mid = thresholds[u.argmin];
        out.assertions.push_back({"threshold_peaks_at_argmin", mid > thresholds.front() && mid > thresholds.back(),
                                  "thresholds " + join(thresholds)});
    }
    return out;
}

}  // namespace ptdp
