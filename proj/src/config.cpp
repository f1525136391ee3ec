#include "ptdp/config.hpp"

#include <cstdio>
#include <set>
#include <stdexcept>

#include "ptdp/experiments.hpp"

namespace ptdp {

using nlohmann::json;

namespace {

// Reads j[key] into out when present, naming the dotted path on type errors.
template <typename T>
void read(const json& j, const std::string& path, const char* key, T& out)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument(path + key + " has the wrong type");
    }
}

void reject_unknown(const json& j, const std::string& path, std::set<std::string> known)
{
    if (!j.is_object()) throw std::invalid_argument((path.empty() ? std::string("config") : path.substr(0, path.size() - 1)) + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw std::invalid_argument("unknown field " + path + k);
}

void prefixed(const std::string& prefix, const std::function<void()>& check)
{
    try {
        check();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(prefix + e.what());
    }
}

const std::set<std::string> kExperiments{"solve", "gap", "pt", "refpoint", "mismatch", "hetero", "noise-demo"};

}  // namespace

void RunConfig::validate() const
{
    prefixed("market: ", [&] {
        if (market.n_total < 1) throw std::invalid_argument("n_total must be >= 1");
        if (!(market.c > 0)) throw std::invalid_argument("c must be > 0");
        if (!(market.k > 0 && market.k <= 1)) throw std::invalid_argument("k must be in (0, 1]");
        if (!(market.l > 0)) throw std::invalid_argument("l must be > 0");
        market.dist.validate();
    });
    prefixed("pt: ", [&] { market.pt.validate(); });

    const auto& e = experiment;
    if (!kExperiments.count(e.name)) throw std::invalid_argument("experiment.name '" + e.name + "' is not recognised");
    if (e.grid_points < 100) throw std::invalid_argument("experiment.grid_points must be >= 100");
    for (long long n : e.n_values)
        if (n < 1) throw std::invalid_argument("experiment.n_values entries must be >= 1");
    for (double x : e.lambdas)
        if (!(x >= 1)) throw std::invalid_argument("experiment.lambdas entries (lambda) must be >= 1");
    for (double x : e.mismatch_lambdas)
        if (!(x >= 1)) throw std::invalid_argument("experiment.mismatch_lambdas entries (lambda) must be >= 1");
    if (!(e.mismatch_lambda >= 1)) throw std::invalid_argument("experiment.mismatch_lambda (lambda) must be >= 1");
    for (double x : e.betas)
        if (!(x > 0 && x <= 1)) throw std::invalid_argument("experiment.betas entries (beta) must be in (0, 1]");
    for (double x : e.mismatch_betas)
        if (!(x > 0 && x <= 1)) throw std::invalid_argument("experiment.mismatch_betas entries (beta) must be in (0, 1]");
    if (!(e.mismatch_beta > 0 && e.mismatch_beta <= 1)) throw std::invalid_argument("experiment.mismatch_beta (beta) must be in (0, 1]");
    if (!(e.eps_ref > 0)) throw std::invalid_argument("experiment.eps_ref must be > 0");
    hetero_param_from_string(e.which);
    for (double v : e.variances)
        if (!(v > 0)) throw std::invalid_argument("experiment.variances entries must be > 0");
    if (e.reps < 2) throw std::invalid_argument("experiment.reps must be >= 2");
    if (e.trials < 0) throw std::invalid_argument("experiment.trials must be >= 0");
    if (!(e.noise_eps > 0)) throw std::invalid_argument("experiment.noise_eps must be > 0");
}

bool RunConfig::operator==(const RunConfig& o) const
{
    return market.n_total == o.market.n_total && market.c == o.market.c && market.k == o.market.k &&
           market.l == o.market.l && market.dist == o.market.dist && market.pt == o.market.pt &&
           experiment == o.experiment && seed == o.seed && output_path == o.output_path;
}

RunConfig default_run_config(const std::string& experiment, const std::string& which)
{
    RunConfig cfg;
    cfg.experiment.name = experiment;
    cfg.experiment.which = which;
    auto& m = cfg.market;
    if (experiment == "gap") {
        m.pt.beta = 1.0;
    } else if (experiment == "pt" || experiment == "mismatch") {
        m.dist = ValuationDist::truncated_normal(1.0, 0.5, 0.25);
    } else if (experiment == "refpoint") {
        auto& e = cfg.experiment;
        e.lambdas.clear();
        e.betas.clear();
        for (int i = 0; i < 20; ++i) {
            e.lambdas.push_back(1.0 + 3.5 * i / 19.0);
            e.betas.push_back(0.05 + 0.95 * i / 19.0);
        }
    } else if (experiment == "hetero") {
        const auto param = hetero_param_from_string(which);
        m = hetero_default_market(param);
        cfg.experiment.variances = hetero_default_variances(param);
    }
    return cfg;
}

RunConfig parse_run_config(const json& j, RunConfig cfg)
{
    reject_unknown(j, "", {"seed", "output_path", "market", "pt", "experiment"});
    read(j, "", "seed", cfg.seed);
    read(j, "", "output_path", cfg.output_path);

    if (j.contains("market")) {
        const json& mj = j.at("market");
        reject_unknown(mj, "market.", {"n_total", "c", "k", "l", "valuation"});
        read(mj, "market.", "n_total", cfg.market.n_total);
        read(mj, "market.", "c", cfg.market.c);
        read(mj, "market.", "k", cfg.market.k);
        read(mj, "market.", "l", cfg.market.l);
        if (mj.contains("valuation")) {
            const json& vj = mj.at("valuation");
            reject_unknown(vj, "market.valuation.", {"kind", "w_max", "mu", "sigma"});
            auto& d = cfg.market.dist;
            std::string kind = to_string(d.kind);
            read(vj, "market.valuation.", "kind", kind);
            if (kind == "uniform") d.kind = ValuationDist::Kind::Uniform;
            else if (kind == "truncated_normal") d.kind = ValuationDist::Kind::TruncatedNormal;
            else throw std::invalid_argument("market.valuation.kind must be 'uniform' or 'truncated_normal'");
            read(vj, "market.valuation.", "w_max", d.w_max);
            read(vj, "market.valuation.", "mu", d.mu);
            read(vj, "market.valuation.", "sigma", d.sigma);
        }
    }

    if (j.contains("pt")) {
        const json& pj = j.at("pt");
        reject_unknown(pj, "pt.", {"lambda", "beta", "eps_ref", "m", "weighting"});
        auto& pt = cfg.market.pt;
        read(pj, "pt.", "lambda", pt.lambda);
        read(pj, "pt.", "beta", pt.beta);
        read(pj, "pt.", "eps_ref", pt.eps_ref);
        read(pj, "pt.", "m", pt.m);
        std::string weighting = to_string(pt.weighting);
        read(pj, "pt.", "weighting", weighting);
        pt.weighting = ref_weighting_from_string(weighting);
    }

    if (j.contains("experiment")) {
        const json& ej = j.at("experiment");
        reject_unknown(ej, "experiment.",
                       {"name", "grid_points", "n_values", "lambdas", "betas", "eps_ref", "mismatch_lambdas",
                        "mismatch_beta", "mismatch_betas", "mismatch_lambda", "which", "variances", "reps", "trials",
                        "noise_eps", "data_path"});
        auto& e = cfg.experiment;
        const std::string p = "experiment.";
        read(ej, p, "name", e.name);
        read(ej, p, "grid_points", e.grid_points);
        read(ej, p, "n_values", e.n_values);
        read(ej, p, "lambdas", e.lambdas);
        read(ej, p, "betas", e.betas);
        read(ej, p, "eps_ref", e.eps_ref);
        read(ej, p, "mismatch_lambdas", e.mismatch_lambdas);
        read(ej, p, "mismatch_beta", e.mismatch_beta);
        read(ej, p, "mismatch_betas", e.mismatch_betas);
        read(ej, p, "mismatch_lambda", e.mismatch_lambda);
        read(ej, p, "which", e.which);
        read(ej, p, "variances", e.variances);
        read(ej, p, "reps", e.reps);
        read(ej, p, "trials", e.trials);
        read(ej, p, "noise_eps", e.noise_eps);
        read(ej, p, "data_path", e.data_path);
    }
    return cfg;
}

json to_json(const RunConfig& cfg)
{
    const auto& m = cfg.market;
    const auto& e = cfg.experiment;
    return json{
        {"seed", cfg.seed},
        {"output_path", cfg.output_path},
        {"market",
         {{"n_total", m.n_total},
          {"c", m.c},
          {"k", m.k},
          {"l", m.l},
          {"valuation", {{"kind", to_string(m.dist.kind)}, {"w_max", m.dist.w_max}, {"mu", m.dist.mu}, {"sigma", m.dist.sigma}}}}},
        {"pt",
         {{"lambda", m.pt.lambda},
          {"beta", m.pt.beta},
          {"eps_ref", m.pt.eps_ref},
          {"m", m.pt.m},
          {"weighting", to_string(m.pt.weighting)}}},
        {"experiment",
         {{"name", e.name},
          {"grid_points", e.grid_points},
          {"n_values", e.n_values},
          {"lambdas", e.lambdas},
          {"betas", e.betas},
          {"eps_ref", e.eps_ref},
          {"mismatch_lambdas", e.mismatch_lambdas},
          {"mismatch_beta", e.mismatch_beta},
          {"mismatch_betas", e.mismatch_betas},
          {"mismatch_lambda", e.mismatch_lambda},
          {"which", e.which},
          {"variances", e.variances},
          {"reps", e.reps},
          {"trials", e.trials},
          {"noise_eps", e.noise_eps},
          {"data_path", e.data_path}}},
    };
}

std::string config_digest(const RunConfig& cfg)
{
    json j = to_json(cfg);
    j.erase("output_path");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace ptdp
