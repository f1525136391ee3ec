// pt-privacy: solve a market, run an experiment sweep, or demo the Laplace mechanism.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptdp/collector.hpp"
#include "ptdp/config.hpp"
#include "ptdp/csv.hpp"
#include "ptdp/experiments.hpp"
#include "ptdp/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ptdp;

namespace {

enum Exit { kOk = 0, kConfigError = 2, kSolverError = 3, kAssertionFailed = 4 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    std::optional<std::string> out;
    bool dump_config = false;
    std::optional<std::string> which;
    std::optional<int> reps;
    std::optional<int> grid_points;
    std::optional<long long> trials;
    std::optional<std::string> data;
    std::optional<double> eps;
    std::optional<double> lambda, beta, eps_ref;
    std::optional<long long> n_total;
};

json load_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

RunConfig build_config(const std::string& experiment, const Flags& f)
{
    json file = json::object();
    if (!f.config_path.empty()) file = load_json(f.config_path);

    std::string which = "lambda";
    if (f.which) which = *f.which;
    else if (file.is_object() && file.contains("experiment") && file["experiment"].is_object() &&
             file["experiment"].contains("which") && file["experiment"]["which"].is_string())
        which = file["experiment"]["which"].get<std::string>();

    try {
        RunConfig cfg = parse_run_config(file, default_run_config(experiment, which));
        cfg.experiment.name = experiment;
        cfg.experiment.which = which;
        if (f.seed) cfg.seed = *f.seed;
        if (f.out) cfg.output_path = *f.out;
        if (f.reps) cfg.experiment.reps = *f.reps;
        if (f.grid_points) cfg.experiment.grid_points = *f.grid_points;
        if (f.trials) cfg.experiment.trials = *f.trials;
        if (f.data) cfg.experiment.data_path = *f.data;
        if (f.eps) cfg.experiment.noise_eps = *f.eps;
        if (f.lambda) cfg.market.pt.lambda = *f.lambda;
        if (f.beta) cfg.market.pt.beta = *f.beta;
        if (f.eps_ref) cfg.market.pt.eps_ref = *f.eps_ref;
        if (f.n_total) cfg.market.n_total = *f.n_total;
        cfg.validate();
        return cfg;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

json result_json(const SolveResult& r)
{
    return json{{"eps_star", r.eps_star},
                {"utility", r.utility},
                {"participants", r.participants},
                {"method", to_string(r.method)},
                {"residual", r.residual}};
}

int cmd_solve(const RunConfig& cfg)
{
    const auto& m = cfg.market;
    const bool uniform = m.dist.kind == ValuationDist::Kind::Uniform;
    json out{{"config_digest", config_digest(cfg)}};

    std::optional<SolveResult> closed, poly;
    if (uniform && m.pt.beta == 1.0 && m.pt.eps_ref == 0.0) closed = solve_closed_form(m);
    if (uniform) poly = solve_poly_root(m, cfg.experiment.grid_points);
    const SolveResult exact = solve_exhaustive(m, cfg.experiment.grid_points);

    out["closed_form"] = closed ? result_json(*closed) : json("not applicable");
    out["poly_root"] = poly ? result_json(*poly) : json("not applicable");
    out["exhaustive"] = result_json(exact);

    auto gap = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    json gaps = json::object();
    if (closed && poly) gaps["closed_form_vs_poly_root"] = gap(closed->eps_star, poly->eps_star);
    if (closed) gaps["closed_form_vs_exhaustive"] = gap(closed->eps_star, exact.eps_star);
    if (poly) gaps["poly_root_vs_exhaustive"] = gap(poly->eps_star, exact.eps_star);
    out["relative_gaps"] = gaps;
    std::cout << out.dump(2) << '\n';
    return kOk;
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
    os << text;
}

SweepOutput run_sweep(const RunConfig& cfg, int jobs)
{
    const auto& e = cfg.experiment;
    const auto& m = cfg.market;
    if (e.name == "gap") return approximation_gap_sweep(m, e.n_values, jobs);
    if (e.name == "pt") return pt_parameter_sweep(m, e.lambdas, e.betas, jobs);
    if (e.name == "refpoint") return reference_point_sweep(m, e.eps_ref, e.lambdas, e.betas, jobs);
    if (e.name == "mismatch")
        return mismatch_sweep(m, e.mismatch_lambdas, e.mismatch_beta, e.mismatch_betas, e.mismatch_lambda, jobs);
    const auto which = hetero_param_from_string(e.which);
    const auto variances = e.variances.empty() ? hetero_default_variances(which) : e.variances;
    return hetero_variance_sweep(m, which, variances, e.reps, cfg.seed, jobs);
}

int cmd_sweep(const RunConfig& cfg, int jobs)
{
    SweepOutput result;
    try {
        result = run_sweep(cfg, jobs);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const fs::path dir(cfg.output_path);
    fs::create_directories(dir);
    std::string stem = cfg.experiment.name;
    if (stem == "hetero") stem += "_" + cfg.experiment.which;
    const fs::path csv_path = dir / (stem + ".csv");
    const fs::path summary_path = dir / (stem + "_summary.json");
    write_file(csv_path, result.to_csv().render());

    json assertions = json::array();
    for (const auto& a : result.assertions) assertions.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
    const json summary{{"config_digest", config_digest(cfg)},
                       {"assertions", assertions},
                       {"artifacts", {csv_path.generic_string(), summary_path.generic_string()}}};
    write_file(summary_path, summary.dump(2) + "\n");

    for (const auto& a : result.assertions)
        std::cout << (a.pass ? "PASS " : "FAIL ") << result.experiment << '.' << a.name << ": " << a.detail << '\n';
    return result.all_pass() ? kOk : kAssertionFailed;
}

std::vector<double> read_data_column(const std::string& path)
{
    if (path.empty()) throw ConfigError("data: a data CSV is required (--data)");
    std::ifstream in(path);
    if (!in) throw ConfigError("data: cannot open '" + path + "'");
    std::vector<double> values;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cell = split_csv_line(line).front();
        double x;
        try {
            x = parse_real(cell);
        } catch (const std::invalid_argument&) {
            if (row == 1) continue;  // header
            throw ConfigError("data: row " + std::to_string(row) + " is not a number");
        }
        if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("data: row " + std::to_string(row) + " is outside [0, 1]");
        values.push_back(x);
    }
    if (values.empty()) throw ConfigError("data: no values in '" + path + "'");
    return values;
}

int cmd_noise_demo(const RunConfig& cfg)
{
    const auto data = read_data_column(cfg.experiment.data_path);
    const double eps = cfg.experiment.noise_eps;
    const auto demo = laplace_noise_demo(data, eps, cfg.seed);
    json out{{"config_digest", config_digest(cfg)},
             {"n", data.size()},
             {"eps", eps},
             {"true_mean", demo.true_mean},
             {"noisy_mean", demo.noisy_mean},
             {"scale", demo.scale}};

    if (cfg.experiment.trials > 0) {
        std::mt19937_64 rng(derive_seed(cfg.seed, 1));
        const long long trials = cfg.experiment.trials;
        double mean = 0, m2 = 0;
        for (long long t = 0; t < trials; ++t) {
            const double x = sample_laplace(rng, demo.scale);
            const double delta = x - mean;
            mean += delta / double(t + 1);
            m2 += delta * (x - mean);
        }
        const double n = double(data.size());
        const double predicted = 2.0 / (n * n * eps * eps);
        const double variance = trials > 1 ? m2 / double(trials - 1) : 0.0;
        out["trials"] = {{"count", trials},
                         {"empirical_mean", mean},
                         {"empirical_variance", variance},
                         {"predicted_variance", predicted},
                         {"variance_ratio", variance / predicted}};
    }
    std::cout << out.dump(2) << '\n';
    return kOk;
}

template <typename T>
void add_optional(CLI::App& app, const std::string& name, std::optional<T>& target, const std::string& help)
{
    app.add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Optimal differential-privacy level under prospect-theoretic participation"};
    app.require_subcommand(1);
    app.fallthrough();

    Flags f;
    app.add_option("--config", f.config_path, "JSON run configuration");
    add_optional(app, "--seed", f.seed, "base seed (u64)");
    app.add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
    add_optional(app, "--out", f.out, "output directory for sweeps");
    app.add_flag("--dump-config", f.dump_config, "print the effective configuration and exit");
    add_optional(app, "--reps", f.reps, "Monte Carlo repetitions (hetero)");
    add_optional(app, "--grid-points", f.grid_points, "search grid size");
    add_optional(app, "--lambda", f.lambda, "loss aversion");
    add_optional(app, "--beta", f.beta, "risk parameter");
    add_optional(app, "--eps-ref", f.eps_ref, "reference privacy level");
    add_optional(app, "--n-total", f.n_total, "population size N");

    auto* solve = app.add_subcommand("solve", "optimal eps by all three methods, as JSON");

    auto* sweep = app.add_subcommand("sweep", "run an experiment sweep, writing CSV and a JSON summary");
    std::string sweep_name;
    sweep->add_option("experiment", sweep_name, "gap | pt | refpoint | mismatch | hetero")
        ->required()
        ->check(CLI::IsMember({"gap", "pt", "refpoint", "mismatch", "hetero"}));
    add_optional(*sweep, "--which", f.which, "hetero parameter: lambda | beta");

    auto* noise = app.add_subcommand("noise-demo", "Laplace mechanism on a CSV column of values in [0, 1]");
    add_optional(*noise, "--data", f.data, "CSV with one column of values");
    add_optional(*noise, "--eps", f.eps, "privacy level");
    add_optional(*noise, "--trials", f.trials, "noise draws for the variance check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    const std::string experiment = solve->parsed() ? "solve" : (noise->parsed() ? "noise-demo" : sweep_name);
    try {
        const RunConfig cfg = build_config(experiment, f);
        if (f.dump_config) {
            std::cout << to_json(cfg).dump(2) << '\n';
            return kOk;
        }
        if (experiment == "solve") return cmd_solve(cfg);
        if (experiment == "noise-demo") return cmd_noise_demo(cfg);
        return cmd_sweep(cfg, f.jobs);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolverError;
    }
}
