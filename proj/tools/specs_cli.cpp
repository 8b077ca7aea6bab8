// Command-line front end: fit a single model, evaluate rolling nowcasts, or
// run a Monte Carlo study. CSV in, JSON out; every output references a
// manifest file carrying timings (the result JSON itself is byte-stable for
// a fixed seed).

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "specs/dgp.hpp"
#include "specs/estimators.hpp"
#include "specs/metrics.hpp"
#include "specs/monte_carlo.hpp"
#include "specs/panel.hpp"
#include "specs/parallel.hpp"
#include "specs/serialize.hpp"
#include "specs/solver.hpp"
#include "specs/tuning.hpp"
#include "specs/version.hpp"

namespace {

using namespace specs;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct StageClock {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::map<std::string, double> stages;
    std::chrono::steady_clock::time_point mark = std::chrono::steady_clock::now();

    void stage(const std::string& name) {
        const auto now = std::chrono::steady_clock::now();
        stages[name] = std::chrono::duration<double>(now - mark).count();
        mark = now;
    }
    double total() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buffer;
}

Deterministics parse_det(const std::string& det) {
    if (det == "none") return Deterministics::none;
    if (det == "const") return Deterministics::constant;
    if (det == "trend") return Deterministics::constant_and_trend;
    throw CLI::ValidationError("--det must be none, const or trend");
}

const char* det_name(Deterministics det) {
    switch (det) {
        case Deterministics::none: return "none";
        case Deterministics::constant: return "const";
        case Deterministics::constant_and_trend: return "trend";
    }
    return "none";
}

void write_with_manifest(const std::string& out_path, json result, const std::string& command,
                         const std::string& config_digest, const StageClock& clock) {
    const std::string manifest_path = out_path + ".manifest.json";
    // Reference by basename: the manifest sits next to the output, and the
    // result bytes stay identical wherever the pair is written.
    const auto slash = manifest_path.find_last_of('/');
    result["manifest_file"] =
        slash == std::string::npos ? manifest_path : manifest_path.substr(slash + 1);
    result["config_digest"] = config_digest;
    result["version"] = kVersion;
    result["command"] = command;

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    out << result.dump(2) << "\n";

    json manifest;
    manifest["command"] = command;
    manifest["version"] = kVersion;
    manifest["config_digest"] = config_digest;
    manifest["started_at"] = utc_now();
    manifest["wall_clock_seconds"] = clock.total();
    json stages;
    for (const auto& [name, secs] : clock.stages) stages[name] = secs;
    manifest["stages"] = stages;
    manifest["output"] = out_path;
    std::ofstream mout(manifest_path);
    mout << manifest.dump(2) << "\n";
}

json labelled_indices(const IndexSet& set, const std::vector<std::string>& labels, Index offset) {
    json out = json::array();
    for (Index i : set) {
        const Index global = i + offset;
        out.push_back(global < static_cast<Index>(labels.size()) ? labels[global]
                                                                 : std::to_string(global));
    }
    return out;
}

// ---------------------------------------------------------------- fit ----

struct FitArgs {
    std::string csv;
    std::string target;
    std::string out = "fit.json";
    int lags = 1;
    std::string det = "trend";
    double k_delta = 2.0;
    double k_pi = 1.0;
    std::string tune = "bic";
    std::string lambda_g = "on";
    std::uint64_t seed = 1;
    int n_lambda_i = 100;
    int n_lambda_g = 10;
    double eps_ratio = 1e-2;
    double window_fraction = 2.0 / 3.0;
};

int run_fit(const FitArgs& args) {
    StageClock clock;
    const Deterministics det = parse_det(args.det);
    const TimeSeriesPanel panel = read_panel_csv(args.csv, args.target);
    clock.stage("read_csv");

    SpecsConfig config;
    config.k_level = args.k_delta;
    config.k_diff = args.k_pi;
    config.n_lambda_individual = args.n_lambda_i;
    config.n_lambda_group = args.lambda_g == "on" ? args.n_lambda_g : 1;
    config.eps_ratio = args.eps_ratio;

    const CecmDesign design = build_cecm_design(panel, args.lags, det);
    const AdaptiveWeights weights =
        compute_weights(ridge_init(design), config.k_level, config.k_diff, design.n_series);
    clock.stage("weights");

    SpecsSolution chosen;
    json selection;
    if (args.tune == "bic") {
        const PenaltyGrid grid = build_grid(design, weights, config.n_lambda_individual,
                                            config.n_lambda_group, config.eps_ratio);
        const auto path = specs_path(design, weights, grid, config.solver);
        chosen = bic_select(path, design);
        selection["method"] = "bic";
        selection["score"] = bic_score(design, chosen);
    } else if (args.tune == "tscv") {
        TscvConfig tscv;
        tscv.initial_fraction = args.window_fraction;
        const TscvResult result = tscv_select(panel, args.lags, det, config, tscv);
        chosen = specs_fit(design, weights, result.lambda_individual, result.lambda_group,
                           config.solver);
        selection["method"] = "tscv";
        selection["score"] = result.mspe;
        selection["n_splits"] = result.n_splits;
    } else {
        throw CLI::ValidationError("--tune must be bic or tscv");
    }
    clock.stage("fit");

    if (!chosen.converged) {
        std::cerr << "solver did not converge at lambda_individual=" << chosen.lambda_individual
                  << ", lambda_group=" << chosen.lambda_group
                  << " after " << chosen.iterations
                  << " iterations (kkt residual " << chosen.kkt_residual << ")\n";
        return kExitNumerical;
    }

    json result = solution_to_json(chosen, design.coef_labels);
    result["target"] = panel.labels.empty() ? "y" : panel.labels[panel.target_index];
    result["lags"] = args.lags;
    result["det"] = args.det;
    result["n_obs"] = panel.periods();
    result["seed"] = args.seed;
    result["selection"] = selection;
    result["active_level_names"] = labelled_indices(chosen.active_levels, design.coef_labels, 0);
    result["active_diff_names"] =
        labelled_indices(chosen.active_diffs, design.coef_labels, design.n_series);

    json cfg;
    cfg["csv"] = args.csv;
    cfg["target"] = args.target;
    cfg["lags"] = args.lags;
    cfg["det"] = args.det;
    cfg["k_delta"] = args.k_delta;
    cfg["k_pi"] = args.k_pi;
    cfg["tune"] = args.tune;
    cfg["lambda_g"] = args.lambda_g;
    cfg["seed"] = args.seed;
    write_with_manifest(args.out, std::move(result), "fit", digest(cfg.dump()), clock);
    return kExitOk;
}

// ------------------------------------------------------- nowcast-eval ----

struct EvalArgs {
    std::string csv;
    std::string target;
    std::string out = "eval.json";
    int lags = 1;
    std::string det = "trend";
    double k_delta = 2.0;
    double k_pi = 1.0;
    double window_fraction = 2.0 / 3.0;
    std::string scheme = "rolling";
    std::string estimators = "specs1,specs2,adl,adl-adf";
    std::string baseline = "adl";
    std::string tune = "bic";
    bool tune_once = false;
    std::uint64_t seed = 1;
    int n_lambda_i = 100;
    int n_lambda_g = 10;
    double eps_ratio = 1e-2;
};

std::vector<Estimator> parse_estimators(const std::string& list) {
    std::vector<Estimator> out;
    std::stringstream stream(list);
    std::string token;
    while (std::getline(stream, token, ',')) {
        const auto est = estimator_from_name(token);
        if (!est) throw CLI::ValidationError("unknown estimator '" + token + "'");
        if (*est == Estimator::wald || *est == Estimator::wald_ps || *est == Estimator::ols_oracle)
            throw CLI::ValidationError("estimator '" + token + "' is not available for evaluation");
        out.push_back(*est);
    }
    if (out.empty()) throw CLI::ValidationError("no estimators given");
    return out;
}

int run_eval(const EvalArgs& args) {
    StageClock clock;
    const Deterministics det = parse_det(args.det);
    const TimeSeriesPanel panel = read_panel_csv(args.csv, args.target);
    clock.stage("read_csv");

    const Index t_eff_total = panel.periods() - args.lags - 1;
    const Index window_rows =
        static_cast<Index>(std::ceil(args.window_fraction * static_cast<double>(t_eff_total)));
    const Index n_origins = t_eff_total - window_rows;
    if (n_origins < 1) {
        std::cerr << "window too small: " << t_eff_total << " usable rows, window "
                  << window_rows << "\n";
        return kExitInput;
    }
    const bool rolling = args.scheme == "rolling";
    if (!rolling && args.scheme != "expanding") {
        std::cerr << "--scheme must be rolling or expanding\n";
        return kExitInput;
    }

    SpecsConfig config;
    config.k_level = args.k_delta;
    config.k_diff = args.k_pi;
    config.n_lambda_individual = args.n_lambda_i;
    config.n_lambda_group = args.n_lambda_g;
    config.eps_ratio = args.eps_ratio;

    const std::vector<Estimator> estimators = parse_estimators(args.estimators);
    const auto baseline_est = estimator_from_name(args.baseline);
    if (!baseline_est) {
        std::cerr << "unknown baseline '" << args.baseline << "'\n";
        return kExitInput;
    }

    // Frozen penalty pairs for --tune-once, keyed per estimator.
    std::map<std::string, std::pair<double, double>> frozen;

    json origins = json::array();
    std::map<std::string, std::vector<double>> errors;
    for (const auto est : estimators) errors[estimator_name(est)] = {};

    for (Index k = 0; k < n_origins; ++k) {
        const Index raw_len = window_rows + args.lags + 1;
        const Index start = rolling ? k : 0;
        const Index len = rolling ? raw_len : raw_len + k;
        const TimeSeriesPanel extended = panel.window(start, len + 1);
        const TimeSeriesPanel window = extended.window(0, len);
        const Index target_row = start + len;
        const double actual_level = panel.values(target_row, panel.target_index);
        const double actual_diff =
            actual_level - panel.values(target_row - 1, panel.target_index);

        json origin;
        origin["origin"] = k;
        origin["row"] = target_row;
        origin["actual_level"] = actual_level;
        origin["actual_diff"] = actual_diff;
        json per_est;

        for (const auto est : estimators) {
            const std::string name = estimator_name(est);
            Nowcast nowcast;
            const bool specs_like = est == Estimator::specs1 || est == Estimator::specs2;
            if (args.tune == "tscv" && specs_like) {
                SpecsConfig est_config = config;
                est_config.n_lambda_group = est == Estimator::specs1 ? 1 : config.n_lambda_group;
                std::pair<double, double> pair;
                auto it = frozen.find(name);
                if (args.tune_once && it != frozen.end()) {
                    pair = it->second;
                } else {
                    TscvConfig tscv;
                    tscv.initial_fraction = args.window_fraction;
                    const TscvResult tuned = tscv_select(window, args.lags, det, est_config, tscv);
                    pair = {tuned.lambda_individual, tuned.lambda_group};
                    if (args.tune_once) frozen[name] = pair;
                }
                const CecmDesign design = build_cecm_design(window, args.lags, det);
                const AdaptiveWeights weights = compute_weights(
                    ridge_init(design), est_config.k_level, est_config.k_diff, design.n_series);
                const SpecsSolution fit =
                    specs_fit(design, weights, pair.first, pair.second, est_config.solver);
                nowcast = nowcast_one(design, fit, extended);
            } else {
                const FitOutcome outcome =
                    run_estimator(est, extended, args.lags, det, config);
                nowcast = outcome.nowcast;
            }
            const double error = nowcast.level - actual_level;
            errors[name].push_back(error);
            json entry;
            entry["level"] = nowcast.level;
            entry["diff"] = nowcast.diff;
            entry["error"] = error;
            per_est[name] = entry;
        }
        origin["nowcasts"] = per_est;
        origins.push_back(origin);
    }
    clock.stage("evaluate");

    const std::string baseline_name = estimator_name(*baseline_est);
    if (errors.find(baseline_name) == errors.end()) {
        std::cerr << "baseline '" << baseline_name << "' is not among the estimators\n";
        return kExitInput;
    }

    json msne, ratios, dm;
    const auto& base_errors = errors.at(baseline_name);
    double base_msne = 0.0;
    for (double e : base_errors) base_msne += e * e;
    base_msne /= static_cast<double>(base_errors.size());
    for (const auto& [name, errs] : errors) {
        double m = 0.0;
        for (double e : errs) m += e * e;
        m /= static_cast<double>(errs.size());
        msne[name] = m;
        ratios[name] = base_msne > 0.0 ? m / base_msne : 1.0;
        Vector a = Eigen::Map<const Vector>(errs.data(), static_cast<Index>(errs.size()));
        Vector b = Eigen::Map<const Vector>(base_errors.data(),
                                            static_cast<Index>(base_errors.size()));
        const DmResult test = dm_test(a, b);
        json entry;
        entry["statistic"] = test.statistic;
        entry["p_value"] = test.p_value;
        dm[name] = entry;
    }

    json result;
    result["n_origins"] = n_origins;
    result["window_rows"] = window_rows;
    result["scheme"] = args.scheme;
    result["baseline"] = baseline_name;
    result["tune"] = args.tune;
    result["seed"] = args.seed;
    result["origins"] = origins;
    result["msne"] = msne;
    result["msne_ratio_vs_baseline"] = ratios;
    result["dm_vs_baseline"] = dm;

    json cfg;
    cfg["csv"] = args.csv;
    cfg["window_fraction"] = args.window_fraction;
    cfg["scheme"] = args.scheme;
    cfg["estimators"] = args.estimators;
    cfg["baseline"] = args.baseline;
    cfg["lags"] = args.lags;
    cfg["det"] = args.det;
    cfg["tune"] = args.tune;
    cfg["tune_once"] = args.tune_once;
    cfg["seed"] = args.seed;
    write_with_manifest(args.out, std::move(result), "nowcast_eval", digest(cfg.dump()), clock);
    return kExitOk;
}

// ------------------------------------------------------------ simulate ----

struct SimArgs {
    std::string config_path;
    std::string out = "simulate.json";
    int reps = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 1;
};

std::map<std::string, std::string> read_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = value;
    }
    return kv;
}

int run_simulate(const SimArgs& args) {
    StageClock clock;
    const auto kv = read_flat_config(args.config_path);

    McConfig config;
    auto get = [&](const std::string& key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    if (const auto* family = get("family")) {
        const auto parsed = family_from_name(*family);
        if (!parsed) {
            std::cerr << "invalid family '" << *family << "'; valid families:";
            for (const auto& name : family_names()) std::cerr << " " << name;
            std::cerr << "\n";
            return kExitInput;
        }
        config.dgp.family = *parsed;
    } else {
        std::cerr << "config must set family=<name>\n";
        return kExitInput;
    }
    if (const auto* v = get("a")) config.dgp.adjustment = std::stod(*v);
    if (const auto* v = get("adjustment")) config.dgp.adjustment = std::stod(*v);
    if (const auto* v = get("T")) config.dgp.T = std::stoi(*v);
    if (const auto* v = get("persistence"))
        config.dgp.persistence = *v == "high" ? DgpSpec::Persistence::high
                                              : DgpSpec::Persistence::low;
    if (const auto* v = get("factor_ar")) config.dgp.factor_ar = std::stod(*v);
    if (const auto* v = get("factor_dynamics")) config.dgp.factor_dynamics = *v == "1" || *v == "true";
    if (const auto* v = get("burn_in")) config.dgp.burn_in = std::stoi(*v);
    if (const auto* v = get("lags")) config.lags = std::stoi(*v);
    if (const auto* v = get("det")) config.det = parse_det(*v);
    if (const auto* v = get("k_delta")) config.fit.k_level = std::stod(*v);
    if (const auto* v = get("k_pi")) config.fit.k_diff = std::stod(*v);
    if (const auto* v = get("n_lambda_i")) config.fit.n_lambda_individual = std::stoi(*v);
    if (const auto* v = get("n_lambda_g")) config.fit.n_lambda_group = std::stoi(*v);
    if (const auto* v = get("eps_ratio")) config.fit.eps_ratio = std::stod(*v);
    if (const auto* v = get("reps")) config.n_reps = std::stoi(*v);
    if (const auto* v = get("seed")) config.base_seed = std::stoull(*v);
    if (const auto* v = get("estimators")) {
        config.estimators.clear();
        std::stringstream stream(*v);
        std::string token;
        while (std::getline(stream, token, ',')) {
            const auto est = estimator_from_name(token);
            if (!est) {
                std::cerr << "invalid estimator '" << token << "'\n";
                return kExitInput;
            }
            config.estimators.push_back(*est);
        }
    }
    if (args.reps > 0) config.n_reps = args.reps;
    if (args.seed_set) config.base_seed = args.seed;
    config.jobs = effective_jobs(args.jobs);

    try {
        config.dgp.validate();
    } catch (const std::exception& e) {
        std::cerr << "invalid experiment configuration: " << e.what() << "\n";
        return kExitInput;
    }
    clock.stage("configure");

    const MetricsReport report = run_monte_carlo(config);
    clock.stage("replications");

    json result = report_to_json(report);
    result["T"] = config.dgp.T;
    result["adjustment"] = config.dgp.adjustment;
    result["lags"] = config.lags;
    result["det"] = det_name(config.det);
    if (config.dgp.family == DgpFamily::factor_model)
        result["notes"] = "factor loadings U(0.5,1.5) and idiosyncratic AR U(0,0.4) are "
                          "implementation defaults";

    json cfg;
    for (const auto& [key, value] : kv) cfg[key] = value;
    cfg["reps"] = config.n_reps;
    cfg["seed"] = config.base_seed;

    // Human-readable summary.
    std::cout << "family " << report.family << ", " << report.n_reps << " replications, seed "
              << report.base_seed << "\n";
    std::cout << "estimator       power     pcs      pics     msne     rmsne (vs "
              << report.rmsne_baseline << ")\n";
    for (const auto& [name, agg] : report.per_estimator) {
        auto cell = [](const std::optional<double>& v) {
            if (!v) return std::string("      - ");
            char buffer[16];
            std::snprintf(buffer, sizeof buffer, "%8.4f", *v);
            return std::string(buffer);
        };
        std::cout << name;
        for (std::size_t pad = name.size(); pad < 15; ++pad) std::cout << ' ';
        std::cout << cell(agg.pseudo_power) << " " << cell(agg.pcs) << " " << cell(agg.pics)
                  << " " << cell(agg.msne) << " " << cell(agg.rmsne) << "\n";
    }
    if (report.n_failures > 0)
        std::cout << report.n_failures << " replications failed and were excluded\n";

    write_with_manifest(args.out, std::move(result), "simulate", digest(cfg.dump()), clock);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Penalized single-equation error-correction modelling"};
    app.require_subcommand(1);
    app.set_config("--config");

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Fit the penalized model to a CSV panel");
    fit->add_option("csv", fit_args.csv, "input CSV (header row, one column per series)")
        ->required();
    fit->add_option("--target", fit_args.target, "target series name or 0-based index");
    fit->add_option("--lags", fit_args.lags, "lagged difference order p")->check(CLI::NonNegativeNumber);
    fit->add_option("--det", fit_args.det, "deterministics: none|const|trend")
        ->check(CLI::IsMember({"none", "const", "trend"}));
    fit->add_option("--k-delta", fit_args.k_delta, "weight exponent for level coefficients");
    fit->add_option("--k-pi", fit_args.k_pi, "weight exponent for difference coefficients");
    fit->add_option("--tune", fit_args.tune, "penalty selection: bic|tscv")
        ->check(CLI::IsMember({"bic", "tscv"}));
    fit->add_option("--lambda-g", fit_args.lambda_g, "group penalty: on|off")
        ->check(CLI::IsMember({"on", "off"}));
    fit->add_option("--seed", fit_args.seed, "seed recorded in the output");
    fit->add_option("--out", fit_args.out, "output JSON path");
    fit->add_option("--n-lambda-i", fit_args.n_lambda_i, "individual grid size");
    fit->add_option("--n-lambda-g", fit_args.n_lambda_g, "group grid size");
    fit->add_option("--eps-ratio", fit_args.eps_ratio, "grid floor as a fraction of lambda_max");
    fit->add_option("--window-fraction", fit_args.window_fraction,
                    "initial window fraction for tscv tuning");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("nowcast-eval", "Rolling pseudo out-of-sample nowcasts");
    eval->add_option("csv", eval_args.csv, "input CSV")->required();
    eval->add_option("--target", eval_args.target, "target series name or 0-based index");
    eval->add_option("--lags", eval_args.lags, "lagged difference order p");
    eval->add_option("--det", eval_args.det, "deterministics: none|const|trend")
        ->check(CLI::IsMember({"none", "const", "trend"}));
    eval->add_option("--window-fraction", eval_args.window_fraction,
                     "initial window as a fraction of the usable sample");
    eval->add_option("--scheme", eval_args.scheme, "rolling|expanding")
        ->check(CLI::IsMember({"rolling", "expanding"}));
    eval->add_option("--estimators", eval_args.estimators,
                     "comma list: specs1,specs2,adl,adl-adf");
    eval->add_option("--baseline", eval_args.baseline, "ratio/DM baseline estimator");
    eval->add_option("--tune", eval_args.tune, "bic|tscv (tscv applies to the specs estimators)")
        ->check(CLI::IsMember({"bic", "tscv"}));
    eval->add_flag("--tune-once", eval_args.tune_once,
                   "freeze the penalties chosen in the first window");
    eval->add_option("--k-delta", eval_args.k_delta, "weight exponent for level coefficients");
    eval->add_option("--k-pi", eval_args.k_pi, "weight exponent for difference coefficients");
    eval->add_option("--seed", eval_args.seed, "seed recorded in the output");
    eval->add_option("--out", eval_args.out, "output JSON path");
    eval->add_option("--n-lambda-i", eval_args.n_lambda_i, "individual grid size");
    eval->add_option("--n-lambda-g", eval_args.n_lambda_g, "group grid size");
    eval->add_option("--eps-ratio", eval_args.eps_ratio, "grid floor fraction");

    SimArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Seeded Monte Carlo study");
    sim->add_option("config", sim_args.config_path, "experiment configuration file")->required();
    sim->add_option("--reps", sim_args.reps, "replication count override");
    auto* seed_opt = sim->add_option("--seed", sim_args.seed, "base seed override");
    sim->add_option("--jobs", sim_args.jobs, "worker threads (capped by SPECS_NUM_THREADS)");
    sim->add_option("--out", sim_args.out, "output JSON path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) return run_fit(fit_args);
        if (eval->parsed()) return run_eval(eval_args);
        if (sim->parsed()) {
            sim_args.seed_set = seed_opt->count() > 0;
            return run_simulate(sim_args);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitInput;
}
