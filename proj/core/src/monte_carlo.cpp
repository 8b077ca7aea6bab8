#include "specs/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "specs/parallel.hpp"

namespace specs {

namespace {

struct RepRecord {
    bool ok = false;
    std::string error;
    // keyed by estimator order in the config
    std::vector<SpecsSolution> solutions;
    std::vector<double> nowcast_errors;  // level errors; NaN when not applicable
    std::vector<int> wald_rejections;    // -1 when not applicable
    double oracle_error = std::numeric_limits<double>::quiet_NaN();
};

SpecsSolution fit_with_bic(const CecmDesign& design, const SpecsConfig& config, bool group) {
    const AdaptiveWeights weights =
        compute_weights(ridge_init(design), config.k_level, config.k_diff, design.n_series);
    const PenaltyGrid grid = build_grid(design, weights, config.n_lambda_individual,
                                        group ? config.n_lambda_group : 1, config.eps_ratio);
    const std::vector<SpecsSolution> path = specs_path(design, weights, grid, config.solver);
    return bic_select(path, design);
}

SpecsSolution fit_adl(const CecmDesign& design, const SpecsConfig& config) {
    const AdaptiveWeights weights = adl_weights(design, config.k_diff);
    const PenaltyGrid grid = build_grid(design, weights, config.n_lambda_individual, 1,
                                        config.eps_ratio);
    return adl_fit(design, weights, grid, config.solver);
}

}  // namespace

const char* estimator_name(Estimator e) {
    switch (e) {
        case Estimator::specs1: return "specs1";
        case Estimator::specs2: return "specs2";
        case Estimator::adl: return "adl";
        case Estimator::adl_adf: return "adl_adf";
        case Estimator::ols_oracle: return "ols_oracle";
        case Estimator::wald: return "wald";
        case Estimator::wald_ps: return "wald_ps";
    }
    return "unknown";
}

std::optional<Estimator> estimator_from_name(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(Estimator::wald_ps); ++i)
        if (name == estimator_name(static_cast<Estimator>(i)))
            return static_cast<Estimator>(i);
    if (name == "adl-adf") return Estimator::adl_adf;
    if (name == "wald-ps") return Estimator::wald_ps;
    return std::nullopt;
}

FitOutcome run_estimator(Estimator estimator, const TimeSeriesPanel& panel, int lags,
                         Deterministics det, const SpecsConfig& config) {
    const Index fit_rows = panel.periods() - 1;
    const TimeSeriesPanel window = panel.window(0, fit_rows);
    const CecmDesign design = build_cecm_design(window, lags, det);

    FitOutcome outcome;
    switch (estimator) {
        case Estimator::specs1:
            outcome.solution = fit_with_bic(design, config, false);
            break;
        case Estimator::specs2:
            outcome.solution = fit_with_bic(design, config, true);
            break;
        case Estimator::adl:
            outcome.solution = fit_adl(design, config);
            break;
        case Estimator::adl_adf: {
            const AdlAdfSolution fit = adl_adf_fit(window, lags, det, config);
            outcome.solution = fit.solution;
            outcome.nowcast.level = adl_adf_nowcast(fit, panel, lags, det);
            outcome.nowcast.diff =
                outcome.nowcast.level - panel.values(fit_rows - 1, panel.target_index);
            return outcome;
        }
        default:
            throw std::invalid_argument("estimator has no standalone runner");
    }
    outcome.nowcast = nowcast_one(design, outcome.solution, panel);
    return outcome;
}

MetricsReport run_monte_carlo(const McConfig& config) {
    if (config.n_reps < 1) throw std::invalid_argument("need at least one replication");
    config.dgp.validate();

    const std::size_t n_est = config.estimators.size();
    std::vector<RepRecord> records(config.n_reps);
    parallel_for(config.jobs, config.n_reps, [&](int rep) {
        RepRecord& record = records[rep];
        record.solutions.resize(n_est);
        record.nowcast_errors.assign(n_est, std::numeric_limits<double>::quiet_NaN());
        record.wald_rejections.assign(n_est, -1);
        try {
            DgpSpec spec = config.dgp;
            spec.extra_obs = 1;
            const GeneratedData data = generate(spec, config.base_seed + rep);
            const Index fit_rows = spec.T;
            const TimeSeriesPanel panel = data.panel.window(0, fit_rows + 1);
            const TimeSeriesPanel window = panel.window(0, fit_rows);
            const CecmDesign design = build_cecm_design(window, config.lags, config.det);
            const double actual = panel.values(fit_rows, panel.target_index);

            std::optional<SpecsSolution> specs1_cache;
            auto specs1_solution = [&]() -> const SpecsSolution& {
                if (!specs1_cache) specs1_cache = fit_with_bic(design, config.fit, false);
                return *specs1_cache;
            };

            // Oracle nowcast error first; RMSNE denominators need it.
            if (data.truth) {
                IndexSet subset;
                for (Index i : data.truth->active_levels) subset.push_back(i);
                for (Index i : data.truth->active_diffs) subset.push_back(design.n_series + i);
                SpecsSolution oracle;
                oracle.coef = ols_fit(design, subset);
                oracle.n_levels = design.n_series;
                oracle.det_coef = recover_theta(design, oracle.coef);
                for (Index i = 0; i < oracle.coef.size(); ++i) {
                    if (oracle.coef[i] == 0.0) continue;
                    if (i < design.n_series)
                        oracle.active_levels.push_back(i);
                    else
                        oracle.active_diffs.push_back(i - design.n_series);
                }
                const Nowcast nc = nowcast_one(design, oracle, panel);
                record.oracle_error = nc.level - actual;
                for (std::size_t e = 0; e < n_est; ++e)
                    if (config.estimators[e] == Estimator::ols_oracle) {
                        record.solutions[e] = oracle;
                        record.nowcast_errors[e] = record.oracle_error;
                    }
            }

            for (std::size_t e = 0; e < n_est; ++e) {
                const Estimator est = config.estimators[e];
                switch (est) {
                    case Estimator::ols_oracle:
                        break;  // handled above
                    case Estimator::specs1: {
                        record.solutions[e] = specs1_solution();
                        const Nowcast nc = nowcast_one(design, record.solutions[e], panel);
                        record.nowcast_errors[e] = nc.level - actual;
                        break;
                    }
                    case Estimator::specs2: {
                        record.solutions[e] = fit_with_bic(design, config.fit, true);
                        const Nowcast nc = nowcast_one(design, record.solutions[e], panel);
                        record.nowcast_errors[e] = nc.level - actual;
                        break;
                    }
                    case Estimator::adl: {
                        record.solutions[e] = fit_adl(design, config.fit);
                        const Nowcast nc = nowcast_one(design, record.solutions[e], panel);
                        record.nowcast_errors[e] = nc.level - actual;
                        break;
                    }
                    case Estimator::adl_adf: {
                        const FitOutcome outcome =
                            run_estimator(Estimator::adl_adf, panel, config.lags, config.det,
                                          config.fit);
                        record.solutions[e] = outcome.solution;
                        record.nowcast_errors[e] = outcome.nowcast.level - actual;
                        break;
                    }
                    case Estimator::wald: {
                        const WaldResult wald = wald_coint_test(design, std::nullopt,
                                                                config.wald_draws,
                                                                config.wald_seed);
                        record.wald_rejections[e] = wald.reject ? 1 : 0;
                        break;
                    }
                    case Estimator::wald_ps: {
                        const SpecsSolution& base = specs1_solution();
                        IndexSet subset;
                        for (Index i : base.active_levels) subset.push_back(i);
                        for (Index i : base.active_diffs)
                            subset.push_back(design.n_series + i);
                        if (base.active_levels.empty()) {
                            record.wald_rejections[e] = 0;
                        } else {
                            const WaldResult wald = wald_coint_test(design, subset,
                                                                    config.wald_draws,
                                                                    config.wald_seed);
                            record.wald_rejections[e] = wald.reject ? 1 : 0;
                        }
                        break;
                    }
                }
            }
            record.ok = true;
        } catch (const std::exception& e) {
            record.ok = false;
            record.error = e.what();
        }
    });

    // Deterministic aggregation in replication order.
    MetricsReport report;
    report.family = family_name(config.dgp.family);
    report.n_reps = config.n_reps;
    report.base_seed = config.base_seed;

    for (int rep = 0; rep < config.n_reps; ++rep) {
        if (!records[rep].ok) {
            ++report.n_failures;
            report.failed_reps.push_back(rep);
        }
    }

    const bool have_oracle =
        std::count(config.estimators.begin(), config.estimators.end(), Estimator::ols_oracle) > 0 &&
        config.dgp.family != DgpFamily::factor_model;
    report.rmsne_baseline = have_oracle ? "ols_oracle" : "adl";

    // Per-replication truths (recomputed; cheap next to the fits).
    std::vector<std::optional<ImpliedSingleEq>> truths(config.n_reps);
    if (config.dgp.family != DgpFamily::factor_model) {
        for (int rep = 0; rep < config.n_reps; ++rep) {
            if (!records[rep].ok) continue;
            Rng rng(config.base_seed + rep);
            DgpSpec spec = config.dgp;
            spec.extra_obs = 1;
            truths[rep] = implied_single_equation(make_vecm_params(spec, rng), 1);
        }
    }

    double baseline_sse = 0.0;
    int baseline_n = 0;
    for (int rep = 0; rep < config.n_reps; ++rep) {
        if (!records[rep].ok) continue;
        double err = std::numeric_limits<double>::quiet_NaN();
        if (have_oracle) {
            err = records[rep].oracle_error;
        } else {
            for (std::size_t e = 0; e < n_est; ++e)
                if (config.estimators[e] == Estimator::adl) err = records[rep].nowcast_errors[e];
        }
        if (std::isfinite(err)) {
            baseline_sse += err * err;
            ++baseline_n;
        }
    }
    const double baseline_msne = baseline_n > 0 ? baseline_sse / baseline_n : 0.0;

    for (std::size_t e = 0; e < n_est; ++e) {
        const Estimator est = config.estimators[e];
        EstimatorAggregate agg;
        double sse = 0.0, pcs_sum = 0.0, pics_sum = 0.0;
        int n_err = 0, n_pcs = 0, n_pics = 0, n_power = 0, power_hits = 0;
        for (int rep = 0; rep < config.n_reps; ++rep) {
            const RepRecord& record = records[rep];
            if (!record.ok) continue;
            ++agg.n_ok;
            if (est == Estimator::wald || est == Estimator::wald_ps) {
                if (record.wald_rejections[e] >= 0) {
                    ++n_power;
                    power_hits += record.wald_rejections[e];
                }
                continue;
            }
            const SpecsSolution& sol = record.solutions[e];
            ++n_power;
            if (!sol.active_levels.empty()) ++power_hits;
            const double err = record.nowcast_errors[e];
            if (std::isfinite(err)) {
                sse += err * err;
                ++n_err;
            }
            if (truths[rep] && sol.coef.size() == truths[rep]->level_coef.size() +
                                                      truths[rep]->diff_coef.size()) {
                const SelectionRates rates = selection_metrics(sol, *truths[rep]);
                if (rates.pcs) {
                    pcs_sum += *rates.pcs;
                    ++n_pcs;
                }
                if (rates.pics) {
                    pics_sum += *rates.pics;
                    ++n_pics;
                }
            }
        }
        if (n_power > 0)
            agg.pseudo_power = static_cast<double>(power_hits) / static_cast<double>(n_power);
        if (n_pcs > 0) agg.pcs = pcs_sum / n_pcs;
        if (n_pics > 0) agg.pics = pics_sum / n_pics;
        if (n_err > 0) {
            agg.msne = sse / n_err;
            if (baseline_msne > 0.0) agg.rmsne = std::sqrt(*agg.msne / baseline_msne);
        }
        report.per_estimator[estimator_name(est)] = agg;
    }
    return report;
}

}  // namespace specs
