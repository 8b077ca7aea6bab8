#include "specs/tuning.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "specs/metrics.hpp"

namespace specs {

double bic_score(const CecmDesign& design, const SpecsSolution& solution) {
    const double t = static_cast<double>(design.t_eff());
    const double rss = (design.dy_proj - design.V_proj * solution.coef).squaredNorm();
    const double df = static_cast<double>(solution.active_levels.size() +
                                          solution.active_diffs.size());
    return std::log(std::max(rss, 1e-300) / t) + std::log(t) * df / t;
}

std::size_t bic_select_index(const std::vector<SpecsSolution>& path, const CecmDesign& design) {
    if (path.empty()) throw std::invalid_argument("empty solution path");
    std::size_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double score = bic_score(design, path[i]);
        bool better = score < best_score - 1e-12;
        if (!better && score <= best_score + 1e-12) {
            // Tie: prefer the sparser model (larger penalties).
            const auto& cand = path[i];
            const auto& incumbent = path[best];
            better = cand.lambda_individual > incumbent.lambda_individual ||
                     (cand.lambda_individual == incumbent.lambda_individual &&
                      cand.lambda_group > incumbent.lambda_group);
        }
        if (better) {
            best = i;
            best_score = std::min(best_score, score);
        }
    }
    return best;
}

SpecsSolution bic_select(const std::vector<SpecsSolution>& path, const CecmDesign& design) {
    return path[bic_select_index(path, design)];
}

TscvResult tscv_select(const TimeSeriesPanel& panel, int lags, Deterministics det,
                       const SpecsConfig& config, const TscvConfig& tscv,
                       const PenaltyGrid* fixed_grid) {
    panel.validate();
    const Index T = panel.periods();
    const Index initial =
        static_cast<Index>(std::ceil(tscv.initial_fraction * static_cast<double>(T)));
    const Index n_coef = panel.series() * (lags + 2) - 1;
    const Index required = n_coef + det_columns(det) + 5;
    if (initial < required)
        throw std::invalid_argument("initial window too small: needs at least " +
                                    std::to_string(required) + " observations");
    if (initial >= T) throw std::invalid_argument("no observations left for validation");

    // Grid anchored on the first training window only; later windows reuse
    // the same penalty values so a grid point means the same model across
    // splits, without looking ahead.
    PenaltyGrid grid;
    if (fixed_grid) {
        if (fixed_grid->lambda_individual.empty() || fixed_grid->lambda_group.empty())
            throw std::invalid_argument("fixed grid is empty");
        grid = *fixed_grid;
    } else {
        const TimeSeriesPanel first_window = panel.window(0, initial);
        const CecmDesign first_design = build_cecm_design(first_window, lags, det);
        const AdaptiveWeights first_weights =
            compute_weights(ridge_init(first_design), config.k_level, config.k_diff,
                            first_design.n_series);
        grid = build_grid(first_design, first_weights, config.n_lambda_individual,
                          config.n_lambda_group, config.eps_ratio);
    }

    const int n_i = static_cast<int>(grid.lambda_individual.size());
    const int n_g = static_cast<int>(grid.lambda_group.size());
    const int n_splits = static_cast<int>(T - initial);

    // Designs and weights per split do not depend on the penalty pair, so
    // build them once. Weights come from the training window only.
    std::vector<CecmDesign> designs;
    std::vector<AdaptiveWeights> weights;
    std::vector<TimeSeriesPanel> extended;
    designs.reserve(n_splits);
    weights.reserve(n_splits);
    extended.reserve(n_splits);
    for (Index split = initial; split < T; ++split) {
        const Index start = tscv.scheme == TscvConfig::Scheme::rolling ? split - initial : 0;
        designs.push_back(build_cecm_design(panel.window(start, split - start), lags, det));
        weights.push_back(compute_weights(ridge_init(designs.back()), config.k_level,
                                          config.k_diff, designs.back().n_series));
        extended.push_back(panel.window(start, split - start + 1));
    }

    Matrix sse = Matrix::Zero(n_i, n_g);
    std::vector<Matrix> split_errors(n_splits, Matrix::Zero(n_i, n_g));
    for (int gi = 0; gi < n_g; ++gi) {
        for (int ii = 0; ii < n_i; ++ii) {
            const double li = grid.lambda_individual[ii];
            const double lg = grid.lambda_group[gi];
            Vector warm;
            bool have_warm = false;
            for (int s = 0; s < n_splits; ++s) {
                const Index split = initial + s;
                SpecsSolution fit;
                try {
                    fit = specs_fit(designs[s], weights[s], li, lg, config.solver,
                                    have_warm ? &warm : nullptr);
                } catch (const std::exception& e) {
                    throw std::runtime_error(
                        "cross-validation fit failed at split " + std::to_string(split) +
                        " (lambda_individual=" + std::to_string(li) +
                        ", lambda_group=" + std::to_string(lg) + "): " + e.what());
                }
                warm = fit.coef;
                have_warm = true;

                const Nowcast nowcast = nowcast_one(designs[s], fit, extended[s]);
                const double realized = panel.values(split, panel.target_index) -
                                        panel.values(split - 1, panel.target_index);
                const double err = realized - nowcast.diff;
                split_errors[s](ii, gi) = err * err;
                sse(ii, gi) += err * err;
            }
        }
    }

    TscvResult result;
    result.grid = grid;
    result.n_splits = n_splits;
    result.split_errors = std::move(split_errors);
    result.mspe_table = sse / static_cast<double>(n_splits);

    double best = std::numeric_limits<double>::infinity();
    int best_i = 0, best_g = 0;
    for (int gi = 0; gi < n_g; ++gi) {
        for (int ii = 0; ii < n_i; ++ii) {
            const double mspe = result.mspe_table(ii, gi);
            bool better = mspe < best - 1e-15;
            if (!better && mspe <= best + 1e-15) {
                better = grid.lambda_individual[ii] > grid.lambda_individual[best_i] ||
                         (grid.lambda_individual[ii] == grid.lambda_individual[best_i] &&
                          grid.lambda_group[gi] > grid.lambda_group[best_g]);
            }
            if (better) {
                best = std::min(best, mspe);
                best_i = ii;
                best_g = gi;
            }
        }
    }
    result.lambda_individual = grid.lambda_individual[best_i];
    result.lambda_group = grid.lambda_group[best_g];
    result.mspe = result.mspe_table(best_i, best_g);
    return result;
}

}  // namespace specs
