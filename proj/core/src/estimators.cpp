#include "specs/estimators.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "specs/rng.hpp"

namespace specs {

namespace {

Matrix select_columns(const Matrix& x, const IndexSet& cols) {
    Matrix out(x.rows(), static_cast<Index>(cols.size()));
    for (Index j = 0; j < out.cols(); ++j) out.col(j) = x.col(cols[j]);
    return out;
}

// Wald statistic on raw projected matrices: joint significance of the first
// n_level_cols coefficients. `det_cols` counts the deterministic columns
// already projected out (they spend degrees of freedom).
double wald_stat_raw(const Vector& y, const Matrix& x, Index n_level_cols, int det_cols) {
    const Index n_params = x.cols();
    const Index dof = y.size() - n_params - det_cols;
    if (dof <= 0) throw std::invalid_argument("no degrees of freedom left for the Wald statistic");
    if (n_level_cols == 0) return 0.0;

    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    if (qr.rank() < n_params) throw std::runtime_error("Wald regression is rank deficient");
    const Vector beta = qr.solve(y);
    const double sigma2 = (y - x * beta).squaredNorm() / static_cast<double>(dof);

    const Matrix z = x.leftCols(n_level_cols);
    Matrix z_resid = z;
    if (n_params > n_level_cols) {
        const Matrix rest = x.rightCols(n_params - n_level_cols);
        Eigen::ColPivHouseholderQR<Matrix> qr_rest(rest);
        z_resid = z - rest * qr_rest.solve(z);
    }
    const Vector delta = beta.head(n_level_cols);
    const Vector zd = z_resid.transpose() * (z_resid * delta);
    return delta.dot(zd) / sigma2;
}

void project_out_raw(const Matrix& d, Vector& y, Matrix& x) {
    if (d.cols() == 0) return;
    const Matrix gram = d.transpose() * d;
    Eigen::FullPivLU<Matrix> lu(gram);
    if (!lu.isInvertible()) throw std::invalid_argument("deterministic block is rank deficient");
    y -= d * lu.solve(d.transpose() * y);
    x -= d * lu.solve(d.transpose() * x);
}

}  // namespace

Vector ols_fit(const CecmDesign& design, const IndexSet& subset) {
    const Index d = design.D.cols();
    if (static_cast<Index>(subset.size()) + d >= design.t_eff())
        throw std::invalid_argument("subset too large for the available sample");
    Vector coef = Vector::Zero(design.n_coef());
    if (subset.empty()) return coef;
    for (Index idx : subset)
        if (idx < 0 || idx >= design.n_coef())
            throw std::invalid_argument("subset index out of range");

    const Matrix x = select_columns(design.V_proj, subset);
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    if (qr.rank() < x.cols()) throw std::runtime_error("selected columns are rank deficient");
    const Vector beta = qr.solve(design.dy_proj);
    for (Index j = 0; j < beta.size(); ++j) coef[subset[j]] = beta[j];
    return coef;
}

AdaptiveWeights adl_weights(const CecmDesign& design, double k_diff) {
    const Vector init = ridge_init(design.dy_proj, design.diffs_proj());
    Vector full = Vector::Zero(design.n_coef());
    full.tail(design.n_diffs) = init;
    AdaptiveWeights weights = compute_weights(full, k_diff, k_diff, design.n_series);
    for (Index i = 0; i < design.n_series; ++i) {
        if (!weights.is_excluded(i)) {
            weights.omega[i] = std::numeric_limits<double>::infinity();
            weights.excluded.push_back(i);
        }
    }
    std::sort(weights.excluded.begin(), weights.excluded.end());
    weights.excluded.erase(std::unique(weights.excluded.begin(), weights.excluded.end()),
                           weights.excluded.end());
    return weights;
}

SpecsSolution adl_fit(const CecmDesign& design, const AdaptiveWeights& weights,
                      const PenaltyGrid& grid, const SolverConfig& config) {
    AdaptiveWeights forced = weights;
    for (Index i = 0; i < design.n_series; ++i) {
        if (!forced.is_excluded(i)) {
            forced.omega[i] = std::numeric_limits<double>::infinity();
            forced.excluded.push_back(i);
        }
    }
    std::sort(forced.excluded.begin(), forced.excluded.end());
    forced.excluded.erase(std::unique(forced.excluded.begin(), forced.excluded.end()),
                          forced.excluded.end());

    PenaltyGrid individual_only;
    individual_only.lambda_individual = grid.lambda_individual;
    individual_only.lambda_group = {0.0};
    const std::vector<SpecsSolution> path = specs_path(design, forced, individual_only, config);
    return bic_select(path, design);
}

AdlAdfSolution adl_adf_fit(const TimeSeriesPanel& panel, int lags, Deterministics det,
                           const SpecsConfig& config) {
    panel.validate();
    if (lags < 0) throw std::invalid_argument("lags must be >= 0");
    const Index T = panel.periods();
    const Index N = panel.series();
    const Index rows = T - 1 - lags;
    if (rows <= det_columns(det) + 2)
        throw std::invalid_argument("not enough observations after transformation");

    // Target first, then the conditioning series in panel order.
    std::vector<Index> order;
    order.push_back(panel.target_index);
    for (Index c = 0; c < N; ++c)
        if (c != panel.target_index) order.push_back(c);

    AdlAdfSolution out;
    out.differenced.resize(N);
    out.adf.reserve(N);

    // Pretest each series; stationary ones stay in levels. Constant-only
    // ADF regardless of the fit's deterministic specification.
    Matrix transformed(T - 1, N);
    for (Index j = 0; j < N; ++j) {
        const Vector series = panel.values.col(order[j]);
        const AdfResult adf = adf_test(series, -1, Deterministics::constant);
        out.adf.push_back(adf);
        out.differenced[j] = adf.reject_unit_root ? 0 : 1;
        if (adf.reject_unit_root)
            transformed.col(j) = series.tail(T - 1);
        else
            transformed.col(j) = series.tail(T - 1) - series.head(T - 1);
    }

    // Regression of the transformed target on the contemporaneous
    // transformed conditioning series and `lags` lags of all transformed
    // series; mirrors the difference-only comparator when everything gets
    // differenced.
    const Index n_coef = (N - 1) + N * lags;
    Vector y(rows);
    Matrix x(rows, n_coef);
    Matrix d(rows, det_columns(det));
    for (Index r = 0; r < rows; ++r) {
        const Index t = r + lags;  // row into the transformed panel
        y[r] = transformed(t, 0);
        x.block(r, 0, 1, N - 1) = transformed.block(t, 1, 1, N - 1);
        for (int j = 1; j <= lags; ++j)
            x.block(r, N - 1 + (j - 1) * N, 1, N) = transformed.row(t - j);
        if (d.cols() >= 1) d(r, 0) = 1.0;
        if (d.cols() >= 2) d(r, 1) = static_cast<double>(t);
    }

    Vector y_proj = y;
    Matrix x_proj = x;
    project_out_raw(d, y_proj, x_proj);

    const Vector init = ridge_init(y_proj, x_proj);
    const AdaptiveWeights weights = compute_weights(init, config.k_diff, config.k_diff, 0);

    double lmax = 0.0;
    const Vector xty = x_proj.transpose() * y_proj;
    for (Index i = 0; i < xty.size(); ++i)
        if (!weights.is_excluded(i)) lmax = std::max(lmax, 2.0 * std::abs(xty[i]) / weights.omega[i]);
    if (lmax <= 0.0) lmax = 1.0;

    const int n_i = config.n_lambda_individual;
    std::vector<SpecsSolution> path;
    path.reserve(n_i);
    Vector warm = Vector::Zero(n_coef);
    for (int i = 0; i < n_i; ++i) {
        const double frac = n_i == 1 ? 0.0 : i / static_cast<double>(n_i - 1);
        const double li = std::exp(std::log(lmax) + frac * std::log(config.eps_ratio));
        SpecsSolution fit = fit_penalized(y_proj, x_proj, 0, weights, li, 0.0, config.solver, &warm);
        warm = fit.coef;
        path.push_back(std::move(fit));
    }

    std::size_t best = 0;
    double best_bic = std::numeric_limits<double>::infinity();
    const double m = static_cast<double>(rows);
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double rss = (y_proj - x_proj * path[i].coef).squaredNorm();
        const double df = static_cast<double>(path[i].active_diffs.size());
        const double bic = std::log(std::max(rss, 1e-300) / m) + std::log(m) * df / m;
        if (bic < best_bic - 1e-12) {
            best_bic = bic;
            best = i;
        }
    }
    out.solution = path[best];

    // Deterministic coefficients from the unprojected system.
    if (d.cols() > 0) {
        const Matrix gram = d.transpose() * d;
        const Vector theta = Eigen::FullPivLU<Matrix>(gram).solve(
            d.transpose() * (y - x * out.solution.coef));
        out.solution.det_coef.count = static_cast<int>(d.cols());
        out.solution.det_coef.intercept = theta[0];
        if (d.cols() > 1) out.solution.det_coef.trend = theta[1];
    }
    return out;
}

double adl_adf_nowcast(const AdlAdfSolution& fit, const TimeSeriesPanel& panel, int lags,
                       Deterministics det) {
    const Index T = panel.periods();
    const Index N = panel.series();
    if (T < lags + 3) throw std::invalid_argument("panel too short for the nowcast");

    std::vector<Index> order;
    order.push_back(panel.target_index);
    for (Index c = 0; c < N; ++c)
        if (c != panel.target_index) order.push_back(c);

    // Transformed values at original time s (valid for s >= 1).
    auto transformed_at = [&](Index s, Index j) {
        const double now = panel.values(s, order[j]);
        return fit.differenced[j] ? now - panel.values(s - 1, order[j]) : now;
    };

    const Index s = T - 1;  // prediction time
    double value = 0.0;
    const auto& coef = fit.solution.coef;
    for (Index j = 1; j < N; ++j) value += coef[j - 1] * transformed_at(s, j);
    for (int l = 1; l <= lags; ++l)
        for (Index j = 0; j < N; ++j)
            value += coef[N - 1 + (l - 1) * N + j] * transformed_at(s - l, j);
    if (fit.solution.det_coef.count >= 1) value += fit.solution.det_coef.intercept;
    if (fit.solution.det_coef.count >= 2)
        value += fit.solution.det_coef.trend * static_cast<double>(s - 1);

    return fit.differenced[0] ? panel.values(s - 1, panel.target_index) + value : value;
}

double wald_coint_stat(const CecmDesign& design, const std::optional<IndexSet>& subset) {
    IndexSet cols;
    if (subset) {
        cols = *subset;
        std::sort(cols.begin(), cols.end());
    } else {
        cols.resize(design.n_coef());
        for (Index i = 0; i < design.n_coef(); ++i) cols[i] = i;
    }
    // Levels first so the statistic targets the leading block.
    IndexSet ordered;
    Index n_level_cols = 0;
    for (Index c : cols)
        if (c < design.n_series) {
            ordered.push_back(c);
            ++n_level_cols;
        }
    for (Index c : cols)
        if (c >= design.n_series) ordered.push_back(c);
    if (ordered.empty() || n_level_cols == 0) return 0.0;

    const Matrix x = select_columns(design.V_proj, ordered);
    return wald_stat_raw(design.dy_proj, x, n_level_cols, static_cast<int>(design.D.cols()));
}

double wald_critical_value(Index t_eff, int n_levels, Deterministics det, int n_draws,
                           std::uint64_t seed) {
    if (n_draws < 1000) throw std::invalid_argument("need at least 1000 null draws");
    if (n_levels < 1) throw std::invalid_argument("need at least one level column");

    using Key = std::tuple<Index, int, int, int, std::uint64_t>;
    static std::map<Key, double> cache;
    static std::mutex cache_mutex;
    const Key key{t_eff, n_levels, static_cast<int>(det), n_draws, seed};
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    const int d = det_columns(det);
    std::vector<double> stats(n_draws);
    for (int draw = 0; draw < n_draws; ++draw) {
        Rng rng(seed + static_cast<std::uint64_t>(draw));
        // Independent random walks, z_0 = 0.
        Matrix z(t_eff + 1, n_levels);
        Vector level = Vector::Zero(n_levels);
        for (Index t = 0; t < t_eff + 1; ++t) {
            for (int j = 0; j < n_levels; ++j) level[j] += rng.normal();
            z.row(t) = level.transpose();
        }

        Vector y(t_eff);
        Matrix x(t_eff, n_levels + (n_levels - 1));
        Matrix dmat(t_eff, d);
        for (Index t = 0; t < t_eff; ++t) {
            y[t] = z(t + 1, 0) - z(t, 0);
            x.block(t, 0, 1, n_levels) = z.row(t);
            for (int j = 1; j < n_levels; ++j)
                x(t, n_levels + j - 1) = z(t + 1, j) - z(t, j);
            if (d >= 1) dmat(t, 0) = 1.0;
            if (d >= 2) dmat(t, 1) = static_cast<double>(t);
        }
        project_out_raw(dmat, y, x);
        stats[draw] = wald_stat_raw(y, x, n_levels, d);
    }

    std::sort(stats.begin(), stats.end());
    const double q = 0.95 * static_cast<double>(n_draws - 1);
    const auto lo = static_cast<std::size_t>(std::floor(q));
    const auto hi = std::min(lo + 1, stats.size() - 1);
    const double frac = q - std::floor(q);
    const double critical = stats[lo] * (1.0 - frac) + stats[hi] * frac;

    std::lock_guard<std::mutex> lock(cache_mutex);
    cache.emplace(key, critical);
    return critical;
}

WaldResult wald_coint_test(const CecmDesign& design, const std::optional<IndexSet>& subset,
                           int n_draws, std::uint64_t seed) {
    WaldResult result;
    result.statistic = wald_coint_stat(design, subset);
    Index n_level_cols = 0;
    if (subset) {
        for (Index c : *subset)
            if (c < design.n_series) ++n_level_cols;
    } else {
        n_level_cols = design.n_series;
    }
    if (n_level_cols == 0) {
        result.critical_value = std::numeric_limits<double>::infinity();
        result.reject = false;
        result.null_draws = 0;
        return result;
    }
    result.critical_value = wald_critical_value(design.t_eff(), static_cast<int>(n_level_cols),
                                                design.det, n_draws, seed);
    result.null_draws = n_draws;
    result.reject = result.statistic > result.critical_value;
    return result;
}

DmResult dm_test(const Vector& errors_a, const Vector& errors_b) {
    if (errors_a.size() != errors_b.size())
        throw std::invalid_argument("error series lengths differ");
    const Index n = errors_a.size();
    if (n < 10) throw std::invalid_argument("need at least 10 comparisons");

    const Vector d = errors_a.array().square() - errors_b.array().square();
    const double mean = d.mean();
    const double var = (d.array() - mean).square().sum() / static_cast<double>(n);

    DmResult result;
    if (var <= 0.0) {
        if (mean == 0.0) {
            result.statistic = 0.0;
            result.p_value = 1.0;
        } else {
            result.statistic = mean > 0.0 ? 1e15 : -1e15;
            result.p_value = 0.0;
        }
        return result;
    }
    result.statistic = mean / std::sqrt(var / static_cast<double>(n));
    result.p_value = std::erfc(std::abs(result.statistic) / std::sqrt(2.0));
    return result;
}

}  // namespace specs
