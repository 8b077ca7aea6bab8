#include "specs/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace specs {

SelectionRates selection_metrics(const SpecsSolution& solution, const ImpliedSingleEq& truth) {
    const Index n_levels = truth.level_coef.size();
    const Index n_diffs = truth.diff_coef.size();
    if (solution.n_levels != n_levels ||
        solution.coef.size() != n_levels + n_diffs)
        throw std::invalid_argument("solution and truth dimensions disagree");

    auto is_true_active = [&](Index global) {
        if (global < n_levels)
            return std::binary_search(truth.active_levels.begin(), truth.active_levels.end(),
                                      global);
        return std::binary_search(truth.active_diffs.begin(), truth.active_diffs.end(),
                                  global - n_levels);
    };

    Index true_nonzero = 0, true_zero = 0, hits = 0, false_hits = 0;
    for (Index i = 0; i < solution.coef.size(); ++i) {
        const bool truth_on = is_true_active(i);
        const bool selected = solution.coef[i] != 0.0;
        if (truth_on) {
            ++true_nonzero;
            if (selected) ++hits;
        } else {
            ++true_zero;
            if (selected) ++false_hits;
        }
    }

    SelectionRates rates;
    if (true_nonzero > 0)
        rates.pcs = static_cast<double>(hits) / static_cast<double>(true_nonzero);
    if (true_zero > 0)
        rates.pics = static_cast<double>(false_hits) / static_cast<double>(true_zero);
    return rates;
}

double pseudo_power(const std::vector<SpecsSolution>& solutions) {
    if (solutions.empty()) throw std::invalid_argument("no solutions");
    Index with_level = 0;
    for (const auto& s : solutions)
        if (!s.active_levels.empty()) ++with_level;
    return static_cast<double>(with_level) / static_cast<double>(solutions.size());
}

Nowcast nowcast_one(const CecmDesign& design, const SpecsSolution& solution,
                    const TimeSeriesPanel& panel) {
    const Index T = panel.periods();
    const Index N = design.n_series;
    const int p = design.lags;
    if (panel.series() != N) throw std::invalid_argument("panel width does not match design");
    if (T < p + 2) throw std::invalid_argument("panel too short to form the nowcast regressors");
    if (solution.coef.size() != design.n_coef())
        throw std::invalid_argument("solution does not match design");

    // Reorder levels so the target leads, matching the design's columns.
    Matrix z(T, N);
    z.col(0) = panel.values.col(panel.target_index);
    Index k = 1;
    for (Index c = 0; c < panel.series(); ++c) {
        if (c == panel.target_index) continue;
        z.col(k++) = panel.values.col(c);
    }

    const auto level_coef = solution.coef.head(N);
    const auto diff_coef = solution.coef.tail(design.n_diffs);

    double diff_hat = level_coef.dot(z.row(T - 2));
    // Contemporaneous conditioning differences.
    for (Index c = 1; c < N; ++c)
        diff_hat += diff_coef[c - 1] * (z(T - 1, c) - z(T - 2, c));
    // Lagged difference blocks.
    for (int j = 1; j <= p; ++j)
        for (Index c = 0; c < N; ++c)
            diff_hat += diff_coef[N - 1 + (j - 1) * N + c] * (z(T - 1 - j, c) - z(T - 2 - j, c));

    if (solution.det_coef.count >= 1) diff_hat += solution.det_coef.intercept;
    if (solution.det_coef.count >= 2)
        diff_hat += solution.det_coef.trend * static_cast<double>(T - 2);

    Nowcast nowcast;
    nowcast.diff = diff_hat;
    nowcast.level = z(T - 2, 0) + diff_hat;
    return nowcast;
}

}  // namespace specs
