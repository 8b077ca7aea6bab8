#include "specs/design.hpp"

#include <Eigen/QR>
#include <stdexcept>

namespace specs {

namespace {

// Least-squares coefficients of D on `target`, via the normal equations of
// the (at most two-column) deterministic block.
Vector det_coefficients(const Matrix& D, const Vector& target) {
    const Matrix gram = D.transpose() * D;
    Eigen::FullPivLU<Matrix> lu(gram);
    if (!lu.isInvertible()) throw std::invalid_argument("deterministic block is rank deficient");
    return lu.solve(D.transpose() * target);
}

}  // namespace

CecmDesign build_cecm_design(const TimeSeriesPanel& panel, int lags, Deterministics det) {
    panel.validate();
    if (lags < 0) throw std::invalid_argument("lags must be >= 0");
    const Index T = panel.periods();
    const Index N = panel.series();
    const Index t_eff = T - lags - 1;
    if (t_eff <= det_columns(det))
        throw std::invalid_argument("not enough observations for the requested lag order");

    // Reorder so the target series sits in the first column.
    Matrix z(T, N);
    std::vector<std::string> names(N);
    z.col(0) = panel.values.col(panel.target_index);
    names[0] = panel.labels.empty() ? "y" : panel.labels[panel.target_index];
    Index k = 1;
    for (Index c = 0; c < N; ++c) {
        if (c == panel.target_index) continue;
        z.col(k) = panel.values.col(c);
        names[k] = panel.labels.empty() ? "x" + std::to_string(k) : panel.labels[c];
        ++k;
    }

    const Matrix dz = z.bottomRows(T - 1) - z.topRows(T - 1);  // row s = z_{s+1} - z_s

    CecmDesign design;
    design.n_series = static_cast<int>(N);
    design.n_diffs = static_cast<int>(N * (lags + 1) - 1);
    design.lags = lags;
    design.det = det;
    design.dy.resize(t_eff);
    design.V.resize(t_eff, N + design.n_diffs);
    design.coef_labels.reserve(N + design.n_diffs);

    for (Index t = 0; t < t_eff; ++t) {
        const Index response_time = t + lags + 1;
        design.dy[t] = dz(response_time - 1, 0);
        design.V.block(t, 0, 1, N) = z.row(response_time - 1);
        design.V.block(t, N, 1, N - 1) = dz.block(response_time - 1, 1, 1, N - 1);
        for (int j = 1; j <= lags; ++j)
            design.V.block(t, N + (N - 1) + (j - 1) * N, 1, N) = dz.row(response_time - 1 - j);
    }

    for (Index c = 0; c < N; ++c) design.coef_labels.push_back(names[c] + ".l1");
    for (Index c = 1; c < N; ++c) design.coef_labels.push_back("d." + names[c]);
    for (int j = 1; j <= lags; ++j)
        for (Index c = 0; c < N; ++c)
            design.coef_labels.push_back("d." + names[c] + ".l" + std::to_string(j));

    const int d = det_columns(det);
    design.D.resize(t_eff, d);
    if (d >= 1) design.D.col(0).setOnes();
    if (d >= 2)
        for (Index t = 0; t < t_eff; ++t) design.D(t, 1) = static_cast<double>(t + lags);

    return project_out(std::move(design));
}

CecmDesign project_out(CecmDesign design) {
    if (design.D.cols() == 0) {
        design.dy_proj = design.dy;
        design.V_proj = design.V;
        return design;
    }
    const Matrix gram = design.D.transpose() * design.D;
    Eigen::FullPivLU<Matrix> lu(gram);
    if (!lu.isInvertible()) throw std::invalid_argument("deterministic block is rank deficient");
    const Matrix solver_dy = lu.solve(design.D.transpose() * design.dy);
    design.dy_proj = design.dy - design.D * solver_dy;
    const Matrix solved_v = lu.solve(design.D.transpose() * design.V);
    design.V_proj = design.V - design.D * solved_v;
    return design;
}

DetCoef recover_theta(const CecmDesign& design, const Vector& coef) {
    DetCoef theta;
    theta.count = static_cast<int>(design.D.cols());
    if (theta.count == 0) return theta;
    if (coef.size() != design.V.cols())
        throw std::invalid_argument("coefficient length does not match design");
    const Vector residual = design.dy - design.V * coef;
    const Vector solved = det_coefficients(design.D, residual);
    theta.intercept = solved[0];
    if (theta.count > 1) theta.trend = solved[1];
    return theta;
}

Matrix l1_normalized_complement(const Matrix& basis, Index rows) {
    const Index r = basis.cols();
    Matrix complement;
    if (r == 0) {
        complement = Matrix::Identity(rows, rows);
    } else {
        if (basis.rows() != rows) throw std::invalid_argument("basis row count mismatch");
        Eigen::ColPivHouseholderQR<Matrix> qr(basis);
        if (qr.rank() != r) throw std::invalid_argument("cointegrating basis is rank deficient");
        Eigen::HouseholderQR<Matrix> hqr(basis);
        const Matrix q_full = hqr.householderQ() * Matrix::Identity(rows, rows);
        complement = q_full.rightCols(rows - r);
    }
    for (Index j = 0; j < complement.cols(); ++j) {
        const double l1 = complement.col(j).lpNorm<1>();
        if (l1 > 0) complement.col(j) /= l1;
    }
    return complement;
}

Matrix q_transform(const CecmDesign& design, const IndexSet& active_levels,
                   const IndexSet& active_diffs, const Matrix& coint_basis) {
    const Index s_levels = static_cast<Index>(active_levels.size());
    const Index r = coint_basis.cols();
    if (coint_basis.rows() != s_levels)
        throw std::invalid_argument("basis row count must match the retained levels");

    Matrix Z(design.t_eff(), s_levels);
    for (Index j = 0; j < s_levels; ++j) Z.col(j) = design.V_proj.col(active_levels[j]);
    Matrix W(design.t_eff(), static_cast<Index>(active_diffs.size()));
    for (Index j = 0; j < W.cols(); ++j)
        W.col(j) = design.V_proj.col(design.n_series + active_diffs[j]);

    const Matrix basis_perp = l1_normalized_complement(coint_basis, s_levels);

    Matrix out(design.t_eff(), r + W.cols() + basis_perp.cols());
    out.leftCols(r) = Z * coint_basis;
    out.middleCols(r, W.cols()) = W;
    out.rightCols(basis_perp.cols()) = Z * basis_perp;
    return out;
}

ScaledCovariance scaled_covariance(const Matrix& rotated, int s_delta, int s_pi, Index t_scale) {
    if (rotated.cols() != s_delta + s_pi)
        throw std::invalid_argument("rotated column count must equal s_delta + s_pi");
    if (t_scale <= 0) throw std::invalid_argument("scaling sample size must be positive");

    Vector scale_inv(s_pi + s_delta);
    const double t = static_cast<double>(t_scale);
    for (int i = 0; i < s_pi; ++i) scale_inv[i] = 1.0 / std::sqrt(t);
    for (int i = 0; i < s_delta; ++i)
        scale_inv[s_pi + i] = std::sqrt(static_cast<double>(s_delta)) / t;

    ScaledCovariance cov;
    cov.s_pi = s_pi;
    cov.s_delta = s_delta;
    cov.matrix = scale_inv.asDiagonal() * (rotated.transpose() * rotated) * scale_inv.asDiagonal();
    return cov;
}

}  // namespace specs
