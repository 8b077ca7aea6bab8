#include "specs/unit_root.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

namespace specs {

namespace {

// MacKinnon (2010) response-surface constants for the 5% Dickey-Fuller
// critical value: cv = b0 + b1/T + b2/T^2.
struct ResponseSurface {
    double b0, b1, b2;
};

ResponseSurface surface_for(Deterministics det) {
    switch (det) {
        case Deterministics::none: return {-1.9393, -0.398, 0.0};
        case Deterministics::constant: return {-2.8621, -2.738, -8.36};
        case Deterministics::constant_and_trend: return {-3.4126, -4.039, -17.83};
    }
    return {-2.8621, -2.738, -8.36};
}

struct AdfRegression {
    double t_stat = 0.0;
    double rss = 0.0;
    Index n_obs = 0;
    Index n_params = 0;
};

// Dickey-Fuller regression of dy_t on y_{t-1}, k lagged differences and the
// deterministic terms, over rows first_row..end of the difference series.
AdfRegression adf_regression(const Vector& y, int k, Deterministics det, Index first_row) {
    const Index n_diff = y.size() - 1;
    const Index rows = n_diff - first_row;
    const Index n_params = 1 + k + det_columns(det);
    if (rows <= n_params) throw std::invalid_argument("series too short for ADF regression");

    Matrix x(rows, n_params);
    Vector dy(rows);
    for (Index r = 0; r < rows; ++r) {
        const Index t = first_row + r;  // index into the difference series
        dy[r] = y[t + 1] - y[t];
        x(r, 0) = y[t];
        for (int j = 1; j <= k; ++j) x(r, j) = y[t - j + 1] - y[t - j];
        Index c = 1 + k;
        if (det_columns(det) >= 1) x(r, c++) = 1.0;
        if (det_columns(det) >= 2) x(r, c) = static_cast<double>(t);
    }

    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    if (qr.rank() < n_params) throw std::runtime_error("ADF regression is rank deficient");
    const Vector beta = qr.solve(dy);
    const Vector resid = dy - x * beta;

    AdfRegression out;
    out.rss = resid.squaredNorm();
    out.n_obs = rows;
    out.n_params = n_params;
    const double sigma2 = out.rss / static_cast<double>(rows - n_params);
    const Matrix xtx_inv =
        (x.transpose() * x).ldlt().solve(Matrix::Identity(n_params, n_params));
    const double se = std::sqrt(sigma2 * xtx_inv(0, 0));
    out.t_stat = beta[0] / se;
    return out;
}

}  // namespace

AdfResult adf_test(const Vector& series, int max_lags, Deterministics det) {
    const Index n = series.size();
    if (max_lags < 0)
        max_lags = static_cast<int>(
            std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
    if (n <= max_lags + 10) throw std::invalid_argument("series too short for the lag cap");

    const double mean = series.mean();
    if ((series.array() - mean).abs().maxCoeff() <= 1e-14 * std::max(1.0, std::abs(mean)))
        throw std::invalid_argument("series is degenerate (zero variance)");

    // Lag order by BIC on the common sample implied by the cap.
    int best_k = 0;
    double best_bic = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= max_lags; ++k) {
        const AdfRegression reg = adf_regression(series, k, det, max_lags);
        const double m = static_cast<double>(reg.n_obs);
        const double bic = m * std::log(std::max(reg.rss, 1e-300) / m) +
                           static_cast<double>(reg.n_params) * std::log(m);
        if (bic < best_bic) {
            best_bic = bic;
            best_k = k;
        }
    }

    // Refit the chosen order on its own maximal sample.
    const AdfRegression chosen = adf_regression(series, best_k, det, best_k);

    AdfResult result;
    result.statistic = chosen.t_stat;
    result.lags_used = best_k;
    const ResponseSurface s = surface_for(det);
    const double t = static_cast<double>(chosen.n_obs);
    result.critical_value = s.b0 + s.b1 / t + s.b2 / (t * t);
    result.reject_unit_root = result.statistic < result.critical_value;
    return result;
}

}  // namespace specs
