#include "specs/vecm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace specs {

namespace {
constexpr double kZeroTol = 1e-12;
}

void VecmParams::validate() const {
    const Index n = adjustment.rows();
    if (coint.rows() != n) throw std::invalid_argument("adjustment/coint row mismatch");
    if (adjustment.cols() != coint.cols())
        throw std::invalid_argument("adjustment/coint column mismatch");
    if (innovation_cov.rows() != n || innovation_cov.cols() != n)
        throw std::invalid_argument("innovation covariance dimension mismatch");
    if (mean.size() != n || trend.size() != n)
        throw std::invalid_argument("deterministic shift dimension mismatch");
    for (const auto& phi : short_run)
        if (phi.rows() != n || phi.cols() != n)
            throw std::invalid_argument("short-run matrix dimension mismatch");
    if (!innovation_cov.isApprox(innovation_cov.transpose(), 1e-10))
        throw std::invalid_argument("innovation covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eigs(innovation_cov);
    if (eigs.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("innovation covariance is not positive definite");
}

ImpliedSingleEq implied_single_equation(const VecmParams& params, int lags) {
    params.validate();
    if (lags < 0) throw std::invalid_argument("lags must be >= 0");
    const Index n = params.n_series();

    // Orthogonalize the target innovation against the conditioning block.
    const Matrix cond_cov = params.innovation_cov.bottomRightCorner(n - 1, n - 1);
    const Vector cross_cov = params.innovation_cov.block(1, 0, n - 1, 1);
    Eigen::LDLT<Matrix> ldlt(cond_cov);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw std::invalid_argument("conditioning covariance block is singular");
    const Vector contemporaneous = ldlt.solve(cross_cov);

    Vector selector(n);
    selector[0] = 1.0;
    selector.tail(n - 1) = -contemporaneous;

    ImpliedSingleEq implied;
    implied.contemporaneous = contemporaneous;
    implied.level_coef = params.coint * (params.adjustment.transpose() * selector);

    implied.diff_coef.resize(n * (lags + 1) - 1);
    implied.diff_coef.head(n - 1) = contemporaneous;
    for (int j = 1; j <= lags; ++j) {
        Vector block = Vector::Zero(n);
        if (j <= static_cast<int>(params.short_run.size()))
            block = params.short_run[j - 1].transpose() * selector;
        implied.diff_coef.segment(n - 1 + (j - 1) * n, n) = block;
    }

    // tau* = (I - sum Phi_j) tau. Expanding A B'(z_{t-1} - mean - trend(t-1))
    // + tau* gives the constant tau* - A B' mean and trend slope -A B' trend
    // in the conditional equation.
    Matrix phi_sum = Matrix::Zero(n, n);
    for (const auto& phi : params.short_run) phi_sum += phi;
    const Vector tau_star = (Matrix::Identity(n, n) - phi_sum) * params.trend;
    const Matrix long_run = params.adjustment * params.coint.transpose();
    implied.intercept = selector.dot(tau_star - long_run * params.mean);
    implied.trend = -selector.dot(long_run * params.trend);

    for (Index i = 0; i < implied.level_coef.size(); ++i)
        if (std::abs(implied.level_coef[i]) >= kZeroTol) implied.active_levels.push_back(i);
    for (Index i = 0; i < implied.diff_coef.size(); ++i)
        if (std::abs(implied.diff_coef[i]) >= kZeroTol) implied.active_diffs.push_back(i);

    return implied;
}

}  // namespace specs
