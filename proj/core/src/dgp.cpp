#include "specs/dgp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace specs {

namespace {

// iota-tilde (1, -1, -1, -1, -1)'.
Vector iota_tilde() {
    Vector v(5);
    v << 1.0, -1.0, -1.0, -1.0, -1.0;
    return v;
}

Matrix toeplitz_cov(Index n, double rho) {
    Matrix sigma(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) sigma(i, j) = std::pow(rho, std::abs(i - j));
    return sigma;
}

// B* = (1_{3x3} kron iota-tilde): 15 x 3 with identical columns.
Matrix b_star() {
    Matrix b(15, 3);
    const Vector it = iota_tilde();
    for (int block = 0; block < 3; ++block)
        for (int col = 0; col < 3; ++col) b.block(5 * block, col, 5, 1) = it;
    return b;
}

double spectral_radius(const Matrix& m) {
    Eigen::EigenSolver<Matrix> solver(m, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

// Companion matrix of the VAR implied by the VECM; explosive dynamics are a
// configuration error, unit roots are expected.
void check_companion(const VecmParams& params) {
    const Index n = params.n_series();
    const int p = static_cast<int>(params.short_run.size());
    const Matrix long_run = params.adjustment * params.coint.transpose();

    std::vector<Matrix> var(p + 1, Matrix::Zero(n, n));
    var[0] = Matrix::Identity(n, n) + long_run;
    if (p >= 1) var[0] += params.short_run[0];
    for (int j = 1; j < p; ++j) var[j] = params.short_run[j] - params.short_run[j - 1];
    if (p >= 1) var[p] = -params.short_run[p - 1];

    Matrix companion = Matrix::Zero(n * (p + 1), n * (p + 1));
    for (int j = 0; j <= p; ++j) companion.block(0, j * n, n, n) = var[j];
    if (p >= 1)
        companion.block(n, 0, n * p, n * p) = Matrix::Identity(n * p, n * p);

    if (spectral_radius(companion) > 1.0 + 1e-8)
        throw std::runtime_error("explosive companion matrix for the requested DGP");
}

Matrix chang_covariance_impl(int n, Rng& rng) {
    for (int attempt = 0; attempt < 16; ++attempt) {
        const Matrix u = rng.uniform_matrix(n, n);
        const Matrix gram = u.transpose() * u;
        Eigen::SelfAdjointEigenSolver<Matrix> eigs(gram);
        if (eigs.eigenvalues().minCoeff() <= 1e-12 * eigs.eigenvalues().maxCoeff()) continue;
        const Matrix gram_inv_sqrt = eigs.operatorInverseSqrt();
        const Matrix h = u * gram_inv_sqrt;

        Vector lambda(n);
        lambda[0] = 0.01;
        lambda[n - 1] = 1.0;
        for (int i = 1; i < n - 1; ++i) lambda[i] = rng.uniform(0.1, 1.0);
        return h * lambda.asDiagonal() * h.transpose();
    }
    throw std::runtime_error("could not draw a full-rank uniform matrix");
}

// Simulates the VECM with z_0 = 0 and `burn` discarded periods; returns
// keep rows.
Matrix simulate_vecm(const VecmParams& params, Index keep, int burn, Rng& rng) {
    const Index n = params.n_series();
    const int p = static_cast<int>(params.short_run.size());
    const Matrix long_run = params.adjustment * params.coint.transpose();
    const Eigen::LLT<Matrix> chol(params.innovation_cov);
    if (chol.info() != Eigen::Success)
        throw std::runtime_error("innovation covariance is not positive definite");
    const Matrix chol_l = chol.matrixL();

    const Index total = keep + burn;
    Matrix z = Matrix::Zero(total, n);
    Matrix dz = Matrix::Zero(total, n);

    Vector level = Vector::Zero(n);
    for (Index t = 0; t < total; ++t) {
        Vector shock = chol_l * rng.normal_vector(n);
        Vector diff = shock;
        if (t >= 1) diff += long_run * z.row(t - 1).transpose();
        for (int j = 1; j <= p; ++j)
            if (t >= static_cast<Index>(j)) diff += params.short_run[j - 1] * dz.row(t - j).transpose();
        level += diff;
        z.row(t) = level.transpose();
        dz.row(t) = diff.transpose();
    }
    return z.bottomRows(keep);
}

std::vector<std::string> default_labels(Index n) {
    std::vector<std::string> labels(n);
    labels[0] = "y";
    for (Index i = 1; i < n; ++i) labels[i] = "x" + std::to_string(i);
    return labels;
}

}  // namespace

const char* family_name(DgpFamily family) {
    switch (family) {
        case DgpFamily::table2_low_we: return "table2_low_we";
        case DgpFamily::table2_low_nowe: return "table2_low_nowe";
        case DgpFamily::table2_high_we: return "table2_high_we";
        case DgpFamily::table2_high_nowe: return "table2_high_nowe";
        case DgpFamily::table3_y_i0: return "table3_y_i0";
        case DgpFamily::table3_y_i1: return "table3_y_i1";
        case DgpFamily::nonsparse_vecm: return "nonsparse_vecm";
        case DgpFamily::factor_model: return "factor_model";
    }
    return "unknown";
}

std::vector<std::string> family_names() {
    return {"table2_low_we",  "table2_low_nowe", "table2_high_we", "table2_high_nowe",
            "table3_y_i0",    "table3_y_i1",     "nonsparse_vecm", "factor_model"};
}

std::optional<DgpFamily> family_from_name(const std::string& name) {
    const auto names = family_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<DgpFamily>(i);
    return std::nullopt;
}

void DgpSpec::validate() const {
    if (adjustment > 0.0 || adjustment < -0.5)
        throw std::invalid_argument("adjustment multiplier must lie in [-0.5, 0]");
    if (T < 50) throw std::invalid_argument("T must be at least 50");
    if (burn_in < 0 || extra_obs < 0) throw std::invalid_argument("negative burn-in or extra_obs");
}

VecmParams make_vecm_params(const DgpSpec& spec, Rng& rng) {
    spec.validate();
    const double a = spec.adjustment;
    const double rho = 0.8;
    const Vector it = iota_tilde();

    VecmParams params;
    auto finish = [&](Index n) {
        params.short_run = {0.4 * Matrix::Identity(n, n)};
        params.mean = Vector::Zero(n);
        params.trend = Vector::Zero(n);
        if (params.innovation_cov.size() == 0) params.innovation_cov = toeplitz_cov(n, rho);
    };

    switch (spec.family) {
        case DgpFamily::table2_low_we: {
            const Index n = 10;
            params.adjustment = Matrix::Zero(n, 1);
            params.adjustment(0, 0) = a;
            params.coint = Matrix::Zero(n, 1);
            params.coint.block(0, 0, 5, 1) = it;
            finish(n);
            break;
        }
        case DgpFamily::table2_low_nowe: {
            const Index n = 10;
            params.coint = Matrix::Zero(n, 2);
            params.coint.block(0, 0, 5, 1) = it;
            params.coint.block(5, 1, 5, 1) = it;
            params.adjustment = a * params.coint;
            finish(n);
            break;
        }
        case DgpFamily::table2_high_we: {
            const Index n = 50;
            params.adjustment = Matrix::Zero(n, 1);
            params.adjustment(0, 0) = a;
            params.coint = Matrix::Zero(n, 1);
            params.coint.block(0, 0, 5, 1) = it;
            finish(n);
            break;
        }
        case DgpFamily::table2_high_nowe: {
            const Index n = 50;
            params.coint = Matrix::Zero(n, 3);
            for (int j = 0; j < 3; ++j) params.coint.block(5 * j, j, 5, 1) = it;
            params.adjustment = a * params.coint;
            finish(n);
            break;
        }
        case DgpFamily::table3_y_i0: {
            const Index n = 50;
            const Index r = 1 + 3 + 24;
            const double b = spec.persistence == DgpSpec::Persistence::low ? 1.0 : rng.uniform(0.0, 0.2);
            params.adjustment = Matrix::Zero(n, r);
            params.coint = Matrix::Zero(n, r);
            params.adjustment(0, 0) = 1.0;
            params.coint(0, 0) = -b;
            params.adjustment.block(1, 1, 15, 3) = a * b_star();
            params.coint.block(1, 1, 15, 3) = b_star();
            for (int j = 0; j < 24; ++j) {
                params.adjustment(26 + j, 4 + j) = 1.0;
                const double bj =
                    spec.persistence == DgpSpec::Persistence::low ? 1.0 : rng.uniform(0.0, 0.2);
                params.coint(26 + j, 4 + j) = -bj;
            }
            finish(n);
            break;
        }
        case DgpFamily::table3_y_i1: {
            const Index n = 50;
            const Index r = 3 + 25;
            params.adjustment = Matrix::Zero(n, r);
            params.coint = Matrix::Zero(n, r);
            params.adjustment.block(0, 0, 15, 3) = a * b_star();
            params.coint.block(0, 0, 15, 3) = b_star();
            for (int j = 0; j < 25; ++j) {
                params.adjustment(25 + j, 3 + j) = 1.0;
                const double bj =
                    spec.persistence == DgpSpec::Persistence::low ? 1.0 : rng.uniform(0.0, 0.2);
                params.coint(25 + j, 3 + j) = -bj;
            }
            finish(n);
            break;
        }
        case DgpFamily::nonsparse_vecm: {
            const Index n = 15;
            params.coint = Matrix::Zero(n, 3);
            for (int j = 0; j < 3; ++j) params.coint.block(5 * j, j, 5, 1) = it;
            params.adjustment = a * params.coint;
            params.innovation_cov = chang_covariance_impl(static_cast<int>(n), rng);
            finish(n);
            break;
        }
        case DgpFamily::factor_model:
            throw std::invalid_argument("factor_model has no VECM parameterization");
    }
    params.validate();
    return params;
}

GeneratedData gen_vecm(const DgpSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    const VecmParams params = make_vecm_params(spec, rng);
    check_companion(params);

    GeneratedData data;
    data.panel.values = simulate_vecm(params, spec.T + spec.extra_obs, spec.burn_in, rng);
    data.panel.target_index = 0;
    data.panel.labels = default_labels(params.n_series());
    data.truth = implied_single_equation(params, 1);
    data.params = params;
    return data;
}

Matrix chang_covariance(int n, Rng& rng) {
    if (n < 2) throw std::invalid_argument("covariance needs dimension >= 2");
    return chang_covariance_impl(n, rng);
}

Matrix chang_covariance(int n, std::uint64_t seed) {
    Rng rng(seed);
    return chang_covariance(n, rng);
}

TimeSeriesPanel gen_factor(const DgpSpec& spec, std::uint64_t seed) {
    spec.validate();
    if (spec.family != DgpFamily::factor_model)
        throw std::invalid_argument("gen_factor requires the factor_model family");
    Rng rng(seed);

    const Index n = 50;
    const Index total = spec.T + spec.extra_obs + spec.burn_in;
    const double alpha2 = spec.factor_dynamics ? 0.4 : 0.0;
    const double beta2 = spec.factor_dynamics ? 0.4 : 0.0;
    const Matrix a1 = spec.factor_dynamics ? Matrix(0.4 * Matrix::Identity(n, n)) : Matrix(Matrix::Zero(n, n));
    const Matrix b1 = a1;

    const Matrix sigma = chang_covariance_impl(static_cast<int>(n), rng);
    const Eigen::LLT<Matrix> chol(sigma);
    const Matrix chol_l = chol.matrixL();

    // Loadings and idiosyncratic AR coefficients; the cited design leaves
    // them free, defaults flagged in the report metadata.
    Vector loadings(n), idio_ar(n);
    for (Index i = 0; i < n; ++i) loadings[i] = rng.uniform(0.5, 1.5);
    for (Index i = 0; i < n; ++i) idio_ar[i] = rng.uniform(0.0, 0.4);

    Matrix z(total, n);
    Vector v_prev = Vector::Zero(n);
    Vector eps1_prev = Vector::Zero(n);
    Vector omega = Vector::Zero(n);
    double zeta_prev = 0.0, eps2_prev = 0.0, factor = 0.0;
    for (Index t = 0; t < total; ++t) {
        const Vector eps1 = chol_l * rng.normal_vector(n);
        const double eps2 = rng.normal();
        const Vector v = a1 * v_prev + eps1 + b1 * eps1_prev;
        const double zeta = alpha2 * zeta_prev + eps2 + beta2 * eps2_prev;
        factor = spec.factor_ar * factor + zeta;
        omega = idio_ar.asDiagonal() * omega + v;
        z.row(t) = (loadings * factor + omega).transpose();
        v_prev = v;
        eps1_prev = eps1;
        zeta_prev = zeta;
        eps2_prev = eps2;
    }

    TimeSeriesPanel panel;
    panel.values = z.bottomRows(spec.T + spec.extra_obs);
    panel.target_index = 0;
    panel.labels = default_labels(n);
    return panel;
}

GeneratedData generate(const DgpSpec& spec, std::uint64_t seed) {
    if (spec.family == DgpFamily::factor_model) {
        GeneratedData data;
        data.panel = gen_factor(spec, seed);
        return data;
    }
    return gen_vecm(spec, seed);
}

}  // namespace specs
