#include "specs/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace specs {

namespace {

double soft_threshold(double x, double t) {
    const double shrunk = std::abs(x) - t;
    return shrunk <= 0.0 ? 0.0 : (x < 0.0 ? -shrunk : shrunk);
}

// Quadratic part of the objective held in Gram form:
// ||y - X g||^2 = y'y - 2 c'g + g'G g with G = X'X, c = X'y.
struct QuadraticForm {
    Matrix gram;
    Vector xty;
    double yty = 0.0;
    double lipschitz = 0.0;  // 2 * lambda_max(gram)

    explicit QuadraticForm(const Matrix& x, const Vector& y, int power_iterations,
                           double power_tolerance) {
        gram.noalias() = x.transpose() * x;
        xty.noalias() = x.transpose() * y;
        yty = y.squaredNorm();

        // Power iteration for the top eigenvalue; deterministic start.
        const Index n = gram.cols();
        Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
        double eig = 0.0;
        for (int it = 0; it < power_iterations; ++it) {
            Vector w = gram * v;
            const double norm = w.norm();
            if (norm <= 0.0) break;
            w /= norm;
            const double next = w.dot(gram * w);
            const bool settled = std::abs(next - eig) <= power_tolerance * std::max(1.0, next);
            eig = next;
            v = w;
            if (settled) break;
        }
        lipschitz = 2.0 * std::max(eig, 1e-300) * (1.0 + 1e-9);
    }

    double loss(const Vector& g, const Vector& gram_g) const {
        return yty - 2.0 * xty.dot(g) + g.dot(gram_g);
    }
};

struct PenaltySpec {
    const Vector* omega;
    int n_group_cols;
    double lambda_individual;
    double lambda_group;
};

double penalty_value(const Vector& g, const PenaltySpec& pen) {
    double value = 0.0;
    for (Index i = 0; i < g.size(); ++i) {
        if (g[i] == 0.0) continue;
        value += pen.lambda_individual * (*pen.omega)[i] * std::abs(g[i]);
    }
    if (pen.lambda_group > 0.0 && pen.n_group_cols > 0)
        value += pen.lambda_group * g.head(pen.n_group_cols).norm();
    return value;
}

// Exact proximal map of the composite penalty: per-coordinate soft
// threshold, then l2 shrinkage of the group block. Infinite weights pin
// their coordinate to zero regardless of the penalty level.
void apply_prox(Vector& g, const PenaltySpec& pen, double step) {
    for (Index i = 0; i < g.size(); ++i) {
        const double w = (*pen.omega)[i];
        if (std::isinf(w)) {
            g[i] = 0.0;
        } else if (w > 0.0 && pen.lambda_individual > 0.0) {
            g[i] = soft_threshold(g[i], step * pen.lambda_individual * w);
        }
    }
    if (pen.lambda_group > 0.0 && pen.n_group_cols > 0) {
        const double norm = g.head(pen.n_group_cols).norm();
        if (norm <= step * pen.lambda_group)
            g.head(pen.n_group_cols).setZero();
        else
            g.head(pen.n_group_cols) *= 1.0 - step * pen.lambda_group / norm;
    }
}

struct FitResult {
    Vector coef;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Stationarity residual computed from the Gram form; same quantity as
// kkt_residual_raw but without touching the data matrix.
double kkt_from_gram(const QuadraticForm& quad, const PenaltySpec& pen, const Vector& coef) {
    const Vector grad = 2.0 * (quad.xty - quad.gram * coef);
    const double scale = std::max(2.0 * quad.xty.lpNorm<Eigen::Infinity>(), 1e-300);
    const int n_grp = pen.n_group_cols;
    const double group_norm = n_grp > 0 ? coef.head(n_grp).norm() : 0.0;
    double worst = 0.0;
    for (Index i = 0; i < coef.size(); ++i) {
        const double w = (*pen.omega)[i];
        if (std::isinf(w)) continue;
        const bool in_group = i < n_grp;
        const double group_term =
            (in_group && group_norm > 0.0) ? pen.lambda_group * coef[i] / group_norm : 0.0;
        if (coef[i] != 0.0) {
            const double sign = coef[i] > 0.0 ? 1.0 : -1.0;
            worst = std::max(worst,
                             std::abs(grad[i] - pen.lambda_individual * w * sign - group_term));
        } else if (!(in_group && group_norm == 0.0 && pen.lambda_group > 0.0)) {
            worst = std::max(worst, std::abs(grad[i]) - pen.lambda_individual * w);
        }
    }
    if (n_grp > 0 && group_norm == 0.0 && pen.lambda_group > 0.0) {
        double norm_sq = 0.0;
        for (Index i = 0; i < n_grp; ++i) {
            if (std::isinf((*pen.omega)[i])) continue;
            const double s = soft_threshold(grad[i], pen.lambda_individual * (*pen.omega)[i]);
            norm_sq += s * s;
        }
        worst = std::max(worst, std::sqrt(norm_sq) - pen.lambda_group);
    }
    return std::max(worst, 0.0) / scale;
}

// Solves the stationarity system restricted to `active` with fixed signs.
// Sign inconsistencies are handled per `flip_signs`: either the offending
// coordinates are dropped and the solve repeats, or their assumed signs are
// flipped (the right move when the penalty is negligible). With an active
// group block the system is linear given the block norm, so a scalar fixed
// point runs inside. Returns a full-length vector, or an empty one when no
// consistent solution emerges.
Vector sign_constrained_solve(const QuadraticForm& quad, const PenaltySpec& pen,
                              IndexSet active, Vector signs, bool flip_signs,
                              double norm_start = 1.0) {
    const Index dim = quad.gram.cols();
    for (int pass_outer = 0; pass_outer < 30 && !active.empty(); ++pass_outer) {
        const Index m = static_cast<Index>(active.size());
        Matrix gram_a(m, m);
        Vector rhs(m);
        std::vector<bool> in_group(m);
        Index n_group_active = 0;
        for (Index r = 0; r < m; ++r) {
            rhs[r] = 2.0 * quad.xty[active[r]] -
                     pen.lambda_individual * (*pen.omega)[active[r]] * signs[r];
            in_group[r] = active[r] < pen.n_group_cols;
            if (in_group[r]) ++n_group_active;
            for (Index c = 0; c < m; ++c) gram_a(r, c) = quad.gram(active[r], active[c]);
        }

        Vector solved(m);
        if (pen.lambda_group > 0.0 && n_group_active > 0) {
            double norm = norm_start > 0.0 ? norm_start : 1.0;
            for (int pass = 0; pass < 200; ++pass) {
                Matrix system = 2.0 * gram_a;
                for (Index r = 0; r < m; ++r)
                    if (in_group[r]) system(r, r) += pen.lambda_group / norm;
                solved = Eigen::LDLT<Matrix>(system).solve(rhs);
                double next = 0.0;
                for (Index r = 0; r < m; ++r)
                    if (in_group[r]) next += solved[r] * solved[r];
                next = std::sqrt(next);
                if (next <= 1e-300) return Vector();
                const bool settled = std::abs(next - norm) <= 1e-14 * std::max(1.0, next);
                norm = next;
                if (settled) break;
            }
        } else {
            solved = Eigen::LDLT<Matrix>(Matrix(2.0 * gram_a)).solve(rhs);
        }
        if (!solved.allFinite()) return Vector();

        bool consistent = true;
        if (flip_signs) {
            for (Index r = 0; r < m; ++r) {
                const bool penalized =
                    pen.lambda_individual * (*pen.omega)[active[r]] > 0.0;
                if (penalized && solved[r] != 0.0 && solved[r] * signs[r] < 0.0) {
                    signs[r] = -signs[r];
                    consistent = false;
                }
            }
            if (consistent) {
                Vector full = Vector::Zero(dim);
                for (Index r = 0; r < m; ++r) full[active[r]] = solved[r];
                return full;
            }
            continue;
        }

        // Drop sign violations and retry; keep penalty-free coordinates.
        IndexSet kept;
        Vector kept_signs(m);
        Index n_kept = 0;
        for (Index r = 0; r < m; ++r) {
            const bool penalized =
                pen.lambda_individual * (*pen.omega)[active[r]] > 0.0;
            if (penalized && solved[r] * signs[r] <= 0.0) continue;
            kept.push_back(active[r]);
            kept_signs[n_kept++] = signs[r];
        }
        if (kept.size() == active.size()) {
            Vector full = Vector::Zero(dim);
            for (Index r = 0; r < m; ++r) full[active[r]] = solved[r];
            return full;
        }
        active = std::move(kept);
        signs = kept_signs.head(n_kept);
    }
    return Vector();
}

// Exact refinement of the support found by the proximal iterations: solve
// on the current active set (in both sign-handling modes), then repeatedly
// admit the worst inactive stationarity violator, including a violated
// group block. Candidates are kept only when they lower the stationarity
// residual without raising the objective, so a wrong active set is
// harmless.
void polish_active_set(const QuadraticForm& quad, const PenaltySpec& pen, FitResult& fit) {
    const Index dim = quad.gram.cols();
    double best_kkt = kkt_from_gram(quad, pen, fit.coef);
    const double obj_tol = 1e-12 * std::max(1.0, std::abs(fit.objective));

    auto try_candidate = [&](const Vector& candidate) {
        if (candidate.size() != dim) return;
        const double cand_obj =
            quad.loss(candidate, quad.gram * candidate) + penalty_value(candidate, pen);
        const double cand_kkt = kkt_from_gram(quad, pen, candidate);
        if (cand_obj <= fit.objective + obj_tol && cand_kkt < best_kkt) {
            fit.coef = candidate;
            fit.objective = std::min(fit.objective, cand_obj);
            best_kkt = cand_kkt;
        }
    };

    for (int round = 0; round < 16; ++round) {
        IndexSet active;
        for (Index i = 0; i < dim; ++i)
            if (fit.coef[i] != 0.0) active.push_back(i);

        const Vector grad = 2.0 * (quad.xty - quad.gram * fit.coef);
        const double group_norm =
            pen.n_group_cols > 0 ? fit.coef.head(pen.n_group_cols).norm() : 0.0;
        const bool group_zero = pen.n_group_cols > 0 && group_norm == 0.0 &&
                                pen.lambda_group > 0.0;

        // Worst individual violator outside a zeroed group block.
        Index worst_violator = -1;
        double worst_slack = 0.0;
        for (Index i = 0; i < dim; ++i) {
            if (fit.coef[i] != 0.0 || std::isinf((*pen.omega)[i])) continue;
            if (group_zero && i < pen.n_group_cols) continue;
            const double slack =
                std::abs(grad[i]) - pen.lambda_individual * (*pen.omega)[i];
            if (slack > worst_slack) {
                worst_slack = slack;
                worst_violator = i;
            }
        }

        // A zeroed group block violating its norm condition enters jointly.
        IndexSet group_entrants;
        if (group_zero) {
            double norm_sq = 0.0;
            std::vector<std::pair<Index, double>> thresholded;
            for (Index i = 0; i < pen.n_group_cols; ++i) {
                if (std::isinf((*pen.omega)[i])) continue;
                const double s =
                    soft_threshold(grad[i], pen.lambda_individual * (*pen.omega)[i]);
                norm_sq += s * s;
                if (s != 0.0) thresholded.emplace_back(i, s);
            }
            if (std::sqrt(norm_sq) > pen.lambda_group)
                for (const auto& [i, s] : thresholded) group_entrants.push_back(i);
        }

        Vector signs(active.size() + group_entrants.size() + 1);
        for (std::size_t r = 0; r < active.size(); ++r)
            signs[static_cast<Index>(r)] = fit.coef[active[r]] > 0.0 ? 1.0 : -1.0;
        Index n_signs = static_cast<Index>(active.size());
        if (round > 0) {
            for (Index i : group_entrants) {
                active.push_back(i);
                signs[n_signs++] = grad[i] > 0.0 ? 1.0 : -1.0;
            }
            if (group_entrants.empty() && worst_violator >= 0) {
                active.push_back(worst_violator);
                signs[n_signs++] = grad[worst_violator] > 0.0 ? 1.0 : -1.0;
            }
        }
        if (active.empty()) return;

        const double prev_kkt = best_kkt;
        const double norm_start = group_norm > 0.0 ? group_norm : 1.0;
        try_candidate(
            sign_constrained_solve(quad, pen, active, signs.head(n_signs), false, norm_start));
        try_candidate(
            sign_constrained_solve(quad, pen, active, signs.head(n_signs), true, norm_start));
        if (best_kkt <= 1e-9) return;
        if (round > 0 && best_kkt >= prev_kkt && worst_violator < 0 && group_entrants.empty())
            return;
    }
}

FitResult proximal_gradient(const QuadraticForm& quad, const PenaltySpec& pen,
                            const SolverConfig& config, const Vector* warm_start) {
    const Index n = quad.gram.cols();
    Vector current = warm_start && warm_start->size() == n ? *warm_start : Vector::Zero(n);
    apply_prox(current, pen, 0.0);  // enforce pins on the warm start

    const double base_step = 1.0 / quad.lipschitz;
    Vector gram_cur = quad.gram * current;
    double objective = quad.loss(current, gram_cur) + penalty_value(current, pen);

    Vector momentum_point = current;
    Vector previous = current;
    double t_accel = 1.0;

    FitResult result;
    auto step_from = [&](const Vector& point, double step) {
        Vector g = point - step * 2.0 * (quad.gram * point - quad.xty);
        apply_prox(g, pen, step);
        return g;
    };

    // Objective plateaus can precede support identification on collinear
    // designs and near the group-penalty kink, so after each plateau the
    // active set is polished exactly and the iteration resumes unless the
    // stationarity residual is already small. When neither the iterations
    // nor the polish make progress, the plateau tolerance tightens so the
    // next stretch of iterations digs deeper before giving up. The kkt
    // target sits below the 1e-6 contract with margin.
    constexpr double kKktTarget = 1e-8;
    constexpr double kToleranceFloor = 1e-16;

    int it = 0;
    double working_tol = config.tolerance;
    double last_plateau_kkt = std::numeric_limits<double>::infinity();
    while (it < config.max_iterations) {
        bool plateau = false;
        for (; it < config.max_iterations; ++it) {
            Vector candidate = step_from(config.accelerate ? momentum_point : current, base_step);
            Vector gram_cand = quad.gram * candidate;
            double cand_obj = quad.loss(candidate, gram_cand) + penalty_value(candidate, pen);

            if (cand_obj > objective) {
                // Momentum overshoot: restart from the current iterate.
                t_accel = 1.0;
                candidate = step_from(current, base_step);
                gram_cand = quad.gram * candidate;
                cand_obj = quad.loss(candidate, gram_cand) + penalty_value(candidate, pen);
                double step = base_step;
                int halvings = 0;
                while (cand_obj > objective && halvings < 60) {
                    step *= 0.5;
                    ++halvings;
                    candidate = step_from(current, step);
                    gram_cand = quad.gram * candidate;
                    cand_obj = quad.loss(candidate, gram_cand) + penalty_value(candidate, pen);
                }
                if (cand_obj > objective) {
                    // No descent direction left at machine precision.
                    plateau = true;
                    break;
                }
            }

            if (!candidate.allFinite())
                throw std::runtime_error("solver produced non-finite iterate");

            const double decrease = objective - cand_obj;
            previous = current;
            current = candidate;

            if (config.accelerate) {
                const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_accel * t_accel));
                momentum_point = current + ((t_accel - 1.0) / t_next) * (current - previous);
                t_accel = t_next;
            }

            objective = cand_obj;
            if (decrease <= working_tol * std::max(1.0, std::abs(objective))) {
                plateau = true;
                ++it;
                break;
            }
        }

        result.coef = current;
        result.objective = objective;
        polish_active_set(quad, pen, result);
        current = result.coef;
        objective = result.objective;

        if (plateau) result.converged = true;
        const double kkt_now = kkt_from_gram(quad, pen, current);
        if (kkt_now <= kKktTarget) break;
        if (!plateau) break;  // iteration budget exhausted

        if (kkt_now >= last_plateau_kkt * 0.5) {
            if (working_tol <= kToleranceFloor) break;  // out of precision headroom
            working_tol = std::max(working_tol * 1e-3, kToleranceFloor);
        }
        last_plateau_kkt = kkt_now;

        // Resume from the polished point with fresh momentum.
        momentum_point = current;
        previous = current;
        t_accel = 1.0;
    }

    result.coef = current;
    result.objective = objective;
    result.iterations = it;
    return result;
}

IndexSet active_indices(const Vector& segment) {
    IndexSet out;
    for (Index i = 0; i < segment.size(); ++i)
        if (segment[i] != 0.0) out.push_back(i);
    return out;
}

// Scaled stationarity residual on raw matrices.
double kkt_residual_raw(const Vector& y, const Matrix& x, int n_group_cols, const Vector& omega,
                        double lambda_individual, double lambda_group, const Vector& coef) {
    const Vector residual = y - x * coef;
    const Vector grad = 2.0 * (x.transpose() * residual);  // equals -d loss / d g
    const double scale = std::max(2.0 * (x.transpose() * y).lpNorm<Eigen::Infinity>(), 1e-300);

    const int n_grp = n_group_cols;
    const double group_norm = n_grp > 0 ? coef.head(n_grp).norm() : 0.0;
    double worst = 0.0;

    for (Index i = 0; i < coef.size(); ++i) {
        const double w = omega[i];
        if (std::isinf(w)) continue;
        const bool in_group = i < n_grp;
        const double group_term =
            (in_group && group_norm > 0.0) ? lambda_group * coef[i] / group_norm : 0.0;
        if (coef[i] != 0.0) {
            const double sign = coef[i] > 0.0 ? 1.0 : -1.0;
            worst = std::max(worst,
                             std::abs(grad[i] - lambda_individual * w * sign - group_term));
        } else if (!(in_group && group_norm == 0.0 && lambda_group > 0.0)) {
            const double slack = std::abs(grad[i]) - lambda_individual * w;
            worst = std::max(worst, slack);
        }
    }

    // Zero group block: the soft-thresholded gradient must fit in the group
    // penalty ball.
    if (n_grp > 0 && group_norm == 0.0 && lambda_group > 0.0) {
        double norm_sq = 0.0;
        for (Index i = 0; i < n_grp; ++i) {
            if (std::isinf(omega[i])) continue;
            const double s = soft_threshold(grad[i], lambda_individual * omega[i]);
            norm_sq += s * s;
        }
        worst = std::max(worst, std::sqrt(norm_sq) - lambda_group);
    }

    return std::max(worst, 0.0) / scale;
}

}  // namespace

AdaptiveWeights compute_weights(const Vector& init, double k_level, double k_diff, int n_levels) {
    if (k_level <= 0.0 || k_diff <= 0.0)
        throw std::invalid_argument("weight exponents must be positive");
    if (n_levels < 0 || n_levels > init.size())
        throw std::invalid_argument("level count out of range");

    AdaptiveWeights weights;
    weights.omega.resize(init.size());
    weights.n_levels = n_levels;
    weights.k_level = k_level;
    weights.k_diff = k_diff;
    for (Index i = 0; i < init.size(); ++i) {
        if (init[i] == 0.0) {
            weights.omega[i] = std::numeric_limits<double>::infinity();
            weights.excluded.push_back(i);
        } else {
            const double k = i < n_levels ? k_level : k_diff;
            weights.omega[i] = std::pow(std::abs(init[i]), -k);
        }
    }
    return weights;
}

Vector ridge_fit(const CecmDesign& design, double ridge_penalty) {
    if (ridge_penalty < 0.0) throw std::invalid_argument("ridge penalty must be >= 0");
    const Index n = design.V_proj.cols();
    if (ridge_penalty == 0.0 && n >= design.t_eff())
        throw std::invalid_argument("unpenalized fit needs more rows than coefficients");

    Matrix gram = design.V_proj.transpose() * design.V_proj;
    gram.diagonal().array() += ridge_penalty;
    Eigen::LDLT<Matrix> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("ridge system could not be factorized");
    if (ridge_penalty == 0.0) {
        const Vector d = ldlt.vectorD();
        const double dmax = d.maxCoeff();
        if (dmax <= 0.0 || d.minCoeff() <= dmax * 1e-13)
            throw std::runtime_error("design is numerically rank deficient at penalty 0");
    }
    return ldlt.solve(design.V_proj.transpose() * design.dy_proj);
}

Vector ridge_init(const CecmDesign& design) {
    return ridge_init(design.dy_proj, design.V_proj);
}

Vector ridge_init(const Vector& response, const Matrix& regressors) {
    const Index t = response.size();
    const Index split = (2 * t) / 3;
    if (split < 4 || t - split < 2) throw std::invalid_argument("sample too short for ridge init");

    const Matrix x_train = regressors.topRows(split);
    const Vector y_train = response.head(split);
    const Matrix x_test = regressors.bottomRows(t - split);
    const Vector y_test = response.tail(t - split);

    Matrix gram_train = x_train.transpose() * x_train;
    const Vector xty_train = x_train.transpose() * y_train;

    // Conditioning floor keeps the smallest candidate solvable.
    Eigen::SelfAdjointEigenSolver<Matrix> eigs(gram_train);
    const double tol = 1e-10;
    const double floor_shift =
        std::max(0.0, (eigs.eigenvalues().maxCoeff() * tol - eigs.eigenvalues().minCoeff()) /
                          (1.0 - tol));

    double best_sse = std::numeric_limits<double>::infinity();
    double best_penalty = floor_shift + 0.1;
    for (int j = 0; j < 6; ++j) {
        const double penalty = std::pow(10.0, j - 1) + floor_shift;
        Matrix shifted = gram_train;
        shifted.diagonal().array() += penalty;
        const Vector beta = Eigen::LDLT<Matrix>(shifted).solve(xty_train);
        const double sse = (y_test - x_test * beta).squaredNorm();
        if (sse < best_sse) {
            best_sse = sse;
            best_penalty = penalty;
        }
    }

    Matrix gram = regressors.transpose() * regressors;
    gram.diagonal().array() += best_penalty;
    return Eigen::LDLT<Matrix>(gram).solve(regressors.transpose() * response);
}

double lambda_max_individual(const CecmDesign& design, const AdaptiveWeights& weights) {
    if (weights.omega.size() != design.V_proj.cols())
        throw std::invalid_argument("weight length does not match design");
    const Vector xty = design.V_proj.transpose() * design.dy_proj;
    double lmax = 0.0;
    bool any_finite = false;
    for (Index i = 0; i < xty.size(); ++i) {
        if (weights.is_excluded(i)) continue;
        any_finite = true;
        lmax = std::max(lmax, 2.0 * std::abs(xty[i]) / weights.omega[i]);
    }
    if (!any_finite) throw std::invalid_argument("all weights are infinite");
    return lmax;
}

PenaltyGrid build_grid(const CecmDesign& design, const AdaptiveWeights& weights, int n_individual,
                       int n_group, double eps_ratio) {
    if (n_individual < 2) throw std::invalid_argument("individual grid needs at least 2 points");
    if (n_group < 1) throw std::invalid_argument("group grid needs at least 1 point");
    if (eps_ratio <= 0.0 || eps_ratio >= 1.0)
        throw std::invalid_argument("eps_ratio must lie in (0, 1)");

    PenaltyGrid grid;
    const double lmax = lambda_max_individual(design, weights);
    const double lmin = eps_ratio * lmax;
    grid.lambda_individual.resize(n_individual);
    const double log_hi = std::log(lmax), log_lo = std::log(lmin);
    for (int i = 0; i < n_individual; ++i)
        grid.lambda_individual[i] =
            std::exp(log_hi + (log_lo - log_hi) * i / static_cast<double>(n_individual - 1));

    grid.lambda_group.push_back(0.0);
    if (n_group > 1) {
        const double gmax =
            2.0 * (design.levels_proj().transpose() * design.dy_proj).norm();
        const double gmin = 1e-3 * gmax;
        const int extra = n_group - 1;
        for (int i = 0; i < extra; ++i) {
            const double frac = extra == 1 ? 0.0 : i / static_cast<double>(extra - 1);
            grid.lambda_group.push_back(
                std::exp(std::log(gmin) + (std::log(gmax) - std::log(gmin)) * frac));
        }
    }
    return grid;
}

SpecsSolution fit_penalized(const Vector& response, const Matrix& regressors, int n_group_cols,
                            const AdaptiveWeights& weights, double lambda_individual,
                            double lambda_group, const SolverConfig& config,
                            const Vector* warm_start) {
    if (weights.omega.size() != regressors.cols())
        throw std::invalid_argument("weight length does not match regressor count");
    if (!(lambda_individual >= 0.0) || !(lambda_group >= 0.0))
        throw std::invalid_argument("penalties must be finite and non-negative");

    Matrix scaled;
    Vector col_scale;
    const Matrix* x = &regressors;
    if (config.standardize) {
        col_scale = regressors.colwise().norm();
        scaled = regressors;
        for (Index j = 0; j < scaled.cols(); ++j)
            if (col_scale[j] > 0.0) scaled.col(j) /= col_scale[j];
        x = &scaled;
    }

    QuadraticForm quad(*x, response, config.power_iterations, config.power_tolerance);
    PenaltySpec pen{&weights.omega, n_group_cols, lambda_individual, lambda_group};

    Vector warm_scaled;
    const Vector* warm = warm_start;
    if (config.standardize && warm_start && warm_start->size() == regressors.cols()) {
        warm_scaled = *warm_start;
        for (Index j = 0; j < warm_scaled.size(); ++j)
            if (col_scale[j] > 0.0) warm_scaled[j] *= col_scale[j];
        warm = &warm_scaled;
    }

    FitResult fit = proximal_gradient(quad, pen, config, warm);

    SpecsSolution solution;
    solution.coef = fit.coef;
    if (config.standardize)
        for (Index j = 0; j < solution.coef.size(); ++j)
            if (col_scale[j] > 0.0) solution.coef[j] /= col_scale[j];
    solution.n_levels = n_group_cols;
    solution.lambda_individual = lambda_individual;
    solution.lambda_group = lambda_group;
    solution.objective = fit.objective;
    solution.iterations = fit.iterations;
    solution.converged = fit.converged;
    solution.active_levels = active_indices(solution.coef.head(n_group_cols));
    solution.active_diffs = active_indices(solution.coef.tail(solution.coef.size() - n_group_cols));
    solution.kkt_residual = kkt_residual_raw(response, *x, n_group_cols, weights.omega,
                                             lambda_individual, lambda_group, fit.coef);
    return solution;
}

SpecsSolution specs_fit(const CecmDesign& design, const AdaptiveWeights& weights,
                        double lambda_individual, double lambda_group, const SolverConfig& config,
                        const Vector* warm_start) {
    SpecsSolution solution =
        fit_penalized(design.dy_proj, design.V_proj, design.n_series, weights, lambda_individual,
                      lambda_group, config, warm_start);
    solution.det_coef = recover_theta(design, solution.coef);
    return solution;
}

std::vector<SpecsSolution> specs_path(const CecmDesign& design, const AdaptiveWeights& weights,
                                      const PenaltyGrid& grid, const SolverConfig& config) {
    if (grid.lambda_individual.empty() || grid.lambda_group.empty())
        throw std::invalid_argument("penalty grid is empty");

    std::vector<SpecsSolution> path;
    path.reserve(grid.lambda_individual.size() * grid.lambda_group.size());
    for (double lg : grid.lambda_group) {
        Vector warm = Vector::Zero(design.V_proj.cols());
        for (double li : grid.lambda_individual) {
            try {
                SpecsSolution solution = specs_fit(design, weights, li, lg, config, &warm);
                warm = solution.coef;
                path.push_back(std::move(solution));
            } catch (const std::exception& e) {
                std::ostringstream msg;
                msg << "fit failed at lambda_individual=" << li << ", lambda_group=" << lg << ": "
                    << e.what();
                throw std::runtime_error(msg.str());
            }
        }
    }
    return path;
}

double kkt_residual(const CecmDesign& design, const AdaptiveWeights& weights,
                    const SpecsSolution& solution) {
    return kkt_residual_raw(design.dy_proj, design.V_proj, design.n_series, weights.omega,
                            solution.lambda_individual, solution.lambda_group, solution.coef);
}

}  // namespace specs
