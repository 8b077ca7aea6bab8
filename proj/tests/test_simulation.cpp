#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cstdlib>

#include "specs/dgp.hpp"
#include "specs/estimators.hpp"
#include "specs/metrics.hpp"
#include "specs/monte_carlo.hpp"
#include "specs/parallel.hpp"
#include "specs/serialize.hpp"
#include "test_support.hpp"

using namespace specs;

TEST_CASE("gen_vecm family structure") {
    SUBCASE("low-dimensional weak exogeneity block layout") {
        DgpSpec spec;
        spec.family = DgpFamily::table2_low_we;
        spec.adjustment = -0.5;
        const GeneratedData data = gen_vecm(spec, 1);
        REQUIRE(data.params);
        const VecmParams& p = *data.params;
        CHECK(p.n_series() == 10);
        CHECK(p.rank() == 1);
        CHECK(p.adjustment(0, 0) == -0.5);
        CHECK(p.adjustment.col(0).tail(9).cwiseAbs().maxCoeff() == 0.0);
        Vector iota(5);
        iota << 1, -1, -1, -1, -1;
        CHECK((p.coint.col(0).head(5) - iota).cwiseAbs().maxCoeff() == 0.0);
        CHECK(p.coint.col(0).tail(5).cwiseAbs().maxCoeff() == 0.0);
        CHECK((p.short_run[0] - 0.4 * Matrix::Identity(10, 10)).cwiseAbs().maxCoeff() == 0.0);
        CHECK(data.panel.periods() == 100);

        // N' = 31 parameters: 29 stochastic plus constant and trend.
        const CecmDesign design =
            build_cecm_design(data.panel, 1, Deterministics::constant_and_trend);
        CHECK(design.n_coef() + design.D.cols() == 31);
    }

    SUBCASE("high-dimensional design carries 151 parameters") {
        DgpSpec spec;
        spec.family = DgpFamily::table2_high_we;
        spec.adjustment = -0.3;
        const GeneratedData data = gen_vecm(spec, 2);
        const CecmDesign design =
            build_cecm_design(data.panel, 1, Deterministics::constant_and_trend);
        CHECK(design.n_coef() + design.D.cols() == 151);
    }

    SUBCASE("zero adjustment removes the long-run component") {
        DgpSpec spec;
        spec.family = DgpFamily::table2_low_we;
        spec.adjustment = 0.0;
        const GeneratedData data = gen_vecm(spec, 3);
        CHECK(data.truth->level_coef.cwiseAbs().maxCoeff() == 0.0);
        CHECK(data.truth->active_levels.empty());
    }

    SUBCASE("identical seeds reproduce, different seeds differ") {
        DgpSpec spec;
        spec.family = DgpFamily::table2_low_we;
        spec.adjustment = -0.2;
        const GeneratedData a = gen_vecm(spec, 11);
        const GeneratedData b = gen_vecm(spec, 11);
        const GeneratedData c = gen_vecm(spec, 12);
        CHECK((a.panel.values - b.panel.values).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.panel.values - c.panel.values).cwiseAbs().maxCoeff() > 0.0);
    }

    SUBCASE("verbatim mixed-order design turns explosive for fast adjustment") {
        DgpSpec spec;
        spec.family = DgpFamily::table3_y_i0;
        spec.adjustment = -0.5;
        CHECK_THROWS_WITH_AS(gen_vecm(spec, 4), doctest::Contains("explosive"),
                             std::runtime_error);
        spec.adjustment = -0.05;
        CHECK_NOTHROW(gen_vecm(spec, 4));
    }

    SUBCASE("mixed-order persistence coding redraws per replication") {
        DgpSpec spec;
        spec.family = DgpFamily::table3_y_i0;
        spec.adjustment = -0.05;
        spec.persistence = DgpSpec::Persistence::high;
        Rng rng_a(21), rng_b(22);
        const VecmParams a = make_vecm_params(spec, rng_a);
        const VecmParams b = make_vecm_params(spec, rng_b);
        CHECK(a.coint(0, 0) != b.coint(0, 0));
        CHECK(a.coint(0, 0) < 0.0);
        CHECK(a.coint(0, 0) > -0.2);
    }

    SUBCASE("non-sparse family regenerates the covariance per seed") {
        DgpSpec spec;
        spec.family = DgpFamily::nonsparse_vecm;
        spec.adjustment = -0.3;
        const GeneratedData a = gen_vecm(spec, 5);
        const GeneratedData b = gen_vecm(spec, 6);
        CHECK(a.params->n_series() == 15);
        CHECK((a.params->innovation_cov - b.params->innovation_cov).norm() > 0.0);
        // Contemporaneous coefficients are non-sparse under this covariance.
        CHECK(static_cast<Index>(a.truth->active_diffs.size()) > 10);
    }
}

TEST_CASE("generated data reproduce the implied coefficients at scale") {
    DgpSpec spec;
    spec.family = DgpFamily::table2_low_we;
    spec.adjustment = -0.4;
    spec.T = 5000;
    const GeneratedData data = gen_vecm(spec, 8);
    const CecmDesign design = build_cecm_design(data.panel, 1, Deterministics::constant);

    IndexSet subset;
    for (Index i : data.truth->active_levels) subset.push_back(i);
    for (Index i : data.truth->active_diffs) subset.push_back(design.n_series + i);
    const Vector coef = ols_fit(design, subset);

    // Standard errors from the OLS fit on the active columns.
    Matrix x(design.t_eff(), static_cast<Index>(subset.size()));
    for (std::size_t j = 0; j < subset.size(); ++j)
        x.col(static_cast<Index>(j)) = design.V_proj.col(subset[j]);
    const Vector beta = Eigen::ColPivHouseholderQR<Matrix>(x).solve(design.dy_proj);
    const double sigma2 = (design.dy_proj - x * beta).squaredNorm() /
                          static_cast<double>(design.t_eff() - x.cols() - design.D.cols());
    const Matrix cov = sigma2 * (x.transpose() * x).inverse();

    Vector truth(design.n_coef());
    truth.head(design.n_series) = data.truth->level_coef;
    truth.tail(design.n_diffs) = data.truth->diff_coef;
    for (std::size_t j = 0; j < subset.size(); ++j) {
        const double se = std::sqrt(cov(static_cast<Index>(j), static_cast<Index>(j)));
        CHECK(std::abs(coef[subset[j]] - truth[subset[j]]) < 3.0 * se);
    }
}

TEST_CASE("chang_covariance") {
    SUBCASE("eigenvalue profile") {
        const Matrix sigma = chang_covariance(15, 7);
        Eigen::SelfAdjointEigenSolver<Matrix> eigs(sigma);
        CHECK(std::abs(eigs.eigenvalues().minCoeff() - 0.01) < 1e-10);
        CHECK(std::abs(eigs.eigenvalues().maxCoeff() - 1.0) < 1e-10);
        CHECK((sigma - sigma.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        for (Index i = 1; i < 14; ++i) {
            CHECK(eigs.eigenvalues()[i] >= 0.01 - 1e-12);
            CHECK(eigs.eigenvalues()[i] <= 1.0 + 1e-12);
        }
    }

    SUBCASE("seed determinism") {
        CHECK((chang_covariance(8, 3) - chang_covariance(8, 3)).norm() == 0.0);
        CHECK((chang_covariance(8, 3) - chang_covariance(8, 4)).norm() > 0.0);
    }
}

TEST_CASE("gen_factor") {
    SUBCASE("unit-root factor makes the panel non-stationary") {
        DgpSpec spec;
        spec.family = DgpFamily::factor_model;
        spec.factor_ar = 1.0;
        spec.T = 100;
        const TimeSeriesPanel panel = gen_factor(spec, 9);
        CHECK(panel.series() == 50);
        CHECK(panel.periods() == 100);
        int rejections = 0;
        for (Index j = 0; j < panel.series(); ++j)
            rejections +=
                adf_test(panel.values.col(j), -1, Deterministics::constant).reject_unit_root
                    ? 1
                    : 0;
        CHECK(rejections <= 5);  // <= 10% of 50 series
    }

    SUBCASE("dynamics flag changes the draw") {
        DgpSpec spec;
        spec.family = DgpFamily::factor_model;
        spec.T = 80;
        const TimeSeriesPanel plain = gen_factor(spec, 10);
        spec.factor_dynamics = true;
        const TimeSeriesPanel dyn = gen_factor(spec, 10);
        CHECK((plain.values - dyn.values).cwiseAbs().maxCoeff() > 0.0);
    }
}

TEST_CASE("selection metrics worked examples") {
    ImpliedSingleEq truth;
    truth.level_coef = Vector::Zero(3);
    truth.level_coef[1] = 1.0;
    truth.level_coef[2] = -1.0;
    truth.diff_coef = Vector::Zero(2);
    truth.active_levels = {1, 2};

    SpecsSolution fit;
    fit.n_levels = 3;
    fit.coef = Vector::Zero(5);

    SUBCASE("half of the truth found") {
        fit.coef[1] = 0.5;
        const SelectionRates rates = selection_metrics(fit, truth);
        CHECK(*rates.pcs == doctest::Approx(0.5));
        CHECK(*rates.pics == doctest::Approx(0.0));
    }

    SUBCASE("one incorrect pick among three zeros") {
        fit.coef[0] = 0.2;  // a true zero
        const SelectionRates rates = selection_metrics(fit, truth);
        CHECK(*rates.pics == doctest::Approx(1.0 / 3.0));
    }

    SUBCASE("exact recovery") {
        fit.coef[1] = 1.0;
        fit.coef[2] = -1.0;
        const SelectionRates rates = selection_metrics(fit, truth);
        CHECK(*rates.pcs == doctest::Approx(1.0));
        CHECK(*rates.pics == doctest::Approx(0.0));
    }

    SUBCASE("no non-zero truth leaves PCS absent") {
        ImpliedSingleEq empty = truth;
        empty.level_coef.setZero();
        empty.active_levels.clear();
        const SelectionRates rates = selection_metrics(fit, empty);
        CHECK(!rates.pcs.has_value());
        CHECK(rates.pics.has_value());
    }
}

TEST_CASE("pseudo_power worked examples") {
    auto with_levels = [](bool on) {
        SpecsSolution s;
        s.n_levels = 2;
        s.coef = Vector::Zero(4);
        if (on) {
            s.coef[0] = 1.0;
            s.active_levels = {0};
        }
        return s;
    };
    CHECK(pseudo_power({with_levels(false), with_levels(false)}) == 0.0);
    CHECK(pseudo_power({with_levels(true), with_levels(true)}) == 1.0);
    CHECK(pseudo_power({with_levels(true), with_levels(true), with_levels(true),
                        with_levels(false)}) == doctest::Approx(0.75));
}

TEST_CASE("nowcast_one") {
    DgpSpec spec;
    spec.family = DgpFamily::table2_low_we;
    spec.adjustment = -0.4;
    spec.extra_obs = 1;
    const GeneratedData data = gen_vecm(spec, 13);
    const TimeSeriesPanel fit_window = data.panel.window(0, 100);
    const CecmDesign design = build_cecm_design(fit_window, 1, Deterministics::none);

    SUBCASE("zero solution gives the random-walk nowcast") {
        SpecsSolution zero;
        zero.n_levels = design.n_series;
        zero.coef = Vector::Zero(design.n_coef());
        const Nowcast nc = nowcast_one(design, zero, data.panel.window(0, 101));
        CHECK(nc.level == doctest::Approx(fit_window.values(99, 0)));
        CHECK(nc.diff == 0.0);
    }

    SUBCASE("true coefficients on a noiseless next step are exact") {
        // Extend the panel by one deterministic step of the recursion.
        const VecmParams& p = *data.params;
        const Matrix long_run = p.adjustment * p.coint.transpose();
        const Index T = 100;
        Vector dz_prev =
            data.panel.values.row(T - 1) - data.panel.values.row(T - 2);
        Vector diff = long_run * data.panel.values.row(T - 1).transpose() +
                      p.short_run[0] * dz_prev;
        TimeSeriesPanel extended = fit_window;
        extended.values.conservativeResize(T + 1, Eigen::NoChange);
        extended.values.row(T) = data.panel.values.row(T - 1) + diff.transpose();

        SpecsSolution truth_fit;
        truth_fit.n_levels = design.n_series;
        truth_fit.coef.resize(design.n_coef());
        truth_fit.coef.head(10) = data.truth->level_coef;
        truth_fit.coef.tail(19) = data.truth->diff_coef;

        const Nowcast nc = nowcast_one(design, truth_fit, extended);
        CHECK(nc.level == doctest::Approx(extended.values(T, 0)).epsilon(1e-10));
    }
}

TEST_CASE("run_monte_carlo") {
    McConfig config;
    config.dgp.family = DgpFamily::table2_low_we;
    config.dgp.adjustment = -0.4;
    config.estimators = {Estimator::specs1, Estimator::adl, Estimator::ols_oracle};
    config.n_reps = 24;
    config.base_seed = 99;

    SUBCASE("deterministic across parallelism and reruns") {
        McConfig serial = config;
        serial.jobs = 1;
        McConfig threaded = config;
        threaded.jobs = 3;
        const std::string a = report_to_json(run_monte_carlo(serial)).dump();
        const std::string b = report_to_json(run_monte_carlo(threaded)).dump();
        const std::string c = report_to_json(run_monte_carlo(serial)).dump();
        CHECK(a == b);
        CHECK(a == c);
    }

    SUBCASE("oracle is its own baseline") {
        const MetricsReport report = run_monte_carlo(config);
        CHECK(report.rmsne_baseline == "ols_oracle");
        CHECK(*report.per_estimator.at("ols_oracle").rmsne == doctest::Approx(1.0));
        CHECK(report.n_failures == 0);
        CHECK(*report.per_estimator.at("adl").pseudo_power == 0.0);
    }

    SUBCASE("single replication aggregates are that replication") {
        McConfig one = config;
        one.n_reps = 1;
        one.estimators = {Estimator::specs1};
        const MetricsReport report = run_monte_carlo(one);
        CHECK(report.n_reps == 1);
        const auto& agg = report.per_estimator.at("specs1");
        CHECK(agg.n_ok == 1);
        const double pp = *agg.pseudo_power;
        CHECK((pp == 0.0 || pp == 1.0));
    }

    SUBCASE("wald estimators report rejection rates") {
        McConfig wald_config = config;
        wald_config.n_reps = 8;
        wald_config.wald_draws = 1000;
        wald_config.estimators = {Estimator::wald, Estimator::wald_ps};
        const MetricsReport report = run_monte_carlo(wald_config);
        CHECK(report.per_estimator.at("wald").pseudo_power.has_value());
        CHECK(report.per_estimator.at("wald_ps").pseudo_power.has_value());
        CHECK(*report.per_estimator.at("wald").pseudo_power >= 0.0);
    }
}

TEST_CASE("every family runs end to end through the harness") {
    SUBCASE("non-sparse covariance design") {
        McConfig config;
        config.dgp.family = DgpFamily::nonsparse_vecm;
        config.dgp.adjustment = -0.3;
        config.estimators = {Estimator::specs1, Estimator::adl, Estimator::ols_oracle};
        config.n_reps = 5;
        config.base_seed = 11;
        const MetricsReport report = run_monte_carlo(config);
        CHECK(report.n_failures == 0);
        CHECK(report.rmsne_baseline == "ols_oracle");
        CHECK(report.per_estimator.at("specs1").msne.has_value());
    }

    SUBCASE("mixed-order design in the stable adjustment region") {
        McConfig config;
        config.dgp.family = DgpFamily::table3_y_i0;
        config.dgp.adjustment = -0.05;
        config.dgp.persistence = DgpSpec::Persistence::high;
        config.estimators = {Estimator::specs1, Estimator::adl_adf};
        config.n_reps = 3;
        config.base_seed = 12;
        const MetricsReport report = run_monte_carlo(config);
        CHECK(report.n_failures == 0);
        CHECK(report.per_estimator.at("adl_adf").msne.has_value());
    }

    SUBCASE("factor panel reports nowcast errors relative to the differenced comparator") {
        McConfig config;
        config.dgp.family = DgpFamily::factor_model;
        config.estimators = {Estimator::specs1, Estimator::adl};
        config.n_reps = 3;
        config.base_seed = 13;
        const MetricsReport report = run_monte_carlo(config);
        CHECK(report.n_failures == 0);
        CHECK(report.rmsne_baseline == "adl");
        CHECK(!report.per_estimator.at("specs1").pcs.has_value());
        CHECK(*report.per_estimator.at("adl").rmsne == doctest::Approx(1.0));
    }
}

TEST_CASE("doubling the burn-in leaves the aggregates within Monte Carlo noise") {
    McConfig config;
    config.dgp.family = DgpFamily::table2_low_we;
    config.dgp.adjustment = -0.4;
    config.estimators = {Estimator::specs1};
    config.n_reps = 200;
    config.base_seed = 31;

    const MetricsReport base = run_monte_carlo(config);
    McConfig doubled = config;
    doubled.dgp.burn_in = 400;
    const MetricsReport more = run_monte_carlo(doubled);

    // The two runs use independent effective streams, so compare against
    // the standard error of the difference.
    auto diff_se = [&](double a, double b) {
        const double va = a * (1.0 - a) / config.n_reps;
        const double vb = b * (1.0 - b) / config.n_reps;
        return std::max(std::sqrt(va + vb), 0.007);
    };
    const double power_a = *base.per_estimator.at("specs1").pseudo_power;
    const double power_b = *more.per_estimator.at("specs1").pseudo_power;
    CHECK(std::abs(power_a - power_b) <= diff_se(power_a, power_b));

    const double pcs_a = *base.per_estimator.at("specs1").pcs;
    const double pcs_b = *more.per_estimator.at("specs1").pcs;
    CHECK(std::abs(pcs_a - pcs_b) <= diff_se(pcs_a, pcs_b));

    const double pics_a = *base.per_estimator.at("specs1").pics;
    const double pics_b = *more.per_estimator.at("specs1").pics;
    CHECK(std::abs(pics_a - pics_b) <= diff_se(pics_a, pics_b));
}

TEST_CASE("SPECS_NUM_THREADS caps the worker count") {
    setenv("SPECS_NUM_THREADS", "2", 1);
    CHECK(effective_jobs(8) == 2);
    CHECK(effective_jobs(1) == 1);
    setenv("SPECS_NUM_THREADS", "16", 1);
    CHECK(effective_jobs(4) == 4);
    unsetenv("SPECS_NUM_THREADS");
    CHECK(effective_jobs(3) == 3);
}

TEST_CASE("estimator names round trip") {
    for (int i = 0; i <= static_cast<int>(Estimator::wald_ps); ++i) {
        const Estimator e = static_cast<Estimator>(i);
        CHECK(estimator_from_name(estimator_name(e)) == e);
    }
    CHECK(estimator_from_name("adl-adf") == Estimator::adl_adf);
    CHECK(!estimator_from_name("nope").has_value());
}
