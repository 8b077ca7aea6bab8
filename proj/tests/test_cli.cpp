#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "specs/dgp.hpp"
#include "specs/schema.hpp"
#include "test_support.hpp"

using nlohmann::json;
using namespace specs;

namespace {

const std::string cli = SPECS_CLI_PATH;
const std::string schema_dir = SPECS_SCHEMA_DIR;

struct CommandResult {
    int exit_code;
    std::string output;
};

CommandResult run(const std::string& args) {
    const std::string command = cli + " " + args + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buffer[512];
    while (fgets(buffer, sizeof buffer, pipe)) output += buffer;
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

std::string temp_path(const std::string& name) {
    return std::string("/tmp/specs_cli_test_") + name;
}

void write_panel_csv(const std::string& path, const TimeSeriesPanel& panel, bool date_column) {
    std::ofstream out(path);
    if (date_column) out << "date,";
    for (Index c = 0; c < panel.series(); ++c)
        out << panel.labels[c] << (c + 1 < panel.series() ? "," : "\n");
    for (Index t = 0; t < panel.periods(); ++t) {
        if (date_column) out << "2010-" << (t % 12) + 1 << ",";
        for (Index c = 0; c < panel.series(); ++c)
            out << panel.values(t, c) << (c + 1 < panel.series() ? "," : "\n");
    }
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    json doc;
    in >> doc;
    return doc;
}

json load_schema(const std::string& name) {
    return load_json(schema_dir + "/" + name);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("fit command") {
    DgpSpec spec;
    spec.family = DgpFamily::table2_low_we;
    spec.adjustment = -0.4;
    const GeneratedData data = gen_vecm(spec, 3001);
    const std::string csv = temp_path("fit.csv");
    write_panel_csv(csv, data.panel, true);

    SUBCASE("writes schema-conforming JSON and exits 0") {
        const std::string out = temp_path("fit.json");
        const CommandResult result =
            run("fit " + csv + " --lags 1 --det trend --tune bic --out " + out);
        CHECK(result.exit_code == 0);
        const json doc = load_json(out);
        std::string error;
        CHECK_MESSAGE(validate_schema(doc, load_schema("fit.json"), &error), error);
        CHECK(doc["command"] == "fit");
        CHECK(doc["coefficients"].size() == 29);
        CHECK(doc["converged"] == true);
        CHECK(doc["theta"]["count"] == 2);
        // Manifest sits next to the output and references it.
        const json manifest = load_json(out + ".manifest.json");
        CHECK(doc["manifest_file"].get<std::string>().find("manifest") != std::string::npos);
        CHECK(manifest["output"] == out);
        CHECK(manifest["config_digest"] == doc["config_digest"]);
    }

    SUBCASE("group penalty off reports lambda_group 0") {
        const std::string out = temp_path("fit_nog.json");
        const CommandResult result =
            run("fit " + csv + " --lambda-g off --out " + out);
        CHECK(result.exit_code == 0);
        CHECK(load_json(out)["lambda_group"] == 0.0);
    }

    SUBCASE("empirical-style tscv invocation works") {
        const std::string out = temp_path("fit_tscv.json");
        const CommandResult result = run("fit " + csv +
                                         " --lags 3 --tune tscv --k-delta 1.1 --k-pi 1.1 "
                                         "--n-lambda-i 10 --n-lambda-g 2 --out " + out);
        CHECK(result.exit_code == 0);
        const json doc = load_json(out);
        CHECK(doc["selection"]["method"] == "tscv");
        CHECK(doc["selection"]["n_splits"].get<int>() > 0);
    }

    SUBCASE("target can be chosen by name") {
        const std::string out = temp_path("fit_target.json");
        const CommandResult result = run("fit " + csv + " --target x3 --out " + out);
        CHECK(result.exit_code == 0);
        CHECK(load_json(out)["target"] == "x3");
    }

    SUBCASE("malformed cell exits 2 naming row and column") {
        const std::string bad = temp_path("bad.csv");
        std::ofstream out(bad);
        out << "y,x\n1.0,2.0\n1.5,oops\n2.0,3.0\n";
        out.close();
        const CommandResult result = run("fit " + bad);
        CHECK(result.exit_code == 2);
        CHECK(result.output.find("row 3") != std::string::npos);
        CHECK(result.output.find("'x'") != std::string::npos);
    }

    SUBCASE("missing file exits 2") {
        CHECK(run("fit /tmp/definitely_missing_panel.csv").exit_code == 2);
    }
}

TEST_CASE("nowcast-eval command") {
    SUBCASE("the documented protocol count: 168 rows, p=3, 2/3 window, rolling") {
        DgpSpec spec;
        spec.family = DgpFamily::table2_low_we;
        spec.adjustment = -0.3;
        spec.T = 168;
        const GeneratedData data = gen_vecm(spec, 3002);
        TimeSeriesPanel small = data.panel;
        small.values = data.panel.values.leftCols(4).eval();
        small.labels = {"y", "x1", "x2", "x3"};
        const std::string csv = temp_path("eval168.csv");
        write_panel_csv(csv, small, false);

        const std::string out = temp_path("eval168.json");
        const CommandResult result =
            run("nowcast-eval " + csv +
                " --lags 3 --window-fraction 0.666667 --scheme rolling "
                "--estimators specs1,adl --n-lambda-i 8 --out " + out);
        CHECK(result.exit_code == 0);
        const json doc = load_json(out);
        std::string error;
        CHECK_MESSAGE(validate_schema(doc, load_schema("eval.json"), &error), error);
        CHECK(doc["n_origins"] == 54);
        CHECK(doc["origins"].size() == 54);
    }

    SUBCASE("baseline against itself gives unit ratios and p = 1") {
        DgpSpec spec;
        spec.family = DgpFamily::table2_low_we;
        spec.adjustment = -0.3;
        spec.T = 60;
        const GeneratedData data = gen_vecm(spec, 3003);
        TimeSeriesPanel small = data.panel;
        small.values = data.panel.values.leftCols(3).eval();
        small.labels = {"y", "x1", "x2"};
        const std::string csv = temp_path("eval_self.csv");
        write_panel_csv(csv, small, false);

        const std::string out = temp_path("eval_self.json");
        const CommandResult result =
            run("nowcast-eval " + csv +
                " --lags 1 --estimators adl --baseline adl --n-lambda-i 8 --out " + out);
        CHECK(result.exit_code == 0);
        const json doc = load_json(out);
        CHECK(doc["msne_ratio_vs_baseline"]["adl"] == doctest::Approx(1.0));
        CHECK(doc["dm_vs_baseline"]["adl"]["statistic"] == 0.0);
        CHECK(doc["dm_vs_baseline"]["adl"]["p_value"] == 1.0);
    }

    SUBCASE("window too small exits 2") {
        const TimeSeriesPanel panel = test::random_walk_panel(20, 3, 3004);
        const std::string csv = temp_path("eval_small.csv");
        write_panel_csv(csv, panel, false);
        const CommandResult result =
            run("nowcast-eval " + csv + " --lags 1 --window-fraction 0.99");
        CHECK(result.exit_code == 2);
    }
}

TEST_CASE("simulate command") {
    const std::string config = temp_path("sim.conf");
    {
        std::ofstream out(config);
        out << "# smoke study\n";
        out << "family = table2_low_we\n";
        out << "a = -0.4\n";
        out << "T = 100\n";
        out << "estimators = specs1,adl,ols_oracle\n";
        out << "reps = 4\n";
        out << "seed = 777\n";
    }

    SUBCASE("smoke run validates against the schema and stays within budget") {
        const std::string out = temp_path("sim.json");
        const auto start = std::chrono::steady_clock::now();
        const CommandResult result = run("simulate " + config + " --reps 1 --out " + out);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        CHECK(result.exit_code == 0);
        CHECK(secs < 5.0);
        CHECK(run("simulate " + config + " --out " + out).exit_code == 0);
        const json doc = load_json(out);
        std::string error;
        CHECK_MESSAGE(validate_schema(doc, load_schema("simulate.json"), &error), error);
        CHECK(doc["n_reps"] == 4);
        CHECK(doc["seed_ledger"]["per_replication"].size() == 4);
        CHECK(doc["estimators"].contains("specs1"));
        CHECK(result.output.find("specs1") != std::string::npos);
    }

    SUBCASE("byte-identical across reruns and job counts") {
        const std::string out = temp_path("sim_det.json");
        CHECK(run("simulate " + config + " --jobs 1 --out " + out).exit_code == 0);
        const std::string a = read_file(out);
        CHECK(run("simulate " + config + " --jobs 1 --out " + out).exit_code == 0);
        const std::string b = read_file(out);
        CHECK(run("simulate " + config + " --jobs 8 --out " + out).exit_code == 0);
        const std::string c = read_file(out);
        CHECK(a == b);
        CHECK(a == c);
        CHECK(!a.empty());
    }

    SUBCASE("seed override changes the ledger") {
        const std::string out = temp_path("sim_seed.json");
        CHECK(run("simulate " + config + " --seed 123 --out " + out).exit_code == 0);
        CHECK(load_json(out)["seed_ledger"]["base_seed"] == 123);
    }

    SUBCASE("invalid family exits 2 and lists the valid names") {
        const std::string bad = temp_path("sim_bad.conf");
        std::ofstream out(bad);
        out << "family = not_a_family\nreps = 1\n";
        out.close();
        const CommandResult result = run("simulate " + bad);
        CHECK(result.exit_code == 2);
        CHECK(result.output.find("table2_low_we") != std::string::npos);
        CHECK(result.output.find("factor_model") != std::string::npos);
    }
}
