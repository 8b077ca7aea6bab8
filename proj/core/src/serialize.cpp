#include "specs/serialize.hpp"

#include <cstdint>
#include <iomanip>
#include <sstream>

namespace specs {

json solution_to_json(const SpecsSolution& solution, const std::vector<std::string>& labels) {
    json coefficients = json::array();
    for (Index i = 0; i < solution.coef.size(); ++i) {
        json entry;
        entry["index"] = i;
        entry["name"] = i < static_cast<Index>(labels.size()) ? labels[i] : "";
        entry["block"] = i < solution.n_levels ? "level" : "diff";
        entry["value"] = solution.coef[i];
        coefficients.push_back(entry);
    }

    json out;
    out["coefficients"] = coefficients;
    out["active_levels"] = solution.active_levels;
    out["active_diffs"] = solution.active_diffs;
    out["lambda_individual"] = solution.lambda_individual;
    out["lambda_group"] = solution.lambda_group;
    out["objective"] = solution.objective;
    out["iterations"] = solution.iterations;
    out["converged"] = solution.converged;
    out["kkt_residual"] = solution.kkt_residual;
    json theta;
    theta["count"] = solution.det_coef.count;
    theta["intercept"] = solution.det_coef.intercept;
    theta["trend"] = solution.det_coef.trend;
    out["theta"] = theta;
    return out;
}

json report_to_json(const MetricsReport& report) {
    json estimators;
    for (const auto& [name, agg] : report.per_estimator) {
        json entry;
        entry["n_ok"] = agg.n_ok;
        entry["pseudo_power"] = agg.pseudo_power ? json(*agg.pseudo_power) : json();
        entry["pcs"] = agg.pcs ? json(*agg.pcs) : json();
        entry["pics"] = agg.pics ? json(*agg.pics) : json();
        entry["msne"] = agg.msne ? json(*agg.msne) : json();
        entry["rmsne"] = agg.rmsne ? json(*agg.rmsne) : json();
        estimators[name] = entry;
    }

    json out;
    out["family"] = report.family;
    out["estimators"] = estimators;
    out["rmsne_baseline"] = report.rmsne_baseline;
    out["n_reps"] = report.n_reps;
    out["n_failures"] = report.n_failures;
    out["failed_reps"] = report.failed_reps;
    json seeds;
    seeds["base_seed"] = report.base_seed;
    seeds["rule"] = "replication r uses base_seed + r";
    json per_rep = json::array();
    for (int r = 0; r < report.n_reps; ++r)
        per_rep.push_back(report.base_seed + static_cast<std::uint64_t>(r));
    seeds["per_replication"] = per_rep;
    out["seed_ledger"] = seeds;
    return out;
}

std::string digest(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << hash;
    return out.str();
}

}  // namespace specs
