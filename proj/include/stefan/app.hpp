#pragma once

// Orchestration behind the command line verbs: solve, certify, sweep.

#include <string>

#include <json.hpp>

#include "stefan/config.hpp"
#include "stefan/field.hpp"

namespace stefan::app {

struct RunOptions {
    std::string out_dir;
    config::Format format = config::Format::Both;
    bool quiet = false;
    std::string config_path;  // recorded in run_meta.json only
};

/// Exit codes: 0 success, 1 bad input, 2 no root, 3 non-convergence.
int run_solve(const config::RunConfig& cfg, const RunOptions& ro);
int run_certify(const config::RunConfig& cfg, double alpha0, double beta0, const RunOptions& ro);
int run_sweep(const config::RunConfig& cfg, const std::string& param, double from, double to, int steps,
              const RunOptions& ro);

/// Reads STEFAN_LOG (trace, debug, info, warn, error, off); --quiet caps output at warnings.
void init_logging(bool quiet);

// Artifact builders, exposed for tests.
nlohmann::json solution_json(const Solution& sol, const config::RunConfig& cfg);
nlohmann::json certificate_json(const CertificateReport& rep);
nlohmann::json failure_json(const SolveFailure& f);
std::string profiles_csv(const Solution& sol);
std::string field_csv(const FieldSolution& fs, const config::OutputConfig& out);
std::string boundaries_csv(const FieldSolution& fs, const config::OutputConfig& out);

/// Profile rebuilt from the arrays stored in solution.json.
Profile profile_from_json(const nlohmann::json& j, Phase phase);

/// %.17g, with nan / inf spelled out.
std::string fmt_num(double x);

}  // namespace stefan::app
