// stefan: command line front end (solve, certify, sweep).

#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "stefan/app.hpp"
#include "stefan/errors.hpp"

int main(int argc, char** argv) {
    using namespace stefan;
    CLI::App cli{"Similarity solver for the two-phase Stefan problem with temperature-dependent coefficients"};
    cli.require_subcommand(1);

    std::string config_path, out_dir = "", format = "both";
    int grid_n = 0;
    bool quiet = false;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Run configuration (TOML subset)")->required();
        sub->add_option("--out", out_dir, "Output directory (default: output.dir from the config)");
        sub->add_option("--format", format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
        sub->add_option("--grid-n", grid_n, "Override solver.grid_n")->check(CLI::PositiveNumber);
        sub->add_flag("--quiet", quiet, "Suppress the stdout summary and info logging");
    };

    auto* solve = cli.add_subcommand("solve", "Find alpha0*, beta0* and write profiles, field and boundaries");
    common(solve);

    double alpha0 = 0.0, beta0 = 0.0;
    auto* certify = cli.add_subcommand("certify", "Evaluate contraction certificates at a given (alpha0, beta0)");
    common(certify);
    certify->add_option("--alpha0", alpha0, "Inner interface coefficient")->required();
    certify->add_option("--beta0", beta0, "Outer interface coefficient")->required();

    std::string param;
    double from = 0.0, to = 0.0;
    int steps = 1;
    auto* sweep = cli.add_subcommand("sweep", "Solve over a range of one problem parameter");
    common(sweep);
    sweep->add_option("--param", param, "nu, theta_m, l_b or l_m")
        ->required()
        ->check(CLI::IsMember({"nu", "theta_m", "l_b", "l_m"}));
    sweep->add_option("--from", from, "First value")->required();
    sweep->add_option("--to", to, "Last value")->required();
    sweep->add_option("--steps", steps, "Number of values (>= 1)")->check(CLI::PositiveNumber);

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return cli.exit(e) == 0 ? 0 : 1;
    }

    app::init_logging(quiet);
    try {
        config::RunConfig cfg = config::load(config_path);
        if (grid_n > 0) cfg.solver.grid_n = grid_n;
        cfg.solver.validate();
        app::RunOptions ro;
        ro.out_dir = out_dir.empty() ? cfg.output.dir : out_dir;
        ro.format = config::parse_format(format);
        ro.quiet = quiet;
        ro.config_path = config_path;
        if (*solve) return app::run_solve(cfg, ro);
        if (*certify) return app::run_certify(cfg, alpha0, beta0, ro);
        return app::run_sweep(cfg, param, from, to, steps, ro);
    } catch (const config::ConfigError& e) {
        spdlog::error("config {}: {}", config_path, e.what());
        return 1;
    } catch (const DomainError& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
}
