#include "stefan/app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "stefan/errors.hpp"
#include "stefan/kernel.hpp"

namespace stefan::app {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

json opt_num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

json num_array(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
    return a;
}

json num_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

json profile_json(const Profile& p) {
    return {{"nodes", num_array(p.nodes)}, {"values", num_array(p.values)}, {"tail_value", num(p.tail_value)}};
}

json envelope_json(const EnvelopeParams& e) {
    return {{"nu", num(e.nu)},   {"L1m", num(e.L1m)}, {"L1M", num(e.L1M)}, {"N1m", num(e.N1m)},
            {"N1M", num(e.N1M)}, {"L2m", num(e.L2m)}, {"L2M", num(e.L2M)}, {"N2m", num(e.N2m)},
            {"N2M", num(e.N2M)}, {"mu", num(e.mu)},   {"delta", num(e.delta)}, {"Lt1", num(e.Lt1)},
            {"Lt2", num(e.Lt2)}, {"Nt1", num(e.Nt1)}, {"Nt2", num(e.Nt2)}};
}

json scan_json(const std::vector<ScanPoint>& scan) {
    json a = json::array();
    for (const auto& s : scan)
        a.push_back({{"beta0", num(s.beta0)}, {"residual", num(s.residual)}, {"alpha0", num(s.alpha0)},
                     {"J1", num(s.J1)}, {"J2", num(s.J2)}, {"note", s.note}});
    return a;
}

std::string scan_csv(const std::vector<ScanPoint>& scan) {
    std::string out = "beta0,residual,alpha0,J1,J2\n";
    for (const auto& s : scan)
        out += fmt_num(s.beta0) + "," + fmt_num(s.residual) + "," + fmt_num(s.alpha0) + "," + fmt_num(s.J1) + "," +
               fmt_num(s.J2) + "\n";
    return out;
}

// Write to a sibling temporary and rename, so readers never see a partial file.
void write_atomic(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
    }
    fs::rename(tmp, path);
}

bool wants_json(config::Format f) { return f != config::Format::Csv; }
bool wants_csv(config::Format f) { return f != config::Format::Json; }

void write_meta(const RunOptions& ro, const std::string& verb, int code) {
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    json meta{{"verb", verb}, {"config", ro.config_path}, {"exit_code", code}, {"unix_time", secs}};
    write_atomic(fs::path(ro.out_dir) / "run_meta.json", meta.dump(2) + "\n");
}

int write_failure(const SolveFailure& f, const RunOptions& ro, const std::string& verb) {
    spdlog::error("{}", f.what());
    write_atomic(fs::path(ro.out_dir) / "failure.json", failure_json(f).dump(2) + "\n");
    write_atomic(fs::path(ro.out_dir) / "scan.csv", scan_csv(f.scan));
    const int code = static_cast<int>(f.verdict);
    write_meta(ro, verb, code);
    return code;
}

const char* balance_name(Balance b) { return b == Balance::Consistent ? "consistent" : "as_printed"; }

}  // namespace

std::string fmt_num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", x);
}

void init_logging(bool quiet) {
    auto level = spdlog::level::info;
    if (const char* env = std::getenv("STEFAN_LOG")) {
        level = spdlog::level::from_str(env);
    }
    if (quiet && level < spdlog::level::warn) level = spdlog::level::warn;
    spdlog::set_level(level);
    spdlog::set_pattern("[%l] %v");
}

json certificate_json(const CertificateReport& rep) {
    const json na = "not applicable";
    json window{{"admissible", rep.window_ok}, {"violations", rep.window.violations()}};
    json j{{"epsilon", num(rep.epsilon)},
           {"epsilon_chain", num(rep.epsilon_chain)},
           {"A", num(rep.A_val)},
           {"phi1_tilde", num(rep.phi1_tilde)},
           {"window_ok", rep.window_ok},
           {"window", window},
           {"contraction_ok", rep.contraction_ok},
           {"empirical_ratio_liquid", num(rep.empirical_ratio_liquid)},
           {"empirical_ratio_solid", num(rep.empirical_ratio_solid)}};
    if (rep.sigma_applicable) {
        j["sigma"] = num(rep.sigma);
        j["B"] = num(rep.B_val);
        j["phi2_tilde"] = num(rep.phi2_tilde);
        j["beta_tilde"] = opt_num(rep.thresholds.beta_tilde);
        j["beta_hat"] = opt_num(rep.thresholds.beta_hat);
    } else {
        for (const char* k : {"sigma", "B", "phi2_tilde", "beta_tilde", "beta_hat"}) j[k] = na;
    }
    return j;
}

json failure_json(const SolveFailure& f) {
    return {{"verdict", static_cast<int>(f.verdict)}, {"message", f.what()}, {"scan", scan_json(f.scan)}};
}

json solution_json(const Solution& sol, const config::RunConfig& cfg) {
    const auto& d = sol.diagnostics;
    const auto& r = sol.residuals;
    json other = json::array();
    for (const auto& [a, b] : d.other_brackets) other.push_back({num(a), num(b)});
    return {
        {"alpha0", num(sol.alpha0)},
        {"beta0", num(sol.beta0)},
        {"nu", num(sol.nu)},
        {"u_c", num(d.u_c)},
        {"A_star", num(d.constants.A_star)},
        {"B_star", num(d.constants.B_star)},
        {"balance", balance_name(cfg.solver.balance)},
        {"grid_n", cfg.solver.grid_n},
        {"certification", d.certification},
        {"certificate", certificate_json(sol.certificate)},
        {"envelopes", envelope_json(d.envelopes)},
        {"residuals",
         {{"r1", num(r.r1)},
          {"r2", num(r.r2)},
          {"balance_printed", num(r.balance_printed)},
          {"balance_consistent", num(r.balance_consistent)},
          {"beta_residual", num(r.beta_residual)},
          {"ode_liquid", num(r.ode_liquid)},
          {"ode_solid", num(r.ode_solid)}}},
        {"iterations",
         {{"liquid", d.iters_liquid},
          {"solid", d.iters_solid},
          {"ratios_liquid", num_array(d.ratios_liquid)},
          {"ratios_solid", num_array(d.ratios_solid)},
          {"damping_liquid", num(d.damping_liquid)},
          {"damping_solid", num(d.damping_solid)}}},
        {"phi_totals",
         {{"liquid", num(d.phi1_total)},
          {"solid", num(d.phi2_total)},
          {"liquid_frozen", num(d.phi1_frozen)},
          {"solid_frozen", num(d.phi2_frozen)}}},
        {"other_root_brackets", other},
        {"scan", scan_json(d.scan)},
        {"profiles", {{"liquid", profile_json(sol.u1)}, {"solid", profile_json(sol.u2)}}},
    };
}

Profile profile_from_json(const json& j, Phase phase) {
    Profile p;
    p.kind = phase;
    const auto& n = j.at("nodes");
    const auto& v = j.at("values");
    p.nodes.resize(static_cast<Eigen::Index>(n.size()));
    p.values.resize(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < n.size(); ++i) p.nodes(static_cast<Eigen::Index>(i)) = n[i].get<double>();
    for (std::size_t i = 0; i < v.size(); ++i) p.values(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    p.tail_value = j.at("tail_value").get<double>();
    return p;
}

std::string profiles_csv(const Solution& sol) {
    std::string out = "eta,u1,u2\n";
    for (Eigen::Index i = 0; i < sol.u1.size(); ++i) out += fmt_num(sol.u1.nodes(i)) + "," + fmt_num(sol.u1.values(i)) + ",\n";
    for (Eigen::Index i = 0; i < sol.u2.size(); ++i) out += fmt_num(sol.u2.nodes(i)) + ",," + fmt_num(sol.u2.values(i)) + "\n";
    return out;
}

std::string field_csv(const FieldSolution& f, const config::OutputConfig& out) {
    std::string s = "r,t,theta,phase\n";
    for (double t : out.field_times) {
        const double r0 = f.alpha_of_t(t), r1 = out.field_r_span * f.beta_of_t(t);
        for (int i = 0; i < out.field_r_points; ++i) {
            const double r = r0 + (r1 - r0) * i / (out.field_r_points - 1);
            const Phase ph = f.phase_at(r, t);
            s += fmt_num(r) + "," + fmt_num(t) + "," + fmt_num(f.theta(r, t)) + "," +
                 (ph == Phase::Liquid ? "liquid" : "solid") + "\n";
        }
    }
    return s;
}

std::string boundaries_csv(const FieldSolution& f, const config::OutputConfig& out) {
    std::string s = "t,alpha,beta\n";
    for (int k = 1; k <= out.boundary_steps; ++k) {
        const double t = out.boundary_t_max * k / out.boundary_steps;
        s += fmt_num(t) + "," + fmt_num(f.alpha_of_t(t)) + "," + fmt_num(f.beta_of_t(t)) + "\n";
    }
    return s;
}

int run_solve(const config::RunConfig& cfg, const RunOptions& ro) {
    Solution sol;
    try {
        sol = solve(cfg.problem, cfg.solver, cfg.envelopes);
    } catch (const SolveFailure& f) {
        return write_failure(f, ro, "solve");
    }
    const FieldSolution fsol = reconstruct(sol, cfg.problem);
    const fs::path dir(ro.out_dir);
    if (wants_json(ro.format)) write_atomic(dir / "solution.json", solution_json(sol, cfg).dump(2) + "\n");
    if (wants_csv(ro.format)) {
        write_atomic(dir / "profiles.csv", profiles_csv(sol));
        write_atomic(dir / "field.csv", field_csv(fsol, cfg.output));
        write_atomic(dir / "boundaries.csv", boundaries_csv(fsol, cfg.output));
    }
    write_meta(ro, "solve", 0);
    spdlog::info("alpha0* = {:.12g}, beta0* = {:.12g} ({})", sol.alpha0, sol.beta0, sol.diagnostics.certification);
    if (!ro.quiet) fmt::print("alpha0 {}\nbeta0 {}\n", fmt_num(sol.alpha0), fmt_num(sol.beta0));
    return 0;
}

int run_certify(const config::RunConfig& cfg, double alpha0, double beta0, const RunOptions& ro) {
    if (!(alpha0 > 0.0) || !(beta0 > alpha0)) throw DomainError("certify: require 0 < alpha0 < beta0");
    validate(cfg.problem);
    const Problem pb(cfg.problem);
    const double nu = cfg.problem.nu, u_c = pb.model.u_c;
    const auto& o = cfg.solver;

    FixedPointResult fp1, fp2;
    try {
        fp1 = fixed_point([&](const Profile& u) { return apply_V(pb.model.liquid, nu, u, o.quad); },
                          make_liquid_grid(alpha0, beta0, o.grid_n), o);
        fp2 = fixed_point([&](const Profile& u) { return apply_W(pb.model.solid, nu, u_c, u, o.quad); },
                          make_solid_grid(beta0, u_c, o.grid_n, solid_eta_max(pb.model.solid, u_c, beta0)), o);
    } catch (const NonConvergenceError& e) {
        return write_failure(SolveFailure(e.what(), Verdict::NonConvergence, {}), ro, "certify");
    }
    const EnvelopeParams env = resolve_envelopes(pb, fp1.u, fp2.u, cfg.envelopes);
    CertificateReport rep = evaluate_certificates(env, u_c, alpha0, beta0, o.beta_lo, o.beta_hi);
    auto max_ratio = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); };
    rep.empirical_ratio_liquid = max_ratio(fp1.ratios);
    rep.empirical_ratio_solid = max_ratio(fp2.ratios);

    constexpr int kSpots = 32;
    constexpr double kSlack = 1e-12;
    const KernelCache c1 = build_cache(pb.model.liquid, fp1.u, nu, o.quad);
    const KernelCache c2 = build_cache(pb.model.solid, fp2.u, nu, o.quad);
    json spots = json::array();
    bool all_pass = true;
    auto check = [&](const char* what, double eta, double v, const Bounds& b) {
        const bool ok = b.lower - kSlack <= v && v <= b.upper + kSlack;
        all_pass = all_pass && ok;
        spots.push_back({{"quantity", what}, {"eta", num(eta)}, {"value", num(v)}, {"lower", num(b.lower)},
                         {"upper", num(b.upper)}, {"pass", ok}});
    };
    for (int j = 0; j < kSpots; ++j) {
        const double eta = alpha0 + (beta0 - alpha0) * (j + 0.5) / kSpots;
        check("E1", eta, eval_E(pb.model.liquid, fp1.u, c1, eta), e1_bounds(env, alpha0, eta));
        check("Phi1", eta, eval_Phi(pb.model.liquid, fp1.u, c1, eta, o.quad), phi1_bounds(env, alpha0, eta));
    }
    if (rep.window_ok) {
        const Eigen::Index n = fp2.u.size();
        for (int j = 0; j < kSpots; ++j) {
            const double eta = fp2.u.nodes(((j + 1) * (n - 1)) / (kSpots + 1));
            check("E2", eta, eval_E(pb.model.solid, fp2.u, c2, eta), e2_bounds(env, beta0, eta));
            check("Phi2", eta, eval_Phi(pb.model.solid, fp2.u, c2, eta, o.quad), phi2_bounds(env, beta0, eta));
        }
    }

    json j = certificate_json(rep);
    j["alpha0"] = num(alpha0);
    j["beta0"] = num(beta0);
    j["envelopes"] = envelope_json(env);
    j["sandwich_checks"] = spots;
    j["sandwich_all_pass"] = all_pass;
    write_atomic(fs::path(ro.out_dir) / "certificate.json", j.dump(2) + "\n");
    write_meta(ro, "certify", 0);
    if (!ro.quiet)
        fmt::print("epsilon {}\nsigma {}\nsandwich {}\n", fmt_num(rep.epsilon),
                   rep.sigma_applicable ? fmt_num(rep.sigma) : std::string("not applicable"),
                   all_pass ? "pass" : "FAIL");
    return 0;
}

int run_sweep(const config::RunConfig& cfg, const std::string& param, double from, double to, int steps,
              const RunOptions& ro) {
    if (steps < 1) throw DomainError("sweep: steps must be >= 1");
    auto setter = [&](ProblemSpec& p, double v) {
        if (param == "nu") p.nu = v;
        else if (param == "theta_m") p.theta_m = v;
        else if (param == "l_b") p.l_b = v;
        else if (param == "l_m") p.l_m = v;
        else throw DomainError("sweep: parameter must be one of nu, theta_m, l_b, l_m");
    };
    ProblemSpec probe = cfg.problem;
    setter(probe, from);

    std::string out = fmt::format("{},alpha0,beta0,epsilon,sigma,r1,r2,beta_residual,verdict\n", param);
    for (int k = 0; k < steps; ++k) {
        const double v = steps == 1 ? from : from + (to - from) * k / (steps - 1);
        ProblemSpec p = cfg.problem;
        setter(p, v);
        std::string row;
        try {
            const Solution sol = solve(p, cfg.solver, cfg.envelopes);
            const auto& r = sol.residuals;
            row = fmt::format("{},{},{},{},{},{},{},{},0", fmt_num(v), fmt_num(sol.alpha0), fmt_num(sol.beta0),
                              fmt_num(sol.certificate.epsilon), fmt_num(sol.certificate.sigma), fmt_num(r.r1),
                              fmt_num(r.r2), fmt_num(r.beta_residual));
        } catch (const SolveFailure& f) {
            row = fmt::format("{},nan,nan,nan,nan,nan,nan,nan,{}", fmt_num(v), static_cast<int>(f.verdict));
            spdlog::warn("sweep {}={}: {}", param, fmt_num(v), f.what());
        } catch (const DomainError& e) {
            row = fmt::format("{},nan,nan,nan,nan,nan,nan,nan,1", fmt_num(v));
            spdlog::warn("sweep {}={}: {}", param, fmt_num(v), e.what());
        }
        out += row + "\n";
        spdlog::info("sweep step {}/{}: {}", k + 1, steps, row);
    }
    write_atomic(fs::path(ro.out_dir) / "sweep.csv", out);
    write_meta(ro, "sweep", 0);
    return 0;
}

}  // namespace stefan::app
