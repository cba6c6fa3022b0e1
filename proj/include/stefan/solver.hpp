#pragma once

// Fixed-point operators V (liquid) and W (solid), the elimination of alpha0
// through the interface balance, and the outer root solve for beta0.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stefan/certificates.hpp"
#include "stefan/kernel.hpp"
#include "stefan/profile.hpp"
#include "stefan/quad.hpp"
#include "stefan/thermal_model.hpp"

namespace stefan {

/// Which interface balance eliminates alpha0.
///
/// Consistent: A* alpha^{nu+1} E1(beta0) = B* beta0^{nu+1} - u_c/Phi2, i.e. the
/// liquid flux at beta0 carries E1(beta0). AsPrinted drops that factor and
/// gives alpha0* in closed form.
enum class Balance { Consistent, AsPrinted };

struct SolveOptions {
    double fp_tol = 1e-9;
    int fp_max_iters = 200;
    double damping = 1.0;
    double root_tol = 1e-8;
    int bracket_grid = 64;
    double beta_lo = 1e-3;
    double beta_hi = 10.0;
    int grid_n = kDefaultGridSize;
    Balance balance = Balance::Consistent;
    quad::QuadOptions quad;

    void validate() const;
};

/// Envelope source for the certificate report.
struct EnvelopeChoice {
    bool automatic = true;
    std::optional<double> mu;     // defaults to the middle of the window
    std::optional<double> delta;
    EnvelopeParams params;        // used when automatic is false
};

inline constexpr double kDampingFloor = 1.0 / 16.0;

/// Verdict codes shared with the command line front end.
enum class Verdict { Ok = 0, BadInput = 1, NoRoot = 2, NonConvergence = 3 };

class NoRootError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, Profile last, std::vector<double> ratios)
        : std::runtime_error(what), last_iterate(std::move(last)), ratio_history(std::move(ratios)) {}
    Profile last_iterate;
    std::vector<double> ratio_history;
};

struct FixedPointResult {
    Profile u;
    int iters = 0;
    std::vector<double> ratios;
    double damping = 1.0;  // value in force at exit
};

using Operator = std::function<Profile(const Profile&)>;

Profile apply_V(const CoefficientModel& liquid, double nu, const Profile& u1, const quad::QuadOptions& opts = {});
Profile apply_W(const CoefficientModel& solid, double nu, double u_c, const Profile& u2,
                const quad::QuadOptions& opts = {});

/// u <- (1 - w) u + w op(u) until the sup-norm step is below fp_tol.
FixedPointResult fixed_point(const Operator& op, const Profile& init, const SolveOptions& opts);

/// A*, B* of a physical problem.
StefanConstants stefan_constants(const ProblemSpec& spec);

/// Closed-form alpha0* from B* beta0^{nu+1} - u_c/Phi2 = A* alpha0^{nu+1}. Throws NoRootError.
double alpha_star_printed(const StefanConstants& k, double nu, double u_c, double beta0, double phi2_total);

/// Truncation point of the stored solid grid: E2 has decayed below e^{-29.93} relative to beta0.
double solid_eta_max(const CoefficientModel& solid, double u_c, double beta0);

/// State of one beta0 evaluation; reused as the warm start of the next.
struct BetaState {
    double beta0 = 0.0;
    double alpha0 = 0.0;
    Profile u1;
    Profile u2;
    FixedPointResult fp_liquid;
    FixedPointResult fp_solid;
    double phi1_total = 0.0;
    double phi2_total = 0.0;
    double E1_beta = 0.0;
    double residual = 0.0;
};

/// Everything derived from a ProblemSpec once.
struct Problem {
    ProblemSpec spec;
    DimensionlessModel model;
    StefanConstants k;

    explicit Problem(const ProblemSpec& s);
};

/// 1/Phi1[alpha0*, beta0, u1] - A* alpha0*^{nu+1}. Throws NoRootError or NonConvergenceError.
BetaState beta_residual(const Problem& pb, double beta0, const SolveOptions& opts, const BetaState* warm = nullptr);

struct ScanPoint {
    double beta0 = 0.0;
    double residual = 0.0;  // NaN where alpha0* is undefined
    double alpha0 = 0.0;
    double J1 = 0.0;
    double J2 = 0.0;
    std::string note;
};

struct Residuals {
    double r1 = 0.0;                 // liquid flux balance at alpha0
    double r2 = 0.0;                 // flux balance at beta0
    double balance_printed = 0.0;    // 1/Phi1 - (B* beta0^{nu+1} - u_c/Phi2)
    double balance_consistent = 0.0; // E1(beta0)/Phi1 - (B* beta0^{nu+1} - u_c/Phi2)
    double beta_residual = 0.0;
    double ode_liquid = 0.0;
    double ode_solid = 0.0;
};

struct Diagnostics {
    std::vector<ScanPoint> scan;
    std::vector<std::pair<double, double>> other_brackets;
    int iters_liquid = 0;
    int iters_solid = 0;
    std::vector<double> ratios_liquid;
    std::vector<double> ratios_solid;
    double damping_liquid = 1.0;
    double damping_solid = 1.0;
    double u_c = 0.0;
    StefanConstants constants;
    EnvelopeParams envelopes;
    double eta_max = 0.0;
    // Phi totals of the iterate next to the same integrals with L, N frozen at the
    // boundary values L1(0), N1(0) and L2(u_c), N2(u_c).
    double phi1_total = 0.0, phi2_total = 0.0;
    double phi1_frozen = 0.0, phi2_frozen = 0.0;
    std::string certification;  // "certified", "uncertified convergence"
};

struct Solution {
    double alpha0 = 0.0;
    double beta0 = 0.0;
    double nu = 0.5;
    Profile u1;
    Profile u2;
    CertificateReport certificate;
    Residuals residuals;
    Diagnostics diagnostics;
};

class SolveFailure : public std::runtime_error {
public:
    SolveFailure(const std::string& what, Verdict v, std::vector<ScanPoint> trace)
        : std::runtime_error(what), verdict(v), scan(std::move(trace)) {}
    Verdict verdict;
    std::vector<ScanPoint> scan;
};

/// Scan, bracket and bisect beta_residual; assemble the smallest root.
Solution solve(const ProblemSpec& spec, const SolveOptions& opts = {}, const EnvelopeChoice& env = {});

/// Envelopes for the certificate at a converged state.
EnvelopeParams resolve_envelopes(const Problem& pb, const Profile& u1, const Profile& u2, const EnvelopeChoice& env);

/// Middle of the admissible (mu, delta) window for nu.
std::pair<double, double> window_midpoint(double nu);

}  // namespace stefan
