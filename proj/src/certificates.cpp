#include "stefan/certificates.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "stefan/errors.hpp"
#include "stefan/special_fn.hpp"

namespace stefan {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nu(const EnvelopeParams& env) {
    if (!(env.nu > 0.0 && env.nu < 1.0)) throw DomainError("certificates: nu must lie in (0,1)");
}

void require_window(const EnvelopeParams& env) {
    require_nu(env);
    const auto w = validate_window(env.nu, env.mu, env.delta);
    if (!w.admissible()) {
        std::string msg = "certificates: (mu, delta) outside the admissible window:";
        for (const auto& v : w.violations()) msg += " " + v;
        throw DomainError(msg);
    }
}

// exp(log_scale) * [gamma(s, x_hi) - gamma(s, x_lo)], x_lo <= x_hi; x_hi may be +inf.
double scaled_gamma_diff(double s, double x_lo, double x_hi, double log_scale) {
    if (!(x_hi > x_lo)) return 0.0;
    if (std::isfinite(x_hi) && x_lo <= s + 1.0) {
        const double d = special::lower_incomplete_gamma(s, x_hi) - special::lower_incomplete_gamma(s, x_lo);
        return std::exp(log_scale) * d;
    }
    const double q_lo = special::log_upper_tail_gamma(s, x_lo);
    if (!std::isfinite(x_hi)) return std::exp(log_scale + q_lo);
    const double q_hi = special::log_upper_tail_gamma(s, x_hi);
    return std::exp(log_scale + q_lo) * -std::expm1(q_hi - q_lo);
}

// Monotone bisection on [lo, hi] in log space for pred flipping from a to !a.
template <class Pred>
double log_bisect(Pred pred, double lo, double hi, double rel_tol) {
    const bool at_lo = pred(lo);
    for (int i = 0; i < 400 && hi - lo > rel_tol * hi; ++i) {
        const double mid = std::sqrt(lo * hi);
        (pred(mid) == at_lo ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

}  // namespace

Bounds e1_bounds(const EnvelopeParams& env, double alpha0, double eta) {
    const double d = eta * eta - alpha0 * alpha0;
    return {std::exp(-env.N1M / env.L1m * d), std::exp(-env.N1m / env.L1M * d)};
}

Bounds e2_bounds(const EnvelopeParams& env, double beta0, double eta) {
    const double xi = env.xi();
    const double d = std::pow(eta, xi) - std::pow(beta0, xi);
    return {std::exp(-2.0 * env.N2M / (env.L2m * xi) * d), std::exp(-2.0 * env.N2m / (env.L2M * xi) * d)};
}

Bounds phi1_bounds(const EnvelopeParams& env, double alpha0, double eta) {
    require_nu(env);
    const double nu = env.nu;
    const double a = 0.5 * (1.0 - nu);
    auto side = [&](double L_pref, double k) {
        const double log_scale = k * alpha0 * alpha0 + 0.5 * (nu - 1.0) * std::log(k) - std::log(2.0 * L_pref);
        return scaled_gamma_diff(a, k * alpha0 * alpha0, k * eta * eta, log_scale);
    };
    return {side(env.L1M, env.N1M / env.L1m), side(env.L1m, env.N1m / env.L1M)};
}

double M_function(const EnvelopeParams& env, double beta0) {
    return phi2_bounds(env, beta0, kInf).lower;
}

Bounds phi2_bounds(const EnvelopeParams& env, double beta0, double eta) {
    require_window(env);
    const double nu = env.nu, mu = env.mu, delta = env.delta, xi = env.xi();
    const double s = (3.0 - nu - mu) / xi;
    const double k = 2.0 * env.N2M / (env.L2m * xi);
    const double x_b = k * std::pow(beta0, xi);
    const double x_e = std::isinf(eta) ? kInf : k * std::pow(eta, xi);
    const double log_scale = x_b - std::log(env.L2M) +
                             (delta - 3.0 * mu + 5.0) / xi * std::log(env.L2m / (2.0 * env.N2M)) +
                             (1.0 - delta - nu) / xi * std::log(xi);
    Bounds b;
    b.lower = scaled_gamma_diff(s, x_b, x_e, log_scale);
    const double e = 1.0 - mu - nu;
    b.upper = std::isinf(eta) ? -std::pow(beta0, e) / (env.L2m * e)
                              : (std::pow(eta, e) - std::pow(beta0, e)) / (env.L2m * e);
    return b;
}

double phi1_tilde(const EnvelopeParams& env, double alpha0, double eta) {
    require_nu(env);
    const double nu = env.nu;
    const double a2 = alpha0 * alpha0;
    const double lip = env.Nt1 + env.N1M * env.Lt1 / env.L1m;
    const double poly = std::pow(eta, 3.0 - nu) / (3.0 - nu) - a2 * std::pow(eta, 1.0 - nu) / (1.0 - nu) +
                        2.0 * a2 / ((3.0 - nu) * (1.0 - nu));
    return (lip * poly + env.Lt1 * std::pow(eta, 1.0 - nu) / (1.0 - nu)) / (env.L1m * env.L1m);
}

double phi2_tilde(const EnvelopeParams& env, double beta0, double eta) {
    require_window(env);
    const double nu = env.nu, mu = env.mu, delta = env.delta;
    const double L2m = env.L2m;
    const double e1 = 3.0 - 2.0 * mu - nu;          // < 0
    const double e2 = delta - 3.0 * mu + 3.0 - nu;  // < 0
    const double e3 = 1.0 - mu - nu;                // < 0
    const double c1 = 2.0 - mu;
    const double c2 = delta - 2.0 * mu + 2.0;

    if (std::isinf(eta)) {
        return 2.0 / (L2m * L2m) *
               (env.Nt2 * std::pow(beta0, e1) / (e1 * e3) +
                env.Lt2 * env.N2M / L2m * std::pow(beta0, e2) / (e2 * e3) +
                env.Lt2 / L2m * std::pow(beta0, e3) / (mu + nu - 1.0));
    }
    if (eta <= beta0) return 0.0;
    const double pe3 = std::pow(eta, e3), pb3 = std::pow(beta0, e3);
    const double n_term = (std::pow(eta, e1) - std::pow(beta0, e1)) / (c1 * e1) -
                          (std::pow(beta0, c1) * pe3 - std::pow(beta0, e1)) / (c1 * e3);
    const double l_term = (std::pow(eta, e2) - std::pow(beta0, e2)) / (c2 * e2) -
                          (std::pow(beta0, c2) * pe3 - std::pow(beta0, e2)) / (c2 * e3);
    return 2.0 / L2m * (env.Nt2 / L2m * n_term + env.Lt2 * env.N2M / (L2m * L2m) * l_term) +
           env.Lt2 / (L2m * L2m) * (pe3 - pb3) / e3;
}

double lipschitz_rhs_E(const EnvelopeParams& env, Phase phase, double lo, double eta) {
    if (phase == Phase::Liquid) {
        require_nu(env);
        return (env.Nt1 + env.N1M * env.Lt1 / env.L1m) * (eta * eta - lo * lo) / env.L1m;
    }
    require_window(env);
    const double mu = env.mu, delta = env.delta;
    const double c1 = 2.0 - mu, c2 = delta - 2.0 * mu + 2.0;
    return 2.0 * (env.Nt2 / env.L2m * (std::pow(eta, c1) - std::pow(lo, c1)) / c1 +
                  env.Lt2 * env.N2M / (env.L2m * env.L2m) * (std::pow(eta, c2) - std::pow(lo, c2)) / c2);
}

double lipschitz_rhs_Phi(const EnvelopeParams& env, Phase phase, double lo, double eta) {
    return phase == Phase::Liquid ? phi1_tilde(env, lo, eta) : phi2_tilde(env, lo, eta);
}

namespace {

double liquid_gamma_diff(const EnvelopeParams& env, double alpha0, double beta0, double k) {
    const double a = 0.5 * (1.0 - env.nu);
    return scaled_gamma_diff(a, k * alpha0 * alpha0, k * beta0 * beta0, 0.0);
}

double epsilon_prefactor(const EnvelopeParams& env) {
    const double nu = env.nu;
    return 2.0 * std::pow(env.L1M, 0.5 * (5.0 - nu)) * std::pow(env.L1m, nu - 2.0) /
           std::pow(env.N1m, 0.5 * (1.0 - nu));
}

}  // namespace

double epsilon_certificate(const EnvelopeParams& env, double alpha0, double beta0) {
    require_nu(env);
    if (!(alpha0 >= 0.0) || !(beta0 > 0.0)) throw DomainError("epsilon_certificate: require 0 <= alpha0, beta0 > 0");
    if (alpha0 >= beta0) return kInf;
    const double den = liquid_gamma_diff(env, alpha0, beta0, env.N1M / env.L1m);
    if (!(den > std::numeric_limits<double>::min())) return kInf;
    return epsilon_prefactor(env) * phi1_tilde(env, alpha0, beta0) / den;
}

double A_coefficient(const EnvelopeParams& env, double alpha0, double beta0) {
    require_nu(env);
    const double nu = env.nu;
    const double k = env.N1M / env.L1m;
    const double g = liquid_gamma_diff(env, alpha0, beta0, k);
    if (!(g > 0.0)) return kInf;
    return 4.0 * env.L1M * env.L1M * std::pow(env.L1m, nu - 1.0) /
           (std::pow(env.N1M, nu - 1.0) * std::exp(2.0 * alpha0 * alpha0 * k) * g * g);
}

double epsilon_proof_chain(const EnvelopeParams& env, double alpha0, double beta0) {
    require_nu(env);
    const double nu = env.nu;
    const double A = A_coefficient(env, alpha0, beta0);
    if (std::isinf(A)) return kInf;
    const double km = env.N1m / env.L1M;
    const double g = liquid_gamma_diff(env, alpha0, beta0, km);
    return A * std::sqrt(std::pow(env.N1m, nu - 1.0)) * std::exp(km * alpha0 * alpha0) * phi1_tilde(env, alpha0, beta0) *
           g / (2.0 * env.L1m * std::sqrt(std::pow(env.L1M, nu - 1.0)));
}

double B_coefficient(const EnvelopeParams& env, double u_c, double beta0) {
    require_window(env);
    if (u_c == 0.0) return 0.0;
    const double nu = env.nu, mu = env.mu, delta = env.delta, xi = env.xi();
    const double s = (3.0 - nu - mu) / xi;
    const double p = (delta - 3.0 * mu + 5.0) / xi;
    const double q = (1.0 - delta - nu) / xi;
    const double x = 2.0 * env.N2M * std::pow(beta0, xi) / (env.L2m * xi);
    const double log_den = x + p * std::log(env.L2m) + q * std::log(xi) + special::log_upper_tail_gamma(s, x);
    const double log_B = std::log(std::abs(u_c)) + 2.0 * std::log(env.L2M) + p * std::log(2.0 * env.N2M) - 2.0 * log_den;
    return std::exp(log_B);
}

double sigma_certificate(const EnvelopeParams& env, double u_c, double beta0) {
    require_window(env);
    if (!(beta0 > 0.0)) throw DomainError("sigma_certificate: beta0 must be positive");
    if (u_c > 0.0) throw DomainError("sigma_certificate: u_c must be <= 0");
    const double B = B_coefficient(env, u_c, beta0);
    if (B == 0.0) return 0.0;
    const double e = 1.0 - env.mu - env.nu;
    return B * std::pow(beta0, e) * phi2_tilde(env, beta0, kInf) / (env.L2m * (env.mu + env.nu - 1.0));
}

Bounds beta_hat_condition(const EnvelopeParams& env, double beta0) {
    require_nu(env);
    const double a = 0.5 * (1.0 - env.nu);
    return {epsilon_prefactor(env) * phi1_tilde(env, 0.0, beta0),
            special::lower_incomplete_gamma(a, beta0 * beta0 * env.N1M / env.L1m)};
}

ThresholdBetas threshold_betas(const EnvelopeParams& env, double u_c, double beta_lo, double beta_hi, int scan_points) {
    if (!(beta_lo > 0.0) || !(beta_hi > beta_lo) || scan_points < 2)
        throw DomainError("threshold_betas: require 0 < beta_lo < beta_hi and >= 2 scan points");
    std::vector<double> grid(scan_points);
    for (int i = 0; i < scan_points; ++i)
        grid[i] = beta_lo * std::pow(beta_hi / beta_lo, static_cast<double>(i) / (scan_points - 1));

    ThresholdBetas out;
    auto sigma_below = [&](double b) { return sigma_certificate(env, u_c, b) < 1.0; };
    // Last upward-to-downward crossing of sigma = 1: sigma < 1 on every later grid point.
    for (int i = scan_points - 1; i > 0; --i) {
        if (!sigma_below(grid[i])) break;
        if (!sigma_below(grid[i - 1])) {
            out.beta_tilde = log_bisect(sigma_below, grid[i - 1], grid[i], 1e-12);
            break;
        }
    }

    auto des = [&](double b) {
        const auto c = beta_hat_condition(env, b);
        return c.lower < c.upper;
    };
    for (int i = scan_points - 1; i >= 0; --i) {
        if (des(grid[i])) {
            out.beta_hat = (i == scan_points - 1) ? grid[i] : log_bisect(des, grid[i], grid[i + 1], 1e-12);
            break;
        }
    }
    return out;
}

std::optional<double> alpha_tilde(const EnvelopeParams& env, double beta0) {
    const double e0 = epsilon_certificate(env, 0.0, beta0);
    if (!(e0 < 1.0)) return std::nullopt;
    double lo = 0.0, hi = beta0;
    for (int i = 0; i < 200 && hi - lo > 1e-13 * beta0; ++i) {
        const double mid = 0.5 * (lo + hi);
        (epsilon_certificate(env, mid, beta0) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

JValues J_functions(const EnvelopeParams& env, const StefanConstants& k, double u_c, double beta0, double alpha0_star) {
    JValues j;
    const double nu = env.nu;
    const auto phi1 = phi1_bounds(env, alpha0_star, beta0);
    j.i1 = phi1.lower;
    j.i2 = phi1.upper;
    j.M = M_function(env, beta0);
    const double bb = k.B_star * std::pow(beta0, nu + 1.0);
    j.J2 = 1.0 / j.i1 - bb;
    const double radicand = bb - u_c / j.M;
    j.radicand_ok = radicand > 0.0 && std::isfinite(radicand);
    j.J1 = j.radicand_ok ? 1.0 / j.i2 - std::pow(radicand, 1.0 / (nu + 1.0)) : std::numeric_limits<double>::quiet_NaN();
    return j;
}

CertificateReport evaluate_certificates(const EnvelopeParams& env, double u_c, double alpha0, double beta0,
                                        double beta_lo, double beta_hi) {
    CertificateReport r;
    r.window = validate_window(env.nu, env.mu, env.delta);
    r.window_ok = r.window.admissible();
    r.phi1_tilde = phi1_tilde(env, alpha0, beta0);
    r.epsilon = epsilon_certificate(env, alpha0, beta0);
    r.epsilon_chain = epsilon_proof_chain(env, alpha0, beta0);
    r.A_val = A_coefficient(env, alpha0, beta0);
    r.sigma_applicable = r.window_ok;
    r.sigma = kInf;
    if (r.window_ok) {
        r.phi2_tilde = phi2_tilde(env, beta0, kInf);
        r.B_val = B_coefficient(env, u_c, beta0);
        r.sigma = sigma_certificate(env, u_c, beta0);
        r.thresholds = threshold_betas(env, u_c, beta_lo, beta_hi);
    }
    r.contraction_ok = r.epsilon < 1.0 && r.sigma < 1.0;
    return r;
}

}  // namespace stefan
