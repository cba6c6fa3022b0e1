#pragma once

// Contraction certificates and the bound functions they are built from.
//
// Formulas are kept term by term, including
// constant factors that are looser than necessary. Two places use a corrected
// form instead: the solid exponential sandwich keeps the factor 2 from
// E2 = exp(-2 int ...), and the finite-eta Phi-tilde for the solid phase uses
// the grouping of its U1 + U2 derivation.

#include <optional>

#include "stefan/thermal_model.hpp"

namespace stefan {

struct Bounds {
    double lower = 0.0;
    double upper = 0.0;
};

// -- exponential and Phi sandwiches ------------------------------------------

/// exp(-(N1M/L1m)(eta^2-a0^2)) <= E1 <= exp(-(N1m/L1M)(eta^2-a0^2)).
Bounds e1_bounds(const EnvelopeParams& env, double alpha0, double eta);
/// exp(-2 N2M/(L2m xi)(eta^xi-b0^xi)) <= E2 <= exp(-2 N2m/(L2M xi)(eta^xi-b0^xi)).
Bounds e2_bounds(const EnvelopeParams& env, double beta0, double eta);
/// Incomplete-gamma lower/upper bounds of Phi1 on [alpha0, eta].
Bounds phi1_bounds(const EnvelopeParams& env, double alpha0, double eta);
/// Lower bound with gamma shape (3-nu-mu)/xi; upper bound from E2 <= 1 and L2 >= L2m eta^mu.
Bounds phi2_bounds(const EnvelopeParams& env, double beta0, double eta);

// -- Lipschitz multipliers ---------------------------------------------------

double phi1_tilde(const EnvelopeParams& env, double alpha0, double eta);
/// Finite eta uses the U1+U2 grouping; eta = +inf uses the closed tail expression.
double phi2_tilde(const EnvelopeParams& env, double beta0, double eta);

/// Multiplier of ||u* - u|| bounding |E[u](eta) - E[u*](eta)|; lo is alpha0 or beta0.
double lipschitz_rhs_E(const EnvelopeParams& env, Phase phase, double lo, double eta);
/// Multiplier of ||u* - u|| bounding |Phi[u](eta) - Phi[u*](eta)|.
double lipschitz_rhs_Phi(const EnvelopeParams& env, Phase phase, double lo, double eta);

// -- certificates --------------------------------------------------------------

/// epsilon(alpha0, beta0); +inf when the gamma difference underflows.
double epsilon_certificate(const EnvelopeParams& env, double alpha0, double beta0);
/// A(alpha0, beta0) from the liquid contraction estimate.
double A_coefficient(const EnvelopeParams& env, double alpha0, double beta0);
/// The contraction chain A * (upper Phi1 bound) * Phi1-tilde, reported next to epsilon.
double epsilon_proof_chain(const EnvelopeParams& env, double alpha0, double beta0);

double B_coefficient(const EnvelopeParams& env, double u_c, double beta0);
double sigma_certificate(const EnvelopeParams& env, double u_c, double beta0);

struct ThresholdBetas {
    std::optional<double> beta_tilde;  // sigma(beta_tilde) = 1, sigma < 1 beyond
    std::optional<double> beta_hat;    // largest beta in range where the epsilon(0, beta) < 1 condition holds
};

ThresholdBetas threshold_betas(const EnvelopeParams& env, double u_c, double beta_lo, double beta_hi,
                               int scan_points = 64);

/// Left side and right side of the beta-hat condition at beta0.
Bounds beta_hat_condition(const EnvelopeParams& env, double beta0);

/// alpha-tilde(beta0): epsilon(alpha, beta0) = 1, if epsilon(0, beta0) < 1.
std::optional<double> alpha_tilde(const EnvelopeParams& env, double beta0);

struct JValues {
    double J1 = 0.0;
    double J2 = 0.0;
    double i1 = 0.0;
    double i2 = 0.0;
    double M = 0.0;
    bool radicand_ok = true;
};

/// A* = 2 l_b gamma_b/(theta_b-theta_m), B* = 2 l_m gamma_m/(theta_b-theta_m).
struct StefanConstants {
    double A_star = 0.0;
    double B_star = 0.0;
};

/// Lower bound M of Phi2 on [beta0, inf).
double M_function(const EnvelopeParams& env, double beta0);

JValues J_functions(const EnvelopeParams& env, const StefanConstants& k, double u_c, double beta0,
                    double alpha0_star);

// -- report --------------------------------------------------------------------

struct CertificateReport {
    double epsilon = 0.0;
    double epsilon_chain = 0.0;
    double sigma = 0.0;
    double phi1_tilde = 0.0;
    double phi2_tilde = 0.0;
    double A_val = 0.0;
    double B_val = 0.0;
    WindowVerdict window;
    bool window_ok = false;
    bool sigma_applicable = false;
    bool contraction_ok = false;
    double empirical_ratio_liquid = 0.0;
    double empirical_ratio_solid = 0.0;
    ThresholdBetas thresholds;
};

CertificateReport evaluate_certificates(const EnvelopeParams& env, double u_c, double alpha0, double beta0,
                                        double beta_lo = 1e-3, double beta_hi = 10.0);

}  // namespace stefan
