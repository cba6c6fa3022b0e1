#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stefan/profile.hpp"

namespace stefan {

/// Temperature-dependent material coefficient.
///
/// Families: constant a; affine a + b*theta; power a*theta^p; tabulated
/// piecewise-linear in theta (clamped to the end values outside the table).
struct CoefficientFn {
    enum class Family { Constant, Affine, Power, Tabulated };

    Family family = Family::Constant;
    double a = 1.0;
    double b = 0.0;
    double p = 1.0;
    std::vector<double> theta;
    std::vector<double> value;

    static CoefficientFn constant(double a);
    static CoefficientFn affine(double a, double b);
    static CoefficientFn power(double a, double p);
    static CoefficientFn tabulated(std::vector<double> theta, std::vector<double> value);

    double operator()(double temperature) const;
    std::string family_name() const;
};

/// Physical inputs of the two-phase problem (SI units, temperatures in K).
struct ProblemSpec {
    double nu = 0.5;
    double theta_b = 1.0;
    double theta_m = 0.0;
    double l_b = 1.0;
    double l_m = 1.0;
    double gamma_b = 1.0;
    double gamma_m = 1.0;
    CoefficientFn lambda1, c1, rho1;
    CoefficientFn lambda2, c2, rho2;
};

/// Throws DomainError naming the first violated constraint.
void validate(const ProblemSpec& spec);

/// Dimensionless conductivity L(u) and volumetric heat capacity N(u) of one phase.
struct CoefficientModel {
    std::function<double(double)> L;
    std::function<double(double)> N;
    Phase phase = Phase::Liquid;
};

struct DimensionlessModel {
    CoefficientModel liquid;
    CoefficientModel solid;
    double u_c = 0.0;
};

/// L_i(u) = lambda_i(theta_m + (theta_b - theta_m) u), N_i(u) = c_i rho_i at the same temperature.
DimensionlessModel dimensionless_model(const ProblemSpec& spec);

/// Envelope constants along a solution path plus the Lipschitz constants of L_i, N_i.
///
/// Liquid: L1m <= L1(u1) <= L1M, N1m <= N1(u1) <= N1M.
/// Solid:  L2m eta^mu <= L2(u2) <= L2M eta^mu, N2m eta^delta <= N2(u2) <= N2M eta^delta.
struct EnvelopeParams {
    double nu = 0.5;
    double L1m = 1, L1M = 1, N1m = 1, N1M = 1;
    double L2m = 1, L2M = 1, N2m = 1, N2M = 1;
    double mu = 1.6;
    double delta = 1.9;
    double Lt1 = 0, Lt2 = 0, Nt1 = 0, Nt2 = 0;

    double xi() const { return 2.0 + delta - mu; }
};

/// The six strict inequalities required by the certificates.
struct WindowVerdict {
    bool mu_above_lower = false;   // (3 - nu)/2 < mu
    bool mu_below_two = false;     // mu < 2
    bool delta_above_mu = false;   // mu < delta
    bool delta_below_upper = false;  // delta < 3 mu + nu - 3
    bool xi_positive = false;      // 2 + delta - mu > 0
    bool mu_nu_above_one = false;  // mu + nu > 1

    bool admissible() const {
        return mu_above_lower && mu_below_two && delta_above_mu && delta_below_upper && xi_positive &&
               mu_nu_above_one;
    }
    std::vector<std::string> violations() const;
};

WindowVerdict validate_window(double nu, double mu, double delta);

struct LiquidEnvelope {
    double Lm, LM, Nm, NM, Lt, Nt;
};
struct SolidEnvelope {
    double Lm, LM, Nm, NM, Lt, Nt;
};

inline constexpr int kEnvelopeSamples = 4097;

/// Min/max of L1(u1(eta)), N1(u1(eta)) over a dense sample; Lipschitz constants over u in [0,1].
LiquidEnvelope estimate_liquid_envelope(const CoefficientModel& model, const Profile& u1,
                                        int samples = kEnvelopeSamples);

/// Tightest prefactors of eta^mu, eta^delta over a dense sample; Lipschitz constants over [u_c, 0].
SolidEnvelope estimate_solid_envelope(const CoefficientModel& model, const Profile& u2, double mu,
                                      double delta, int samples = kEnvelopeSamples);

EnvelopeParams estimate_envelopes(const CoefficientModel& liquid, const Profile& u1,
                                  const CoefficientModel& solid, const Profile& u2, double nu, double mu,
                                  double delta, int samples = kEnvelopeSamples);

/// Smallest envelope containing both (min of lower constants, max of upper and Lipschitz constants).
EnvelopeParams hull(const EnvelopeParams& a, const EnvelopeParams& b);

/// Maximum |f(x) - f(y)| / |x - y| over a uniform sample of [lo, hi].
double lipschitz_estimate(const std::function<double(double)>& f, double lo, double hi,
                          int samples = kEnvelopeSamples);

}  // namespace stefan
