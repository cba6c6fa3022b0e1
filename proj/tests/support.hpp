#pragma once

// Shared fixtures: the manufactured constant-coefficient problem and its
// affine perturbations.

#include <cmath>

#include "stefan/solver.hpp"
#include "stefan/special_fn.hpp"

namespace testing {

// (alpha0, beta0) = (0.4, 1.0) solves the consistent balance; theta_m = 1, theta_b = 11 so u_c = -0.1.
inline constexpr double kLb = 36.335820701324307;
inline constexpr double kLm = 2.4745265709599936;
// Same plant for the closed-form (printed) balance.
inline constexpr double kLmPrinted = 7.698423204004141;

inline stefan::ProblemSpec manufactured(double slope = 0.0) {
    using stefan::CoefficientFn;
    stefan::ProblemSpec s;
    s.nu = 0.5;
    s.theta_b = 11.0;
    s.theta_m = 1.0;
    s.l_b = kLb;
    s.l_m = kLm;
    s.gamma_b = s.gamma_m = 1.0;
    s.lambda1 = s.lambda2 = CoefficientFn::affine(1.0, slope);
    s.c1 = s.c2 = CoefficientFn::affine(1.0, -0.5 * slope);
    s.rho1 = s.rho2 = CoefficientFn::constant(1.0);
    return s;
}

/// 1 - [gamma(a, k eta^2) - gamma(a, k lo^2)] / [gamma(a, k hi^2) - gamma(a, k lo^2)], a = (1-nu)/2.
inline double liquid_closed_form(double nu, double k, double lo, double hi, double eta) {
    using stefan::special::lower_incomplete_gamma;
    const double a = 0.5 * (1.0 - nu);
    const double g0 = lower_incomplete_gamma(a, k * lo * lo);
    return 1.0 - (lower_incomplete_gamma(a, k * eta * eta) - g0) / (lower_incomplete_gamma(a, k * hi * hi) - g0);
}

/// u_c [gamma(a, k eta^2) - gamma(a, k b^2)] / [Gamma(a) - gamma(a, k b^2)], via upper tails.
inline double solid_closed_form(double nu, double k, double u_c, double b, double eta) {
    using stefan::special::upper_tail_gamma;
    const double a = 0.5 * (1.0 - nu);
    const double tb = upper_tail_gamma(a, k * b * b);
    return u_c * (tb - upper_tail_gamma(a, k * eta * eta)) / tb;
}

}  // namespace testing
