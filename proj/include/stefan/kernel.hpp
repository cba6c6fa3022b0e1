#pragma once

// Integral kernels of the similarity problem for a given profile u on [lo, hi]:
//
//   I(eta)   = int_lo^eta s N(u(s)) / L(u(s)) ds
//   E(eta)   = exp(-2 I(eta))
//   Phi(eta) = int_lo^eta E(s) / (s^nu L(u(s))) ds
//
// Both integrals are accumulated panel by panel over the profile grid, with u
// read through a local cubic interpolant of the four nearest nodes. Inside a
// panel, I is recovered from the cumulative value at the left node plus a
// five-point Gauss-Legendre partial integral (the integrand is smooth there),
// which keeps the outer quadrature from re-integrating the inner kernel from lo.

#include <Eigen/Core>

#include "stefan/profile.hpp"
#include "stefan/quad.hpp"
#include "stefan/thermal_model.hpp"

namespace stefan {

struct KernelCache {
    double nu = 0.5;
    Eigen::VectorXd inner_cumulative;  // I at the nodes
    Eigen::VectorXd phi_cumulative;    // Phi at the nodes
    double phi_total = 0.0;            // Phi(hi), or Phi on [lo, inf) for solid profiles
    double tail_eta_max = 0.0;         // truncation point of the solid tail integral
};

KernelCache build_cache(const CoefficientModel& model, const Profile& p, double nu,
                        const quad::QuadOptions& opts = {});

double eval_E(const CoefficientModel& model, const Profile& p, const KernelCache& cache, double eta);

double eval_Phi(const CoefficientModel& model, const Profile& p, const KernelCache& cache, double eta,
                const quad::QuadOptions& opts = {});

/// Phi with L, N frozen at constants over [lo, hi] (hi may be +inf); closed form in gamma functions.
double phi_frozen(double L, double N, double nu, double lo, double hi);

}  // namespace stefan
