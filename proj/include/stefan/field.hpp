#pragma once

// Physical reconstruction theta_i(r, t) = theta_m + (theta_b - theta_m) u_i(r / (2 sqrt t))
// and residual checks of a converged similarity solution.

#include "stefan/solver.hpp"

namespace stefan {

struct FieldSolution {
    Solution solution;
    ProblemSpec spec;

    double alpha_of_t(double t) const;
    double beta_of_t(double t) const;
    /// Liquid temperature on alpha(t) <= r <= beta(t).
    double theta1(double r, double t) const;
    /// Solid temperature on r >= beta(t).
    double theta2(double r, double t) const;
    /// theta1 or theta2 by position; r < alpha(t) is outside the model.
    double theta(double r, double t) const;
    Phase phase_at(double r, double t) const;
};

FieldSolution reconstruct(const Solution& sol, const ProblemSpec& spec);

/// max |[L eta^nu u']' + 2 eta^{nu+1} N u'| / max |[L eta^nu u']'| over interior samples.
///
/// Derivatives are fourth-order central differences of a local quintic
/// interpolant of the nodes. NaN when the grid is too coarse for the stencil.
double ode_residual(const Profile& u, const CoefficientModel& model, double nu, int samples = 256);

struct StefanResiduals {
    double r1 = 0.0;  // L1 u1'(alpha0) + A* alpha0
    double r2 = 0.0;  // L1 u1'(beta0) - L2 u2'(beta0) + B* beta0
};

/// Interface derivatives from u1' = -E1/(eta^nu L1 Phi1), u2' = u_c E2/(eta^nu L2 Phi2).
StefanResiduals stefan_residuals(const Solution& sol, const ProblemSpec& spec, const quad::QuadOptions& opts = {});

Residuals compute_residuals(const Problem& pb, const Solution& sol, const SolveOptions& opts);

}  // namespace stefan
