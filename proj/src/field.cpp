#include "stefan/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stefan/errors.hpp"

namespace stefan {
namespace {

double eta_of(double r, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("field: t must be positive");
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("field: r must be finite and non-negative");
    return r / (2.0 * std::sqrt(t));
}

constexpr int kStencil = 6;
constexpr double kStepFactor = 2.0;  // FD step in local grid spacings

// Degree-5 Lagrange interpolant through the six nodes around eta.
double interp_local(const Profile& p, double eta) {
    const Eigen::Index n = p.size();
    const Eigen::Index k = locate_panel(p, eta);
    const Eigen::Index s = std::clamp<Eigen::Index>(k - kStencil / 2 + 1, 0, n - kStencil);
    double sum = 0.0;
    for (int i = 0; i < kStencil; ++i) {
        double w = 1.0;
        const double xi = p.nodes(s + i);
        for (int j = 0; j < kStencil; ++j)
            if (j != i) w *= (eta - p.nodes(s + j)) / (xi - p.nodes(s + j));
        sum += w * p.values(s + i);
    }
    return sum;
}

template <class F>
double d1(F&& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

}  // namespace

double FieldSolution::alpha_of_t(double t) const {
    if (!(t > 0.0)) throw DomainError("field: t must be positive");
    return 2.0 * solution.alpha0 * std::sqrt(t);
}

double FieldSolution::beta_of_t(double t) const {
    if (!(t > 0.0)) throw DomainError("field: t must be positive");
    return 2.0 * solution.beta0 * std::sqrt(t);
}

double FieldSolution::theta1(double r, double t) const {
    const double eta = eta_of(r, t);
    return spec.theta_m + (spec.theta_b - spec.theta_m) * eval(solution.u1, eta);
}

double FieldSolution::theta2(double r, double t) const {
    const double eta = eta_of(r, t);
    if (eta < solution.beta0) throw DomainError("theta2: r lies inside the liquid layer");
    return spec.theta_m + (spec.theta_b - spec.theta_m) * eval(solution.u2, eta);
}

Phase FieldSolution::phase_at(double r, double t) const {
    const double eta = eta_of(r, t);
    if (eta < solution.alpha0) throw DomainError("field: r < alpha(t) lies outside the two-phase region");
    return eta <= solution.beta0 ? Phase::Liquid : Phase::Solid;
}

double FieldSolution::theta(double r, double t) const {
    return phase_at(r, t) == Phase::Liquid ? theta1(r, t) : theta2(r, t);
}

FieldSolution reconstruct(const Solution& sol, const ProblemSpec& spec) {
    if (!(sol.alpha0 > 0.0) || !(sol.beta0 > sol.alpha0)) throw DomainError("reconstruct: require 0 < alpha0 < beta0");
    return {sol, spec};
}

double ode_residual(const Profile& u, const CoefficientModel& model, double nu, int samples) {
    const Eigen::Index n = u.size();
    const int reach = static_cast<int>(std::ceil(4 * kStepFactor)) + kStencil;
    if (n < 2 * reach + 2 || samples < 1) return std::numeric_limits<double>::quiet_NaN();

    auto flux = [&](double eta, double h) {
        const double du = d1([&](double s) { return interp_local(u, s); }, eta, h);
        return model.L(interp_local(u, eta)) * std::pow(eta, nu) * du;
    };
    // Solid profiles flatten out long before eta_max; keep to the part that carries the signal.
    const Eigen::Index last = u.kind == Phase::Solid ? std::max<Eigen::Index>(reach + 1, (2 * n) / 3) : n - reach - 1;
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double pos = reach + (last - reach) * (i + 0.37) / samples;
        const Eigen::Index k = static_cast<Eigen::Index>(pos);
        const double eta = u.nodes(k) + (pos - k) * (u.nodes(k + 1) - u.nodes(k));
        const double h = kStepFactor * (u.nodes(k + 1) - u.nodes(k));
        const double dF = d1([&](double s) { return flux(s, h); }, eta, h);
        const double du = d1([&](double s) { return interp_local(u, s); }, eta, h);
        const double res = dF + 2.0 * std::pow(eta, nu + 1.0) * model.N(interp_local(u, eta)) * du;
        worst = std::max(worst, std::abs(res));
        scale = std::max(scale, std::abs(dF));
    }
    return scale > 0.0 ? worst / scale : worst;
}

StefanResiduals stefan_residuals(const Solution& sol, const ProblemSpec& spec, const quad::QuadOptions& opts) {
    const auto model = dimensionless_model(spec);
    const auto k = stefan_constants(spec);
    const double nu = spec.nu, a = sol.alpha0, b = sol.beta0;
    const KernelCache c1 = build_cache(model.liquid, sol.u1, nu, opts);
    const KernelCache c2 = build_cache(model.solid, sol.u2, nu, opts);
    const double E1b = std::exp(-2.0 * c1.inner_cumulative(sol.u1.size() - 1));
    StefanResiduals r;
    r.r1 = -1.0 / (std::pow(a, nu) * c1.phi_total) + k.A_star * a;
    r.r2 = -E1b / (std::pow(b, nu) * c1.phi_total) - model.u_c / (std::pow(b, nu) * c2.phi_total) + k.B_star * b;
    return r;
}

Residuals compute_residuals(const Problem& pb, const Solution& sol, const SolveOptions& opts) {
    const double nu = pb.spec.nu, u_c = pb.model.u_c, b = sol.beta0;
    const KernelCache c1 = build_cache(pb.model.liquid, sol.u1, nu, opts.quad);
    const KernelCache c2 = build_cache(pb.model.solid, sol.u2, nu, opts.quad);
    const double E1b = std::exp(-2.0 * c1.inner_cumulative(sol.u1.size() - 1));
    const double rhs = pb.k.B_star * std::pow(b, nu + 1.0) - u_c / c2.phi_total;

    Residuals r;
    const auto s = stefan_residuals(sol, pb.spec, opts.quad);
    r.r1 = s.r1;
    r.r2 = s.r2;
    r.balance_printed = 1.0 / c1.phi_total - rhs;
    r.balance_consistent = E1b / c1.phi_total - rhs;
    r.beta_residual = 1.0 / c1.phi_total - pb.k.A_star * std::pow(sol.alpha0, nu + 1.0);
    r.ode_liquid = ode_residual(sol.u1, pb.model.liquid, nu);
    r.ode_solid = ode_residual(sol.u2, pb.model.solid, nu);
    return r;
}

}  // namespace stefan
