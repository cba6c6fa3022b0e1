#include "stefan/profile.hpp"

#include <algorithm>
#include <cmath>

#include "stefan/errors.hpp"

namespace stefan {

Profile make_liquid_grid(double alpha0, double beta0, int n) {
    if (!(alpha0 > 0.0) || !std::isfinite(beta0)) throw DomainError("make_liquid_grid: require 0 < alpha0 < beta0");
    if (beta0 - alpha0 < 1e-12) throw DomainError("make_liquid_grid: degenerate interval");
    if (n < 2) throw DomainError("make_liquid_grid: need at least two nodes");

    Profile p;
    p.kind = Phase::Liquid;
    p.nodes = Eigen::VectorXd::LinSpaced(n, alpha0, beta0);
    p.values = (beta0 - p.nodes.array()) / (beta0 - alpha0);
    p.nodes(n - 1) = beta0;
    p.values(0) = 1.0;
    p.values(n - 1) = 0.0;
    p.tail_value = 0.0;
    return p;
}

Profile make_solid_grid(double beta0, double u_c, int n, double eta_max) {
    if (!(beta0 > 0.0) || !(eta_max > beta0) || !std::isfinite(eta_max))
        throw DomainError("make_solid_grid: require 0 < beta0 < eta_max");
    if (eta_max - beta0 < 1e-12) throw DomainError("make_solid_grid: degenerate interval");
    if (n < 2) throw DomainError("make_solid_grid: need at least two nodes");
    if (u_c > 0.0) throw DomainError("make_solid_grid: far-field value u_c must be <= 0");

    // eta = beta0 + tau/(1-tau) * (eta_max - beta0)/K, tau uniform on [0, K/(K+1)].
    const double K = kSolidStretch;
    const double tau_end = K / (K + 1.0);
    Profile p;
    p.kind = Phase::Solid;
    p.nodes.resize(n);
    p.values.resize(n);
    for (int i = 0; i < n; ++i) {
        const double tau = tau_end * i / (n - 1);
        p.nodes(i) = beta0 + tau / (1.0 - tau) * (eta_max - beta0) / K;
    }
    p.nodes(0) = beta0;
    p.nodes(n - 1) = eta_max;
    const double floor = std::min(u_c, 0.0);
    for (int i = 0; i < n; ++i)
        p.values(i) = std::clamp(u_c * (1.0 - std::exp(-(p.nodes(i) - beta0))), floor, 0.0);
    p.values(0) = 0.0;
    p.tail_value = u_c;
    return p;
}

Eigen::Index locate_panel(const Profile& p, double eta) {
    const auto* begin = p.nodes.data();
    const auto* end = begin + p.nodes.size();
    const auto* it = std::upper_bound(begin, end, eta);
    Eigen::Index k = static_cast<Eigen::Index>(it - begin) - 1;
    return std::clamp<Eigen::Index>(k, 0, p.nodes.size() - 2);
}

double eval(const Profile& p, double eta) {
    if (!std::isfinite(eta)) {
        if (p.unbounded() && eta > 0) return p.tail_value;
        throw DomainError("eval: non-finite eta");
    }
    const double span = p.hi() - p.lo();
    const double slack = 1e-12 * std::max(1.0, span);
    if (eta < p.lo() - slack) throw DomainError("eval: eta below profile support");
    if (eta > p.hi()) {
        if (p.unbounded()) return p.tail_value;
        if (eta > p.hi() + slack) throw DomainError("eval: eta above profile support");
        return p.values(p.size() - 1);
    }
    const Eigen::Index k = locate_panel(p, eta);
    const double x0 = p.nodes(k), x1 = p.nodes(k + 1);
    const double w = std::clamp((eta - x0) / (x1 - x0), 0.0, 1.0);
    if (w == 0.0) return p.values(k);
    if (w == 1.0) return p.values(k + 1);
    return (1.0 - w) * p.values(k) + w * p.values(k + 1);
}

double sup_distance(const Profile& p, const Profile& q) {
    if (p.size() != q.size() || p.kind != q.kind || p.nodes != q.nodes)
        throw DomainError("sup_distance: profiles are on different grids");
    return (p.values - q.values).cwiseAbs().maxCoeff();
}

Profile blend(const Profile& p, const Profile& q, double w) {
    if (p.size() != q.size() || p.nodes != q.nodes) throw DomainError("blend: profiles are on different grids");
    Profile out = q;
    if (w != 1.0) out.values = (1.0 - w) * p.values + w * q.values;
    return out;
}

}  // namespace stefan
