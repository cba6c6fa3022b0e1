#include "stefan/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stefan/errors.hpp"
#include "stefan/special_fn.hpp"

namespace stefan {
namespace {

constexpr double kGl5X[5] = {-0.906179845938663992797626878299, -0.538469310105683091036314420700, 0.0,
                             0.538469310105683091036314420700, 0.906179845938663992797626878299};
constexpr double kGl5W[5] = {0.236926885056189087514264040720, 0.478628670499366468041291514836,
                             0.568888888888888888888888888889, 0.478628670499366468041291514836,
                             0.236926885056189087514264040720};

// Profile restricted to one panel, read through the cubic through the four
// nearest nodes (fewer on tiny grids).
struct PanelView {
    double x0, x1;
    int m;
    double xs[4], us[4];
    double u(double s) const {
        double sum = 0.0;
        for (int i = 0; i < m; ++i) {
            double w = 1.0;
            for (int j = 0; j < m; ++j)
                if (j != i) w *= (s - xs[j]) / (xs[i] - xs[j]);
            sum += w * us[i];
        }
        return sum;
    }
};

PanelView panel_at(const Profile& p, Eigen::Index k) {
    const Eigen::Index n = p.size();
    PanelView pv{p.nodes(k), p.nodes(k + 1), static_cast<int>(std::min<Eigen::Index>(4, n)), {}, {}};
    const Eigen::Index first = std::clamp<Eigen::Index>(k - 1, 0, n - pv.m);
    for (int i = 0; i < pv.m; ++i) {
        pv.xs[i] = p.nodes(first + i);
        pv.us[i] = p.values(first + i);
    }
    return pv;
}

double checked(double v, const char* name, double u) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw ModelDomainError(std::string("kernel: ") + name + "(u) must be positive, got " + std::to_string(v) +
                               " at u=" + std::to_string(u));
    return v;
}

double ratio_integrand(const CoefficientModel& m, const PanelView& pv, double s) {
    const double u = pv.u(s);
    return s * checked(m.N(u), "N", u) / checked(m.L(u), "L", u);
}

double partial_inner(const CoefficientModel& m, const PanelView& pv, double upper) {
    if (upper == pv.x0) return 0.0;
    const double c = 0.5 * (pv.x0 + upper), h = 0.5 * (upper - pv.x0);
    double sum = 0.0;
    for (int j = 0; j < 5; ++j) sum += kGl5W[j] * ratio_integrand(m, pv, c + h * kGl5X[j]);
    return sum * h;
}

}  // namespace

KernelCache build_cache(const CoefficientModel& model, const Profile& p, double nu, const quad::QuadOptions& opts) {
    const Eigen::Index n = p.size();
    if (n < 2) throw DomainError("build_cache: profile needs at least two nodes");
    if (!(p.lo() > 0.0)) throw DomainError("build_cache: profile support must start at eta > 0");

    KernelCache c;
    c.nu = nu;
    c.inner_cumulative = Eigen::VectorXd::Zero(n);
    c.phi_cumulative = Eigen::VectorXd::Zero(n);

    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const PanelView pv = panel_at(p, k);
        const double I0 = c.inner_cumulative(k);
        const auto inner = quad::integrate([&](double s) { return ratio_integrand(model, pv, s); }, pv.x0, pv.x1, opts);
        c.inner_cumulative(k + 1) = I0 + inner.value;

        auto outer = [&](double s) {
            const double u = pv.u(s);
            const double E = std::exp(-2.0 * (I0 + partial_inner(model, pv, s)));
            return E / (std::pow(s, nu) * checked(model.L(u), "L", u));
        };
        c.phi_cumulative(k + 1) = c.phi_cumulative(k) + quad::integrate(outer, pv.x0, pv.x1, opts).value;
    }
    c.phi_total = c.phi_cumulative(n - 1);

    if (p.unbounded()) {
        // Beyond the last node u = u_c, so E decays like a Gaussian with rate N(u_c)/L(u_c).
        const double X = p.hi();
        const double uc = p.tail_value;
        const double L = checked(model.L(uc), "L", uc);
        const double rate = checked(model.N(uc), "N", uc) / L;
        const double E_last = std::exp(-2.0 * c.inner_cumulative(n - 1));
        auto tail = [&](double s) { return E_last * std::exp(-rate * (s * s - X * X)) / (std::pow(s, nu) * L); };
        const quad::TailBound bound{E_last * std::exp(rate * X * X) / (std::pow(X, nu) * L), rate, 2.0};
        const auto t = quad::integrate_to_infinity(tail, X, bound, opts);
        c.phi_total += t.value;
        c.tail_eta_max = t.eta_max;
    }
    return c;
}

double eval_E(const CoefficientModel& model, const Profile& p, const KernelCache& cache, double eta) {
    if (eta < p.lo() || !std::isfinite(eta) || (!p.unbounded() && eta > p.hi()))
        throw DomainError("eval_E: eta outside profile support");
    const Eigen::Index n = p.size();
    if (eta >= p.hi()) {
        const double E_last = std::exp(-2.0 * cache.inner_cumulative(n - 1));
        if (eta == p.hi()) return E_last;
        const double uc = p.tail_value;
        const double rate = model.N(uc) / model.L(uc);
        return E_last * std::exp(-rate * (eta * eta - p.hi() * p.hi()));
    }
    const Eigen::Index k = locate_panel(p, eta);
    return std::exp(-2.0 * (cache.inner_cumulative(k) + partial_inner(model, panel_at(p, k), eta)));
}

double eval_Phi(const CoefficientModel& model, const Profile& p, const KernelCache& cache, double eta,
                const quad::QuadOptions& opts) {
    if (eta < p.lo() || std::isnan(eta) || (!p.unbounded() && eta > p.hi()))
        throw DomainError("eval_Phi: eta outside profile support");
    const double nu = cache.nu;
    const Eigen::Index n = p.size();
    if (std::isinf(eta)) return cache.phi_total;
    if (eta >= p.hi()) {
        if (eta == p.hi()) return cache.phi_cumulative(n - 1);
        const double uc = p.tail_value;
        const double L = model.L(uc);
        auto tail = [&](double s) { return eval_E(model, p, cache, s) / (std::pow(s, nu) * L); };
        return cache.phi_cumulative(n - 1) + quad::integrate(tail, p.hi(), eta, opts).value;
    }
    const Eigen::Index k = locate_panel(p, eta);
    const PanelView pv = panel_at(p, k);
    const double I0 = cache.inner_cumulative(k);
    auto outer = [&](double s) {
        const double u = pv.u(s);
        return std::exp(-2.0 * (I0 + partial_inner(model, pv, s))) / (std::pow(s, nu) * model.L(u));
    };
    return cache.phi_cumulative(k) + quad::integrate(outer, pv.x0, eta, opts).value;
}

double phi_frozen(double L, double N, double nu, double lo, double hi) {
    if (!(L > 0.0) || !(N > 0.0)) throw DomainError("phi_frozen: L, N must be positive");
    if (!(lo > 0.0) || !(hi >= lo)) throw DomainError("phi_frozen: require 0 < lo <= hi");
    // int_lo^hi e^{-k(s^2 - lo^2)} s^{-nu} / L ds = e^{k lo^2} k^{(nu-1)/2} / (2L) [gamma(a, k hi^2) - gamma(a, k lo^2)]
    const double k = N / L;
    const double a = 0.5 * (1.0 - nu);
    const double x_lo = k * lo * lo;
    const double pref = std::pow(k, 0.5 * (nu - 1.0)) / (2.0 * L);
    if (std::isinf(hi)) return pref * std::exp(x_lo + special::log_upper_tail_gamma(a, x_lo));
    const double x_hi = k * hi * hi;
    // Difference of upper tails avoids cancellation when both arguments are large.
    const double diff = special::upper_tail_gamma(a, x_lo) - special::upper_tail_gamma(a, x_hi);
    return pref * std::exp(x_lo) * diff;
}

}  // namespace stefan
