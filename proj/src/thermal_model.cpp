#include "stefan/thermal_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stefan/errors.hpp"

namespace stefan {

CoefficientFn CoefficientFn::constant(double a) {
    CoefficientFn f;
    f.family = Family::Constant;
    f.a = a;
    return f;
}

CoefficientFn CoefficientFn::affine(double a, double b) {
    CoefficientFn f;
    f.family = Family::Affine;
    f.a = a;
    f.b = b;
    return f;
}

CoefficientFn CoefficientFn::power(double a, double p) {
    CoefficientFn f;
    f.family = Family::Power;
    f.a = a;
    f.p = p;
    return f;
}

CoefficientFn CoefficientFn::tabulated(std::vector<double> theta, std::vector<double> value) {
    if (theta.size() < 2 || theta.size() != value.size())
        throw DomainError("tabulated coefficient: need >= 2 (theta, value) pairs of equal length");
    for (std::size_t i = 1; i < theta.size(); ++i)
        if (!(theta[i] > theta[i - 1])) throw DomainError("tabulated coefficient: theta must be strictly increasing");
    CoefficientFn f;
    f.family = Family::Tabulated;
    f.theta = std::move(theta);
    f.value = std::move(value);
    return f;
}

double CoefficientFn::operator()(double t) const {
    switch (family) {
        case Family::Constant:
            return a;
        case Family::Affine:
            return a + b * t;
        case Family::Power:
            return a * std::pow(t, p);
        case Family::Tabulated: {
            if (t <= theta.front()) return value.front();
            if (t >= theta.back()) return value.back();
            const auto it = std::upper_bound(theta.begin(), theta.end(), t);
            const auto k = static_cast<std::size_t>(it - theta.begin()) - 1;
            const double w = (t - theta[k]) / (theta[k + 1] - theta[k]);
            return (1.0 - w) * value[k] + w * value[k + 1];
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::string CoefficientFn::family_name() const {
    switch (family) {
        case Family::Constant: return "constant";
        case Family::Affine: return "affine";
        case Family::Power: return "power";
        case Family::Tabulated: return "tabulated";
    }
    return "unknown";
}

namespace {

void require_positive_on(const CoefficientFn& f, const char* name, double lo, double hi) {
    constexpr int kChecks = 257;
    for (int i = 0; i < kChecks; ++i) {
        const double t = lo + (hi - lo) * i / (kChecks - 1);
        const double v = f(t);
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError(std::string("coefficient ") + name + " must be positive on [0, theta_b]; value " +
                              std::to_string(v) + " at theta=" + std::to_string(t));
    }
    if (f.family == CoefficientFn::Family::Tabulated)
        for (double v : f.value)
            if (!(v > 0.0)) throw DomainError(std::string("coefficient ") + name + " has a non-positive table entry");
}

}  // namespace

void validate(const ProblemSpec& s) {
    if (!(s.nu > 0.0 && s.nu < 1.0)) throw DomainError("nu must satisfy 0 < nu < 1 (got " + std::to_string(s.nu) + ")");
    if (!(s.theta_b > s.theta_m)) throw DomainError("theta_b must exceed theta_m");
    if (!(s.theta_m >= 0.0)) throw DomainError("theta_m must be non-negative (far field is theta = 0)");
    if (!(s.l_b > 0.0) || !(s.l_m > 0.0)) throw DomainError("latent heats l_b, l_m must be positive");
    if (!(s.gamma_b > 0.0) || !(s.gamma_m > 0.0)) throw DomainError("densities gamma_b, gamma_m must be positive");
    require_positive_on(s.lambda1, "lambda1", 0.0, s.theta_b);
    require_positive_on(s.c1, "c1", 0.0, s.theta_b);
    require_positive_on(s.rho1, "rho1", 0.0, s.theta_b);
    require_positive_on(s.lambda2, "lambda2", 0.0, s.theta_b);
    require_positive_on(s.c2, "c2", 0.0, s.theta_b);
    require_positive_on(s.rho2, "rho2", 0.0, s.theta_b);
}

DimensionlessModel dimensionless_model(const ProblemSpec& spec) {
    validate(spec);
    const double tm = spec.theta_m;
    const double dt = spec.theta_b - spec.theta_m;
    auto temp = [tm, dt](double u) { return tm + dt * u; };

    DimensionlessModel m;
    m.liquid.phase = Phase::Liquid;
    m.liquid.L = [f = spec.lambda1, temp](double u) { return f(temp(u)); };
    m.liquid.N = [c = spec.c1, r = spec.rho1, temp](double u) { return c(temp(u)) * r(temp(u)); };
    m.solid.phase = Phase::Solid;
    m.solid.L = [f = spec.lambda2, temp](double u) { return f(temp(u)); };
    m.solid.N = [c = spec.c2, r = spec.rho2, temp](double u) { return c(temp(u)) * r(temp(u)); };
    m.u_c = -tm / dt;
    return m;
}

std::vector<std::string> WindowVerdict::violations() const {
    std::vector<std::string> out;
    if (!mu_above_lower) out.emplace_back("(3-nu)/2 < mu");
    if (!mu_below_two) out.emplace_back("mu < 2");
    if (!delta_above_mu) out.emplace_back("mu < delta");
    if (!delta_below_upper) out.emplace_back("delta < 3mu+nu-3");
    if (!xi_positive) out.emplace_back("xi = 2+delta-mu > 0");
    if (!mu_nu_above_one) out.emplace_back("mu+nu > 1");
    return out;
}

WindowVerdict validate_window(double nu, double mu, double delta) {
    WindowVerdict v;
    v.mu_above_lower = (3.0 - nu) / 2.0 < mu;
    v.mu_below_two = mu < 2.0;
    v.delta_above_mu = mu < delta;
    v.delta_below_upper = delta < 3.0 * mu + nu - 3.0;
    v.xi_positive = 2.0 + delta - mu > 0.0;
    v.mu_nu_above_one = mu + nu > 1.0;
    return v;
}

double lipschitz_estimate(const std::function<double(double)>& f, double lo, double hi, int samples) {
    if (hi < lo) std::swap(lo, hi);
    if (hi == lo) return 0.0;
    double slope = 0.0;
    double prev = f(lo);
    const double h = (hi - lo) / (samples - 1);
    for (int i = 1; i < samples; ++i) {
        const double x = lo + h * i;
        const double v = f(x);
        slope = std::max(slope, std::abs(v - prev) / h);
        prev = v;
    }
    return slope;
}

namespace {

void check_positive(double v, const char* what, double eta) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw ModelDomainError(std::string("estimate_envelopes: non-positive ") + what + " at eta=" +
                               std::to_string(eta));
}

}  // namespace

LiquidEnvelope estimate_liquid_envelope(const CoefficientModel& model, const Profile& u1, int samples) {
    LiquidEnvelope e{};
    e.Lm = e.Nm = std::numeric_limits<double>::infinity();
    e.LM = e.NM = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double eta = u1.lo() + (u1.hi() - u1.lo()) * i / (samples - 1);
        const double u = eval(u1, eta);
        const double L = model.L(u), N = model.N(u);
        check_positive(L, "L1", eta);
        check_positive(N, "N1", eta);
        e.Lm = std::min(e.Lm, L);
        e.LM = std::max(e.LM, L);
        e.Nm = std::min(e.Nm, N);
        e.NM = std::max(e.NM, N);
    }
    e.Lt = lipschitz_estimate(model.L, 0.0, 1.0, samples);
    e.Nt = lipschitz_estimate(model.N, 0.0, 1.0, samples);
    return e;
}

SolidEnvelope estimate_solid_envelope(const CoefficientModel& model, const Profile& u2, double mu, double delta,
                                      int samples) {
    SolidEnvelope e{};
    e.Lm = e.Nm = std::numeric_limits<double>::infinity();
    e.LM = e.NM = 0.0;
    // Log-spaced sample: the prefactor ratios vary fastest just past beta0.
    for (int i = 0; i < samples; ++i) {
        const double tau = static_cast<double>(i) / (samples - 1);
        const double eta = u2.lo() * std::pow(u2.hi() / u2.lo(), tau);
        const double u = eval(u2, eta);
        const double L = model.L(u), N = model.N(u);
        check_positive(L, "L2", eta);
        check_positive(N, "N2", eta);
        const double lr = L / std::pow(eta, mu), nr = N / std::pow(eta, delta);
        e.Lm = std::min(e.Lm, lr);
        e.LM = std::max(e.LM, lr);
        e.Nm = std::min(e.Nm, nr);
        e.NM = std::max(e.NM, nr);
    }
    const double uc = u2.tail_value;
    e.Lt = lipschitz_estimate(model.L, uc, 0.0, samples);
    e.Nt = lipschitz_estimate(model.N, uc, 0.0, samples);
    return e;
}

EnvelopeParams estimate_envelopes(const CoefficientModel& liquid, const Profile& u1, const CoefficientModel& solid,
                                  const Profile& u2, double nu, double mu, double delta, int samples) {
    const auto l = estimate_liquid_envelope(liquid, u1, samples);
    const auto s = estimate_solid_envelope(solid, u2, mu, delta, samples);
    EnvelopeParams p;
    p.nu = nu;
    p.mu = mu;
    p.delta = delta;
    p.L1m = l.Lm, p.L1M = l.LM, p.N1m = l.Nm, p.N1M = l.NM, p.Lt1 = l.Lt, p.Nt1 = l.Nt;
    p.L2m = s.Lm, p.L2M = s.LM, p.N2m = s.Nm, p.N2M = s.NM, p.Lt2 = s.Lt, p.Nt2 = s.Nt;
    return p;
}

EnvelopeParams hull(const EnvelopeParams& a, const EnvelopeParams& b) {
    EnvelopeParams h = a;
    h.L1m = std::min(a.L1m, b.L1m), h.N1m = std::min(a.N1m, b.N1m);
    h.L2m = std::min(a.L2m, b.L2m), h.N2m = std::min(a.N2m, b.N2m);
    h.L1M = std::max(a.L1M, b.L1M), h.N1M = std::max(a.N1M, b.N1M);
    h.L2M = std::max(a.L2M, b.L2M), h.N2M = std::max(a.N2M, b.N2M);
    h.Lt1 = std::max(a.Lt1, b.Lt1), h.Nt1 = std::max(a.Nt1, b.Nt1);
    h.Lt2 = std::max(a.Lt2, b.Lt2), h.Nt2 = std::max(a.Nt2, b.Nt2);
    return h;
}

}  // namespace stefan
