#include "stefan/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "stefan/errors.hpp"
#include "stefan/field.hpp"

namespace stefan {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTailDecades = 29.93;  // e^{-29.93} ~ 1e-13

void check_phi(double phi, const char* who) {
    if (!(phi > std::numeric_limits<double>::min()) || !std::isfinite(phi))
        throw DomainError(std::string(who) + ": Phi total underflowed");
}

// Values of `from` copied onto the node positions of `to` by index; endpoints kept from `to`.
Profile carry_values(const Profile& from, Profile to) {
    if (from.size() != to.size()) return to;
    const Eigen::Index n = to.size();
    const double first = to.values(0), last = to.values(n - 1);
    to.values = from.values;
    to.values(0) = first;
    if (to.kind == Phase::Liquid) to.values(n - 1) = last;
    return to;
}

template <class F>
double bracket_root(F&& f, double a, double b, double fa, double fb, double rel_tol) {
    boost::uintmax_t max_iter = 200;
    auto tol = [rel_tol](double x, double y) { return std::abs(y - x) <= rel_tol * std::min(std::abs(x), std::abs(y)); };
    const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, max_iter);
    return 0.5 * (r.first + r.second);
}

}  // namespace

void SolveOptions::validate() const {
    if (!(fp_tol > 0.0)) throw DomainError("solver.fp_tol must be positive");
    if (fp_max_iters < 1) throw DomainError("solver.fp_max_iters must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("solver.damping must lie in (0, 1]");
    if (!(root_tol > 0.0)) throw DomainError("solver.root_tol must be positive");
    if (bracket_grid < 2) throw DomainError("solver.bracket_grid must be >= 2");
    if (!(beta_lo > 0.0) || !(beta_hi > beta_lo)) throw DomainError("solver.beta range must satisfy 0 < lo < hi");
    if (grid_n < 2) throw DomainError("solver.grid_n must be >= 2");
    quad::validate(quad);
}

Profile apply_V(const CoefficientModel& liquid, double nu, const Profile& u1, const quad::QuadOptions& opts) {
    const KernelCache c = build_cache(liquid, u1, nu, opts);
    check_phi(c.phi_total, "apply_V");
    Profile out = u1;
    out.values = 1.0 - c.phi_cumulative.array() / c.phi_total;
    out.values(0) = 1.0;
    out.values(out.size() - 1) = 0.0;
    return out;
}

Profile apply_W(const CoefficientModel& solid, double nu, double u_c, const Profile& u2, const quad::QuadOptions& opts) {
    Profile out = u2;
    out.tail_value = u_c;
    if (u_c == 0.0) {
        out.values.setZero();
        return out;
    }
    const KernelCache c = build_cache(solid, u2, nu, opts);
    check_phi(c.phi_total, "apply_W");
    out.values = u_c * c.phi_cumulative.array() / c.phi_total;
    out.values(0) = 0.0;
    return out;
}

FixedPointResult fixed_point(const Operator& op, const Profile& init, const SolveOptions& opts) {
    FixedPointResult r;
    r.damping = opts.damping;
    Profile u = init;
    double prev_step = 0.0;
    int above_one = 0;
    for (int k = 1; k <= opts.fp_max_iters; ++k) {
        Profile next = op(u);
        if (r.damping < 1.0) next = blend(u, next, r.damping);
        const double step = sup_distance(next, u);
        if (k > 1 && prev_step > 0.0) {
            const double ratio = step / prev_step;
            r.ratios.push_back(ratio);
            above_one = ratio > 1.0 ? above_one + 1 : 0;
            if (above_one >= 3 && r.damping > kDampingFloor) {
                r.damping = std::max(0.5 * r.damping, kDampingFloor);
                above_one = 0;
            }
        }
        u = std::move(next);
        prev_step = step;
        if (step < opts.fp_tol) {
            r.u = std::move(u);
            r.iters = k;
            return r;
        }
    }
    throw NonConvergenceError("fixed point did not reach fp_tol within fp_max_iters", std::move(u),
                              std::move(r.ratios));
}

StefanConstants stefan_constants(const ProblemSpec& spec) {
    const double d = spec.theta_b - spec.theta_m;
    return {2.0 * spec.l_b * spec.gamma_b / d, 2.0 * spec.l_m * spec.gamma_m / d};
}

double alpha_star_printed(const StefanConstants& k, double nu, double u_c, double beta0, double phi2_total) {
    const double radicand = (k.B_star * std::pow(beta0, nu + 1.0) - u_c / phi2_total) / k.A_star;
    if (!(radicand > 0.0)) throw NoRootError("alpha0*: non-positive radicand");
    return std::pow(radicand, 1.0 / (nu + 1.0));
}

double solid_eta_max(const CoefficientModel& solid, double u_c, double beta0) {
    double n_min = std::numeric_limits<double>::infinity(), l_max = 0.0;
    constexpr int kSamples = 257;
    for (int i = 0; i < kSamples; ++i) {
        const double u = u_c * i / (kSamples - 1);
        n_min = std::min(n_min, solid.N(u));
        l_max = std::max(l_max, solid.L(u));
    }
    if (!(n_min > 0.0) || !(l_max > 0.0)) throw ModelDomainError("solid coefficients must be positive on [u_c, 0]");
    return std::sqrt(beta0 * beta0 + kTailDecades / (n_min / l_max));
}

Problem::Problem(const ProblemSpec& s) : spec(s), model(dimensionless_model(s)), k(stefan_constants(s)) {}

namespace {

FixedPointResult liquid_fixed_point(const Problem& pb, double alpha0, double beta0, const SolveOptions& opts,
                                    const Profile* warm) {
    Profile init = make_liquid_grid(alpha0, beta0, opts.grid_n);
    if (warm) init = carry_values(*warm, std::move(init));
    const double nu = pb.spec.nu;
    return fixed_point([&](const Profile& u) { return apply_V(pb.model.liquid, nu, u, opts.quad); }, init, opts);
}

}  // namespace

BetaState beta_residual(const Problem& pb, double beta0, const SolveOptions& opts, const BetaState* warm) {
    if (!(beta0 > 0.0)) throw DomainError("beta_residual: beta0 must be positive");
    const double nu = pb.spec.nu;
    const double u_c = pb.model.u_c;
    BetaState st;
    st.beta0 = beta0;

    Profile init2 = make_solid_grid(beta0, u_c, opts.grid_n, solid_eta_max(pb.model.solid, u_c, beta0));
    if (warm && warm->u2.size() > 0) init2 = carry_values(warm->u2, std::move(init2));
    st.fp_solid = fixed_point([&](const Profile& u) { return apply_W(pb.model.solid, nu, u_c, u, opts.quad); },
                              init2, opts);
    st.u2 = st.fp_solid.u;
    st.phi2_total = build_cache(pb.model.solid, st.u2, nu, opts.quad).phi_total;

    const double rhs = pb.k.B_star * std::pow(beta0, nu + 1.0) - u_c / st.phi2_total;
    const Profile* warm1 = (warm && warm->u1.size() > 0) ? &warm->u1 : nullptr;

    if (opts.balance == Balance::AsPrinted) {
        st.alpha0 = alpha_star_printed(pb.k, nu, u_c, beta0, st.phi2_total);
    } else {
        // h(alpha) = A* alpha^{nu+1} E1(beta0; alpha) - rhs increases from -rhs to A* beta0^{nu+1} - rhs.
        const double h_hi = pb.k.A_star * std::pow(beta0, nu + 1.0) - rhs;
        if (!(rhs > 0.0)) throw NoRootError("alpha0*: flux balance has no positive root (right side <= 0)");
        if (!(h_hi > 0.0)) throw NoRootError("alpha0*: balance root lies at or beyond beta0");
        Profile last = warm1 ? *warm1 : Profile{};
        auto h = [&](double alpha) {
            const auto fp = liquid_fixed_point(pb, alpha, beta0, opts, last.size() ? &last : nullptr);
            last = fp.u;
            const double E1 = std::exp(-2.0 * build_cache(pb.model.liquid, fp.u, nu, opts.quad).inner_cumulative(
                                                  fp.u.size() - 1));
            return pb.k.A_star * std::pow(alpha, nu + 1.0) * E1 - rhs;
        };
        st.alpha0 = bracket_root(h, 0.0, beta0, -rhs, h_hi, 1e-14);
        warm1 = nullptr;
        st.u1 = last;
        if (st.u1.size() > 0) warm1 = &st.u1;
    }
    if (!(st.alpha0 < beta0) || beta0 - st.alpha0 < 1e-12 * beta0)
        throw NoRootError("alpha0* >= beta0: no admissible liquid layer");

    st.fp_liquid = liquid_fixed_point(pb, st.alpha0, beta0, opts, warm1);
    st.u1 = st.fp_liquid.u;
    const KernelCache c1 = build_cache(pb.model.liquid, st.u1, nu, opts.quad);
    st.phi1_total = c1.phi_total;
    st.E1_beta = std::exp(-2.0 * c1.inner_cumulative(st.u1.size() - 1));
    st.residual = 1.0 / st.phi1_total - pb.k.A_star * std::pow(st.alpha0, nu + 1.0);
    return st;
}

std::pair<double, double> window_midpoint(double nu) {
    const double mu = 0.5 * (0.5 * (3.0 - nu) + 2.0);
    const double delta = 0.5 * (mu + 3.0 * mu + nu - 3.0);
    return {mu, delta};
}

EnvelopeParams resolve_envelopes(const Problem& pb, const Profile& u1, const Profile& u2, const EnvelopeChoice& env) {
    if (!env.automatic) {
        EnvelopeParams p = env.params;
        p.nu = pb.spec.nu;
        return p;
    }
    const auto mid = window_midpoint(pb.spec.nu);
    return estimate_envelopes(pb.model.liquid, u1, pb.model.solid, u2, pb.spec.nu, env.mu.value_or(mid.first),
                              env.delta.value_or(mid.second));
}

namespace {

ScanPoint scan_point(const Problem& pb, const BetaState& st, const EnvelopeChoice& envc) {
    ScanPoint sp{st.beta0, st.residual, st.alpha0, kNaN, kNaN, ""};
    try {
        const auto env = resolve_envelopes(pb, st.u1, st.u2, envc);
        const auto j = J_functions(env, pb.k, pb.model.u_c, st.beta0, st.alpha0);
        sp.J1 = j.J1;
        sp.J2 = j.J2;
        if (!j.radicand_ok) sp.note = "J1 radicand non-positive";
    } catch (const DomainError& e) {
        sp.note = e.what();
    }
    return sp;
}

double max_or_zero(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

}  // namespace

Solution solve(const ProblemSpec& spec, const SolveOptions& opts, const EnvelopeChoice& envc) {
    validate(spec);
    opts.validate();
    const Problem pb(spec);
    const int m = opts.bracket_grid;

    std::vector<ScanPoint> scan;
    std::vector<BetaState> states;
    int nonconv = 0;
    std::optional<std::size_t> warm;  // index of the most recent successful state
    for (int i = 0; i < m; ++i) {
        const double b = opts.beta_lo * std::pow(opts.beta_hi / opts.beta_lo, static_cast<double>(i) / (m - 1));
        try {
            states.push_back(beta_residual(pb, b, opts, warm ? &states[*warm] : nullptr));
            warm = states.size() - 1;
            scan.push_back(scan_point(pb, states.back(), envc));
        } catch (const NoRootError& e) {
            states.emplace_back();
            scan.push_back({b, kNaN, kNaN, kNaN, kNaN, e.what()});
        } catch (const NonConvergenceError& e) {
            ++nonconv;
            states.emplace_back();
            scan.push_back({b, kNaN, kNaN, kNaN, kNaN, e.what()});
        }
    }

    std::vector<std::pair<int, int>> brackets;
    for (int i = 0; i + 1 < m; ++i) {
        const double a = scan[i].residual, b = scan[i + 1].residual;
        if (std::isfinite(a) && std::isfinite(b) && (a == 0.0 || a * b < 0.0)) brackets.emplace_back(i, i + 1);
    }
    if (brackets.empty()) {
        const bool any_finite = std::any_of(scan.begin(), scan.end(), [](const ScanPoint& s) { return std::isfinite(s.residual); });
        if (nonconv > 0 && !any_finite)
            throw SolveFailure("no beta0 evaluation converged", Verdict::NonConvergence, std::move(scan));
        throw SolveFailure("beta_residual has no sign change on the scan range", Verdict::NoRoot, std::move(scan));
    }

    const auto [i0, i1] = brackets.front();
    BetaState best = states[i0];
    double beta_star = scan[i0].beta0;
    if (scan[i0].residual != 0.0) {
        BetaState cur = states[i0];
        auto f = [&](double b) {
            cur = beta_residual(pb, b, opts, &cur);
            return cur.residual;
        };
        try {
            beta_star = bracket_root(f, scan[i0].beta0, scan[i1].beta0, scan[i0].residual, scan[i1].residual,
                                     opts.root_tol);
            best = beta_residual(pb, beta_star, opts, &cur);
        } catch (const NonConvergenceError& e) {
            throw SolveFailure(std::string("inner fixed point failed during bisection: ") + e.what(),
                               Verdict::NonConvergence, std::move(scan));
        } catch (const NoRootError& e) {
            throw SolveFailure(std::string("alpha0* undefined inside the bracket: ") + e.what(), Verdict::NoRoot,
                               std::move(scan));
        }
    }

    Solution sol;
    sol.alpha0 = best.alpha0;
    sol.beta0 = best.beta0;
    sol.nu = spec.nu;
    sol.u1 = best.u1;
    sol.u2 = best.u2;

    auto& d = sol.diagnostics;
    d.scan = std::move(scan);
    for (std::size_t k = 1; k < brackets.size(); ++k)
        d.other_brackets.emplace_back(d.scan[brackets[k].first].beta0, d.scan[brackets[k].second].beta0);
    d.iters_liquid = best.fp_liquid.iters;
    d.iters_solid = best.fp_solid.iters;
    d.ratios_liquid = best.fp_liquid.ratios;
    d.ratios_solid = best.fp_solid.ratios;
    d.damping_liquid = best.fp_liquid.damping;
    d.damping_solid = best.fp_solid.damping;
    d.u_c = pb.model.u_c;
    d.constants = pb.k;
    d.eta_max = sol.u2.hi();
    d.phi1_total = best.phi1_total;
    d.phi2_total = best.phi2_total;
    const auto& liq = pb.model.liquid;
    const auto& sld = pb.model.solid;
    const double uc = pb.model.u_c;
    d.phi1_frozen = phi_frozen(liq.L(0.0), liq.N(0.0), spec.nu, sol.alpha0, sol.beta0);
    d.phi2_frozen = phi_frozen(sld.L(uc), sld.N(uc), spec.nu, sol.beta0, std::numeric_limits<double>::infinity());
    d.envelopes = resolve_envelopes(pb, sol.u1, sol.u2, envc);

    sol.certificate = evaluate_certificates(d.envelopes, pb.model.u_c, sol.alpha0, sol.beta0, opts.beta_lo, opts.beta_hi);
    sol.certificate.empirical_ratio_liquid = max_or_zero(d.ratios_liquid);
    sol.certificate.empirical_ratio_solid = max_or_zero(d.ratios_solid);
    d.certification = sol.certificate.contraction_ok ? "certified" : "uncertified convergence";

    sol.residuals = compute_residuals(pb, sol, opts);
    sol.residuals.beta_residual = best.residual;
    return sol;
}

}  // namespace stefan
