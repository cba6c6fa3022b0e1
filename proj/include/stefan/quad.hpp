#pragma once

// Adaptive Gauss-Kronrod quadrature.
//
// integrate() is a globally adaptive G10/K21 scheme: the panel with the
// largest error estimate is split until the summed estimate meets the
// tolerance. Interior panels are bisected; the panel touching a is cut at 1/8
// of its width, which grades the mesh geometrically into an integrable power
// singularity at the left endpoint without a change of variables.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "stefan/errors.hpp"
#include "stefan/special_fn.hpp"

namespace stefan::quad {

struct QuadOptions {
    double abs_tol = 1e-11;
    double rel_tol = 1e-10;
    int max_depth = 60;
};

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;
};

/// |f(eta)| <= C exp(-c eta^p) for eta >= a.
struct TailBound {
    double C = 1.0;
    double c = 1.0;
    double p = 1.0;
};

struct TailQuadResult {
    double value = 0.0;
    double err_est = 0.0;
    double eta_max = 0.0;
};

inline void validate(const QuadOptions& opts) {
    if (!(opts.abs_tol > 0.0) || !(opts.rel_tol > 0.0)) throw DomainError("QuadOptions: tolerances must be positive");
    if (opts.max_depth < 10) throw DomainError("QuadOptions: max_depth must be >= 10");
}

namespace detail {

inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980248524, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod abscissae (kXgk[1], kXgk[3], ...).
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

/// One G10/K21 panel with the QUADPACK error heuristic.
template <class F>
QuadResult gk21(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resk = fc * kWgk[10];
    double resg = 0.0;
    double resabs = std::abs(resk);
    double fv1[10], fv2[10];
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

    const double result = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(err, 50.0 * eps * resabs);
    return {result, err};
}

struct Panel {
    double a, b, value, err;
    int depth;
    bool operator<(const Panel& o) const { return err < o.err; }
};

}  // namespace detail

/// Integrates f over [a,b]; throws QuadratureError when max_depth is exhausted.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opts = {}) {
    validate(opts);
    if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("integrate: require finite a <= b");
    if (a == b) return {0.0, 0.0};

    auto first = detail::gk21(f, a, b);
    auto tol = [&](double v) { return std::max(opts.abs_tol, opts.rel_tol * std::abs(v)); };
    if (first.err_est <= tol(first.value)) return first;

    std::priority_queue<detail::Panel> open;
    open.push({a, b, first.value, first.err_est, 0});
    double total = first.value;
    double total_err = first.err_est;
    double frozen_value = 0.0, frozen_err = 0.0;  // panels at max_depth

    constexpr int kMaxPanels = 200000;
    constexpr double kGrade = 0.125;
    int panels = 1;
    while (!open.empty() && total_err > tol(total)) {
        const detail::Panel p = open.top();
        open.pop();
        if (p.depth >= opts.max_depth || panels >= kMaxPanels) {
            frozen_value += p.value;
            frozen_err += p.err;
            continue;
        }
        // Graded split for the panel touching a: an endpoint power singularity shrinks
        // its error by a fixed factor per level instead of by sqrt(2).
        const double mid = p.a == a ? p.a + kGrade * (p.b - p.a) : 0.5 * (p.a + p.b);
        const auto left = detail::gk21(f, p.a, mid);
        const auto right = detail::gk21(f, mid, p.b);
        total += left.value + right.value - p.value;
        total_err += left.err_est + right.err_est - p.err;
        open.push({p.a, mid, left.value, left.err_est, p.depth + 1});
        open.push({mid, p.b, right.value, right.err_est, p.depth + 1});
        panels += 2;
    }
    if (total_err > tol(total) && frozen_err > 0.0)
        throw QuadratureError("integrate: tolerance not met at max_depth", total, total_err);
    return {total, total_err};
}

/// int_a^inf f, truncated where the supplied decay bound certifies the tail below abs_tol/2.
template <class F>
TailQuadResult integrate_to_infinity(F&& f, double a, const TailBound& decay, const QuadOptions& opts = {}) {
    validate(opts);
    if (!(decay.c > 0.0) || !(decay.p > 0.0) || !(decay.C >= 0.0) || !std::isfinite(decay.C))
        throw DomainError("integrate_to_infinity: decay constants must satisfy C >= 0, c > 0, p > 0");
    if (1.0 / decay.p < special::kMinShape) throw DomainError("integrate_to_infinity: decay exponent p > 20 unsupported");
    if (!std::isfinite(a)) throw DomainError("integrate_to_infinity: lower limit must be finite");

    // Tail of the bound: int_X^inf C e^{-c s^p} ds = C / (p c^{1/p}) * Gamma(1/p, c X^p), X >= 0.
    const double shape = 1.0 / decay.p;
    auto bound_tail = [&](double x) {
        if (decay.C == 0.0) return 0.0;
        const double arg = decay.c * std::pow(std::max(x, 0.0), decay.p);
        const double log_tail = std::log(decay.C) - std::log(decay.p) - shape * std::log(decay.c) +
                                special::log_upper_tail_gamma(shape, arg);
        return std::exp(log_tail);
    };

    const double target = 0.5 * opts.abs_tol;
    double hi = std::max(a, 0.0) + 1.0;
    while (bound_tail(hi) >= target) hi = std::max(a, 0.0) + 2.0 * (hi - std::max(a, 0.0));
    double lo = std::max(a, 0.0);
    if (bound_tail(lo) < target) {
        hi = lo;
    } else {
        for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (bound_tail(mid) < target ? hi : lo) = mid;
        }
    }
    const double eta_max = std::max(hi, a);
    const auto body = integrate(f, a, eta_max, opts);
    return {body.value, body.err_est + bound_tail(eta_max), eta_max};
}

}  // namespace stefan::quad
