#include <doctest.h>

#include <cmath>

#include "stefan/errors.hpp"
#include "stefan/solver.hpp"
#include "support.hpp"

using namespace stefan;

TEST_CASE("V reproduces the closed form at unit coefficients and is input independent") {
    const Problem pb(testing::manufactured());
    Profile u = make_liquid_grid(0.4, 1.0, 129);
    for (Eigen::Index i = 1; i + 1 < u.size(); ++i) u.values(i) = 0.5 + 0.3 * std::sin(7.0 * u.nodes(i));
    const Profile v = apply_V(pb.model.liquid, 0.5, u);
    CHECK(v.values(0) == 1.0);
    CHECK(v.values(v.size() - 1) == 0.0);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        worst = std::max(worst, std::abs(v.values(i) - testing::liquid_closed_form(0.5, 1.0, 0.4, 1.0, v.nodes(i))));
    CHECK(worst < 1e-10);
    for (Eigen::Index i = 0; i + 1 < v.size(); ++i) CHECK(v.values(i + 1) < v.values(i));
}

TEST_CASE("W at unit coefficients, and u_c = 0") {
    const Problem pb(testing::manufactured());
    const double eta_max = solid_eta_max(pb.model.solid, -0.1, 1.0);
    const Profile u = make_solid_grid(1.0, -0.1, 129, eta_max);
    const Profile w = apply_W(pb.model.solid, 0.5, -0.1, u);
    CHECK(w.values(0) == 0.0);
    CHECK(w.tail_value == -0.1);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        worst = std::max(worst, std::abs(w.values(i) - testing::solid_closed_form(0.5, 1.0, -0.1, 1.0, w.nodes(i))));
    CHECK(worst < 1e-10);
    for (Eigen::Index i = 0; i + 1 < w.size(); ++i) CHECK(w.values(i + 1) <= w.values(i));
    const Profile z = apply_W(pb.model.solid, 0.5, 0.0, u);
    CHECK(z.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fixed point iteration counts") {
    const Problem pb(testing::manufactured());
    SolveOptions o;
    o.grid_n = 129;
    const Operator V = [&](const Profile& u) { return apply_V(pb.model.liquid, 0.5, u, o.quad); };
    const auto r = fixed_point(V, make_liquid_grid(0.4, 1.0, 129), o);
    CHECK(r.iters <= 2);
    const auto again = fixed_point(V, r.u, o);
    CHECK(again.iters == 1);
    CHECK(sup_distance(again.u, r.u) < 2 * o.fp_tol);
}

TEST_CASE("affine coefficients: ratios stay below one") {
    const Problem pb(testing::manufactured(0.01));
    SolveOptions o;
    o.grid_n = 129;
    const Operator V = [&](const Profile& u) { return apply_V(pb.model.liquid, 0.5, u, o.quad); };
    const auto r = fixed_point(V, make_liquid_grid(0.4, 1.0, 129), o);
    CHECK(r.iters > 2);
    for (double q : r.ratios) CHECK(q < 1.0);
}

TEST_CASE("non-convergence carries the last iterate") {
    const Problem pb(testing::manufactured(0.01));
    SolveOptions o;
    o.grid_n = 65;
    o.fp_max_iters = 2;
    o.fp_tol = 1e-15;
    const Operator V = [&](const Profile& u) { return apply_V(pb.model.liquid, 0.5, u, o.quad); };
    try {
        fixed_point(V, make_liquid_grid(0.4, 1.0, 65), o);
        FAIL("expected NonConvergenceError");
    } catch (const NonConvergenceError& e) {
        CHECK(e.last_iterate.size() == 65);
    }
}

TEST_CASE("damping halves on growing steps and stops at the floor") {
    SolveOptions o;
    o.fp_max_iters = 40;
    // op doubles the distance to 0 on every call
    const Operator grow = [](const Profile& u) {
        Profile v = u;
        v.values *= -2.0;
        return v;
    };
    const Profile p = make_liquid_grid(1.0, 2.0, 5);
    // with damping w the map is u -> (1 - 3w) u, a contraction once w <= 1/2
    const auto r = fixed_point(grow, p, o);
    CHECK(r.damping <= 0.5);
    CHECK(r.damping >= kDampingFloor);
}

TEST_CASE("printed alpha0* simplifies when u_c = 0") {
    const StefanConstants k{2.0, 1.0};
    CHECK(alpha_star_printed(k, 0.5, 0.0, 1.3, 0.7) == doctest::Approx(std::pow(0.5, 1.0 / 1.5) * 1.3));
    CHECK(alpha_star_printed({1.0, 1.0}, 0.5, 0.0, 1.3, 0.7) == doctest::Approx(1.3));
    CHECK_THROWS_AS(alpha_star_printed({1.0, 0.0}, 0.5, 0.0, 1.3, 0.7), NoRootError);
}

TEST_CASE("beta residual vanishes at the manufactured root and changes sign across it") {
    const Problem pb(testing::manufactured());
    SolveOptions o;
    const auto st = beta_residual(pb, 1.0, o);
    CHECK(std::abs(st.residual) < 1e-7);
    CHECK(st.alpha0 == doctest::Approx(0.4).epsilon(1e-9));
    const double lo = beta_residual(pb, 0.95, o, &st).residual;
    const double hi = beta_residual(pb, 1.05, o, &st).residual;
    CHECK(lo * hi < 0.0);

    ProblemSpec printed = testing::manufactured();
    printed.l_m = testing::kLmPrinted;
    SolveOptions op;
    op.balance = Balance::AsPrinted;
    const auto sp = beta_residual(Problem(printed), 1.0, op);
    CHECK(std::abs(sp.residual) < 1e-7);
    CHECK(sp.alpha0 == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("no admissible alpha0* when u_c = 0 and l_m gamma_m >= l_b gamma_b") {
    ProblemSpec s = testing::manufactured();
    s.theta_m = 0.0;
    s.l_m = s.l_b;
    SolveOptions o;
    o.grid_n = 65;
    o.bracket_grid = 8;
    try {
        solve(s, o);
        FAIL("expected SolveFailure");
    } catch (const SolveFailure& f) {
        CHECK(f.verdict == Verdict::NoRoot);
        CHECK(f.scan.size() == 8);
    }
}

TEST_CASE("affine perturbation moves the root continuously") {
    SolveOptions o;
    o.grid_n = 129;
    o.bracket_grid = 24;
    o.beta_lo = 0.1;
    o.beta_hi = 10.0;
    const auto base = solve(testing::manufactured(), o);
    CHECK(base.beta0 == doctest::Approx(1.0).epsilon(1e-6));
    // frozen-coefficient Phi coincides with the full functional at constant coefficients
    CHECK(base.diagnostics.phi1_frozen == doctest::Approx(base.diagnostics.phi1_total).epsilon(1e-9));
    CHECK(base.diagnostics.phi2_frozen == doctest::Approx(base.diagnostics.phi2_total).epsilon(1e-9));
    for (double slope : {0.01 / 11.0, -0.01 / 11.0}) {  // +-1% across the temperature range
        const auto s = solve(testing::manufactured(slope), o);
        CHECK(std::abs(s.beta0 / base.beta0 - 1.0) < 0.05);
        CHECK(std::abs(s.alpha0 / base.alpha0 - 1.0) < 0.05);
        CHECK(s.alpha0 < s.beta0);
    }
}

TEST_CASE("options validation") {
    SolveOptions o;
    o.damping = 1.5;
    CHECK_THROWS_AS(o.validate(), DomainError);
    o = {};
    o.beta_lo = 2.0;
    o.beta_hi = 1.0;
    CHECK_THROWS_AS(o.validate(), DomainError);
}
