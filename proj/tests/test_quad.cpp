#include <doctest.h>

#include <cmath>

#include "stefan/quad.hpp"

using namespace stefan::quad;

TEST_CASE("single G10/K21 panel integrates polynomials of degree <= 31 exactly") {
    for (int deg = 0; deg <= 31; ++deg) {
        auto f = [deg](double x) { return (deg + 1) * std::pow(x, deg); };
        const auto r = detail::gk21(f, 0.0, 1.0);
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("Gaussian on [0, 3]") {
    const auto r = integrate([](double s) { return std::exp(-s * s); }, 0.0, 3.0);
    CHECK(r.value == doctest::Approx(0.8862073482595212).epsilon(1e-12));
    CHECK(r.err_est < 1e-10);
}

TEST_CASE("integrable endpoint singularity is refined") {
    const auto r = integrate([](double s) { return 1.0 / std::sqrt(s); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("semi-infinite integral with a stretched-exponential tail bound") {
    auto f = [](double s) { return std::pow(s, -1.6) * std::exp(-std::pow(s, 1.3)); };
    const auto r = integrate_to_infinity(f, 1.0, TailBound{1.0, 1.0, 1.3});
    CHECK(r.value == doctest::Approx(0.1391111987488091).epsilon(1e-10));
    CHECK(r.eta_max > 1.0);
}

TEST_CASE("refinement cap") {
    QuadOptions o;
    o.max_depth = 12;
    CHECK_THROWS_AS(integrate([](double s) { return 1.0 / s; }, 0.0, 1.0, o), stefan::QuadratureError);
    try {
        integrate([](double s) { return 1.0 / s; }, 0.0, 1.0, o);
    } catch (const stefan::QuadratureError& e) {
        CHECK(e.best_estimate > 0.0);
    }
}

TEST_CASE("argument checks") {
    auto one = [](double) { return 1.0; };
    CHECK(integrate(one, 2.0, 2.0).value == 0.0);
    CHECK_THROWS_AS(integrate(one, 1.0, 0.0), stefan::DomainError);
    CHECK_THROWS_AS(integrate_to_infinity(one, 0.0, TailBound{1.0, 0.0, 1.0}), stefan::DomainError);
    CHECK_THROWS_AS(integrate_to_infinity(one, 0.0, TailBound{1.0, 1.0, 40.0}), stefan::DomainError);
    QuadOptions bad;
    bad.abs_tol = 0.0;
    CHECK_THROWS_AS(integrate(one, 0.0, 1.0, bad), stefan::DomainError);
}

TEST_CASE("stronger endpoint singularity and additivity") {
    auto f = [](double s) { return std::pow(s, -0.75); };
    CHECK(integrate(f, 0.0, 1.0).value == doctest::Approx(4.0).epsilon(1e-9));
    auto g = [](double s) { return std::exp(-s) * std::sin(3.0 * s); };
    const double whole = integrate(g, 0.0, 4.0).value;
    const double parts = integrate(g, 0.0, 1.5).value + integrate(g, 1.5, 4.0).value;
    CHECK(std::abs(whole - parts) < 3e-10);
    CHECK(integrate([](double s) { return s; }, 0.0, 1.0).value == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("tail truncation examples and soundness") {
    const auto gauss = integrate_to_infinity([](double s) { return std::exp(-s * s); }, 0.0, TailBound{1.0, 1.0, 2.0});
    CHECK(gauss.value == doctest::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-11));
    const auto expo = integrate_to_infinity([](double s) { return std::exp(-s); }, 1.0, TailBound{1.0, 1.0, 1.0});
    CHECK(expo.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-11));
    // doubling eta_max changes the value by less than abs_tol
    const auto longer = integrate([](double s) { return std::exp(-s); }, 1.0, 2.0 * expo.eta_max);
    CHECK(std::abs(longer.value - expo.value) < QuadOptions{}.abs_tol);
    // brute force to 60 at a tighter tolerance
    QuadOptions tight;
    tight.abs_tol = 1e-12;
    tight.rel_tol = 1e-11;
    auto f = [](double s) { return std::pow(s, -1.6) * std::exp(-std::pow(s, 1.3)); };
    const auto brute = integrate(f, 1.0, 60.0, tight);
    CHECK(integrate_to_infinity(f, 1.0, TailBound{1.0, 1.0, 1.3}).value == doctest::Approx(brute.value).epsilon(1e-10));
}
