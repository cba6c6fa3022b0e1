#include <doctest.h>

#include <cmath>
#include <limits>

#include "stefan/certificates.hpp"
#include "stefan/errors.hpp"

using namespace stefan;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRel = 1e-11;

// Values from tests/oracles/certificates_oracle.py.
EnvelopeParams generic() {
    EnvelopeParams e;
    e.nu = 0.5;
    e.L1m = 0.9, e.L1M = 1.2, e.N1m = 0.8, e.N1M = 1.1;
    e.L2m = 0.7, e.L2M = 1.3, e.N2m = 0.6, e.N2M = 1.4;
    e.mu = 1.6, e.delta = 1.9;
    e.Lt1 = 0.05, e.Lt2 = 0.04, e.Nt1 = 0.03, e.Nt2 = 0.02;
    return e;
}

EnvelopeParams constant_unit() {
    EnvelopeParams e;
    e.nu = 0.5;
    e.mu = 1.6, e.delta = 1.9;
    return e;
}

}  // namespace

TEST_CASE("Phi sandwiches against the oracle") {
    const auto e = generic();
    const auto b1 = phi1_bounds(e, 0.4, 0.9);
    CHECK(b1.lower == doctest::Approx(0.3923855138762425).epsilon(kRel));
    CHECK(b1.upper == doctest::Approx(0.59462152312672992).epsilon(kRel));
    const auto b2 = phi2_bounds(e, 1.0, 2.0);
    CHECK(b2.lower == doctest::Approx(0.074248384046017097).epsilon(kRel));
    CHECK(b2.upper == doctest::Approx(0.69283571978129389).epsilon(kRel));
    CHECK(M_function(e, 1.0) == doctest::Approx(0.074284446251008309).epsilon(kRel));
}

TEST_CASE("E sandwiches") {
    const auto e = generic();
    const auto b = e1_bounds(e, 0.4, 0.4);
    CHECK(b.lower == 1.0);
    CHECK(b.upper == 1.0);
    const auto s = e2_bounds(e, 1.0, 1.5);
    CHECK(s.lower < s.upper);
    CHECK(s.upper < 1.0);
}

TEST_CASE("Lipschitz multipliers against the oracle") {
    const auto e = generic();
    CHECK(phi1_tilde(e, 0.4, 1.0) == doctest::Approx(0.16125102880658436).epsilon(kRel));
    CHECK(phi2_tilde(e, 1.0, 2.0) == doctest::Approx(0.10884109403381812).epsilon(kRel));
    CHECK(phi2_tilde(e, 1.0, kInf) == doctest::Approx(1.0601643254704479).epsilon(kRel));
    CHECK(lipschitz_rhs_E(e, Phase::Liquid, 0.4, 0.9) == doctest::Approx(0.065802469135802469).epsilon(kRel));
    CHECK(lipschitz_rhs_E(e, Phase::Solid, 1.0, 2.0) == doctest::Approx(0.24956391956754687).epsilon(kRel));
    CHECK(lipschitz_rhs_E(e, Phase::Liquid, 0.4, 0.4) == 0.0);
    CHECK(lipschitz_rhs_Phi(e, Phase::Solid, 1.0, 2.0) == phi2_tilde(e, 1.0, 2.0));
}

TEST_CASE("certificates against the oracle") {
    const auto e = generic();
    CHECK(epsilon_certificate(e, 0.4, 1.0) == doctest::Approx(0.67932915044478256).epsilon(kRel));
    CHECK(A_coefficient(e, 0.4, 1.0) == doctest::Approx(5.4852018082663166).epsilon(kRel));
    CHECK(epsilon_proof_chain(e, 0.4, 1.0) == doctest::Approx(0.58746500870304378).epsilon(kRel));
    CHECK(B_coefficient(e, -0.1, 1.0) == doctest::Approx(7.0783086340424532).epsilon(kRel));
    CHECK(sigma_certificate(e, -0.1, 1.0) == doctest::Approx(9.7456757123133312).epsilon(kRel));
    CHECK(sigma_certificate(e, -0.1, 3.0) == doctest::Approx(23.491827356985956).epsilon(1e-10));
    CHECK(epsilon_certificate(e, 1.0, 1.0) == kInf);
}

TEST_CASE("constant coefficients certify trivially") {
    const auto e = constant_unit();
    CHECK(phi1_tilde(e, 0.4, 1.0) == 0.0);
    CHECK(phi2_tilde(e, 1.0, kInf) == 0.0);
    CHECK(epsilon_certificate(e, 0.4, 1.0) == 0.0);
    CHECK(sigma_certificate(e, -0.5, 1.0) == 0.0);
    CHECK(lipschitz_rhs_E(e, Phase::Solid, 1.0, 3.0) == 0.0);
    CHECK(B_coefficient(e, 0.0, 1.0) == 0.0);
}

TEST_CASE("J functions") {
    const auto e = generic();
    const auto j = J_functions(e, {7.2671641402648614, 0.49490531419199871}, -0.1, 1.0, 0.4);
    CHECK(j.J1 == doctest::Approx(0.0034547102579096366).epsilon(1e-9));
    CHECK(j.J2 == doctest::Approx(1.8471454555963756).epsilon(kRel));
    CHECK(j.radicand_ok);

    // u_c = 0, B* = 0: J2 = 1/i1 > 0
    const auto z = J_functions(e, {1.0, 0.0}, 0.0, 1.0, 0.4);
    CHECK(z.J2 == doctest::Approx(1.0 / z.i1));
    CHECK(z.J2 > 0.0);
    CHECK_FALSE(z.radicand_ok);

    // i1 = i2 at constant coefficients
    const auto c = constant_unit();
    const auto k = J_functions(c, {1.0, 1.0}, -0.2, 1.0, 0.4);
    CHECK(k.i1 == doctest::Approx(k.i2));
    CHECK(k.J1 <= k.J2);
}

TEST_CASE("window is enforced for the solid formulas") {
    auto e = generic();
    e.mu = 1.2;
    CHECK_THROWS_AS(phi2_tilde(e, 1.0, 2.0), DomainError);
    CHECK_THROWS_AS(sigma_certificate(e, -0.1, 1.0), DomainError);
    CHECK_THROWS_AS(lipschitz_rhs_E(e, Phase::Solid, 1.0, 2.0), DomainError);
    CHECK_NOTHROW(lipschitz_rhs_E(e, Phase::Liquid, 0.4, 1.0));
    const auto rep = evaluate_certificates(e, -0.1, 0.4, 1.0);
    CHECK_FALSE(rep.window_ok);
    CHECK_FALSE(rep.sigma_applicable);
}

TEST_CASE("threshold betas and alpha-tilde") {
    const auto e = generic();
    const auto t = threshold_betas(e, -0.1, 1e-3, 10.0);
    if (t.beta_tilde) {
        CHECK(sigma_certificate(e, -0.1, *t.beta_tilde * 1.01) < 1.0);
        CHECK(sigma_certificate(e, -0.1, *t.beta_tilde * 0.99) > 1.0);
    }
    REQUIRE(t.beta_hat.has_value());
    const auto at = alpha_tilde(e, 1.0);
    REQUIRE(at.has_value());
    CHECK(epsilon_certificate(e, *at, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(epsilon_certificate(e, 0.5 * *at, 1.0) < 1.0);
    CHECK_THROWS_AS(threshold_betas(e, -0.1, 1.0, 0.5), DomainError);
}
