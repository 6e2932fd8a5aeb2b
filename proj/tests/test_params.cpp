#include <catch2/catch_amalgamated.hpp>

#include "apf/params.hpp"

using namespace apf;

TEST_CASE("apply_coupling scales the tilde coefficients") {
    BaseCoefficients b;
    b.mu1_tilde = 2.0;
    b.gamma1_tilde = 3.0;
    b.lambda1_tilde = 1.0;
    const ModelParams p = apply_coupling(b, 0.5);
    CHECK(p.mu1 == 1.0);
    CHECK(p.gamma1 == 1.5);
    CHECK(p.lambda1 == 0.5);
    CHECK(p.base.mu2 == b.mu2);
}

TEST_CASE("apply_coupling at epsilon = 0 decouples") {
    BaseCoefficients b;
    const ModelParams p = apply_coupling(b, 0.0);
    CHECK(p.mu1 == 0.0);
    CHECK(p.gamma1 == 0.0);
    CHECK(p.lambda1 == 0.0);
    CHECK_FALSE(p.coupled());
}

TEST_CASE("apply_coupling keeps the sign of gamma1_tilde") {
    BaseCoefficients b;
    b.gamma1_tilde = -1.0;
    const ModelParams p = apply_coupling(b, 0.1);
    CHECK(p.gamma1 == Catch::Approx(-0.1));
}

TEST_CASE("apply_coupling rejects negative epsilon") {
    CHECK_THROWS_AS(apply_coupling(BaseCoefficients{}, -1e-3), ValidationError);
}

TEST_CASE("bilinearity of the coupling rule") {
    BaseCoefficients b;
    b.mu1_tilde = 1.7;
    for (double e1 : {0.0, 0.25, 2.0})
        for (double e2 : {0.1, 1.0, 3.0}) {
            const double lhs = apply_coupling(b, e1 * e2).mu1;
            const double rhs = e1 * apply_coupling(b, e2).mu1;
            CHECK(lhs == Catch::Approx(rhs).margin(1e-15));
        }
}

TEST_CASE("validate accepts consistent params") {
    BaseCoefficients b;
    b.alpha = 1.0;
    b.mu2 = 1.0;
    b.lambda2 = 1.0;
    const ModelParams p = apply_coupling(b, 0.1);
    CHECK_NOTHROW(validate(p));
}

TEST_CASE("validate flags nonpositive alpha") {
    BaseCoefficients b;
    b.alpha = 0.0;
    ModelParams p;
    p.base = b;
    try {
        validate(p);
        FAIL("expected PositivityViolation");
    } catch (const PositivityViolation& e) {
        CHECK(e.name == "alpha");
    }
}

TEST_CASE("validate flags inconsistent couplings") {
    ModelParams p = apply_coupling(BaseCoefficients{}, 0.5);
    p.mu1 *= 1.0 + 1e-9;
    CHECK_THROWS_AS(validate(p), CouplingInconsistency);
}

TEST_CASE("validate composed with apply_coupling never raises CouplingInconsistency") {
    BaseCoefficients b;
    for (double eps : {0.0, 1e-12, 1e-3, 0.3333333333333333, 7.0}) {
        b.mu1_tilde = 0.1 + eps;
        b.gamma1_tilde = -2.5 * eps - 0.1;
        CHECK_NOTHROW(validate(apply_coupling(b, eps)));
    }
}

TEST_CASE("strict mode requires kappa = 0") {
    BaseCoefficients b;
    b.kappa = 0.3;
    CHECK_THROWS_AS(apply_coupling(b, 0.1, true), StrictModeKappaNonzero);
    CHECK_NOTHROW(apply_coupling(b, 0.1, false));
    b.kappa = 0.0;
    CHECK_NOTHROW(apply_coupling(b, 0.1, true));
}

TEST_CASE("positive and negative parts") {
    CHECK(neg_part(-2.0) == 2.0);
    CHECK(neg_part(3.0) == 0.0);
    CHECK(pos_part(-2.0) == 0.0);
    CHECK(pos_part(3.0) == 3.0);
    // a+ = a + a-
    for (double a : {-1.5, 0.0, 2.5}) CHECK(pos_part(a) == a + neg_part(a));
}
