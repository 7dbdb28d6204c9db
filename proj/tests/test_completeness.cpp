#include "qcat/completeness.hpp"

#include <doctest.h>

#include <cmath>

using namespace qcat;

TEST_CASE("radial moments reproduce factorial products across the grid") {
    for (double q : {0.2, 0.5, 0.9}) {
        QContext ctx(q);
        for (int n = 0; n <= 6; ++n)
            for (long charge = -4; charge <= 4; ++charge) {
                MomentCheckResult r = radial_moment_check(ctx, n, charge);
                CHECK(r.relative_error < 1e-6);
                CHECK(r.expected ==
                      doctest::Approx(qfactorial(ctx, n) *
                                      qfactorial(ctx, n + std::labs(charge))));
                // moments depend only on |charge|
                MomentCheckResult mirror = radial_moment_check(ctx, n, -charge);
                CHECK(mirror.computed == doctest::Approx(r.computed));
            }
    }
}

TEST_CASE("sector resolution of identity is diagonal one") {
    for (double q : {0.2, 0.5, 0.9}) {
        QContext ctx(q);
        for (long charge : {0L, 1L, 2L, 4L, -3L}) {
            IdentityReport rep = resolution_of_identity(ctx, charge, 4);
            REQUIRE(rep.diagonal.size() == 5);
            for (double d : rep.diagonal)
                CHECK(d == doctest::Approx(1.0).epsilon(1e-5));
            CHECK(rep.max_abs_deviation < 1e-5);
        }
    }
}

TEST_CASE("invalid completeness arguments are rejected") {
    QContext ctx(0.5);
    CHECK_THROWS_AS(radial_moment_check(ctx, -1, 0), Error);
    CHECK_THROWS_AS(resolution_of_identity(ctx, 0, -2), Error);
}
