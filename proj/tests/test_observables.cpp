#include "qcat/observables.hpp"

#include "qcat/qcalculus.hpp"

#include <doctest.h>

#include <cmath>

using namespace qcat;

namespace {

constexpr double kPi = 3.14159265358979323846;

double rel(double a, double b) {
    return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1.0});
}

CoherentFamilySpec spec_of(double xi, long charge, Parity par, double theta = 0.0) {
    CoherentFamilySpec s;
    s.xi_modulus = xi;
    s.xi_phase = theta;
    s.charge = charge;
    s.parity = par;
    return s;
}

} // namespace

TEST_CASE("parity-split hyperbolic ratios are reciprocal and ordered") {
    for (double q : {0.2, 0.5, 0.9})
        for (long charge : {0L, 1L, -2L})
            for (double x : {0.1, 1.0, 4.0}) {
                QContext ctx(q);
                auto [tb, cb] = hyperbolic_ratios(ctx, x, charge);
                CHECK(tb * cb == doctest::Approx(1.0).epsilon(1e-13));
                // both ratios stay positive; which one exceeds 1 flips inside
                // the negative windows of the alternating series
                CHECK(tb > 0.0);
                CHECK(cb > 0.0);
            }
    CHECK_THROWS_AS(hyperbolic_ratios(QContext(0.5), 0.0, 1), Error);
}

TEST_CASE("coth-bar identity against the alternating series, standard grid") {
    for (double q : {0.2, 0.5, 0.9}) {
        QContext ctx(q);
        double scale = std::sqrt(q) * qnumber(ctx, 2, Base::sqrt_q);
        for (long charge = -2; charge <= 2; ++charge)
            for (double xi : {0.3, 0.8, 1.5, 3.0}) {
                auto [tb, cb] = hyperbolic_ratios(ctx, xi * xi, charge);
                (void)tb;
                double sh = charge_series(ctx, xi * xi, charge, Parity::odd).real();
                long aq = std::labs(charge);
                double j = qbessel_j(ctx, static_cast<int>(aq), scale * xi);
                double rhs = 1.0 + j / (std::pow(xi, static_cast<double>(aq)) * sh);
                CHECK(std::fabs(cb - rhs) / std::max(1.0, std::fabs(cb)) < 1e-7);
            }
    }
}

TEST_CASE("closed-form and Fock-space routes agree on the standard grid") {
    for (double q : {0.2, 0.5, 0.9}) {
        QContext ctx(q);
        for (long charge = -2; charge <= 2; ++charge)
            for (double xi : {0.3, 0.8, 1.5, 3.0})
                for (Parity par : {Parity::full, Parity::even, Parity::odd}) {
                    auto s = spec_of(xi, charge, par);
                    QuadratureReport su = su11_variances(ctx, s, kPi / 2);
                    CHECK(rel(su.variance1, su.fock_variance1) < 1e-7);
                    CHECK(rel(su.variance2, su.fock_variance2) < 1e-7);
                    for (int mode = 1; mode <= 2; ++mode) {
                        QuadratureReport sm = single_mode_variances(ctx, s, mode);
                        CHECK(rel(sm.variance1, sm.fock_variance1) < 1e-7);
                    }
                    QuadratureReport tm = two_mode_variances(ctx, s);
                    CHECK(rel(tm.variance1, tm.fock_variance1) < 1e-7);
                    CHECK(rel(tm.variance2, tm.fock_variance2) < 1e-7);
                    CorrelationReport g = correlation_routes(ctx, s);
                    CHECK(rel(g.closed, g.fock) < 1e-7);
                }
    }
}

TEST_CASE("uncertainty products respect the commutator bound") {
    QContext ctx(0.5);
    for (long charge : {0L, 1L, -2L})
        for (double xi : {0.5, 1.5, 3.0})
            for (Parity par : {Parity::full, Parity::even, Parity::odd})
                for (double theta : {0.0, kPi / 4, kPi / 2}) {
                    QuadratureReport su = su11_variances(ctx, spec_of(xi, charge, par), theta);
                    CHECK(su.variance1 * su.variance2 >= su.bound * su.bound - 1e-10);
                }
}

TEST_CASE("pair-quadrature squeezing appears only in the cat families") {
    QContext ctx(0.5);

    // full family: bound saturated with equal variances, never squeezed
    for (double xi : {0.5, 1.5, 3.0})
        for (long charge : {0L, 1L}) {
            QuadratureReport su =
                su11_variances(ctx, spec_of(xi, charge, Parity::full), kPi / 2);
            CHECK(std::fabs(su.variance1 - su.variance2) < 1e-12);
            CHECK(std::fabs(su.variance1 - su.bound) < 1e-12);
            CHECK_FALSE(su.squeezed1);
            CHECK_FALSE(su.squeezed2);
        }

    // even state at small |xi| and theta = pi/2: X1 squeezed (tanh-bar < 1)
    QuadratureReport even = su11_variances(ctx, spec_of(0.5, 1, Parity::even), kPi / 2);
    CHECK(even.squeezed1);
    CHECK_FALSE(even.squeezed2);

    // odd state inside the negative window of the alternating series
    QuadratureReport odd = su11_variances(ctx, spec_of(2.5, 1, Parity::odd), kPi / 2);
    CHECK(odd.squeezed1);
}

TEST_CASE("no single-mode squeezing for any family") {
    for (double q : {0.2, 0.5, 0.9}) {
        QContext ctx(q);
        for (long charge = -2; charge <= 2; ++charge)
            for (double xi : {0.3, 0.8, 1.5, 3.0})
                for (Parity par : {Parity::full, Parity::even, Parity::odd})
                    for (int mode = 1; mode <= 2; ++mode) {
                        QuadratureReport r =
                            single_mode_variances(ctx, spec_of(xi, charge, par), mode);
                        CHECK_FALSE(r.squeezed1);
                        CHECK_FALSE(r.squeezed2);
                    }
    }
}

TEST_CASE("two-mode squeezing: absent for cats, present for the full family") {
    for (double q : {0.2, 0.5, 0.9}) {
        QContext ctx(q);
        bool full_squeezed_somewhere = false;
        for (long charge = -2; charge <= 2; ++charge)
            for (double xi : {0.3, 0.8, 1.5, 3.0})
                for (Parity par : {Parity::full, Parity::even, Parity::odd}) {
                    QuadratureReport r = two_mode_variances(ctx, spec_of(xi, charge, par));
                    if (par == Parity::full) {
                        full_squeezed_somewhere |= r.squeezed1 || r.squeezed2;
                    } else {
                        CHECK_FALSE(r.squeezed1);
                        CHECK_FALSE(r.squeezed2);
                    }
                }
        CHECK(full_squeezed_somewhere);
    }
}

TEST_CASE("pair correlation: closed forms, Poissonian full, consistent flags") {
    for (double q : {0.2, 0.5, 0.9}) {
        QContext ctx(q);
        for (long charge : {0L, 1L, -2L})
            for (double xi : {0.4, 1.0, 2.2}) {
                auto [tb, cb] = hyperbolic_ratios(ctx, xi * xi, charge);
                CorrelationReport ge = correlation_routes(ctx, spec_of(xi, charge, Parity::even));
                CorrelationReport go = correlation_routes(ctx, spec_of(xi, charge, Parity::odd));
                CorrelationReport gf = correlation_routes(ctx, spec_of(xi, charge, Parity::full));
                CHECK(ge.closed == doctest::Approx(cb * cb).epsilon(1e-12));
                CHECK(go.closed == doctest::Approx(tb * tb).epsilon(1e-12));
                CHECK(std::fabs(gf.closed - 1.0) < 1e-9);
                CHECK_FALSE(gf.antibunched);
                // even is bunched and odd antibunched except inside the
                // negative windows, where coth-bar < 1 flips both; the flags
                // must track the closed values either way
                CHECK(ge.antibunched == (cb * cb < 1.0 - 1e-12));
                CHECK(go.antibunched == (tb * tb < 1.0 - 1e-12));
            }
    }
    CHECK_THROWS_AS(correlation_routes(QContext(0.5), spec_of(0.0, 1, Parity::even)), Error);
}

TEST_CASE("interval scan reproduces the quoted windows") {
    struct Row {
        double q;
        long charge;
        double lo, hi;
    };
    const Row rows[] = {
        {0.2, 0, 1.020, 5.208}, {0.5, 1, 1.808, 3.770}, {0.9, 2, 2.560, 4.166}};
    for (const Row& r : rows) {
        QContext ctx(r.q);
        ScanReport rep = squeezing_scan(ctx, r.charge, ScanPredicate::j_negative, 0.0, 6.0);
        REQUIRE(!rep.intervals.empty());
        CHECK(std::fabs(rep.intervals.front().lo - r.lo) < 0.01);
        CHECK(std::fabs(rep.intervals.front().hi - r.hi) < 0.01);
    }
}

TEST_CASE("predicate routes locate the same windows") {
    // coth-bar < 1 is equivalent to negativity of the alternating series, and
    // for the odd family at theta = pi/2 the pair-quadrature squeezing window
    // coincides with both.
    QContext ctx(0.5);
    ScanReport a = squeezing_scan(ctx, 1, ScanPredicate::j_negative, 0.0, 6.0);
    ScanReport b = squeezing_scan(ctx, 1, ScanPredicate::coth_bar_lt_1, 0.0, 6.0);
    ScanReport c =
        squeezing_scan(ctx, 1, ScanPredicate::su11_squeezed, 0.0, 6.0, 1e-2, Parity::odd,
                       kPi / 2);
    REQUIRE(a.intervals.size() == b.intervals.size());
    for (size_t i = 0; i < a.intervals.size(); ++i) {
        CHECK(std::fabs(a.intervals[i].lo - b.intervals[i].lo) < 1e-3);
        CHECK(std::fabs(a.intervals[i].hi - b.intervals[i].hi) < 1e-3);
    }
    REQUIRE(!c.intervals.empty());
    CHECK(std::fabs(c.intervals.front().lo - a.intervals.front().lo) < 1e-3);
    CHECK(std::fabs(c.intervals.front().hi - a.intervals.front().hi) < 1e-3);
}

TEST_CASE("scan handles empty results and bad ranges") {
    QContext ctx(0.9);
    ScanReport rep = squeezing_scan(ctx, 5, ScanPredicate::j_negative, 0.0, 2.0);
    CHECK(rep.intervals.empty());
    CHECK_THROWS_AS(squeezing_scan(ctx, 0, ScanPredicate::j_negative, 3.0, 1.0), Error);
}

TEST_CASE("classical limit of variances and correlation") {
    // q = 1 - 1e-6 against an undeformed oracle built from plain factorials.
    double q = 1.0 - 1e-6;
    QContext ctx(q);
    long charge = 1;
    double xi = 0.8;

    // oracle series sums over the charge sector with ordinary factorials
    auto mean = [&](bool even_par, auto&& f) {
        double num = 0.0, den = 0.0;
        double u = 1.0; // 1/(0! * 1!)
        for (long p = 0; p <= 60; ++p) {
            if (p > 0)
                u *= (xi * xi) / (static_cast<double>(p) * (p + 1));
            if ((p % 2 == 0) == even_par) {
                num += u * f(p);
                den += u;
            }
        }
        return num / den;
    };

    for (bool even_par : {true, false}) {
        Parity par = even_par ? Parity::even : Parity::odd;
        QuadratureReport su = su11_variances(ctx, spec_of(xi, charge, par), kPi / 2);
        double bracket = mean(even_par, [](long p) { return 2.0 * p + 2.0; }); // <2K0>
        double sh = 0.0, ch = 0.0;
        {
            double u = 1.0;
            for (long p = 0; p <= 60; ++p) {
                if (p > 0)
                    u *= (xi * xi) / (static_cast<double>(p) * (p + 1));
                (p % 2 == 0 ? ch : sh) += u;
            }
        }
        double ratio = even_par ? sh / ch : ch / sh;
        double want1 = 0.25 * bracket + 0.5 * xi * xi * (-1.0 + ratio);
        CHECK(rel(su.variance1, want1) < 1e-4);

        CorrelationReport g = correlation_routes(ctx, spec_of(xi, charge, par));
        double want_g = even_par ? (ch / sh) * (ch / sh) : (sh / ch) * (sh / ch);
        CHECK(rel(g.closed, want_g) < 1e-4);
    }
}
