#include "qcat/fockspace.hpp"

#include <doctest.h>

#include <cmath>

using namespace qcat;

namespace {

double max_entry_diff(const LinearOperator& a, const LinearOperator& b) {
    double worst = 0.0;
    for (size_t i = 0; i < a.a.size(); ++i)
        worst = std::max(worst, std::fabs(a.a[i] - b.a[i]));
    return worst;
}

} // namespace

TEST_CASE("ladder matrices carry square-root brackets") {
    QContext ctx(0.5);
    TruncatedSpace sp = build_space(ctx, 6);
    for (int m = 1; m <= 6; ++m)
        for (int n = 0; n <= 6; ++n)
            CHECK(sp.a1.at(sp.index(m - 1, n), sp.index(m, n)) ==
                  doctest::Approx(std::sqrt(qnumber(ctx, m))));
    for (int m = 0; m <= 6; ++m)
        for (int n = 1; n <= 6; ++n)
            CHECK(sp.a2.at(sp.index(m, n - 1), sp.index(m, n)) ==
                  doctest::Approx(std::sqrt(qnumber(ctx, n))));
    CHECK(max_entry_diff(sp.a1d, adjoint(sp.a1)) == 0.0);
    CHECK(max_entry_diff(sp.k_plus, adjoint(sp.k_minus)) < 1e-15);
}

TEST_CASE("commutator suite meets the interior thresholds") {
    for (double q : {0.2, 0.5, 0.9, 1.0}) {
        QContext ctx(q);
        TruncatedSpace sp = build_space(ctx, 8);
        CommutatorReport rep = commutator_suite(ctx, sp);
        CHECK(rep.heisenberg_weyl < 1e-10);
        CHECK(rep.number_ladder < 1e-10);
        CHECK(rep.su11 < 1e-10);
        CHECK(rep.charge_pair < 1e-14); // holds exactly at any truncation
        CHECK(rep.worst() < 1e-10);
    }
}

TEST_CASE("deformed ladders factor through the undeformed ones") {
    // a_i equals sqrt([N_i+1]/(N_i+1)) b_i with b_i the plain ladder matrix.
    for (double q : {0.2, 0.5, 0.9}) {
        QContext ctx(q);
        const int n_max = 8;
        TruncatedSpace sp = build_space(ctx, n_max);
        for (int mode = 1; mode <= 2; ++mode) {
            LinearOperator b, g;
            b.side = g.side = n_max + 1;
            b.dim = g.dim = (n_max + 1) * (n_max + 1);
            b.a.assign(static_cast<size_t>(b.dim) * b.dim, 0.0);
            g.a.assign(static_cast<size_t>(g.dim) * g.dim, 0.0);
            for (int m = 0; m <= n_max; ++m)
                for (int n = 0; n <= n_max; ++n) {
                    int idx = sp.index(m, n);
                    int occ = mode == 1 ? m : n;
                    if (occ > 0) {
                        int src = mode == 1 ? sp.index(m - 1, n) : sp.index(m, n - 1);
                        b.at(src, idx) = std::sqrt(static_cast<double>(occ));
                    }
                    g.at(idx, idx) = std::sqrt(qnumber(ctx, occ + 1) / (occ + 1));
                }
            LinearOperator built = matmul(g, b);
            CHECK(max_entry_diff(built, mode == 1 ? sp.a1 : sp.a2) < 1e-12);
        }
    }
}

TEST_CASE("pair annihilation acts basis-state by basis-state") {
    QContext ctx(0.5);
    TruncatedSpace sp = build_space(ctx, 6);
    TwoModeState s;
    s.n_max = 6;
    s.coeff.assign(49, 0.0);
    s.coeff[s.index(3, 2)] = 1.0;
    s.charge = 1;

    TwoModeState out = apply(sp.k_minus, s);
    double expect = std::sqrt(qnumber(ctx, 3) * qnumber(ctx, 2));
    CHECK(std::abs(out.coeff[out.index(2, 1)] - expect) < 1e-14);
    CHECK(out.charge.has_value());
    CHECK(*out.charge == 1); // pair annihilation preserves the charge
    CHECK_FALSE(out.truncation_warning);

    TwoModeState up = apply(sp.a1d, s);
    CHECK(*up.charge == 2);
    CHECK(std::abs(up.coeff[up.index(4, 2)] - std::sqrt(qnumber(ctx, 4))) < 1e-14);
}

TEST_CASE("top-shell weight raises the truncation flag") {
    QContext ctx(0.5);
    TruncatedSpace sp = build_space(ctx, 6);
    TwoModeState s;
    s.n_max = 6;
    s.coeff.assign(49, 0.0);
    s.coeff[s.index(6, 5)] = 1.0;
    TwoModeState out = apply(sp.k_plus, s);
    CHECK(out.truncation_warning);
}

TEST_CASE("canonicalization makes the leading coefficient real positive") {
    TwoModeState s;
    s.n_max = 2;
    s.coeff.assign(9, 0.0);
    s.coeff[s.index(1, 0)] = std::complex<double>(0.0, -0.6);
    s.coeff[s.index(2, 1)] = std::complex<double>(0.3, 0.4);
    canonicalize(s);
    CHECK(s.coeff[s.index(1, 0)].real() == doctest::Approx(0.6));
    CHECK(std::abs(s.coeff[s.index(1, 0)].imag()) < 1e-15);
    CHECK(s.norm() == doctest::Approx(std::sqrt(0.36 + 0.25)));
}

TEST_CASE("number and charge matrices are diagonal brackets") {
    QContext ctx(0.5);
    TruncatedSpace sp = build_space(ctx, 5);
    for (int m = 0; m <= 5; ++m)
        for (int n = 0; n <= 5; ++n) {
            int idx = sp.index(m, n);
            CHECK(sp.n1.at(idx, idx) == doctest::Approx(static_cast<double>(m)));
            CHECK(sp.n2.at(idx, idx) == doctest::Approx(static_cast<double>(n)));
            CHECK(sp.charge.at(idx, idx) == doctest::Approx(static_cast<double>(m - n)));
            CHECK(sp.k0.at(idx, idx) == doctest::Approx((m + n + 1) / 2.0));
        }
}
