#include "qcat/states.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

using namespace qcat;

namespace {

// Independent bracket/factorial oracle built from the raw power formula.
double bracket_oracle(double q, long n) {
    if (q == 1.0)
        return static_cast<double>(n);
    return (std::pow(q, n) - std::pow(q, -n)) / (q - 1.0 / q);
}

double factorial_oracle(double q, long n) {
    double f = 1.0;
    for (long k = 1; k <= n; ++k)
        f *= bracket_oracle(q, k);
    return f;
}

bool admits(Parity par, long p) {
    return par == Parity::full || (par == Parity::even) == (p % 2 == 0);
}

// Unnormalized coefficient series and its squared sum, straight from the
// defining formula with the power-based oracle.
std::vector<std::complex<double>> coeff_oracle(double q, std::complex<double> xi, long charge,
                                               Parity par, int p_max, double& norm_sq) {
    long aq = std::labs(charge);
    std::vector<std::complex<double>> c(p_max + 1, 0.0);
    norm_sq = 0.0;
    for (long p = 0; p <= p_max; ++p) {
        if (!admits(par, p))
            continue;
        c[p] = std::pow(xi, p) /
               std::sqrt(factorial_oracle(q, p) * factorial_oracle(q, p + aq));
        norm_sq += std::norm(c[p]);
    }
    return c;
}

double interior_norm(const TwoModeState& a, const std::vector<std::complex<double>>& b,
                     int margin) {
    double acc = 0.0;
    int side = a.n_max + 1;
    for (int m = 0; m <= a.n_max - margin; ++m)
        for (int n = 0; n <= a.n_max - margin; ++n)
            acc += std::norm(a.coeff[m * side + n] - b[m * side + n]);
    return std::sqrt(acc);
}

} // namespace

TEST_CASE("coefficients match the defining series, all parities and signs") {
    const int n_max = 30;
    for (double q : {0.2, 0.5, 0.9, 1.0}) {
        QContext ctx(q);
        TruncatedSpace sp = build_space(ctx, n_max);
        for (long charge : {0L, 1L, 3L, -2L})
            for (Parity par : {Parity::full, Parity::even, Parity::odd}) {
                CoherentFamilySpec spec;
                spec.xi_modulus = 0.8;
                spec.xi_phase = 0.7;
                spec.charge = charge;
                spec.parity = par;
                TwoModeState st = par == Parity::full
                                      ? charge_coherent(ctx, spec, sp)
                                      : even_odd_charge_coherent(ctx, spec, sp);
                CHECK(st.norm() == doctest::Approx(1.0).epsilon(1e-13));
                CHECK(st.charge.has_value());
                CHECK(*st.charge == charge);

                long aq = std::labs(charge);
                int p_max = n_max - static_cast<int>(aq);
                double nsq = 0.0;
                auto oracle = coeff_oracle(q, spec.xi(), charge, par, p_max, nsq);
                double scale = 1.0 / std::sqrt(nsq);
                for (long p = 0; p <= p_max; ++p) {
                    int m = charge >= 0 ? static_cast<int>(p + aq) : static_cast<int>(p);
                    int n = charge >= 0 ? static_cast<int>(p) : static_cast<int>(p + aq);
                    std::complex<double> got = st.coeff[st.index(m, n)];
                    std::complex<double> want = scale * oracle[p];
                    CHECK(std::abs(got - want) < 1e-12);
                }
            }
    }
}

TEST_CASE("pair annihilation eigen-property on the interior block") {
    const int n_max = 40;
    for (double q : {0.2, 0.5, 0.9}) {
        QContext ctx(q);
        TruncatedSpace sp = build_space(ctx, n_max);
        for (long charge : {0L, 1L, -2L})
            for (double xi : {0.3, 1.5, 3.0}) {
                CoherentFamilySpec spec;
                spec.xi_modulus = xi;
                spec.xi_phase = 0.4;
                spec.charge = charge;
                spec.parity = Parity::full;
                TwoModeState st = charge_coherent(ctx, spec, sp);
                TwoModeState ks = apply(sp.k_minus, st);
                std::vector<std::complex<double>> tgt(st.coeff.size());
                for (size_t i = 0; i < tgt.size(); ++i)
                    tgt[i] = spec.xi() * st.coeff[i];
                CHECK(interior_norm(ks, tgt, 2) < 1e-8);

                // even/odd states are eigenstates of the squared operator
                for (Parity par : {Parity::even, Parity::odd}) {
                    spec.parity = par;
                    TwoModeState cat = even_odd_charge_coherent(ctx, spec, sp);
                    TwoModeState k2 = apply(sp.k_minus, apply(sp.k_minus, cat));
                    std::vector<std::complex<double>> t2(cat.coeff.size());
                    for (size_t i = 0; i < t2.size(); ++i)
                        t2[i] = spec.xi() * spec.xi() * cat.coeff[i];
                    CHECK(interior_norm(k2, t2, 4) < 1e-8);
                }
            }
    }
}

TEST_CASE("odd state is undefined at the origin") {
    QContext ctx(0.5);
    TruncatedSpace sp = build_space(ctx, 10);
    CoherentFamilySpec spec;
    spec.xi_modulus = 0.0;
    spec.parity = Parity::odd;
    CHECK_THROWS_AS(even_odd_charge_coherent(ctx, spec, sp), Error);
    try {
        even_odd_charge_coherent(ctx, spec, sp);
    } catch (const Error& e) {
        CHECK(e.code == errc::odd_at_zero);
    }
    // the even state degenerates smoothly to the lowest sector basis state
    spec.parity = Parity::even;
    spec.charge = 2;
    TwoModeState ground = even_odd_charge_coherent(ctx, spec, sp);
    CHECK(std::abs(ground.coeff[ground.index(2, 0)] - 1.0) < 1e-14);
}

TEST_CASE("truncation shortfall is reported for large eigenvalues") {
    QContext ctx(0.9);
    TruncatedSpace sp = build_space(ctx, 8);
    CoherentFamilySpec spec;
    spec.xi_modulus = 6.0;
    spec.parity = Parity::full;
    CHECK_THROWS_AS(charge_coherent(ctx, spec, sp), Error);
    try {
        charge_coherent(ctx, spec, sp);
    } catch (const Error& e) {
        CHECK(e.code == errc::truncation_insufficient);
    }
}

TEST_CASE("overlaps: normalization, orthogonality, and the closed form") {
    QContext ctx(0.5);
    for (long charge : {0L, 1L, -2L}) {
        CoherentFamilySpec a;
        a.xi_modulus = 0.9;
        a.xi_phase = 0.3;
        a.charge = charge;

        a.parity = Parity::full;
        CHECK(std::abs(overlap(ctx, a, a) - 1.0) < 1e-12);

        CoherentFamilySpec e = a, o = a;
        e.parity = Parity::even;
        o.parity = Parity::odd;
        CHECK(std::abs(overlap(ctx, e, o)) < 1e-14);
        CHECK(std::abs(overlap(ctx, e, e) - 1.0) < 1e-12);
        CHECK(std::abs(overlap(ctx, o, o) - 1.0) < 1e-12);

        CoherentFamilySpec b = a;
        b.charge = charge + 1;
        CHECK(std::abs(overlap(ctx, a, b)) < 1e-14); // distinct charge sectors

        // two full states in one sector: closed form through the series
        b = a;
        b.xi_modulus = 1.4;
        b.xi_phase = -0.2;
        std::complex<double> got = overlap(ctx, a, b);
        long aq = std::labs(charge);
        std::complex<double> cross = 0.0;
        double na = 0.0, nb = 0.0;
        for (long p = 0; p <= 60; ++p) {
            double w = 1.0 / (factorial_oracle(0.5, p) * factorial_oracle(0.5, p + aq));
            cross += std::pow(std::conj(a.xi()) * b.xi(), p) * w;
            na += std::pow(std::norm(a.xi()), p) * w;
            nb += std::pow(std::norm(b.xi()), p) * w;
        }
        std::complex<double> want = cross / std::sqrt(na * nb);
        CHECK(std::abs(got - want) < 1e-12);
    }
}

TEST_CASE("even/odd split of the full state and its scalar identity") {
    for (double q : {0.2, 0.5, 0.9})
        for (long charge : {0L, 1L, 2L})
            for (double xi : {0.4, 1.2, 2.5}) {
                QContext ctx(q);
                DecompositionReport rep =
                    decomposition_check(ctx, std::polar(xi, 0.9), charge);
                CHECK(rep.combination < 1e-12);
                CHECK(rep.normalization < 1e-12);
                CHECK(rep.symmetric < 1e-12);
                CHECK(rep.antisymmetric < 1e-12);
                CHECK(rep.worst() < 1e-12);
            }
}

TEST_CASE("normalization factors tie together across families") {
    QContext ctx(0.5);
    double x = 1.3;
    for (long charge : {0L, 2L}) {
        NormalizationSet ns = normalizations(ctx, x, charge);
        // full series splits into its even and odd parts
        CHECK(1.0 / (ns.charge_full * ns.charge_full) ==
              doctest::Approx(1.0 / (ns.charge_even * ns.charge_even) +
                              1.0 / (ns.charge_odd * ns.charge_odd))
                  .epsilon(1e-12));
        CHECK(ns.single_full == doctest::Approx(1.0 / std::sqrt(qexp(ctx, x))).epsilon(1e-12));
        auto [ch, sh] = qcosh_qsinh(ctx, x);
        CHECK(ns.single_even == doctest::Approx(1.0 / std::sqrt(ch)).epsilon(1e-12));
        CHECK(ns.single_odd == doctest::Approx(1.0 / std::sqrt(sh)).epsilon(1e-12));
    }
}

TEST_CASE("single-mode states are normalized with the expected coefficients") {
    QContext ctx(0.5);
    std::complex<double> xi = std::polar(0.9, 0.25);
    for (Parity par : {Parity::full, Parity::even, Parity::odd}) {
        SingleModeState s = single_mode_coherent(ctx, xi, par, 30);
        double nsq = 0.0;
        for (const auto& c : s.coeff)
            nsq += std::norm(c);
        CHECK(nsq == doctest::Approx(1.0).epsilon(1e-13));
        for (int n = 0; n <= 30; ++n)
            if (!admits(par, n))
                CHECK(std::abs(s.coeff[n]) == 0.0);
    }
}

TEST_CASE("angular group average projects onto the charge sector") {
    QContext ctx(0.5);
    TruncatedSpace sp = build_space(ctx, 30);
    for (long charge : {1L, -1L, 2L})
        for (Parity par : {Parity::even, Parity::odd}) {
            std::complex<double> xi1 = std::polar(0.9, 0.2);
            std::complex<double> xi2 = std::polar(0.7, -0.4);
            TwoModeState proj = u1_project(ctx, xi1, xi2, charge, par, sp);

            CoherentFamilySpec ref;
            std::complex<double> prod = xi1 * xi2;
            ref.xi_modulus = std::abs(prod);
            ref.xi_phase = std::arg(prod);
            ref.charge = charge;
            ref.parity = par;
            TwoModeState want = even_odd_charge_coherent(ctx, ref, sp);

            double nrm = proj.norm();
            CHECK(nrm == doctest::Approx(1.0).epsilon(1e-10));
            for (auto& c : proj.coeff)
                c /= nrm;
            canonicalize(proj);
            canonicalize(want);
            double acc = 0.0;
            for (size_t i = 0; i < proj.coeff.size(); ++i)
                acc += std::norm(proj.coeff[i] - want.coeff[i]);
            CHECK(std::sqrt(acc) < 1e-10);
        }
}

TEST_CASE("label-space differential actions reproduce the operator algebra") {
    QContext ctx(0.5);
    TruncatedSpace sp = build_space(ctx, 20);
    for (long charge : {1L, 2L, -1L}) {
        DAlgebraReport rep = dalgebra_check(ctx, charge, 0.8, sp);
        CHECK(rep.lower_shift < 1e-10);
        CHECK(rep.raise_swap < 1e-10);
        CHECK(rep.kminus_swap < 1e-10);
        CHECK(rep.number_action < 1e-10);
        CHECK(rep.raise_qderiv < 1e-10);
        CHECK(rep.kplus_qderiv < 1e-10);
        CHECK(rep.worst() < 1e-10);
    }
}

TEST_CASE("classical limit of the coefficients uses plain factorials") {
    // q = 1 - 1e-6 against the undeformed oracle with ordinary factorials
    double q = 1.0 - 1e-6;
    QContext ctx(q);
    TruncatedSpace sp = build_space(ctx, 30);
    CoherentFamilySpec spec;
    spec.xi_modulus = 0.5;
    spec.charge = 2;
    spec.parity = Parity::full;
    TwoModeState st = charge_coherent(ctx, spec, sp);

    double nsq = 0.0;
    std::vector<double> plain(29, 0.0);
    for (long p = 0; p <= 28; ++p) {
        double pf = 1.0, pqf = 1.0;
        for (long k = 1; k <= p; ++k)
            pf *= k;
        for (long k = 1; k <= p + 2; ++k)
            pqf *= k;
        plain[p] = std::pow(0.5, p) / std::sqrt(pf * pqf);
        nsq += plain[p] * plain[p];
    }
    for (long p = 0; p <= 20; ++p) {
        double want = plain[p] / std::sqrt(nsq);
        double got = st.coeff[st.index(static_cast<int>(p + 2), static_cast<int>(p))].real();
        CHECK(got == doctest::Approx(want).epsilon(1e-4));
    }
}
