#include "qcat/observables.hpp"

#include "qcat/fockspace.hpp"
#include "qcat/qcalculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>

namespace qcat {

namespace {

// One space is cached at a time; sweeps iterate q in order so this avoids
// holding several ~100 MB operator sets alive at once.
std::shared_ptr<const TruncatedSpace> space_for(const QContext& ctx, int n_max) {
    static std::mutex mtx;
    static double cached_q = -1.0;
    static int cached_n = -1;
    static std::shared_ptr<const TruncatedSpace> cached;
    std::lock_guard<std::mutex> lock(mtx);
    if (!cached || cached_q != ctx.q || cached_n != n_max) {
        cached = std::make_shared<const TruncatedSpace>(build_space(ctx, n_max));
        cached_q = ctx.q;
        cached_n = n_max;
    }
    return cached;
}

TwoModeState make_state(const QContext& ctx, const CoherentFamilySpec& spec,
                        const TruncatedSpace& space) {
    return spec.parity == Parity::full ? charge_coherent(ctx, spec, space)
                                       : even_odd_charge_coherent(ctx, spec, space);
}

std::complex<double> dot(const std::vector<std::complex<double>>& bra,
                         const std::vector<std::complex<double>>& ket) {
    std::complex<double> acc = 0.0;
    for (size_t i = 0; i < bra.size(); ++i)
        acc += std::conj(bra[i]) * ket[i];
    return acc;
}

// Parity-restricted weighted mean sum(u_p f(p)) / sum(u_p) with
// u_p = x^p / ([p]! [p+|charge|]!), the squared unnormalized coefficients.
template <typename F>
double series_mean(const QContext& ctx, double x, long charge, Parity parity, F&& f) {
    const long aq = std::labs(charge);
    double num = 0.0, den = 0.0;
    double u = 1.0 / qfactorial(ctx, aq);
    auto admits = [&](long p) {
        return parity == Parity::full || (parity == Parity::even) == (p % 2 == 0);
    };
    if (admits(0)) {
        num += u * f(0L);
        den += u;
    }
    double prev_contrib = std::numeric_limits<double>::infinity();
    for (long p = 1; p <= ctx.max_terms; ++p) {
        u *= x / (qnumber(ctx, p) * qnumber(ctx, p + aq));
        if (admits(p)) {
            double contrib = u * std::fabs(f(p));
            num += u * f(p);
            den += u;
            if (contrib < prev_contrib &&
                contrib <= ctx.series_tol * std::max(std::fabs(num), 1e-300) && p > aq + 2)
                return num / den;
            prev_contrib = contrib;
        }
    }
    throw Error(errc::non_convergence, "expectation series did not converge");
}

double bracket2k0_mean(const QContext& ctx, double x, long charge, Parity parity) {
    const long aq = std::labs(charge);
    return series_mean(ctx, x, charge, parity,
                       [&](long p) { return qnumber(ctx, 2 * p + aq + 1); });
}

void check_routes(const QContext& ctx, double closed, double fock, const char* what) {
    double scale = std::max({std::fabs(closed), std::fabs(fock), 1.0});
    if (std::fabs(closed - fock) > 10.0 * ctx.series_tol * scale)
        throw Error(errc::route_mismatch, std::string("closed-form and Fock routes disagree: ") +
                                              what);
}

bool squeezed_flag(double variance, double bound) {
    return variance < bound - 1e-10 * std::max(1.0, std::fabs(bound));
}

} // namespace

std::pair<double, double> hyperbolic_ratios(const QContext& ctx, double xi_sq, long charge) {
    if (!(xi_sq > 0.0))
        throw Error(errc::division_by_zero, "coth-bar undefined at xi = 0");
    double sh = charge_series(ctx, xi_sq, charge, Parity::odd).real();
    double ch = charge_series(ctx, xi_sq, charge, Parity::even).real();
    double tanh_bar = sh / ch;
    return {tanh_bar, 1.0 / tanh_bar};
}

QuadratureReport su11_variances(const QContext& ctx, const CoherentFamilySpec& spec, double theta,
                                int n_max) {
    CoherentFamilySpec s = spec;
    s.xi_phase = theta;
    if (s.parity == Parity::odd && s.xi_modulus == 0.0)
        throw Error(errc::odd_at_zero, "odd state undefined at xi=0");
    const double x = s.xi_modulus * s.xi_modulus;

    // Closed forms.
    double bracket = bracket2k0_mean(ctx, x, s.charge, s.parity);
    double closed1, closed2;
    if (s.parity == Parity::full) {
        closed1 = closed2 = 0.25 * bracket;
    } else {
        double ratio;
        if (x > 0.0) {
            auto [tb, cb] = hyperbolic_ratios(ctx, x, s.charge);
            ratio = s.parity == Parity::even ? tb : cb;
        } else {
            ratio = 0.0; // even state at xi = 0; the |xi|^2 factor kills it
        }
        double c2t = std::cos(2.0 * theta);
        closed1 = 0.25 * bracket + 0.5 * x * (c2t + ratio);
        closed2 = 0.25 * bracket + 0.5 * x * (-c2t + ratio);
    }
    double bound = 0.25 * std::fabs(bracket);

    // Fock route.
    auto space = space_for(ctx, n_max);
    TwoModeState st = make_state(ctx, s, *space);
    TwoModeState lo = apply(space->k_minus, st);
    TwoModeState hi = apply(space->k_plus, st);
    std::complex<double> m_lo = dot(st.coeff, lo.coeff);
    std::complex<double> sq_lo = dot(hi.coeff, lo.coeff); // <K-K->
    double pm = dot(lo.coeff, lo.coeff).real();           // <K+K->
    double mp = dot(hi.coeff, hi.coeff).real();           // <K-K+>
    double mean1 = std::real(m_lo); // <X1> = Re<K->
    double mean2 = std::imag(m_lo); // <X2> = Im<K->
    double fock1 = 0.25 * (2.0 * std::real(sq_lo) + pm + mp) - mean1 * mean1;
    double fock2 = 0.25 * (-2.0 * std::real(sq_lo) + pm + mp) - mean2 * mean2;

    check_routes(ctx, closed1, fock1, "su11 variance 1");
    check_routes(ctx, closed2, fock2, "su11 variance 2");

    QuadratureReport rep;
    rep.family = QuadratureFamily::su11;
    rep.variance1 = closed1;
    rep.variance2 = closed2;
    rep.fock_variance1 = fock1;
    rep.fock_variance2 = fock2;
    rep.bound = bound;
    rep.squeezed1 = squeezed_flag(closed1, bound);
    rep.squeezed2 = squeezed_flag(closed2, bound);
    return rep;
}

QuadratureReport single_mode_variances(const QContext& ctx, const CoherentFamilySpec& spec,
                                       int mode, int n_max) {
    if (mode != 1 && mode != 2)
        throw Error(errc::domain, "mode must be 1 or 2");
    if (spec.parity == Parity::odd && spec.xi_modulus == 0.0)
        throw Error(errc::odd_at_zero, "odd state undefined at xi=0");
    const double x = spec.xi_modulus * spec.xi_modulus;
    const long aq = std::labs(spec.charge);
    const bool mode_carries_charge = (spec.charge >= 0) == (mode == 1);

    auto occupancy = [&](long p) { return mode_carries_charge ? p + aq : p; };
    double num = series_mean(ctx, x, spec.charge, spec.parity,
                             [&](long p) { return qnumber(ctx, occupancy(p)); });
    double comm = series_mean(ctx, x, spec.charge, spec.parity, [&](long p) {
        return qnumber(ctx, occupancy(p) + 1) - qnumber(ctx, occupancy(p));
    });
    double closed = 0.25 * (comm + 2.0 * num);
    double bound = 0.25 * std::fabs(comm);

    auto space = space_for(ctx, n_max);
    TwoModeState st = make_state(ctx, spec, *space);
    const LinearOperator& a = mode == 1 ? space->a1 : space->a2;
    const LinearOperator& ad = mode == 1 ? space->a1d : space->a2d;
    TwoModeState lo = apply(a, st);
    TwoModeState hi = apply(ad, st);
    std::complex<double> m_a = dot(st.coeff, lo.coeff);
    std::complex<double> sq = dot(hi.coeff, lo.coeff); // <a a>
    double ada = dot(lo.coeff, lo.coeff).real();
    double aad = dot(hi.coeff, hi.coeff).real();
    double fock1 = 0.25 * (2.0 * std::real(sq) + ada + aad) - std::pow(std::real(m_a), 2);
    double fock2 = 0.25 * (-2.0 * std::real(sq) + ada + aad) - std::pow(std::imag(m_a), 2);

    check_routes(ctx, closed, fock1, "single-mode variance 1");
    check_routes(ctx, closed, fock2, "single-mode variance 2");

    QuadratureReport rep;
    rep.family = mode == 1 ? QuadratureFamily::single_mode_1 : QuadratureFamily::single_mode_2;
    rep.variance1 = rep.variance2 = closed;
    rep.fock_variance1 = fock1;
    rep.fock_variance2 = fock2;
    rep.bound = bound;
    rep.squeezed1 = squeezed_flag(closed, bound);
    rep.squeezed2 = squeezed_flag(closed, bound);
    return rep;
}

QuadratureReport two_mode_variances(const QContext& ctx, const CoherentFamilySpec& spec,
                                    int n_max) {
    if (spec.parity == Parity::odd && spec.xi_modulus == 0.0)
        throw Error(errc::odd_at_zero, "odd state undefined at xi=0");
    const double x = spec.xi_modulus * spec.xi_modulus;
    const long aq = std::labs(spec.charge);

    double num1 = series_mean(ctx, x, spec.charge, spec.parity,
                              [&](long p) { return qnumber(ctx, p + aq); });
    double num2 = series_mean(ctx, x, spec.charge, spec.parity,
                              [&](long p) { return qnumber(ctx, p); });
    double comm1 = series_mean(ctx, x, spec.charge, spec.parity, [&](long p) {
        return qnumber(ctx, p + aq + 1) - qnumber(ctx, p + aq);
    });
    double comm2 = series_mean(ctx, x, spec.charge, spec.parity,
                               [&](long p) { return qnumber(ctx, p + 1) - qnumber(ctx, p); });
    // Pair expectation <a1 a2>: the eigenvalue xi for the full family, zero
    // for the parity-restricted ones.
    std::complex<double> pair = spec.parity == Parity::full ? spec.xi() : 0.0;
    double base = comm1 + comm2 + 2.0 * num1 + 2.0 * num2;
    double closed1 = 0.125 * (base + 4.0 * std::real(pair));
    double closed2 = 0.125 * (base - 4.0 * std::real(pair));
    double bound = 0.125 * std::fabs(comm1 + comm2);

    auto space = space_for(ctx, n_max);
    TwoModeState st = make_state(ctx, spec, *space);
    TwoModeState l1 = apply(space->a1, st);
    TwoModeState l2 = apply(space->a2, st);
    TwoModeState r1 = apply(space->a1d, st);
    TwoModeState r2 = apply(space->a2d, st);
    std::vector<std::complex<double>> vl(st.coeff.size()), vr(st.coeff.size());
    for (size_t i = 0; i < vl.size(); ++i) {
        vl[i] = l1.coeff[i] + l2.coeff[i];
        vr[i] = r1.coeff[i] + r2.coeff[i];
    }
    std::complex<double> m_l = dot(st.coeff, vl);
    std::complex<double> ll = dot(vr, vl);
    double rl = dot(vl, vl).real();
    double lr = dot(vr, vr).real();
    double mw1 = 2.0 * std::real(m_l) / std::sqrt(8.0);
    double mw2 = 2.0 * std::imag(m_l) / std::sqrt(8.0);
    double fock1 = 0.125 * (2.0 * std::real(ll) + rl + lr) - mw1 * mw1;
    double fock2 = 0.125 * (-2.0 * std::real(ll) + rl + lr) - mw2 * mw2;

    check_routes(ctx, closed1, fock1, "two-mode variance 1");
    check_routes(ctx, closed2, fock2, "two-mode variance 2");

    QuadratureReport rep;
    rep.family = QuadratureFamily::two_mode;
    rep.variance1 = closed1;
    rep.variance2 = closed2;
    rep.fock_variance1 = fock1;
    rep.fock_variance2 = fock2;
    rep.bound = bound;
    rep.squeezed1 = squeezed_flag(closed1, bound);
    rep.squeezed2 = squeezed_flag(closed2, bound);
    return rep;
}

CorrelationReport correlation_routes(const QContext& ctx, const CoherentFamilySpec& spec,
                                     int n_max) {
    if (!(spec.xi_modulus > 0.0))
        throw Error(errc::division_by_zero, "pair correlation undefined at xi = 0");
    CorrelationReport rep;
    if (spec.parity == Parity::full) {
        rep.closed = 1.0;
    } else {
        auto [tb, cb] = hyperbolic_ratios(ctx, spec.xi_modulus * spec.xi_modulus, spec.charge);
        double r = spec.parity == Parity::even ? cb : tb;
        rep.closed = r * r;
    }

    auto space = space_for(ctx, n_max);
    TwoModeState st = make_state(ctx, spec, *space);
    TwoModeState lo = apply(space->k_minus, st);
    TwoModeState lo2 = apply(space->k_minus, lo);
    double den = dot(lo.coeff, lo.coeff).real();
    double num = dot(lo2.coeff, lo2.coeff).real();
    rep.fock = num / (den * den);
    rep.antibunched = rep.closed < 1.0 - 1e-12;

    check_routes(ctx, rep.closed, rep.fock, "pair correlation");
    return rep;
}

double correlation_g(const QContext& ctx, const CoherentFamilySpec& spec, int n_max) {
    return correlation_routes(ctx, spec, n_max).closed;
}

std::string predicate_name(ScanPredicate p) {
    switch (p) {
    case ScanPredicate::coth_bar_lt_1:
        return "coth-lt-1";
    case ScanPredicate::j_negative:
        return "j-negative";
    default:
        return "su11-squeezed";
    }
}

ScanReport squeezing_scan(const QContext& ctx, long charge, ScanPredicate predicate, double lo,
                          double hi, double resolution, Parity parity, double theta) {
    if (!(lo >= 0.0) || !(lo < hi))
        throw Error(errc::domain, "scan range must satisfy 0 <= lo < hi");
    const long aq = std::labs(charge);
    const double scale = std::sqrt(ctx.q) * qnumber(ctx, 2, Base::sqrt_q);

    auto f = [&](double x) -> double {
        switch (predicate) {
        case ScanPredicate::j_negative:
            return qbessel_j(ctx, static_cast<int>(aq), scale * x);
        case ScanPredicate::coth_bar_lt_1:
            if (x <= 1e-12)
                return 1.0; // coth-bar diverges positively toward xi = 0
            return hyperbolic_ratios(ctx, x * x, charge).second - 1.0;
        default: {
            if (x <= 1e-12)
                return 1.0;
            // variance minus bound; the bracket term cancels exactly
            auto [tb, cb] = hyperbolic_ratios(ctx, x * x, charge);
            double ratio = parity == Parity::even ? tb : cb;
            double c2t = std::cos(2.0 * theta);
            double v1 = 0.5 * x * x * (c2t + ratio);
            double v2 = 0.5 * x * x * (-c2t + ratio);
            return std::min(v1, v2);
        }
        }
    };

    ScanReport rep;
    rep.predicate = predicate;
    rep.q = ctx.q;
    rep.charge = charge;
    rep.endpoint_tol = 1e-4;

    auto bisect = [&](double a, double b) {
        // f(a) and f(b) straddle zero; return the crossing to ~1e-7.
        double fa = f(a);
        for (int i = 0; i < 60 && b - a > 1e-7; ++i) {
            double m = 0.5 * (a + b);
            double fm = f(m);
            if ((fa < 0.0) == (fm < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        return 0.5 * (a + b);
    };

    const int steps = static_cast<int>(std::ceil((hi - lo) / resolution));
    double prev_x = lo;
    bool inside = f(lo) < 0.0;
    double start = inside ? lo : 0.0;
    for (int i = 1; i <= steps; ++i) {
        double x = lo + (hi - lo) * i / steps;
        double fx = f(x);
        bool neg = fx < 0.0;
        if (neg != inside) {
            double edge = bisect(prev_x, x);
            if (neg)
                start = edge;
            else
                rep.intervals.push_back({start, edge});
            inside = neg;
        }
        prev_x = x;
    }
    if (inside)
        rep.intervals.push_back({start, hi});
    return rep;
}

} // namespace qcat
