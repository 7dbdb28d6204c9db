#include "qcat/states.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace qcat {

namespace {

bool parity_admits(Parity par, long p) {
    switch (par) {
    case Parity::even:
        return p % 2 == 0;
    case Parity::odd:
        return p % 2 == 1;
    default:
        return true;
    }
}

// Bare sector coefficients t_p = xi^p / sqrt([p]! [p+|charge|]!) for the
// admitted parities, truncated at p_max. Entries outside the parity set stay
// zero so every builder shares one layout.
std::vector<std::complex<double>> sector_terms(const QContext& ctx, std::complex<double> xi,
                                               long charge, Parity par, int p_max) {
    const long aq = std::labs(charge);
    std::vector<std::complex<double>> t(static_cast<size_t>(p_max) + 1, {0.0, 0.0});
    std::complex<double> run = 1.0 / std::sqrt(qfactorial(ctx, aq));
    if (parity_admits(par, 0))
        t[0] = run;
    for (long p = 1; p <= p_max; ++p) {
        run *= xi / std::sqrt(qnumber(ctx, p) * qnumber(ctx, p + aq));
        if (parity_admits(par, p))
            t[static_cast<size_t>(p)] = run;
    }
    return t;
}

// Last admitted term must be negligible against the peak, or the truncated
// table misrepresents the state.
void check_tail(const QContext& ctx, const std::vector<std::complex<double>>& t, Parity par) {
    double peak = 0.0;
    for (const auto& c : t)
        peak = std::max(peak, std::abs(c));
    long last = static_cast<long>(t.size()) - 1;
    while (last >= 0 && !parity_admits(par, last))
        --last;
    if (last < 0 || std::abs(t[static_cast<size_t>(last)]) > ctx.series_tol * peak)
        throw Error(errc::truncation_insufficient,
                    "state tail weight above series_tol at the truncation cutoff");
}

TwoModeState build_charge_state(const QContext& ctx, const CoherentFamilySpec& spec,
                                const TruncatedSpace& space) {
    if (spec.parity == Parity::odd && spec.xi_modulus == 0.0)
        throw Error(errc::odd_at_zero, "odd state undefined at xi=0");
    const long aq = std::labs(spec.charge);
    const int p_max = space.n_max - static_cast<int>(aq);
    if (p_max < 0)
        throw Error(errc::truncation_insufficient, "charge sector exceeds the truncated space");

    auto t = sector_terms(ctx, spec.xi(), spec.charge, spec.parity, p_max);
    check_tail(ctx, t, spec.parity);

    std::complex<double> scale = 1.0;
    if (spec.normalized) {
        double s = charge_series(ctx, spec.xi_modulus * spec.xi_modulus, spec.charge, spec.parity)
                       .real();
        scale = 1.0 / std::sqrt(s);
    }

    TwoModeState st;
    st.n_max = space.n_max;
    st.coeff.assign(static_cast<size_t>(space.dim), {0.0, 0.0});
    st.charge = spec.charge;
    for (int p = 0; p <= p_max; ++p) {
        int m = spec.charge >= 0 ? p + static_cast<int>(aq) : p;
        int n = spec.charge >= 0 ? p : p + static_cast<int>(aq);
        st.coeff[static_cast<size_t>(space.index(m, n))] = scale * t[static_cast<size_t>(p)];
    }
    return st;
}

} // namespace

std::complex<double> charge_series(const QContext& ctx, std::complex<double> z, long charge,
                                   Parity parity) {
    const long aq = std::labs(charge);
    std::complex<double> sum = 0.0;
    std::complex<double> term = 1.0 / qfactorial(ctx, aq);
    if (parity_admits(parity, 0))
        sum += term;
    double prev_mag = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= ctx.max_terms; ++p) {
        term *= z / (qnumber(ctx, p) * qnumber(ctx, p + aq));
        if (parity_admits(parity, p))
            sum += term;
        double mag = std::abs(term);
        if (mag < prev_mag && mag <= ctx.series_tol * std::max(std::abs(sum), 1e-300))
            return sum;
        prev_mag = mag;
    }
    throw Error(errc::non_convergence, "charge-sector series did not converge");
}

NormalizationSet normalizations(const QContext& ctx, double xi_sq, long charge) {
    NormalizationSet n;
    n.charge_full = 1.0 / std::sqrt(charge_series(ctx, xi_sq, charge, Parity::full).real());
    n.charge_even = 1.0 / std::sqrt(charge_series(ctx, xi_sq, charge, Parity::even).real());
    double odd = charge_series(ctx, xi_sq, charge, Parity::odd).real();
    n.charge_odd = odd > 0.0 ? 1.0 / std::sqrt(odd) : std::numeric_limits<double>::infinity();
    n.single_full = 1.0 / std::sqrt(qexp(ctx, xi_sq));
    auto [ch, sh] = qcosh_qsinh(ctx, xi_sq);
    n.single_even = 1.0 / std::sqrt(ch);
    n.single_odd = sh > 0.0 ? 1.0 / std::sqrt(sh) : std::numeric_limits<double>::infinity();
    return n;
}

TwoModeState charge_coherent(const QContext& ctx, const CoherentFamilySpec& spec,
                             const TruncatedSpace& space) {
    if (spec.parity != Parity::full)
        throw Error(errc::domain, "charge_coherent expects parity = full");
    return build_charge_state(ctx, spec, space);
}

TwoModeState even_odd_charge_coherent(const QContext& ctx, const CoherentFamilySpec& spec,
                                      const TruncatedSpace& space) {
    if (spec.parity == Parity::full)
        throw Error(errc::domain, "even_odd_charge_coherent expects parity = even or odd");
    return build_charge_state(ctx, spec, space);
}

SingleModeState single_mode_coherent(const QContext& ctx, std::complex<double> xi, Parity parity,
                                     int n_max) {
    if (parity == Parity::odd && xi == std::complex<double>(0.0))
        throw Error(errc::odd_at_zero, "odd state undefined at xi=0");
    const double xi_sq = std::norm(xi);
    double norm_sq;
    if (parity == Parity::full) {
        norm_sq = qexp(ctx, xi_sq);
    } else {
        auto [ch, sh] = qcosh_qsinh(ctx, xi_sq);
        norm_sq = parity == Parity::even ? ch : sh;
    }
    const double scale = 1.0 / std::sqrt(norm_sq);

    SingleModeState st;
    st.coeff.assign(static_cast<size_t>(n_max) + 1, {0.0, 0.0});
    std::complex<double> run = 1.0;
    double peak = 0.0, last = 0.0;
    for (long n = 0; n <= n_max; ++n) {
        if (n > 0)
            run *= xi / std::sqrt(qnumber(ctx, n));
        if (parity_admits(parity, n)) {
            st.coeff[static_cast<size_t>(n)] = scale * run;
            peak = std::max(peak, std::abs(run));
            last = std::abs(run);
        }
    }
    if (last > ctx.series_tol * peak)
        throw Error(errc::truncation_insufficient,
                    "single-mode tail weight above series_tol at the cutoff");
    return st;
}

std::complex<double> overlap(const QContext& ctx, const CoherentFamilySpec& s1,
                             const CoherentFamilySpec& s2, int n_max) {
    // Coefficient route on the truncated sector tables.
    std::complex<double> direct = 0.0;
    if (s1.charge == s2.charge) {
        if (s1.parity == Parity::odd && s1.xi_modulus == 0.0)
            throw Error(errc::odd_at_zero, "odd state undefined at xi=0");
        if (s2.parity == Parity::odd && s2.xi_modulus == 0.0)
            throw Error(errc::odd_at_zero, "odd state undefined at xi=0");
        const long aq = std::labs(s1.charge);
        const int p_max = n_max - static_cast<int>(aq);
        if (p_max < 0)
            throw Error(errc::truncation_insufficient, "charge sector exceeds the truncation");
        auto t1 = sector_terms(ctx, s1.xi(), s1.charge, s1.parity, p_max);
        auto t2 = sector_terms(ctx, s2.xi(), s2.charge, s2.parity, p_max);
        check_tail(ctx, t1, s1.parity);
        check_tail(ctx, t2, s2.parity);
        std::complex<double> f1 = 1.0, f2 = 1.0;
        if (s1.normalized)
            f1 = 1.0 / std::sqrt(
                           charge_series(ctx, s1.xi_modulus * s1.xi_modulus, s1.charge, s1.parity)
                               .real());
        if (s2.normalized)
            f2 = 1.0 / std::sqrt(
                           charge_series(ctx, s2.xi_modulus * s2.xi_modulus, s2.charge, s2.parity)
                               .real());
        for (size_t p = 0; p < t1.size(); ++p)
            direct += std::conj(f1 * t1[p]) * (f2 * t2[p]);
    }

    // Closed-form route: normalization functions continued to complex argument.
    std::complex<double> closed = 0.0;
    if (s1.charge == s2.charge &&
        !(s1.parity != s2.parity && s1.parity != Parity::full && s2.parity != Parity::full)) {
        Parity common = s1.parity == Parity::full ? s2.parity : s1.parity;
        std::complex<double> series =
            charge_series(ctx, std::conj(s1.xi()) * s2.xi(), s1.charge, common);
        std::complex<double> f1 = 1.0, f2 = 1.0;
        if (s1.normalized)
            f1 = 1.0 / std::sqrt(
                           charge_series(ctx, s1.xi_modulus * s1.xi_modulus, s1.charge, s1.parity)
                               .real());
        if (s2.normalized)
            f2 = 1.0 / std::sqrt(
                           charge_series(ctx, s2.xi_modulus * s2.xi_modulus, s2.charge, s2.parity)
                               .real());
        closed = f1 * f2 * series;
    }

    if (std::abs(direct - closed) > 10.0 * ctx.series_tol * std::max(1.0, std::abs(closed)))
        throw Error(errc::route_mismatch, "overlap routes disagree beyond tolerance");
    return closed;
}

double DecompositionReport::worst() const {
    return std::max({combination, normalization, symmetric, antisymmetric});
}

DecompositionReport decomposition_check(const QContext& ctx, std::complex<double> xi, long charge,
                                        int n_max) {
    if (xi == std::complex<double>(0.0))
        throw Error(errc::odd_at_zero, "decomposition requires xi != 0");
    const long aq = std::labs(charge);
    const int p_max = n_max - static_cast<int>(aq);
    if (p_max < 0)
        throw Error(errc::truncation_insufficient, "charge sector exceeds the truncation");

    const double xi_sq = std::norm(xi);
    const double nf = 1.0 / std::sqrt(charge_series(ctx, xi_sq, charge, Parity::full).real());
    const double ne = 1.0 / std::sqrt(charge_series(ctx, xi_sq, charge, Parity::even).real());
    const double no = 1.0 / std::sqrt(charge_series(ctx, xi_sq, charge, Parity::odd).real());

    auto tf = sector_terms(ctx, xi, charge, Parity::full, p_max);
    auto tfm = sector_terms(ctx, -xi, charge, Parity::full, p_max);
    auto te = sector_terms(ctx, xi, charge, Parity::even, p_max);
    auto to = sector_terms(ctx, xi, charge, Parity::odd, p_max);
    check_tail(ctx, tf, Parity::full);

    DecompositionReport rep;
    rep.normalization =
        std::fabs(1.0 / (nf * nf) - 1.0 / (ne * ne) - 1.0 / (no * no)) * (nf * nf);
    for (size_t p = 0; p < tf.size(); ++p) {
        std::complex<double> full = nf * tf[p];
        std::complex<double> even = ne * te[p];
        std::complex<double> odd = no * to[p];
        rep.combination =
            std::max(rep.combination, std::abs(full - nf * (even / ne + odd / no)));
        std::complex<double> full_m = nf * tfm[p];
        rep.symmetric =
            std::max(rep.symmetric, std::abs(even - (ne / (2.0 * nf)) * (full + full_m)));
        rep.antisymmetric =
            std::max(rep.antisymmetric, std::abs(odd - (no / (2.0 * nf)) * (full - full_m)));
    }
    return rep;
}

TwoModeState u1_project(const QContext& ctx, std::complex<double> xi1, std::complex<double> xi2,
                        long charge, Parity parity, const TruncatedSpace& space) {
    if (xi1 == std::complex<double>(0.0))
        throw Error(errc::domain, "angular projection requires xi1 != 0");
    if (parity == Parity::full)
        throw Error(errc::domain, "angular projection targets parity = even or odd");
    const long aq = std::labs(charge);
    const int side = space.n_max + 1;

    auto run = [&](int nodes) {
        std::vector<std::complex<double>> acc(static_cast<size_t>(space.dim), {0.0, 0.0});
        for (int j = 0; j < nodes; ++j) {
            double alpha = -M_PI + 2.0 * M_PI * (j + 0.5) / nodes;
            std::complex<double> rot = std::polar(1.0, alpha);
            SingleModeState full_mode =
                single_mode_coherent(ctx, xi1 / rot, Parity::full, space.n_max);
            SingleModeState cat_mode =
                single_mode_coherent(ctx, xi2 * rot, parity, space.n_max);
            std::complex<double> weight =
                std::polar(1.0 / nodes, static_cast<double>(std::labs(charge)) * alpha);
            const auto& mode1 = charge >= 0 ? full_mode : cat_mode;
            const auto& mode2 = charge >= 0 ? cat_mode : full_mode;
            for (int m = 0; m < side; ++m) {
                std::complex<double> lhs = weight * mode1.coeff[static_cast<size_t>(m)];
                if (lhs == std::complex<double>(0.0))
                    continue;
                for (int n = 0; n < side; ++n)
                    acc[static_cast<size_t>(space.index(m, n))] +=
                        lhs * mode2.coeff[static_cast<size_t>(n)];
            }
        }
        return acc;
    };

    const int nodes = 64 * (1 + static_cast<int>(aq));
    auto coarse = run(nodes);
    auto fine = run(2 * nodes);

    // Prefactor restoring the cat-state normalization at xi = xi1 * xi2.
    const double xi_sq = std::norm(xi1 * xi2);
    double cat_norm = 1.0 / std::sqrt(charge_series(ctx, xi_sq, charge, parity).real());
    auto [ch, sh] = qcosh_qsinh(ctx, std::norm(xi2));
    double mode2_norm = std::sqrt(parity == Parity::even ? ch : sh);
    std::complex<double> pref = cat_norm * std::sqrt(qexp(ctx, std::norm(xi1))) * mode2_norm *
                                std::pow(xi1, -static_cast<double>(aq));

    double peak = 0.0;
    for (const auto& c : fine)
        peak = std::max(peak, std::abs(c));
    for (size_t i = 0; i < fine.size(); ++i)
        if (std::abs(fine[i] - coarse[i]) > 10.0 * ctx.series_tol * std::max(peak, 1e-30))
            throw Error(errc::quadrature_not_converged,
                        "angular projection is not node-count independent");

    TwoModeState st;
    st.n_max = space.n_max;
    st.coeff.resize(fine.size());
    st.charge = charge;
    for (size_t i = 0; i < fine.size(); ++i)
        st.coeff[i] = pref * fine[i];
    return st;
}

double DAlgebraReport::worst() const {
    return std::max({lower_shift, raise_swap, kminus_swap, number_action, raise_qderiv,
                     kplus_qderiv});
}

namespace {

double table_residual(const TwoModeState& got, const TwoModeState& want) {
    double peak = 0.0, dev = 0.0;
    for (size_t i = 0; i < got.coeff.size(); ++i) {
        peak = std::max(peak, std::abs(want.coeff[i]));
        dev = std::max(dev, std::abs(got.coeff[i] - want.coeff[i]));
    }
    return dev / std::max(peak, 1e-300);
}

TwoModeState scaled(TwoModeState s, std::complex<double> factor) {
    for (auto& c : s.coeff)
        c *= factor;
    return s;
}

} // namespace

DAlgebraReport dalgebra_check(const QContext& ctx, long charge, double xi,
                              const TruncatedSpace& space) {
    if (charge == 0)
        throw Error(errc::domain, "differential-action checks need a nonzero charge");
    if (!(xi > 0.0))
        throw Error(errc::domain, "differential-action checks need xi > 0");
    const long aq = std::labs(charge);
    const bool pos = charge > 0;

    auto bare = [&](long ch, Parity par, double x) {
        CoherentFamilySpec spec{x, 0.0, ch, par, false};
        return build_charge_state(ctx, spec, space);
    };
    auto flip = [](Parity p) { return p == Parity::even ? Parity::odd : Parity::even; };

    DAlgebraReport rep;
    for (Parity par : {Parity::even, Parity::odd}) {
        TwoModeState s = bare(charge, par, xi);

        // Ladder shift without swap: a1 for positive charge, a2 for negative.
        {
            const LinearOperator& op = pos ? space.a1 : space.a2;
            long target = pos ? charge - 1 : charge + 1;
            rep.lower_shift = std::max(
                rep.lower_shift, table_residual(apply(op, s), bare(target, par, xi)));
        }
        // Ladder shift with parity swap and xi factor: the other mode.
        {
            const LinearOperator& op = pos ? space.a2 : space.a1;
            long target = pos ? charge + 1 : charge - 1;
            rep.raise_swap = std::max(
                rep.raise_swap,
                table_residual(apply(op, s), scaled(bare(target, flip(par), xi), xi)));
        }
        // Pair annihilation swaps parities at fixed charge.
        rep.kminus_swap = std::max(
            rep.kminus_swap,
            table_residual(apply(space.k_minus, s), scaled(bare(charge, flip(par), xi), xi)));

        // Number operators act as xi d/dxi plus the charge offset; on the
        // coefficient table that multiplies term p by its xi-power plus shift.
        {
            TwoModeState want1 = s, want2 = s;
            for (int p = 0; p <= space.n_max; ++p) {
                double m_val = pos ? p + static_cast<double>(aq) : p;
                double n_val = pos ? p : p + static_cast<double>(aq);
                int m = pos ? p + static_cast<int>(aq) : p;
                int n = pos ? p : p + static_cast<int>(aq);
                if (m > space.n_max || n > space.n_max)
                    continue;
                size_t i = static_cast<size_t>(space.index(m, n));
                want1.coeff[i] *= m_val;
                want2.coeff[i] *= n_val;
            }
            rep.number_action = std::max(rep.number_action,
                                         std::max(table_residual(apply(space.n1, s), want1),
                                                  table_residual(apply(space.n2, s), want2)));
        }

        // Creation operator on the charge-raising mode as the q-derivative of
        // xi^(|charge|+1) times the neighboring-charge table.
        {
            const LinearOperator& op = pos ? space.a1d : space.a2d;
            long neighbor = pos ? charge + 1 : charge - 1;
            auto g = [&](double x) {
                return scaled(bare(neighbor, par, x), std::pow(x, static_cast<double>(aq) + 1.0));
            };
            TwoModeState hi = g(ctx.q * xi);
            TwoModeState lo = g(xi / ctx.q);
            std::complex<double> pref =
                std::pow(xi, -static_cast<double>(aq)) / ((ctx.q - 1.0 / ctx.q) * xi);
            TwoModeState want = hi;
            for (size_t i = 0; i < want.coeff.size(); ++i)
                want.coeff[i] = pref * (hi.coeff[i] - lo.coeff[i]);
            want.charge = pos ? charge + 1 : charge - 1;
            rep.raise_qderiv = std::max(rep.raise_qderiv, table_residual(apply(op, s), want));
        }

        // K+ as the nested q-derivative applied to the parity-swapped table,
        // sampled on the 5-point lattice {q^2 xi, q xi, xi, xi/q, xi/q^2}.
        {
            auto h = [&](double x) { return bare(charge, flip(par), x); };
            auto inner = [&](double x) {
                TwoModeState hi = h(ctx.q * x);
                TwoModeState lo = h(x / ctx.q);
                std::complex<double> d = std::pow(x, static_cast<double>(aq) + 1.0) /
                                         ((ctx.q - 1.0 / ctx.q) * x);
                TwoModeState out = hi;
                for (size_t i = 0; i < out.coeff.size(); ++i)
                    out.coeff[i] = d * (hi.coeff[i] - lo.coeff[i]);
                return out;
            };
            TwoModeState hi = inner(ctx.q * xi);
            TwoModeState lo = inner(xi / ctx.q);
            std::complex<double> pref =
                std::pow(xi, -static_cast<double>(aq)) / ((ctx.q - 1.0 / ctx.q) * xi);
            TwoModeState want = hi;
            for (size_t i = 0; i < want.coeff.size(); ++i)
                want.coeff[i] = pref * (hi.coeff[i] - lo.coeff[i]);
            rep.kplus_qderiv =
                std::max(rep.kplus_qderiv, table_residual(apply(space.k_plus, s), want));
        }
    }
    return rep;
}

} // namespace qcat
