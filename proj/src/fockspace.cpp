#include "qcat/fockspace.hpp"

#include <algorithm>
#include <cmath>

namespace qcat {

namespace {

LinearOperator zeros(int side, const std::string& label, int charge_shift) {
    LinearOperator op;
    op.label = label;
    op.charge_shift = charge_shift;
    op.side = side;
    op.dim = side * side;
    op.a.assign(static_cast<size_t>(op.dim) * op.dim, 0.0);
    return op;
}

} // namespace

LinearOperator matmul(const LinearOperator& lhs, const LinearOperator& rhs) {
    LinearOperator out = zeros(lhs.side, lhs.label + "*" + rhs.label,
                               lhs.charge_shift + rhs.charge_shift);
    for (int i = 0; i < lhs.dim; ++i) {
        for (int k = 0; k < lhs.dim; ++k) {
            double v = lhs.at(i, k);
            if (v == 0.0)
                continue;
            const double* row = &rhs.a[static_cast<size_t>(k) * rhs.dim];
            double* dst = &out.a[static_cast<size_t>(i) * out.dim];
            for (int j = 0; j < rhs.dim; ++j)
                dst[j] += v * row[j];
        }
    }
    return out;
}

LinearOperator matadd(const LinearOperator& lhs, const LinearOperator& rhs, double sign) {
    LinearOperator out = lhs;
    for (size_t i = 0; i < out.a.size(); ++i)
        out.a[i] += sign * rhs.a[i];
    return out;
}

LinearOperator adjoint(const LinearOperator& op) {
    LinearOperator out = zeros(op.side, op.label + "^+", -op.charge_shift);
    for (int i = 0; i < op.dim; ++i)
        for (int j = 0; j < op.dim; ++j)
            out.at(j, i) = op.at(i, j);
    return out;
}

TruncatedSpace build_space(const QContext& ctx, int n_max) {
    if (n_max < 2)
        throw Error(errc::domain, "two-mode space needs n_max >= 2");
    TruncatedSpace sp;
    sp.n_max = n_max;
    const int side = n_max + 1;
    sp.dim = side * side;

    sp.a1 = zeros(side, "a1", -1);
    sp.a2 = zeros(side, "a2", +1);
    sp.n1 = zeros(side, "N1", 0);
    sp.n2 = zeros(side, "N2", 0);
    for (int m = 0; m <= n_max; ++m) {
        for (int n = 0; n <= n_max; ++n) {
            int i = sp.index(m, n);
            sp.n1.at(i, i) = static_cast<double>(m);
            sp.n2.at(i, i) = static_cast<double>(n);
            if (m >= 1)
                sp.a1.at(sp.index(m - 1, n), i) = std::sqrt(qnumber(ctx, m));
            if (n >= 1)
                sp.a2.at(sp.index(m, n - 1), i) = std::sqrt(qnumber(ctx, n));
        }
    }
    sp.a1d = adjoint(sp.a1);
    sp.a1d.label = "a1^+";
    sp.a2d = adjoint(sp.a2);
    sp.a2d.label = "a2^+";

    sp.charge = matadd(sp.n1, sp.n2, -1.0);
    sp.charge.label = "Q";

    sp.k_minus = matmul(sp.a1, sp.a2);
    sp.k_minus.label = "K-";
    sp.k_plus = matmul(sp.a1d, sp.a2d);
    sp.k_plus.label = "K+";

    sp.k0 = matadd(sp.n1, sp.n2);
    for (int i = 0; i < sp.dim; ++i)
        sp.k0.at(i, i) = 0.5 * (sp.k0.at(i, i) + 1.0);
    sp.k0.label = "K0";
    return sp;
}

double TwoModeState::norm() const {
    double s = 0.0;
    for (const auto& c : coeff)
        s += std::norm(c);
    return std::sqrt(s);
}

TwoModeState apply(const LinearOperator& op, const TwoModeState& s, double tail_tol) {
    TwoModeState out;
    out.n_max = s.n_max;
    out.coeff.assign(s.coeff.size(), {0.0, 0.0});
    if (s.charge)
        out.charge = *s.charge + op.charge_shift;

    double edge = 0.0;
    for (size_t i = 0; i < s.coeff.size(); ++i) {
        int m = static_cast<int>(i) / (s.n_max + 1);
        int n = static_cast<int>(i) % (s.n_max + 1);
        if (m > s.n_max - 2 || n > s.n_max - 2)
            edge += std::norm(s.coeff[i]);
    }
    out.truncation_warning = s.truncation_warning || edge > tail_tol * tail_tol;

    for (int i = 0; i < op.dim; ++i) {
        std::complex<double> acc = 0.0;
        const double* row = &op.a[static_cast<size_t>(i) * op.dim];
        for (int j = 0; j < op.dim; ++j)
            if (row[j] != 0.0)
                acc += row[j] * s.coeff[static_cast<size_t>(j)];
        out.coeff[static_cast<size_t>(i)] = acc;
    }
    return out;
}

void canonicalize(TwoModeState& s) {
    for (auto& c : s.coeff) {
        if (std::abs(c) > 1e-14) {
            std::complex<double> phase = c / std::abs(c);
            for (auto& x : s.coeff)
                x /= phase;
            return;
        }
    }
}

double CommutatorReport::worst() const {
    return std::max({heisenberg_weyl, number_ladder, su11, charge_pair});
}

namespace {

// Max |entry| over (row, col) whose four mode indices are all interior.
double interior_max(const TruncatedSpace& sp, const LinearOperator& op) {
    double worst = 0.0;
    const int top = sp.n_max - 2;
    for (int i = 0; i < sp.dim; ++i) {
        auto [m1, n1] = sp.modes(i);
        if (m1 > top || n1 > top)
            continue;
        for (int j = 0; j < sp.dim; ++j) {
            auto [m2, n2] = sp.modes(j);
            if (m2 > top || n2 > top)
                continue;
            worst = std::max(worst, std::fabs(op.at(i, j)));
        }
    }
    return worst;
}

// Same interior scan, but each deviation is measured against the magnitude of
// the products it came from (floored at 1): the q-brackets entering K+ K- grow
// like q^-n, so an absolute residual would just report rounding on huge
// entries rather than a defect of the relation.
double interior_relative_max(const TruncatedSpace& sp, const LinearOperator& resid,
                             const LinearOperator& scale) {
    double worst = 0.0;
    const int top = sp.n_max - 2;
    for (int i = 0; i < sp.dim; ++i) {
        auto [m1, n1] = sp.modes(i);
        if (m1 > top || n1 > top)
            continue;
        for (int j = 0; j < sp.dim; ++j) {
            auto [m2, n2] = sp.modes(j);
            if (m2 > top || n2 > top)
                continue;
            double ref = std::max(1.0, std::fabs(scale.at(i, j)));
            worst = std::max(worst, std::fabs(resid.at(i, j)) / ref);
        }
    }
    return worst;
}

LinearOperator commutator(const LinearOperator& a, const LinearOperator& b) {
    return matadd(matmul(a, b), matmul(b, a), -1.0);
}

} // namespace

CommutatorReport commutator_suite(const QContext& ctx, const TruncatedSpace& sp) {
    CommutatorReport rep;
    const double q = ctx.q;

    // a a^+ - q a^+ a = q^(-N), per mode.
    for (int mode = 1; mode <= 2; ++mode) {
        const LinearOperator& a = mode == 1 ? sp.a1 : sp.a2;
        const LinearOperator& ad = mode == 1 ? sp.a1d : sp.a2d;
        LinearOperator lhs = matadd(matmul(a, ad), matmul(ad, a), -q);
        for (int i = 0; i < sp.dim; ++i) {
            auto [m, n] = sp.modes(i);
            lhs.at(i, i) -= std::pow(q, -(mode == 1 ? m : n));
        }
        LinearOperator mag = matadd(matmul(a, ad), matmul(ad, a), q);
        rep.heisenberg_weyl = std::max(rep.heisenberg_weyl, interior_relative_max(sp, lhs, mag));
    }

    // [N, a^+] = a^+ and [N, a] = -a.
    rep.number_ladder = std::max(
        {interior_max(sp, matadd(commutator(sp.n1, sp.a1d), sp.a1d, -1.0)),
         interior_max(sp, matadd(commutator(sp.n1, sp.a1), sp.a1, +1.0)),
         interior_max(sp, matadd(commutator(sp.n2, sp.a2d), sp.a2d, -1.0)),
         interior_max(sp, matadd(commutator(sp.n2, sp.a2), sp.a2, +1.0))});

    // [K+, K-] = -[2K0] with [2K0] diagonal as the q-bracket of m + n + 1.
    LinearOperator su = commutator(sp.k_plus, sp.k_minus);
    for (int i = 0; i < sp.dim; ++i) {
        auto [m, n] = sp.modes(i);
        su.at(i, i) += qnumber(ctx, m + n + 1);
    }
    LinearOperator su_mag = matadd(matmul(sp.k_plus, sp.k_minus), matmul(sp.k_minus, sp.k_plus), 1.0);
    rep.su11 = interior_relative_max(sp, su, su_mag);
    rep.su11 = std::max(rep.su11,
                        interior_max(sp, matadd(commutator(sp.k0, sp.k_plus), sp.k_plus, -1.0)));
    rep.su11 = std::max(rep.su11,
                        interior_max(sp, matadd(commutator(sp.k0, sp.k_minus), sp.k_minus, +1.0)));

    // [Q, a1 a2] = 0 — exact at any truncation, so no interior restriction.
    LinearOperator qc = commutator(sp.charge, sp.k_minus);
    for (double v : qc.a)
        rep.charge_pair = std::max(rep.charge_pair, std::fabs(v));

    return rep;
}

} // namespace qcat
