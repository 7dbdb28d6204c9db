#include "qcat/completeness.hpp"

#include "qcat/qcalculus.hpp"

#include <cmath>

namespace qcat {

namespace {

// ([2]_sqrt(q))^2 * integral d_sqrt(q) u of u^(2n+|charge|+1) K_|charge|,
// evaluated in log space so large moments stay representable.
double radial_moment(const QContext& ctx, int n, long charge) {
    const int aq = static_cast<int>(std::labs(charge));
    const double c = qnumber(ctx, 2, Base::sqrt_q);
    const double power = 2.0 * n + aq + 1.0;
    auto integrand = [&](double u) {
        return std::exp(power * std::log(u) + log_qbessel_k(ctx, aq, c * u));
    };
    return c * c * qintegral_inf(ctx, integrand, std::sqrt(ctx.q));
}

} // namespace

MomentCheckResult radial_moment_check(const QContext& ctx, int n, long charge) {
    if (n < 0)
        throw Error(errc::domain, "moment index must be nonnegative");
    MomentCheckResult r;
    r.n = n;
    r.charge = charge;
    r.computed = radial_moment(ctx, n, charge);
    r.expected = qfactorial(ctx, n) * qfactorial(ctx, n + std::labs(charge));
    r.relative_error = std::fabs(r.computed - r.expected) / r.expected;
    return r;
}

IdentityReport resolution_of_identity(const QContext& ctx, long charge, int n_check) {
    if (n_check < 0)
        throw Error(errc::domain, "diagonal index cap must be nonnegative");
    IdentityReport rep;
    rep.charge = charge;
    const long aq = std::labs(charge);
    for (int n = 0; n <= n_check; ++n) {
        // The angular integral contributes the Kronecker delta and cancels the
        // measure constants; what survives is the radial moment divided by the
        // squared basis normalization of the sector state |n+|charge|, n>.
        double lognorm = log_qfactorial(ctx, n) + log_qfactorial(ctx, n + aq);
        double entry = radial_moment(ctx, n, charge) * std::exp(-lognorm);
        rep.diagonal.push_back(entry);
        rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::fabs(entry - 1.0));
    }
    return rep;
}

} // namespace qcat
