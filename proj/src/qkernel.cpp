#include "qcat/qkernel.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <limits>

namespace qcat {

namespace detail {

// Shared lazily-built caches. qcalculus stores its calibrated radial kernel
// here through the opaque slot so repeated integrals don't recalibrate.
struct ContextCache {
    std::mutex mutex;
    std::map<double, QNumberTable> tables; // keyed by base
    std::optional<double> zeta;
    std::shared_ptr<const void> radial_kernel;
};

} // namespace detail

QNumberTable QNumberTable::build(double base, int n_max) {
    QNumberTable t;
    t.base = base;
    t.values.resize(static_cast<size_t>(n_max) + 1);
    t.factorials.resize(static_cast<size_t>(n_max) + 1);
    t.log_factorials.resize(static_cast<size_t>(n_max) + 1);
    t.values[0] = 0.0;
    t.factorials[0] = 1.0;
    t.log_factorials[0] = 0.0;
    const double denom = base - 1.0 / base;
    for (int n = 1; n <= n_max; ++n) {
        double v;
        if (base == 1.0) {
            v = static_cast<double>(n);
        } else {
            v = (std::pow(base, n) - std::pow(base, -n)) / denom;
        }
        t.values[n] = v;
        t.factorials[n] = t.factorials[n - 1] * v;
        // keep the log table finite even where the bracket itself overflows:
        // for base < 1, [n] ~ base^-n / (1/base - base) as n grows
        double log_v = std::isfinite(v)
                           ? std::log(v)
                           : -n * std::log(base) - std::log(1.0 / base - base);
        t.log_factorials[n] = t.log_factorials[n - 1] + log_v;
    }
    return t;
}

QContext::QContext(double q_, double series_tol_, int max_terms_, int lattice_depth_)
    : q(q_), series_tol(series_tol_), max_terms(max_terms_), lattice_depth(lattice_depth_),
      cache(std::make_shared<detail::ContextCache>()) {
    if (!(q > 0.0 && q <= 1.0))
        throw Error(errc::domain, "deformation parameter q must lie in (0, 1]");
    if (!(series_tol > 0.0))
        throw Error(errc::domain, "series_tol must be positive");
    if (max_terms < 1)
        throw Error(errc::domain, "max_terms must be at least 1");
    if (lattice_depth < 1)
        throw Error(errc::domain, "lattice_depth must be at least 1");
}

double base_value(const QContext& ctx, Base b) {
    return b == Base::q ? ctx.q : std::sqrt(ctx.q);
}

namespace {

enum class Entry { value, factorial, log_factorial };

double table_entry(const QContext& ctx, double base, long n, Entry which) {
    auto& c = *ctx.cache;
    std::lock_guard<std::mutex> lock(c.mutex);
    auto it = c.tables.find(base);
    if (it == c.tables.end() || static_cast<long>(it->second.values.size()) <= n) {
        int want = static_cast<int>(std::max<long>(n, 64));
        c.tables[base] = QNumberTable::build(base, want * 2);
        it = c.tables.find(base);
    }
    const auto& t = it->second;
    auto i = static_cast<size_t>(n);
    switch (which) {
    case Entry::value:
        return t.values[i];
    case Entry::factorial:
        return t.factorials[i];
    default:
        return t.log_factorials[i];
    }
}

using big_float = boost::multiprecision::cpp_bin_float_50;

// Raw truncated series (no cutoff branch) used by qexp and the zero search.
// Alternating for x < 0 with terms far larger than the sum, so the caller gets
// the peak term magnitude to judge how many digits cancellation destroyed.
template <typename T>
T qexp_series_t(double q, double x, int max_terms, double tol, double* peak_out = nullptr) {
    const T qv(q);
    const T denom = qv - 1 / qv;
    const T xv(x);
    T sum(1), term(1);
    double peak = 1.0;
    double prev_mag = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= max_terms; ++n) {
        using std::pow;
        using boost::multiprecision::pow;
        T bracket = (pow(qv, n) - pow(qv, -n)) / denom;
        term *= xv / bracket;
        sum += term;
        double mag = static_cast<double>(abs(term));
        peak = std::max(peak, mag);
        if (peak_out)
            *peak_out = peak;
        if (mag < prev_mag && mag <= tol * std::max(static_cast<double>(abs(sum)), 1e-300))
            return sum;
        prev_mag = mag;
    }
    throw Error(errc::non_convergence, "q-exponential series did not converge");
}

double qexp_series(const QContext& ctx, double x) {
    if (ctx.q == 1.0)
        return std::exp(x);
    double peak = 1.0;
    double sum = qexp_series_t<double>(ctx.q, x, ctx.max_terms, ctx.series_tol, &peak);
    // Fewer than ~6 significant digits left after cancellation: redo at 50
    // digits. Sign-sensitive callers (the zero cutoff) depend on this.
    if (std::fabs(sum) < peak * 1e-10)
        sum = static_cast<double>(qexp_series_t<big_float>(ctx.q, x, ctx.max_terms, 1e-45));
    return sum;
}

// Extended-precision sign of the series at -x; double precision is noise near
// the zero for q close to 1 (terms peak many orders above the sum).
int qexp_sign_at(const QContext& ctx, double x) {
    big_float v = qexp_series_t<big_float>(ctx.q, -x, ctx.max_terms, 1e-45);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

} // namespace

double qnumber(const QContext& ctx, long n, Base base) {
    if (n < 0)
        throw Error(errc::domain, "q-number index must be nonnegative");
    return table_entry(ctx, base_value(ctx, base), n, Entry::value);
}

double qfactorial(const QContext& ctx, long n, Base base) {
    if (n < 0)
        throw Error(errc::domain, "q-factorial index must be nonnegative");
    double v = table_entry(ctx, base_value(ctx, base), n, Entry::factorial);
    if (!std::isfinite(v))
        throw Error(errc::overflow, "q-factorial overflow; use log_qfactorial");
    return v;
}

double log_qfactorial(const QContext& ctx, long n, Base base) {
    if (n < 0)
        throw Error(errc::domain, "q-factorial index must be nonnegative");
    return table_entry(ctx, base_value(ctx, base), n, Entry::log_factorial);
}

double qexp(const QContext& ctx, double x) {
    if (ctx.q < 1.0 && x < 0.0) {
        double zeta = find_zeta(ctx);
        if (x <= -zeta)
            return 0.0;
    }
    return qexp_series(ctx, x);
}

std::pair<double, double> qcosh_qsinh(const QContext& ctx, double x) {
    if (ctx.q == 1.0)
        return {std::cosh(x), std::sinh(x)};
    double even = 1.0, odd = 0.0;
    double term = 1.0;
    double prev_mag = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= ctx.max_terms; ++n) {
        term *= x / qnumber(ctx, n);
        if (n % 2 == 0)
            even += term;
        else
            odd += term;
        double mag = std::fabs(term);
        double scale = std::max({std::fabs(even), std::fabs(odd), 1e-300});
        if (mag < prev_mag && mag <= ctx.series_tol * scale)
            return {even, odd};
        prev_mag = mag;
    }
    throw Error(errc::non_convergence, "q-hyperbolic series did not converge");
}

double find_zeta(const QContext& ctx) {
    if (ctx.q >= 1.0)
        throw Error(errc::no_zero_found, "the undeformed exponential has no real zero");
    {
        std::lock_guard<std::mutex> lock(ctx.cache->mutex);
        if (ctx.cache->zeta)
            return *ctx.cache->zeta;
    }
    // Outward bracketing for the first sign change. Zeros of the series are
    // roughly geometrically spaced with ratio 1/q^2, so a step below that
    // cannot jump over the first negative stretch.
    const double step = std::min(2.0, 0.5 * (1.0 + 1.0 / (ctx.q * ctx.q)));
    double lo = 0.0, hi = 1.0;
    bool bracketed = false;
    for (int i = 0; i < 16 * ctx.lattice_depth; ++i) {
        if (qexp_sign_at(ctx, hi) < 0) {
            bracketed = true;
            break;
        }
        lo = hi;
        hi *= step;
    }
    if (!bracketed)
        throw Error(errc::no_zero_found, "bracketing the q-exponential zero failed");
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (qexp_sign_at(ctx, mid) > 0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * hi)
            break;
    }
    double zeta = 0.5 * (lo + hi);
    std::lock_guard<std::mutex> lock(ctx.cache->mutex);
    ctx.cache->zeta = zeta;
    return zeta;
}

} // namespace qcat
