#include "qcat/qcalculus.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>
#include <vector>

namespace qcat {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();


double resolve_base(const QContext& ctx, double base) {
    if (base == 0.0)
        return ctx.q;
    if (!(base > 0.0 && base < 1.0)) {
        if (base == 1.0)
            throw Error(errc::domain, "q-lattice degenerates at base 1");
        throw Error(errc::domain, "lattice base must lie in (0, 1)");
    }
    return base;
}

// ---------------------------------------------------------------------------
// Radial kernel for K_nu.
//
// The kernel is a positive theta-regularized product-exponential weight:
//   M_k   = (Q^k; Q)_inf * ztil * Q^k,          Q = q^2, ztil = 1/(1-Q)
//   W_b(y) = sum_k q^(L_k^2/2 + b L_k) M_k,      L_k = log_q(y/ztil) - 2k
//   K_nu(x) = N (x/c)^nu sum_m t_m^(-nu-1) v_m^(-1) W_b1(t_m) W_b2(v_m),
// with t_m = ztil q^m and v_m = (x/c)^2 / t_m, c = [2]_sqrt(q).
//
// On the bilateral sqrt(q)-lattice the (p, nu) moment of this kernel
// separates into two exactly geometric-ladder factors, and the two betas plus
// the overall constant N are fixed by a one-step Newton calibration on the
// three base moments (0,0), (0,1), (1,0): shifting a beta multiplies every
// ladder ratio by exactly q^(-dbeta), so one step lands the ratios on
// [p]! and [p+nu]! up to rounding. All remaining moments are predictions.
// ---------------------------------------------------------------------------
struct RadialKernel {
    double q, Q, lnq, b, c, ztil, lnztil, dlt;
    std::vector<double> lnM; // masses, k = 1..K at index k-1
    int K = 0;
    int E0 = 0;
    double beta1 = 0.0, beta2 = 0.0, lnN = 0.0;
    std::vector<double> lnW1; // t-lattice array, offset 0
    std::vector<double> lnA2; // v-lattice array, offset dlt
    std::vector<double> lnqf; // log [n]! base q

    mutable std::mutex mutex;
    mutable std::map<std::uint64_t, std::shared_ptr<const std::vector<double>>> frac_cache;

    explicit RadialKernel(double q_) {
        q = q_;
        if (q > 0.99)
            throw Error(errc::domain, "radial kernel calibration requires q <= 0.99");
        Q = q * q;
        lnq = std::log(q);
        b = std::sqrt(q);
        c = b + 1.0 / b; // [2] in base sqrt(q)
        ztil = 1.0 / (1.0 - Q);
        lnztil = std::log(ztil);
        dlt = -2.0 * lnztil / lnq;

        // Masses: lnM_k = ln ztil + k ln Q + sum_i ln(1 - Q^(k+i)).
        K = static_cast<int>(std::ceil((lnztil + 160.0) / (-2.0 * lnq))) + 2;
        lnM.resize(static_cast<size_t>(K));
        // ln (Q^k; Q)_inf built from the tail down: poch_k = (1-Q^k) * poch_{k+1}.
        std::vector<double> lnpoch(static_cast<size_t>(K) + 2, 0.0);
        for (int k = K + 1 - 1; k >= 1; --k) {
            // accumulate from large k downward so each entry is a full product
            double acc = 0.0;
            for (int i = k; i <= K + 40; ++i) {
                double t = std::pow(Q, i);
                if (t < 1e-19) {
                    acc += std::log1p(-t);
                    break;
                }
                acc += std::log1p(-t);
            }
            lnpoch[static_cast<size_t>(k)] = acc;
        }
        for (int k = 1; k <= K; ++k)
            lnM[static_cast<size_t>(k - 1)] = lnztil + k * 2.0 * lnq + lnpoch[static_cast<size_t>(k)];

        double lmax = std::sqrt(2.0 * 760.0 / (-lnq));
        E0 = static_cast<int>(std::ceil(2.0 * K + lmax + std::fabs(dlt) + 40.0));

        lnqf.resize(32, 0.0);
        for (int n = 1; n < 32; ++n)
            lnqf[static_cast<size_t>(n)] =
                lnqf[static_cast<size_t>(n - 1)] +
                std::log((std::pow(q, n) - std::pow(q, -n)) / (q - 1.0 / q));

        calibrate();
    }

    // ln W_beta at generalized lattice coordinate lambda (L = lambda - 2k).
    double lnW_at(double beta, double lambda) const {
        double m = kNegInf;
        std::vector<double> terms;
        terms.reserve(static_cast<size_t>(K));
        for (int k = 1; k <= K; ++k) {
            double L = lambda - 2.0 * k;
            double e = (0.5 * L * L + beta * L) * lnq + lnM[static_cast<size_t>(k - 1)];
            terms.push_back(e);
            m = std::max(m, e);
        }
        if (m == kNegInf)
            return kNegInf;
        double s = 0.0;
        for (double e : terms)
            if (e - m > -745.0)
                s += std::exp(e - m);
        return m + std::log(s);
    }

    std::vector<double> build_array(double beta, double off) const {
        std::vector<double> w(static_cast<size_t>(2 * E0 + 1));
        for (int e = -E0; e <= E0; ++e)
            w[static_cast<size_t>(e + E0)] = lnW_at(beta, e + off);
        return w;
    }

    // ln sum_e q^(n e) W[e] for a prebuilt array.
    static double ladder_log(const std::vector<double>& w, int E0_, double n, double lnq_) {
        double m = kNegInf;
        for (int e = -E0_; e <= E0_; ++e)
            m = std::max(m, n * e * lnq_ + w[static_cast<size_t>(e + E0_)]);
        if (m == kNegInf)
            return kNegInf;
        double s = 0.0;
        for (int e = -E0_; e <= E0_; ++e) {
            double x = n * e * lnq_ + w[static_cast<size_t>(e + E0_)] - m;
            if (x > -745.0)
                s += std::exp(x);
        }
        return m + std::log(s);
    }

    // Separable log-moment without the overall constant N:
    //   ln m(p,nu) = ln(c^2 (1/b - b)) - nu ln ztil + lnH1(p) + lnH2(p+nu).
    double moment_log_separable(int p, int nu, const std::vector<double>& w1,
                                const std::vector<double>& a2) const {
        double h1 = ladder_log(w1, E0, static_cast<double>(p), lnq);
        double h2 = ladder_log(a2, E0, static_cast<double>(p + nu), lnq);
        return std::log(c * c * (1.0 / b - b)) - nu * lnztil + h1 + h2;
    }

    void calibrate() {
        // One exact Newton step per beta: a beta shift of d multiplies each
        // ladder ratio by q^(-d), so d = ln(ratio/target)/lnq zeroes it.
        beta1 = 0.0;
        beta2 = 0.0;
        for (int iter = 0; iter < 4; ++iter) {
            auto w1 = build_array(beta1, 0.0);
            auto a2 = build_array(beta2, dlt);
            double b2ratio = std::exp(ladder_log(a2, E0, 1.0, lnq) - ladder_log(a2, E0, 0.0, lnq));
            // target for the v-side first ratio is ztil (so that the nu-step
            // including the ztil^-nu prefactor equals [1] = 1)
            double d2 = std::log(b2ratio / ztil) / lnq;
            double b1ratio = std::exp(ladder_log(w1, E0, 1.0, lnq) - ladder_log(w1, E0, 0.0, lnq));
            double d1 = std::log(b1ratio * ztil) / lnq; // target 1/ztil
            beta1 += d1;
            beta2 += d2;
            if (std::fabs(d1) < 1e-13 && std::fabs(d2) < 1e-13)
                break;
        }
        lnW1 = build_array(beta1, 0.0);
        lnA2 = build_array(beta2, dlt);
        lnN = 0.0;
        double l00 = moment_log_separable(0, 0, lnW1, lnA2);
        lnN = -l00; // target [0]! [0]! = 1
    }

    std::shared_ptr<const std::vector<double>> array_for_offset(double phi) const {
        std::uint64_t key;
        std::memcpy(&key, &phi, sizeof key);
        {
            std::lock_guard<std::mutex> lock(mutex);
            auto it = frac_cache.find(key);
            if (it != frac_cache.end())
                return it->second;
        }
        auto arr = std::make_shared<const std::vector<double>>(build_array(beta2, dlt + phi));
        std::lock_guard<std::mutex> lock(mutex);
        if (frac_cache.size() > 64)
            frac_cache.clear();
        frac_cache[key] = arr;
        return frac_cache[key];
    }

    double eval_log(int nu, double x) const {
        double lnu = std::log(x / c);
        double lr = 2.0 * lnu / lnq; // lattice coordinate of (x/c)^2
        double nearest = std::round(lr);
        if (std::fabs(lr - nearest) < 1e-9)
            lr = nearest;
        double j0 = std::floor(lr);
        double phi = lr - j0;
        const std::vector<double>* a2 = &lnA2;
        std::shared_ptr<const std::vector<double>> holder;
        if (phi != 0.0) {
            holder = array_for_offset(phi);
            a2 = holder.get();
        }
        int j0i = static_cast<int>(j0);
        // sum over t-lattice index m; v index s = j0 - m carries offset phi
        double m = kNegInf;
        int lo = std::max(-E0, j0i - E0);
        int hi = std::min(E0, j0i + E0);
        if (lo > hi)
            return kNegInf;
        std::vector<double> terms;
        terms.reserve(static_cast<size_t>(hi - lo + 1));
        for (int mm = lo; mm <= hi; ++mm) {
            int s = j0i - mm;
            double w1 = lnW1[static_cast<size_t>(mm + E0)];
            double w2 = (*a2)[static_cast<size_t>(s + E0)];
            if (w1 == kNegInf || w2 == kNegInf)
                continue;
            double lnt = lnztil + mm * lnq;
            double lnv = (lr - mm) * lnq - lnztil;
            double e = -(nu + 1) * lnt - lnv + w1 + w2;
            terms.push_back(e);
            m = std::max(m, e);
        }
        if (m == kNegInf)
            return kNegInf;
        double s = 0.0;
        for (double e : terms)
            if (e - m > -745.0)
                s += std::exp(e - m);
        return lnN + nu * lnu + m + std::log(s);
    }
};

std::shared_ptr<const RadialKernel> kernel_for(const QContext& ctx) {
    static std::mutex reg_mutex;
    static std::map<double, std::shared_ptr<const RadialKernel>> registry;
    std::lock_guard<std::mutex> lock(reg_mutex);
    auto it = registry.find(ctx.q);
    if (it != registry.end())
        return it->second;
    auto k = std::make_shared<const RadialKernel>(ctx.q);
    registry[ctx.q] = k;
    return k;
}

template <typename T>
T symmetric_bracket(T q, int n) {
    if (q == 1)
        return T(n);
    return (pow(q, n) - pow(q, -n)) / (q - 1 / q);
}

template <typename T>
T qbessel_j_series(T q, int nu, T x, T tol, int max_terms, bool& sign_trouble) {
    T sq = sqrt(q);
    T c = sq + 1 / sq;
    T y = x / (sq * c);
    // leading term y^nu / [nu]!
    T term = 1;
    for (int n = 1; n <= nu; ++n)
        term *= y / symmetric_bracket(q, n);
    T sum = term;
    sign_trouble = false;
    using std::abs;
    T prev_mag = abs(term) + 1;
    for (int k = 1; k <= max_terms; ++k) {
        T bk = symmetric_bracket(q, k);
        T bnk = symmetric_bracket(q, nu + k);
        T prev = sum;
        term *= -y * y / (bk * bnk);
        sum += term;
        if ((prev > 0) != (sum > 0) && prev != 0 && sum != 0)
            sign_trouble = true;
        T mag = abs(term);
        // the alternating tail is bounded by the first omitted term once the
        // magnitudes decrease
        if (mag < prev_mag && mag <= tol * std::max(T(abs(sum)), T(1e-300)))
            return sum;
        prev_mag = mag;
    }
    throw Error(errc::non_convergence, "q-Bessel J series did not converge");
}

} // namespace

double qderivative(const QContext& ctx, const std::function<double(double)>& f, double x) {
    if (x == 0.0)
        throw Error(errc::division_by_zero, "symmetric q-derivative undefined at x = 0");
    if (ctx.q == 1.0)
        throw Error(errc::division_by_zero, "q-derivative degenerates at q = 1");
    double q = ctx.q;
    return (f(q * x) - f(x / q)) / ((q - 1.0 / q) * x);
}

double qintegral(const QContext& ctx, const std::function<double(double)>& f, double upper,
                 double base) {
    double bse = resolve_base(ctx, base);
    if (!(upper > 0.0))
        throw Error(errc::domain, "upper limit must be positive");
    double pref = 1.0 / bse - bse;
    double sum = 0.0;
    int quiet = 0;
    int k_max = std::max(256, 8 * ctx.lattice_depth);
    double last = 0.0;
    // a geometrically decaying tail past the stopping point sums to about
    // term / (1 - base^2), so tighten the per-term cutoff accordingly
    const double tail_factor = 1.0 - bse * bse;
    for (int k = 0; k < k_max; ++k) {
        double t = upper * std::pow(bse, 2 * k + 1);
        double term = pref * t * f(t);
        sum += term;
        last = std::fabs(term);
        if (last <= ctx.series_tol * tail_factor * std::max(std::fabs(sum), 1e-300)) {
            if (++quiet >= 3)
                return sum;
        } else {
            quiet = 0;
        }
    }
    if (last > ctx.series_tol * std::max(std::fabs(sum), 1e-300))
        throw Error(errc::tail_not_converged, "finite q-integral tail above tolerance");
    return sum;
}

double qintegral_inf(const QContext& ctx, const std::function<double(double)>& f, double base) {
    double bse = resolve_base(ctx, base);
    double pref = 1.0 / bse - bse;
    // March outward from the anchor in each direction until three consecutive
    // shells fall below tolerance; lattice_depth sets the scale of the cap.
    int cap = std::max(1200, 20 * ctx.lattice_depth);
    double sum = 0.0;
    for (int dir = 0; dir < 2; ++dir) {
        int quiet = 0;
        bool converged = false;
        for (int i = 0; i <= cap; ++i) {
            if (dir == 1 && i == 0)
                continue; // anchor shell already counted
            int k = dir == 0 ? i : -i;
            double u = std::pow(bse, k);
            double term = pref * u * f(u);
            sum += term;
            if (std::fabs(term) <= ctx.series_tol * std::max(std::fabs(sum), 1e-300)) {
                if (++quiet >= 3 && i >= ctx.lattice_depth) {
                    converged = true;
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        if (!converged)
            throw Error(errc::tail_not_converged,
                        "bilateral q-integral still contributing at the lattice edge");
    }
    return sum;
}

double qbessel_j(const QContext& ctx, int nu, double x, bool force_extended) {
    if (nu < 0)
        throw Error(errc::domain, "q-Bessel order must be nonnegative");
    if (x == 0.0)
        return nu == 0 ? 1.0 : 0.0;
    if (!force_extended) {
        bool trouble = false;
        double v = qbessel_j_series<double>(ctx.q, nu, x, ctx.series_tol, ctx.max_terms, trouble);
        if (!trouble)
            return v;
    }
    using mp = boost::multiprecision::cpp_bin_float_50;
    bool trouble = false;
    mp v = qbessel_j_series<mp>(mp(ctx.q), nu, mp(x), mp(ctx.series_tol) * mp(1e-20),
                                ctx.max_terms, trouble);
    return static_cast<double>(v);
}

double log_qbessel_k(const QContext& ctx, int nu, double x) {
    if (nu < 0)
        throw Error(errc::domain, "kernel order must be nonnegative");
    if (!(x > 0.0))
        throw Error(errc::domain, "kernel argument must be positive");
    return kernel_for(ctx)->eval_log(nu, x);
}

double qbessel_k(const QContext& ctx, int nu, double x) {
    double l = log_qbessel_k(ctx, nu, x);
    return l == kNegInf ? 0.0 : std::exp(l);
}

} // namespace qcat
