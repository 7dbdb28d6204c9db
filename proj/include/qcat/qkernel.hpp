#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qcat {

// Error codes shared by every module. A single exception type keeps the CLI
// exit-code mapping trivial.
enum class errc {
    domain,                  // bad argument (negative n, q out of range, ...)
    non_convergence,         // series cap reached before the tail bound
    no_zero_found,           // zeta bracketing failed (e.g. q = 1)
    division_by_zero,        // q-derivative at x = 0 or q = 1
    tail_not_converged,      // q-lattice sum still contributing at the cap
    empty_support,           // reserved (see qbessel_k notes)
    overflow,                // factorial overflow with log fallback disabled
    truncation_insufficient, // state tail weight above tolerance at n_max
    odd_at_zero,             // odd cat state undefined at xi = 0
    route_mismatch,          // two independent evaluation routes disagree
    quadrature_not_converged // angular projection not resolution-independent
};

class Error : public std::runtime_error {
  public:
    Error(errc c, const std::string& what) : std::runtime_error(what), code(c) {}
    errc code;
};

enum class Base { q, sqrt_q };

// Cached per-base [n] and [n]! tables.
struct QNumberTable {
    double base = 1.0;
    std::vector<double> values;     // [n]
    std::vector<double> factorials; // [n]!
    std::vector<double> log_factorials;

    static QNumberTable build(double base, int n_max);
};

namespace detail {
struct ContextCache; // defined in qkernel.cpp; shared by qcalculus internals
}

// Deformation parameter plus evaluation policy, threaded through everything.
// Immutable after construction; copies share one lazily-populated cache.
struct QContext {
    double q;
    double series_tol;
    int max_terms;
    int lattice_depth;

    explicit QContext(double q_, double series_tol_ = 1e-12, int max_terms_ = 4000,
                      int lattice_depth_ = 60);

    std::shared_ptr<detail::ContextCache> cache;
};

double base_value(const QContext& ctx, Base b);

// Symmetric bracket (b^n - b^-n)/(b - b^-1); exactly n at b = 1.
double qnumber(const QContext& ctx, long n, Base base = Base::q);

// [n][n-1]...[1]; throws errc::overflow if not representable.
double qfactorial(const QContext& ctx, long n, Base base = Base::q);

// log([n]!) — overflow-safe companion for large n.
double log_qfactorial(const QContext& ctx, long n, Base base = Base::q);

// Piecewise q-exponential: series sum above -zeta, exactly 0 at and below it.
double qexp(const QContext& ctx, double x);

// Even-index and odd-index halves of the q-exponential series.
std::pair<double, double> qcosh_qsinh(const QContext& ctx, double x);

// Largest zero -zeta of the q-exponential, located by outward bracketing and
// bisection. Cached per context. Throws errc::no_zero_found at q = 1.
double find_zeta(const QContext& ctx);

} // namespace qcat
