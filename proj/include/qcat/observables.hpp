#pragma once

#include "qcat/qkernel.hpp"
#include "qcat/states.hpp"

#include <string>
#include <vector>

namespace qcat {

enum class QuadratureFamily { su11, single_mode_1, single_mode_2, two_mode };

struct QuadratureReport {
    QuadratureFamily family = QuadratureFamily::su11;
    double variance1 = 0.0; // closed form
    double variance2 = 0.0;
    double fock_variance1 = 0.0; // truncated Fock-space route
    double fock_variance2 = 0.0;
    double bound = 0.0; // right-hand side of the squeezing inequality
    bool squeezed1 = false;
    bool squeezed2 = false;
};

// (tanh-bar, coth-bar) of the parity-split sector series at x = |xi|^2.
// Throws division_by_zero at x = 0, where coth-bar diverges.
std::pair<double, double> hyperbolic_ratios(const QContext& ctx, double xi_sq, long charge);

// Pair-quadrature variances. theta is the coherence phase (arg xi), entering
// the closed forms through cos 2*theta. Every report cross-checks the closed
// form against the truncated Fock-space route and throws route_mismatch on
// disagreement beyond 10 * series_tol.
QuadratureReport su11_variances(const QContext& ctx, const CoherentFamilySpec& spec, double theta,
                                int n_max = 40);

// Individual-mode quadratures (mode is 1 or 2); never squeezed for these
// state families.
QuadratureReport single_mode_variances(const QContext& ctx, const CoherentFamilySpec& spec,
                                       int mode, int n_max = 40);

// Symmetric two-mode quadratures built from the mode sums.
QuadratureReport two_mode_variances(const QContext& ctx, const CoherentFamilySpec& spec,
                                    int n_max = 40);

// Normalized pair correlation <(a1+ a2+)^2 (a1 a2)^2> / <a1+ a2+ a1 a2>^2.
// Closed forms: coth-bar^2 (even), tanh-bar^2 (odd), exactly 1 (full).
double correlation_g(const QContext& ctx, const CoherentFamilySpec& spec, int n_max = 40);

struct CorrelationReport {
    double closed = 0.0;
    double fock = 0.0;
    bool antibunched = false; // g < 1
};

// Same quantity with both evaluation routes reported individually.
CorrelationReport correlation_routes(const QContext& ctx, const CoherentFamilySpec& spec,
                                     int n_max = 40);

enum class ScanPredicate { coth_bar_lt_1, j_negative, su11_squeezed };

std::string predicate_name(ScanPredicate p);

struct ScanInterval {
    double lo = 0.0;
    double hi = 0.0;
};

struct ScanReport {
    ScanPredicate predicate = ScanPredicate::j_negative;
    double q = 0.0;
    long charge = 0;
    std::vector<ScanInterval> intervals; // disjoint, sorted
    double endpoint_tol = 1e-4;
};

// Samples the predicate's underlying continuous function on a uniform |xi|
// grid, brackets every sign change, and refines endpoints by bisection.
// parity and theta only affect the su11_squeezed predicate.
ScanReport squeezing_scan(const QContext& ctx, long charge, ScanPredicate predicate, double lo,
                          double hi, double resolution = 1e-2, Parity parity = Parity::odd,
                          double theta = 1.5707963267948966);

} // namespace qcat
