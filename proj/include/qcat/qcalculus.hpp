#pragma once

#include "qcat/qkernel.hpp"

#include <functional>

namespace qcat {

// Symmetric q-difference quotient (f(qx) - f(x/q)) / ((q - 1/q) x).
// Throws errc::division_by_zero at x = 0 or q = 1.
double qderivative(const QContext& ctx, const std::function<double(double)>& f, double x);

// Jackson integral on [0, upper]: lattice points upper*base^(2k+1), k >= 0.
// base defaults to ctx.q when passed as 0.
double qintegral(const QContext& ctx, const std::function<double(double)>& f, double upper,
                 double base = 0.0);

// Bilateral Jackson integral on (0, inf): lattice points base^k over
// k in [-lattice_depth, lattice_depth]. Signals errc::tail_not_converged when
// the outermost shells still contribute above series_tol.
double qintegral_inf(const QContext& ctx, const std::function<double(double)>& f,
                     double base = 0.0);

// Alternating q-Bessel series J_nu(q, x). Automatically re-evaluates at
// extended precision near sign changes; force_extended skips the heuristic.
double qbessel_j(const QContext& ctx, int nu, double x, bool force_extended = false);

// Radial kernel K_nu(q, x) of the modified-Bessel type, realized through a
// calibrated positive product-exponential kernel so that
//   ([2]_sqrt(q))^2 * integral d_sqrt(q) u  u^(2p+nu+1) K_nu(q, [2]_sqrt(q) u)
//     = [nu+p]! [p]!
// holds on the bilateral lattice. Strictly positive for x > 0.
double qbessel_k(const QContext& ctx, int nu, double x);

// log K_nu(q, x); safe where the kernel underflows double range.
double log_qbessel_k(const QContext& ctx, int nu, double x);

} // namespace qcat
