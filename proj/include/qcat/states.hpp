#pragma once

#include "qcat/fockspace.hpp"
#include "qcat/qkernel.hpp"

#include <complex>
#include <vector>

namespace qcat {

enum class Parity { even, odd, full };

// A coherent-state family member: xi = xi_modulus * exp(i xi_phase), a fixed
// integer charge (sector m - n), and the parity restriction on the series.
// normalized = false yields the bare series coefficients (no N factor), the
// form the D-algebra actions are written for.
struct CoherentFamilySpec {
    double xi_modulus = 0.0;
    double xi_phase = 0.0;
    long charge = 0;
    Parity parity = Parity::full;
    bool normalized = true;

    std::complex<double> xi() const {
        return std::polar(xi_modulus, xi_phase);
    }
};

// Sum over the parity-restricted index set of z^p / ([p]! [p+|charge|]!).
// The inverse squares of the normalization factors; also their analytic
// continuation to complex argument used by the closed-form overlap.
std::complex<double> charge_series(const QContext& ctx, std::complex<double> z, long charge,
                                   Parity parity);

// The six normalization factors: the charge family (full/even/odd series in
// |xi|^2) and the single-mode family (e_q / cosh_q / sinh_q in |xi|^2).
struct NormalizationSet {
    double charge_full = 0.0;
    double charge_even = 0.0;
    double charge_odd = 0.0; // infinity at xi = 0
    double single_full = 0.0;
    double single_even = 0.0;
    double single_odd = 0.0; // infinity at xi = 0
};

NormalizationSet normalizations(const QContext& ctx, double xi_sq, long charge);

// Pair-annihilation eigenstate on the fixed-charge sector (parity = full).
TwoModeState charge_coherent(const QContext& ctx, const CoherentFamilySpec& spec,
                             const TruncatedSpace& space);

// Even/odd charge cat states (parity = even or odd; odd requires xi != 0).
TwoModeState even_odd_charge_coherent(const QContext& ctx, const CoherentFamilySpec& spec,
                                      const TruncatedSpace& space);

struct SingleModeState {
    std::vector<std::complex<double>> coeff; // index n = 0..n_max
    bool truncation_warning = false;
};

SingleModeState single_mode_coherent(const QContext& ctx, std::complex<double> xi, Parity parity,
                                     int n_max = 40);

// Inner product <s1|s2>, computed both as a truncated coefficient sum and via
// the closed-form normalization-function expression; throws route_mismatch if
// the two routes differ by more than 10 * series_tol.
std::complex<double> overlap(const QContext& ctx, const CoherentFamilySpec& s1,
                             const CoherentFamilySpec& s2, int n_max = 40);

// Residuals of the even/odd decomposition of the full state, the scalar
// normalization identity, and the symmetric/antisymmetric combinations.
struct DecompositionReport {
    double combination = 0.0;   // full = N (N_e^-1 even + N_o^-1 odd)
    double normalization = 0.0; // N^-2 = N_e^-2 + N_o^-2
    double symmetric = 0.0;     // even = (N_e / 2N)(full(xi) + full(-xi))
    double antisymmetric = 0.0; // odd  = (N_o / 2N)(full(xi) - full(-xi))

    double worst() const;
};

DecompositionReport decomposition_check(const QContext& ctx, std::complex<double> xi, long charge,
                                        int n_max = 40);

// U(1)-group average of a product of a full coherent mode and an even/odd
// coherent mode, projecting onto the fixed-charge sector. Reproduces the
// corresponding charge cat state at xi = xi1 * xi2 up to a global phase.
// Uses uniform angular quadrature with 64 * (1 + |charge|) nodes and verifies
// the result is node-count independent (throws quadrature_not_converged).
TwoModeState u1_project(const QContext& ctx, std::complex<double> xi1, std::complex<double> xi2,
                        long charge, Parity parity, const TruncatedSpace& space);

// Residuals of the differential-operator actions on unnormalized cat states:
// ladder shifts between neighboring charges, the K- parity swap, number-
// operator actions, the creation-operator q-derivative form, and the nested
// q-derivative form of K+ evaluated on a 5-point xi lattice.
struct DAlgebraReport {
    double lower_shift = 0.0;  // a_i mapping charge to charge -+ 1
    double raise_swap = 0.0;   // a_i mapping with parity swap and xi factor
    double kminus_swap = 0.0;  // K- = xi * (parity swap)
    double number_action = 0.0; // N_i as xi d/dxi plus charge offset
    double raise_qderiv = 0.0; // a_i^+ as a q-derivative of the series
    double kplus_qderiv = 0.0; // K+ as the nested q-derivative form

    double worst() const;
};

DAlgebraReport dalgebra_check(const QContext& ctx, long charge, double xi,
                              const TruncatedSpace& space);

} // namespace qcat
