#pragma once

#include "qcat/qkernel.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace qcat {

// Dense real matrix on the flat two-mode basis |m,n> -> m*(n_max+1)+n.
// All generator matrix elements are real, so states carry the complex parts.
struct LinearOperator {
    std::string label;
    int charge_shift = 0; // change in m - n under the operator's action
    int side = 0;         // n_max + 1
    int dim = 0;          // side * side
    std::vector<double> a; // row-major dim x dim

    double& at(int i, int j) { return a[static_cast<size_t>(i) * dim + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * dim + j]; }
};

// Matrix helpers (zero-skipping multiply keeps banded products cheap).
LinearOperator matmul(const LinearOperator& lhs, const LinearOperator& rhs);
LinearOperator matadd(const LinearOperator& lhs, const LinearOperator& rhs, double sign = 1.0);
LinearOperator adjoint(const LinearOperator& op);

struct TruncatedSpace {
    int n_max = 0;
    int dim = 0; // (n_max + 1)^2

    int index(int m, int n) const { return m * (n_max + 1) + n; }
    std::pair<int, int> modes(int idx) const { return {idx / (n_max + 1), idx % (n_max + 1)}; }

    LinearOperator a1, a1d, a2, a2d;  // ladder operators, both modes
    LinearOperator n1, n2, charge;    // number operators and Q = N1 - N2
    LinearOperator k_minus, k_plus, k0;
};

// Ladder matrices carry sqrt([n]) entries; K_- = a1 a2, K_+ = a1^+ a2^+,
// K_0 = (N1 + N2 + 1)/2 are assembled as matrix products/sums.
TruncatedSpace build_space(const QContext& ctx, int n_max);

struct TwoModeState {
    int n_max = 0;
    std::vector<std::complex<double>> coeff; // flat basis, size (n_max+1)^2
    std::optional<long> charge;              // fixed-sector tag m - n = charge
    bool truncation_warning = false;

    int index(int m, int n) const { return m * (n_max + 1) + n; }
    double norm() const;
};

// Matrix-vector product; the charge tag follows the operator's charge shift.
// Sets truncation_warning when the input has weight above tail_tol in the top
// two shells (m or n > n_max - 2), where truncated matrices are unfaithful.
TwoModeState apply(const LinearOperator& op, const TwoModeState& s, double tail_tol = 1e-12);

// Rotate the global phase so the leading nonzero coefficient is real positive.
void canonicalize(TwoModeState& s);

// Max elementwise deviations of the defining commutation relations, measured
// on the interior block (all of m, n <= n_max - 2) where truncation is exact.
// Each deviation is taken relative to the size of the cancelling operator
// products (floored at 1), since at small q the q-bracket entries span many
// orders of magnitude.
struct CommutatorReport {
    double heisenberg_weyl = 0.0; // a a^+ - q a^+ a = q^(-N), both modes
    double number_ladder = 0.0;   // [N, a^+] = a^+, [N, a] = -a
    double su11 = 0.0;            // [K+, K-] = -[2K0], [K0, K+-] = +-K+-
    double charge_pair = 0.0;     // [Q, a1 a2] = 0, exact at any truncation

    double worst() const;
};

CommutatorReport commutator_suite(const QContext& ctx, const TruncatedSpace& space);

} // namespace qcat
