#pragma once

#include "qcat/qkernel.hpp"

#include <vector>

namespace qcat {

struct MomentCheckResult {
    int n = 0;
    long charge = 0;
    double computed = 0.0;
    double expected = 0.0; // [n]! [n + |charge|]!
    double relative_error = 0.0;
};

// The radial reduction of the resolution of identity: the (2n+|charge|+1)-th
// moment of the modified-Bessel kernel on the sqrt(q) lattice must equal the
// product of the two sector factorials.
MomentCheckResult radial_moment_check(const QContext& ctx, int n, long charge);

struct IdentityReport {
    long charge = 0;
    std::vector<double> diagonal; // entries for sector index 0..n_check
    double max_abs_deviation = 0.0;
    // Off-diagonal sector entries vanish identically: the angular integral is
    // performed analytically and collapses to a Kronecker delta.
};

// Diagonal matrix elements of the sector identity operator, assembled from
// the analytic angular integral and the radial moment integral.
IdentityReport resolution_of_identity(const QContext& ctx, long charge, int n_check);

} // namespace qcat
