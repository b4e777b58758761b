#pragma once

#include <vector>

#include "qadvlab/cmatrix.hpp"

namespace qadvlab::qmath {

struct EighResult {
    std::vector<double> eigenvalues; // ascending
    CMatrix eigenvectors;            // columns, unitary
};

// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi.
// M = V diag(lambda) V^dag with reconstruction error <= 1e-10 * max(1, ||M||_F).
EighResult eigh(const HermitianMatrix& m);

// (sum |lambda_i|^r)^(1/r); max |lambda_i| for r = inf.
double schatten_norm(const HermitianMatrix& m, const SchattenOrder& r);
double schatten_norm_from_eigs(const std::vector<double>& eigs, const SchattenOrder& r);

// r/(r-1), with 1 <-> inf.
SchattenOrder dual_order(const SchattenOrder& r);

// The Hoelder-equality observable: A sharing M's eigenbasis with ||A||_r <= b
// and Tr(A M) = b * ||M||_{r/(r-1)}.
HermitianMatrix holder_extremizer(const HermitianMatrix& m, const SchattenOrder& r, double b);

// Checks hermiticity, unit trace, PSD (in that order) within tol; returns the
// validated density matrix or throws naming the first violated invariant.
DensityMatrix validate_density(const CMatrix& m, double tol);

inline DensityMatrix validate_density(const CMatrix& m) { return validate_density(m, tols().psd); }

// Kronecker product; errors when the output dimension exceeds the cap.
CMatrix kron(const CMatrix& a, const CMatrix& b, std::size_t dim_cap = tols().dim_cap);

} // namespace qadvlab::qmath
