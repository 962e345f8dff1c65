#pragma once

#include <vector>

#include "sketchsel/matrix.hpp"

namespace sketchsel {

// Eigendecomposition of a symmetric matrix. Columns of `vectors` are
// orthonormal eigenvectors, `values` is sorted descending, and each column's
// sign is fixed so its entry of largest magnitude (first such) is positive.
struct EigResult {
    DenseMatrix vectors;
    std::vector<double> values;
};

// Cyclic Jacobi rotations; converges when off(A) <= 1e-12 * ||A||_F, at most
// 100 sweeps. Input must be square and symmetric to 1e-12 relative asymmetry.
EigResult sym_eig(const DenseMatrix& a);

// Solve A X = B for symmetric positive definite A via Cholesky. A pivot below
// 1e-13 * ||A||_max is reported as a NumericError naming the pivot index;
// regularization is left to callers.
DenseMatrix solve_spd(const DenseMatrix& a, const DenseMatrix& b);

// Symmetric M with M A M = I for SPD A.
DenseMatrix inv_sqrt_spd(const DenseMatrix& a);

// Symmetric square root of a PSD matrix; eigenvalues within round-off below
// zero are clamped, genuinely negative ones raise a NumericError.
DenseMatrix psd_sqrt(const DenseMatrix& a);

// Moore-Penrose pseudoinverse via eigendecomposition of A^T A (or A A^T,
// whichever is smaller). Singular values below tol * sigma_max are zeroed.
DenseMatrix pinv(const DenseMatrix& a, double tol = 1e-12);

// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const DenseMatrix& a);

}  // namespace sketchsel
