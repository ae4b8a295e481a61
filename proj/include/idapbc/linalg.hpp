#pragma once

#include "idapbc/types.hpp"

namespace idapbc {

/// Symmetric PSD square root via eigendecomposition. Eigenvalues in
/// [-1e-10, 0) are clamped to zero; anything below throws NotPsdError
/// reporting the offending eigenvalue.
Mat psd_sqrt(const Mat& s);

/// Full-rank left annihilator of an n x m matrix with rank m: the returned
/// (n-m) x n matrix has orthonormal rows and annihilates G to machine
/// precision. For n == m the result is an empty 0 x n matrix.
Mat left_annihilator(const Mat& g);

/// Smallest eigenvalue of the symmetrized matrix.
double min_eigenvalue(const Mat& s);

bool is_spd(const Mat& s, double tol = 0.0);

/// Numerical rank from singular values (threshold relative to the largest).
Index numerical_rank(const Mat& m, double rel_tol = 1e-10);

}  // namespace idapbc
