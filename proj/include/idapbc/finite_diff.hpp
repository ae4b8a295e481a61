#pragma once

#include "idapbc/fields.hpp"
#include "idapbc/types.hpp"

#include <functional>

namespace idapbc {

/// Central-difference step, scaled per coordinate: h_i = h0 * (1 + |q_i|).
inline double fd_step(double qi, double h0 = 1e-6) { return h0 * (1.0 + std::abs(qi)); }

/// Central-difference gradient of a scalar function.
/// Component i is (f(q + h_i e_i) - f(q - h_i e_i)) / (2 h_i).
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& q, double h);

/// Variant with the per-coordinate scaled step h_i = 1e-6 (1 + |q_i|).
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& q);

/// Central-difference Jacobian of a vector-valued map; column i is the
/// central difference in direction e_i.
Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& q, double h);
Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& q);

/// Central-difference d/dq_i of a matrix-valued map.
Mat fd_matrix_partial(const std::function<Mat(const Vec&)>& f, const Vec& q, Index i, double h);
Mat fd_matrix_partial(const std::function<Mat(const Vec&)>& f, const Vec& q, Index i);

/// Finite-difference Hessian of a scalar field, built from its analytic
/// gradient (used for minimum verification).
Mat fd_hessian_of_gradient(const ScalarField& f, const Vec& q);

/// Worst relative mismatch between a field's analytic derivative and the
/// central-difference oracle at one probe point. Relative scale is
/// max(1, |analytic|_inf).
double fd_check_scalar(const ScalarField& f, const Vec& q);
double fd_check_matrix(const MatrixField& f, const Vec& q);
double fd_check_vector(const VectorField& f, const Vec& q);
double fd_check(const NamedField& f, const Vec& q);

}  // namespace idapbc
