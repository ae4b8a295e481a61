#pragma once

#include "idapbc/types.hpp"

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace idapbc {

/// Configuration-dependent scalar with an analytic gradient.
///
/// The gradient is part of the definition: finite differences are only ever
/// used as an independent oracle (see finite_diff.hpp), never as the primary
/// evaluation path.
struct ScalarField {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
};

/// Configuration-dependent matrix with analytic partials d/dq_i.
struct MatrixField {
    Index rows = 0;
    Index cols = 0;
    std::function<Mat(const Vec&)> value;
    std::function<Mat(const Vec&, Index)> partial;
};

/// Configuration-dependent vector with an analytic Jacobian (rows x dim(q)).
struct VectorField {
    Index rows = 0;
    std::function<Vec(const Vec&)> value;
    std::function<Mat(const Vec&)> jacobian;
};

namespace fields {

MatrixField constant(const Mat& m);
MatrixField scale(double a, const MatrixField& f);
MatrixField add(const MatrixField& a, const MatrixField& b);
MatrixField multiply(const MatrixField& a, const MatrixField& b);
MatrixField multiply(const Mat& a, const MatrixField& b);
MatrixField multiply(const MatrixField& a, const Mat& b);
MatrixField transpose(const MatrixField& a);

/// value = A(q)^-1, partial_i = -A^-1 (d_i A) A^-1.
MatrixField inverse(const MatrixField& a);

MatrixField block2x2(const MatrixField& a11, const MatrixField& a12,
                     const MatrixField& a21, const MatrixField& a22);
MatrixField vstack(const MatrixField& top, const MatrixField& bottom);
MatrixField hstack(const MatrixField& left, const MatrixField& right);

/// Re-index a field of a coordinate slice q[offset .. offset+dim) as a field
/// of the full configuration vector. Partials outside the slice are zero.
MatrixField lift(const MatrixField& inner, Index offset, Index dim, Index full_dim);
ScalarField lift(const ScalarField& inner, Index offset, Index dim, Index full_dim);
VectorField lift(const VectorField& inner, Index offset, Index dim, Index full_dim);

ScalarField constant_scalar(double c);
ScalarField add(const ScalarField& a, const ScalarField& b);
ScalarField scale(double a, const ScalarField& f);

}  // namespace fields

/// A named field of any kind, for registration with the finite-difference
/// oracle suite (acceptance: every analytic partial passes the FD check).
struct NamedField {
    std::string name;
    std::variant<ScalarField, MatrixField, VectorField> field;
};

using FieldRegistry = std::vector<NamedField>;

}  // namespace idapbc
