#include "idapbc/fields.hpp"

namespace idapbc::fields {

MatrixField constant(const Mat& m) {
    MatrixField f;
    f.rows = m.rows();
    f.cols = m.cols();
    f.value = [m](const Vec&) { return m; };
    f.partial = [r = m.rows(), c = m.cols()](const Vec&, Index) {
        return Mat::Zero(r, c).eval();
    };
    return f;
}

MatrixField scale(double a, const MatrixField& f) {
    MatrixField g;
    g.rows = f.rows;
    g.cols = f.cols;
    g.value = [a, f](const Vec& q) { return (a * f.value(q)).eval(); };
    g.partial = [a, f](const Vec& q, Index i) { return (a * f.partial(q, i)).eval(); };
    return g;
}

MatrixField add(const MatrixField& a, const MatrixField& b) {
    MatrixField g;
    g.rows = a.rows;
    g.cols = a.cols;
    g.value = [a, b](const Vec& q) { return (a.value(q) + b.value(q)).eval(); };
    g.partial = [a, b](const Vec& q, Index i) {
        return (a.partial(q, i) + b.partial(q, i)).eval();
    };
    return g;
}

MatrixField multiply(const MatrixField& a, const MatrixField& b) {
    MatrixField g;
    g.rows = a.rows;
    g.cols = b.cols;
    g.value = [a, b](const Vec& q) { return (a.value(q) * b.value(q)).eval(); };
    g.partial = [a, b](const Vec& q, Index i) {
        return (a.partial(q, i) * b.value(q) + a.value(q) * b.partial(q, i)).eval();
    };
    return g;
}

MatrixField multiply(const Mat& a, const MatrixField& b) { return multiply(constant(a), b); }
MatrixField multiply(const MatrixField& a, const Mat& b) { return multiply(a, constant(b)); }

MatrixField transpose(const MatrixField& a) {
    MatrixField g;
    g.rows = a.cols;
    g.cols = a.rows;
    g.value = [a](const Vec& q) { return a.value(q).transpose().eval(); };
    g.partial = [a](const Vec& q, Index i) { return a.partial(q, i).transpose().eval(); };
    return g;
}

MatrixField inverse(const MatrixField& a) {
    MatrixField g;
    g.rows = a.rows;
    g.cols = a.cols;
    g.value = [a](const Vec& q) {
        Eigen::FullPivLU<Mat> lu(a.value(q));
        if (!lu.isInvertible())
            throw SingularMatrixError("matrix field is singular at the probe point");
        return lu.inverse().eval();
    };
    // single source of truth: d_i A^-1 = -A^-1 (d_i A) A^-1
    g.partial = [a](const Vec& q, Index i) {
        Eigen::FullPivLU<Mat> lu(a.value(q));
        if (!lu.isInvertible())
            throw SingularMatrixError("matrix field is singular at the probe point");
        Mat ainv = lu.inverse();
        return (-ainv * a.partial(q, i) * ainv).eval();
    };
    return g;
}

MatrixField block2x2(const MatrixField& a11, const MatrixField& a12,
                     const MatrixField& a21, const MatrixField& a22) {
    MatrixField g;
    const Index r1 = a11.rows, r2 = a21.rows, c1 = a11.cols, c2 = a12.cols;
    g.rows = r1 + r2;
    g.cols = c1 + c2;
    g.value = [=](const Vec& q) {
        Mat m(r1 + r2, c1 + c2);
        m.topLeftCorner(r1, c1) = a11.value(q);
        m.topRightCorner(r1, c2) = a12.value(q);
        m.bottomLeftCorner(r2, c1) = a21.value(q);
        m.bottomRightCorner(r2, c2) = a22.value(q);
        return m;
    };
    g.partial = [=](const Vec& q, Index i) {
        Mat m(r1 + r2, c1 + c2);
        m.topLeftCorner(r1, c1) = a11.partial(q, i);
        m.topRightCorner(r1, c2) = a12.partial(q, i);
        m.bottomLeftCorner(r2, c1) = a21.partial(q, i);
        m.bottomRightCorner(r2, c2) = a22.partial(q, i);
        return m;
    };
    return g;
}

MatrixField vstack(const MatrixField& top, const MatrixField& bottom) {
    MatrixField g;
    g.rows = top.rows + bottom.rows;
    g.cols = top.cols;
    g.value = [top, bottom](const Vec& q) {
        Mat m(top.rows + bottom.rows, top.cols);
        m.topRows(top.rows) = top.value(q);
        m.bottomRows(bottom.rows) = bottom.value(q);
        return m;
    };
    g.partial = [top, bottom](const Vec& q, Index i) {
        Mat m(top.rows + bottom.rows, top.cols);
        m.topRows(top.rows) = top.partial(q, i);
        m.bottomRows(bottom.rows) = bottom.partial(q, i);
        return m;
    };
    return g;
}

MatrixField hstack(const MatrixField& left, const MatrixField& right) {
    MatrixField g;
    g.rows = left.rows;
    g.cols = left.cols + right.cols;
    g.value = [left, right](const Vec& q) {
        Mat m(left.rows, left.cols + right.cols);
        m.leftCols(left.cols) = left.value(q);
        m.rightCols(right.cols) = right.value(q);
        return m;
    };
    g.partial = [left, right](const Vec& q, Index i) {
        Mat m(left.rows, left.cols + right.cols);
        m.leftCols(left.cols) = left.partial(q, i);
        m.rightCols(right.cols) = right.partial(q, i);
        return m;
    };
    return g;
}

MatrixField lift(const MatrixField& inner, Index offset, Index dim, Index full_dim) {
    (void)full_dim;
    MatrixField g;
    g.rows = inner.rows;
    g.cols = inner.cols;
    g.value = [inner, offset, dim](const Vec& q) { return inner.value(q.segment(offset, dim)); };
    g.partial = [inner, offset, dim](const Vec& q, Index i) {
        if (i >= offset && i < offset + dim)
            return inner.partial(q.segment(offset, dim), i - offset);
        return Mat::Zero(inner.rows, inner.cols).eval();
    };
    return g;
}

ScalarField lift(const ScalarField& inner, Index offset, Index dim, Index full_dim) {
    ScalarField g;
    g.value = [inner, offset, dim](const Vec& q) { return inner.value(q.segment(offset, dim)); };
    g.gradient = [inner, offset, dim, full_dim](const Vec& q) {
        Vec grad = Vec::Zero(full_dim);
        grad.segment(offset, dim) = inner.gradient(q.segment(offset, dim));
        return grad;
    };
    return g;
}

VectorField lift(const VectorField& inner, Index offset, Index dim, Index full_dim) {
    VectorField g;
    g.rows = inner.rows;
    g.value = [inner, offset, dim](const Vec& q) { return inner.value(q.segment(offset, dim)); };
    g.jacobian = [inner, offset, dim, full_dim](const Vec& q) {
        Mat jac = Mat::Zero(inner.rows, full_dim);
        jac.middleCols(offset, dim) = inner.jacobian(q.segment(offset, dim));
        return jac;
    };
    return g;
}

ScalarField constant_scalar(double c) {
    ScalarField f;
    f.value = [c](const Vec&) { return c; };
    f.gradient = [](const Vec& q) { return Vec::Zero(q.size()).eval(); };
    return f;
}

ScalarField add(const ScalarField& a, const ScalarField& b) {
    ScalarField g;
    g.value = [a, b](const Vec& q) { return a.value(q) + b.value(q); };
    g.gradient = [a, b](const Vec& q) { return (a.gradient(q) + b.gradient(q)).eval(); };
    return g;
}

ScalarField scale(double a, const ScalarField& f) {
    ScalarField g;
    g.value = [a, f](const Vec& q) { return a * f.value(q); };
    g.gradient = [a, f](const Vec& q) { return (a * f.gradient(q)).eval(); };
    return g;
}

}  // namespace idapbc::fields
