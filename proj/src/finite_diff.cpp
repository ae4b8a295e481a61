#include "idapbc/finite_diff.hpp"

namespace idapbc {

namespace {

double eval_checked(const std::function<double(const Vec&)>& f, const Vec& q) {
    const double v = f(q);
    check_finite(v, "finite-difference probe", q);
    return v;
}

}  // namespace

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& q, double h) {
    if (h <= 0.0) throw std::invalid_argument("fd_gradient: step must be positive");
    Vec grad(q.size());
    Vec probe = q;
    for (Index i = 0; i < q.size(); ++i) {
        probe(i) = q(i) + h;
        const double fp = eval_checked(f, probe);
        probe(i) = q(i) - h;
        const double fm = eval_checked(f, probe);
        probe(i) = q(i);
        grad(i) = (fp - fm) / (2.0 * h);
    }
    return grad;
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& q) {
    Vec grad(q.size());
    Vec probe = q;
    for (Index i = 0; i < q.size(); ++i) {
        const double h = fd_step(q(i));
        probe(i) = q(i) + h;
        const double fp = eval_checked(f, probe);
        probe(i) = q(i) - h;
        const double fm = eval_checked(f, probe);
        probe(i) = q(i);
        grad(i) = (fp - fm) / (2.0 * h);
    }
    return grad;
}

namespace {

Mat fd_jacobian_impl(const std::function<Vec(const Vec&)>& f, const Vec& q,
                     const std::function<double(double)>& step) {
    const Vec f0 = f(q);
    Mat jac(f0.size(), q.size());
    Vec probe = q;
    for (Index i = 0; i < q.size(); ++i) {
        const double h = step(q(i));
        probe(i) = q(i) + h;
        const Vec fp = f(probe);
        probe(i) = q(i) - h;
        const Vec fm = f(probe);
        probe(i) = q(i);
        check_finite(fp, "finite-difference probe", probe);
        check_finite(fm, "finite-difference probe", probe);
        jac.col(i) = (fp - fm) / (2.0 * h);
    }
    return jac;
}

}  // namespace

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& q, double h) {
    return fd_jacobian_impl(f, q, [h](double) { return h; });
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& q) {
    return fd_jacobian_impl(f, q, [](double qi) { return fd_step(qi); });
}

Mat fd_matrix_partial(const std::function<Mat(const Vec&)>& f, const Vec& q, Index i, double h) {
    Vec probe = q;
    probe(i) = q(i) + h;
    const Mat fp = f(probe);
    probe(i) = q(i) - h;
    const Mat fm = f(probe);
    check_finite(fp, "finite-difference probe", probe);
    check_finite(fm, "finite-difference probe", probe);
    return (fp - fm) / (2.0 * h);
}

Mat fd_matrix_partial(const std::function<Mat(const Vec&)>& f, const Vec& q, Index i) {
    return fd_matrix_partial(f, q, i, fd_step(q(i)));
}

Mat fd_hessian_of_gradient(const ScalarField& f, const Vec& q) {
    Mat hess = fd_jacobian([&f](const Vec& x) { return f.gradient(x); }, q);
    return 0.5 * (hess + hess.transpose());
}

namespace {

double rel_mismatch(const Mat& analytic, const Mat& fd) {
    const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
    return (analytic - fd).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

double fd_check_scalar(const ScalarField& f, const Vec& q) {
    const Vec analytic = f.gradient(q);
    const Vec fd = fd_gradient(f.value, q);
    return rel_mismatch(analytic, fd);
}

double fd_check_matrix(const MatrixField& f, const Vec& q) {
    double worst = 0.0;
    for (Index i = 0; i < q.size(); ++i) {
        const Mat analytic = f.partial(q, i);
        const Mat fd = fd_matrix_partial(f.value, q, i);
        worst = std::max(worst, rel_mismatch(analytic, fd));
    }
    return worst;
}

double fd_check_vector(const VectorField& f, const Vec& q) {
    const Mat analytic = f.jacobian(q);
    const Mat fd = fd_jacobian(f.value, q);
    return rel_mismatch(analytic, fd);
}

double fd_check(const NamedField& f, const Vec& q) {
    if (const auto* s = std::get_if<ScalarField>(&f.field)) return fd_check_scalar(*s, q);
    if (const auto* m = std::get_if<MatrixField>(&f.field)) return fd_check_matrix(*m, q);
    return fd_check_vector(std::get<VectorField>(f.field), q);
}

}  // namespace idapbc
