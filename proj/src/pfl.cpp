#include "idapbc/pfl.hpp"

#include "idapbc/finite_diff.hpp"
#include "idapbc/linalg.hpp"

namespace idapbc {

namespace {

Mat inverse_of(const Mat& a, const char* what) {
    Eigen::FullPivLU<Mat> lu(a);
    if (!lu.isInvertible()) throw SingularMatrixError(what);
    return lu.inverse();
}

/// s x s Jacobian of q_u -> m_uu^-1(q_u) p_u at frozen p_u.
Mat jac_muuinv_pu(const PartitionedSystem& ps, const Vec& q_u, const Vec& p_u) {
    const Mat muu_inv = inverse_of(ps.m_uu.value(q_u), "pfl: singular m_uu");
    Mat jac(ps.s, ps.s);
    for (Index j = 0; j < ps.s; ++j)
        jac.col(j) = -muu_inv * ps.m_uu.partial(q_u, j) * muu_inv * p_u;
    return jac;
}

/// m x s Jacobian of q_u -> m_au(q_u) m_uu^-1(q_u) p_u at frozen p_u.
Mat jac_mau_muuinv_pu(const PartitionedSystem& ps, const Vec& q_u, const Vec& p_u) {
    const Mat muu_inv = inverse_of(ps.m_uu.value(q_u), "pfl: singular m_uu");
    const Mat mau = ps.m_au.value(q_u);
    Mat jac(ps.m, ps.s);
    for (Index j = 0; j < ps.s; ++j) {
        const Mat dmuu_inv = -muu_inv * ps.m_uu.partial(q_u, j) * muu_inv;
        jac.col(j) = (ps.m_au.partial(q_u, j) * muu_inv + mau * dmuu_inv) * p_u;
    }
    return jac;
}

/// n x n matrix with row i = ((d_i A) p)'; A given by value/partial closures.
Mat nabla_transpose(const MatrixField& a, const Vec& q, const Vec& p) {
    Mat out(q.size(), q.size());
    for (Index i = 0; i < q.size(); ++i) out.row(i) = (a.partial(q, i) * p).transpose();
    return out;
}

/// The m x s momentum block shared by the control, Lambda and Delta_1:
///   k_u K_k m_au m_uu^-1 J'[m_uu^-1 p_u] - 2 k_u K_k J[m_au m_uu^-1 p_u] m_uu^-1.
Mat lambda_inner_block(const PartitionedSystem& ps, const GainSet& g, const Vec& q_u,
                       const Vec& p_u) {
    const Mat muu_inv = inverse_of(ps.m_uu.value(q_u), "pfl: singular m_uu");
    const Mat mau = ps.m_au.value(q_u);
    return g.k_u * g.K_k * mau * muu_inv * jac_muuinv_pu(ps, q_u, p_u).transpose() -
           2.0 * g.k_u * g.K_k * jac_mau_muuinv_pu(ps, q_u, p_u) * muu_inv;
}

MatrixField mtilde_field(const PartitionedSystem& ps) {
    using namespace fields;
    const MatrixField muu_full = lift(ps.m_uu, ps.m, ps.s, ps.n());
    return block2x2(constant(Mat::Identity(ps.m, ps.m)),
                    constant(Mat::Zero(ps.m, ps.s)),
                    constant(Mat::Zero(ps.s, ps.m)), muu_full);
}

}  // namespace

MechanicalSystem pfl_system(const PartitionedSystem& ps) {
    using namespace fields;
    const Index n = ps.n();
    MechanicalSystem sys;
    sys.n = n;
    sys.m = ps.m;
    sys.inertia = mtilde_field(ps);
    sys.potential = lift(ps.v_u, ps.m, ps.s, n);
    const MatrixField mau_full = lift(ps.m_au, ps.m, ps.s, n);
    sys.input_map = vstack(constant(Mat::Identity(ps.m, ps.m)),
                           scale(-1.0, transpose(mau_full)));
    sys.annihilator = hstack(transpose(mau_full), constant(Mat::Identity(ps.s, ps.s)));
    return sys;
}

Mat k_matrix(const PartitionedSystem& ps, const GainSet& g, const Vec& q_u) {
    const Mat mau = ps.m_au.value(q_u);
    const Mat muu_inv = inverse_of(ps.m_uu.value(q_u), "k_matrix: singular m_uu");
    return g.k_e * Mat::Identity(ps.m, ps.m) + g.k_a * g.K_k +
           g.k_u * g.K_k * mau * muu_inv * mau.transpose();
}

MatrixField md_inv_field(const PartitionedSystem& ps, const GainSet& g) {
    using namespace fields;
    const MatrixField muu_inv = inverse(ps.m_uu);
    const MatrixField x_blk =
        scale(-g.k_a * g.k_u, multiply(g.K_k, multiply(ps.m_au, muu_inv)));
    const MatrixField y_blk =
        add(scale(g.k_e * g.k_u, muu_inv),
            scale(g.k_u * g.k_u,
                  multiply(muu_inv,
                           multiply(transpose(ps.m_au),
                                    multiply(g.K_k, multiply(ps.m_au, muu_inv))))));
    const Mat a11 = g.k_e * g.k_a * Mat::Identity(ps.m, ps.m) + g.k_a * g.k_a * g.K_k;
    const MatrixField over_qu = block2x2(constant(a11), x_blk, transpose(x_blk), y_blk);
    return lift(over_qu, ps.m, ps.s, ps.n());
}

Mat md_inv_pfl(const PartitionedSystem& ps, const GainSet& g, const Vec& q_u) {
    Vec q = Vec::Zero(ps.n());
    q.tail(ps.s) = q_u;
    return md_inv_field(ps, g).value(q);
}

ScalarField vd_field(const PartitionedSystem& ps, const GainSet& g) {
    ScalarField f;
    const Index m = ps.m, s = ps.s;
    f.value = [ps, g, m, s](const Vec& q) {
        const Vec q_a = q.head(m), q_u = q.tail(s);
        const Vec r = g.k_a * q_a + g.k_u * ps.v_n.value(q_u);
        return g.k_e * g.k_u * ps.v_u.value(q_u) + 0.5 * r.dot(g.K_I * r);
    };
    f.gradient = [ps, g, m, s](const Vec& q) {
        const Vec q_a = q.head(m), q_u = q.tail(s);
        const Vec r = g.k_a * q_a + g.k_u * ps.v_n.value(q_u);
        Vec grad(m + s);
        grad.head(m) = g.k_a * (g.K_I * r);
        grad.tail(s) = g.k_e * g.k_u * ps.v_u.gradient(q_u) +
                       g.k_u * ps.v_n.jacobian(q_u).transpose() * (g.K_I * r);
        return grad;
    };
    return f;
}

double vd_pfl(const PartitionedSystem& ps, const GainSet& g, const Vec& q) {
    return vd_field(ps, g).value(q);
}

Vec pfl_control(const PartitionedSystem& ps, const GainSet& g, const State& x) {
    const Index m = ps.m, s = ps.s;
    const Vec q_a = x.q.head(m), q_u = x.q.tail(s);
    const Vec p_a = x.p.head(m), p_u = x.p.tail(s);
    const Mat mau = ps.m_au.value(q_u);
    const Mat muu_inv = inverse_of(ps.m_uu.value(q_u), "pfl_control: singular m_uu");
    const Mat k = k_matrix(ps, g, q_u);
    Eigen::FullPivLU<Mat> klu(k);
    if (!klu.isInvertible())
        throw GainConditionError("pfl_control: K(q_u) is singular at the evaluation point");

    const Vec r = g.k_a * q_a + g.k_u * ps.v_n.value(q_u);
    const Vec bracket =
        g.k_u * g.K_k * mau * muu_inv * ps.v_u.gradient(q_u) + g.K_I * r +
        0.5 * g.k_u * g.K_k * mau * muu_inv *
            (jac_muuinv_pu(ps, q_u, p_u).transpose() * p_u) -
        g.k_u * g.K_k * (jac_mau_muuinv_pu(ps, q_u, p_u) * (muu_inv * p_u));
    const Vec y = g.k_a * p_a - g.k_u * mau * muu_inv * p_u;
    return -klu.solve(bracket) - g.K_P * k.transpose() * y;
}

ShapingTerms lambda_shaping_terms(const PartitionedSystem& ps, const GainSet& g, const State& x) {
    const Index m = ps.m, s = ps.s, n = ps.n();
    const Vec q_u = x.q.tail(s);
    const Vec p_u = x.p.tail(s);

    const MatrixField mdinv_f = md_inv_field(ps, g);
    const MatrixField mt_f = mtilde_field(ps);
    const Mat mdinv = mdinv_f.value(x.q);
    const Mat mt_inv = inverse_of(mt_f.value(x.q), "lambda_shaping_terms: singular M-tilde");
    const Mat k = k_matrix(ps, g, q_u);
    Eigen::FullPivLU<Mat> klu(k);
    if (!klu.isInvertible()) throw GainConditionError("lambda_shaping_terms: K(q_u) is singular");

    Mat gt(n, m);
    gt.topRows(m) = Mat::Identity(m, m);
    gt.bottomRows(s) = -ps.m_au.value(q_u).transpose();

    Mat inner = Mat::Zero(m, n);
    inner.rightCols(s) = lambda_inner_block(ps, g, q_u, p_u);

    // d/dq_i M-tilde^-1 = -Mt^-1 (d_i Mt) Mt^-1, rows of the transposed Jacobian
    MatrixField mt_inv_partials;
    mt_inv_partials.rows = n;
    mt_inv_partials.cols = n;
    mt_inv_partials.value = [mt_f](const Vec& q) {
        return inverse_of(mt_f.value(q), "lambda_shaping_terms: singular M-tilde");
    };
    mt_inv_partials.partial = [mt_f](const Vec& q, Index i) {
        const Mat mi = inverse_of(mt_f.value(q), "lambda_shaping_terms: singular M-tilde");
        return (-mi * mt_f.partial(q, i) * mi).eval();
    };

    ShapingTerms d;
    d.d1 = -mdinv * gt * klu.solve(inner);
    d.d2 = -mdinv * nabla_transpose(mt_inv_partials, x.q, x.p);
    d.d3 = mt_inv * nabla_transpose(mdinv_f, x.q, x.p);
    return d;
}

Mat pfl_lambda(const PartitionedSystem& ps, const GainSet& g, const State& x) {
    const Index m = ps.m, s = ps.s, n = ps.n();
    const ShapingTerms d = lambda_shaping_terms(ps, g, x);
    const Mat mdinv = md_inv_field(ps, g).value(x.q);
    const Mat md = inverse_of(mdinv, "pfl_lambda: singular M_d^-1");
    Mat gt(n, m);
    gt.topRows(m) = Mat::Identity(m, m);
    gt.bottomRows(s) = -ps.m_au.value(x.q.tail(s)).transpose();
    return 0.5 * md * (d.d1 + d.d2 + d.d3) * md - gt * g.K_P * gt.transpose();
}

Vec y_n(const PartitionedSystem& ps, const GainSet& g, const State& x) {
    const Vec q_u = x.q.tail(ps.s);
    const Vec p_a = x.p.head(ps.m), p_u = x.p.tail(ps.s);
    const Mat muu_inv = inverse_of(ps.m_uu.value(q_u), "y_n: singular m_uu");
    return g.k_a * p_a - g.k_u * ps.m_au.value(q_u) * muu_inv * p_u;
}

Mat input_factorization_residual(const PartitionedSystem& ps, const GainSet& g, const Vec& q_u) {
    const Index m = ps.m, s = ps.s, n = ps.n();
    const Mat mau = ps.m_au.value(q_u);
    const Mat muu_inv = inverse_of(ps.m_uu.value(q_u), "input_factorization_residual: singular m_uu");
    const Mat mdinv = md_inv_pfl(ps, g, q_u);
    Mat gt(n, m);
    gt.topRows(m) = Mat::Identity(m, m);
    gt.bottomRows(s) = -mau.transpose();
    Mat stacked(n, m);
    stacked.topRows(m) = g.k_a * Mat::Identity(m, m);
    stacked.bottomRows(s) = -g.k_u * muu_inv * mau.transpose();
    return mdinv * gt - stacked * k_matrix(ps, g, q_u);
}

double workless_shaping_residual(const PartitionedSystem& ps, const GainSet& g, const State& x) {
    const ShapingTerms d = lambda_shaping_terms(ps, g, x);
    return x.p.dot((d.d1 + d.d2 + d.d3) * x.p);
}

TargetDynamics pfl_target(const PartitionedSystem& ps, const GainSet& g,
                              Vec q_star, std::vector<Index> min_coords) {
    TargetDynamics tgt;
    tgt.md = fields::inverse(md_inv_field(ps, g));
    tgt.vd = vd_field(ps, g);
    tgt.lambda = [ps, g](const State& x) { return pfl_lambda(ps, g, x); };
    tgt.q_star = std::move(q_star);
    tgt.min_coords = std::move(min_coords);
    return tgt;
}

namespace {

template <typename Fn>
void for_each_grid_point(const Vec& lo, const Vec& hi, int grid, Fn&& fn) {
    const Index s = lo.size();
    std::vector<int> idx(static_cast<std::size_t>(s), 0);
    Vec point(s);
    while (true) {
        for (Index d = 0; d < s; ++d) {
            const double t = grid > 1 ? static_cast<double>(idx[static_cast<std::size_t>(d)]) /
                                            (grid - 1)
                                      : 0.5;
            point(d) = lo(d) + t * (hi(d) - lo(d));
        }
        fn(point);
        Index d = 0;
        for (; d < s; ++d) {
            if (++idx[static_cast<std::size_t>(d)] < grid) break;
            idx[static_cast<std::size_t>(d)] = 0;
        }
        if (d == s) break;
    }
}

}  // namespace

GainConditionReport gain_condition_check(const PartitionedSystem& ps, const GainSet& g,
                                         const Vec& qu_min, const Vec& qu_max,
                                         int grid_per_dim, const Vec& q_star,
                                         const std::vector<Index>& min_coords) {
    GainConditionReport report;
    report.min_abs_det_k.value = std::numeric_limits<double>::infinity();
    report.min_mdinv_eigenvalue.value = std::numeric_limits<double>::infinity();
    bool det_positive = false, det_negative = false;
    for_each_grid_point(qu_min, qu_max, grid_per_dim, [&](const Vec& q_u) {
        const double det = k_matrix(ps, g, q_u).determinant();
        (det > 0.0 ? det_positive : det_negative) = true;
        if (std::abs(det) < report.min_abs_det_k.value)
            report.min_abs_det_k = {q_u, std::abs(det)};
        const double eig = min_eigenvalue(md_inv_pfl(ps, g, q_u));
        if (eig < report.min_mdinv_eigenvalue.value) report.min_mdinv_eigenvalue = {q_u, eig};
    });
    // a sign change of det K across the grid means a singularity inside
    report.det_ok = report.min_abs_det_k.value > 1e-8 && !(det_positive && det_negative);
    report.mdinv_ok = report.min_mdinv_eigenvalue.value > 0.0;

    const ScalarField vd = vd_field(ps, g);
    report.vd_grad_norm_at_qstar = vd.gradient(q_star).cwiseAbs().maxCoeff();
    const Mat hess = fd_hessian_of_gradient(vd, q_star);
    if (min_coords.empty()) {
        report.vd_min_hessian_eigenvalue = min_eigenvalue(hess);
    } else {
        const Index k = static_cast<Index>(min_coords.size());
        Mat sub(k, k);
        for (Index a = 0; a < k; ++a)
            for (Index b = 0; b < k; ++b)
                sub(a, b) = hess(min_coords[static_cast<std::size_t>(a)],
                                 min_coords[static_cast<std::size_t>(b)]);
        report.vd_min_hessian_eigenvalue = min_eigenvalue(sub);
    }
    report.vd_min_ok =
        report.vd_grad_norm_at_qstar <= 1e-10 && report.vd_min_hessian_eigenvalue > 0.0;
    return report;
}

PartitionedValidation validate_partitioned(const PartitionedSystem& ps, const Vec& qu_min,
                                           const Vec& qu_max, int probes, std::uint64_t seed) {
    PartitionedValidation v;
    ProbeBox box{qu_min, qu_max, Vec::Zero(0), Vec::Zero(0)};
    StateSampler sampler(box, seed);
    for (int it = 0; it < probes; ++it) {
        const Vec q_u = sampler.next_q();
        for (Index j = 0; j < ps.s; ++j) {
            const Mat dj = ps.m_au.partial(q_u, j);
            for (Index k = j + 1; k < ps.s; ++k) {
                const Mat dk = ps.m_au.partial(q_u, k);
                v.max_a4 = std::max(v.max_a4, (dj.col(k) - dk.col(j)).cwiseAbs().maxCoeff());
            }
        }
        for (Index i = 0; i < ps.m; ++i) {
            Mat row_jac(ps.s, ps.s);
            for (Index j = 0; j < ps.s; ++j)
                row_jac.col(j) = ps.m_au.partial(q_u, j).row(i).transpose();
            v.max_row_jac = std::max(
                v.max_row_jac, (row_jac - row_jac.transpose()).cwiseAbs().maxCoeff());
        }
        v.max_vn_jac = std::max(
            v.max_vn_jac,
            (ps.v_n.jacobian(q_u) + ps.m_au.value(q_u)).cwiseAbs().maxCoeff());
    }
    return v;
}

}  // namespace idapbc
