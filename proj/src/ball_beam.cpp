#include "idapbc/ball_beam.hpp"

namespace idapbc {

namespace {

double r1_of(double eps, double qu) { return std::sqrt(eps + qu * qu); }
double r2_of(double eps, double qu) { return std::sqrt(2.0 * eps + qu * qu); }

Mat skew_inner(const BallBeamParams& p, const State& x) {
    const double qu = x.q(1), pa = x.p(0), pu = x.p(1);
    const double r1 = r1_of(p.eps, qu), r2 = r2_of(p.eps, qu);
    const double s12 = -qu * pu / r1 + r2 * qu * pa / (p.eps + qu * qu);
    Mat inner(2, 2);
    inner << 0.0, s12, -s12, 0.0;
    return inner;
}

Mat damping_matrix(const BallBeamParams& p, double qu) {
    const double r1 = r1_of(p.eps, qu), r2 = r2_of(p.eps, qu);
    Mat d(2, 2);
    d << p.delta * r2 + p.eps * p.K_P, p.delta * r1,
         p.delta * r1, p.delta * r2;
    return d / p.eps;
}

}  // namespace

Mat ball_beam_first_bracket(double eps, double q_u) {
    Mat m(2, 2);
    m << r2_of(eps, q_u), r1_of(eps, q_u), r1_of(eps, q_u), r2_of(eps, q_u);
    return m;
}

BallBeam ball_beam_build(const BallBeamParams& params) {
    BallBeam bb;
    bb.params = params;
    const double eps = params.eps, delta = params.delta, kg = params.K, kp = params.K_P;

    GeneralSecondOrderSystem& sys = bb.sys;
    sys.n = 2;
    sys.m = 1;
    sys.mass.rows = 2;
    sys.mass.cols = 2;
    sys.mass.value = [eps](const Vec& q) {
        Mat m = Mat::Identity(2, 2);
        m(0, 0) = std::sqrt(2.0 * (eps + q(1) * q(1)));
        return m;
    };
    sys.mass.partial = [eps](const Vec& q, Index i) {
        Mat m = Mat::Zero(2, 2);
        if (i == 1) m(0, 0) = 2.0 * q(1) / std::sqrt(2.0 * (eps + q(1) * q(1)));
        return m;
    };
    sys.g_vec.rows = 2;
    sys.g_vec.value = [](const Vec& q) {
        Vec v(2);
        v << 0.0, -std::sin(q(0));
        return v;
    };
    sys.g_vec.jacobian = [](const Vec& q) {
        Mat j = Mat::Zero(2, 2);
        j(1, 0) = -std::cos(q(0));
        return j;
    };
    sys.f_vec = [eps, delta](const State& x) {
        Vec v(2);
        v << 0.0, x.q(1) * x.p(0) * x.p(0) / (2.0 * (eps + x.q(1) * x.q(1))) - delta * x.p(1);
        return v;
    };
    Mat g_in(2, 1);
    g_in << 1.0, 0.0;
    sys.input_map = fields::constant(g_in);

    // M_d = (1/eps) [ r2 r1 ; r1 r2 ]: the exact inverse of the assigned
    // inverse metric [ r2 -r1 ; -r1 r2 ] since its determinant is eps.
    LyapunovCandidate& cand = bb.cand;
    cand.md.rows = 2;
    cand.md.cols = 2;
    cand.md.value = [eps](const Vec& q) {
        return (ball_beam_first_bracket(eps, q(1)) / eps).eval();
    };
    cand.md.partial = [eps](const Vec& q, Index i) {
        Mat out = Mat::Zero(2, 2);
        if (i == 1) {
            const double qu = q(1);
            const double d2 = qu / r2_of(eps, qu), d1 = qu / r1_of(eps, qu);
            out << d2, d1, d1, d2;
            out /= eps;
        }
        return out;
    };
    cand.vd.value = [eps, kg](const Vec& q) {
        const double b = q(0) - std::asinh(q(1) / std::sqrt(2.0 * eps)) / std::sqrt(2.0);
        return eps * std::sqrt(2.0) * (1.0 - std::cos(q(0))) + 0.5 * kg * b * b;
    };
    cand.vd.gradient = [eps, kg](const Vec& q) {
        const double b = q(0) - std::asinh(q(1) / std::sqrt(2.0 * eps)) / std::sqrt(2.0);
        Vec grad(2);
        grad(0) = eps * std::sqrt(2.0) * std::sin(q(0)) + kg * b;
        grad(1) = -kg * b / (std::sqrt(2.0) * r2_of(eps, q(1)));
        return grad;
    };
    cand.q_star = Vec::Zero(2);

    const bool qa_variant = params.cu_qa_variant;
    bb.control = [eps, delta, kg, kp, qa_variant](const State& x) {
        const double qa = x.q(0), qu = x.q(1), pa = x.p(0), pu = x.p(1);
        const double r1 = r1_of(eps, qu), r2 = r2_of(eps, qu);
        const double b = qa - std::asinh(qu / std::sqrt(2.0 * eps)) / std::sqrt(2.0);
        const double dvd_qu = -kg * b / (std::sqrt(2.0) * r2);
        const double c_a = -qu * pa / (2.0 * r2 * r1);
        const double den = qa_variant ? (eps + qa * qa) : (eps + qu * qu);
        const double c_u = -qu * pu / (2.0 * r2 * r1) + qu * pa / (2.0 * den);
        const double u = -r2 / r1 * std::sin(qa) + dvd_qu / r1 - c_a * pa - c_u * pu -
                         (delta + kp * r2) * pa + kp * r1 * pu;
        return Vec::Constant(1, u);
    };

    bb.lambda = [params](const State& x) {
        const Mat md = ball_beam_first_bracket(params.eps, x.q(1)) / params.eps;
        return (-0.5 * md * skew_inner(params, x) * md - damping_matrix(params, x.q(1))).eval();
    };

    bb.box = symmetric_box(Vec::Constant(2, 1.0), Vec::Constant(2, 1.0));
    bb.x0_q = Vec(2);
    bb.x0_q << 0.2, -0.1;
    bb.x0_p = Vec::Zero(2);

    MatrixField mdinv;
    mdinv.rows = 2;
    mdinv.cols = 2;
    mdinv.value = [eps](const Vec& q) {
        const double qu = q(1);
        Mat m(2, 2);
        m << r2_of(eps, qu), -r1_of(eps, qu), -r1_of(eps, qu), r2_of(eps, qu);
        return m;
    };
    mdinv.partial = [eps](const Vec& q, Index i) {
        Mat out = Mat::Zero(2, 2);
        if (i == 1) {
            const double qu = q(1);
            out << qu / r2_of(eps, qu), -qu / r1_of(eps, qu),
                   -qu / r1_of(eps, qu), qu / r2_of(eps, qu);
        }
        return out;
    };

    bb.fields = {
        {"mass", sys.mass},
        {"g_vec", sys.g_vec},
        {"Md", cand.md},
        {"Md_inv", mdinv},
        {"V_d", cand.vd},
    };
    return bb;
}

PdDecomposition ball_beam_pd_decomposition(const BallBeamParams& params, const State& x) {
    PdDecomposition d;
    const Mat md = ball_beam_first_bracket(params.eps, x.q(1)) / params.eps;
    d.skew_part = -0.5 * md * skew_inner(params, x) * md;
    d.damping_part = -damping_matrix(params, x.q(1));
    d.bracket = ball_beam_first_bracket(params.eps, x.q(1));
    d.bracket(0, 0) += params.eps * params.K_P / params.delta;
    Eigen::SelfAdjointEigenSolver<Mat> eig(d.bracket, Eigen::EigenvaluesOnly);
    d.min_bracket_eigenvalue = eig.eigenvalues().minCoeff();
    d.pd_ok = d.min_bracket_eigenvalue > 0.0;
    return d;
}

}  // namespace idapbc
