#include "idapbc/cart_pendulum.hpp"

namespace idapbc {

namespace {

Mat inv2(const Mat& a, const char* what) {
    Eigen::FullPivLU<Mat> lu(a);
    if (!lu.isInvertible()) throw SingularMatrixError(what);
    return lu.inverse();
}

double scalar(const Mat& m) { return m(0, 0); }

}  // namespace

CartPendulumParams cart_pendulum_default_params() {
    CartPendulumParams p;
    p.cart_mass = 1.0;
    p.m = 1.0;
    p.l = 1.0;
    p.g = 9.8;
    p.gains.k_e = 0.5;
    p.gains.k_a = 1.0;
    p.gains.k_u = -8.0;
    p.gains.K_k = Mat::Constant(1, 1, 0.5);
    p.gains.K_I = Mat::Zero(1, 1);
    p.gains.K_P = Mat::Constant(1, 1, 0.1);
    return p;
}

double cart_pendulum_k(const CartPendulumParams& params, double q_u) {
    const double c = std::cos(q_u);
    return params.gains.k_e + scalar(params.gains.K_k) +
           params.gains.k_u * scalar(params.gains.K_k) * params.m * c * c;
}

CartPendulum cart_pendulum_build(const CartPendulumParams& params) {
    CartPendulum cp;
    cp.params = params;
    const double m = params.m, l = params.l, grav = params.g;
    const double ke = params.gains.k_e, ku = params.gains.k_u;
    const double kk = scalar(params.gains.K_k), kp = scalar(params.gains.K_P);

    // partitioned blocks (functions of q_u only)
    PartitionedSystem& ps = cp.ps;
    ps.m = 1;
    ps.s = 1;
    ps.m_aa = Mat::Constant(1, 1, params.cart_mass + m);
    ps.m_au.rows = 1;
    ps.m_au.cols = 1;
    ps.m_au.value = [m, l](const Vec& qu) { return Mat::Constant(1, 1, m * l * std::cos(qu(0))); };
    ps.m_au.partial = [m, l](const Vec& qu, Index) {
        return Mat::Constant(1, 1, -m * l * std::sin(qu(0)));
    };
    ps.m_uu = fields::constant(Mat::Constant(1, 1, m * l * l));
    ps.v_a = fields::constant_scalar(0.0);
    ps.v_u.value = [m, l, grav](const Vec& qu) { return m * grav * l * std::cos(qu(0)); };
    ps.v_u.gradient = [m, l, grav](const Vec& qu) {
        return Vec::Constant(1, -m * grav * l * std::sin(qu(0)));
    };
    ps.v_n.rows = 1;
    ps.v_n.value = [m, l](const Vec& qu) { return Vec::Constant(1, -m * l * std::sin(qu(0))); };
    ps.v_n.jacobian = [m, l](const Vec& qu) {
        return Mat::Constant(1, 1, -m * l * std::cos(qu(0)));
    };

    cp.sys = pfl_system(ps);

    // shaped metric and potential, written out for this system:
    //   M_d^-1 = [ k_e + K_k                 -(k_u K_k / l) cos q_u ]
    //            [ -(k_u K_k / l) cos q_u     k_e k_u/(m l^2) + (k_u^2 K_k/l^2) cos^2 q_u ]
    //   V_d = k_e k_u m g l cos q_u
    MatrixField mdinv;
    mdinv.rows = 2;
    mdinv.cols = 2;
    mdinv.value = [ke, ku, kk, m, l](const Vec& q) {
        const double c = std::cos(q(1));
        Mat out(2, 2);
        out << ke + kk, -ku * kk / l * c,
               -ku * kk / l * c, ke * ku / (m * l * l) + ku * ku * kk / (l * l) * c * c;
        return out;
    };
    mdinv.partial = [ku, kk, l](const Vec& q, Index i) {
        Mat out = Mat::Zero(2, 2);
        if (i == 1) {
            const double c = std::cos(q(1)), s = std::sin(q(1));
            out << 0.0, ku * kk / l * s,
                   ku * kk / l * s, -2.0 * ku * ku * kk / (l * l) * c * s;
        }
        return out;
    };

    TargetDynamics& tgt = cp.tgt;
    tgt.md = fields::inverse(mdinv);
    tgt.vd.value = [ke, ku, m, grav, l](const Vec& q) {
        return ke * ku * m * grav * l * std::cos(q(1));
    };
    tgt.vd.gradient = [ke, ku, m, grav, l](const Vec& q) {
        Vec out = Vec::Zero(2);
        out(1) = -ke * ku * m * grav * l * std::sin(q(1));
        return out;
    };
    tgt.q_star = Vec::Zero(2);
    // K_I = 0 leaves V_d independent of q_a: the minimum is strict in q_u only
    tgt.min_coords = {1};

    const double ka = params.gains.k_a;
    auto lambda41 = [m, l, ka, ku, kk, kp, mdinv](const State& x) {
        const double s = std::sin(x.q(1)), c = std::cos(x.q(1));
        const double a = ka * ku * kk / (m * l * l * l) * s;
        Mat inner(2, 2);
        inner << 0.0, -2.0 * a * x.p(1),
                 a * x.p(1), a * x.p(0);
        const Mat md = inv2(mdinv.value(x.q), "cart-pendulum: singular M_d^-1");
        Vec gt(2);
        gt << 1.0, -m * l * c;
        return (0.5 * md * inner * md - gt * kp * gt.transpose()).eval();
    };
    tgt.lambda = lambda41;
    cp.lambda = lambda41;

    cp.control = [params, m, l, grav, ku, kk, kp](const State& x) {
        const double qu = x.q(1), pa = x.p(0), pu = x.p(1);
        const double s = std::sin(qu), c = std::cos(qu);
        const double k = cart_pendulum_k(params, qu);
        if (std::abs(k) < 1e-12)
            throw GainConditionError("cart-pendulum control: K(q_u) vanished");
        const double shaping =
            (1.0 / k) * (-ku * kk * m * s * (pu * pu / (m * m * l * l * l) - grav * c));
        const double damping = kp * k * (pa - ku / l * c * pu);
        return Vec::Constant(1, shaping - damping);
    };

    cp.box.q_min = Vec(2);
    cp.box.q_min << -2.0, -1.0;
    cp.box.q_max = Vec(2);
    cp.box.q_max << 2.0, 1.0;
    cp.box.p_min = Vec::Constant(2, -2.0);
    cp.box.p_max = Vec::Constant(2, 2.0);

    cp.x0_q = Vec::Zero(2);
    cp.x0_q(1) = 0.3;
    cp.x0_p = Vec::Zero(2);

    // q_u-domain blocks are registered through their lift so that every
    // entry probes over the full configuration box
    cp.fields = {
        {"m_au", fields::lift(cp.ps.m_au, 1, 1, 2)},
        {"m_uu", fields::lift(cp.ps.m_uu, 1, 1, 2)},
        {"V_u", fields::lift(cp.ps.v_u, 1, 1, 2)},
        {"V_N", fields::lift(cp.ps.v_n, 1, 1, 2)},
        {"inertia", cp.sys.inertia},
        {"potential", cp.sys.potential},
        {"input_map", cp.sys.input_map},
        {"annihilator", cp.sys.annihilator},
        {"Md_inv", mdinv},
        {"Md", cp.tgt.md},
        {"V_d", cp.tgt.vd},
    };
    return cp;
}

MechanicalSystem cart_pendulum_original(const CartPendulumParams& params) {
    const double mc = params.cart_mass, m = params.m, l = params.l, grav = params.g;
    MechanicalSystem sys;
    sys.n = 2;
    sys.m = 1;
    sys.inertia.rows = 2;
    sys.inertia.cols = 2;
    sys.inertia.value = [mc, m, l](const Vec& q) {
        const double c = std::cos(q(1));
        Mat out(2, 2);
        out << mc + m, m * l * c, m * l * c, m * l * l;
        return out;
    };
    sys.inertia.partial = [m, l](const Vec& q, Index i) {
        Mat out = Mat::Zero(2, 2);
        if (i == 1) {
            const double s = std::sin(q(1));
            out(0, 1) = out(1, 0) = -m * l * s;
        }
        return out;
    };
    sys.potential.value = [m, grav, l](const Vec& q) { return m * grav * l * std::cos(q(1)); };
    sys.potential.gradient = [m, grav, l](const Vec& q) {
        Vec out = Vec::Zero(2);
        out(1) = -m * grav * l * std::sin(q(1));
        return out;
    };
    Mat g_in(2, 1);
    g_in << 1.0, 0.0;
    sys.input_map = fields::constant(g_in);
    Mat g_perp(1, 2);
    g_perp << 0.0, 1.0;
    sys.annihilator = fields::constant(g_perp);
    return sys;
}

}  // namespace idapbc
