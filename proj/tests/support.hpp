// Synthetic systems shared across the test suites. Everything carries
// hand-written analytic partials; nothing here depends on the code paths
// under test beyond the field structs themselves.
#pragma once

#include "idapbc/matching.hpp"
#include "idapbc/pfl.hpp"

namespace idapbc::testing {

/// n = m = 1 free particle in a quadratic well: q'' = -q.
inline MechanicalSystem harmonic_oscillator() {
    MechanicalSystem sys;
    sys.n = 1;
    sys.m = 1;
    sys.inertia = fields::constant(Mat::Identity(1, 1));
    sys.potential.value = [](const Vec& q) { return 0.5 * q(0) * q(0); };
    sys.potential.gradient = [](const Vec& q) { return q; };
    sys.input_map = fields::constant(Mat::Identity(1, 1));
    sys.annihilator = fields::constant(Mat::Zero(0, 1));
    return sys;
}

/// n=2, m=1 system with nonconstant SPD inertia and a q-dependent input map;
/// used for the KE-PDE machinery where nontrivial A_k, B_k, Gamma are wanted.
inline MechanicalSystem synthetic_system() {
    MechanicalSystem sys;
    sys.n = 2;
    sys.m = 1;
    sys.inertia.rows = 2;
    sys.inertia.cols = 2;
    sys.inertia.value = [](const Vec& q) {
        Mat m(2, 2);
        const double c2 = std::cos(q(1)), s1 = std::sin(q(0));
        m << 2.0 + c2 * c2, 0.3 * s1, 0.3 * s1, 1.5 + 0.5 * s1 * s1;
        return m;
    };
    sys.inertia.partial = [](const Vec& q, Index i) {
        Mat m = Mat::Zero(2, 2);
        if (i == 0) {
            const double c1 = std::cos(q(0));
            m(0, 1) = m(1, 0) = 0.3 * c1;
            m(1, 1) = std::sin(q(0)) * c1;
        } else {
            m(0, 0) = -std::sin(2.0 * q(1));
        }
        return m;
    };
    sys.potential.value = [](const Vec& q) { return std::cos(q(0)) + 0.5 * q(1) * q(1); };
    sys.potential.gradient = [](const Vec& q) {
        Vec g(2);
        g << -std::sin(q(0)), q(1);
        return g;
    };
    sys.input_map.rows = 2;
    sys.input_map.cols = 1;
    sys.input_map.value = [](const Vec& q) {
        Mat g(2, 1);
        g << 1.0, 0.3 + 0.2 * std::sin(q(0));
        return g;
    };
    sys.input_map.partial = [](const Vec& q, Index i) {
        Mat g = Mat::Zero(2, 1);
        if (i == 0) g(1, 0) = 0.2 * std::cos(q(0));
        return g;
    };
    sys.annihilator.rows = 1;
    sys.annihilator.cols = 2;
    sys.annihilator.value = [](const Vec& q) {
        Mat a(1, 2);
        a << -(0.3 + 0.2 * std::sin(q(0))), 1.0;
        return a;
    };
    sys.annihilator.partial = [](const Vec& q, Index i) {
        Mat a = Mat::Zero(1, 2);
        if (i == 0) a(0, 0) = -0.2 * std::cos(q(0));
        return a;
    };
    return sys;
}

/// Nonconstant invertible shaped metric for the synthetic system (not a
/// KE-PDE solution; used where a generic M_d is needed).
inline MatrixField synthetic_md() {
    MatrixField md;
    md.rows = 2;
    md.cols = 2;
    md.value = [](const Vec& q) {
        Mat m(2, 2);
        const double s2 = std::sin(q(1)), c1 = std::cos(q(0));
        m << 1.8 + 0.4 * s2, 0.2 * c1, 0.2 * c1, 1.2 + 0.3 * c1 * c1;
        return m;
    };
    md.partial = [](const Vec& q, Index i) {
        Mat m = Mat::Zero(2, 2);
        if (i == 0) {
            const double s1 = std::sin(q(0));
            m(0, 1) = m(1, 0) = -0.2 * s1;
            m(1, 1) = -0.6 * std::cos(q(0)) * s1;
        } else {
            m(0, 0) = 0.4 * std::cos(q(1));
        }
        return m;
    };
    return md;
}

inline TargetDynamics synthetic_target() {
    TargetDynamics tgt;
    tgt.md = synthetic_md();
    tgt.vd.value = [](const Vec& q) { return 0.5 * q.squaredNorm(); };
    tgt.vd.gradient = [](const Vec& q) { return q; };
    tgt.lambda = [](const State&) { return Mat::Zero(2, 2).eval(); };
    tgt.q_star = Vec::Zero(2);
    return tgt;
}

/// Two skew fields with q-dependent coefficients.
inline GyroscopicSpec synthetic_gyroscopic() {
    auto skew = [](std::function<double(const Vec&)> coeff,
                   std::function<double(const Vec&, Index)> dcoeff) {
        MatrixField u;
        u.rows = 2;
        u.cols = 2;
        u.value = [coeff](const Vec& q) {
            Mat j(2, 2);
            j << 0.0, coeff(q), -coeff(q), 0.0;
            return j;
        };
        u.partial = [dcoeff](const Vec& q, Index i) {
            Mat j(2, 2);
            j << 0.0, dcoeff(q, i), -dcoeff(q, i), 0.0;
            return j;
        };
        return u;
    };
    GyroscopicSpec spec;
    spec.u_mats.push_back(skew([](const Vec& q) { return 0.7 + 0.2 * q(0); },
                               [](const Vec&, Index i) { return i == 0 ? 0.2 : 0.0; }));
    spec.u_mats.push_back(skew(
        [](const Vec& q) { return -0.4 + 0.3 * std::sin(q(1)); },
        [](const Vec& q, Index i) { return i == 1 ? 0.3 * std::cos(q(1)) : 0.0; }));
    return spec;
}

inline ProbeBox unit_box(Index n, double q_half = 0.8, double p_half = 1.0) {
    return symmetric_box(Vec::Constant(n, q_half), Vec::Constant(n, p_half));
}

inline GainSet scalar_gains() {
    GainSet g;
    g.k_e = 0.3;
    g.k_a = 1.3;
    g.k_u = -0.5;
    g.K_k = Mat::Constant(1, 1, 0.7);
    g.K_I = Mat::Constant(1, 1, 0.4);
    g.K_P = Mat::Constant(1, 1, 0.6);
    return g;
}

/// m = s = 1 partitioned system with nonconstant m_uu (the cart-pendulum has
/// a constant one, which hides several momentum terms).
inline PartitionedSystem partitioned_11() {
    PartitionedSystem ps;
    ps.m = 1;
    ps.s = 1;
    ps.m_aa = Mat::Constant(1, 1, 2.0);
    ps.m_au.rows = 1;
    ps.m_au.cols = 1;
    ps.m_au.value = [](const Vec& qu) { return Mat::Constant(1, 1, 0.8 + 0.5 * std::sin(qu(0))); };
    ps.m_au.partial = [](const Vec& qu, Index) {
        return Mat::Constant(1, 1, 0.5 * std::cos(qu(0)));
    };
    ps.m_uu.rows = 1;
    ps.m_uu.cols = 1;
    ps.m_uu.value = [](const Vec& qu) { return Mat::Constant(1, 1, 2.0 + 0.5 * std::sin(qu(0))); };
    ps.m_uu.partial = [](const Vec& qu, Index) {
        return Mat::Constant(1, 1, 0.5 * std::cos(qu(0)));
    };
    ps.v_a = fields::constant_scalar(0.0);
    ps.v_u.value = [](const Vec& qu) { return std::cos(qu(0)) + qu(0) * qu(0) / 3.0; };
    ps.v_u.gradient = [](const Vec& qu) {
        return Vec::Constant(1, -std::sin(qu(0)) + 2.0 * qu(0) / 3.0);
    };
    ps.v_n.rows = 1;
    ps.v_n.value = [](const Vec& qu) {
        return Vec::Constant(1, -0.8 * qu(0) + 0.5 * std::cos(qu(0)));
    };
    ps.v_n.jacobian = [](const Vec& qu) {
        return Mat::Constant(1, 1, -0.8 - 0.5 * std::sin(qu(0)));
    };
    return ps;
}

/// m = 2, s = 1: exercises the matrix-gain paths.
inline PartitionedSystem partitioned_21() {
    PartitionedSystem ps;
    ps.m = 2;
    ps.s = 1;
    ps.m_aa = (Mat(2, 2) << 3.0, 0.5, 0.5, 2.0).finished();
    ps.m_au.rows = 2;
    ps.m_au.cols = 1;
    ps.m_au.value = [](const Vec& qu) {
        Mat m(2, 1);
        m << 0.8 + 0.5 * std::sin(qu(0)), 0.3 * std::cos(qu(0));
        return m;
    };
    ps.m_au.partial = [](const Vec& qu, Index) {
        Mat m(2, 1);
        m << 0.5 * std::cos(qu(0)), -0.3 * std::sin(qu(0));
        return m;
    };
    ps.m_uu.rows = 1;
    ps.m_uu.cols = 1;
    ps.m_uu.value = [](const Vec& qu) { return Mat::Constant(1, 1, 2.0 + 0.5 * std::sin(qu(0))); };
    ps.m_uu.partial = [](const Vec& qu, Index) {
        return Mat::Constant(1, 1, 0.5 * std::cos(qu(0)));
    };
    ps.v_a = fields::constant_scalar(0.0);
    ps.v_u.value = [](const Vec& qu) { return std::cos(qu(0)) + qu(0) * qu(0) / 3.0; };
    ps.v_u.gradient = [](const Vec& qu) {
        return Vec::Constant(1, -std::sin(qu(0)) + 2.0 * qu(0) / 3.0);
    };
    ps.v_n.rows = 2;
    ps.v_n.value = [](const Vec& qu) {
        Vec v(2);
        v << -0.8 * qu(0) + 0.5 * std::cos(qu(0)), -0.3 * std::sin(qu(0));
        return v;
    };
    ps.v_n.jacobian = [](const Vec& qu) {
        Mat j(2, 1);
        j << -0.8 - 0.5 * std::sin(qu(0)), -0.3 * std::cos(qu(0));
        return j;
    };
    return ps;
}

inline GainSet matrix_gains() {
    GainSet g;
    g.k_e = 0.3;
    g.k_a = 1.3;
    g.k_u = -0.5;
    g.K_k = (Mat(2, 2) << 0.7, 0.1, 0.1, 0.5).finished();
    g.K_I = (Mat(2, 2) << 0.4, 0.0, 0.0, 0.3).finished();
    g.K_P = (Mat(2, 2) << 0.6, 0.1, 0.1, 0.4).finished();
    return g;
}

/// m = 1, s = 2: nonconstant 2x2 m_uu, so the Jacobian-transpose placement
/// in the momentum terms actually matters.
inline PartitionedSystem partitioned_12() {
    PartitionedSystem ps;
    ps.m = 1;
    ps.s = 2;
    ps.m_aa = Mat::Constant(1, 1, 2.0);
    // m_au is the gradient of phi = 0.4 u1 u2 + 0.3 sin(u1) + 0.25 u2^2
    ps.m_au.rows = 1;
    ps.m_au.cols = 2;
    ps.m_au.value = [](const Vec& u) {
        Mat m(1, 2);
        m << 0.4 * u(1) + 0.3 * std::cos(u(0)), 0.4 * u(0) + 0.5 * u(1);
        return m;
    };
    ps.m_au.partial = [](const Vec& u, Index i) {
        Mat m(1, 2);
        if (i == 0)
            m << -0.3 * std::sin(u(0)), 0.4;
        else
            m << 0.4, 0.5;
        return m;
    };
    ps.m_uu.rows = 2;
    ps.m_uu.cols = 2;
    ps.m_uu.value = [](const Vec& u) {
        Mat m(2, 2);
        m << 2.0 + 0.3 * std::sin(u(0)), 0.2, 0.2, 1.5 + 0.2 * std::cos(u(1));
        return m;
    };
    ps.m_uu.partial = [](const Vec& u, Index i) {
        Mat m = Mat::Zero(2, 2);
        if (i == 0)
            m(0, 0) = 0.3 * std::cos(u(0));
        else
            m(1, 1) = -0.2 * std::sin(u(1));
        return m;
    };
    ps.v_a = fields::constant_scalar(0.0);
    ps.v_u.value = [](const Vec& u) {
        return std::cos(u(0)) + 0.5 * u(1) * u(1) + 0.1 * u(0) * u(1);
    };
    ps.v_u.gradient = [](const Vec& u) {
        Vec g(2);
        g << -std::sin(u(0)) + 0.1 * u(1), u(1) + 0.1 * u(0);
        return g;
    };
    ps.v_n.rows = 1;
    ps.v_n.value = [](const Vec& u) {
        return Vec::Constant(1, -(0.4 * u(0) * u(1) + 0.3 * std::sin(u(0)) +
                                  0.25 * u(1) * u(1)));
    };
    ps.v_n.jacobian = [](const Vec& u) {
        Mat j(1, 2);
        j << -(0.4 * u(1) + 0.3 * std::cos(u(0))), -(0.4 * u(0) + 0.5 * u(1));
        return j;
    };
    return ps;
}

}  // namespace idapbc::testing
