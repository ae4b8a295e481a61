#include "idapbc/matching.hpp"

#include "idapbc/linalg.hpp"

namespace idapbc {

namespace {

Mat inverse_of(const Mat& a, const char* what) {
    Eigen::FullPivLU<Mat> lu(a);
    if (!lu.isInvertible()) throw SingularMatrixError(what);
    return lu.inverse();
}

}  // namespace

GeneralizedForceSpec embed_gyroscopic(const GyroscopicSpec& j2spec) {
    GeneralizedForceSpec gspec;
    const Index n = static_cast<Index>(j2spec.u_mats.size());
    for (Index j = 0; j < n; ++j) {
        MatrixField qj;
        qj.rows = n;
        qj.cols = n;
        qj.value = [us = j2spec.u_mats, j, n](const Vec& q) {
            Mat out(n, n);
            for (Index l = 0; l < n; ++l)
                out.row(l) = 2.0 * us[static_cast<std::size_t>(l)].value(q).row(j);
            return out;
        };
        qj.partial = [us = j2spec.u_mats, j, n](const Vec& q, Index i) {
            Mat out(n, n);
            for (Index l = 0; l < n; ++l)
                out.row(l) = 2.0 * us[static_cast<std::size_t>(l)].partial(q, i).row(j);
            return out;
        };
        gspec.q_mats.push_back(std::move(qj));
    }
    return gspec;
}

Mat build_j2(const GyroscopicSpec& spec, const MatrixField& md, const State& x) {
    const Mat mdinv = inverse_of(md.value(x.q), "build_j2: singular M_d");
    const Vec w = mdinv * x.p;
    Mat j2 = Mat::Zero(x.q.size(), x.q.size());
    for (Index i = 0; i < x.q.size(); ++i)
        j2 += w(i) * spec.u_mats[static_cast<std::size_t>(i)].value(x.q);
    return j2;
}

Mat build_lambda(const GeneralizedForceSpec& spec, const MatrixField& md, const State& x) {
    const Mat mdinv = inverse_of(md.value(x.q), "build_lambda: singular M_d");
    const Vec w = mdinv * x.p;
    const Index n = x.q.size();
    Mat lambda = Mat::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        lambda.row(i) = 0.5 * w.transpose() * spec.q_mats[static_cast<std::size_t>(i)].value(x.q);
    return lambda;
}

namespace {

/// Common part of both KE residuals:
///   G-perp { grad_q(p'M^-1 p) - M_d M^-1 grad_q(p'M_d^-1 p) + 2 c }
Vec ke_residual_with_force(const MechanicalSystem& sys, const TargetDynamics& tgt,
                           const State& x, const Vec& c) {
    const Mat minv = inverse_of(sys.inertia.value(x.q), "ke_residual: singular inertia");
    const Mat md = tgt.md.value(x.q);
    const Vec term = grad_q_quadratic_inv(sys.inertia, x) -
                     md * minv * grad_q_quadratic_inv(tgt.md, x) + 2.0 * c;
    return sys.annihilator.value(x.q) * term;
}

}  // namespace

Vec ida_ke_residual(const MechanicalSystem& sys, const TargetDynamics& tgt,
                    const GyroscopicSpec& j2spec, const State& x) {
    const Mat mdinv = inverse_of(tgt.md.value(x.q), "ida_ke_residual: singular M_d");
    const Vec c = build_j2(j2spec, tgt.md, x) * (mdinv * x.p);
    return ke_residual_with_force(sys, tgt, x, c);
}

Vec pe_residual(const MechanicalSystem& sys, const TargetDynamics& tgt, const Vec& q) {
    const Mat minv = inverse_of(sys.inertia.value(q), "pe_residual: singular inertia");
    const Mat md = tgt.md.value(q);
    return sys.annihilator.value(q) *
           (sys.potential.gradient(q) - md * minv * tgt.vd.gradient(q));
}

namespace {

Vec projected_control(const MechanicalSystem& sys, const TargetDynamics& tgt,
                      const State& x, const Vec& force) {
    const Mat g = sys.input_map.value(x.q);
    const Mat gtg = g.transpose() * g;
    Eigen::FullPivLU<Mat> lu(gtg);
    if (!lu.isInvertible()) throw SingularMatrixError("control: G'G singular");
    const Mat minv = inverse_of(sys.inertia.value(x.q), "control: singular inertia");
    const Mat md = tgt.md.value(x.q);
    const Vec bracket = grad_q_hamiltonian(sys, x) -
                        md * minv * grad_q_target_energy(tgt, x) + force;
    return lu.solve(g.transpose() * bracket);
}

}  // namespace

Vec ida_control(const MechanicalSystem& sys, const TargetDynamics& tgt,
                const GyroscopicSpec& j2spec, const State& x, const Mat& kp) {
    const Mat mdinv = inverse_of(tgt.md.value(x.q), "ida_control: singular M_d");
    const Vec w = mdinv * x.p;
    const Vec u_es = projected_control(sys, tgt, x, build_j2(j2spec, tgt.md, x) * w);
    const Mat g = sys.input_map.value(x.q);
    return u_es - kp * (g.transpose() * w);
}

KeRowTerms ke_row_terms(const MechanicalSystem& sys, const TargetDynamics& tgt,
                         Index k, const Vec& q) {
    const Mat gperp = sys.annihilator.value(q);
    if (k < 0 || k >= gperp.rows())
        throw std::out_of_range("ke_row_terms: row index out of range");
    const Vec v = gperp.row(k).transpose();
    const Index n = q.size();
    const Mat minv = inverse_of(sys.inertia.value(q), "ke_row_terms: singular inertia");
    const Mat md = tgt.md.value(q);
    const Mat mdinv = inverse_of(md, "ke_row_terms: singular M_d");

    KeRowTerms t;
    Mat sum_m = Mat::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        const Mat dminv = -minv * sys.inertia.partial(q, i) * minv;
        sum_m += v(i) * dminv;
    }
    t.a_k = md * sum_m * md;

    t.gamma_k = (v.transpose() * md * minv).transpose();

    Mat sum_d = Mat::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        const Mat dmdinv = -mdinv * tgt.md.partial(q, i) * mdinv;
        sum_d += t.gamma_k(i) * dmdinv;
    }
    t.b_k = md * sum_d * md;
    return t;
}

Mat ke_row_gyroscopic(const MechanicalSystem& sys, const GyroscopicSpec& j2spec, Index k, const Vec& q) {
    const Mat gperp = sys.annihilator.value(q);
    if (k < 0 || k >= gperp.rows())
        throw std::out_of_range("ke_row_gyroscopic: row index out of range");
    const Vec v = gperp.row(k).transpose();
    const Index n = q.size();
    Mat stacked(n, n);
    for (Index i = 0; i < n; ++i)
        stacked.row(i) = v.transpose() * j2spec.u_mats[static_cast<std::size_t>(i)].value(q);
    return stacked + stacked.transpose();
}

Mat ke_row_residual(const MechanicalSystem& sys, const TargetDynamics& tgt,
                    const GyroscopicSpec& j2spec, Index k, const Vec& q) {
    const KeRowTerms t = ke_row_terms(sys, tgt, k, q);
    return t.b_k - t.a_k - ke_row_gyroscopic(sys, j2spec, k, q);
}

long long pde_count(long long s) {
    if (s < 0) throw std::invalid_argument("pde_count: s must be nonnegative");
    return s * (s + 1) * (s + 2) / 6;
}

Vec sida_ke_residual(const MechanicalSystem& sys, const TargetDynamics& tgt,
                     const GeneralizedForceSpec& gspec, const State& x) {
    const Mat mdinv = inverse_of(tgt.md.value(x.q), "sida_ke_residual: singular M_d");
    const Vec c = build_lambda(gspec, tgt.md, x) * (mdinv * x.p);
    return ke_residual_with_force(sys, tgt, x, c);
}

Mat sida_ke_pde_matrix(const MechanicalSystem& sys, const TargetDynamics& tgt,
                       const GeneralizedForceSpec& gspec, Index k, const Vec& q) {
    const KeRowTerms t = ke_row_terms(sys, tgt, k, q);
    const Vec v = sys.annihilator.value(q).row(k).transpose();
    Mat sum_q = Mat::Zero(q.size(), q.size());
    for (Index i = 0; i < q.size(); ++i)
        sum_q += v(i) * gspec.q_mats[static_cast<std::size_t>(i)].value(q);
    return t.a_k - t.b_k + sum_q;
}

Vec sida_control(const MechanicalSystem& sys, const TargetDynamics& tgt, const State& x) {
    const Mat mdinv = inverse_of(tgt.md.value(x.q), "sida_control: singular M_d");
    return projected_control(sys, tgt, x, tgt.lambda(x) * (mdinv * x.p));
}

Vec sida_matching_residual(const MechanicalSystem& sys, const ControlLaw& u_law,
                           const TargetDynamics& tgt, const State& x) {
    const Mat minv = inverse_of(sys.inertia.value(x.q), "matching: singular inertia");
    const Mat md = tgt.md.value(x.q);
    const Mat mdinv = inverse_of(md, "matching: singular M_d");
    const Vec closed_loop = -grad_q_hamiltonian(sys, x) + sys.input_map.value(x.q) * u_law(x);
    const Vec target = -md * minv * grad_q_target_energy(tgt, x) +
                       tgt.lambda(x) * (mdinv * x.p);
    return closed_loop - target;
}

StabilityCheck stability_condition(const TargetDynamics& tgt, const State& x) {
    const Mat mdinv = inverse_of(tgt.md.value(x.q), "stability_condition: singular M_d");
    const Vec w = mdinv * x.p;
    StabilityCheck c;
    c.value = w.dot(tgt.lambda(x) * w);
    c.ok = c.value <= 1e-12;
    return c;
}

bool lambda_sym_nonpositive(const TargetDynamics& tgt, const State& x, double tol) {
    const Mat lam = tgt.lambda(x);
    return min_eigenvalue(-(lam + lam.transpose())) >= -tol;
}

double hd_dot(const MechanicalSystem& sys, const TargetDynamics& tgt, const State& x) {
    const Derivative d = target_field(sys, tgt, x);
    const Mat mdinv = inverse_of(tgt.md.value(x.q), "hd_dot: singular M_d");
    return grad_q_target_energy(tgt, x).dot(d.q_dot) + (mdinv * x.p).dot(d.p_dot);
}

Vec damping_output(const TargetDynamics& tgt, const State& x) {
    const Mat lam = tgt.lambda(x);
    const Mat mdinv = inverse_of(tgt.md.value(x.q), "damping_output: singular M_d");
    return psd_sqrt(-(lam + lam.transpose())) * (mdinv * x.p);
}

}  // namespace idapbc
