#include "idapbc/system.hpp"

#include "idapbc/finite_diff.hpp"
#include "idapbc/linalg.hpp"

namespace idapbc {

namespace {

Mat inverse_of(const Mat& a, const char* what) {
    Eigen::FullPivLU<Mat> lu(a);
    if (!lu.isInvertible()) throw SingularMatrixError(what);
    return lu.inverse();
}

}  // namespace

double hamiltonian(const MechanicalSystem& sys, const State& x) {
    const Mat minv = inverse_of(sys.inertia.value(x.q), "hamiltonian: singular inertia");
    return 0.5 * x.p.dot(minv * x.p) + sys.potential.value(x.q);
}

double target_energy(const TargetDynamics& tgt, const State& x) {
    const Mat mdinv = inverse_of(tgt.md.value(x.q), "target_energy: singular M_d");
    return 0.5 * x.p.dot(mdinv * x.p) + tgt.vd.value(x.q);
}

Vec grad_q_quadratic_inv(const MatrixField& a, const State& x) {
    const Mat ainv = inverse_of(a.value(x.q), "grad_q_quadratic_inv: singular matrix");
    Vec grad(x.q.size());
    for (Index i = 0; i < x.q.size(); ++i) {
        const Mat dainv = -ainv * a.partial(x.q, i) * ainv;
        grad(i) = x.p.dot(dainv * x.p);
    }
    return grad;
}

Vec grad_q_hamiltonian(const MechanicalSystem& sys, const State& x) {
    return 0.5 * grad_q_quadratic_inv(sys.inertia, x) + sys.potential.gradient(x.q);
}

Vec grad_q_target_energy(const TargetDynamics& tgt, const State& x) {
    return 0.5 * grad_q_quadratic_inv(tgt.md, x) + tgt.vd.gradient(x.q);
}

Derivative open_loop_field(const MechanicalSystem& sys, const State& x, const Vec& u) {
    const Mat minv = inverse_of(sys.inertia.value(x.q), "open_loop_field: singular inertia");
    Derivative d;
    d.q_dot = minv * x.p;
    d.p_dot = -grad_q_hamiltonian(sys, x) + sys.input_map.value(x.q) * u;
    return d;
}

Derivative target_field(const MechanicalSystem& sys, const TargetDynamics& tgt, const State& x) {
    const Mat minv = inverse_of(sys.inertia.value(x.q), "target_field: singular inertia");
    const Mat md = tgt.md.value(x.q);
    const Mat mdinv = inverse_of(md, "target_field: singular M_d");
    Derivative d;
    d.q_dot = minv * x.p;  // M^-1 M_d grad_p H_d = M^-1 p
    d.p_dot = -md * minv * grad_q_target_energy(tgt, x) + tgt.lambda(x) * (mdinv * x.p);
    return d;
}

SystemValidation validate_system(const MechanicalSystem& sys, const ProbeBox& box,
                                 int probes, std::uint64_t seed) {
    SystemValidation v;
    v.min_inertia_eigenvalue = std::numeric_limits<double>::infinity();
    StateSampler sampler(box, seed);
    for (int i = 0; i < probes; ++i) {
        const Vec q = sampler.next_q();
        v.min_inertia_eigenvalue =
            std::min(v.min_inertia_eigenvalue, min_eigenvalue(sys.inertia.value(q)));
        const Mat g = sys.input_map.value(q);
        const Mat gperp = sys.annihilator.value(q);
        if (numerical_rank(g) != sys.m) v.input_full_rank = false;
        if (numerical_rank(gperp) != sys.s()) v.annihilator_full_rank = false;
        if (gperp.rows() > 0)
            v.max_annihilation =
                std::max(v.max_annihilation, (gperp * g).cwiseAbs().maxCoeff());
    }
    return v;
}

TargetValidation validate_target(const TargetDynamics& tgt, const ProbeBox& box,
                                 int probes, std::uint64_t seed) {
    TargetValidation v;
    v.min_md_eigenvalue = std::numeric_limits<double>::infinity();
    StateSampler sampler(box, seed);
    for (int i = 0; i < probes; ++i) {
        const Vec q = sampler.next_q();
        v.min_md_eigenvalue = std::min(v.min_md_eigenvalue, min_eigenvalue(tgt.md.value(q)));
    }
    v.grad_norm_at_qstar = tgt.vd.gradient(tgt.q_star).cwiseAbs().maxCoeff();
    const Mat hess = fd_hessian_of_gradient(tgt.vd, tgt.q_star);
    if (tgt.min_coords.empty()) {
        v.min_hessian_eigenvalue = min_eigenvalue(hess);
    } else {
        const Index k = static_cast<Index>(tgt.min_coords.size());
        Mat sub(k, k);
        for (Index a = 0; a < k; ++a)
            for (Index b = 0; b < k; ++b)
                sub(a, b) = hess(tgt.min_coords[static_cast<std::size_t>(a)],
                                 tgt.min_coords[static_cast<std::size_t>(b)]);
        v.min_hessian_eigenvalue = min_eigenvalue(sub);
    }
    return v;
}

}  // namespace idapbc
