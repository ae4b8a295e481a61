#include "idapbc/lyapunov.hpp"

namespace idapbc {

namespace {

Mat inverse_of(const Mat& a, const char* what) {
    Eigen::FullPivLU<Mat> lu(a);
    if (!lu.isInvertible()) throw SingularMatrixError(what);
    return lu.inverse();
}

/// nabla_q'[M_d^-1 p] p, i.e. the vector with component i = p' (d_i M_d^-1) p.
Vec grad_quad_mdinv(const LyapunovCandidate& cand, const State& x) {
    const Mat mdinv = inverse_of(cand.md.value(x.q), "lyapunov: singular M_d");
    Vec out(x.q.size());
    for (Index i = 0; i < x.q.size(); ++i) {
        const Mat dmdinv = -mdinv * cand.md.partial(x.q, i) * mdinv;
        out(i) = x.p.dot(dmdinv * x.p);
    }
    return out;
}

}  // namespace

double candidate_energy(const LyapunovCandidate& cand, const State& x) {
    const Mat mdinv = inverse_of(cand.md.value(x.q), "candidate_energy: singular M_d");
    return 0.5 * x.p.dot(mdinv * x.p) + cand.vd.value(x.q);
}

Vec extract_c(const GeneralSecondOrderSystem& sys, const LyapunovCandidate& cand,
              const ControlLaw& u_law, const State& x) {
    const Mat minv = inverse_of(sys.mass.value(x.q), "extract_c: singular mass");
    const Mat md = cand.md.value(x.q);
    return sys.g_vec.value(x.q) + sys.f_vec(x) + sys.input_map.value(x.q) * u_law(x) +
           0.5 * md * minv * grad_quad_mdinv(cand, x) +
           md * minv * cand.vd.gradient(x.q);
}

double lyap_hd_dot(const GeneralSecondOrderSystem& sys, const LyapunovCandidate& cand,
                   const ControlLaw& u_law, const State& x) {
    const Mat mdinv = inverse_of(cand.md.value(x.q), "lyap_hd_dot: singular M_d");
    return (mdinv * x.p).dot(extract_c(sys, cand, u_law, x));
}

Vec lyap_matching_residual(const GeneralSecondOrderSystem& sys, const LyapunovCandidate& cand,
                           const ControlLaw& u_law,
                           const std::function<Mat(const State&)>& lambda_map, const State& x) {
    const Mat minv = inverse_of(sys.mass.value(x.q), "lyap_matching_residual: singular mass");
    const Mat md = cand.md.value(x.q);
    const Mat mdinv = inverse_of(md, "lyap_matching_residual: singular M_d");
    const Vec grad_hd = 0.5 * grad_quad_mdinv(cand, x) + cand.vd.gradient(x.q);
    const Vec closed_loop =
        sys.g_vec.value(x.q) + sys.f_vec(x) + sys.input_map.value(x.q) * u_law(x);
    const Vec target = -md * minv * grad_hd + lambda_map(x) * (mdinv * x.p);
    return closed_loop - target;
}

Derivative lyap_closed_loop_field(const GeneralSecondOrderSystem& sys, const ControlLaw& u_law,
                                  const State& x) {
    const Mat minv = inverse_of(sys.mass.value(x.q), "lyap_closed_loop_field: singular mass");
    Derivative d;
    d.q_dot = minv * x.p;
    d.p_dot = sys.g_vec.value(x.q) + sys.f_vec(x) + sys.input_map.value(x.q) * u_law(x);
    return d;
}

Derivative lyap_target_field(const GeneralSecondOrderSystem& sys, const LyapunovCandidate& cand,
                             const std::function<Mat(const State&)>& lambda_map,
                             const State& x) {
    const Mat minv = inverse_of(sys.mass.value(x.q), "lyap_target_field: singular mass");
    const Mat md = cand.md.value(x.q);
    const Mat mdinv = inverse_of(md, "lyap_target_field: singular M_d");
    const Vec grad_hd = 0.5 * grad_quad_mdinv(cand, x) + cand.vd.gradient(x.q);
    Derivative d;
    d.q_dot = minv * x.p;
    d.p_dot = -md * minv * grad_hd + lambda_map(x) * (mdinv * x.p);
    return d;
}

StabilityCheck lyap_stability_condition(const LyapunovCandidate& cand,
                                        const std::function<Mat(const State&)>& lambda_map,
                                        const State& x) {
    const Mat mdinv = inverse_of(cand.md.value(x.q), "lyap_stability_condition: singular M_d");
    const Vec w = mdinv * x.p;
    StabilityCheck c;
    c.value = w.dot(lambda_map(x) * w);
    c.ok = c.value <= 1e-12;
    return c;
}

}  // namespace idapbc
