#include "idapbc/checks.hpp"

#include "idapbc/finite_diff.hpp"
#include "idapbc/integrate.hpp"
#include "idapbc/linalg.hpp"

#include <sstream>

namespace idapbc {

namespace {

CheckResult residual_check(std::string name, double value, double tol, std::string note = {}) {
    CheckResult r;
    r.name = std::move(name);
    r.value = value;
    r.tol = tol;
    r.pass = value <= tol;
    r.note = std::move(note);
    return r;
}

CheckResult margin_check(std::string name, double margin, std::string note = {}) {
    CheckResult r;
    r.name = std::move(name);
    r.value = margin;
    r.tol = 0.0;
    r.pass = margin > 0.0;
    r.note = std::move(note);
    return r;
}

MatrixField scaled_field(const MatrixField& f, double a) { return fields::scale(a, f); }

}  // namespace

double fd_oracle_worst(const FieldRegistry& fields, const ProbeBox& box, int probes,
                       std::uint64_t seed) {
    StateSampler sampler(box, seed);
    double worst = 0.0;
    for (int i = 0; i < probes; ++i) {
        const Vec q = sampler.next_q();
        for (const auto& f : fields) worst = std::max(worst, fd_check(f, q));
    }
    return worst;
}

CartPendulum perturbed(const CartPendulum& cp, const Perturbation& pert) {
    CartPendulum out = cp;
    if (pert.md_scale != 1.0) out.tgt.md = scaled_field(cp.tgt.md, pert.md_scale);
    if (pert.lambda_scale != 1.0) {
        auto base = cp.tgt.lambda;
        const double a = pert.lambda_scale;
        out.tgt.lambda = [base, a](const State& x) { return (a * base(x)).eval(); };
        out.lambda = out.tgt.lambda;
    }
    if (pert.control_scale != 1.0) {
        auto base = cp.control;
        const double a = pert.control_scale;
        out.control = [base, a](const State& x) { return (a * base(x)).eval(); };
    }
    return out;
}

BallBeam perturbed(const BallBeam& bb, const Perturbation& pert) {
    BallBeam out = bb;
    if (pert.md_scale != 1.0) out.cand.md = scaled_field(bb.cand.md, pert.md_scale);
    if (pert.lambda_scale != 1.0) {
        auto base = bb.lambda;
        const double a = pert.lambda_scale;
        out.lambda = [base, a](const State& x) { return (a * base(x)).eval(); };
    }
    if (pert.control_scale != 1.0) {
        auto base = bb.control;
        const double a = pert.control_scale;
        out.control = [base, a](const State& x) { return (a * base(x)).eval(); };
    }
    return out;
}

VerifySuite run_cart_pendulum_checks(const CartPendulum& cp, int samples, std::uint64_t seed) {
    VerifySuite suite;
    const auto& box = cp.box;

    suite.results.push_back(residual_check(
        "fd_oracle_fields", fd_oracle_worst(cp.fields, box, 100, seed), 1e-5,
        "analytic partials vs central differences, relative"));

    const SystemValidation sv = validate_system(cp.sys, box, 50, seed);
    {
        CheckResult r = residual_check("system_structure", sv.max_annihilation, 1e-12,
                                       "G-perp G and rank/SPD structure");
        r.pass = r.pass && sv.ok();
        suite.results.push_back(r);
    }

    const TargetValidation tv = validate_target(cp.tgt, box, 50, seed);
    suite.results.push_back(
        margin_check("md_positive_definite", tv.min_md_eigenvalue, "min eig of M_d over probes"));
    {
        CheckResult r = residual_check("vd_minimum", tv.grad_norm_at_qstar, 1e-10,
                                       "grad V_d(q*) and restricted Hessian");
        r.pass = r.pass && tv.min_hessian_eigenvalue > 0.0;
        suite.results.push_back(r);
    }

    auto pe = evaluate_residuals(box, samples, seed, [&](const State& x) {
        return pe_residual(cp.sys, cp.tgt, x.q);
    });
    suite.results.push_back(residual_check("pe_residual", pe.max_abs, 1e-9));

    auto match = evaluate_residuals(box, samples, seed, [&](const State& x) {
        return sida_matching_residual(cp.sys, cp.control, cp.tgt, x);
    });
    suite.results.push_back(residual_check("matching_residual", match.max_abs, 1e-8,
                                           "closed loop vs target momentum equation"));

    auto ctrl_diff = evaluate_residuals(box, samples, seed, [&](const State& x) {
        return Vec((cp.control(x) - pfl_control(cp.ps, cp.params.gains, x)).cwiseAbs());
    });
    suite.results.push_back(
        residual_check("control_specialization", ctrl_diff.max_abs, 1e-10,
                       "explicit control vs general synthesis formula"));

    auto lam_diff = evaluate_residuals(box, samples, seed, [&](const State& x) {
        const Mat d = cp.lambda(x) - pfl_lambda(cp.ps, cp.params.gains, x);
        return Vec(d.reshaped().cwiseAbs());
    });
    suite.results.push_back(residual_check("lambda_specialization", lam_diff.max_abs, 1e-9));

    {
        StateSampler sampler(box, seed);
        double worst = 0.0;
        for (int i = 0; i < samples; ++i)
            worst = std::max(worst, input_factorization_residual(cp.ps, cp.params.gains,
                                                         sampler.next().q.tail(cp.ps.s))
                                        .cwiseAbs()
                                        .maxCoeff());
        suite.results.push_back(residual_check("input_factorization", worst, 1e-10,
                                               "M_d^-1 G-tilde factorization"));
    }

    auto delta = evaluate_residuals(box, samples, seed, [&](const State& x) {
        return Vec::Constant(1, workless_shaping_residual(cp.ps, cp.params.gains, x));
    });
    suite.results.push_back(residual_check("workless_shaping_residual", delta.max_abs, 1e-9));

    auto energy_rate = evaluate_residuals(box, samples, seed, [&](const State& x) {
        const double rate = hd_dot(cp.sys, cp.tgt, x);
        const Mat mdinv = cp.tgt.md.value(x.q).inverse();
        const Vec gt_w = cp.sys.input_map.value(x.q).transpose() * (mdinv * x.p);
        return Vec::Constant(1, rate + gt_w.dot(cp.params.gains.K_P * gt_w));
    });
    suite.results.push_back(residual_check("hd_dot_damping_identity", energy_rate.max_abs, 1e-9,
                                           "Hd_dot + |G-tilde' M_d^-1 p|^2_KP"));

    {
        StateSampler sampler(box, seed);
        double worst_positive = -std::numeric_limits<double>::infinity();
        double worst_quadform_gap = 0.0;
        for (int i = 0; i < samples; ++i) {
            const State x = sampler.next();
            const StabilityCheck sc = stability_condition(cp.tgt, x);
            worst_positive = std::max(worst_positive, sc.value);
            worst_quadform_gap =
                std::max(worst_quadform_gap, std::abs(hd_dot(cp.sys, cp.tgt, x) - sc.value));
        }
        suite.results.push_back(residual_check("stability_condition", worst_positive, 1e-12,
                                               "p' M_d^-1 Lambda M_d^-1 p <= 0"));
        suite.results.push_back(
            residual_check("hd_dot_equals_quadform", worst_quadform_gap, 1e-10));
    }

    {
        Vec qu_lo = box.q_min.tail(cp.ps.s), qu_hi = box.q_max.tail(cp.ps.s);
        const GainConditionReport gr =
            gain_condition_check(cp.ps, cp.params.gains, qu_lo, qu_hi, 201, cp.tgt.q_star,
                                 cp.tgt.min_coords);
        std::ostringstream note;
        note << "min|det K|=" << gr.min_abs_det_k.value
             << ", min eig Mdinv=" << gr.min_mdinv_eigenvalue.value;
        CheckResult r = margin_check("gain_conditions", gr.min_mdinv_eigenvalue.value, note.str());
        r.pass = gr.ok();
        suite.results.push_back(r);
    }

    auto field_gap = evaluate_residuals(box, samples, seed, [&](const State& x) {
        const Derivative cl = open_loop_field(cp.sys, x, cp.control(x));
        const Derivative tf = target_field(cp.sys, cp.tgt, x);
        Vec d(cl.q_dot.size() + cl.p_dot.size());
        d << (cl.q_dot - tf.q_dot), (cl.p_dot - tf.p_dot);
        return d;
    });
    suite.results.push_back(residual_check("closed_loop_equals_target_field",
                                           field_gap.max_abs, 1e-8));
    return suite;
}

VerifySuite run_ball_beam_checks(const BallBeam& bb, int samples, std::uint64_t seed) {
    VerifySuite suite;
    const auto& box = bb.box;

    suite.results.push_back(residual_check(
        "fd_oracle_fields", fd_oracle_worst(bb.fields, box, 100, seed), 1e-5,
        "analytic partials vs central differences, relative"));

    {
        StateSampler sampler(box, seed);
        double min_mass = std::numeric_limits<double>::infinity();
        double min_md = min_mass;
        double worst_f0 = 0.0;
        for (int i = 0; i < 50; ++i) {
            const Vec q = sampler.next_q();
            min_mass = std::min(min_mass, min_eigenvalue(bb.sys.mass.value(q)));
            min_md = std::min(min_md, min_eigenvalue(bb.cand.md.value(q)));
            worst_f0 = std::max(
                worst_f0, bb.sys.f_vec(State(q, Vec::Zero(2))).cwiseAbs().maxCoeff());
        }
        suite.results.push_back(margin_check("mass_positive_definite", min_mass));
        suite.results.push_back(margin_check("md_positive_definite", min_md));
        suite.results.push_back(residual_check("forces_vanish_at_rest", worst_f0, 1e-14));
    }

    {
        const Vec grad = bb.cand.vd.gradient(bb.cand.q_star);
        const Mat hess = fd_hessian_of_gradient(bb.cand.vd, bb.cand.q_star);
        CheckResult r = residual_check("vd_minimum", grad.cwiseAbs().maxCoeff(), 1e-10);
        r.pass = r.pass && min_eigenvalue(hess) > 0.0;
        suite.results.push_back(r);
    }

    auto match = evaluate_residuals(box, samples, seed, [&](const State& x) {
        return lyap_matching_residual(bb.sys, bb.cand, bb.control, bb.lambda, x);
    });
    suite.results.push_back(residual_check("matching_residual", match.max_abs, 1e-8));

    auto c_factor = evaluate_residuals(box, samples, seed, [&](const State& x) {
        const Mat mdinv = bb.cand.md.value(x.q).inverse();
        return Vec(extract_c(bb.sys, bb.cand, bb.control, x) - bb.lambda(x) * (mdinv * x.p));
    });
    suite.results.push_back(residual_check("extract_c_factorization", c_factor.max_abs, 1e-9));

    {
        StateSampler sampler(box, seed);
        double worst_factor = 0.0, worst_quadform = 0.0;
        double worst_positive = -std::numeric_limits<double>::infinity();
        double min_bracket = std::numeric_limits<double>::infinity();
        for (int i = 0; i < samples; ++i) {
            const State x = sampler.next();
            const double rate = lyap_hd_dot(bb.sys, bb.cand, bb.control, x);
            const Mat mdinv = bb.cand.md.value(x.q).inverse();
            worst_factor = std::max(
                worst_factor,
                std::abs(rate - (mdinv * x.p).dot(extract_c(bb.sys, bb.cand, bb.control, x))));
            worst_positive = std::max(worst_positive, rate);
            const StabilityCheck sc = lyap_stability_condition(bb.cand, bb.lambda, x);
            worst_quadform = std::max(worst_quadform, std::abs(rate - sc.value));
            min_bracket = std::min(
                min_bracket,
                ball_beam_pd_decomposition(bb.params, x).min_bracket_eigenvalue);
        }
        suite.results.push_back(residual_check("hd_dot_factorization", worst_factor, 1e-12));
        suite.results.push_back(residual_check("hd_dot_nonpositive", worst_positive, 1e-12));
        suite.results.push_back(residual_check("hd_dot_equals_quadform", worst_quadform, 1e-10));
        suite.results.push_back(
            margin_check("pd_decomposition", min_bracket, "damping bracket stays PD"));
    }

    {
        // determinant claim: random (eps, q_u) pairs, not just the configured eps
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
        std::uniform_real_distribution<double> eps_dist(0.1, 5.0);
        std::uniform_real_distribution<double> qu_dist(-5.0, 5.0);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double eps = eps_dist(rng), qu = qu_dist(rng);
            worst = std::max(worst,
                             std::abs(ball_beam_first_bracket(eps, qu).determinant() - eps));
        }
        suite.results.push_back(residual_check("bracket_determinant", worst, 1e-12,
                                               "det equals eps for random (eps, q_u)"));
    }

    {
        StateSampler sampler(box, seed + 1);
        double worst = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < 1000; ++i) {
            const StabilityCheck sc = lyap_stability_condition(bb.cand, bb.lambda, sampler.next());
            worst = std::max(worst, sc.value);
        }
        suite.results.push_back(residual_check("stability_condition", worst, 1e-12,
                                               "1000 samples"));
    }

    auto field_gap = evaluate_residuals(box, samples, seed, [&](const State& x) {
        const Derivative cl = lyap_closed_loop_field(bb.sys, bb.control, x);
        const Derivative tf = lyap_target_field(bb.sys, bb.cand, bb.lambda, x);
        Vec d(cl.q_dot.size() + cl.p_dot.size());
        d << (cl.q_dot - tf.q_dot), (cl.p_dot - tf.p_dot);
        return d;
    });
    suite.results.push_back(residual_check("closed_loop_equals_target_field",
                                           field_gap.max_abs, 1e-8));
    return suite;
}

}  // namespace idapbc
