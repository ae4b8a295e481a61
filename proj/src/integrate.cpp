#include "idapbc/integrate.hpp"

#include <cmath>

namespace idapbc {

namespace {

bool finite(const Derivative& d) { return d.q_dot.allFinite() && d.p_dot.allFinite(); }

State axpy(const State& x, double a, const Derivative& d) {
    return State(x.q + a * d.q_dot, x.p + a * d.p_dot);
}

bool rk4_step(const OdeField& f, const State& x, double dt, State& out) {
    const Derivative k1 = f(x);
    if (!finite(k1)) return false;
    const Derivative k2 = f(axpy(x, 0.5 * dt, k1));
    if (!finite(k2)) return false;
    const Derivative k3 = f(axpy(x, 0.5 * dt, k2));
    if (!finite(k3)) return false;
    const Derivative k4 = f(axpy(x, dt, k3));
    if (!finite(k4)) return false;
    out.q = x.q + dt / 6.0 * (k1.q_dot + 2.0 * k2.q_dot + 2.0 * k3.q_dot + k4.q_dot);
    out.p = x.p + dt / 6.0 * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot);
    return true;
}

// Dormand-Prince 5(4) coefficients.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 5179.0 / 57600, E3 = 7571.0 / 16695, E4 = 393.0 / 640,
                 E5 = -92097.0 / 339200, E6 = 187.0 / 2100, E7 = 1.0 / 40;

struct Rk45Result {
    State y5;
    double error_norm = 0.0;
    bool finite_eval = true;
};

Rk45Result rk45_step(const OdeField& f, const State& x, double dt, double rtol, double atol) {
    Rk45Result r;
    auto combine = [&](std::initializer_list<std::pair<double, const Derivative*>> terms) {
        State out = x;
        for (const auto& [c, d] : terms) {
            out.q += dt * c * d->q_dot;
            out.p += dt * c * d->p_dot;
        }
        return out;
    };
    const Derivative k1 = f(x);
    const Derivative k2 = f(combine({{A21, &k1}}));
    const Derivative k3 = f(combine({{A31, &k1}, {A32, &k2}}));
    const Derivative k4 = f(combine({{A41, &k1}, {A42, &k2}, {A43, &k3}}));
    const Derivative k5 = f(combine({{A51, &k1}, {A52, &k2}, {A53, &k3}, {A54, &k4}}));
    const Derivative k6 =
        f(combine({{A61, &k1}, {A62, &k2}, {A63, &k3}, {A64, &k4}, {A65, &k5}}));
    r.y5 = combine({{B1, &k1}, {B3, &k3}, {B4, &k4}, {B5, &k5}, {B6, &k6}});
    const Derivative k7 = f(r.y5);
    for (const auto* k : {&k1, &k2, &k3, &k4, &k5, &k6, &k7}) {
        if (!finite(*k)) {
            r.finite_eval = false;
            return r;
        }
    }
    const State y4 = combine({{E1, &k1}, {E3, &k3}, {E4, &k4}, {E5, &k5}, {E6, &k6}});
    // error = y5 - y4 (the E row already sums the 4th-order solution except k7)
    Vec err(x.q.size() + x.p.size());
    err << (r.y5.q - y4.q - dt * E7 * k7.q_dot), (r.y5.p - y4.p - dt * E7 * k7.p_dot);
    double acc = 0.0;
    for (Index i = 0; i < err.size(); ++i) {
        const double y_abs =
            std::max(std::abs(i < x.q.size() ? x.q(i) : x.p(i - x.q.size())),
                     std::abs(i < x.q.size() ? r.y5.q(i) : r.y5.p(i - x.q.size())));
        const double scale = atol + rtol * y_abs;
        acc += (err(i) / scale) * (err(i) / scale);
    }
    r.error_norm = std::sqrt(acc / static_cast<double>(err.size()));
    return r;
}

/// Advance adaptively from t to t_target, clamping steps to land exactly on
/// the boundary.
void rk45_advance(const OdeField& f, State& x, double t, double t_target,
                  const IntegratorConfig& cfg, double& dt) {
    const double t_eps = 1e-12 * std::max(1.0, std::abs(t_target));
    while (t < t_target - t_eps) {
        double step = std::min(dt, t_target - t);
        const Rk45Result r = rk45_step(f, x, step, cfg.rtol, cfg.atol);
        if (!r.finite_eval)
            throw IntegrationError("rk45: non-finite derivative during adaptive step");
        if (r.error_norm <= 1.0) {
            x = r.y5;
            t += step;
            const double grow = r.error_norm > 0.0
                                    ? 0.9 * std::pow(r.error_norm, -0.2)
                                    : 5.0;
            dt = std::clamp(step * std::clamp(grow, 0.2, 5.0), cfg.dt_min, cfg.dt_max);
        } else {
            const double shrink = std::clamp(0.9 * std::pow(r.error_norm, -0.2), 0.2, 1.0);
            dt = step * shrink;
            if (dt < cfg.dt_min)
                throw IntegrationError("rk45: step size underflow (dt < dt_min)");
        }
    }
}

}  // namespace

Trajectory integrate(const OdeField& field, const State& x0, const IntegratorConfig& cfg,
                     const Monitor* monitor) {
    if (cfg.dt <= 0.0 || cfg.t_end <= 0.0 || cfg.record_stride <= 0)
        throw ConfigError("integrate: dt, t_end and record_stride must be positive");
    Trajectory traj;
    auto record = [&](double t, const State& x) {
        traj.times.push_back(t);
        traj.states.push_back(x);
        if (monitor) traj.monitors.push_back((*monitor)(x));
    };

    State x = x0;
    record(0.0, x);

    if (cfg.method == Method::Rk4Fixed) {
        // full steps of dt plus one shortened step to land exactly on t_end
        const long long steps = static_cast<long long>(std::floor(cfg.t_end / cfg.dt + 1e-9));
        const double remainder = cfg.t_end - static_cast<double>(steps) * cfg.dt;
        for (long long k = 1; k <= steps; ++k) {
            State next;
            if (!rk4_step(field, x, cfg.dt, next)) {
                traj.aborted = true;
                traj.abort_reason = "non-finite derivative";
                return traj;
            }
            x = next;
            if (k % cfg.record_stride == 0 || (k == steps && remainder <= 1e-9 * cfg.t_end))
                record(static_cast<double>(k) * cfg.dt, x);
        }
        if (remainder > 1e-9 * cfg.t_end) {
            State next;
            if (!rk4_step(field, x, remainder, next)) {
                traj.aborted = true;
                traj.abort_reason = "non-finite derivative";
                return traj;
            }
            record(cfg.t_end, next);
        }
        return traj;
    }

    // adaptive: march over the record grid so records land on exact times
    const double record_dt = cfg.dt * cfg.record_stride;
    const long long cells = static_cast<long long>(std::floor(cfg.t_end / record_dt + 1e-9));
    double dt = std::min(cfg.dt, cfg.dt_max);
    double t_prev = 0.0;
    for (long long k = 1; k <= cells; ++k) {
        const double t1 = static_cast<double>(k) * record_dt;
        rk45_advance(field, x, t_prev, t1, cfg, dt);
        record(t1, x);
        t_prev = t1;
    }
    if (cfg.t_end - t_prev > 1e-9 * cfg.t_end) {
        rk45_advance(field, x, t_prev, cfg.t_end, cfg, dt);
        record(cfg.t_end, x);
    }
    return traj;
}

OdeField closed_loop_field(const MechanicalSystem& sys, const ControlLaw& u_law) {
    return [sys, u_law](const State& x) { return open_loop_field(sys, x, u_law(x)); };
}

OdeField target_field_of(const MechanicalSystem& sys, const TargetDynamics& tgt) {
    return [sys, tgt](const State& x) { return target_field(sys, tgt, x); };
}

OdeField closed_loop_field(const GeneralSecondOrderSystem& sys, const ControlLaw& u_law) {
    return [sys, u_law](const State& x) { return lyap_closed_loop_field(sys, u_law, x); };
}

OdeField target_field_of(const GeneralSecondOrderSystem& sys, const LyapunovCandidate& cand,
                         const std::function<Mat(const State&)>& lambda_map) {
    return [sys, cand, lambda_map](const State& x) {
        return lyap_target_field(sys, cand, lambda_map, x);
    };
}

namespace {

/// Energy rate along the actual integrated field (chain rule on H_d).
double energy_rate(const Derivative& d, const Vec& grad_q_hd, const Vec& mdinv_p) {
    return grad_q_hd.dot(d.q_dot) + mdinv_p.dot(d.p_dot);
}

}  // namespace

Trajectory simulate_closed_loop(const MechanicalSystem& sys, const ControlLaw& u_law,
                                const TargetDynamics& tgt, const State& x0,
                                const IntegratorConfig& cfg) {
    const OdeField field = closed_loop_field(sys, u_law);
    Monitor monitor = [sys, u_law, tgt, field](const State& x) {
        MonitorRow row;
        row.hd = target_energy(tgt, x);
        const Mat mdinv = tgt.md.value(x.q).inverse();
        row.hd_dot = energy_rate(field(x), grad_q_target_energy(tgt, x), mdinv * x.p);
        row.u = u_law(x);
        row.residual_norm =
            sida_matching_residual(sys, u_law, tgt, x).cwiseAbs().maxCoeff();
        return row;
    };
    return integrate(field, x0, cfg, &monitor);
}

Trajectory simulate_closed_loop(const GeneralSecondOrderSystem& sys, const ControlLaw& u_law,
                                const LyapunovCandidate& cand,
                                const std::function<Mat(const State&)>& lambda_map,
                                const State& x0, const IntegratorConfig& cfg) {
    const OdeField field = closed_loop_field(sys, u_law);
    Monitor monitor = [sys, u_law, cand, lambda_map, field](const State& x) {
        MonitorRow row;
        row.hd = candidate_energy(cand, x);
        row.hd_dot = lyap_hd_dot(sys, cand, u_law, x);
        row.u = u_law(x);
        row.residual_norm =
            lyap_matching_residual(sys, cand, u_law, lambda_map, x).cwiseAbs().maxCoeff();
        return row;
    };
    return integrate(field, x0, cfg, &monitor);
}

double compare_fields(const OdeField& a, const OdeField& b, const State& x0,
                      const IntegratorConfig& cfg) {
    return compare_fields(a, cfg, b, cfg, x0);
}

double compare_fields(const OdeField& a, const IntegratorConfig& cfg_a, const OdeField& b,
                      const IntegratorConfig& cfg_b, const State& x0) {
    const Trajectory ta = integrate(a, x0, cfg_a);
    const Trajectory tb = integrate(b, x0, cfg_b);
    if (ta.aborted || tb.aborted)
        throw IntegrationError("compare_fields: a trajectory aborted");
    const std::size_t count = std::min(ta.states.size(), tb.states.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        worst = std::max(worst,
                         (ta.states[i].q - tb.states[i].q).cwiseAbs().maxCoeff());
        worst = std::max(worst,
                         (ta.states[i].p - tb.states[i].p).cwiseAbs().maxCoeff());
    }
    return worst;
}

double compare_with_target(const MechanicalSystem& sys, const ControlLaw& u_law,
                           const TargetDynamics& tgt, const State& x0,
                           const IntegratorConfig& cfg) {
    return compare_fields(closed_loop_field(sys, u_law), target_field_of(sys, tgt), x0, cfg);
}

double compare_with_target(const GeneralSecondOrderSystem& sys, const ControlLaw& u_law,
                           const LyapunovCandidate& cand,
                           const std::function<Mat(const State&)>& lambda_map, const State& x0,
                           const IntegratorConfig& cfg) {
    return compare_fields(closed_loop_field(sys, u_law),
                          target_field_of(sys, cand, lambda_map), x0, cfg);
}

MonotonicityReport monotonicity_check(const Trajectory& traj) {
    MonotonicityReport report;
    for (std::size_t i = 0; i + 1 < traj.monitors.size(); ++i) {
        const double h0 = traj.monitors[i].hd;
        const double h1 = traj.monitors[i + 1].hd;
        const double tol = 1e-8 * (1.0 + std::abs(h0));
        if (h1 - h0 > tol) {
            ++report.violations;
            report.max_increase = std::max(report.max_increase, h1 - h0);
        }
    }
    for (const auto& row : traj.monitors)
        report.max_positive_hd_dot = std::max(report.max_positive_hd_dot, row.hd_dot);
    return report;
}

bool classify_converged(const Trajectory& traj, const Vec& q_star,
                        const std::vector<Index>& checked_q_coords, double threshold) {
    if (traj.states.empty() || traj.aborted) return false;
    const double t_end = traj.times.back();
    const double t_from = 0.9 * t_end;
    bool any = false;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        if (traj.times[i] < t_from) continue;
        any = true;
        double err = 0.0;
        if (checked_q_coords.empty()) {
            err += (traj.states[i].q - q_star).norm();
        } else {
            double acc = 0.0;
            for (Index c : checked_q_coords) {
                const double d = traj.states[i].q(c) - q_star(c);
                acc += d * d;
            }
            err += std::sqrt(acc);
        }
        err += traj.states[i].p.norm();
        if (err >= threshold) return false;
    }
    return any;
}

}  // namespace idapbc
