#include "idapbc/integrate.hpp"

#include "idapbc/ball_beam.hpp"
#include "idapbc/cart_pendulum.hpp"

#include <doctest.h>

#include "support.hpp"

using namespace idapbc;

namespace {

OdeField oscillator_field() {
    return [](const State& x) {
        Derivative d;
        d.q_dot = x.p;
        d.p_dot = -x.q;
        return d;
    };
}

double oscillator_error(double dt) {
    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 2.0 * std::acos(-1.0);
    cfg.record_stride = 1 << 20;  // record the endpoint only
    const State x0(Vec::Constant(1, 1.0), Vec::Zero(1));
    const Trajectory traj = integrate(oscillator_field(), x0, cfg);
    const State& xf = traj.states.back();
    return std::max(std::abs(xf.q(0) - 1.0), std::abs(xf.p(0)));
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("zero field keeps the state constant") {
    const OdeField zero = [](const State& x) {
        return Derivative{Vec::Zero(x.q.size()), Vec::Zero(x.p.size())};
    };
    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    const State x0(Vec::Constant(2, 0.4), Vec::Constant(2, -0.3));
    const Trajectory traj = integrate(zero, x0, cfg);
    for (const auto& x : traj.states) {
        CHECK((x.q - x0.q).cwiseAbs().maxCoeff() == 0.0);
        CHECK((x.p - x0.p).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("harmonic oscillator returns after one period") {
    CHECK(oscillator_error(1e-3) < 1e-6);
}

TEST_CASE("rk4 shows fourth-order convergence") {
    const double e4 = oscillator_error(4e-3);
    const double e2 = oscillator_error(2e-3);
    const double e1 = oscillator_error(1e-3);
    CHECK(e4 / e2 >= 14.0);
    CHECK(e2 / e1 >= 14.0);
}

TEST_CASE("unforced energy drift stays below 1e-8 over 10 s") {
    const MechanicalSystem sys = cart_pendulum_original(cart_pendulum_default_params());
    const OdeField field = [&sys](const State& x) {
        return open_loop_field(sys, x, Vec::Zero(1));
    };
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 10.0;
    cfg.record_stride = 100;
    Vec q0(2), p0(2);
    q0 << 0.0, 0.4;
    p0 << 0.05, -0.1;
    const Trajectory traj = integrate(field, State(q0, p0), cfg);
    const double h0 = hamiltonian(sys, traj.states.front());
    double drift = 0.0;
    for (const auto& x : traj.states)
        drift = std::max(drift, std::abs(hamiltonian(sys, x) - h0));
    CHECK(drift <= 1e-8);
}

TEST_CASE("closed loop follows the target for both examples") {
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 10.0;
    cfg.record_stride = 10;

    const CartPendulum cp = cart_pendulum_build(cart_pendulum_default_params());
    const State x0(cp.x0_q, cp.x0_p);
    CHECK(compare_with_target(cp.sys, cp.control, cp.tgt, x0, cfg) <= 1e-6);

    const BallBeam bb = ball_beam_build({});
    CHECK(compare_with_target(bb.sys, bb.control, bb.cand, bb.lambda, State(bb.x0_q, bb.x0_p),
                              cfg) <= 1e-6);
}

TEST_CASE("equilibrium start gives zero difference") {
    const CartPendulum cp = cart_pendulum_build(cart_pendulum_default_params());
    IntegratorConfig cfg;
    cfg.t_end = 1.0;
    CHECK(compare_with_target(cp.sys, cp.control, cp.tgt,
                              State(Vec::Zero(2), Vec::Zero(2)), cfg) < 1e-14);
}

TEST_CASE("a mismatched target diverges from the closed loop") {
    const CartPendulum cp = cart_pendulum_build(cart_pendulum_default_params());
    TargetDynamics wrong = cp.tgt;
    wrong.md = fields::scale(1.3, cp.tgt.md);
    IntegratorConfig cfg;
    cfg.t_end = 5.0;
    cfg.record_stride = 10;
    const double diff =
        compare_with_target(cp.sys, cp.control, wrong, State(cp.x0_q, cp.x0_p), cfg);
    CHECK(diff > 1e-2);
}

TEST_CASE("energy descends monotonically along both closed loops") {
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 10.0;
    cfg.record_stride = 10;

    const CartPendulum cp = cart_pendulum_build(cart_pendulum_default_params());
    const Trajectory tcp =
        simulate_closed_loop(cp.sys, cp.control, cp.tgt, State(cp.x0_q, cp.x0_p), cfg);
    CHECK(monotonicity_check(tcp).violations == 0);

    const BallBeam bb = ball_beam_build({});
    const Trajectory tbb = simulate_closed_loop(bb.sys, bb.control, bb.cand, bb.lambda,
                                                State(bb.x0_q, bb.x0_p), cfg);
    CHECK(monotonicity_check(tbb).violations == 0);
}

TEST_CASE("flipping the damping sign destroys the descent") {
    const CartPendulum cp = cart_pendulum_build(cart_pendulum_default_params());
    // same shaping terms, damping fed back with the wrong sign
    const GainSet g = cp.params.gains;
    const ControlLaw flipped = [cp, g](const State& x) {
        const Vec y = y_n(cp.ps, g, x);
        const Mat k = k_matrix(cp.ps, g, x.q.tail(1));
        return (cp.control(x) + 2.0 * g.K_P * k.transpose() * y).eval();
    };
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 3.0;
    cfg.record_stride = 10;
    const Trajectory traj =
        simulate_closed_loop(cp.sys, flipped, cp.tgt, State(cp.x0_q, cp.x0_p), cfg);
    CHECK(monotonicity_check(traj).violations > 0);
}

TEST_CASE("skew lambda keeps the shaped energy constant") {
    // pure energy shaping (no damping): integrate the target field directly
    const MechanicalSystem sys = testing::synthetic_system();
    TargetDynamics tgt = testing::synthetic_target();
    Mat skew(2, 2);
    skew << 0.0, 0.4, -0.4, 0.0;
    tgt.lambda = [skew](const State&) { return skew; };
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 5.0;
    cfg.record_stride = 10;
    Vec q0(2), p0(2);
    q0 << 0.3, -0.2;
    p0 << 0.1, 0.2;
    const OdeField field = target_field_of(sys, tgt);
    const Monitor monitor = [&](const State& x) {
        MonitorRow row;
        row.hd = target_energy(tgt, x);
        row.hd_dot = hd_dot(sys, tgt, x);
        row.u = Vec::Zero(1);
        return row;
    };
    const Trajectory traj = integrate(field, State(q0, p0), cfg, &monitor);
    const double h0 = traj.monitors.front().hd;
    for (const auto& row : traj.monitors) CHECK(std::abs(row.hd - h0) < 1e-8);
    CHECK(monotonicity_check(traj).violations == 0);
}

TEST_CASE("recorded energy rate matches the slope of recorded energy") {
    const CartPendulum cp = cart_pendulum_build(cart_pendulum_default_params());
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 2.0;
    cfg.record_stride = 1;
    const Trajectory traj =
        simulate_closed_loop(cp.sys, cp.control, cp.tgt, State(cp.x0_q, cp.x0_p), cfg);
    for (std::size_t i = 1; i + 1 < traj.monitors.size(); i += 50) {
        const double slope =
            (traj.monitors[i + 1].hd - traj.monitors[i - 1].hd) / (2.0 * cfg.dt);
        // tolerance scaled like the monotonicity tolerance: H_d is O(40) here
        CHECK(std::abs(slope - traj.monitors[i].hd_dot) <
              1e-6 * (1.0 + std::abs(traj.monitors[i].hd)));
    }
}

TEST_CASE("difference against a fine reference shrinks with rtol") {
    const CartPendulum cp = cart_pendulum_build(cart_pendulum_default_params());
    const State x0(cp.x0_q, cp.x0_p);
    IntegratorConfig ref;
    ref.method = Method::Rk4Fixed;
    ref.dt = 1e-4;
    ref.t_end = 5.0;
    ref.record_stride = 50000;  // endpoint only

    auto diff_at = [&](double rtol) {
        IntegratorConfig adaptive;
        adaptive.method = Method::Rk45Adaptive;
        adaptive.dt = 5.0;  // one record cell; steps limited by rtol, not the grid
        adaptive.dt_max = 2.0;
        adaptive.record_stride = 1;
        adaptive.rtol = rtol;
        adaptive.atol = 1e-3 * rtol;
        adaptive.t_end = 5.0;
        return compare_fields(closed_loop_field(cp.sys, cp.control), adaptive,
                              target_field_of(cp.sys, cp.tgt), ref, x0);
    };
    const double loose = diff_at(1e-5);
    const double tight = diff_at(1e-6);
    CHECK(loose / tight >= 5.0);
}

TEST_CASE("convergence classification") {
    const CartPendulum cp = cart_pendulum_build(cart_pendulum_default_params());
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 30.0;
    cfg.record_stride = 100;
    const Trajectory traj =
        simulate_closed_loop(cp.sys, cp.control, cp.tgt, State(cp.x0_q, cp.x0_p), cfg);
    CHECK(classify_converged(traj, cp.tgt.q_star, cp.tgt.min_coords));

    // undamped oscillation never settles
    const MechanicalSystem osc = testing::harmonic_oscillator();
    const OdeField field = [&osc](const State& x) {
        return open_loop_field(osc, x, Vec::Zero(1));
    };
    IntegratorConfig cfg2;
    cfg2.dt = 1e-3;
    cfg2.t_end = 10.0;
    cfg2.record_stride = 100;
    const Trajectory osc_traj = integrate(field, State(Vec::Constant(1, 0.5), Vec::Zero(1)), cfg2);
    CHECK(!classify_converged(osc_traj, Vec::Zero(1)));
}

TEST_CASE("non-finite fields abort with the last valid state") {
    const OdeField blowup = [](const State& x) {
        Derivative d;
        d.q_dot = Vec::Constant(1, 1.0 / (1.0 - x.q(0)));  // finite until q = 1
        d.p_dot = Vec::Constant(1, std::sqrt(0.9 - x.q(0)));  // NaN past 0.9
        return d;
    };
    IntegratorConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 5.0;
    const Trajectory traj = integrate(blowup, State(Vec::Zero(1), Vec::Zero(1)), cfg);
    CHECK(traj.aborted);
    CHECK(!traj.states.empty());
    CHECK(traj.states.back().q(0) < 1.0);
}

TEST_CASE("adaptive step underflow raises an integration error") {
    const OdeField stiff_blowup = [](const State& x) {
        Derivative d;
        d.q_dot = Vec::Constant(1, x.q(0) * x.q(0) + 1.0);  // finite-time escape
        d.p_dot = Vec::Zero(1);
        return d;
    };
    IntegratorConfig cfg;
    cfg.method = Method::Rk45Adaptive;
    cfg.dt = 0.5;
    cfg.t_end = 3.0;  // escape time from q=1 is pi/4 + ... < 3
    cfg.dt_min = 1e-10;
    cfg.rtol = 1e-10;
    cfg.atol = 1e-12;
    CHECK_THROWS_AS(
        (void)integrate(stiff_blowup, State(Vec::Constant(1, 1.0), Vec::Zero(1)), cfg),
        IntegrationError);
}

TEST_CASE("nonpositive step or horizon is rejected") {
    IntegratorConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(
        (void)integrate(oscillator_field(), State(Vec::Zero(1), Vec::Zero(1)), cfg),
        ConfigError);
    cfg.dt = 1e-3;
    cfg.t_end = -1.0;
    CHECK_THROWS_AS(
        (void)integrate(oscillator_field(), State(Vec::Zero(1), Vec::Zero(1)), cfg),
        ConfigError);
}

TEST_CASE("adaptive integrator reproduces the oscillator accurately") {
    IntegratorConfig cfg;
    cfg.method = Method::Rk45Adaptive;
    cfg.dt = 0.05;
    cfg.t_end = 2.0 * std::acos(-1.0);
    cfg.rtol = 1e-9;
    cfg.atol = 1e-11;
    const Trajectory traj = integrate(oscillator_field(), State(Vec::Constant(1, 1.0), Vec::Zero(1)), cfg);
    CHECK(std::abs(traj.states.back().q(0) - 1.0) < 1e-7);
    CHECK(std::abs(traj.states.back().p(0)) < 1e-7);
}

}  // TEST_SUITE
