#pragma once

#include "idapbc/pfl.hpp"

namespace idapbc {

/// Inverted pendulum on a cart. q_a is the cart position, q_u the pendulum
/// angle from the upright; the controller stabilises the upright position.
/// Closed loops are built on the post-PFL form (m_uu = m l^2,
/// m_au = m l cos q_u, potential m g l cos q_u).
struct CartPendulumParams {
    double cart_mass = 1.0;   // kg (enters the original model only)
    double m = 1.0;           // pendulum mass, kg
    double l = 1.0;           // pendulum length, m
    double g = 9.8;           // m/s^2
    GainSet gains;            // k_a = 1, K_I = 0 for this controller
};

/// The shipped desk gains (validated by gain_condition_check on
/// q_u in [-1, 1]; see tools' gain-search command).
CartPendulumParams cart_pendulum_default_params();

struct CartPendulum {
    CartPendulumParams params;
    PartitionedSystem ps;
    MechanicalSystem sys;  // post-PFL pH system
    TargetDynamics tgt;    // gain-dependent metric/potential + explicit Lambda
    ControlLaw control;    // the explicit (locally stabilising) control law
    std::function<Mat(const State&)> lambda;
    ProbeBox box;
    Vec x0_q, x0_p;        // default initial condition for simulations
    FieldRegistry fields;  // every analytic partial, for the FD oracle suite
};

CartPendulum cart_pendulum_build(const CartPendulumParams& params);

/// Scalar K(q_u) = k_e + K_k + k_u K_k m cos^2(q_u).
double cart_pendulum_k(const CartPendulumParams& params, double q_u);

/// The original (pre-PFL) cart-pendulum as a pH system, with the full
/// nonconstant inertia matrix. Used where a nondegenerate quadratic
/// momentum term is wanted (energy conservation, KE-PDE probes).
MechanicalSystem cart_pendulum_original(const CartPendulumParams& params);

}  // namespace idapbc
