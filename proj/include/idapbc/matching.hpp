#pragma once

#include "idapbc/system.hpp"

namespace idapbc {

/// Gyroscopic-force data: J_2(q,p) = sum_i (e_i' M_d^-1 p) U_i(q) with every
/// U_i skew-symmetric.
struct GyroscopicSpec {
    std::vector<MatrixField> u_mats;  // n fields, each n x n
};

/// Generalized-force data: free matrices Q_i defining
/// 2 C(q,p) = sum_i (p' M_d^-1 Q_i M_d^-1 p) e_i.
struct GeneralizedForceSpec {
    std::vector<MatrixField> q_mats;  // n fields, each n x n
};

/// Q_i choice that reproduces a skew J_2 action: C = J_2 M_d^-1 p. Row l of
/// Q_j is 2 e_j' U_l, so p' M_d^-1 Q_j M_d^-1 p = 2 e_j' J_2 M_d^-1 p.
GeneralizedForceSpec embed_gyroscopic(const GyroscopicSpec& j2spec);

Mat build_j2(const GyroscopicSpec& spec, const MatrixField& md, const State& x);
Mat build_lambda(const GeneralizedForceSpec& spec, const MatrixField& md, const State& x);

/// Kinetic-energy matching residual of standard IDA-PBC (p-dependent),
///   G-perp { grad_q(p'M^-1 p) - M_d M^-1 grad_q(p'M_d^-1 p) + 2 J_2 M_d^-1 p }.
Vec ida_ke_residual(const MechanicalSystem& sys, const TargetDynamics& tgt,
                    const GyroscopicSpec& j2spec, const State& x);

/// Potential-energy matching residual, G-perp { grad V - M_d M^-1 grad V_d }.
Vec pe_residual(const MechanicalSystem& sys, const TargetDynamics& tgt, const Vec& q);

/// Energy-shaping control of standard IDA-PBC plus damping injection,
///   u = (G'G)^-1 G' [grad_q H - M_d M^-1 grad_q H_d + J_2 M_d^-1 p]
///       - K_p G' M_d^-1 p.
Vec ida_control(const MechanicalSystem& sys, const TargetDynamics& tgt,
                const GyroscopicSpec& j2spec, const State& x, const Mat& kp);

/// Row-wise KE-PDE machinery:
///   A_k = M_d (sum_i v_ki d_i M^-1) M_d
///   Gamma_kj = sum_i v_ki (M_d M^-1)_ij
///   B_k = M_d (sum_i Gamma_ki d_i M_d^-1) M_d
struct KeRowTerms {
    Mat a_k;
    Vec gamma_k;  // row Gamma_k. as a vector
    Mat b_k;
};

KeRowTerms ke_row_terms(const MechanicalSystem& sys, const TargetDynamics& tgt,
                         Index k, const Vec& q);

/// W_k = [stacked rows v_k' U_i] + transpose (symmetric by construction).
Mat ke_row_gyroscopic(const MechanicalSystem& sys, const GyroscopicSpec& j2spec, Index k, const Vec& q);

/// B_k - A_k - W_k; the KE-PDE holds iff this vanishes for every k.
Mat ke_row_residual(const MechanicalSystem& sys, const TargetDynamics& tgt,
                    const GyroscopicSpec& j2spec, Index k, const Vec& q);

/// Number of scalar KE-PDEs for s unactuated directions: s(s+1)(s+2)/6.
long long pde_count(long long s);

/// KE-PDE residual with generalized forces, C = Lambda M_d^-1 p:
///   G-perp { grad_q(p'M^-1 p) - M_d M^-1 grad_q(p'M_d^-1 p) + 2 C }.
Vec sida_ke_residual(const MechanicalSystem& sys, const TargetDynamics& tgt,
                     const GeneralizedForceSpec& gspec, const State& x);

/// Per-row matrix form of the generalized-force KE-PDE,
///   (A_k - B_k) + sum_i v_ki Q_i;
/// contracting twice with M_d^-1 p gives component k of sida_ke_residual.
/// The PDE holds iff the symmetric part vanishes.
Mat sida_ke_pde_matrix(const MechanicalSystem& sys, const TargetDynamics& tgt,
                       const GeneralizedForceSpec& gspec, Index k, const Vec& q);

/// Simultaneous energy-shaping-and-damping control,
///   u = (G'G)^-1 G' [grad_q H - M_d M^-1 grad_q H_d + Lambda M_d^-1 p].
Vec sida_control(const MechanicalSystem& sys, const TargetDynamics& tgt, const State& x);

using ControlLaw = std::function<Vec(const State&)>;

/// Full n-vector matching residual of the closed loop against the target,
///   [-grad_q H + G u] - [-M_d M^-1 grad_q H_d + Lambda M_d^-1 p].
Vec sida_matching_residual(const MechanicalSystem& sys, const ControlLaw& u_law,
                           const TargetDynamics& tgt, const State& x);

struct StabilityCheck {
    double value = 0.0;  // p' M_d^-1 Lambda M_d^-1 p
    bool ok = false;     // value <= 1e-12
};

StabilityCheck stability_condition(const TargetDynamics& tgt, const State& x);

/// Sufficient (not necessary) condition Lambda + Lambda' <= 0, exposed
/// separately from the pointwise quadratic-form check.
bool lambda_sym_nonpositive(const TargetDynamics& tgt, const State& x, double tol = 1e-10);

/// d/dt H_d along the target field (chain rule, analytic). Equals
/// p' M_d^-1 Lambda M_d^-1 p, and -1/2 |y_D|^2 when Lambda + Lambda' <= 0.
double hd_dot(const MechanicalSystem& sys, const TargetDynamics& tgt, const State& x);

/// Damping output with the sign convention fixed by the energy identity:
///   y_D = psd_sqrt(-(Lambda + Lambda')) M_d^-1 p,  so  Hd_dot = -1/2 |y_D|^2.
Vec damping_output(const TargetDynamics& tgt, const State& x);

}  // namespace idapbc
