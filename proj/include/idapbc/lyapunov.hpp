#pragma once

#include "idapbc/matching.hpp"
#include "idapbc/system.hpp"

namespace idapbc {

/// Second-order system that need not carry Lagrangian or Hamiltonian
/// structure:
///   q' = M^-1(q) p,   p' = g(q) + f(q,p) + G u.
/// (Coincides with the standard pH system when g + f = -grad_q H.)
struct GeneralSecondOrderSystem {
    Index n = 0;
    Index m = 0;
    MatrixField mass;  // SPD at probes
    VectorField g_vec;
    std::function<Vec(const State&)> f_vec;  // must vanish at p = 0
    MatrixField input_map;  // n x m
};

/// Energy-style Lyapunov candidate 1/2 p' M_d^-1 p + V_d with minimum at
/// q_star.
struct LyapunovCandidate {
    MatrixField md;  // the desired metric M_d itself
    ScalarField vd;
    Vec q_star;
    std::vector<Index> min_coords;
};

/// C(q,p) = g + f + G u + 1/2 M_d M^-1 nabla_q'[M_d^-1 p] p + M_d M^-1 grad V_d.
/// The candidate derivative factors as Hd_dot = p' M_d^-1 C.
Vec extract_c(const GeneralSecondOrderSystem& sys, const LyapunovCandidate& cand,
              const ControlLaw& u_law, const State& x);

/// d/dt of the candidate along the closed loop, assembled analytically.
double lyap_hd_dot(const GeneralSecondOrderSystem& sys, const LyapunovCandidate& cand,
                   const ControlLaw& u_law, const State& x);

/// Matching residual of the closed loop against the target form:
///   [g + f + G u] - [-M_d M^-1 grad_q H_d + Lambda M_d^-1 p].
Vec lyap_matching_residual(const GeneralSecondOrderSystem& sys, const LyapunovCandidate& cand,
                           const ControlLaw& u_law,
                           const std::function<Mat(const State&)>& lambda_map, const State& x);

double candidate_energy(const LyapunovCandidate& cand, const State& x);

/// Closed-loop vector field q' = M^-1 p, p' = g + f + G u.
Derivative lyap_closed_loop_field(const GeneralSecondOrderSystem& sys, const ControlLaw& u_law,
                                  const State& x);

/// Target vector field q' = M^-1 p, p' = -M_d M^-1 grad_q H_d + Lambda M_d^-1 p.
Derivative lyap_target_field(const GeneralSecondOrderSystem& sys, const LyapunovCandidate& cand,
                             const std::function<Mat(const State&)>& lambda_map, const State& x);

/// p' M_d^-1 Lambda M_d^-1 p and its sign check.
StabilityCheck lyap_stability_condition(const LyapunovCandidate& cand,
                                        const std::function<Mat(const State&)>& lambda_map,
                                        const State& x);

}  // namespace idapbc
