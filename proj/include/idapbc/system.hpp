#pragma once

#include "idapbc/fields.hpp"
#include "idapbc/sampling.hpp"
#include "idapbc/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace idapbc {

/// Open-loop mechanical system in pH form,
///   q' = M^-1(q) p,   p' = -grad_q H(q,p) + G(q) u,
/// with H = 1/2 p' M^-1 p + V.
struct MechanicalSystem {
    Index n = 0;  // dof
    Index m = 0;  // inputs
    MatrixField inertia;      // M, n x n, SPD
    ScalarField potential;    // V
    MatrixField input_map;    // G, n x m, full column rank
    MatrixField annihilator;  // G-perp, s x n, s = n - m, G-perp G = 0

    Index s() const { return n - m; }
};

/// Desired closed loop: kinetic metric M_d, potential V_d with a minimum at
/// q_star, and the generalized-force map Lambda(q,p) in the momentum block.
struct TargetDynamics {
    MatrixField md;  // M_d, n x n, SPD
    ScalarField vd;  // V_d
    std::function<Mat(const State&)> lambda;
    Vec q_star;
    /// Coordinates over which V_d has a strict minimum. Empty means all;
    /// a strict subset covers targets with free coordinates (e.g. K_I = 0
    /// leaves V_d independent of q_a).
    std::vector<Index> min_coords;
};

struct Derivative {
    Vec q_dot;
    Vec p_dot;
};

double hamiltonian(const MechanicalSystem& sys, const State& x);
double target_energy(const TargetDynamics& tgt, const State& x);

/// grad_q H assembled analytically:
///   1/2 sum_i e_i p' (d_i M^-1) p + grad V,  d_i M^-1 = -M^-1 (d_i M) M^-1.
Vec grad_q_hamiltonian(const MechanicalSystem& sys, const State& x);

/// grad_q H_d from the target's M_d and V_d fields.
Vec grad_q_target_energy(const TargetDynamics& tgt, const State& x);

/// Gradient of the full quadratic p' A^-1(q) p (no 1/2), component i equals
/// p' (d_i A^-1) p. Used by the KE-PDE residuals.
Vec grad_q_quadratic_inv(const MatrixField& a, const State& x);

Derivative open_loop_field(const MechanicalSystem& sys, const State& x, const Vec& u);

/// Target vector field of the desired closed loop:
///   q' = M^-1 p,   p' = -M_d M^-1 grad_q H_d + Lambda(q,p) M_d^-1 p.
Derivative target_field(const MechanicalSystem& sys, const TargetDynamics& tgt, const State& x);

struct SystemValidation {
    double min_inertia_eigenvalue = 0.0;
    double max_annihilation = 0.0;   // |G-perp G|_inf over probes
    bool input_full_rank = true;
    bool annihilator_full_rank = true;
    bool ok() const {
        return min_inertia_eigenvalue > 0.0 && max_annihilation <= 1e-12 &&
               input_full_rank && annihilator_full_rank;
    }
};

SystemValidation validate_system(const MechanicalSystem& sys, const ProbeBox& box,
                                 int probes, std::uint64_t seed);

struct TargetValidation {
    double min_md_eigenvalue = 0.0;
    double grad_norm_at_qstar = 0.0;
    double min_hessian_eigenvalue = 0.0;  // over min_coords, finite-difference
    bool ok() const {
        return min_md_eigenvalue > 0.0 && grad_norm_at_qstar <= 1e-10 &&
               min_hessian_eigenvalue > 0.0;
    }
};

TargetValidation validate_target(const TargetDynamics& tgt, const ProbeBox& box,
                                 int probes, std::uint64_t seed);

}  // namespace idapbc
