#pragma once

#include "idapbc/matching.hpp"
#include "idapbc/system.hpp"

namespace idapbc {

/// Mechanical system partitioned into actuated coordinates q_a (dim m) and
/// unactuated coordinates q_u (dim s), with the structure that survives an
/// inner partial-feedback-linearization loop:
///   - inertia blocks depend on q_u only, m_aa constant (A1/A2),
///   - V(q) = V_a(q_a) + V_u(q_u) (A3),
///   - m_au satisfies the gradient conditions A4/A5, with potential V_N
///     such that Jacobian(V_N) = -m_au.
///
/// Component fields are declared over their own coordinate slice (m_au, m_uu,
/// v_u, v_n over q_u; v_a over q_a); pfl_system lifts them to the full q.
struct PartitionedSystem {
    Index m = 0;
    Index s = 0;
    Mat m_aa;
    MatrixField m_au;  // m x s, over q_u
    MatrixField m_uu;  // s x s, over q_u
    ScalarField v_a;   // over q_a
    ScalarField v_u;   // over q_u
    VectorField v_n;   // R^s -> R^m, over q_u, with analytic Jacobian

    Index n() const { return m + s; }
};

struct GainSet {
    double k_e = 0.0;
    double k_a = 1.0;
    double k_u = 0.0;
    Mat K_k;  // m x m, PSD
    Mat K_I;  // m x m, PSD
    Mat K_P;  // m x m, PD
};

/// Post-PFL system in pH form: inertia blkdiag(I_m, m_uu), potential V_u,
/// input map [I_m; -m_au'] and annihilator [m_au' | I_s].
MechanicalSystem pfl_system(const PartitionedSystem& ps);

/// K(q_u) = k_e I + k_a K_k + k_u K_k m_au m_uu^-1 m_au'.
Mat k_matrix(const PartitionedSystem& ps, const GainSet& g, const Vec& q_u);

/// The shaped inverse metric as a field of the full configuration:
///   [ k_e k_a I + k_a^2 K_k          X ]          X = -k_a k_u K_k m_au m_uu^-1
///   [ X'                             Y ],         Y = k_e k_u m_uu^-1
///                                                   + k_u^2 m_uu^-1 m_au' K_k m_au m_uu^-1.
MatrixField md_inv_field(const PartitionedSystem& ps, const GainSet& g);

Mat md_inv_pfl(const PartitionedSystem& ps, const GainSet& g, const Vec& q_u);

/// V_d(q) = k_e k_u V_u(q_u) + 1/2 |k_a q_a + k_u V_N(q_u)|^2_{K_I}, with the
/// gradient assembled from the supplied Jacobian of V_N.
ScalarField vd_field(const PartitionedSystem& ps, const GainSet& g);

double vd_pfl(const PartitionedSystem& ps, const GainSet& g, const Vec& q);

/// Simultaneous shaping-and-damping control for the post-PFL system.
/// Throws GainConditionError when K(q_u) is singular.
Vec pfl_control(const PartitionedSystem& ps, const GainSet& g, const State& x);

/// The generalized-force matrix matched by pfl_control (so that the
/// closed loop equals the target built from md_inv_field / vd_field).
Mat pfl_lambda(const PartitionedSystem& ps, const GainSet& g, const State& x);

/// Damping output y_N = k_a p_a - k_u m_au m_uu^-1 p_u.
Vec y_n(const PartitionedSystem& ps, const GainSet& g, const State& x);

/// Residual of M_d^-1 G-tilde = [k_a I; -k_u m_uu^-1 m_au'] K (identically
/// zero by construction of M_d^-1).
Mat input_factorization_residual(const PartitionedSystem& ps, const GainSet& g, const Vec& q_u);

/// p' (Delta_1 + Delta_2 + Delta_3) p, the K_P-free part of the quadratic
/// form of pfl_lambda. Vanishes identically, which is what makes
/// Hd_dot = -|G-tilde' M_d^-1 p|^2_{K_P}.
double workless_shaping_residual(const PartitionedSystem& ps, const GainSet& g, const State& x);

/// The three Delta matrices themselves (exposed for the block-form
/// cross-checks in the tests).
struct ShapingTerms {
    Mat d1, d2, d3;
};
ShapingTerms lambda_shaping_terms(const PartitionedSystem& ps, const GainSet& g, const State& x);

/// Target dynamics assembled from the gain-dependent metric, potential and
/// generalized-force matrix.
TargetDynamics pfl_target(const PartitionedSystem& ps, const GainSet& g,
                              Vec q_star, std::vector<Index> min_coords = {});

struct GridPoint {
    Vec q_u;
    double value = 0.0;
};

struct GainConditionReport {
    GridPoint min_abs_det_k;       // A6(a): must stay away from zero
    GridPoint min_mdinv_eigenvalue;  // A6(b): M_d^-1 PD on the grid
    double vd_grad_norm_at_qstar = 0.0;
    double vd_min_hessian_eigenvalue = 0.0;  // over min_coords
    bool det_ok = false;
    bool mdinv_ok = false;
    bool vd_min_ok = false;
    bool ok() const { return det_ok && mdinv_ok && vd_min_ok; }
};

/// Grid evaluation of the gain conditions over a q_u box. The box is an
/// input: the conditions typically hold only on a sub-interval of the
/// pendulum's upper half plane, not on all of it.
GainConditionReport gain_condition_check(const PartitionedSystem& ps, const GainSet& g,
                                         const Vec& qu_min, const Vec& qu_max,
                                         int grid_per_dim, const Vec& q_star,
                                         const std::vector<Index>& min_coords = {});

struct PartitionedValidation {
    double max_a4 = 0.0;      // cross-partial symmetry of m_au columns
    double max_row_jac = 0.0;  // row-Jacobian symmetry (gradient fields)
    double max_vn_jac = 0.0;   // |Jacobian(V_N) + m_au|_inf
    bool ok(double tol = 1e-10) const {
        return max_a4 <= tol && max_row_jac <= tol && max_vn_jac <= tol;
    }
};

PartitionedValidation validate_partitioned(const PartitionedSystem& ps, const Vec& qu_min,
                                           const Vec& qu_max, int probes, std::uint64_t seed);

}  // namespace idapbc
