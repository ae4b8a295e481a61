#pragma once

#include "idapbc/lyapunov.hpp"

namespace idapbc {

/// Ball on a beam after the preliminary feedback / change of coordinates:
/// q_a is the beam angle, q_u the ball position, mass diag(sqrt(2(e+q_u^2)), 1),
/// and the momentum dynamics carry the non-Hamiltonian damping -delta p_u.
struct BallBeamParams {
    double eps = 1.0;
    double delta = 1.0;
    double K = 1.0;
    double K_P = 1.0;
    /// The published control's c_u has an isolated q_a in one denominator
    /// where the dynamics are q_u-dependent; the q_u form is the one that
    /// matches (kept switchable for documentation).
    bool cu_qa_variant = false;
};

struct BallBeam {
    BallBeamParams params;
    GeneralSecondOrderSystem sys;
    LyapunovCandidate cand;
    ControlLaw control;
    std::function<Mat(const State&)> lambda;
    ProbeBox box;
    Vec x0_q, x0_p;
    FieldRegistry fields;
};

BallBeam ball_beam_build(const BallBeamParams& params);

/// [ sqrt(2e+q_u^2)  sqrt(e+q_u^2) ; sqrt(e+q_u^2)  sqrt(2e+q_u^2) ],
/// whose determinant is exactly eps.
Mat ball_beam_first_bracket(double eps, double q_u);

struct PdDecomposition {
    Mat skew_part;     // M_d-sandwiched skew contribution to Lambda
    Mat damping_part;  // -(delta/eps) * bracket
    Mat bracket;       // the matrix whose positive definiteness is asserted
    double min_bracket_eigenvalue = 0.0;
    bool pd_ok = false;
};

/// Split of the example's Lambda into its workless (skew) part and the
/// negative definite damping part.
PdDecomposition ball_beam_pd_decomposition(const BallBeamParams& params, const State& x);

}  // namespace idapbc
