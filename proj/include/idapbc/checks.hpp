#pragma once

#include "idapbc/ball_beam.hpp"
#include "idapbc/cart_pendulum.hpp"

namespace idapbc {

struct CheckResult {
    std::string name;
    double value = 0.0;  // residual magnitude or margin, see note
    double tol = 0.0;
    bool pass = false;
    std::string note;
};

struct VerifySuite {
    std::vector<CheckResult> results;
    bool all_pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return !results.empty();
    }
};

/// Multiplicative perturbations for negative-control runs: a consistent
/// system must fail verification once M_d, Lambda or the control is scaled.
struct Perturbation {
    double md_scale = 1.0;
    double lambda_scale = 1.0;
    double control_scale = 1.0;
    bool any() const {
        return md_scale != 1.0 || lambda_scale != 1.0 || control_scale != 1.0;
    }
};

/// Copies with the perturbation applied to the relevant maps/fields.
CartPendulum perturbed(const CartPendulum& cp, const Perturbation& pert);
BallBeam perturbed(const BallBeam& bb, const Perturbation& pert);

VerifySuite run_cart_pendulum_checks(const CartPendulum& cp, int samples, std::uint64_t seed);
VerifySuite run_ball_beam_checks(const BallBeam& bb, int samples, std::uint64_t seed);

/// Worst relative analytic-vs-finite-difference mismatch over all registered
/// fields at `probes` points in the q-box.
double fd_oracle_worst(const FieldRegistry& fields, const ProbeBox& box, int probes,
                       std::uint64_t seed);

}  // namespace idapbc
