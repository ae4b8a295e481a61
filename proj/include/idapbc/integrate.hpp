#pragma once

#include "idapbc/lyapunov.hpp"
#include "idapbc/matching.hpp"
#include "idapbc/system.hpp"

#include <optional>
#include <string>

namespace idapbc {

enum class Method { Rk4Fixed, Rk45Adaptive };

struct IntegratorConfig {
    Method method = Method::Rk4Fixed;
    double dt = 1e-3;       // fixed step (also the record grid base)
    double rtol = 1e-8;     // adaptive only
    double atol = 1e-10;
    double dt_min = 1e-12;
    double dt_max = 1e-1;
    double t_end = 10.0;
    int record_stride = 1;  // record every k-th fixed step / record-grid cell
};

struct MonitorRow {
    double hd = 0.0;
    double hd_dot = 0.0;
    Vec u;
    double residual_norm = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<MonitorRow> monitors;  // empty when integrating without one
    bool aborted = false;
    std::string abort_reason;
};

using OdeField = std::function<Derivative(const State&)>;
using Monitor = std::function<MonitorRow(const State&)>;

/// Classical RK4 at fixed dt (default, reproducible) or embedded
/// Dormand-Prince 5(4) with step control, stepping exactly onto the record
/// grid. A non-finite derivative aborts the run at the last valid state;
/// adaptive step underflow throws IntegrationError.
Trajectory integrate(const OdeField& field, const State& x0, const IntegratorConfig& cfg,
                     const Monitor* monitor = nullptr);

OdeField closed_loop_field(const MechanicalSystem& sys, const ControlLaw& u_law);
OdeField target_field_of(const MechanicalSystem& sys, const TargetDynamics& tgt);
OdeField closed_loop_field(const GeneralSecondOrderSystem& sys, const ControlLaw& u_law);
OdeField target_field_of(const GeneralSecondOrderSystem& sys, const LyapunovCandidate& cand,
                         const std::function<Mat(const State&)>& lambda_map);

/// Closed-loop simulation with H_d, Hd_dot, u and matching-residual monitors.
Trajectory simulate_closed_loop(const MechanicalSystem& sys, const ControlLaw& u_law,
                                const TargetDynamics& tgt, const State& x0,
                                const IntegratorConfig& cfg);

Trajectory simulate_closed_loop(const GeneralSecondOrderSystem& sys, const ControlLaw& u_law,
                                const LyapunovCandidate& cand,
                                const std::function<Mat(const State&)>& lambda_map,
                                const State& x0, const IntegratorConfig& cfg);

/// Integrates both fields from the same initial condition with identical
/// stepping and returns the largest state difference over the records.
double compare_fields(const OdeField& a, const OdeField& b, const State& x0,
                      const IntegratorConfig& cfg);

/// Variant with a separate configuration for the reference side, for
/// tolerance-scaling studies (e.g. adaptive run vs fine fixed-step run).
double compare_fields(const OdeField& a, const IntegratorConfig& cfg_a, const OdeField& b,
                      const IntegratorConfig& cfg_b, const State& x0);

double compare_with_target(const MechanicalSystem& sys, const ControlLaw& u_law,
                           const TargetDynamics& tgt, const State& x0,
                           const IntegratorConfig& cfg);

double compare_with_target(const GeneralSecondOrderSystem& sys, const ControlLaw& u_law,
                           const LyapunovCandidate& cand,
                           const std::function<Mat(const State&)>& lambda_map, const State& x0,
                           const IntegratorConfig& cfg);

struct MonotonicityReport {
    int violations = 0;          // recorded H_d increases beyond tolerance
    double max_increase = 0.0;   // largest recorded consecutive increase
    double max_positive_hd_dot = 0.0;
};

/// Counts records where H_d rose by more than 1e-8 * (1 + |H_d|) between
/// consecutive samples.
MonotonicityReport monotonicity_check(const Trajectory& traj);

/// Converged iff sum of |q_i - q*_i| over the checked coordinates plus |p|
/// stays below 1e-3 for the final 10% of the horizon. Empty coordinate list
/// means all of q.
bool classify_converged(const Trajectory& traj, const Vec& q_star,
                        const std::vector<Index>& checked_q_coords = {},
                        double threshold = 1e-3);

}  // namespace idapbc
