#pragma once

#include "idapbc/checks.hpp"
#include "idapbc/integrate.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace idapbc {

using nlohmann::json;

/// Parsed run configuration. Custom systems are deliberately not loadable
/// from config files (fields need analytic partials); only the built-in
/// example ids are accepted.
struct RunConfig {
    std::string system;  // "cart_pendulum" | "ball_beam"
    std::uint64_t seed = 12345;
    int samples = 200;
    ProbeBox box;                 // defaults to the example's box
    bool box_overridden = false;
    IntegratorConfig integrator;
    Vec x0_q, x0_p;               // defaults to the example's x0
    bool x0_overridden = false;
    std::string controller = "shaping";  // "shaping" | "zero"
    Perturbation perturb;
    std::string out_dir = ".";
    json raw;

    // system parameters (already merged with defaults)
    CartPendulumParams cart;
    BallBeamParams ball;
};

/// Throws ConfigError on schema violations (unknown system, missing or
/// non-positive sample count, malformed boxes, ...).
RunConfig parse_config(const json& doc);
RunConfig load_config_file(const std::string& path);

/// 64-bit FNV-1a over the canonical (sorted-key) serialized config.
std::uint64_t config_hash(const json& doc);

/// Exit code 0: all checks pass; 1: at least one failed.
int run_verify(const RunConfig& cfg, std::ostream& out, json* report_out);

/// Writes the trajectory CSV (header t,q_1..q_n,p_1..p_n,H_d,Hd_dot,
/// u_1..u_m,residual_norm) and a JSON summary; exit code 0 on success.
int run_simulate(const RunConfig& cfg, std::ostream& out, json* summary_out,
                 std::string* csv_out);

/// Coarse grid search over (k_e, k_u, K_k, K_P) validated by
/// gain_condition_check and ranked by closed-loop settling; prints the
/// best gain set. Exit code 0 iff a validated set exists.
int run_gain_search(const RunConfig& cfg, std::ostream& out, json* result_out);

std::string trajectory_to_csv(const Trajectory& traj);

json suite_to_json(const VerifySuite& suite);

}  // namespace idapbc
