#include "idapbc/app.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace idapbc {

namespace {

Vec vec_from_json(const json& arr, const char* what) {
    if (!arr.is_array() || arr.empty())
        throw ConfigError(std::string(what) + " must be a non-empty array of numbers");
    Vec v(static_cast<Index>(arr.size()));
    Index i = 0;
    for (const auto& e : arr) {
        if (!e.is_number()) throw ConfigError(std::string(what) + " must contain numbers only");
        v(i++) = e.get<double>();
    }
    return v;
}

/// %.17g round-trips doubles and keeps the CSV byte-stable across runs.
std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::uint64_t config_hash(const json& doc) {
    const std::string canonical = doc.dump();  // object keys are sorted
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig cfg;
    cfg.raw = doc;

    if (!doc.contains("system") || !doc["system"].is_string())
        throw ConfigError("config requires a string field 'system'");
    cfg.system = doc["system"].get<std::string>();
    if (cfg.system != "cart_pendulum" && cfg.system != "ball_beam")
        throw ConfigError("unknown system '" + cfg.system +
                          "' (expected cart_pendulum or ball_beam)");

    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
            throw ConfigError("'seed' must be an integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("samples")) {
        if (!doc["samples"].is_number_integer() || doc["samples"].get<int>() <= 0)
            throw ConfigError("'samples' must be a positive integer");
        cfg.samples = doc["samples"].get<int>();
    }

    cfg.cart = cart_pendulum_default_params();
    if (cfg.system == "cart_pendulum" && doc.contains("params")) {
        const auto& p = doc["params"];
        if (!p.is_object()) throw ConfigError("'params' must be an object");
        if (p.contains("M_c")) cfg.cart.cart_mass = p["M_c"].get<double>();
        if (p.contains("m")) cfg.cart.m = p["m"].get<double>();
        if (p.contains("l")) cfg.cart.l = p["l"].get<double>();
        if (p.contains("g")) cfg.cart.g = p["g"].get<double>();
        if (cfg.cart.cart_mass <= 0 || cfg.cart.m <= 0 || cfg.cart.l <= 0 || cfg.cart.g <= 0)
            throw ConfigError("cart-pendulum physical parameters must be positive");
        if (p.contains("gains")) {
            const auto& gj = p["gains"];
            auto& g = cfg.cart.gains;
            if (gj.contains("k_e")) g.k_e = gj["k_e"].get<double>();
            if (gj.contains("k_a")) g.k_a = gj["k_a"].get<double>();
            if (gj.contains("k_u")) g.k_u = gj["k_u"].get<double>();
            if (gj.contains("K_k")) g.K_k = Mat::Constant(1, 1, gj["K_k"].get<double>());
            if (gj.contains("K_I")) g.K_I = Mat::Constant(1, 1, gj["K_I"].get<double>());
            if (gj.contains("K_P")) g.K_P = Mat::Constant(1, 1, gj["K_P"].get<double>());
        }
    }
    if (cfg.system == "ball_beam" && doc.contains("params")) {
        const auto& p = doc["params"];
        if (!p.is_object()) throw ConfigError("'params' must be an object");
        if (p.contains("eps")) cfg.ball.eps = p["eps"].get<double>();
        if (p.contains("delta")) cfg.ball.delta = p["delta"].get<double>();
        if (p.contains("K")) cfg.ball.K = p["K"].get<double>();
        if (p.contains("K_P")) cfg.ball.K_P = p["K_P"].get<double>();
        if (p.contains("cu_qa_variant")) cfg.ball.cu_qa_variant = p["cu_qa_variant"].get<bool>();
        if (cfg.ball.eps <= 0 || cfg.ball.delta <= 0 || cfg.ball.K <= 0 || cfg.ball.K_P <= 0)
            throw ConfigError("ball-beam parameters must be positive");
    }

    if (doc.contains("probe_box")) {
        const auto& b = doc["probe_box"];
        for (const char* key : {"q_min", "q_max", "p_min", "p_max"})
            if (!b.contains(key)) throw ConfigError("probe_box requires q_min/q_max/p_min/p_max");
        cfg.box.q_min = vec_from_json(b["q_min"], "probe_box.q_min");
        cfg.box.q_max = vec_from_json(b["q_max"], "probe_box.q_max");
        cfg.box.p_min = vec_from_json(b["p_min"], "probe_box.p_min");
        cfg.box.p_max = vec_from_json(b["p_max"], "probe_box.p_max");
        if ((cfg.box.q_max - cfg.box.q_min).minCoeff() < 0 ||
            (cfg.box.p_max - cfg.box.p_min).minCoeff() < 0)
            throw ConfigError("probe_box must satisfy min <= max");
        cfg.box_overridden = true;
    }

    if (doc.contains("integrator")) {
        const auto& ij = doc["integrator"];
        if (ij.contains("method")) {
            const std::string m = ij["method"].get<std::string>();
            if (m == "rk4")
                cfg.integrator.method = Method::Rk4Fixed;
            else if (m == "rk45")
                cfg.integrator.method = Method::Rk45Adaptive;
            else
                throw ConfigError("integrator.method must be rk4 or rk45");
        }
        if (ij.contains("dt")) cfg.integrator.dt = ij["dt"].get<double>();
        if (ij.contains("t_end")) cfg.integrator.t_end = ij["t_end"].get<double>();
        if (ij.contains("rtol")) cfg.integrator.rtol = ij["rtol"].get<double>();
        if (ij.contains("atol")) cfg.integrator.atol = ij["atol"].get<double>();
        if (ij.contains("dt_min")) cfg.integrator.dt_min = ij["dt_min"].get<double>();
        if (ij.contains("dt_max")) cfg.integrator.dt_max = ij["dt_max"].get<double>();
        if (ij.contains("record_stride")) cfg.integrator.record_stride = ij["record_stride"].get<int>();
        if (cfg.integrator.dt <= 0 || cfg.integrator.t_end <= 0 ||
            cfg.integrator.record_stride <= 0)
            throw ConfigError("integrator dt, t_end, record_stride must be positive");
    }

    if (doc.contains("x0")) {
        const auto& xj = doc["x0"];
        if (!xj.contains("q") || !xj.contains("p")) throw ConfigError("x0 requires q and p");
        cfg.x0_q = vec_from_json(xj["q"], "x0.q");
        cfg.x0_p = vec_from_json(xj["p"], "x0.p");
        if (cfg.x0_q.size() != cfg.x0_p.size()) throw ConfigError("x0.q and x0.p sizes differ");
        cfg.x0_overridden = true;
    }

    if (doc.contains("controller")) {
        cfg.controller = doc["controller"].get<std::string>();
        if (cfg.controller != "shaping" && cfg.controller != "zero")
            throw ConfigError("controller must be 'shaping' or 'zero'");
    }

    if (doc.contains("perturb")) {
        const auto& pj = doc["perturb"];
        if (pj.contains("md_scale")) cfg.perturb.md_scale = pj["md_scale"].get<double>();
        if (pj.contains("lambda_scale")) cfg.perturb.lambda_scale = pj["lambda_scale"].get<double>();
        if (pj.contains("control_scale")) cfg.perturb.control_scale = pj["control_scale"].get<double>();
    }

    if (doc.contains("out_dir")) cfg.out_dir = doc["out_dir"].get<std::string>();
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json suite_to_json(const VerifySuite& suite) {
    json checks = json::array();
    for (const auto& r : suite.results) {
        checks.push_back({{"name", r.name},
                          {"value", r.value},
                          {"tolerance", r.tol},
                          {"pass", r.pass},
                          {"note", r.note}});
    }
    return checks;
}

namespace {

json report_header(const RunConfig& cfg) {
    return {{"system", cfg.system},
            {"seed", cfg.seed},
            {"samples", cfg.samples},
            {"config_hash", config_hash(cfg.raw)},
            {"tolerance_ladder",
             {{"algebraic_identity", 1e-12},
              {"analytic_partials", 1e-8},
              {"fd_oracle_relative", 1e-5}}}};
}

}  // namespace

int run_verify(const RunConfig& cfg, std::ostream& out, json* report_out) {
    VerifySuite suite;
    if (cfg.system == "cart_pendulum") {
        CartPendulum cp = cart_pendulum_build(cfg.cart);
        if (cfg.box_overridden) cp.box = cfg.box;
        if (cfg.perturb.any()) cp = perturbed(cp, cfg.perturb);
        suite = run_cart_pendulum_checks(cp, cfg.samples, cfg.seed);
    } else {
        BallBeam bb = ball_beam_build(cfg.ball);
        if (cfg.box_overridden) bb.box = cfg.box;
        if (cfg.perturb.any()) bb = perturbed(bb, cfg.perturb);
        suite = run_ball_beam_checks(bb, cfg.samples, cfg.seed);
    }

    json report = report_header(cfg);
    report["checks"] = suite_to_json(suite);
    report["all_pass"] = suite.all_pass();
    if (report_out) *report_out = report;

    for (const auto& r : suite.results) {
        out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << "  value=" << r.value
            << " tol=" << r.tol;
        if (!r.note.empty()) out << "  (" << r.note << ")";
        out << "\n";
    }
    out << (suite.all_pass() ? "verification OK\n" : "verification FAILED\n");
    return suite.all_pass() ? 0 : 1;
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream csv;
    if (traj.states.empty()) return {};
    const Index n = traj.states.front().q.size();
    const Index m = traj.monitors.empty() ? 0 : traj.monitors.front().u.size();
    csv << "t";
    for (Index i = 1; i <= n; ++i) csv << ",q_" << i;
    for (Index i = 1; i <= n; ++i) csv << ",p_" << i;
    csv << ",H_d,Hd_dot";
    for (Index i = 1; i <= m; ++i) csv << ",u_" << i;
    csv << ",residual_norm\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        csv << fmt_double(traj.times[k]);
        for (Index i = 0; i < n; ++i) csv << ',' << fmt_double(traj.states[k].q(i));
        for (Index i = 0; i < n; ++i) csv << ',' << fmt_double(traj.states[k].p(i));
        if (!traj.monitors.empty()) {
            const auto& row = traj.monitors[k];
            csv << ',' << fmt_double(row.hd) << ',' << fmt_double(row.hd_dot);
            for (Index i = 0; i < m; ++i) csv << ',' << fmt_double(row.u(i));
            csv << ',' << fmt_double(row.residual_norm);
        } else {
            csv << ",,,";
        }
        csv << '\n';
    }
    return csv.str();
}

int run_simulate(const RunConfig& cfg, std::ostream& out, json* summary_out,
                 std::string* csv_out) {
    Trajectory traj;
    Vec q_star;
    std::vector<Index> checked;

    if (cfg.system == "cart_pendulum") {
        const CartPendulum cp = cart_pendulum_build(cfg.cart);
        const State x0(cfg.x0_overridden ? cfg.x0_q : cp.x0_q,
                       cfg.x0_overridden ? cfg.x0_p : cp.x0_p);
        ControlLaw u = cp.control;
        TargetDynamics tgt = cp.tgt;
        if (cfg.controller == "zero") {
            u = [](const State&) { return Vec::Zero(1).eval(); };
            // identity shaping: the monitor then records the open-loop energy
            tgt.md = cp.sys.inertia;
            tgt.vd = cp.sys.potential;
            tgt.lambda = [](const State&) { return Mat::Zero(2, 2).eval(); };
        }
        traj = simulate_closed_loop(cp.sys, u, tgt, x0, cfg.integrator);
        q_star = tgt.q_star.size() ? tgt.q_star : Vec::Zero(2);
        checked = tgt.min_coords;  // q_u only when K_I = 0
    } else {
        const BallBeam bb = ball_beam_build(cfg.ball);
        const State x0(cfg.x0_overridden ? cfg.x0_q : bb.x0_q,
                       cfg.x0_overridden ? cfg.x0_p : bb.x0_p);
        ControlLaw u = bb.control;
        if (cfg.controller == "zero") u = [](const State&) { return Vec::Zero(1).eval(); };
        traj = simulate_closed_loop(bb.sys, u, bb.cand, bb.lambda, x0, cfg.integrator);
        q_star = bb.cand.q_star;
    }

    const bool converged = classify_converged(traj, q_star, checked);
    const MonotonicityReport mono = monotonicity_check(traj);

    json summary = report_header(cfg);
    summary["converged"] = converged;
    summary["aborted"] = traj.aborted;
    summary["monotonicity_violations"] = mono.violations;
    summary["max_positive_hd_dot"] = mono.max_positive_hd_dot;
    summary["final_time"] = traj.times.empty() ? 0.0 : traj.times.back();
    if (!traj.states.empty()) {
        json fq = json::array(), fp = json::array();
        for (Index i = 0; i < traj.states.back().q.size(); ++i) {
            fq.push_back(traj.states.back().q(i));
            fp.push_back(traj.states.back().p(i));
        }
        summary["final_state"] = {{"q", fq}, {"p", fp}};
    }
    if (summary_out) *summary_out = summary;
    if (csv_out) *csv_out = trajectory_to_csv(traj);

    out << "simulated " << cfg.system << " to t=" << (traj.times.empty() ? 0.0 : traj.times.back())
        << ", converged=" << (converged ? "true" : "false")
        << ", monotonicity violations=" << mono.violations << "\n";
    return 0;
}

int run_gain_search(const RunConfig& cfg, std::ostream& out, json* result_out) {
    if (cfg.system != "cart_pendulum") {
        out << "gain-search only supports cart_pendulum\n";
        return 2;
    }
    const std::vector<double> ke_grid = {0.05, 0.1, 0.2, 0.5};
    const std::vector<double> ku_grid = {-3.0, -5.0, -8.0, -12.0};
    const std::vector<double> kk_grid = {0.5, 1.0, 2.0};
    const std::vector<double> kp_grid = {0.1, 0.2, 0.5, 1.0, 2.0};

    struct Best {
        double settle = std::numeric_limits<double>::infinity();
        CartPendulumParams params;
        bool found = false;
    } best;

    const Vec qu_lo = Vec::Constant(1, -1.0), qu_hi = Vec::Constant(1, 1.0);
    for (double ke : ke_grid)
        for (double ku : ku_grid)
            for (double kk : kk_grid) {
                CartPendulumParams params = cfg.cart;
                params.gains.k_e = ke;
                params.gains.k_u = ku;
                params.gains.K_k = Mat::Constant(1, 1, kk);
                params.gains.K_I = Mat::Zero(1, 1);
                params.gains.k_a = 1.0;
                CartPendulum cp_probe = cart_pendulum_build(params);
                const GainConditionReport gr = gain_condition_check(
                    cp_probe.ps, params.gains, qu_lo, qu_hi, 101, cp_probe.tgt.q_star,
                    cp_probe.tgt.min_coords);
                if (!gr.ok()) continue;
                for (double kp : kp_grid) {
                    params.gains.K_P = Mat::Constant(1, 1, kp);
                    const CartPendulum cp = cart_pendulum_build(params);
                    IntegratorConfig icfg = cfg.integrator;
                    icfg.method = Method::Rk4Fixed;
                    icfg.record_stride = std::max(cfg.integrator.record_stride, 10);
                    Trajectory traj = simulate_closed_loop(
                        cp.sys, cp.control, cp.tgt, State(cp.x0_q, cp.x0_p), icfg);
                    if (traj.aborted) continue;
                    if (!classify_converged(traj, cp.tgt.q_star, cp.tgt.min_coords)) continue;
                    // settling: first time after which |q_u| + |p| stays < 1e-3
                    double settle = traj.times.back();
                    for (std::size_t i = traj.states.size(); i-- > 0;) {
                        const double err = std::abs(traj.states[i].q(1)) + traj.states[i].p.norm();
                        if (err >= 1e-3) break;
                        settle = traj.times[i];
                    }
                    if (settle < best.settle) {
                        best.settle = settle;
                        best.params = params;
                        best.found = true;
                    }
                }
            }

    if (!best.found) {
        out << "no gain set passed validation and convergence\n";
        return 1;
    }
    json result = {{"k_e", best.params.gains.k_e},
                   {"k_u", best.params.gains.k_u},
                   {"K_k", best.params.gains.K_k(0, 0)},
                   {"K_P", best.params.gains.K_P(0, 0)},
                   {"settling_time", best.settle}};
    if (result_out) *result_out = result;
    out << "best gains: k_e=" << best.params.gains.k_e << " k_u=" << best.params.gains.k_u
        << " K_k=" << best.params.gains.K_k(0, 0) << " K_P=" << best.params.gains.K_P(0, 0)
        << " (settles by t=" << best.settle << ")\n";
    return 0;
}

}  // namespace idapbc
