#include "idapbc/app.hpp"

#include <doctest.h>

#include <sstream>

using namespace idapbc;

namespace {

json base_config(const std::string& system) {
    return {{"system", system},
            {"seed", 2024},
            {"samples", 60},
            {"integrator", {{"method", "rk4"}, {"dt", 1e-3}, {"t_end", 2.0},
                            {"record_stride", 10}}}};
}

}  // namespace

TEST_SUITE("app") {

TEST_CASE("config schema violations are rejected") {
    CHECK_THROWS_AS((void)parse_config(json::array()), ConfigError);
    CHECK_THROWS_AS((void)parse_config(json{{"seed", 1}}), ConfigError);
    CHECK_THROWS_AS((void)parse_config(json{{"system", "segway"}}), ConfigError);

    json bad_samples = base_config("cart_pendulum");
    bad_samples["samples"] = 0;
    CHECK_THROWS_AS((void)parse_config(bad_samples), ConfigError);

    json bad_box = base_config("cart_pendulum");
    bad_box["probe_box"] = {{"q_min", {1.0, 1.0}}, {"q_max", {-1.0, -1.0}},
                            {"p_min", {-1.0, -1.0}}, {"p_max", {1.0, 1.0}}};
    CHECK_THROWS_AS((void)parse_config(bad_box), ConfigError);

    json bad_method = base_config("cart_pendulum");
    bad_method["integrator"]["method"] = "euler";
    CHECK_THROWS_AS((void)parse_config(bad_method), ConfigError);

    json bad_params = base_config("ball_beam");
    bad_params["params"] = {{"eps", -1.0}};
    CHECK_THROWS_AS((void)parse_config(bad_params), ConfigError);
}

TEST_CASE("defaults are filled in") {
    const RunConfig cfg = parse_config(base_config("cart_pendulum"));
    CHECK(cfg.samples == 60);
    CHECK(cfg.seed == 2024);
    CHECK(cfg.controller == "shaping");
    CHECK(!cfg.perturb.any());
    CHECK(cfg.cart.gains.k_u < 0.0);
}

TEST_CASE("verify returns 0 for both shipped systems") {
    for (const char* system : {"cart_pendulum", "ball_beam"}) {
        std::ostringstream log;
        json report;
        const RunConfig cfg = parse_config(base_config(system));
        CHECK(run_verify(cfg, log, &report) == 0);
        CHECK(report["all_pass"].get<bool>());
        CHECK(report["seed"].get<std::uint64_t>() == 2024);
        CHECK(report.contains("config_hash"));
        CHECK(report.contains("tolerance_ladder"));
    }
}

TEST_CASE("verify fails and names the broken check under perturbation") {
    json doc = base_config("cart_pendulum");
    doc["perturb"] = {{"lambda_scale", 1.01}};
    std::ostringstream log;
    json report;
    const int rc = run_verify(parse_config(doc), log, &report);
    CHECK(rc == 1);
    bool matching_failed = false;
    for (const auto& check : report["checks"]) {
        if (check["name"] == "matching_residual" && !check["pass"].get<bool>())
            matching_failed = true;
    }
    CHECK(matching_failed);
    CHECK(log.str().find("[FAIL] matching_residual") != std::string::npos);
}

TEST_CASE("simulate writes the pinned CSV header and a summary") {
    std::ostringstream log;
    json summary;
    std::string csv;
    const RunConfig cfg = parse_config(base_config("cart_pendulum"));
    CHECK(run_simulate(cfg, log, &summary, &csv) == 0);
    CHECK(csv.rfind("t,q_1,q_2,p_1,p_2,H_d,Hd_dot,u_1,residual_norm\n", 0) == 0);
    CHECK(summary.contains("converged"));
    CHECK(summary.contains("final_state"));
    CHECK(summary["monotonicity_violations"].get<int>() == 0);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    const RunConfig cfg = parse_config(base_config("ball_beam"));
    std::ostringstream log1, log2;
    json s1, s2;
    std::string c1, c2;
    CHECK(run_simulate(cfg, log1, &s1, &c1) == 0);
    CHECK(run_simulate(cfg, log2, &s2, &c2) == 0);
    CHECK(c1 == c2);
    CHECK(s1.dump() == s2.dump());

    json v1, v2;
    CHECK(run_verify(cfg, log1, &v1) == run_verify(cfg, log2, &v2));
    CHECK(v1.dump() == v2.dump());
}

TEST_CASE("zero-control run keeps the energy flat and does not converge") {
    json doc = base_config("cart_pendulum");
    doc["controller"] = "zero";
    doc["integrator"]["t_end"] = 5.0;
    std::ostringstream log;
    json summary;
    std::string csv;
    CHECK(run_simulate(parse_config(doc), log, &summary, &csv) == 0);
    CHECK(!summary["converged"].get<bool>());
    CHECK(summary["monotonicity_violations"].get<int>() == 0);
    CHECK(std::abs(summary["max_positive_hd_dot"].get<double>()) < 1e-9);
}

TEST_CASE("config hash is order-independent and value-sensitive") {
    const json a = {{"system", "ball_beam"}, {"seed", 1}};
    const json b = {{"seed", 1}, {"system", "ball_beam"}};
    CHECK(config_hash(a) == config_hash(b));
    const json c = {{"seed", 2}, {"system", "ball_beam"}};
    CHECK(config_hash(a) != config_hash(c));
}

}  // TEST_SUITE
