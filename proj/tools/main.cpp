#include "idapbc/app.hpp"
#include "idapbc/matching.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

namespace fs = std::filesystem;
using idapbc::json;

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw idapbc::ConfigError("cannot write " + path.string());
    out << content;
}

idapbc::RunConfig load(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                       const std::optional<std::string>& out_dir) {
    idapbc::RunConfig cfg = idapbc::load_config_file(config_path);
    if (seed) {
        cfg.seed = *seed;
        cfg.raw["seed"] = *seed;
    }
    if (out_dir) cfg.out_dir = *out_dir;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IDA-PBC / SIDA-PBC verification and simulation toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration")->required();
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_option("--out", out_dir, "output directory");
    };

    CLI::App* verify = app.add_subcommand("verify", "run the residual and invariant suites");
    add_common(verify);

    CLI::App* simulate = app.add_subcommand("simulate", "integrate the closed loop, write CSV");
    add_common(simulate);

    long long pde_s = 0;
    CLI::App* count = app.add_subcommand("count-pdes", "number of KE-PDEs for s unactuated dof");
    count->add_option("s", pde_s, "unactuated degrees of freedom")->required();

    CLI::App* gains = app.add_subcommand("gain-search", "grid-search validated desk gains");
    add_common(gains);

    CLI11_PARSE(app, argc, argv);

    try {
        if (count->parsed()) {
            std::cout << idapbc::pde_count(pde_s) << "\n";
            return 0;
        }

        idapbc::RunConfig cfg = load(config_path, seed, out_dir);
        const fs::path dir = cfg.out_dir;

        if (verify->parsed()) {
            json report;
            const int rc = idapbc::run_verify(cfg, std::cout, &report);
            write_file(dir / (cfg.system + "_verify.json"), report.dump(2) + "\n");
            return rc;
        }
        if (simulate->parsed()) {
            json summary;
            std::string csv;
            const int rc = idapbc::run_simulate(cfg, std::cout, &summary, &csv);
            write_file(dir / (cfg.system + "_trajectory.csv"), csv);
            write_file(dir / (cfg.system + "_summary.json"), summary.dump(2) + "\n");
            return rc;
        }
        if (gains->parsed()) {
            json result;
            const int rc = idapbc::run_gain_search(cfg, std::cout, &result);
            if (rc == 0) write_file(dir / "gain_search.json", result.dump(2) + "\n");
            return rc;
        }
    } catch (const idapbc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
