// speclab command-line front end: runs experiments from config files,
// executes the verification suites, prints estimated constants and envelope
// fits.
//
// Exit codes: 0 success, 2 invalid configuration, 3 numeric blow-up (unless
// the config declares blow-up as the expected outcome).

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "speclab/acceptance.hpp"
#include "speclab/runner.hpp"

namespace {

int cmd_run(const std::string& config_path) {
    std::ifstream is(config_path);
    if (!is) {
        std::cerr << "error: cannot open config " << config_path << "\n";
        return 2;
    }
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
        return 2;
    }
    try {
        const speclab::RunConfig cfg = speclab::config_from_json(j);
        const speclab::RunManifest m = speclab::run(cfg);
        for (const auto& ev : m.events) std::cout << "event: " << ev << "\n";
        std::cout << "wrote " << m.outputs.size() << " file(s) in " << cfg.output_dir << " ("
                  << m.wall_seconds << " s)\n";
        return m.exit_code;
    } catch (const speclab::validation_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const speclab::numeric_blowup& e) {
        std::cerr << "numeric blow-up: " << e.what() << "\n";
        return 3;
    } catch (const speclab::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_verify(const std::string& suite) {
    try {
        const auto rep = speclab::acceptance::verify(suite);
        speclab::acceptance::print_report(rep, std::cout);
        if (rep.all_pass) return 0;
        for (const auto& r : rep.results)
            if (!r.pass) {
                std::cerr << "failed criterion #" << r.id << ": " << r.name << "\n";
                return 1;
            }
        return 1;
    } catch (const speclab::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_constants(int n, int M, double t0) {
    try {
        speclab::EstimationSpec spec;
        spec.t0 = t0;
        const speclab::ContractionConstants k = speclab::estimate_constants(n, M, spec);
        nlohmann::json j{{"C", k.C},       {"Delta", k.Delta},     {"alpha_h", k.alpha_h},
                         {"delta_k", k.delta_k}, {"c_mu", k.c_mu}, {"c_sup_mu", k.c_sup_mu},
                         {"C_G", k.C_G},   {"C_K", k.C_K},         {"C_m", k.C_m}};
        std::cout << j.dump(1) << "\n";
        return 0;
    } catch (const speclab::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_fit(const std::string& field_path) {
    std::ifstream is(field_path);
    if (!is) {
        std::cerr << "error: cannot open field file " << field_path << "\n";
        return 2;
    }
    try {
        nlohmann::json j;
        is >> j;
        const speclab::ModeField v = speclab::field_from_json(j);
        const speclab::EnvelopeFitResult fit = speclab::envelope_fit(v);
        nlohmann::json out{{"C", fit.C}, {"s", fit.s}, {"underdetermined", fit.underdetermined}};
        std::cout << out.dump(1) << "\n";
        return 0;
    } catch (const speclab::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: bad field file: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral mode-space laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "execute an experiment from a JSON config");
    run_cmd->add_option("config", config_path, "path to the run configuration")->required();

    std::string suite = "acceptance";
    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    verify_cmd->add_option("suite", suite, "acceptance|kernel|envelope|testbeds|all");

    int n = 3, M = 4;
    double t0 = 0.0;
    auto* const_cmd = app.add_subcommand("constants", "print estimated contraction constants");
    const_cmd->add_option("n", n, "space dimension")->required();
    const_cmd->add_option("M", M, "lattice truncation")->required();
    const_cmd->add_option("--t0", t0, "chart anchor time");

    std::string field_path;
    auto* fit_cmd = app.add_subcommand("fit", "print the decay-envelope fit of a field file");
    fit_cmd->add_option("field", field_path, "path to a serialized mode field")->required();

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) return cmd_run(config_path);
    if (verify_cmd->parsed()) return cmd_verify(suite);
    if (const_cmd->parsed()) return cmd_constants(n, M, t0);
    if (fit_cmd->parsed()) return cmd_fit(field_path);
    return 2;
}
