// Command-line runner for the anharmonic-probe engine. Talks to the engine
// exclusively through the C API in anharmonic_probe.h.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "anharmonic_probe.h"

namespace {

int fail(const std::string& message, ap_status status) {
    std::cerr << "error: " << message << "\n";
    return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anharmonic-probe: pulsed-optomechanics anharmonicity estimation engine"};
    app.set_version_flag("--version", ap_version());
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::string seed, threads;
    bool check_only = false, strict = false;

    const char* command_names[] = {"ratio-curve", "validate-map", "qfi-table", "estimate",
                                   "losses"};
    const char* command_help[] = {
        "homodyne-vs-quantum information ratio over photon number",
        "brute-force loop vs effective Kerr map scaling suite",
        "closed-form QFI, Cramer-Rao and SNR table (any scale)",
        "Cramer-Rao saturation run and adaptive loop closure",
        "pulse-loss sweep diagnostics"};
    std::string chosen;
    for (int i = 0; i < 5; ++i) {
        CLI::App* sub = app.add_subcommand(command_names[i], command_help[i]);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_path, "output path (overrides config output.path)");
        sub->add_option("--seed", seed, "seed override");
        sub->add_option("--threads", threads, "worker threads for sweeps");
        sub->add_flag("--check", check_only, "validate config, print validity flags, exit");
        sub->add_flag("--strict", strict, "promote validity warnings to errors");
        sub->callback([&chosen, i, &command_names] { chosen = command_names[i]; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    std::ifstream file(config_path);
    if (!file) return fail("cannot read config file '" + config_path + "'", AP_ERROR_CONFIG);
    std::stringstream buffer;
    buffer << file.rdbuf();
    const std::string config_json = buffer.str();

    ap_session* session = nullptr;
    ap_status st = ap_session_create(config_json.c_str(), &session);
    if (st != AP_OK) return fail(ap_last_error(), st);

    if (!seed.empty()) {
        st = ap_session_set_option(session, "seed", seed.c_str());
        if (st != AP_OK) {
            const int code = fail(ap_session_last_error(session), st);
            ap_session_destroy(session);
            return code;
        }
    }
    if (!threads.empty()) {
        st = ap_session_set_option(session, "threads", threads.c_str());
        if (st != AP_OK) {
            const int code = fail(ap_session_last_error(session), st);
            ap_session_destroy(session);
            return code;
        }
    }
    if (strict) ap_session_set_option(session, "strict", "1");

    if (check_only) {
        char* report = nullptr;
        st = ap_session_check(session, &report);
        if (st != AP_OK) {
            const int code = fail(ap_session_last_error(session), st);
            ap_session_destroy(session);
            return code;
        }
        std::cout << report;
        ap_string_free(report);
        ap_session_destroy(session);
        return 0;
    }

    st = ap_session_run(session, chosen.c_str(), out_path.empty() ? nullptr : out_path.c_str());
    if (st != AP_OK) {
        const int code = fail(ap_session_last_error(session), st);
        ap_session_destroy(session);
        return code;
    }
    ap_session_destroy(session);
    return 0;
}
