#include "anharmonic_probe.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "aprobe/config.hpp"
#include "aprobe/metrology.hpp"

using namespace aprobe;

struct ap_session {
    ExperimentConfig config;
    std::string last_error;
};

namespace {

thread_local std::string g_last_error;

ap_status status_from(ErrorCode code) {
    switch (code) {
        case ErrorCode::config: return AP_ERROR_CONFIG;
        case ErrorCode::validity: return AP_ERROR_VALIDITY;
        case ErrorCode::capability: return AP_ERROR_CAPABILITY;
        case ErrorCode::internal: return AP_ERROR_INTERNAL;
    }
    return AP_ERROR_INTERNAL;
}

template <typename F>
ap_status guarded(std::string* sink, F&& body) {
    try {
        body();
        return AP_OK;
    } catch (const Error& e) {
        if (sink) *sink = e.what();
        g_last_error = e.what();
        return status_from(e.code());
    } catch (const std::exception& e) {
        if (sink) *sink = e.what();
        g_last_error = e.what();
        return AP_ERROR_INTERNAL;
    }
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* ap_version(void) {
    return "1.0.0";
}

ap_status ap_session_create(const char* config_json, ap_session** out_session) {
    if (!out_session) return AP_ERROR_CONFIG;
    *out_session = nullptr;
    if (!config_json) {
        g_last_error = "config_json must not be NULL";
        return AP_ERROR_CONFIG;
    }
    ExperimentConfig cfg;
    const ap_status st = guarded(nullptr, [&] { cfg = parse_config(config_json); });
    if (st != AP_OK) return st;
    *out_session = new ap_session{std::move(cfg), {}};
    return AP_OK;
}

void ap_session_destroy(ap_session* session) {
    delete session;
}

ap_status ap_session_set_option(ap_session* session, const char* key, const char* value) {
    if (!session) return AP_ERROR_CONFIG;
    if (!key || !value) {
        session->last_error = "option key/value must not be NULL";
        return AP_ERROR_CONFIG;
    }
    return guarded(&session->last_error, [&] {
        const std::string k = key, v = value;
        if (k == "seed") {
            session->config.seed = std::stoull(v);
        } else if (k == "threads") {
            const int t = std::stoi(v);
            if (t < 1) throw ConfigError("threads must be >= 1");
            session->config.threads = t;
        } else if (k == "strict") {
            if (v == "1" || v == "true")
                session->config.params.strict = true;
            else if (v == "0" || v == "false")
                session->config.params.strict = false;
            else
                throw ConfigError("strict must be one of 0/1/true/false");
        } else {
            throw ConfigError("unknown option '" + k + "'");
        }
    });
}

ap_status ap_session_check(ap_session* session, char** out_report) {
    if (!session || !out_report) return AP_ERROR_CONFIG;
    return guarded(&session->last_error, [&] {
        std::string report = check_report(session->config);
        if (session->config.params.strict)
            for (Kind kind : session->config.kinds) enforce_validity(session->config.params, kind);
        *out_report = copy_string(report);
        if (!*out_report) throw std::bad_alloc();
    });
}

ap_status ap_session_run(ap_session* session, const char* command, const char* out_path) {
    if (!session) return AP_ERROR_CONFIG;
    if (!command) {
        session->last_error = "command must not be NULL";
        return AP_ERROR_CONFIG;
    }
    return guarded(&session->last_error, [&] {
        run_command(command, session->config, out_path ? out_path : "");
    });
}

const char* ap_session_last_error(const ap_session* session) {
    return session ? session->last_error.c_str() : "";
}

const char* ap_last_error(void) {
    return g_last_error.c_str();
}

void ap_string_free(char* s) {
    std::free(s);
}

ap_status ap_qfi_closed(const char* kind, double lambda, double np, double* out) {
    if (!out) return AP_ERROR_CONFIG;
    return guarded(nullptr, [&] {
        if (np < 0.0) throw ConfigError("np must be >= 0");
        const Kind k = kind_from_name(kind ? kind : "");
        if (k == Kind::harmonic) throw ConfigError("kind must be quartic or cubic");
        *out = k == Kind::quartic ? qfi_quartic_closed(lambda, np) : qfi_cubic_closed(lambda, np);
    });
}

ap_status ap_cramer_rao(double fisher_information, double m, double* out) {
    if (!out) return AP_ERROR_CONFIG;
    return guarded(nullptr, [&] { *out = cramer_rao(fisher_information, m); });
}

ap_status ap_snr_bound(double value, double qfi, double m, double* out) {
    if (!out) return AP_ERROR_CONFIG;
    return guarded(nullptr, [&] { *out = snr_bound(value, qfi, m); });
}

}  // extern "C"
