/* C interface to the anharmonic-probe engine.
 *
 * A session wraps one parsed experiment configuration (a single JSON
 * document, see docs/config-schema.md). All functions return ap_status;
 * on failure the session keeps a human-readable message retrievable via
 * ap_session_last_error(). Sessions are not thread-safe; use one per thread.
 */
#ifndef ANHARMONIC_PROBE_H
#define ANHARMONIC_PROBE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ap_status {
    AP_OK = 0,
    AP_ERROR_INTERNAL = 1,
    AP_ERROR_CONFIG = 2,
    AP_ERROR_VALIDITY = 3,
    AP_ERROR_CAPABILITY = 4
} ap_status;

typedef struct ap_session ap_session;

const char* ap_version(void);

/* Parses and validates config_json; on AP_OK the caller owns *out_session
 * and must release it with ap_session_destroy. On failure *out_session is
 * NULL and ap_last_error() carries the message. */
ap_status ap_session_create(const char* config_json, ap_session** out_session);
void ap_session_destroy(ap_session* session);

/* Overrides: key is one of "seed", "threads", "strict"; value is parsed
 * from the string ("strict" accepts "0"/"1"/"true"/"false"). */
ap_status ap_session_set_option(ap_session* session, const char* key, const char* value);

/* Derived validity flags as a text report; free with ap_string_free. */
ap_status ap_session_check(ap_session* session, char** out_report);

/* Runs one command (ratio-curve, validate-map, qfi-table, estimate, losses)
 * and writes the result table to out_path (NULL or "" uses the config's
 * output.path, falling back to "<command>.<format>"). */
ap_status ap_session_run(ap_session* session, const char* command, const char* out_path);

const char* ap_session_last_error(const ap_session* session);
/* Message from the most recent failed call that had no session. */
const char* ap_last_error(void);

void ap_string_free(char* s);

/* Closed-form helpers, valid at any physical scale. kind is "quartic" or
 * "cubic". */
ap_status ap_qfi_closed(const char* kind, double lambda, double np, double* out);
ap_status ap_cramer_rao(double fisher_information, double m, double* out);
ap_status ap_snr_bound(double value, double qfi, double m, double* out);

#ifdef __cplusplus
}
#endif

#endif /* ANHARMONIC_PROBE_H */
