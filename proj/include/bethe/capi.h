/* C interface to the bethe-lab core.
 *
 * Every entry point returns a status code; no exception crosses this
 * boundary.  Reports are opaque handles owning a JSON document.  Error text
 * for the most recent failure on the calling thread is available through
 * bethe_last_error until the next call from that thread.
 */
#ifndef BETHE_CAPI_H
#define BETHE_CAPI_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bethe_status {
  BETHE_OK = 0,
  BETHE_ERR_CONFIG = 1,       /* invalid parameters or input */
  BETHE_ERR_VERIFICATION = 2, /* a checked inequality failed */
  BETHE_ERR_NUMERICS = 3      /* singular solve, non-convergence, overflow */
} bethe_status;

typedef struct bethe_report bethe_report;

/* Runs one named command with a JSON parameter object.  On success *out
 * receives a report handle the caller must free.  On failure *out is null. */
bethe_status bethe_run(const char* command, const char* params_json, bethe_report** out);

/* Borrowed pointer to the report's JSON text; valid until the report is
 * freed. */
const char* bethe_report_json(const bethe_report* report);

void bethe_report_free(bethe_report* report);

/* Message for this thread's most recent failure; empty string if none. */
const char* bethe_last_error(void);

const char* bethe_version(void);

/* Closed forms for the clean lattice, exposed directly so bindings can
 * cross-check without going through JSON. */
bethe_status bethe_free_forward_green(int branching, double energy, double eta, double* out_re,
                                      double* out_im);
bethe_status bethe_free_lattice_green(int branching, double energy, double eta, double* out_re,
                                      double* out_im);
bethe_status bethe_free_lyapunov(int branching, double energy, double* out);
bethe_status bethe_spectrum_edges(int branching, double lambda, double* out_lo, double* out_hi);

#ifdef __cplusplus
}
#endif

#endif /* BETHE_CAPI_H */
