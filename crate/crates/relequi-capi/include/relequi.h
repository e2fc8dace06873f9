/* C interface to the relequi library.
 *
 * Analyses of relative equilibria are returned as opaque handles; scalar
 * accessors and a JSON serializer read from them. All entry points return
 * an error code; relequi_last_error_message() describes the most recent
 * failure on the calling thread.
 */

#ifndef RELEQUI_H
#define RELEQUI_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define RELEQUI_OK 0
#define RELEQUI_ERR_NUMERIC 1
#define RELEQUI_ERR_DOMAIN 2
#define RELEQUI_ERR_INVALID 3
#define RELEQUI_ERR_PANIC 4

/* Opaque analysis result. */
typedef struct RelequiAnalysis RelequiAnalysis;

/* Lagrange point from the (beta, m1) parameterization of the mass space. */
int relequi_analyze_lagrange(double beta, double m1, RelequiAnalysis **out);

/* Euler three-body point; masses[3], ordering[3] is the left-to-right body
 * permutation ({0,1,2} for the natural order). */
int relequi_analyze_euler3(const double *masses, const int *ordering,
                           RelequiAnalysis **out);

/* Euler-Moulton collinear configuration of n bodies (n >= 2). */
int relequi_analyze_collinear(const double *masses, size_t n,
                              RelequiAnalysis **out);

void relequi_analysis_free(RelequiAnalysis *h);

/* Full report as JSON; free the string with relequi_string_free. */
char *relequi_analysis_json(const RelequiAnalysis *h);

/* Determinant of the center-manifold coefficient matrix. */
int relequi_analysis_det_center(const RelequiAnalysis *h, double *out);

/* 1 when |det| clears the degeneracy threshold. */
int relequi_analysis_nondegenerate(const RelequiAnalysis *h, int *out);

/* Signed frequency vector; writes up to cap values, reports the full length
 * in *written. Call with cap = 0 to query the length. */
int relequi_analysis_frequencies(const RelequiAnalysis *h, double *buf,
                                 size_t cap, size_t *written);

/* Exhaustive integer-relation scan of a frequency vector up to the given
 * order; emits a JSON report. */
int relequi_scan(const double *freqs, size_t n, int order, double tol,
                 char **out_json);

/* Printed Lagrange closed forms at (beta, m1); emits JSON. */
int relequi_oracle_lagrange(double beta, double m1, char **out_json);

void relequi_string_free(char *s);

/* Message for the most recent error on this thread; borrowed pointer,
 * valid until the next failing call. */
const char *relequi_last_error_message(void);

#ifdef __cplusplus
}
#endif

#endif /* RELEQUI_H */
