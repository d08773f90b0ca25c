/* C interface of the kslab shared library.
 *
 * All state lives behind opaque handles; every call that can fail returns a
 * kslab_status, with a human-readable message available from
 * kslab_last_error() until the next call on the same thread.
 */
#ifndef KSLAB_CAPI_H
#define KSLAB_CAPI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kslab_status {
  KSLAB_OK = 0,
  KSLAB_ERR_SCENARIO = 1, /* a scenario failed while running */
  KSLAB_ERR_CONFIG = 2,   /* configuration parse or validation error */
  KSLAB_ERR_INVALID = 3,  /* bad arguments (null handle, bad index, ...) */
  KSLAB_ERR_IO = 4        /* filesystem problem */
} kslab_status;

typedef struct kslab_batch kslab_batch; /* opaque scenario batch */

const char* kslab_version(void);

/* Message describing the most recent failure on this thread ("" if none). */
const char* kslab_last_error(void);

/* --- presets ----------------------------------------------------------- */

int kslab_preset_count(void);
const char* kslab_preset_name(int index);     /* NULL when out of range */
const char* kslab_preset_summary(int index);  /* NULL when out of range */

/* --- batches ----------------------------------------------------------- */

kslab_status kslab_batch_from_file(const char* path, kslab_batch** out);
kslab_status kslab_batch_from_preset(const char* name, kslab_batch** out);
void kslab_batch_free(kslab_batch* batch);

int kslab_batch_count(const kslab_batch* batch);
const char* kslab_batch_name(const kslab_batch* batch, int index);

/* Overrides the seed of every scenario in the batch. */
kslab_status kslab_batch_set_seed(kslab_batch* batch, uint64_t seed);

/* Runs every scenario, writing artifacts under out_dir/<scenario name>/.
 * Returns KSLAB_ERR_SCENARIO if any scenario failed (the rest still ran). */
kslab_status kslab_batch_run(const kslab_batch* batch, const char* out_dir);

/* --- golden comparison -------------------------------------------------- */

/* Compares artifacts against a golden directory within the given tolerances.
 * A textual report is written to `report` (truncated to report_capacity,
 * always NUL-terminated when report_capacity > 0). Returns KSLAB_OK on match,
 * KSLAB_ERR_SCENARIO on mismatch. */
kslab_status kslab_compare_dirs(const char* artifact_dir, const char* golden_dir,
                                double rel_tol, double abs_tol, char* report,
                                size_t report_capacity);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* KSLAB_CAPI_H */
