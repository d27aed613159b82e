/*
 * simbf — stacked-metasurface hybrid beamforming simulator, C interface.
 *
 * All objects are opaque handles created and destroyed by the library.
 * Every fallible call returns a simbf_status; on failure a human-readable
 * message is available from simbf_last_error() (thread-local).
 */
#ifndef SIMBF_H
#define SIMBF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SIMBF_API __declspec(dllexport)
#else
#define SIMBF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum simbf_status {
  SIMBF_OK = 0,
  SIMBF_ERR_INVALID_ARGUMENT = 1,
  SIMBF_ERR_PARSE = 2,
  SIMBF_ERR_NUMERIC = 3,
  SIMBF_ERR_IO = 4,
  SIMBF_ERR_INTERNAL = 5
} simbf_status;

typedef struct simbf_scenario simbf_scenario;
typedef struct simbf_record simbf_record;

SIMBF_API const char* simbf_version(void);
SIMBF_API const char* simbf_status_name(simbf_status status);

/* Message describing the most recent failure on this thread; never NULL. */
SIMBF_API const char* simbf_last_error(void);

/* Scenario lifecycle. Parsed scenarios are immutable apart from the
 * dedicated setters below. */
SIMBF_API simbf_status simbf_scenario_load(const char* path, simbf_scenario** out);
SIMBF_API simbf_status simbf_scenario_parse(const char* json_text, simbf_scenario** out);
SIMBF_API void simbf_scenario_free(simbf_scenario* scenario);

SIMBF_API simbf_status simbf_scenario_set_seed(simbf_scenario* scenario, uint64_t seed);
SIMBF_API simbf_status simbf_scenario_set_threads(simbf_scenario* scenario, int threads);
SIMBF_API simbf_status simbf_scenario_set_output_dir(simbf_scenario* scenario, const char* dir);

/* 16 hex characters plus terminator; buffer must hold >= 17 bytes. */
SIMBF_API simbf_status simbf_scenario_hash(const simbf_scenario* scenario, char* buffer,
                                           size_t length);

/* Pipeline entry points. Each produces a record the caller owns. */
SIMBF_API simbf_status simbf_run(const simbf_scenario* scenario, simbf_record** out);
SIMBF_API simbf_status simbf_validate(const simbf_scenario* scenario, long samples,
                                      simbf_record** out);
SIMBF_API simbf_status simbf_limits(const simbf_scenario* scenario, simbf_record** out);

SIMBF_API void simbf_record_free(simbf_record* record);

/* Writes the record's CSV/JSON files under `directory` (defaults to the
 * scenario's configured output directory when NULL). */
SIMBF_API simbf_status simbf_record_write(const simbf_record* record, const char* directory);

/* JSON summary text; owned by the record, valid until simbf_record_free. */
SIMBF_API const char* simbf_record_summary(const simbf_record* record);

/* 1 when a validation record passed all checks, 0 when it failed or the
 * record is not a validation record. */
SIMBF_API simbf_status simbf_record_passed(const simbf_record* record, int* passed);

#ifdef __cplusplus
}
#endif

#endif /* SIMBF_H */
