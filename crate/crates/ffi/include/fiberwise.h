#ifndef FIBERWISE_H
#define FIBERWISE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FwStatus {
  FwStatus_Ok = 0,
  FwStatus_NullPointer = 1,
  FwStatus_InvalidUtf8 = 2,
  /**
   * The config was rejected; the message lists every problem.
   */
  FwStatus_InvalidConfig = 3,
  /**
   * The run finished but at least one diagnostic errored.
   */
  FwStatus_DiagnosticFailed = 4,
  FwStatus_Io = 5,
  FwStatus_Panic = 6,
} FwStatus;

typedef enum FwVerdict {
  /**
   * The diagnostic produces no verdict, or it errored.
   */
  FwVerdict_None = 0,
  FwVerdict_EvidenceFor = 1,
  FwVerdict_Refuted = 2,
  FwVerdict_Inconclusive = 3,
} FwVerdict;

typedef enum FwFormat {
  FwFormat_Json = 0,
  FwFormat_Csv = 1,
} FwFormat;

typedef struct FwReport FwReport;

typedef struct FwScenario FwScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *fw_version(void);

/**
 * Message for the last failure on this thread, or NULL. Valid until the next call into the library.
 */
const char *fw_last_error(void);

size_t fw_builtin_count(void);

/**
 * Static name of built-in `index`, or NULL when out of range.
 */
const char *fw_builtin_name(size_t index);

/**
 * Loads a scenario from a built-in name, a file path, or inline JSON.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FwStatus fw_scenario_load(const char *source, struct FwScenario **out);

/**
 * Replaces every seed in the scenario.
 *
 * # Safety
 * `scenario` must come from [`fw_scenario_load`] and not yet be freed.
 */
enum FwStatus fw_scenario_set_seed(struct FwScenario *scenario, uint64_t seed);

/**
 * The scenario as a JSON config document. Free with [`fw_string_free`].
 *
 * # Safety
 * `scenario` must be a live handle or NULL.
 */
char *fw_scenario_json(const struct FwScenario *scenario);

/**
 * # Safety
 * `scenario` must come from [`fw_scenario_load`] or be NULL.
 */
void fw_scenario_free(struct FwScenario *scenario);

/**
 * Runs every diagnostic. On [`FwStatus::DiagnosticFailed`] the report is still produced.
 *
 * # Safety
 * `scenario` must be a live handle and `out` a valid pointer.
 */
enum FwStatus fw_scenario_run(const struct FwScenario *scenario, struct FwReport **out);

/**
 * # Safety
 * `report` must be a live handle or NULL.
 */
size_t fw_report_diagnostic_count(const struct FwReport *report);

/**
 * Verdict of diagnostic `index`.
 *
 * # Safety
 * `report` must be a live handle or NULL.
 */
enum FwVerdict fw_report_verdict(const struct FwReport *report, size_t index);

/**
 * Serialized report. JSON gives one document; CSV gives every table, each preceded by a
 * `# <file name>` line. Free with [`fw_string_free`].
 *
 * # Safety
 * `report` must be a live handle or NULL.
 */
char *fw_report_emit(const struct FwReport *report, enum FwFormat format);

/**
 * # Safety
 * `report` must come from [`fw_scenario_run`] or be NULL.
 */
void fw_report_free(struct FwReport *report);

/**
 * # Safety
 * `s` must come from this library or be NULL.
 */
void fw_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FIBERWISE_H */
