/* C interface to the openbo library. All handles are opaque; every call that
 * can fail returns an obo_status and leaves a message in obo_last_error(). */

#ifndef OPENBO_OPENBO_H
#define OPENBO_OPENBO_H

#include <stddef.h>

#if defined(OBO_BUILDING_LIBRARY)
#define OBO_API __attribute__((visibility("default")))
#else
#define OBO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum obo_status {
    OBO_OK = 0,
    OBO_ERR_ARGUMENT = 1, /* null handle, index out of range */
    OBO_ERR_CONFIG = 2,
    OBO_ERR_NUMERIC = 3,
    OBO_ERR_INTERNAL = 4
} obo_status;

typedef struct obo_config obo_config;
typedef struct obo_table obo_table;

OBO_API const char* obo_version(void);

/* Message and error-kind name of the last failure on the calling thread. */
OBO_API const char* obo_last_error(void);
OBO_API const char* obo_last_error_kind(void);

OBO_API obo_status obo_config_create(obo_config** out);
OBO_API void obo_config_destroy(obo_config* config);
OBO_API obo_status obo_config_set(obo_config* config, const char* key, const char* value);
/* Keys already set are not overwritten by the file. */
OBO_API obo_status obo_config_load_file(obo_config* config, const char* path);

/* Subcommands: spectrum, steady, pz-scan, pz-gt, gamma-scan, disscom-check. */
OBO_API obo_status obo_run(const obo_config* config, const char* subcommand, obo_table** out);

OBO_API size_t obo_table_rows(const obo_table* table);
OBO_API size_t obo_table_cols(const obo_table* table);
OBO_API const char* obo_table_column_name(const obo_table* table, size_t col);
OBO_API const char* obo_table_column_unit(const obo_table* table, size_t col);
OBO_API obo_status obo_table_value(const obo_table* table, size_t row, size_t col, double* out);
OBO_API size_t obo_table_header_count(const obo_table* table);
OBO_API const char* obo_table_header_key(const obo_table* table, size_t index);
OBO_API const char* obo_table_header_value(const obo_table* table, size_t index);
/* Value of a header key, or NULL when absent. */
OBO_API const char* obo_table_header_lookup(const obo_table* table, const char* key);
/* path == NULL writes to stdout. */
OBO_API obo_status obo_table_write_csv(const obo_table* table, const char* path);
OBO_API void obo_table_destroy(obo_table* table);

/* Doubled spin block eigenvalues at theta = pi/2, in units of mu B. */
OBO_API obo_status obo_helical_spectrum(double phi, double phi_a, double g, double re[4], double im[4]);
/* P_z of the zero-mode steady state. */
OBO_API obo_status obo_helical_steady_pz(double g, double theta, double* pz);
/* Final P_z after one drive period mu B * T = duration. */
OBO_API obo_status obo_helical_polarization(double g, double theta, double duration, size_t steps, int exact,
                                            double* pz);

#ifdef __cplusplus
}
#endif

#endif
