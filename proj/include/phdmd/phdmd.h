/* C interface to the phdmd library.
 *
 * Objects are opaque handles created by the constructor-style functions and
 * released with the matching *_free function (NULL is accepted). Every
 * function that can fail returns a phdmd_status; on failure a description is
 * available from phdmd_last_error() in the calling thread until the next
 * failing call on that thread.
 *
 * Strings returned through char** out-parameters are allocated by the library
 * and must be released with phdmd_string_free(). Matrices cross the boundary
 * as column-major double arrays.
 */
#ifndef PHDMD_PHDMD_H
#define PHDMD_PHDMD_H

#include <stddef.h>
#include <stdint.h>

#if defined(PHDMD_BUILDING_LIBRARY)
#define PHDMD_API __attribute__((visibility("default")))
#else
#define PHDMD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum phdmd_status {
  PHDMD_OK = 0,
  PHDMD_ERR_INVALID_ARGUMENT = 1,
  PHDMD_ERR_CONFIG = 2,
  PHDMD_ERR_IO = 3,
  PHDMD_ERR_STRUCTURE = 4,
  PHDMD_ERR_NUMERICAL = 5,
  PHDMD_ERR_INTERNAL = 6
} phdmd_status;

typedef struct phdmd_config phdmd_config;
typedef struct phdmd_system phdmd_system;
typedef struct phdmd_trajectory phdmd_trajectory;
typedef struct phdmd_result phdmd_result;

PHDMD_API const char* phdmd_version(void);
PHDMD_API const char* phdmd_status_string(phdmd_status status);
/* Message of the last failure on this thread ("" if none). */
PHDMD_API const char* phdmd_last_error(void);
PHDMD_API void phdmd_string_free(char* s);

/* ---- configuration ---- */
PHDMD_API phdmd_status phdmd_config_preset(const char* name, phdmd_config** out);
PHDMD_API phdmd_status phdmd_config_parse(const char* json_text, phdmd_config** out);
PHDMD_API phdmd_status phdmd_config_load(const char* path, phdmd_config** out);
PHDMD_API phdmd_status phdmd_config_set_seed(phdmd_config* cfg, uint64_t seed);
PHDMD_API phdmd_status phdmd_config_to_json(const phdmd_config* cfg, char** out);
PHDMD_API void phdmd_config_free(phdmd_config* cfg);

/* ---- port-Hamiltonian systems ---- */
PHDMD_API phdmd_status phdmd_system_msd(int n_masses, double mass, double stiffness,
                                        double damping, int n_ports, phdmd_system** out);
PHDMD_API phdmd_status phdmd_system_load(const char* path, phdmd_system** out);
PHDMD_API phdmd_status phdmd_system_save(const phdmd_system* sys, const char* dir);
PHDMD_API phdmd_status phdmd_system_dims(const phdmd_system* sys, size_t* state_dim,
                                         size_t* port_dim);
/* Copies block 'H', 'J', 'R', 'G', 'P', 'S' or 'N' into buf (len doubles). */
PHDMD_API phdmd_status phdmd_system_block(const phdmd_system* sys, char block, double* buf,
                                          size_t len);
/* Number of structural violations at tolerance tol (0 means valid). */
PHDMD_API phdmd_status phdmd_system_validate(const phdmd_system* sys, double tol,
                                             size_t* violations);
/* Largest real part over the eigenvalues of H^-1 (J - R). */
PHDMD_API phdmd_status phdmd_system_max_real_eigenvalue(const phdmd_system* sys, double* out);
PHDMD_API void phdmd_system_free(phdmd_system* sys);

/* ---- trajectories ---- */
PHDMD_API phdmd_status phdmd_trajectory_read(const char* csv_path, phdmd_trajectory** out);
PHDMD_API phdmd_status phdmd_trajectory_write(const phdmd_trajectory* traj, const char* csv_path);
/* Training (noisy if configured) or test trajectory of sys under cfg. */
PHDMD_API phdmd_status phdmd_simulate_training(const phdmd_config* cfg, const phdmd_system* sys,
                                               phdmd_trajectory** out);
PHDMD_API phdmd_status phdmd_simulate_test(const phdmd_config* cfg, const phdmd_system* sys,
                                           phdmd_trajectory** out);
PHDMD_API phdmd_status phdmd_trajectory_dims(const phdmd_trajectory* traj, size_t* samples,
                                             size_t* inputs, size_t* states, size_t* outputs);
/* Copies series 't', 'U', 'X' or 'Y' into buf (len doubles). */
PHDMD_API phdmd_status phdmd_trajectory_series(const phdmd_trajectory* traj, char which,
                                               double* buf, size_t len);
PHDMD_API void phdmd_trajectory_free(phdmd_trajectory* traj);

/* ---- identification ---- */
/* method: "phdmd", "dmd" or "oi". reduced_order <= 0 keeps the full state. */
PHDMD_API phdmd_status phdmd_identify(const phdmd_config* cfg, const phdmd_trajectory* train,
                                      const phdmd_system* truth, const char* method,
                                      int reduced_order, phdmd_result** out);
PHDMD_API phdmd_status phdmd_result_report(const phdmd_result* res, char** out);
/* Fails with PHDMD_ERR_INVALID_ARGUMENT for unstructured (dmd/oi) results. */
PHDMD_API phdmd_status phdmd_result_system(const phdmd_result* res, phdmd_system** out);
PHDMD_API phdmd_status phdmd_result_save(const phdmd_result* res, const char* dir);
PHDMD_API void phdmd_result_free(phdmd_result* res);

/* ---- commands (write artifacts below out_dir; summary may be NULL) ---- */
PHDMD_API phdmd_status phdmd_cmd_generate(const phdmd_config* cfg, const char* out_dir,
                                          char** summary);
PHDMD_API phdmd_status phdmd_cmd_identify(const phdmd_config* cfg, const char* out_dir,
                                          const char* method, char** summary);
/* reference_path / model_path may be NULL for the defaults below out_dir. */
PHDMD_API phdmd_status phdmd_cmd_evaluate(const phdmd_config* cfg, const char* out_dir,
                                          const char* method, const char* reference_path,
                                          const char* model_path, char** summary);
PHDMD_API phdmd_status phdmd_cmd_experiment(const phdmd_config* cfg, const char* out_dir,
                                            char** summary);

#ifdef __cplusplus
}
#endif

#endif /* PHDMD_PHDMD_H */
