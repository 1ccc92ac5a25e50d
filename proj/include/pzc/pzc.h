#ifndef PZC_PZC_H
#define PZC_PZC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32) && defined(PZC_BUILDING)
#define PZC_API __declspec(dllexport)
#elif defined(_WIN32)
#define PZC_API __declspec(dllimport)
#elif defined(__GNUC__)
#define PZC_API __attribute__((visibility("default")))
#else
#define PZC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pzc_status {
  PZC_OK = 0,
  PZC_ERR_INVALID_ARGUMENT = 1,
  PZC_ERR_IO = 2,
  PZC_ERR_PARSE = 3,
  PZC_ERR_INVARIANT = 4,
  PZC_ERR_INFEASIBLE = 5,
  PZC_ERR_NOT_FOUND = 6,
  PZC_ERR_TOO_LARGE = 7,
  PZC_ERR_INTERNAL = 8
} pzc_status;

typedef struct pzc_topology pzc_topology;
typedef struct pzc_partition pzc_partition;
typedef struct pzc_trace pzc_trace;
typedef struct pzc_scenario pzc_scenario;

/* Message for the last failing call on this thread; "" after success. */
PZC_API const char* pzc_last_error(void);
PZC_API const char* pzc_status_name(pzc_status status);

/* ---- topology ---------------------------------------------------------- */

PZC_API pzc_status pzc_topology_generate(size_t meters, size_t concentrators, size_t mesh_degree, uint64_t seed,
                                         pzc_topology** out);
/* kinds and functions may be NULL. */
PZC_API pzc_status pzc_topology_load(const char* edges, const char* kinds, const char* functions,
                                     pzc_topology** out);
PZC_API pzc_status pzc_topology_save(const pzc_topology* topology, const char* edges, const char* kinds,
                                     const char* functions);
/* Subgraph of the susceptible members of `function` (NULL: the first
 * function that has any). */
PZC_API pzc_status pzc_topology_target(const pzc_topology* topology, const char* function, pzc_topology** out);
PZC_API size_t pzc_topology_size(const pzc_topology* topology);
PZC_API size_t pzc_topology_edge_count(const pzc_topology* topology);
PZC_API void pzc_topology_free(pzc_topology* topology);

/* ---- partition --------------------------------------------------------- */

PZC_API pzc_status pzc_partition_build(const pzc_topology* topology, int k, double epsilon, int eta, uint64_t seed,
                                       pzc_partition** out);
PZC_API pzc_status pzc_partition_load(const char* path, const pzc_topology* topology, pzc_partition** out);
PZC_API pzc_status pzc_partition_save(const pzc_partition* partition, const char* path);
PZC_API size_t pzc_partition_cut(const pzc_partition* partition);
PZC_API int pzc_partition_feasible(const pzc_partition* partition);
/* Zone of a component, or -1 when it has none. */
PZC_API int pzc_partition_zone_of(const pzc_partition* partition, uint32_t component);
PZC_API void pzc_partition_free(pzc_partition* partition);

/* ---- simulation -------------------------------------------------------- */

typedef struct pzc_sim_params {
  double ct;
  double ht;
  double dt;
  double response_latency;
  double benign_period; /* 0 disables benign traffic */
  double horizon;       /* <= 0 means unbounded */
  double quiescence;    /* <= 0 selects the default */
  int parallel;         /* 0 sequential, 1 parallel */
  int recovery;         /* 0 disables recovery */
  int causal;           /* 0 paper-literal, 1 causal repair analysis */
  uint64_t seed;
} pzc_sim_params;

PZC_API void pzc_sim_params_default(pzc_sim_params* params);

/* strategy: "none", "per-node" or "partition-aware". partition may be NULL
 * unless the strategy is partition-aware. */
PZC_API pzc_status pzc_simulate(const pzc_topology* topology, const pzc_partition* partition,
                                const pzc_sim_params* params, const char* strategy, uint32_t origin, pzc_trace** out);
PZC_API size_t pzc_trace_compromised_count(const pzc_trace* trace);
PZC_API size_t pzc_trace_event_count(const pzc_trace* trace);
PZC_API pzc_status pzc_trace_save_csv(const pzc_trace* trace, const char* events, const char* op_log);
PZC_API void pzc_trace_free(pzc_trace* trace);

/* ---- scenarios ----------------------------------------------------------- */

typedef struct pzc_summary {
  size_t runs;
  double omega_mean;
  double omega_std;
  double delta_mean;
  double delta_std;
  double temp_unavail_peak_mean;
  double ael_increase_mean;
  double peak_increase_mean;
  double line_trip_rate;
} pzc_summary;

PZC_API pzc_status pzc_scenario_create(pzc_scenario** out);
PZC_API pzc_status pzc_scenario_load(const char* path, pzc_scenario** out);
/* Same keys as the config file. */
PZC_API pzc_status pzc_scenario_set(pzc_scenario* scenario, const char* key, const char* value);
/* Single run; writes metrics.csv, ael.csv and traces under the output dir. */
PZC_API pzc_status pzc_scenario_run(const pzc_scenario* scenario, pzc_summary* summary);
/* Grid run; writes sweep.csv, failures.csv and figure CSVs. Succeeds only
 * when no grid point failed; *failures receives the count either way. */
PZC_API pzc_status pzc_scenario_sweep(const pzc_scenario* scenario, size_t* points, size_t* failures);
/* Single run that writes ael.csv and prices.csv only. */
PZC_API pzc_status pzc_scenario_ael_report(const pzc_scenario* scenario, pzc_summary* summary);
PZC_API void pzc_scenario_free(pzc_scenario* scenario);

#ifdef __cplusplus
}
#endif

#endif
