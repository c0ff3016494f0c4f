/*
 * toolmem — tool-response virtualization for LLM agent pipelines.
 *
 * C API over the shared library. Conventions:
 *   - Functions returning toolmem_status set a thread-local error message on
 *     failure, readable via toolmem_last_error().
 *   - Every char* handed out through an out-parameter is heap-allocated and
 *     must be released with toolmem_string_free(). Out-parameters are left
 *     untouched on failure.
 *   - Handles are opaque; each handle is internally synchronized and may be
 *     shared across threads until the corresponding _free call.
 */

#ifndef TOOLMEM_H
#define TOOLMEM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum toolmem_status {
    TOOLMEM_OK = 0,
    TOOLMEM_E_NOT_FOUND = 1,
    TOOLMEM_E_DANGLING_PATH = 2,
    TOOLMEM_E_CAPACITY_EXCEEDED = 3,
    TOOLMEM_E_INVALID_TOOL_NAME = 4,
    TOOLMEM_E_INVALID_VALUE = 5,
    TOOLMEM_E_NAME_COLLISION = 6,
    TOOLMEM_E_UNKNOWN_TOOL = 7,
    TOOLMEM_E_TOOL_EXECUTION = 8,
    TOOLMEM_E_PROTOCOL = 9,
    TOOLMEM_E_TRANSPORT = 10,
    TOOLMEM_E_SHAPE_MISMATCH = 11,
    TOOLMEM_E_FILE_NOT_FOUND = 12,
    TOOLMEM_E_MALFORMED_DOCUMENT = 13,
    TOOLMEM_E_CONTEXT_OVERFLOW = 14,
    TOOLMEM_E_PARSE = 15,
    TOOLMEM_E_VALIDATION = 16,
    TOOLMEM_E_OTHER = 17
} toolmem_status;

const char* toolmem_version(void);
const char* toolmem_status_name(toolmem_status status);

/* Message describing the most recent failure on this thread. Never NULL. */
const char* toolmem_last_error(void);

void toolmem_string_free(char* text);

/* The whole-string grammar of memory paths (POSIX ERE / ECMAScript). */
const char* toolmem_path_grammar(void);

/* ------------------------------------------------------------------ */
/* Session store: tool outputs under tool-uuid[/key] paths.            */

typedef struct toolmem_store toolmem_store;

/* capacity_bytes = 0 means unlimited. */
toolmem_store* toolmem_store_new(uint64_t capacity_bytes);
void toolmem_store_free(toolmem_store* store);

/* Deterministic UUID sequence for reproducible runs. */
toolmem_status toolmem_store_seed_uuids(toolmem_store* store, uint64_t seed);

toolmem_status toolmem_store_put_json(toolmem_store* store, const char* tool,
                                      const char* value_json, char** out_path);
toolmem_status toolmem_store_put_text(toolmem_store* store, const char* tool,
                                      const char* text, char** out_path);
toolmem_status toolmem_store_put_binary(toolmem_store* store, const char* tool,
                                        const uint8_t* data, size_t size, char** out_path);

/* JSON encoding of the stored value (binary payloads as a base64 string). */
toolmem_status toolmem_store_get_json(const toolmem_store* store, const char* path,
                                      char** out_json);
/* Agent-visible text: strings verbatim, binary as base64, else canonical JSON. */
toolmem_status toolmem_store_render(const toolmem_store* store, const char* path,
                                    char** out_text);
/* Raw bytes of a binary value. */
toolmem_status toolmem_store_get_binary(const toolmem_store* store, const char* path,
                                        uint8_t** out_data, size_t* out_size);
void toolmem_buffer_free(uint8_t* data);

int toolmem_store_contains(const toolmem_store* store, const char* path);

/* JSON array of {path, kind, byte_size, producer_tool, parent?}, path-ordered.
 * prefix may be NULL for the full listing. */
toolmem_status toolmem_store_list(const toolmem_store* store, const char* prefix,
                                  char** out_json);

toolmem_status toolmem_store_clear(toolmem_store* store, uint64_t* out_dropped);
uint64_t toolmem_store_total_bytes(const toolmem_store* store);

/* ------------------------------------------------------------------ */
/* Paths, argument resolution, token counting.                         */

/* Parses a memory path; out_json gets {tool_name, uuid, subkey?}. */
toolmem_status toolmem_path_parse(const char* text, char** out_json);

/* Replaces every live memory path inside the argument tree with the stored
 * value it names. Unknown paths fail with TOOLMEM_E_DANGLING_PATH. */
toolmem_status toolmem_resolve_arguments(const toolmem_store* store, const char* args_json,
                                         char** out_json);

/* counter_id: "bytes4" or "words". */
toolmem_status toolmem_count_tokens(const char* counter_id, const char* text,
                                    uint64_t* out_tokens);

/* ------------------------------------------------------------------ */
/* Proxy sessions.                                                     */

typedef struct toolmem_session toolmem_session;

/* config_json uses the application config schema ("{}" for defaults):
 *   {"endpoints": [...], "mirror": {"threshold_bytes": ..., ...},
 *    "counter": "...", "store_capacity_bytes": ..., ...}
 * Listed endpoints are connected immediately. */
toolmem_session* toolmem_session_new(const char* config_json);
void toolmem_session_free(toolmem_session* session);

toolmem_status toolmem_session_seed_uuids(toolmem_session* session, uint64_t seed);
/* Next UUIDs come from this list, then fall back to the seeded stream. */
toolmem_status toolmem_session_fixed_uuids(toolmem_session* session,
                                           const char* const* uuids, size_t count);

/* spec: a shell command line, or "tcp:host:port". */
toolmem_status toolmem_session_connect_upstream(toolmem_session* session, const char* spec);

/* JSON array of mirrored tool descriptors plus the final-answer tool. */
toolmem_status toolmem_session_list_tools(const toolmem_session* session, char** out_json);

/* Runs a catalog tool. out_json gets {"text": ..., "stored_path": ...?}. */
toolmem_status toolmem_session_call_tool(toolmem_session* session, const char* name,
                                         const char* args_json, char** out_json);

/* Borrowed handle, valid until the session is freed. Do not free it. */
toolmem_store* toolmem_session_store(toolmem_session* session);

/* Full call trace with per-step token accounting. */
toolmem_status toolmem_session_trace_json(const toolmem_session* session, char** out_json);

/* Serves the session over stdin/stdout until EOF. */
toolmem_status toolmem_session_serve_stdio(toolmem_session* session);

/* TCP serving with one fresh session per connection. port 0 binds an
 * ephemeral port; the bound port is written to *out_bound_port (may be NULL)
 * before accepting. Returns after max_connections connections close
 * (0 = serve forever). */
toolmem_status toolmem_serve_tcp(const char* config_json, int port, int max_connections,
                                 int* out_bound_port);

/* ------------------------------------------------------------------ */
/* Replay experiments and synthetic tool servers.                      */

/* config_json keys: experiment ("grid"|"sds"), mode ("conventional"|
 * "mirrored"), grid_dim, top_k, threshold_bytes, context_limit_tokens,
 * counter, fixture_dir, sds_document, golden_uuids, uuid_seed.
 * out_json gets {config, report, trace}. A run that aborts on context
 * overflow still returns TOOLMEM_OK; see report.completed. */
toolmem_status toolmem_run_experiment(const char* config_json, char** out_json);

/* Serves the named experiment's original (unmirrored) tools over
 * stdin/stdout until EOF. experiment: "grid" or "sds". */
toolmem_status toolmem_harness_serve_stdio(const char* experiment, const char* config_json);

/* Loads and validates an application config file; out_json gets the
 * normalized form. */
toolmem_status toolmem_load_config(const char* path, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* TOOLMEM_H */
