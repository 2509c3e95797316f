/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
 * SPDX-License-Identifier: Apache-2.0
 */

/* C interface to the SonoTrace simulation engine.
 *
 * Every function returning st_status leaves a description of the last
 * failure on the calling thread, readable with st_last_error(). Handles are
 * opaque; each st_*_free accepts NULL. Strings and byte buffers returned
 * through out-parameters are released with st_free(). */

#ifndef SONOTRACE_SONOTRACE_H
#define SONOTRACE_SONOTRACE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define ST_API __declspec(dllexport)
#else
#define ST_API __attribute__((visibility("default")))
#endif

typedef enum st_status {
  ST_OK = 0,
  ST_PARSE_ERROR = 1,
  ST_EMPTY_MESH = 2,
  ST_MISSING_MESH = 3,
  ST_UNKNOWN_MATERIAL = 4,
  ST_INVALID_FREQUENCY_GRID = 5,
  ST_INVALID_CONFIG = 6,
  ST_INVALID_ARGUMENT = 7,
  ST_OVERFLOW = 8,
  ST_DOMAIN_ERROR = 9,
  ST_REVISION_MISMATCH = 10,
  ST_ALIAS_RISK = 11,
  ST_GRID_MISMATCH = 12,
  ST_SAMPLE_RATE_MISMATCH = 13,
  ST_UNKNOWN_ENTITY = 14,
  ST_IO_ERROR = 15,
  ST_PROTOCOL_ERROR = 16,
  ST_INTERNAL_ERROR = 100
} st_status;

/* Component flags for st_simulate. */
#define ST_SPECULAR 1u
#define ST_DIFFRACTION 2u
#define ST_PASSIVE 4u
#define ST_ALL_COMPONENTS 7u

typedef struct st_scene st_scene_t;
typedef struct st_contributions st_contributions_t;
typedef struct st_signal st_signal_t;
typedef struct st_server st_server_t;

typedef struct st_scene_counts {
  uint64_t triangles;
  uint64_t instances;
  uint64_t emitters;
  uint64_t receivers;
  uint64_t bins;
  uint64_t revision;
} st_scene_counts;

typedef void (*st_warning_fn)(const char* message, void* user);

ST_API const char* st_version(void);
ST_API const char* st_status_name(st_status status);
/* Message of the last failure on this thread ("" if none). */
ST_API const char* st_last_error(void);
/* Routes warnings to `fn` (NULL restores stderr). */
ST_API void st_set_warning_callback(st_warning_fn fn, void* user);
ST_API void st_free(void* p);

/* 128 + 8 * T * (12 + F) bytes; ST_OVERFLOW if it does not fit in 64 bits. */
ST_API st_status st_footprint_bytes(uint64_t triangles, uint64_t bins, uint64_t* out);

/* JSON with analytic counts, footprint and materials, without building
 * geometry. */
ST_API st_status st_scene_describe(const char* path, char** json_out);

/* Loads a scene document and runs curvature pre-processing. workers = 0
 * uses the default worker count. */
ST_API st_status st_scene_load(const char* path, unsigned workers, st_scene_t** out);
ST_API void st_scene_free(st_scene_t* scene);
ST_API st_status st_scene_counts_get(const st_scene_t* scene, st_scene_counts* out);
ST_API st_status st_scene_summary_json(const st_scene_t* scene, char** json_out);
/* Moves an instance, emitter or receiver; the handle advances to a new
 * revision. quaternion is [w, x, y, z] and must be unit length. */
ST_API st_status st_scene_set_pose(st_scene_t* scene, const char* entity, const double position[3],
                                   const double quaternion[4]);
ST_API st_status st_preprocess_write_cache(const st_scene_t* scene, const char* path);
/* Writes the specular hit records of one emitter. */
ST_API st_status st_write_hits(const st_scene_t* scene, uint32_t emitter, unsigned workers, const char* path);

ST_API st_status st_simulate(const st_scene_t* scene, uint32_t components, uint64_t seed, unsigned workers,
                             st_contributions_t** out);
ST_API void st_contributions_free(st_contributions_t* set);
ST_API uint64_t st_contributions_size(const st_contributions_t* set);
/* Binary export; `components` and `seed` go into the header. */
ST_API st_status st_contributions_export(const st_contributions_t* set, uint32_t components, uint64_t seed,
                                         uint8_t** bytes, size_t* size);
ST_API st_status st_contributions_write(const st_contributions_t* set, uint32_t components, uint64_t seed,
                                        const char* path);

/* Impulse response of pair (source, receiver). fs <= 0 selects four times
 * the highest bin; n_fft = 0 selects the smallest length that holds every
 * contribution plus `signal_duration` seconds. */
ST_API st_status st_synthesize(const st_scene_t* scene, const st_contributions_t* set, uint32_t source,
                               uint32_t receiver, double fs, uint32_t n_fft, double signal_duration,
                               st_signal_t** out);
/* Sum over `responses` aimed at `receiver` of response * emitted. */
ST_API st_status st_render(const st_signal_t* const* responses, size_t count, uint32_t receiver,
                           const st_signal_t* emitted, st_signal_t** out);

ST_API st_status st_signal_create(double fs, const double* samples, size_t count, st_signal_t** out);
ST_API st_status st_signal_chirp(double f0, double f1, double duration, double fs, st_signal_t** out);
ST_API st_status st_read_wav(const char* path, st_signal_t** out);
ST_API void st_signal_free(st_signal_t* signal);
ST_API double st_signal_rate(const st_signal_t* signal);
ST_API size_t st_signal_length(const st_signal_t* signal);
ST_API const double* st_signal_data(const st_signal_t* signal);
/* RMS delay spread in seconds. */
ST_API double st_signal_rms_spread(const st_signal_t* signal);
ST_API st_status st_signal_write_wav(const st_signal_t* signal, const char* path);
ST_API st_status st_signal_write_raw(const st_signal_t* signal, const char* path);
/* Hann-window STFT magnitudes as CSV. */
ST_API st_status st_signal_write_spectrogram(const st_signal_t* signal, uint32_t window, uint32_t hop,
                                             const char* path);

/* TCP server over a copy of the scene. port 0 binds an ephemeral port;
 * idle_timeout_ms <= 0 keeps the default. */
ST_API st_status st_server_start(const st_scene_t* scene, const char* bind_address, uint16_t port,
                                 unsigned workers, int idle_timeout_ms, st_server_t** out);
ST_API uint16_t st_server_port(const st_server_t* server);
/* Async-signal-safe. */
ST_API void st_server_request_stop(st_server_t* server);
/* Blocks until st_server_request_stop, then shuts down. */
ST_API void st_server_wait(st_server_t* server);
ST_API void st_server_free(st_server_t* server);
/* SONOTRACE_PORT, else `fallback`. */
ST_API uint16_t st_default_port(uint16_t fallback);

#ifdef __cplusplus
}
#endif

#endif /* SONOTRACE_SONOTRACE_H */
