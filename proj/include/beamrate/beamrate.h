/* SPDX-License-Identifier: Apache-2.0
 *
 * beamrate - downlink multiuser beamforming evaluation for Massive MIMO-OFDM
 * Copyright (C) 2026 beamrate developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * ------------------------------------------------------------------------
 *
 * C interface of the beamrate shared library. All state lives behind
 * opaque handles; every fallible call returns a br_status and leaves a
 * human-readable message in a thread-local buffer readable through
 * br_last_error(). Returned handles must be released with the matching
 * *_free call.
 */

#ifndef BEAMRATE_BEAMRATE_H
#define BEAMRATE_BEAMRATE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BR_API __declspec(dllexport)
#else
#define BR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C"
{
#endif

typedef enum br_status
{
    BR_OK = 0,
    BR_ERR_INVALID_ARGUMENT = 1, /* bad dimensions, angles, config values */
    BR_ERR_IO = 2,               /* unreadable or unwritable path */
    BR_ERR_FORMAT = 3,           /* malformed channel file */
    BR_ERR_NUMERIC = 4,          /* rank deficiency, singular intermediates */
    BR_ERR_UNREACHABLE_RATE = 5, /* target rate above the scheme's plateau */
    BR_ERR_BUDGET_EXCEEDED = 6,  /* exhaustive subset count over the cap */
    BR_ERR_INTERNAL = 7
} br_status;

typedef struct br_channel br_channel; /* multiuser channel tensor */
typedef struct br_config br_config;   /* parsed experiment description */
typedef struct br_result br_result;   /* experiment output rows */

/* Library version as "major.minor.patch". */
BR_API const char* br_version(void);

/* Stable name of a status code ("ok", "invalid-argument", ...). */
BR_API const char* br_status_name(br_status status);

/* Message of the most recent failure on the calling thread ("" if none). */
BR_API const char* br_last_error(void);

/* ---- channels ---------------------------------------------------------- */

/* Builds a channel tensor from a JSON scenario description (either a bare
 * scenario object or a full experiment config; see README). */
BR_API br_status br_channel_generate(const char* scenario_json, br_channel** out);

/* Channel file I/O in the MMC1 format (bit-exact round trip). */
BR_API br_status br_channel_load(const char* path, br_channel** out);
BR_API br_status br_channel_save(const br_channel* channel, const char* path);

BR_API br_status br_channel_dims(const br_channel* channel, uint32_t* antennas,
                                 uint32_t* users, uint32_t* subcarriers);

/* Per-user normalization to unit average gain; returns a new handle. */
BR_API br_status br_channel_normalize(const br_channel* channel, br_channel** out);

/* Complex gain at (antenna, user, subcarrier). */
BR_API br_status br_channel_gain(const br_channel* channel, uint32_t antenna, uint32_t user,
                                 uint32_t subcarrier, double* re, double* im);

BR_API void br_channel_free(br_channel* channel);

/* ---- direct evaluation -------------------------------------------------- */

/* Average sum rate of one scheme ("TDD", "D-GOB", "H-GOB", "D-SUB",
 * "H-SUB", "A-GOB", "KxK-baseline") on a channel. n_beams is ignored for
 * TDD / KxK-baseline; codebook_beams == 0 selects the default (4x the
 * antenna count). */
BR_API br_status br_scheme_sum_rate(const br_channel* channel, const char* scheme,
                                    uint32_t n_beams, uint32_t codebook_beams, double rho_db,
                                    int threads, double* out_rate);

/* ---- experiments -------------------------------------------------------- */

BR_API br_status br_config_parse(const char* json_text, br_config** out);
BR_API br_status br_config_load(const char* path, br_config** out);
BR_API void br_config_free(br_config* config);

/* Runs the configured experiment; threads <= 1 is sequential (results do
 * not depend on the thread count). */
BR_API br_status br_run(const br_config* config, int threads, br_result** out);

/* Output path/format recorded in the config ("" when absent). */
BR_API const char* br_config_output_path(const br_config* config);
BR_API const char* br_config_output_format(const br_config* config);

typedef struct br_row_view
{
    const char* scheme; /* valid while the result handle lives */
    uint32_t n_beams;
    double rho_db;
    double sum_rate_bps_hz;
    double relative_rate;
    const char* flag;
} br_row_view;

BR_API size_t br_result_row_count(const br_result* result);
BR_API br_status br_result_row(const br_result* result, size_t index, br_row_view* out);

/* Writes "csv" or "json"; both renderings are byte-deterministic. */
BR_API br_status br_result_write(const br_result* result, const char* path,
                                 const char* format);

BR_API void br_result_free(br_result* result);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* BEAMRATE_BEAMRATE_H */
