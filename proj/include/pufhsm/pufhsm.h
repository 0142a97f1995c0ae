// Copyright 2026 The pufhsm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * C interface to the pufhsm library.
 *
 * Objects are opaque handles created by *_new / *_load / *_keygen and
 * released with the matching *_free. Every fallible call returns a
 * pufhsm_status; on failure pufhsm_last_error() describes the problem for the
 * calling thread. Buffers returned through pufhsm_buffer are owned by the
 * caller and released with pufhsm_buffer_free.
 */
#ifndef PUFHSM_PUFHSM_H_
#define PUFHSM_PUFHSM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(PUFHSM_BUILDING_LIBRARY)
#define PUFHSM_API __attribute__((visibility("default")))
#else
#define PUFHSM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pufhsm_status {
  PUFHSM_OK = 0,
  PUFHSM_ERR_INVALID_ARGUMENT = 1,
  PUFHSM_ERR_UNKNOWN_CHALLENGE = 2,
  PUFHSM_ERR_UNSUPPORTED = 3,
  PUFHSM_ERR_FORMAT = 4,
  PUFHSM_ERR_WRONG_KEY = 5,
  PUFHSM_ERR_CORRUPTION = 6,
  PUFHSM_ERR_BAD_SOF = 7,
  PUFHSM_ERR_BAD_CRC = 8,
  PUFHSM_ERR_OVERSIZE = 9,
  PUFHSM_ERR_TRUNCATED = 10,
  PUFHSM_ERR_UNKNOWN_TYPE = 11,
  PUFHSM_ERR_IO = 12,
  PUFHSM_ERR_RESOURCE = 13,
  PUFHSM_ERR_AUTH_FAILED = 14,
  PUFHSM_ERR_DENIED = 15,
  PUFHSM_ERR_INTERNAL = 99
} pufhsm_status;

typedef enum pufhsm_indicator {
  PUFHSM_INDICATOR_IDLE = 0,
  PUFHSM_INDICATOR_GREEN = 1,
  PUFHSM_INDICATOR_RED = 2
} pufhsm_indicator;

typedef enum pufhsm_action {
  PUFHSM_ACTION_ENROLL = 0,
  PUFHSM_ACTION_AUTH = 1,
  PUFHSM_ACTION_DECRYPT = 2
} pufhsm_action;

typedef struct pufhsm_puf pufhsm_puf;
typedef struct pufhsm_rsa_key pufhsm_rsa_key;
typedef struct pufhsm_device pufhsm_device;
typedef struct pufhsm_host pufhsm_host;
typedef struct pufhsm_listener pufhsm_listener;

typedef struct pufhsm_buffer {
  uint8_t* data;
  size_t len;
} pufhsm_buffer;

PUFHSM_API const char* pufhsm_version(void);
PUFHSM_API const char* pufhsm_status_name(pufhsm_status status);
PUFHSM_API const char* pufhsm_last_error(void);
PUFHSM_API void pufhsm_buffer_free(pufhsm_buffer* buffer);

/* ---- PUF -------------------------------------------------------------- */

PUFHSM_API pufhsm_status pufhsm_puf_new_simulated(uint64_t seed, size_t n_stages,
                                                  size_t n_bits, pufhsm_puf** out);
/* CSV with header experiment,challenge,response,verdict. */
PUFHSM_API pufhsm_status pufhsm_puf_load_table(const char* csv_path, pufhsm_puf** out);
PUFHSM_API void pufhsm_puf_free(pufhsm_puf* puf);
PUFHSM_API size_t pufhsm_puf_width(const pufhsm_puf* puf);
PUFHSM_API int pufhsm_puf_is_simulated(const pufhsm_puf* puf);

/* Challenges and responses are NUL-terminated strings of '0'/'1';
 * response_cap must be at least width + 1. */
PUFHSM_API pufhsm_status pufhsm_puf_eval(const pufhsm_puf* puf, const char* challenge,
                                         char* response, size_t response_cap);
PUFHSM_API pufhsm_status pufhsm_puf_eval_noisy(const pufhsm_puf* puf, const char* challenge,
                                               double noise_sigma, uint64_t rng_seed,
                                               char* response, size_t response_cap);

typedef struct pufhsm_puf_stats {
  double distinct_response_ratio;
  double inter_instance_hd;
  double reliability_intra_hd;
} pufhsm_puf_stats;

/* Builds `instances` simulated PUFs (seeds seed, seed+1, ...), evaluates
 * `challenges` random challenges, and reports all three statistics.
 * distinct_response_ratio comes from two noise-free experiments on the first
 * instance; reliability uses the first instance with `repeats` noisy
 * evaluations. */
PUFHSM_API pufhsm_status pufhsm_puf_stats_simulated(size_t instances, size_t challenges,
                                                    size_t n_stages, size_t n_bits,
                                                    uint64_t seed, size_t repeats,
                                                    double noise_sigma,
                                                    pufhsm_puf_stats* out);

/* ---- RSA keys --------------------------------------------------------- */

PUFHSM_API pufhsm_status pufhsm_rsa_keygen(unsigned modulus_bits, uint64_t seed,
                                           pufhsm_rsa_key** out);
/* Accepts either a private or a public key file. */
PUFHSM_API pufhsm_status pufhsm_rsa_key_load(const char* path, pufhsm_rsa_key** out);
PUFHSM_API void pufhsm_rsa_key_free(pufhsm_rsa_key* key);
PUFHSM_API int pufhsm_rsa_key_has_private(const pufhsm_rsa_key* key);
PUFHSM_API unsigned pufhsm_rsa_key_bits(const pufhsm_rsa_key* key);
PUFHSM_API pufhsm_status pufhsm_rsa_key_save_private(const pufhsm_rsa_key* key,
                                                     const char* path);
PUFHSM_API pufhsm_status pufhsm_rsa_key_save_public(const pufhsm_rsa_key* key,
                                                    const char* path);

/* ---- Envelope --------------------------------------------------------- */

PUFHSM_API pufhsm_status pufhsm_seal(const uint8_t* data, size_t len,
                                     const pufhsm_rsa_key* public_key, uint64_t seed,
                                     pufhsm_buffer* envelope_out, pufhsm_buffer* wrapped_out);
PUFHSM_API pufhsm_status pufhsm_unseal(const uint8_t* envelope, size_t envelope_len,
                                       const uint8_t* wrapped, size_t wrapped_len,
                                       const pufhsm_rsa_key* private_key,
                                       pufhsm_buffer* plaintext_out);
PUFHSM_API pufhsm_status pufhsm_seal_file(const char* in_path, const pufhsm_rsa_key* public_key,
                                          uint64_t seed, const char* envelope_path,
                                          const char* wrapped_path);
PUFHSM_API pufhsm_status pufhsm_unseal_file(const char* envelope_path, const char* wrapped_path,
                                            const pufhsm_rsa_key* private_key,
                                            const char* out_path);

/* ---- Frames ----------------------------------------------------------- */

PUFHSM_API uint16_t pufhsm_crc16(const uint8_t* data, size_t len);
PUFHSM_API pufhsm_status pufhsm_frame_encode(uint8_t msg_type, const uint8_t* payload,
                                             size_t len, pufhsm_buffer* out);
PUFHSM_API pufhsm_status pufhsm_frame_decode(const uint8_t* bytes, size_t len,
                                             uint8_t* msg_type, pufhsm_buffer* payload);

/* ---- Device ----------------------------------------------------------- */

/* The device keeps its own copy of the PUF. */
PUFHSM_API pufhsm_status pufhsm_device_new(const pufhsm_puf* puf, pufhsm_device** out);
PUFHSM_API pufhsm_status pufhsm_device_load(const char* path, pufhsm_device** out);
PUFHSM_API pufhsm_status pufhsm_device_save(const pufhsm_device* device, const char* path);
PUFHSM_API void pufhsm_device_free(pufhsm_device* device);
PUFHSM_API size_t pufhsm_device_enrolled_count(const pufhsm_device* device);
PUFHSM_API pufhsm_indicator pufhsm_device_indicator(const pufhsm_device* device);

/* Feeds one complete wire frame to the device and returns its reply frame. */
PUFHSM_API pufhsm_status pufhsm_device_handle_frame(pufhsm_device* device, const uint8_t* frame,
                                                    size_t len, pufhsm_buffer* reply);
PUFHSM_API pufhsm_status pufhsm_device_enroll(pufhsm_device* device, const uint8_t* key,
                                              size_t key_len, const char* pin);
/* PUFHSM_OK with *granted set to 1 (GREEN) or 0 (RED). */
PUFHSM_API pufhsm_status pufhsm_device_authenticate(pufhsm_device* device, const uint8_t* key,
                                                    size_t key_len, const char* pin,
                                                    int* granted);

/* ---- Host and sessions ------------------------------------------------ */

PUFHSM_API pufhsm_status pufhsm_host_load(const char* envelope_path, const char* wrapped_path,
                                          const pufhsm_rsa_key* private_key,
                                          pufhsm_host** out);
PUFHSM_API void pufhsm_host_free(pufhsm_host* host);
PUFHSM_API int pufhsm_host_granted(const pufhsm_host* host);

typedef struct pufhsm_session_result {
  int granted;              /* host auth state after the script */
  int plaintext_delivered;
  int denied;               /* a decrypt request was refused */
  int gated;                /* every delivery followed AUTH_OK */
  pufhsm_indicator indicator;
  pufhsm_status first_error; /* first error recorded in the transcript */
  pufhsm_buffer plaintext;   /* release with pufhsm_buffer_free */
  pufhsm_buffer transcript;  /* human-readable text, release with pufhsm_buffer_free */
} pufhsm_session_result;

PUFHSM_API void pufhsm_session_result_free(pufhsm_session_result* result);

/* In-process session. Frames the device sends whose msg_type is listed in
 * drop_types (may be NULL) are lost in transit. */
PUFHSM_API pufhsm_status pufhsm_session_run(pufhsm_device* device, pufhsm_host* host,
                                            const uint8_t* key, size_t key_len,
                                            const char* pin, const pufhsm_action* script,
                                            size_t script_len, const uint8_t* drop_types,
                                            size_t drop_count, pufhsm_session_result* result);

/* Loopback TCP: the device side listens and serves one connection, the host
 * side connects to "host:port" and drives the script. */
PUFHSM_API pufhsm_status pufhsm_listener_open(const char* address, pufhsm_listener** out);
PUFHSM_API uint16_t pufhsm_listener_port(const pufhsm_listener* listener);
PUFHSM_API void pufhsm_listener_free(pufhsm_listener* listener);
PUFHSM_API pufhsm_status pufhsm_device_serve(pufhsm_device* device, pufhsm_listener* listener);
PUFHSM_API pufhsm_status pufhsm_session_run_tcp(pufhsm_host* host, const char* address,
                                                const uint8_t* key, size_t key_len,
                                                const char* pin, const pufhsm_action* script,
                                                size_t script_len,
                                                pufhsm_session_result* result);

/* ---- Benchmarks ------------------------------------------------------- */

typedef struct pufhsm_timing_row {
  uint64_t file_size;
  int process; /* 0 = encrypt, 1 = decrypt */
  double real_s;
  double user_s;
  double sys_s;
  int has_cpu_times;
  unsigned repeats;
} pufhsm_timing_row;

/* rows_out must hold 2 * n_sizes rows. csv_path may be NULL. */
PUFHSM_API pufhsm_status pufhsm_bench_timing(const uint64_t* sizes, size_t n_sizes,
                                             unsigned repeats, const pufhsm_rsa_key* key,
                                             const char* workdir, const char* csv_path,
                                             pufhsm_timing_row* rows_out);

typedef struct pufhsm_uniqueness_result {
  size_t total_trials;
  size_t distinct_total;
  size_t accepted;
  double ratio;
} pufhsm_uniqueness_result;

/* challenges may be NULL for a table-backed PUF, in which case the table's
 * distinct challenges are used in order. csv_path may be NULL. */
PUFHSM_API pufhsm_status pufhsm_bench_uniqueness(const pufhsm_puf* puf,
                                                 const char* const* challenges,
                                                 size_t n_challenges, unsigned experiments,
                                                 const char* csv_path,
                                                 pufhsm_uniqueness_result* out);

typedef struct pufhsm_integrity_report {
  uint64_t size_before;
  uint64_t size_after;
  int byte_identical;
  int digest_match;
} pufhsm_integrity_report;

PUFHSM_API pufhsm_status pufhsm_bench_integrity(const char* original, const char* roundtripped,
                                                pufhsm_integrity_report* out);

#ifdef __cplusplus
}
#endif

#endif /* PUFHSM_PUFHSM_H_ */
