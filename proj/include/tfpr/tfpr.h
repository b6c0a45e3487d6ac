/* Phase retrieval toolkit: STFT with exact canonical duals, PGHI / FGLA / SPSI, SNR_MS and the
 * experiment harness, behind a plain C interface.
 *
 * Every function returning tfpr_status leaves a thread-local message for tfpr_last_error() when
 * it fails. Objects are opaque; each *_create / producer call must be paired with *_destroy.
 * Coefficient matrices are half spectra (M/2 + 1 channels), stored frame-major.
 */
#ifndef TFPR_TFPR_H
#define TFPR_TFPR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TFPR_API __declspec(dllexport)
#else
#define TFPR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tfpr_status
{
    TFPR_OK = 0,
    TFPR_INVALID_ARGUMENT = 1,
    TFPR_DIMENSION = 2,
    TFPR_NOT_A_FRAME = 3,
    TFPR_IO = 4,
    TFPR_FORMAT = 5,
    TFPR_NUMERICAL = 6,
    TFPR_INTERNAL = 7
} tfpr_status;

TFPR_API const char* tfpr_version(void);
TFPR_API const char* tfpr_status_string(tfpr_status status);
/* Message of the last failure on the calling thread ("" if none). */
TFPR_API const char* tfpr_last_error(void);

/* ---- signals ---------------------------------------------------------------------------- */

typedef struct tfpr_signal tfpr_signal;

TFPR_API tfpr_status tfpr_signal_create(const double* samples, size_t length, unsigned sample_rate,
                                        tfpr_signal** out);
/* First channel, resampled to target_rate, cut or zero-padded to target_length (0 = 122880). */
TFPR_API tfpr_status tfpr_signal_read_wav(const char* path, unsigned target_rate, size_t target_length,
                                          tfpr_signal** out);
/* kind: "harmonic", "bursts", "pulses" or "speech". */
TFPR_API tfpr_status tfpr_signal_synth(const char* kind, size_t length, unsigned sample_rate, uint64_t seed,
                                       tfpr_signal** out);
/* float32 != 0 writes IEEE float, otherwise PCM16. */
TFPR_API tfpr_status tfpr_signal_write_wav(const tfpr_signal* s, const char* path, int float32);
TFPR_API size_t tfpr_signal_length(const tfpr_signal* s);
TFPR_API unsigned tfpr_signal_rate(const tfpr_signal* s);
TFPR_API const double* tfpr_signal_data(const tfpr_signal* s);
TFPR_API void tfpr_signal_destroy(tfpr_signal* s);

/* ---- frames: window, canonical dual and lattice ------------------------------------------ */

typedef struct tfpr_frame tfpr_frame;

/* family: "gauss", "hann", "blackman", "bartlett". lambda <= 0 selects the grid-matched aM/rate. */
TFPR_API tfpr_status tfpr_frame_create(const char* family, double lambda, size_t a, size_t M, size_t L,
                                       unsigned sample_rate, tfpr_frame** out);
/* Lattice chosen from (lambda, D): M is the divisor of L closest to sqrt(lambda * rate * D). */
TFPR_API tfpr_status tfpr_frame_create_for_lambda(const char* family, double lambda, size_t D, size_t L,
                                                  unsigned sample_rate, tfpr_frame** out);
TFPR_API size_t tfpr_frame_hop(const tfpr_frame* f);
TFPR_API size_t tfpr_frame_channels(const tfpr_frame* f);
TFPR_API size_t tfpr_frame_length(const tfpr_frame* f);
TFPR_API double tfpr_frame_lambda(const tfpr_frame* f);
TFPR_API const double* tfpr_frame_window(const tfpr_frame* f);
TFPR_API const double* tfpr_frame_dual(const tfpr_frame* f);
TFPR_API void tfpr_frame_destroy(tfpr_frame* f);

/* ---- coefficients ------------------------------------------------------------------------ */

typedef struct tfpr_coeffs tfpr_coeffs;

TFPR_API tfpr_status tfpr_stft(const tfpr_frame* f, const tfpr_signal* s, tfpr_coeffs** out);
TFPR_API tfpr_status tfpr_istft(const tfpr_frame* f, const tfpr_coeffs* c, tfpr_signal** out);
TFPR_API size_t tfpr_coeffs_channels(const tfpr_coeffs* c);
TFPR_API size_t tfpr_coeffs_frames(const tfpr_coeffs* c);
/* Copies channels * frames values; re or im may be NULL. */
TFPR_API void tfpr_coeffs_copy(const tfpr_coeffs* c, double* re, double* im);
TFPR_API void tfpr_coeffs_magnitude(const tfpr_coeffs* c, double* out);
TFPR_API tfpr_status tfpr_projection_error(const tfpr_frame* f, const tfpr_coeffs* c, double* out);
TFPR_API void tfpr_coeffs_destroy(tfpr_coeffs* c);

/* ---- phase retrieval and metrics --------------------------------------------------------- */

typedef struct tfpr_pr_options
{
    size_t fgla_iterations;
    double fgla_alpha;
    double pghi_tolerance;
    uint64_t seed;
} tfpr_pr_options;

TFPR_API void tfpr_pr_options_default(tfpr_pr_options* opts);

/* Rebuilds a signal from |c| alone. algorithm: "pghi", "fgla", "fgla(K)", "spsi", "zerophase";
 * "phasenoise(sigma)" perturbs the phase of c instead. opts may be NULL. */
TFPR_API tfpr_status tfpr_reconstruct(const tfpr_frame* f, const tfpr_coeffs* c, const char* algorithm,
                                      const tfpr_pr_options* opts, tfpr_signal** out);

/* Spectrogram SNR on the fixed M = 2048, a = 128 Gaussian analysis after dropping `trim`
 * samples from both ends. +inf for a perfect match. */
TFPR_API tfpr_status tfpr_snr_ms(const tfpr_signal* original, const tfpr_signal* reconstructed, size_t trim,
                                 double* out_db);

/* ---- experiments ------------------------------------------------------------------------- */

typedef struct tfpr_experiment tfpr_experiment;
typedef struct tfpr_results tfpr_results;

TFPR_API tfpr_status tfpr_experiment_create(tfpr_experiment** out);
/* Keys: algorithms, lambdas, redundancies, windows, sigmas, seed, threads, trim, timing,
 * iterations, alpha, pghi_tolerance, filter_periods, snr_threshold_db, lambda_seed,
 * lambda_min, lambda_max, min_gain_db, time_budget_s, screen_iterations.
 * Lists are comma separated; lambdas also accept "logspace:lo:hi:n". */
TFPR_API tfpr_status tfpr_experiment_set(tfpr_experiment* e, const char* key, const char* value);
TFPR_API tfpr_status tfpr_experiment_add_signal(tfpr_experiment* e, const char* id, const tfpr_signal* s);
/* All *.wav files of a directory in name order. */
TFPR_API tfpr_status tfpr_experiment_add_corpus_dir(tfpr_experiment* e, const char* dir, size_t target_length);
TFPR_API tfpr_status tfpr_experiment_add_synthetic(tfpr_experiment* e, const char* kind, size_t count,
                                                   size_t length, uint64_t seed);
TFPR_API size_t tfpr_experiment_corpus_size(const tfpr_experiment* e);
TFPR_API void tfpr_experiment_destroy(tfpr_experiment* e);

TFPR_API tfpr_status tfpr_run_sweep(const tfpr_experiment* e, tfpr_results** out);
TFPR_API tfpr_status tfpr_run_noise(const tfpr_experiment* e, tfpr_results** out);
TFPR_API tfpr_status tfpr_run_filter(const tfpr_experiment* e, tfpr_results** out);
TFPR_API tfpr_status tfpr_run_optimize(const tfpr_experiment* e, tfpr_results** out);

typedef struct tfpr_row
{
    const char* algorithm;
    const char* window;
    double lambda_requested;
    double lambda_realized;
    size_t D;
    size_t a;
    size_t M;
    const char* signal_id;
    double snr_ms_db;
    double projection_error;
    double wall_time_s;
    size_t iterations;
    uint64_t seed;
    const char* status;
} tfpr_row;

/* Cell rows (for optimize: every full-count cell evaluated). Strings live as long as r. */
TFPR_API size_t tfpr_results_count(const tfpr_results* r);
TFPR_API tfpr_status tfpr_results_row(const tfpr_results* r, size_t index, tfpr_row* out);
/* Optimiser only: 1 when no cell met the threshold. */
TFPR_API int tfpr_results_below_threshold(const tfpr_results* r);
/* format: "csv" or "json". Sweeps write their rows; the optimiser writes its range table
 * (CSV) or ranges + cells (JSON). */
TFPR_API tfpr_status tfpr_results_write(const tfpr_results* r, const char* path, const char* format);
/* Rows as CSV regardless of experiment kind. */
TFPR_API tfpr_status tfpr_results_write_cells(const tfpr_results* r, const char* path);
/* JSON description of the experiment that produced r. */
TFPR_API tfpr_status tfpr_results_write_spec(const tfpr_results* r, const char* path);
TFPR_API void tfpr_results_destroy(tfpr_results* r);

#ifdef __cplusplus
}
#endif

#endif
