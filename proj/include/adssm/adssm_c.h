/* C API for the ADSSM PPG-to-ECG translation library.
 *
 * All functions return adssm_status (ADSSM_OK on success) unless noted.
 * On failure, adssm_last_error() returns a thread-local description of
 * the most recent error. Objects are opaque handles released with the
 * matching *_free function.
 */
#ifndef ADSSM_C_H
#define ADSSM_C_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    ADSSM_OK = 0,
    ADSSM_E_INVALID = 1, /* contract violation / bad argument */
    ADSSM_E_IO = 2,      /* missing or unwritable file */
    ADSSM_E_PARSE = 3,   /* malformed CSV / config / checkpoint */
    ADSSM_E_NUMERIC = 4, /* non-finite loss or parameters */
    ADSSM_E_INTERNAL = 5
} adssm_status;

const char* adssm_last_error(void);
const char* adssm_version(void);

typedef struct adssm_waveform adssm_waveform;
typedef struct adssm_dataset adssm_dataset;
typedef struct adssm_model adssm_model;
typedef struct adssm_translation adssm_translation;
typedef struct adssm_config adssm_config;

/* ---- configuration ---------------------------------------------------- */

adssm_config* adssm_config_create(void);
adssm_status adssm_config_load(adssm_config* cfg, const char* path);
adssm_status adssm_config_set(adssm_config* cfg, const char* key,
                              const char* value);
adssm_status adssm_config_get_real(const adssm_config* cfg, const char* key,
                                   double* out);
adssm_status adssm_config_get_int(const adssm_config* cfg, const char* key,
                                  long long* out);
/* Writes the resolved key = value listing into buf (NUL terminated). */
adssm_status adssm_config_dump(const adssm_config* cfg, char* buf, size_t cap);
void adssm_config_free(adssm_config* cfg);

/* ---- waveforms -------------------------------------------------------- */

adssm_status adssm_waveform_create(const double* samples, size_t n,
                                   double rate_hz, int is_ecg,
                                   adssm_waveform** out);
adssm_status adssm_waveform_read_csv(const char* path, int is_ecg,
                                     adssm_waveform** out);
adssm_status adssm_waveform_write_csv(const adssm_waveform* w, const char* path);
size_t adssm_waveform_length(const adssm_waveform* w);
double adssm_waveform_rate(const adssm_waveform* w);
adssm_status adssm_waveform_copy_samples(const adssm_waveform* w, double* out,
                                         size_t cap);
adssm_status adssm_waveform_bandpass(const adssm_waveform* w, double low_hz,
                                     double high_hz, adssm_waveform** out);
adssm_status adssm_waveform_add_noise(const adssm_waveform* w,
                                      const double* amplitudes,
                                      const double* frequencies_hz,
                                      size_t n_components, double gaussian_std,
                                      unsigned long long seed,
                                      adssm_waveform** out);
adssm_status adssm_waveform_detect_peaks(const adssm_waveform* w, double min_bpm,
                                         double max_bpm, long long* out_indices,
                                         size_t cap, size_t* out_count);
void adssm_waveform_free(adssm_waveform* w);

/* ---- synthetic paired records ----------------------------------------- */

adssm_status adssm_synth_generate(double mean_bpm, double hr_variability_s,
                                  int afib, double ptt_delay_s,
                                  unsigned long long morphology_seed,
                                  double duration_s, double rate_hz,
                                  unsigned long long seed, adssm_waveform** ppg,
                                  adssm_waveform** ecg, double* r_times,
                                  double* systolic_times, size_t cap,
                                  size_t* n_beats);

/* ---- record manifests & ground-truth peaks ---------------------------- */

/* Manifest CSV: header `subject,label,ppg_csv,ecg_csv`, label is
 * healthy or afib. */
adssm_status adssm_manifest_write(const char* path, size_t n_rows,
                                  const char* const* subjects,
                                  const char* const* labels,
                                  const char* const* ppg_csvs,
                                  const char* const* ecg_csvs);
adssm_status adssm_manifest_size(const char* path, size_t* out_rows);
adssm_status adssm_manifest_row(const char* path, size_t index, char* subject,
                                size_t subject_cap, char* label,
                                size_t label_cap, char* ppg_csv,
                                size_t ppg_cap, char* ecg_csv, size_t ecg_cap);

/* Peaks CSV: header `beat_index,r_time_s,systolic_time_s`. */
adssm_status adssm_peaks_write(const char* path, const double* r_times,
                               const double* systolic_times, size_t n_beats);

/* ---- preprocessed datasets -------------------------------------------- */

adssm_status adssm_dataset_create(adssm_dataset** out);
/* Preprocesses one paired record into aligned normalized chunks and
 * appends them. ecg may be NULL (translation-only input). cfg may be
 * NULL for defaults. n_noise_components = 0 with gaussian_std = 0 means
 * the record is used clean. */
adssm_status adssm_dataset_add_record(adssm_dataset* ds, const adssm_waveform* ppg,
                                      const adssm_waveform* ecg,
                                      const char* subject, const char* cohort,
                                      const adssm_config* cfg,
                                      const double* noise_amplitudes,
                                      const double* noise_frequencies_hz,
                                      size_t n_noise_components,
                                      double noise_gaussian_std,
                                      unsigned long long noise_seed);
size_t adssm_dataset_size(const adssm_dataset* ds);
adssm_status adssm_dataset_chunk_info(const adssm_dataset* ds, size_t index,
                                      long long* steps, char* chunk_id,
                                      size_t id_cap, char* cohort,
                                      size_t cohort_cap);
adssm_status adssm_dataset_save(const adssm_dataset* ds, const char* path);
adssm_status adssm_dataset_load(const char* path, adssm_dataset** out);
void adssm_dataset_free(adssm_dataset* ds);

/* ---- model + training ------------------------------------------------- */

adssm_status adssm_model_create(int n_pp, int n_rr, int latent, int hidden,
                                int attn_hidden, unsigned long long seed,
                                adssm_model** out);
/* Accepts both parameter-only and full train-state checkpoints. */
adssm_status adssm_model_load(const char* path, adssm_model** out);
adssm_status adssm_model_save(const adssm_model* m, const char* path);
long long adssm_model_epoch(const adssm_model* m);
void adssm_model_free(adssm_model* m);

typedef struct {
    long long total_epochs;
    long long batch_size;
    long long anneal_end_epoch;
    long long checkpoint_every;
    double lr;
    double grad_clip_norm;
    unsigned long long seed;
    int strict_posterior;
    const char* checkpoint_dir; /* NULL: no checkpoints */
    const char* metrics_csv;    /* NULL: no metrics log */
} adssm_train_options;

/* Trains (or resumes) in place up to total_epochs. */
adssm_status adssm_train(adssm_model* m, const adssm_dataset* train_set,
                         const adssm_dataset* val_set,
                         const adssm_train_options* opts,
                         double* final_train_loss);

/* ---- translation ------------------------------------------------------ */

adssm_status adssm_translate_chunk(const adssm_model* m, const adssm_dataset* ds,
                                   size_t chunk_index, int sample_mode,
                                   int draws, unsigned long long seed,
                                   double rate_hz, int denormalize,
                                   adssm_translation** out);
size_t adssm_translation_length(const adssm_translation* t);
adssm_status adssm_translation_mean(const adssm_translation* t, double* out,
                                    size_t cap);
adssm_status adssm_translation_band(const adssm_translation* t, double rate_hz,
                                    double* lower, double* upper, size_t cap);
void adssm_translation_free(adssm_translation* t);

/* ---- evaluation & metrics --------------------------------------------- */

adssm_status adssm_evaluate(const adssm_model* m, const adssm_dataset* ds,
                            int normalized_units, const char* report_csv,
                            char* summary_buf, size_t cap);

adssm_status adssm_metric_pearson(const double* y, const double* yhat, size_t n,
                                  double* out);
adssm_status adssm_metric_rmse(const double* y, const double* yhat, size_t n,
                               double* out);
adssm_status adssm_metric_snr_db(const double* y, const double* yhat, size_t n,
                                 double* out);

/* ---- misc ------------------------------------------------------------- */

adssm_status adssm_beta_at(long long epoch, long long total_epochs,
                           long long anneal_end_epoch, double* out);
/* Finite-difference gradient verification on a tiny model. */
adssm_status adssm_gradcheck(unsigned long long seed, double* max_rel_err);

#ifdef __cplusplus
}
#endif

#endif /* ADSSM_C_H */
