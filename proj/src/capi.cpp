#include "adssm/adssm_c.h"

#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "adssm/checkpoint.hpp"
#include "adssm/config.hpp"
#include "adssm/csv.hpp"
#include "adssm/gradcheck.hpp"
#include "adssm/metrics.hpp"
#include "adssm/model.hpp"
#include "adssm/pipeline.hpp"
#include "adssm/signals.hpp"
#include "adssm/synth.hpp"
#include "adssm/training.hpp"
#include "adssm/translate.hpp"
#include "adssm/types.hpp"

using namespace adssm;

namespace {

thread_local std::string g_last_error;

adssm_status fail(adssm_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

template <typename Fn>
adssm_status guarded(Fn&& fn) {
    try {
        fn();
        return ADSSM_OK;
    } catch (const InvalidArgument& e) {
        return fail(ADSSM_E_INVALID, e.what());
    } catch (const IoError& e) {
        return fail(ADSSM_E_IO, e.what());
    } catch (const ParseError& e) {
        return fail(ADSSM_E_PARSE, e.what());
    } catch (const NumericError& e) {
        return fail(ADSSM_E_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(ADSSM_E_INTERNAL, e.what());
    } catch (...) {
        return fail(ADSSM_E_INTERNAL, "unknown error");
    }
}

adssm_status copy_text(const std::string& s, char* buf, size_t cap) {
    if (!buf || cap == 0) return fail(ADSSM_E_INVALID, "null or empty buffer");
    const size_t n = std::min(s.size(), cap - 1);
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
    return ADSSM_OK;
}

}  // namespace

struct adssm_waveform {
    Waveform w;
};
struct adssm_dataset {
    training::Dataset ds;
};
struct adssm_model {
    training::TrainState state;
};
struct adssm_translation {
    translate::Translation t;
};
struct adssm_config {
    config::Config cfg;
};

extern "C" {

const char* adssm_last_error(void) { return g_last_error.c_str(); }
const char* adssm_version(void) { return "1.0.0"; }

/* ---- configuration ---------------------------------------------------- */

adssm_config* adssm_config_create(void) { return new adssm_config{}; }

adssm_status adssm_config_load(adssm_config* cfg, const char* path) {
    if (!cfg || !path) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] { cfg->cfg.load_file(path); });
}

adssm_status adssm_config_set(adssm_config* cfg, const char* key,
                              const char* value) {
    if (!cfg || !key || !value) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] { cfg->cfg.set(key, value); });
}

adssm_status adssm_config_get_real(const adssm_config* cfg, const char* key,
                                   double* out) {
    if (!cfg || !key || !out) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] { *out = cfg->cfg.real(key); });
}

adssm_status adssm_config_get_int(const adssm_config* cfg, const char* key,
                                  long long* out) {
    if (!cfg || !key || !out) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] { *out = cfg->cfg.integer(key); });
}

adssm_status adssm_config_dump(const adssm_config* cfg, char* buf, size_t cap) {
    if (!cfg) return fail(ADSSM_E_INVALID, "null config");
    return copy_text(cfg->cfg.resolved(), buf, cap);
}

void adssm_config_free(adssm_config* cfg) { delete cfg; }

/* ---- waveforms -------------------------------------------------------- */

adssm_status adssm_waveform_create(const double* samples, size_t n,
                                   double rate_hz, int is_ecg,
                                   adssm_waveform** out) {
    if (!samples || !out) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] {
        auto w = std::make_unique<adssm_waveform>();
        w->w.samples.assign(samples, samples + n);
        w->w.sample_rate_hz = rate_hz;
        w->w.label = is_ecg ? SignalKind::ECG : SignalKind::PPG;
        w->w.validate();
        *out = w.release();
    });
}

adssm_status adssm_waveform_read_csv(const char* path, int is_ecg,
                                     adssm_waveform** out) {
    if (!path || !out) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] {
        auto w = std::make_unique<adssm_waveform>();
        w->w = csv::read_waveform(path, is_ecg ? SignalKind::ECG : SignalKind::PPG);
        *out = w.release();
    });
}

adssm_status adssm_waveform_write_csv(const adssm_waveform* w, const char* path) {
    if (!w || !path) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] { csv::write_waveform(path, w->w); });
}

size_t adssm_waveform_length(const adssm_waveform* w) {
    return w ? w->w.samples.size() : 0;
}

double adssm_waveform_rate(const adssm_waveform* w) {
    return w ? w->w.sample_rate_hz : 0.0;
}

adssm_status adssm_waveform_copy_samples(const adssm_waveform* w, double* out,
                                         size_t cap) {
    if (!w || !out) return fail(ADSSM_E_INVALID, "null argument");
    if (cap < w->w.samples.size())
        return fail(ADSSM_E_INVALID, "buffer too small");
    std::memcpy(out, w->w.samples.data(), w->w.samples.size() * sizeof(double));
    return ADSSM_OK;
}

adssm_status adssm_waveform_bandpass(const adssm_waveform* w, double low_hz,
                                     double high_hz, adssm_waveform** out) {
    if (!w || !out) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] {
        auto r = std::make_unique<adssm_waveform>();
        r->w = signals::bandpass_filter(w->w, low_hz, high_hz);
        *out = r.release();
    });
}

adssm_status adssm_waveform_add_noise(const adssm_waveform* w,
                                      const double* amplitudes,
                                      const double* frequencies_hz,
                                      size_t n_components, double gaussian_std,
                                      unsigned long long seed,
                                      adssm_waveform** out) {
    if (!w || !out) return fail(ADSSM_E_INVALID, "null argument");
    if (n_components > 0 && (!amplitudes || !frequencies_hz))
        return fail(ADSSM_E_INVALID, "null component arrays");
    return guarded([&] {
        NoiseSpec spec;
        for (size_t i = 0; i < n_components; ++i)
            spec.baseline_components.push_back({amplitudes[i], frequencies_hz[i]});
        spec.gaussian_std = gaussian_std;
        auto r = std::make_unique<adssm_waveform>();
        r->w = signals::add_noise(w->w, spec, seed);
        *out = r.release();
    });
}

adssm_status adssm_waveform_detect_peaks(const adssm_waveform* w, double min_bpm,
                                         double max_bpm, long long* out_indices,
                                         size_t cap, size_t* out_count) {
    if (!w || !out_count) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] {
        const PeakList peaks = signals::detect_peaks(w->w, min_bpm, max_bpm);
        *out_count = peaks.size();
        if (out_indices) {
            if (cap < peaks.size()) throw InvalidArgument("buffer too small");
            for (size_t i = 0; i < peaks.size(); ++i)
                out_indices[i] = peaks.indices[i];
        }
    });
}

void adssm_waveform_free(adssm_waveform* w) { delete w; }

/* ---- synthetic paired records ----------------------------------------- */

adssm_status adssm_synth_generate(double mean_bpm, double hr_variability_s,
                                  int afib, double ptt_delay_s,
                                  unsigned long long morphology_seed,
                                  double duration_s, double rate_hz,
                                  unsigned long long seed, adssm_waveform** ppg,
                                  adssm_waveform** ecg, double* r_times,
                                  double* systolic_times, size_t cap,
                                  size_t* n_beats) {
    if (!ppg || !ecg) return fail(ADSSM_E_INVALID, "null output handles");
    return guarded([&] {
        synth::SubjectProfile profile;
        profile.mean_bpm = mean_bpm;
        profile.hr_variability_s = hr_variability_s;
        profile.afib = afib != 0;
        profile.ptt_delay_s = ptt_delay_s;
        profile.morphology_seed = morphology_seed;
        synth::PairedRecord rec =
            synth::generate_pair(profile, duration_s, rate_hz, seed);
        if (n_beats) *n_beats = rec.truth.r_times_s.size();
        if (r_times || systolic_times) {
            if (cap < rec.truth.r_times_s.size())
                throw InvalidArgument("ground-truth buffer too small");
            for (size_t i = 0; i < rec.truth.r_times_s.size(); ++i) {
                if (r_times) r_times[i] = rec.truth.r_times_s[i];
                if (systolic_times)
                    systolic_times[i] = rec.truth.systolic_times_s[i];
            }
        }
        auto p = std::make_unique<adssm_waveform>();
        auto e = std::make_unique<adssm_waveform>();
        p->w = std::move(rec.ppg);
        e->w = std::move(rec.ecg);
        *ppg = p.release();
        *ecg = e.release();
    });
}

/* ---- record manifests & ground-truth peaks ---------------------------- */

adssm_status adssm_manifest_write(const char* path, size_t n_rows,
                                  const char* const* subjects,
                                  const char* const* labels,
                                  const char* const* ppg_csvs,
                                  const char* const* ecg_csvs) {
    if (!path || (n_rows > 0 && (!subjects || !labels || !ppg_csvs || !ecg_csvs)))
        return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] {
        std::vector<csv::ManifestRow> rows(n_rows);
        for (size_t i = 0; i < n_rows; ++i)
            rows[i] = {subjects[i], labels[i], ppg_csvs[i], ecg_csvs[i]};
        csv::write_manifest(path, rows);
    });
}

adssm_status adssm_manifest_size(const char* path, size_t* out_rows) {
    if (!path || !out_rows) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] { *out_rows = csv::read_manifest(path).size(); });
}

adssm_status adssm_manifest_row(const char* path, size_t index, char* subject,
                                size_t subject_cap, char* label,
                                size_t label_cap, char* ppg_csv, size_t ppg_cap,
                                char* ecg_csv, size_t ecg_cap) {
    if (!path) return fail(ADSSM_E_INVALID, "null path");
    return guarded([&] {
        const auto rows = csv::read_manifest(path);
        if (index >= rows.size()) throw InvalidArgument("manifest row out of range");
        const csv::ManifestRow& r = rows[index];
        if (subject && copy_text(r.subject, subject, subject_cap) != ADSSM_OK)
            throw InvalidArgument("subject buffer too small");
        if (label && copy_text(r.label, label, label_cap) != ADSSM_OK)
            throw InvalidArgument("label buffer too small");
        if (ppg_csv && copy_text(r.ppg_csv, ppg_csv, ppg_cap) != ADSSM_OK)
            throw InvalidArgument("ppg_csv buffer too small");
        if (ecg_csv && copy_text(r.ecg_csv, ecg_csv, ecg_cap) != ADSSM_OK)
            throw InvalidArgument("ecg_csv buffer too small");
    });
}

adssm_status adssm_peaks_write(const char* path, const double* r_times,
                               const double* systolic_times, size_t n_beats) {
    if (!path || (n_beats > 0 && (!r_times || !systolic_times)))
        return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] {
        synth::GroundTruth truth;
        truth.r_times_s.assign(r_times, r_times + n_beats);
        truth.systolic_times_s.assign(systolic_times, systolic_times + n_beats);
        csv::write_peaks(path, truth);
    });
}

/* ---- preprocessed datasets -------------------------------------------- */

namespace {

pipeline::PreprocessOptions options_from_config(const adssm_config* cfg) {
    pipeline::PreprocessOptions opts;
    if (!cfg) return opts;
    const config::Config& c = cfg->cfg;
    opts.chunk_seconds = c.real("chunk_seconds");
    opts.interval_len = static_cast<int>(c.integer("interval"));
    opts.min_bpm = c.real("min_bpm");
    opts.max_bpm = c.real("max_bpm");
    opts.ppg_band_low = c.real("ppg_band_low");
    opts.ppg_band_high = c.real("ppg_band_high");
    opts.ecg_band_low = c.real("ecg_band_low");
    opts.ecg_band_high = c.real("ecg_band_high");
    opts.noise_on_ecg = c.flag("noise_on_ecg");
    return opts;
}

}  // namespace

adssm_status adssm_dataset_create(adssm_dataset** out) {
    if (!out) return fail(ADSSM_E_INVALID, "null output handle");
    *out = new adssm_dataset{};
    return ADSSM_OK;
}

adssm_status adssm_dataset_add_record(adssm_dataset* ds, const adssm_waveform* ppg,
                                      const adssm_waveform* ecg,
                                      const char* subject, const char* cohort,
                                      const adssm_config* cfg,
                                      const double* noise_amplitudes,
                                      const double* noise_frequencies_hz,
                                      size_t n_noise_components,
                                      double noise_gaussian_std,
                                      unsigned long long noise_seed) {
    if (!ds || !ppg || !subject || !cohort)
        return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] {
        pipeline::PreprocessOptions opts = options_from_config(cfg);
        if (n_noise_components > 0 || noise_gaussian_std > 0.0) {
            NoiseSpec spec;
            for (size_t i = 0; i < n_noise_components; ++i)
                spec.baseline_components.push_back(
                    {noise_amplitudes[i], noise_frequencies_hz[i]});
            spec.gaussian_std = noise_gaussian_std;
            opts.noise = spec;
            opts.noise_seed = noise_seed;
        }
        training::Dataset chunks =
            ecg ? pipeline::preprocess_record(ppg->w, ecg->w, subject, cohort, opts)
                : pipeline::preprocess_ppg_only(ppg->w, subject, cohort, opts);
        for (auto& c : chunks) ds->ds.push_back(std::move(c));
    });
}

size_t adssm_dataset_size(const adssm_dataset* ds) {
    return ds ? ds->ds.size() : 0;
}

adssm_status adssm_dataset_chunk_info(const adssm_dataset* ds, size_t index,
                                      long long* steps, char* chunk_id,
                                      size_t id_cap, char* cohort,
                                      size_t cohort_cap) {
    if (!ds) return fail(ADSSM_E_INVALID, "null dataset");
    if (index >= ds->ds.size()) return fail(ADSSM_E_INVALID, "index out of range");
    const training::LabeledChunk& c = ds->ds[index];
    if (steps) *steps = c.pair.x.rows();
    if (chunk_id) {
        const adssm_status s = copy_text(c.pair.chunk_id, chunk_id, id_cap);
        if (s != ADSSM_OK) return s;
    }
    if (cohort) {
        const adssm_status s = copy_text(c.cohort, cohort, cohort_cap);
        if (s != ADSSM_OK) return s;
    }
    return ADSSM_OK;
}

adssm_status adssm_dataset_save(const adssm_dataset* ds, const char* path) {
    if (!ds || !path) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] { pipeline::save_dataset(path, ds->ds); });
}

adssm_status adssm_dataset_load(const char* path, adssm_dataset** out) {
    if (!path || !out) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] {
        auto ds = std::make_unique<adssm_dataset>();
        ds->ds = pipeline::load_dataset(path);
        *out = ds.release();
    });
}

void adssm_dataset_free(adssm_dataset* ds) { delete ds; }

/* ---- model + training ------------------------------------------------- */

adssm_status adssm_model_create(int n_pp, int n_rr, int latent, int hidden,
                                int attn_hidden, unsigned long long seed,
                                adssm_model** out) {
    if (!out) return fail(ADSSM_E_INVALID, "null output handle");
    return guarded([&] {
        model::Dims dims;
        dims.n_pp = n_pp;
        dims.n_rr = n_rr;
        dims.latent = latent;
        dims.hidden = hidden;
        dims.attn_hidden = attn_hidden;
        auto m = std::make_unique<adssm_model>();
        m->state = training::init_train_state(dims, seed);
        *out = m.release();
    });
}

adssm_status adssm_model_load(const char* path, adssm_model** out) {
    if (!path || !out) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] {
        auto m = std::make_unique<adssm_model>();
        try {
            m->state = checkpoint::load_train_state(path);
        } catch (const ParseError&) {
            model::ParameterSet params = checkpoint::load_params(path);
            m->state.opt = training::OptimizerState::init(params);
            m->state.params = std::move(params);
            m->state.epoch = 0;
            m->state.beta = 0.0;
            m->state.seed = 0;
        }
        *out = m.release();
    });
}

adssm_status adssm_model_save(const adssm_model* m, const char* path) {
    if (!m || !path) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] { checkpoint::save_train_state(path, m->state); });
}

long long adssm_model_epoch(const adssm_model* m) {
    return m ? m->state.epoch : -1;
}

void adssm_model_free(adssm_model* m) { delete m; }

adssm_status adssm_train(adssm_model* m, const adssm_dataset* train_set,
                         const adssm_dataset* val_set,
                         const adssm_train_options* opts,
                         double* final_train_loss) {
    if (!m || !train_set || !opts) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] {
        training::TrainOptions topts;
        topts.sched.total_epochs = opts->total_epochs;
        topts.sched.batch_size = opts->batch_size;
        topts.sched.anneal_end_epoch = opts->anneal_end_epoch;
        topts.sched.checkpoint_every =
            opts->checkpoint_every > 0 ? opts->checkpoint_every : 100;
        topts.seed = opts->seed;
        if (opts->checkpoint_dir) topts.checkpoint_dir = opts->checkpoint_dir;
        if (opts->metrics_csv) topts.metrics_csv = opts->metrics_csv;
        topts.grad_clip_norm = opts->grad_clip_norm;
        topts.strict_posterior = opts->strict_posterior != 0;
        m->state.opt.lr = opts->lr;
        static const training::Dataset empty;
        const auto records = training::train(
            train_set->ds, val_set ? val_set->ds : empty, m->state, topts);
        if (final_train_loss)
            *final_train_loss = records.empty() ? 0.0 : records.back().train_loss;
    });
}

/* ---- translation ------------------------------------------------------ */

adssm_status adssm_translate_chunk(const adssm_model* m, const adssm_dataset* ds,
                                   size_t chunk_index, int sample_mode,
                                   int draws, unsigned long long seed,
                                   double rate_hz, int denormalize,
                                   adssm_translation** out) {
    if (!m || !ds || !out) return fail(ADSSM_E_INVALID, "null argument");
    if (chunk_index >= ds->ds.size())
        return fail(ADSSM_E_INVALID, "chunk index out of range");
    return guarded([&] {
        const training::LabeledChunk& c = ds->ds[chunk_index];
        IntervalSequence x;
        x.segments = c.pair.x;
        x.original_lengths = c.pp_lengths;
        x.kind = IntervalKind::PP;
        x.chunk_id = c.pair.chunk_id;
        x.norm = c.ppg_norm;
        auto t = std::make_unique<adssm_translation>();
        t->t = translate::translate_chunk(
            x, m->state.params,
            sample_mode ? translate::Mode::Sample : translate::Mode::Mean, draws,
            seed, rate_hz, denormalize != 0);
        *out = t.release();
    });
}

size_t adssm_translation_length(const adssm_translation* t) {
    return t ? t->t.ecg_mean.samples.size() : 0;
}

adssm_status adssm_translation_mean(const adssm_translation* t, double* out,
                                    size_t cap) {
    if (!t || !out) return fail(ADSSM_E_INVALID, "null argument");
    if (cap < t->t.ecg_mean.samples.size())
        return fail(ADSSM_E_INVALID, "buffer too small");
    std::memcpy(out, t->t.ecg_mean.samples.data(),
                t->t.ecg_mean.samples.size() * sizeof(double));
    return ADSSM_OK;
}

adssm_status adssm_translation_band(const adssm_translation* t, double rate_hz,
                                    double* lower, double* upper, size_t cap) {
    if (!t || !lower || !upper) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] {
        const translate::Band band = translate::uncertainty_band(t->t, rate_hz);
        if (cap < band.lower.samples.size())
            throw InvalidArgument("buffer too small");
        std::memcpy(lower, band.lower.samples.data(),
                    band.lower.samples.size() * sizeof(double));
        std::memcpy(upper, band.upper.samples.data(),
                    band.upper.samples.size() * sizeof(double));
    });
}

void adssm_translation_free(adssm_translation* t) { delete t; }

/* ---- evaluation & metrics --------------------------------------------- */

adssm_status adssm_evaluate(const adssm_model* m, const adssm_dataset* ds,
                            int normalized_units, const char* report_csv,
                            char* summary_buf, size_t cap) {
    if (!m || !ds) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] {
        const auto records = pipeline::evaluate_dataset(ds->ds, m->state.params,
                                                        normalized_units != 0);
        if (report_csv) metrics::write_report_csv(report_csv, records);
        if (summary_buf) {
            const std::string text =
                metrics::format_report(metrics::aggregate(records));
            if (copy_text(text, summary_buf, cap) != ADSSM_OK)
                throw InvalidArgument("summary buffer too small");
        }
    });
}

adssm_status adssm_metric_pearson(const double* y, const double* yhat, size_t n,
                                  double* out) {
    if (!y || !yhat || !out) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] { *out = metrics::pearson({y, n}, {yhat, n}); });
}

adssm_status adssm_metric_rmse(const double* y, const double* yhat, size_t n,
                               double* out) {
    if (!y || !yhat || !out) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] { *out = metrics::rmse({y, n}, {yhat, n}); });
}

adssm_status adssm_metric_snr_db(const double* y, const double* yhat, size_t n,
                                 double* out) {
    if (!y || !yhat || !out) return fail(ADSSM_E_INVALID, "null argument");
    return guarded([&] { *out = metrics::snr_db({y, n}, {yhat, n}); });
}

/* ---- misc ------------------------------------------------------------- */

adssm_status adssm_beta_at(long long epoch, long long total_epochs,
                           long long anneal_end_epoch, double* out) {
    if (!out) return fail(ADSSM_E_INVALID, "null output");
    return guarded([&] {
        training::Schedule sched;
        sched.total_epochs = total_epochs;
        sched.anneal_end_epoch = anneal_end_epoch;
        sched.validate();
        *out = training::beta_at(epoch, sched);
    });
}

adssm_status adssm_gradcheck(unsigned long long seed, double* max_rel_err) {
    if (!max_rel_err) return fail(ADSSM_E_INVALID, "null output");
    return guarded(
        [&] { *max_rel_err = model::gradient_check(seed).max_rel_err; });
}

}  // extern "C"
