// adssm command line: synthetic data generation, preprocessing, training,
// translation, evaluation, noise injection, and gradient verification.
// Links only the C API.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adssm/adssm_c.h"

namespace {

int code_for(adssm_status s) {
    switch (s) {
        case ADSSM_E_IO:
            return 3;
        case ADSSM_E_PARSE:
            return 4;
        default:
            return 1;
    }
}

#define CHECK(call)                                         \
    do {                                                    \
        const adssm_status s_ = (call);                     \
        if (s_ != ADSSM_OK) {                               \
            std::cerr << "error: " << adssm_last_error()    \
                      << "\n";                              \
            return code_for(s_);                            \
        }                                                   \
    } while (0)

struct ConfigHandle {
    adssm_config* cfg = adssm_config_create();
    ~ConfigHandle() { adssm_config_free(cfg); }
};

struct WaveformHandle {
    adssm_waveform* w = nullptr;
    ~WaveformHandle() { adssm_waveform_free(w); }
};

struct DatasetHandle {
    adssm_dataset* ds = nullptr;
    ~DatasetHandle() { adssm_dataset_free(ds); }
};

struct ModelHandle {
    adssm_model* m = nullptr;
    ~ModelHandle() { adssm_model_free(m); }
};

struct TranslationHandle {
    adssm_translation* t = nullptr;
    ~TranslationHandle() { adssm_translation_free(t); }
};

// Reference noise model: three baseline sinusoids plus Gaussian noise.
const double kNoiseAmps[3] = {0.3, 0.4, 0.1};
const double kNoiseFreqs[3] = {0.3, 0.2, 0.9};

double cfg_real(const adssm_config* cfg, const char* key) {
    double v = 0.0;
    adssm_config_get_real(cfg, key, &v);
    return v;
}

long long cfg_int(const adssm_config* cfg, const char* key) {
    long long v = 0;
    adssm_config_get_int(cfg, key, &v);
    return v;
}

int log_resolved(const adssm_config* cfg) {
    std::vector<char> buf(4096);
    CHECK(adssm_config_dump(cfg, buf.data(), buf.size()));
    std::cout << "resolved config:\n" << buf.data();
    std::cout << "seed = " << cfg_int(cfg, "seed") << "\n";
    return 0;
}

int set_override(adssm_config* cfg, const char* key, const std::string& value) {
    CHECK(adssm_config_set(cfg, key, value.c_str()));
    return 0;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---- synth ---------------------------------------------------------------

int run_synth(const adssm_config* cfg, int subjects, int afib, double duration,
              const std::string& out_dir) {
    const double rate = cfg_real(cfg, "rate");
    const auto seed = static_cast<unsigned long long>(cfg_int(cfg, "seed"));

    std::vector<std::string> names, labels, ppg_paths, ecg_paths;
    for (int i = 0; i < subjects; ++i) {
        const double mean_bpm =
            subjects > 1 ? 60.0 + 30.0 * i / (subjects - 1) : 70.0;
        const bool is_afib = afib != 0 && (subjects == 1 || i % 2 == 1);

        WaveformHandle ppg, ecg;
        std::vector<double> r_times(4096), sys_times(4096);
        size_t beats = 0;
        CHECK(adssm_synth_generate(mean_bpm, 0.03, is_afib ? 1 : 0, 0.25,
                                   seed + 17 * i, duration, rate, seed + i,
                                   &ppg.w, &ecg.w, r_times.data(),
                                   sys_times.data(), r_times.size(), &beats));

        const std::string name = "s" + std::to_string(i);
        const std::string ppg_path = out_dir + "/ppg_" + name + ".csv";
        const std::string ecg_path = out_dir + "/ecg_" + name + ".csv";
        CHECK(adssm_waveform_write_csv(ppg.w, ppg_path.c_str()));
        CHECK(adssm_waveform_write_csv(ecg.w, ecg_path.c_str()));
        CHECK(adssm_peaks_write((out_dir + "/peaks_" + name + ".csv").c_str(),
                                r_times.data(), sys_times.data(), beats));
        names.push_back(name);
        labels.push_back(is_afib ? "afib" : "healthy");
        ppg_paths.push_back(ppg_path);
        ecg_paths.push_back(ecg_path);
        std::cout << name << ": " << labels.back() << ", " << beats
                  << " beats, mean " << mean_bpm << " bpm\n";
    }

    std::vector<const char*> n, l, p, e;
    for (int i = 0; i < subjects; ++i) {
        n.push_back(names[i].c_str());
        l.push_back(labels[i].c_str());
        p.push_back(ppg_paths[i].c_str());
        e.push_back(ecg_paths[i].c_str());
    }
    const std::string manifest = out_dir + "/manifest.csv";
    CHECK(adssm_manifest_write(manifest.c_str(), subjects, n.data(), l.data(),
                               p.data(), e.data()));
    std::cout << "wrote " << manifest << "\n";
    return 0;
}

// ---- preprocess ----------------------------------------------------------

int run_preprocess(const adssm_config* cfg, const std::string& manifest,
                   int noise, const std::string& out_path) {
    const auto seed = static_cast<unsigned long long>(cfg_int(cfg, "seed"));
    const double noise_std = cfg_real(cfg, "noise_std");

    size_t rows = 0;
    CHECK(adssm_manifest_size(manifest.c_str(), &rows));

    DatasetHandle ds;
    CHECK(adssm_dataset_create(&ds.ds));
    for (size_t i = 0; i < rows; ++i) {
        char subject[256], label[64], ppg_csv[4096], ecg_csv[4096];
        CHECK(adssm_manifest_row(manifest.c_str(), i, subject, sizeof(subject),
                                 label, sizeof(label), ppg_csv, sizeof(ppg_csv),
                                 ecg_csv, sizeof(ecg_csv)));
        WaveformHandle ppg, ecg;
        CHECK(adssm_waveform_read_csv(ppg_csv, 0, &ppg.w));
        CHECK(adssm_waveform_read_csv(ecg_csv, 1, &ecg.w));
        if (noise)
            CHECK(adssm_dataset_add_record(ds.ds, ppg.w, ecg.w, subject, label,
                                           cfg, kNoiseAmps, kNoiseFreqs, 3,
                                           noise_std, seed + 31 * i));
        else
            CHECK(adssm_dataset_add_record(ds.ds, ppg.w, ecg.w, subject, label,
                                           cfg, nullptr, nullptr, 0, 0.0, 0));
    }
    CHECK(adssm_dataset_save(ds.ds, out_path.c_str()));
    std::cout << "wrote " << adssm_dataset_size(ds.ds) << " chunks to "
              << out_path << "\n";
    return 0;
}

// ---- train ---------------------------------------------------------------

int run_train(const adssm_config* cfg, const std::string& data_path,
              const std::string& val_path, const std::string& resume_path,
              const std::string& out_path, const std::string& checkpoint_dir,
              const std::string& metrics_csv) {
    DatasetHandle train_ds, val_ds;
    CHECK(adssm_dataset_load(data_path.c_str(), &train_ds.ds));
    if (!val_path.empty())
        CHECK(adssm_dataset_load(val_path.c_str(), &val_ds.ds));

    ModelHandle model;
    if (!resume_path.empty()) {
        CHECK(adssm_model_load(resume_path.c_str(), &model.m));
        std::cout << "resuming from epoch " << adssm_model_epoch(model.m)
                  << "\n";
    } else {
        const int interval = static_cast<int>(cfg_int(cfg, "interval"));
        CHECK(adssm_model_create(
            interval, interval, static_cast<int>(cfg_int(cfg, "latent")),
            static_cast<int>(cfg_int(cfg, "hidden")),
            static_cast<int>(cfg_int(cfg, "attn_hidden")),
            static_cast<unsigned long long>(cfg_int(cfg, "seed")), &model.m));
    }

    adssm_train_options opts{};
    opts.total_epochs = cfg_int(cfg, "epochs");
    opts.batch_size = cfg_int(cfg, "batch");
    opts.anneal_end_epoch = cfg_int(cfg, "anneal");
    opts.checkpoint_every = cfg_int(cfg, "checkpoint_every");
    opts.lr = cfg_real(cfg, "lr");
    opts.grad_clip_norm = cfg_real(cfg, "grad_clip");
    opts.seed = static_cast<unsigned long long>(cfg_int(cfg, "seed"));
    opts.strict_posterior = static_cast<int>(cfg_int(cfg, "strict_posterior"));
    opts.checkpoint_dir = checkpoint_dir.empty() ? nullptr : checkpoint_dir.c_str();
    opts.metrics_csv = metrics_csv.empty() ? nullptr : metrics_csv.c_str();

    double final_loss = 0.0;
    CHECK(adssm_train(model.m, train_ds.ds, val_ds.ds, &opts, &final_loss));
    CHECK(adssm_model_save(model.m, out_path.c_str()));
    std::cout << "final train loss " << final_loss << ", model saved to "
              << out_path << "\n";
    return 0;
}

// ---- translate -----------------------------------------------------------

int run_translate(const adssm_config* cfg, const std::string& model_path,
                  const std::string& input_path, const std::string& out_path,
                  int samples, const std::string& band_prefix, int raw) {
    ModelHandle model;
    CHECK(adssm_model_load(model_path.c_str(), &model.m));

    WaveformHandle ppg;
    CHECK(adssm_waveform_read_csv(input_path.c_str(), 0, &ppg.w));
    const double rate = adssm_waveform_rate(ppg.w);

    DatasetHandle ds;
    CHECK(adssm_dataset_create(&ds.ds));
    CHECK(adssm_dataset_add_record(ds.ds, ppg.w, nullptr, "input", "unknown",
                                   cfg, nullptr, nullptr, 0, 0.0, 0));
    const size_t chunks = adssm_dataset_size(ds.ds);
    if (chunks == 0) {
        std::cerr << "error: no usable chunks in input (too few pulses?)\n";
        return 1;
    }

    const auto seed = static_cast<unsigned long long>(cfg_int(cfg, "seed"));
    std::vector<double> mean, lower, upper;
    for (size_t i = 0; i < chunks; ++i) {
        TranslationHandle tr;
        CHECK(adssm_translate_chunk(model.m, ds.ds, i, samples > 0 ? 1 : 0,
                                    samples, seed + i, rate, raw ? 0 : 1,
                                    &tr.t));
        const size_t len = adssm_translation_length(tr.t);
        std::vector<double> buf(len);
        CHECK(adssm_translation_mean(tr.t, buf.data(), len));
        mean.insert(mean.end(), buf.begin(), buf.end());
        if (!band_prefix.empty()) {
            std::vector<double> lo(len), hi(len);
            CHECK(adssm_translation_band(tr.t, rate, lo.data(), hi.data(), len));
            lower.insert(lower.end(), lo.begin(), lo.end());
            upper.insert(upper.end(), hi.begin(), hi.end());
        }
    }

    WaveformHandle out;
    CHECK(adssm_waveform_create(mean.data(), mean.size(), rate, 1, &out.w));
    CHECK(adssm_waveform_write_csv(out.w, out_path.c_str()));
    std::cout << "wrote " << mean.size() << " samples to " << out_path << "\n";

    if (!band_prefix.empty()) {
        WaveformHandle lo, hi;
        CHECK(adssm_waveform_create(lower.data(), lower.size(), rate, 1, &lo.w));
        CHECK(adssm_waveform_create(upper.data(), upper.size(), rate, 1, &hi.w));
        CHECK(adssm_waveform_write_csv(lo.w, (band_prefix + "_lower.csv").c_str()));
        CHECK(adssm_waveform_write_csv(hi.w, (band_prefix + "_upper.csv").c_str()));
        std::cout << "wrote uncertainty band to " << band_prefix
                  << "_{lower,upper}.csv\n";
    }
    return 0;
}

// ---- evaluate ------------------------------------------------------------

int run_evaluate_files(const std::string& pred_path, const std::string& ref_path) {
    WaveformHandle pred, ref;
    CHECK(adssm_waveform_read_csv(pred_path.c_str(), 1, &pred.w));
    CHECK(adssm_waveform_read_csv(ref_path.c_str(), 1, &ref.w));
    const size_t n = adssm_waveform_length(ref.w);
    if (adssm_waveform_length(pred.w) != n) {
        std::cerr << "error: pred and ref lengths differ\n";
        return 1;
    }
    std::vector<double> y(n), yhat(n);
    CHECK(adssm_waveform_copy_samples(ref.w, y.data(), n));
    CHECK(adssm_waveform_copy_samples(pred.w, yhat.data(), n));

    double v = 0.0;
    if (adssm_metric_pearson(y.data(), yhat.data(), n, &v) == ADSSM_OK)
        std::cout << "pearson = " << v << "\n";
    else
        std::cout << "pearson = undefined (" << adssm_last_error() << ")\n";
    CHECK(adssm_metric_rmse(y.data(), yhat.data(), n, &v));
    std::cout << "rmse = " << v << "\n";
    CHECK(adssm_metric_snr_db(y.data(), yhat.data(), n, &v));
    std::cout << "snr_db = " << v << "\n";
    return 0;
}

int run_evaluate_model(const std::string& model_path, const std::string& data_path,
                       const std::string& report_csv, int normalized) {
    ModelHandle model;
    DatasetHandle ds;
    CHECK(adssm_model_load(model_path.c_str(), &model.m));
    CHECK(adssm_dataset_load(data_path.c_str(), &ds.ds));
    std::vector<char> summary(16384);
    CHECK(adssm_evaluate(model.m, ds.ds, normalized,
                         report_csv.empty() ? nullptr : report_csv.c_str(),
                         summary.data(), summary.size()));
    std::cout << summary.data();
    return 0;
}

// ---- noise ---------------------------------------------------------------

int run_noise(const adssm_config* cfg, const std::string& input_path,
              const std::string& out_path) {
    WaveformHandle in, out;
    CHECK(adssm_waveform_read_csv(input_path.c_str(), 0, &in.w));
    CHECK(adssm_waveform_add_noise(
        in.w, kNoiseAmps, kNoiseFreqs, 3, cfg_real(cfg, "noise_std"),
        static_cast<unsigned long long>(cfg_int(cfg, "seed")), &out.w));
    CHECK(adssm_waveform_write_csv(out.w, out_path.c_str()));
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

// ---- gradcheck -----------------------------------------------------------

int run_gradcheck(const adssm_config* cfg) {
    double err = 0.0;
    CHECK(adssm_gradcheck(static_cast<unsigned long long>(cfg_int(cfg, "seed")),
                          &err));
    std::printf("max relative gradient error: %.6e\n", err);
    return err < 1e-4 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PPG-to-ECG translation with an attention-based deep "
                 "state-space model"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key = value config file")
        ->configurable(false);

    ConfigHandle config;

    // Flags shared by several subcommands; each overrides a config key.
    long long seed_flag = 0, epochs_flag = 0, batch_flag = 0, anneal_flag = 0;
    double lr_flag = 0.0, noise_std_flag = 0.0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed_flag, "RNG seed (overrides config)");
    };

    auto* synth = app.add_subcommand("synth", "generate paired synthetic records");
    int subjects = 2, afib = 0;
    double duration = 60.0;
    std::string out_dir;
    synth->add_option("--subjects", subjects, "number of subjects")
        ->check(CLI::PositiveNumber);
    synth->add_option("--afib", afib, "1: alternate subjects are AFib-like");
    synth->add_option("--duration", duration, "seconds per record");
    synth->add_option("--out", out_dir, "output directory")->required();
    add_common(synth);

    auto* preprocess =
        app.add_subcommand("preprocess", "manifest of CSVs -> dataset file");
    std::string manifest_path, dataset_out;
    int noise_flag = 0;
    preprocess->add_option("--manifest", manifest_path, "manifest CSV")->required();
    preprocess->add_option("--out", dataset_out, "output dataset path")->required();
    preprocess->add_option("--noise", noise_flag, "1: corrupt PPG with the noise model");
    preprocess->add_option("--noise-std", noise_std_flag, "Gaussian noise std");
    add_common(preprocess);

    auto* train = app.add_subcommand("train", "train a model on a dataset");
    std::string train_data, val_data, resume_path, model_out, ckpt_dir, metrics_csv;
    train->add_option("--data", train_data, "training dataset")->required();
    train->add_option("--val", val_data, "validation dataset");
    train->add_option("--resume", resume_path, "checkpoint to resume from");
    train->add_option("--out", model_out, "output model checkpoint")->required();
    train->add_option("--checkpoint-dir", ckpt_dir, "periodic checkpoint directory");
    train->add_option("--metrics-csv", metrics_csv, "per-epoch metrics log");
    train->add_option("--epochs", epochs_flag, "total epochs");
    train->add_option("--batch", batch_flag, "batch size");
    train->add_option("--anneal", anneal_flag, "KL anneal end epoch");
    train->add_option("--lr", lr_flag, "learning rate");
    add_common(train);

    auto* translate = app.add_subcommand("translate", "PPG CSV -> ECG CSV");
    std::string tr_model, tr_input, tr_out, band_prefix;
    int tr_samples = 0, tr_raw = 0;
    translate->add_option("--model", tr_model, "model checkpoint")->required();
    translate->add_option("--input", tr_input, "PPG waveform CSV")->required();
    translate->add_option("--out", tr_out, "output ECG CSV")->required();
    translate->add_option("--samples", tr_samples,
                          "Monte Carlo draws (0: mean rollout)");
    translate->add_option("--band-out", band_prefix,
                          "prefix for 5th/95th percentile band CSVs");
    translate->add_option("--raw", tr_raw, "1: keep normalized units");
    add_common(translate);

    auto* evaluate = app.add_subcommand("evaluate", "similarity metrics");
    std::string ev_pred, ev_ref, ev_model, ev_data, ev_report;
    int ev_normalized = 0;
    evaluate->add_option("--pred", ev_pred, "predicted waveform CSV");
    evaluate->add_option("--ref", ev_ref, "reference waveform CSV");
    evaluate->add_option("--model", ev_model, "model checkpoint");
    evaluate->add_option("--data", ev_data, "dataset to evaluate on");
    evaluate->add_option("--report", ev_report, "per-chunk report CSV");
    evaluate->add_option("--normalized", ev_normalized,
                         "1: metrics in normalized units");
    add_common(evaluate);

    auto* noise = app.add_subcommand("noise", "corrupt a waveform CSV");
    std::string nz_input, nz_out;
    noise->add_option("--input", nz_input, "input waveform CSV")->required();
    noise->add_option("--out", nz_out, "output waveform CSV")->required();
    noise->add_option("--noise-std", noise_std_flag, "Gaussian noise std");
    add_common(noise);

    auto* gradcheck =
        app.add_subcommand("gradcheck", "finite-difference gradient check");
    add_common(gradcheck);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (!config_path.empty()) {
        const adssm_status s = adssm_config_load(config.cfg, config_path.c_str());
        if (s != ADSSM_OK) {
            std::cerr << "error: " << adssm_last_error() << "\n";
            return code_for(s);
        }
    }
    CLI::App* sub = app.get_subcommands().front();
    auto given = [&](const std::string& name) {
        const CLI::Option* opt = sub->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    int rc = 0;
    if (given("--seed")) rc = set_override(config.cfg, "seed", num(static_cast<double>(seed_flag)));
    if (rc == 0 && given("--epochs")) rc = set_override(config.cfg, "epochs", num(static_cast<double>(epochs_flag)));
    if (rc == 0 && given("--batch")) rc = set_override(config.cfg, "batch", num(static_cast<double>(batch_flag)));
    if (rc == 0 && given("--anneal")) rc = set_override(config.cfg, "anneal", num(static_cast<double>(anneal_flag)));
    if (rc == 0 && given("--lr")) rc = set_override(config.cfg, "lr", num(lr_flag));
    if (rc == 0 && given("--noise-std")) rc = set_override(config.cfg, "noise_std", num(noise_std_flag));
    if (rc != 0) return rc;

    if ((rc = log_resolved(config.cfg)) != 0) return rc;

    if (sub == synth) return run_synth(config.cfg, subjects, afib, duration, out_dir);
    if (sub == preprocess)
        return run_preprocess(config.cfg, manifest_path, noise_flag, dataset_out);
    if (sub == train)
        return run_train(config.cfg, train_data, val_data, resume_path, model_out,
                         ckpt_dir, metrics_csv);
    if (sub == translate)
        return run_translate(config.cfg, tr_model, tr_input, tr_out, tr_samples,
                             band_prefix, tr_raw);
    if (sub == evaluate) {
        if (!ev_pred.empty() && !ev_ref.empty())
            return run_evaluate_files(ev_pred, ev_ref);
        if (!ev_model.empty() && !ev_data.empty())
            return run_evaluate_model(ev_model, ev_data, ev_report, ev_normalized);
        std::cerr << "error: evaluate needs --pred/--ref or --model/--data\n";
        return 1;
    }
    if (sub == noise) return run_noise(config.cfg, nz_input, nz_out);
    if (sub == gradcheck) return run_gradcheck(config.cfg);
    return 1;
}
