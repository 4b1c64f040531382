// Acceptance gate: each criterion prints exactly one PASS/FAIL line.
// Exit status is nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "adssm/checkpoint.hpp"
#include "adssm/gradcheck.hpp"
#include "adssm/metrics.hpp"
#include "adssm/pipeline.hpp"
#include "adssm/synth.hpp"
#include "adssm/training.hpp"
#include "adssm/translate.hpp"
#include "elbo_reference.hpp"

using namespace adssm;
using Clock = std::chrono::steady_clock;

namespace {

bool g_all_pass = true;

void report(int id, bool pass, const std::string& detail) {
    std::printf("CRITERION %d: %s (%s)\n", id, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) g_all_pass = false;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Mat random_inputs(std::int64_t rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Mat m(rows, cols);
    for (std::int64_t r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = unit(rng);
    return m;
}

NoiseSpec reference_noise() {
    NoiseSpec spec;
    spec.baseline_components = {{0.3, 0.3}, {0.4, 0.2}, {0.1, 0.9}};
    spec.gaussian_std = 0.3;
    return spec;
}

training::Dataset preprocess_subject(const synth::SubjectProfile& profile,
                                     double duration_s, std::uint64_t seed,
                                     const std::string& subject,
                                     const std::string& cohort, bool noisy,
                                     std::uint64_t noise_seed) {
    const auto rec = synth::generate_pair(profile, duration_s, 125.0, seed);
    pipeline::PreprocessOptions opts;
    if (noisy) {
        opts.noise = reference_noise();
        opts.noise_seed = noise_seed;
    }
    return pipeline::preprocess_record(rec.ppg, rec.ecg, subject, cohort, opts);
}

struct MeanMetrics {
    double pearson = 0.0;
    double rmse = 0.0;
    std::size_t count = 0;
};

MeanMetrics mean_metrics(const training::Dataset& ds,
                         const model::ParameterSet& params) {
    const auto records = pipeline::evaluate_dataset(ds, params, true);
    MeanMetrics out;
    for (const auto& r : records) {
        out.pearson += r.pearson;
        out.rmse += r.rmse_mv;
    }
    out.count = records.size();
    if (out.count > 0) {
        out.pearson /= static_cast<double>(out.count);
        out.rmse /= static_cast<double>(out.count);
    }
    return out;
}

// Mean within-window energy of the translated intervals, over the last
// fifth of each fixed-length interval (where the P bump sits).
double p_window_energy(const training::Dataset& ds,
                       const model::ParameterSet& params,
                       const std::string& cohort) {
    const int lo = static_cast<int>(0.75 * 90);
    const int hi = static_cast<int>(0.95 * 90);
    double total = 0.0;
    std::size_t rows = 0;
    for (const auto& chunk : ds) {
        if (chunk.cohort != cohort) continue;
        IntervalSequence seq;
        seq.segments = chunk.pair.x;
        seq.original_lengths = chunk.pp_lengths;
        seq.kind = IntervalKind::PP;
        seq.chunk_id = chunk.pair.chunk_id;
        seq.norm = chunk.ppg_norm;
        const auto t = translate::translate_chunk(
            seq, params, translate::Mode::Mean, 0, 1, 125.0, false);
        for (Eigen::Index r = 0; r < t.per_interval_mean.rows(); ++r) {
            double mean = 0.0;
            for (int c = lo; c < hi; ++c) mean += t.per_interval_mean(r, c);
            mean /= static_cast<double>(hi - lo);
            double energy = 0.0;
            for (int c = lo; c < hi; ++c) {
                const double d = t.per_interval_mean(r, c) - mean;
                energy += d * d;
            }
            total += energy / static_cast<double>(hi - lo);
            ++rows;
        }
    }
    return rows > 0 ? total / static_cast<double>(rows) : 0.0;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

void criterion_1() {
    const auto start = Clock::now();
    const auto result = model::gradient_check(7);
    const double elapsed = seconds_since(start);
    report(1, result.max_rel_err < 1e-4 && elapsed < 120.0,
           fmt("max relative gradient error %.3e in %.1f s", result.max_rel_err,
               elapsed));
}

void criterion_2() {
    const model::Dims dims{6, 6, 3, 4, 3};
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        model::ParameterSet params(dims, seed + 1000);
        const std::int64_t steps = 1 + static_cast<std::int64_t>(seed % 4);
        const Mat x = random_inputs(steps, dims.n_pp, 2 * seed + 1);
        const Mat y = random_inputs(steps, dims.n_rr, 2 * seed + 2);
        const double beta = static_cast<double>(seed % 5) / 4.0;
        const double got = model::elbo(x, y, params, beta, seed + 5).total;
        const double want =
            elbo_reference::reference_elbo(x, y, params, beta, seed + 5);
        worst = std::max(worst,
                         std::abs(got - want) / std::max(1.0, std::abs(want)));
    }
    report(2, worst < 1e-8, fmt("max deviation %.3e over 100 seeds", worst));
}

void criterion_3() {
    const auto start = Clock::now();

    training::Dataset train_set;
    for (int s = 0; s < 2; ++s) {
        synth::SubjectProfile profile;
        profile.mean_bpm = s == 0 ? 60.0 : 90.0;
        profile.hr_variability_s = 0.02;
        profile.morphology_seed = 40 + static_cast<std::uint64_t>(s);
        auto chunks = preprocess_subject(profile, 22.0,
                                         50 + static_cast<std::uint64_t>(s),
                                         "s" + std::to_string(s), "healthy",
                                         false, 0);
        for (std::size_t i = 0; i < chunks.size() && i < 4; ++i)
            train_set.push_back(chunks[i]);
    }
    if (train_set.size() != 8) {
        report(3, false,
               fmt("expected 8 training chunks, built %.0f",
                   static_cast<double>(train_set.size())));
        return;
    }

    auto state = training::init_train_state(model::Dims{}, 61);
    training::TrainOptions opts;
    opts.sched.total_epochs = 2000;
    opts.sched.batch_size = 128;
    opts.sched.anneal_end_epoch = 1250;
    opts.sched.checkpoint_every = 100000;
    opts.seed = 61;
    training::train(train_set, train_set, state, opts);

    const auto m = mean_metrics(train_set, state.params);
    const double elapsed = seconds_since(start);
    report(3,
           m.pearson >= 0.95 && m.rmse <= 0.05 && elapsed < 900.0,
           fmt("mean pearson %.4f, mean rmse %.4f, %.0f s", m.pearson, m.rmse,
               elapsed));
}

// Criteria 4 and 7 share one model trained on mixed healthy and afib
// records, clean plus noise-augmented.
struct MixedModel {
    training::TrainState state;
    training::Dataset train_clean;  // labeled healthy / afib
};

MixedModel train_mixed_model() {
    MixedModel out;
    training::Dataset train_set;

    const double bpms[4] = {62.0, 76.0, 70.0, 85.0};
    for (int s = 0; s < 4; ++s) {
        synth::SubjectProfile profile;
        profile.mean_bpm = bpms[s];
        profile.hr_variability_s = 0.03;
        profile.afib = s >= 2;
        profile.morphology_seed = 70 + static_cast<std::uint64_t>(s);
        const std::string subject = "m" + std::to_string(s);
        const std::string cohort = profile.afib ? "afib" : "healthy";
        const auto seed = 80 + static_cast<std::uint64_t>(s);

        auto clean = preprocess_subject(profile, 24.0, seed, subject, cohort,
                                        false, 0);
        auto noisy = preprocess_subject(profile, 24.0, seed, subject, "noisy",
                                        true, 90 + static_cast<std::uint64_t>(s));
        for (auto& c : clean) {
            train_set.push_back(c);
            out.train_clean.push_back(c);
        }
        for (auto& c : noisy) train_set.push_back(c);
    }

    out.state = training::init_train_state(model::Dims{90, 90, 32, 64, 32}, 71);
    out.state.opt.lr = 0.002;
    training::TrainOptions opts;
    opts.sched.total_epochs = 4000;
    opts.sched.batch_size = 32;
    opts.sched.anneal_end_epoch = 500;
    opts.sched.checkpoint_every = 100000;
    opts.seed = 71;
    training::train(train_set, train_set, out.state, opts);
    return out;
}

void criterion_4(const MixedModel& mixed) {
    synth::SubjectProfile held;
    held.mean_bpm = 68.0;
    held.hr_variability_s = 0.03;
    held.morphology_seed = 101;
    const auto clean =
        preprocess_subject(held, 24.0, 102, "h", "healthy", false, 0);
    const auto noisy =
        preprocess_subject(held, 24.0, 102, "h", "healthy", true, 103);

    const auto mc = mean_metrics(clean, mixed.state.params);
    const auto mn = mean_metrics(noisy, mixed.state.params);
    const double drop = mc.pearson - mn.pearson;
    report(4, mc.count > 0 && mn.count > 0 && drop <= 0.10,
           fmt("held-out pearson clean %.4f vs noisy %.4f, drop %.4f",
               mc.pearson, mn.pearson, drop));
}

void criterion_5() {
    training::Schedule sched;
    const bool pass = training::beta_at(0, sched) == 0.0 &&
                      training::beta_at(625, sched) == 0.5 &&
                      training::beta_at(1250, sched) == 1.0 &&
                      training::beta_at(5000, sched) == 1.0;
    report(5, pass,
           fmt("beta(0)=%.1f beta(625)=%.2f beta(1250)=%.1f",
               training::beta_at(0, sched), training::beta_at(625, sched),
               training::beta_at(1250, sched)));
}

void criterion_6() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-2.0, 2.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 4 + static_cast<std::size_t>(trial % 61);
        std::vector<double> y(n), yh(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = unit(rng);
            yh[i] = unit(rng);
        }

        double my = 0.0, myh = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            my += y[i];
            myh += yh[i];
        }
        my /= static_cast<double>(n);
        myh /= static_cast<double>(n);
        double cov = 0.0, vy = 0.0, vyh = 0.0, ss = 0.0, sig = 0.0, res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cov += (y[i] - my) * (yh[i] - myh);
            vy += (y[i] - my) * (y[i] - my);
            vyh += (yh[i] - myh) * (yh[i] - myh);
            ss += (y[i] - yh[i]) * (y[i] - yh[i]);
            sig += y[i] * y[i];
            res += (y[i] - yh[i]) * (y[i] - yh[i]);
        }
        worst = std::max(
            worst, std::abs(metrics::pearson(y, yh) - cov / std::sqrt(vy * vyh)));
        worst = std::max(worst, std::abs(metrics::rmse(y, yh) -
                                         std::sqrt(ss / static_cast<double>(n))));
        worst = std::max(worst, std::abs(metrics::snr_db(y, yh) -
                                         20.0 * std::log10(sig / res)));
    }

    bool monotone = true;
    std::vector<double> y(512), noise(512);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = unit(rng);
        noise[i] = gauss(rng);
    }
    double prev = std::numeric_limits<double>::infinity();
    for (double level : {0.01, 0.05, 0.1, 0.3, 0.8}) {
        std::vector<double> yh = y;
        for (std::size_t i = 0; i < y.size(); ++i) yh[i] += level * noise[i];
        const double snr = metrics::snr_db(y, yh);
        if (snr >= prev) monotone = false;
        prev = snr;
    }
    report(6, worst < 1e-9 && monotone,
           fmt("max oracle deviation %.3e, snr monotone %.0f", worst,
               monotone ? 1.0 : 0.0));
}

void criterion_7(const MixedModel& mixed) {
    const double healthy =
        p_window_energy(mixed.train_clean, mixed.state.params, "healthy");
    const double afib =
        p_window_energy(mixed.train_clean, mixed.state.params, "afib");
    report(7, healthy > 0.0 && afib < 0.5 * healthy,
           fmt("p-window energy afib %.3e vs healthy %.3e (ratio %.2f)", afib,
               healthy, healthy > 0.0 ? afib / healthy : -1.0));
}

void criterion_8() {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("adssm_accept_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);

    training::Dataset data;
    for (int c = 0; c < 2; ++c) {
        training::LabeledChunk chunk;
        chunk.pair.x = random_inputs(3, model::Dims::tiny().n_pp, 200 + c);
        chunk.pair.y =
            0.4 * random_inputs(3, model::Dims::tiny().n_rr, 210 + c);
        chunk.pair.chunk_id = "c" + std::to_string(c);
        chunk.subject = "c";
        chunk.cohort = "healthy";
        data.push_back(chunk);
    }
    training::TrainOptions opts;
    opts.sched.total_epochs = 20;
    opts.sched.batch_size = 2;
    opts.sched.anneal_end_epoch = 10;
    opts.sched.checkpoint_every = 100000;
    opts.seed = 19;

    auto a = training::init_train_state(model::Dims::tiny(), 21);
    auto b = training::init_train_state(model::Dims::tiny(), 21);
    const auto ra = training::train(data, data, a, opts);
    const auto rb = training::train(data, data, b, opts);
    double trace_diff = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i)
        trace_diff = std::max(trace_diff,
                              std::abs(ra[i].train_loss - rb[i].train_loss));

    // Round-trip bit exactness: save, load, save again, compare bytes.
    const auto p1 = (dir / "a.ckpt").string();
    const auto p2 = (dir / "b.ckpt").string();
    checkpoint::save_train_state(p1, a);
    checkpoint::save_train_state(p2, checkpoint::load_train_state(p1));
    const auto read_all = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    const bool bytes_equal = !read_all(p1).empty() && read_all(p1) == read_all(p2);

    // Resume at the midpoint and compare against the uninterrupted run.
    auto part = training::init_train_state(model::Dims::tiny(), 21);
    auto half = opts;
    half.sched.total_epochs = 10;
    training::train(data, data, part, half);
    const auto mid = (dir / "mid.ckpt").string();
    checkpoint::save_train_state(mid, part);
    auto resumed = checkpoint::load_train_state(mid);
    const auto tail = training::train(data, data, resumed, opts);
    double resume_diff = 0.0;
    for (std::size_t i = 0; i < tail.size(); ++i)
        resume_diff = std::max(
            resume_diff,
            std::abs(tail[i].train_loss - ra[i + 10].train_loss));

    std::filesystem::remove_all(dir);
    report(8, trace_diff < 1e-10 && bytes_equal && resume_diff < 1e-10,
           fmt("trace diff %.2e, resume diff %.2e, bytes equal %.0f",
               trace_diff, resume_diff, bytes_equal ? 1.0 : 0.0));
}

void criterion_9() {
    double worst = 1.0;
    bool finite = true;
    for (std::uint64_t set = 0; set < 100 && finite; ++set) {
        model::ParameterSet params(model::Dims::tiny(), 300 + set);
        for (std::uint64_t pass = 0; pass < 100; ++pass) {
            const std::uint64_t tag = 100 * set + pass;
            const std::int64_t steps = 1 + static_cast<std::int64_t>(tag % 7);
            const Mat x = random_inputs(steps, model::Dims::tiny().n_pp,
                                        1000 + tag);
            std::mt19937_64 rng(2000 + tag);
            std::normal_distribution<double> gauss(0.0, 1.0);
            Vec z(model::Dims::tiny().latent);
            for (int i = 0; i < z.size(); ++i) z(i) = 2.0 * gauss(rng);
            const auto attn = model::attend(z, x, params);
            if (!attn.weights.allFinite() || !attn.context.allFinite())
                finite = false;
            worst = std::min(worst, 1.0 - std::abs(attn.weights.sum() - 1.0));
        }
    }
    const double max_dev = 1.0 - worst;
    report(9, finite && max_dev < 1e-6,
           fmt("max row-sum deviation %.3e over 10000 passes, finite %.0f",
               max_dev, finite ? 1.0 : 0.0));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    const MixedModel mixed = train_mixed_model();
    criterion_4(mixed);
    criterion_5();
    criterion_6();
    criterion_7(mixed);
    criterion_8();
    criterion_9();
    return g_all_pass ? 0 : 1;
}
