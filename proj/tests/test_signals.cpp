#include <cmath>
#include <numbers>

#include "adssm/signals.hpp"
#include "adssm/synth.hpp"
#include "doctest.h"

using namespace adssm;

namespace {

Waveform make_wave(std::vector<double> samples, double rate,
                   SignalKind kind = SignalKind::PPG) {
    Waveform w;
    w.samples = std::move(samples);
    w.sample_rate_hz = rate;
    w.label = kind;
    return w;
}

Waveform sinusoid(double freq_hz, double seconds, double rate,
                  double amplitude = 1.0) {
    const auto n = static_cast<std::size_t>(seconds * rate);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i)
        s[i] = amplitude *
               std::sin(2.0 * std::numbers::pi * freq_hz * i / rate);
    return make_wave(std::move(s), rate);
}

double rms(const std::vector<double>& x) {
    double ss = 0.0;
    for (double v : x) ss += v * v;
    return std::sqrt(ss / static_cast<double>(x.size()));
}

double variance(const std::vector<double>& x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(x.size());
}

// Single-frequency DFT amplitude estimate: 2|X(f)|/N.
double dft_amplitude(const std::vector<double>& x, double freq_hz, double rate) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double phi = 2.0 * std::numbers::pi * freq_hz * i / rate;
        re += x[i] * std::cos(phi);
        im -= x[i] * std::sin(phi);
    }
    return 2.0 * std::sqrt(re * re + im * im) / static_cast<double>(x.size());
}

}  // namespace

TEST_CASE("bandpass removes DC") {
    const Waveform w = make_wave(std::vector<double>(2000, 2.5), 125.0);
    const Waveform out = signals::bandpass_filter(w, 0.5, 40.0);
    // The 0.5 Hz high-pass edge leaves a settling transient, so judge the
    // interior strictly and the whole record by its RMS.
    for (std::size_t i = 500; i < 1500; ++i)
        CHECK(std::abs(out.samples[i]) < 1e-3 * 2.5);
    CHECK(rms(out.samples) < 2e-2 * 2.5);
    CHECK(out.samples.size() == w.samples.size());
    CHECK(out.sample_rate_hz == w.sample_rate_hz);
}

TEST_CASE("bandpass preserves in-band sinusoid") {
    const Waveform w = sinusoid(5.0, 10.0, 125.0);
    const Waveform out = signals::bandpass_filter(w, 0.5, 40.0);
    CHECK(rms(out.samples) == doctest::Approx(rms(w.samples)).epsilon(0.05));
}

TEST_CASE("bandpass rejects sub-band sinusoid") {
    const Waveform w = sinusoid(0.05, 60.0, 125.0);
    const Waveform out = signals::bandpass_filter(w, 0.5, 40.0);
    CHECK(rms(out.samples) < 0.05 * rms(w.samples));
}

TEST_CASE("bandpass validates the band") {
    const Waveform w = sinusoid(1.0, 4.0, 125.0);
    CHECK_THROWS_AS(signals::bandpass_filter(w, 40.0, 0.5), InvalidArgument);
    CHECK_THROWS_AS(signals::bandpass_filter(w, 0.5, 70.0), InvalidArgument);
    CHECK_THROWS_AS(signals::bandpass_filter(w, 0.0, 40.0), InvalidArgument);
}

TEST_CASE("detect_peaks finds one peak per period") {
    const Waveform w = sinusoid(1.0, 4.0, 125.0);
    const PeakList peaks = signals::detect_peaks(w, 40.0, 180.0);
    REQUIRE(peaks.size() == 4);
    for (std::size_t i = 1; i < peaks.size(); ++i) {
        const auto gap = peaks.indices[i] - peaks.indices[i - 1];
        CHECK(gap >= 124);
        CHECK(gap <= 126);
    }
}

TEST_CASE("detect_peaks on flat signal is empty") {
    const Waveform w = make_wave(std::vector<double>(500, 0.0), 125.0);
    CHECK(signals::detect_peaks(w, 40.0, 180.0).empty());
}

TEST_CASE("detect_peaks is offset invariant") {
    const Waveform w = sinusoid(1.2, 8.0, 125.0);
    Waveform shifted = w;
    for (double& v : shifted.samples) v += 5.0;
    const PeakList a = signals::detect_peaks(w, 40.0, 180.0);
    const PeakList b = signals::detect_peaks(shifted, 40.0, 180.0);
    CHECK(a.indices == b.indices);
}

TEST_CASE("detect_peaks counts synthetic heartbeats") {
    synth::SubjectProfile profile;
    profile.mean_bpm = 60.0;
    const auto rec = synth::generate_pair(profile, 10.0, 125.0, 5);
    const PeakList peaks = signals::detect_peaks(rec.ecg, 40.0, 180.0);
    CHECK(peaks.size() >= rec.truth.r_times_s.size() - 1);
    CHECK(peaks.size() <= rec.truth.r_times_s.size() + 1);
}

TEST_CASE("detect_peaks validates bpm bounds") {
    const Waveform w = sinusoid(1.0, 4.0, 125.0);
    CHECK_THROWS_AS(signals::detect_peaks(w, 10.0, 180.0), InvalidArgument);
    CHECK_THROWS_AS(signals::detect_peaks(w, 180.0, 40.0), InvalidArgument);
}

TEST_CASE("chunk boundaries") {
    CHECK(signals::chunk(sinusoid(1.0, 4.0, 125.0), 4.0).size() == 1);

    const auto two = signals::chunk(sinusoid(1.0, 10.0, 125.0), 4.0);
    REQUIRE(two.size() == 2);
    CHECK(two[0].samples.size() == 500);
    CHECK(two[1].samples.size() == 500);

    Waveform short_wave = sinusoid(1.0, 4.0, 125.0);
    short_wave.samples.pop_back();
    CHECK(signals::chunk(short_wave, 4.0).empty());

    CHECK_THROWS_AS(signals::chunk(short_wave, -1.0), InvalidArgument);
}

TEST_CASE("resample_linear midpoint and endpoints") {
    const auto r = signals::resample_linear({0.0, 1.0}, 3);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == 0.0);
    CHECK(r[1] == doctest::Approx(0.5));
    CHECK(r[2] == 1.0);

    const std::vector<double> src = {3.0, -1.0, 4.0, 1.0, 5.0};
    const auto up = signals::resample_linear(src, 17);
    CHECK(up.front() == src.front());
    CHECK(up.back() == src.back());
}

TEST_CASE("segment_intervals resamples a ramp linearly") {
    std::vector<double> ramp(64);
    for (std::size_t i = 0; i < ramp.size(); ++i)
        ramp[i] = static_cast<double>(i);
    const Waveform w = make_wave(std::move(ramp), 125.0);
    PeakList peaks;
    peaks.indices = {0, 45};
    const IntervalSequence seq = signals::segment_intervals(w, peaks, 90);
    REQUIRE(seq.steps() == 1);
    REQUIRE(seq.original_lengths == std::vector<std::int64_t>{45});
    CHECK(seq.segments(0, 0) == 0.0);
    CHECK(seq.segments(0, 89) == 44.0);
    for (int j = 0; j < 90; ++j)
        CHECK(seq.segments(0, j) ==
              doctest::Approx(44.0 * j / 89.0).epsilon(1e-12));
}

TEST_CASE("segment_intervals rejects fewer than two peaks") {
    const Waveform w = sinusoid(1.0, 4.0, 125.0);
    PeakList one;
    one.indices = {10};
    CHECK_THROWS_AS(signals::segment_intervals(w, one, 90), InvalidArgument);
}

TEST_CASE("segment_intervals lengths track the heart rate") {
    synth::SubjectProfile profile;
    profile.mean_bpm = 75.0;
    const auto rec = synth::generate_pair(profile, 10.0, 125.0, 2);
    const auto chunks = signals::chunk(rec.ecg, 4.0);
    REQUIRE(!chunks.empty());
    const PeakList peaks = signals::detect_peaks(chunks[1], 40.0, 180.0);
    REQUIRE(peaks.size() >= 2);
    const IntervalSequence seq = signals::segment_intervals(chunks[1], peaks);
    CHECK(seq.segments.cols() == signals::kIntervalLen);
    for (auto len : seq.original_lengths) {
        CHECK(len >= 98);
        CHECK(len <= 102);
    }
}

namespace {

// Equal-length intervals anchored on the given onsets, with distinct
// per-interval values so pairings are recognizable.
IntervalSequence intervals_from_onsets(const std::vector<std::int64_t>& onsets,
                                       IntervalKind kind) {
    IntervalSequence seq;
    seq.kind = kind;
    const auto t = static_cast<std::int64_t>(onsets.size()) - 1;
    seq.segments.resize(t, 90);
    seq.original_lengths.resize(t);
    for (std::int64_t i = 0; i < t; ++i) {
        seq.segments.row(i).setConstant(static_cast<double>(i));
        seq.original_lengths[i] = onsets[i + 1] - onsets[i];
    }
    return seq;
}

PeakList peaks_of(std::vector<std::int64_t> idx) {
    PeakList p;
    p.indices = std::move(idx);
    return p;
}

}  // namespace

TEST_CASE("align_pairs identity") {
    const std::vector<std::int64_t> onsets = {0, 100, 200, 300, 400};
    const auto ppg = intervals_from_onsets(onsets, IntervalKind::PP);
    const auto ecg = intervals_from_onsets(onsets, IntervalKind::RR);
    const auto r = signals::align_pairs(ppg, ecg, peaks_of(onsets), peaks_of(onsets));
    REQUIRE(r.ppg.steps() == 4);
    for (std::int64_t i = 0; i < 4; ++i) {
        CHECK(r.lags[i] == 0);
        CHECK(r.ecg.segments(i, 0) == static_cast<double>(i));
    }
}

TEST_CASE("align_pairs uniform shift gives uniform lag") {
    const std::vector<std::int64_t> pp = {0, 100, 200, 300, 400};
    std::vector<std::int64_t> rr = pp;
    for (auto& v : rr) v += 30;
    const auto ppg = intervals_from_onsets(pp, IntervalKind::PP);
    const auto ecg = intervals_from_onsets(rr, IntervalKind::RR);
    const auto r = signals::align_pairs(ppg, ecg, peaks_of(pp), peaks_of(rr));
    REQUIRE(r.ppg.steps() == 4);
    for (std::int64_t i = 0; i < 4; ++i) {
        CHECK(r.lags[i] == 30);
        CHECK(r.ppg.segments(i, 0) == static_cast<double>(i));
        CHECK(r.ecg.segments(i, 0) == static_cast<double>(i));
    }
}

TEST_CASE("align_pairs truncates to the shorter side") {
    const std::vector<std::int64_t> pp = {0, 100, 200, 300, 400, 500};
    const std::vector<std::int64_t> rr = {0, 100, 200, 300, 400};
    const auto ppg = intervals_from_onsets(pp, IntervalKind::PP);
    const auto ecg = intervals_from_onsets(rr, IntervalKind::RR);
    const auto r = signals::align_pairs(ppg, ecg, peaks_of(pp), peaks_of(rr));
    CHECK(r.ppg.steps() == 4);
    CHECK(r.ecg.steps() == 4);
}

TEST_CASE("align_pairs lags are never negative") {
    const std::vector<std::int64_t> pp = {50, 140, 260, 390};
    const std::vector<std::int64_t> rr = {0, 120, 230, 350, 470};
    const auto ppg = intervals_from_onsets(pp, IntervalKind::PP);
    const auto ecg = intervals_from_onsets(rr, IntervalKind::RR);
    const auto r = signals::align_pairs(ppg, ecg, peaks_of(pp), peaks_of(rr));
    for (auto lag : r.lags) CHECK(lag >= 0);
}

TEST_CASE("align_pairs with no overlap errors") {
    const std::vector<std::int64_t> pp = {400, 500};
    const std::vector<std::int64_t> rr = {0, 100};
    const auto ppg = intervals_from_onsets(pp, IntervalKind::PP);
    const auto ecg = intervals_from_onsets(rr, IntervalKind::RR);
    CHECK_THROWS_AS(signals::align_pairs(ppg, ecg, peaks_of(pp), peaks_of(rr)),
                    InvalidArgument);
}

TEST_CASE("normalize maps to [-1, 1]") {
    IntervalSequence seq;
    seq.segments.resize(1, 3);
    seq.segments << 0.0, 1.0, 2.0;
    seq.original_lengths = {3};
    const auto n = signals::normalize(seq);
    CHECK(n.segments(0, 0) == doctest::Approx(-1.0));
    CHECK(n.segments(0, 1) == doctest::Approx(0.0));
    CHECK(n.segments(0, 2) == doctest::Approx(1.0));
    CHECK(n.norm.applied);
}

TEST_CASE("normalize maps constant chunks to zero") {
    IntervalSequence seq;
    seq.segments = Mat::Constant(2, 4, 7.0);
    seq.original_lengths = {4, 4};
    const auto n = signals::normalize(seq);
    CHECK(n.segments.cwiseAbs().maxCoeff() == 0.0);
    const auto back = signals::denormalize(n);
    CHECK((back.segments.array() - 7.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("normalize round trip and idempotence") {
    IntervalSequence seq;
    seq.segments.resize(2, 5);
    seq.segments << 0.3, -1.2, 5.5, 2.0, -0.7, 1.1, 0.0, 3.3, -2.2, 4.4;
    seq.original_lengths = {5, 5};
    const auto n = signals::normalize(seq);
    const auto back = signals::denormalize(n);
    CHECK((back.segments - seq.segments).cwiseAbs().maxCoeff() < 1e-9);

    const auto twice = signals::normalize(n);
    CHECK((twice.segments - n.segments).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("add_noise with empty spec is the identity") {
    const Waveform w = sinusoid(1.0, 4.0, 125.0);
    const Waveform out = signals::add_noise(w, NoiseSpec{}, 42);
    CHECK(out.samples == w.samples);
}

TEST_CASE("add_noise is seed reproducible") {
    NoiseSpec spec;
    spec.baseline_components = {{0.3, 0.3}, {0.4, 0.2}, {0.1, 0.9}};
    spec.gaussian_std = 0.3;
    const Waveform w = sinusoid(1.0, 8.0, 125.0);
    const Waveform a = signals::add_noise(w, spec, 7);
    const Waveform b = signals::add_noise(w, spec, 7);
    const Waveform c = signals::add_noise(w, spec, 8);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
}

TEST_CASE("add_noise sinusoid power is a^2/2") {
    NoiseSpec spec;
    spec.baseline_components = {{1.0, 0.5}};
    const Waveform zero = make_wave(std::vector<double>(60 * 125, 0.0), 125.0);
    const Waveform out = signals::add_noise(zero, spec, 11);
    CHECK(variance(out.samples) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("add_noise spectral peaks sit at the component frequencies") {
    NoiseSpec spec;
    spec.baseline_components = {{0.3, 0.3}, {0.4, 0.2}, {0.1, 0.9}};
    spec.gaussian_std = 0.3;
    const Waveform zero = make_wave(std::vector<double>(60 * 125, 0.0), 125.0);
    const Waveform out = signals::add_noise(zero, spec, 13);

    CHECK(dft_amplitude(out.samples, 0.3, 125.0) == doctest::Approx(0.3).epsilon(0.1));
    CHECK(dft_amplitude(out.samples, 0.2, 125.0) == doctest::Approx(0.4).epsilon(0.1));
    CHECK(dft_amplitude(out.samples, 0.9, 125.0) == doctest::Approx(0.1).epsilon(0.2));
    CHECK(dft_amplitude(out.samples, 0.55, 125.0) < 0.05);

    const double expected_var = 0.3 * 0.3 + (0.09 + 0.16 + 0.01) / 2.0;
    CHECK(variance(out.samples) == doctest::Approx(expected_var).epsilon(0.1));

    spec.gaussian_std = -1.0;
    CHECK_THROWS_AS(signals::add_noise(zero, spec, 1), InvalidArgument);
}
