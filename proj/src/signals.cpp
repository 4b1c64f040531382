#include "adssm/signals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace adssm {

void Waveform::validate() const {
    if (sample_rate_hz <= 0.0)
        throw InvalidArgument("waveform sample rate must be positive");
    if (samples.size() < 2)
        throw InvalidArgument("waveform needs at least 2 samples");
    for (double s : samples)
        if (!std::isfinite(s))
            throw InvalidArgument("waveform contains non-finite samples");
}

void NoiseSpec::validate() const {
    if (gaussian_std < 0.0)
        throw InvalidArgument("noise std must be nonnegative");
    for (const auto& c : baseline_components)
        if (c.frequency_hz <= 0.0)
            throw InvalidArgument("baseline noise frequency must be positive");
}

namespace signals {
namespace {

struct Biquad {
    double b0, b1, b2, a1, a2;  // a0 normalized to 1

    void apply(std::vector<double>& x) const {
        double w1 = 0.0, w2 = 0.0;
        for (double& s : x) {
            double w0 = s - a1 * w1 - a2 * w2;
            s = b0 * w0 + b1 * w1 + b2 * w2;
            w2 = w1;
            w1 = w0;
        }
    }
};

// Bilinear-transform 2nd-order Butterworth sections.
Biquad butter_lowpass(double cutoff_hz, double rate_hz) {
    const double k = std::tan(M_PI * cutoff_hz / rate_hz);
    const double q = std::sqrt(2.0);
    const double norm = 1.0 / (1.0 + q * k + k * k);
    Biquad b;
    b.b0 = k * k * norm;
    b.b1 = 2.0 * b.b0;
    b.b2 = b.b0;
    b.a1 = 2.0 * (k * k - 1.0) * norm;
    b.a2 = (1.0 - q * k + k * k) * norm;
    return b;
}

Biquad butter_highpass(double cutoff_hz, double rate_hz) {
    const double k = std::tan(M_PI * cutoff_hz / rate_hz);
    const double q = std::sqrt(2.0);
    const double norm = 1.0 / (1.0 + q * k + k * k);
    Biquad b;
    b.b0 = norm;
    b.b1 = -2.0 * norm;
    b.b2 = norm;
    b.a1 = 2.0 * (k * k - 1.0) * norm;
    b.a2 = (1.0 - q * k + k * k) * norm;
    return b;
}

// Forward-backward pass with reflected edge padding to suppress
// start-up transients.
void filtfilt(const Biquad& bq, std::vector<double>& x) {
    const std::size_t n = x.size();
    const std::size_t pad = std::min<std::size_t>(n - 1, 3 * 64);
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i)
        ext.push_back(2.0 * x.front() - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i)
        ext.push_back(2.0 * x.back() - x[n - 1 - i]);

    bq.apply(ext);
    std::reverse(ext.begin(), ext.end());
    bq.apply(ext);
    std::reverse(ext.begin(), ext.end());

    std::copy(ext.begin() + pad, ext.begin() + pad + n, x.begin());
}

}  // namespace

Waveform bandpass_filter(const Waveform& w, double low_hz, double high_hz) {
    w.validate();
    const double nyquist = w.sample_rate_hz / 2.0;
    if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < nyquist))
        throw InvalidArgument("bandpass requires 0 < low < high < rate/2 (got [" +
                              std::to_string(low_hz) + ", " + std::to_string(high_hz) +
                              "] at " + std::to_string(w.sample_rate_hz) + " Hz)");
    Waveform out = w;
    filtfilt(butter_highpass(low_hz, w.sample_rate_hz), out.samples);
    filtfilt(butter_lowpass(high_hz, w.sample_rate_hz), out.samples);
    return out;
}

PeakList detect_peaks(const Waveform& w, double min_bpm, double max_bpm) {
    w.validate();
    if (!(min_bpm >= 20.0 && min_bpm < max_bpm && max_bpm <= 300.0))
        throw InvalidArgument("detect_peaks expects 20 <= min_bpm < max_bpm <= 300");

    const auto& x = w.samples;
    const std::int64_t n = static_cast<std::int64_t>(x.size());
    const std::int64_t win = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::llround(0.75 * w.sample_rate_hz)));
    const std::int64_t refractory = static_cast<std::int64_t>(
        std::llround(w.sample_rate_hz * 60.0 / max_bpm));

    // Centered moving average via prefix sums.
    std::vector<double> prefix(n + 1, 0.0);
    for (std::int64_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];

    const double mean = prefix[n] / n;
    const double peak = *std::max_element(x.begin(), x.end());
    const double offset = 0.15 * (peak - mean);

    PeakList out;
    std::int64_t last = std::numeric_limits<std::int64_t>::min() / 2;
    for (std::int64_t i = 1; i + 1 < n; ++i) {
        if (!(x[i] > x[i - 1] && x[i] >= x[i + 1])) continue;
        const std::int64_t lo = std::max<std::int64_t>(0, i - win / 2);
        const std::int64_t hi = std::min<std::int64_t>(n, i + win / 2 + 1);
        const double local_avg = (prefix[hi] - prefix[lo]) / (hi - lo);
        if (x[i] <= local_avg + offset) continue;
        if (i - last < refractory) {
            // Keep the larger of the two competing peaks.
            if (!out.indices.empty() && x[i] > x[out.indices.back()]) {
                out.indices.back() = i;
                last = i;
            }
            continue;
        }
        out.indices.push_back(i);
        last = i;
    }
    return out;
}

std::vector<Waveform> chunk(const Waveform& w, double seconds) {
    w.validate();
    if (seconds <= 0.0) throw InvalidArgument("chunk length must be positive");
    const std::size_t len =
        static_cast<std::size_t>(std::llround(seconds * w.sample_rate_hz));
    std::vector<Waveform> out;
    for (std::size_t start = 0; start + len <= w.samples.size(); start += len) {
        Waveform c;
        c.sample_rate_hz = w.sample_rate_hz;
        c.label = w.label;
        c.samples.assign(w.samples.begin() + start, w.samples.begin() + start + len);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<double> resample_linear(const std::vector<double>& src, int target_len) {
    if (src.size() < 2) throw InvalidArgument("resample needs at least 2 samples");
    if (target_len < 2) throw InvalidArgument("resample target must be >= 2");
    std::vector<double> out(target_len);
    const double step = static_cast<double>(src.size() - 1) / (target_len - 1);
    for (int i = 0; i < target_len; ++i) {
        const double pos = i * step;
        const std::size_t lo = std::min<std::size_t>(
            static_cast<std::size_t>(pos), src.size() - 2);
        const double frac = pos - lo;
        out[i] = src[lo] * (1.0 - frac) + src[lo + 1] * frac;
    }
    out.front() = src.front();
    out.back() = src.back();
    return out;
}

IntervalSequence segment_intervals(const Waveform& w, const PeakList& peaks,
                                   int target_len) {
    w.validate();
    if (peaks.size() < 2)
        throw InvalidArgument("segment_intervals needs at least 2 peaks");
    const std::int64_t t = static_cast<std::int64_t>(peaks.size()) - 1;
    IntervalSequence seq;
    seq.kind = w.label == SignalKind::PPG ? IntervalKind::PP : IntervalKind::RR;
    seq.segments.resize(t, target_len);
    seq.original_lengths.resize(t);
    for (std::int64_t i = 0; i < t; ++i) {
        const std::int64_t a = peaks.indices[i];
        const std::int64_t b = peaks.indices[i + 1];
        if (a < 0 || b > static_cast<std::int64_t>(w.samples.size()) || b - a < 2)
            throw InvalidArgument("peak indices out of bounds or too close");
        // Half-open [a, b): last sample of the interval is b-1.
        std::vector<double> seg(w.samples.begin() + a, w.samples.begin() + b);
        std::vector<double> r = resample_linear(seg, target_len);
        for (int j = 0; j < target_len; ++j) seq.segments(i, j) = r[j];
        seq.original_lengths[i] = b - a;
    }
    return seq;
}

AlignResult align_pairs(const IntervalSequence& ppg, const IntervalSequence& ecg,
                        const PeakList& ppg_peaks, const PeakList& ecg_peaks) {
    if (ppg.steps() < 1 || ecg.steps() < 1)
        throw InvalidArgument("align_pairs needs nonempty sequences");
    if (ppg_peaks.size() != static_cast<std::size_t>(ppg.steps()) + 1 ||
        ecg_peaks.size() != static_cast<std::size_t>(ecg.steps()) + 1)
        throw InvalidArgument("peak lists inconsistent with interval counts");

    // Each PP onset pairs with the nearest R onset at or after it; the
    // pairing is kept strictly monotone so no RR interval is used twice.
    struct Pair { std::int64_t pp_row, rr_row, lag; };
    std::vector<Pair> pairs;
    std::int64_t last_rr = -1;
    for (std::int64_t i = 0; i < ppg.steps(); ++i) {
        const std::int64_t pp_onset = ppg_peaks.indices[i];
        std::int64_t best = -1;
        for (std::int64_t j = 0; j < ecg.steps(); ++j) {
            if (ecg_peaks.indices[j] >= pp_onset) { best = j; break; }
        }
        if (best < 0 || best <= last_rr) continue;
        pairs.push_back({i, best, ecg_peaks.indices[best] - pp_onset});
        last_rr = best;
    }
    if (pairs.empty())
        throw InvalidArgument("align_pairs found no overlapping intervals");

    AlignResult out;
    const std::int64_t t = static_cast<std::int64_t>(pairs.size());
    out.ppg.kind = ppg.kind;
    out.ecg.kind = ecg.kind;
    out.ppg.chunk_id = ppg.chunk_id;
    out.ecg.chunk_id = ecg.chunk_id;
    out.ppg.norm = ppg.norm;
    out.ecg.norm = ecg.norm;
    out.ppg.segments.resize(t, ppg.segments.cols());
    out.ecg.segments.resize(t, ecg.segments.cols());
    out.ppg.original_lengths.resize(t);
    out.ecg.original_lengths.resize(t);
    out.lags.resize(t);
    for (std::int64_t r = 0; r < t; ++r) {
        out.ppg.segments.row(r) = ppg.segments.row(pairs[r].pp_row);
        out.ppg.original_lengths[r] = ppg.original_lengths[pairs[r].pp_row];
        out.ecg.segments.row(r) = ecg.segments.row(pairs[r].rr_row);
        out.ecg.original_lengths[r] = ecg.original_lengths[pairs[r].rr_row];
        out.lags[r] = pairs[r].lag;
    }
    return out;
}

IntervalSequence normalize(const IntervalSequence& seq) {
    if (seq.steps() < 1) throw InvalidArgument("normalize needs a nonempty sequence");
    IntervalSequence out = seq;
    const double lo = seq.segments.minCoeff();
    const double hi = seq.segments.maxCoeff();
    if (hi - lo < 1e-300) {
        out.segments.setZero();
        out.norm.scale = 1.0;
        out.norm.offset = lo;
    } else {
        out.norm.scale = (hi - lo) / 2.0;
        out.norm.offset = (hi + lo) / 2.0;
        out.segments = (seq.segments.array() - out.norm.offset) / out.norm.scale;
    }
    out.norm.applied = true;
    return out;
}

IntervalSequence denormalize(const IntervalSequence& seq) {
    IntervalSequence out = seq;
    out.segments = seq.segments.array() * seq.norm.scale + seq.norm.offset;
    out.norm = NormInfo{};
    return out;
}

double denormalize_value(double v, const NormInfo& norm) {
    return v * norm.scale + norm.offset;
}

Waveform add_noise(const Waveform& w, const NoiseSpec& spec, std::uint64_t seed) {
    w.validate();
    spec.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::vector<double> phases;
    phases.reserve(spec.baseline_components.size());
    for (std::size_t k = 0; k < spec.baseline_components.size(); ++k)
        phases.push_back(phase(rng));

    Waveform out = w;
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const double t = static_cast<double>(i) / w.sample_rate_hz;
        double add = 0.0;
        for (std::size_t k = 0; k < spec.baseline_components.size(); ++k) {
            const auto& c = spec.baseline_components[k];
            add += c.amplitude * std::sin(2.0 * M_PI * c.frequency_hz * t + phases[k]);
        }
        if (spec.gaussian_std > 0.0) add += spec.gaussian_std * gauss(rng);
        out.samples[i] += add;
    }
    return out;
}

}  // namespace signals
}  // namespace adssm
