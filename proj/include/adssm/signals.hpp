#ifndef ADSSM_SIGNALS_HPP
#define ADSSM_SIGNALS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "adssm/types.hpp"

namespace adssm::signals {

constexpr int kIntervalLen = 90;

// Zero-phase Butterworth band-pass (2nd-order high-pass + 2nd-order
// low-pass, each run forward and backward with reflective edge padding).
Waveform bandpass_filter(const Waveform& w, double low_hz, double high_hz);

// Local maxima above a moving-average-plus-offset adaptive threshold.
// Refractory gap is rate * 60 / max_bpm samples; ties break earliest.
PeakList detect_peaks(const Waveform& w, double min_bpm, double max_bpm);

// Consecutive non-overlapping chunks of exactly seconds*rate samples;
// trailing remainder dropped.
std::vector<Waveform> chunk(const Waveform& w, double seconds);

// Linear resample of `src` onto `target_len` evenly spaced points,
// endpoints preserved exactly.
std::vector<double> resample_linear(const std::vector<double>& src,
                                    int target_len);

// Split [peaks[i], peaks[i+1]) segments, each resampled to target_len.
IntervalSequence segment_intervals(const Waveform& w, const PeakList& peaks,
                                   int target_len = kIntervalLen);

struct AlignResult {
    IntervalSequence ppg;
    IntervalSequence ecg;
    std::vector<std::int64_t> lags;  // R onset minus PP onset, samples
};

// Pairs PP interval i with the RR interval whose onset is nearest at-or-
// after the PP onset, then truncates both to the common length.
AlignResult align_pairs(const IntervalSequence& ppg, const IntervalSequence& ecg,
                        const PeakList& ppg_peaks, const PeakList& ecg_peaks);

// Per-chunk min-max scaling to [-1, 1]; constant chunks map to 0.
IntervalSequence normalize(const IntervalSequence& seq);
IntervalSequence denormalize(const IntervalSequence& seq);
double denormalize_value(double v, const NormInfo& norm);

// input + sum_k a_k sin(2 pi f_k t + phi_k) + N(0, std^2), phases drawn
// once per call from the seeded RNG.
Waveform add_noise(const Waveform& w, const NoiseSpec& spec, std::uint64_t seed);

}  // namespace adssm::signals

#endif
