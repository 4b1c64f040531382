#ifndef ADSSM_SYNTH_HPP
#define ADSSM_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "adssm/types.hpp"

namespace adssm::synth {

struct SubjectProfile {
    double mean_bpm = 70.0;
    double hr_variability_s = 0.0;  // std of beat-to-beat interval
    bool afib = false;
    double ptt_delay_s = 0.25;      // R peak to systolic peak
    std::uint64_t morphology_seed = 0;

    void validate() const;
};

struct GroundTruth {
    std::vector<double> r_times_s;         // ECG R peaks
    std::vector<double> systolic_times_s;  // PPG systolic peaks
};

struct PairedRecord {
    Waveform ppg;
    Waveform ecg;
    GroundTruth truth;
};

// ECG per beat from P-QRS-T Gaussian bumps; PPG as a skewed pulse (fast
// rise, slow decay) delayed by ptt_delay_s from each R peak. afib drops
// the P bump and draws intervals from a wide lognormal.
PairedRecord generate_pair(const SubjectProfile& profile, double duration_s,
                           double rate_hz, std::uint64_t seed);

}  // namespace adssm::synth

#endif
