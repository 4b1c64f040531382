#ifndef ADSSM_TRANSLATE_HPP
#define ADSSM_TRANSLATE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "adssm/model.hpp"
#include "adssm/types.hpp"

namespace adssm::translate {

enum class Mode { Mean, Sample };

struct Translation {
    Waveform ecg_mean;                     // reassembled, length = sum pp_lengths
    std::vector<std::vector<double>> ecg_samples;  // Monte Carlo draws
    Mat per_interval_mean;                 // T x n_rr
    std::vector<std::int64_t> pp_lengths_used;
    Mat attention;                         // T x T rollout attention
};

// Prior rollout from z_init: attend -> transition -> emit, one interval
// per timestep; intervals resampled back to their original PP lengths
// and concatenated. Denormalization uses the stored chunk scale.
Translation translate_chunk(const IntervalSequence& ppg,
                            const model::ParameterSet& params, Mode mode,
                            int draws, std::uint64_t seed,
                            double sample_rate_hz, bool denormalize = true);

struct Band {
    Waveform lower;
    Waveform upper;
};

// Pointwise 5th/95th percentile across the Monte Carlo draws.
Band uncertainty_band(const Translation& t, double sample_rate_hz);

}  // namespace adssm::translate

#endif
