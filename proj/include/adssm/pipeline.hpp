#ifndef ADSSM_PIPELINE_HPP
#define ADSSM_PIPELINE_HPP

#include <optional>
#include <string>

#include "adssm/metrics.hpp"
#include "adssm/training.hpp"
#include "adssm/types.hpp"

namespace adssm::pipeline {

struct PreprocessOptions {
    double chunk_seconds = 4.0;
    int interval_len = 90;
    double min_bpm = 40.0;
    double max_bpm = 180.0;
    double ppg_band_low = 0.5, ppg_band_high = 8.0;
    double ecg_band_low = 0.5, ecg_band_high = 40.0;
    std::optional<NoiseSpec> noise;  // applied to raw PPG before filtering
    bool noise_on_ecg = false;
    std::uint64_t noise_seed = 0;
};

// Filter -> chunk -> peaks -> intervals -> align -> normalize. Chunks
// with fewer than 2 detected peaks on either side are skipped.
training::Dataset preprocess_record(const Waveform& ppg, const Waveform& ecg,
                                    const std::string& subject,
                                    const std::string& cohort,
                                    const PreprocessOptions& opts);

// PPG-only variant for translation inputs without a reference ECG;
// pair.y stays empty and ecg_norm unset.
training::Dataset preprocess_ppg_only(const Waveform& ppg,
                                      const std::string& subject,
                                      const std::string& cohort,
                                      const PreprocessOptions& opts);

void save_dataset(const std::string& path, const training::Dataset& ds);
training::Dataset load_dataset(const std::string& path);

// Per-chunk similarity of the mean-mode translation against the aligned
// reference intervals, on the fixed-length grid. normalized_units=false
// maps each side back through its stored chunk scale.
std::vector<metrics::ChunkRecord> evaluate_dataset(
    const training::Dataset& ds, const model::ParameterSet& params,
    bool normalized_units);

}  // namespace adssm::pipeline

#endif
