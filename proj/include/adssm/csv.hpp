#ifndef ADSSM_CSV_HPP
#define ADSSM_CSV_HPP

#include <string>
#include <vector>

#include "adssm/synth.hpp"
#include "adssm/types.hpp"

namespace adssm::csv {

// Waveform CSV: header `t_sec,value`, strictly increasing t at 1/rate
// spacing (uniformity checked within 1e-6 s).
Waveform read_waveform(const std::string& path, SignalKind label);
void write_waveform(const std::string& path, const Waveform& w);

// Ground-truth peaks CSV: `beat_index,r_time_s,systolic_time_s`.
void write_peaks(const std::string& path, const synth::GroundTruth& truth);
synth::GroundTruth read_peaks(const std::string& path);

struct ManifestRow {
    std::string subject;
    std::string label;  // healthy | afib
    std::string ppg_csv;
    std::string ecg_csv;
};

std::vector<ManifestRow> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<ManifestRow>& rows);

}  // namespace adssm::csv

#endif
