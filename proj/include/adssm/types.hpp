#ifndef ADSSM_TYPES_HPP
#define ADSSM_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace adssm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Thrown for contract violations (bad bands, too few peaks, shape
// mismatches). The C boundary maps these onto status codes.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SignalKind { PPG, ECG };

struct Waveform {
    std::vector<double> samples;   // mV for ECG, arbitrary units for PPG
    double sample_rate_hz = 0.0;
    SignalKind label = SignalKind::PPG;

    void validate() const;
    double duration_s() const { return samples.size() / sample_rate_hz; }
};

struct PeakList {
    std::vector<std::int64_t> indices;  // strictly increasing sample indices

    std::size_t size() const { return indices.size(); }
    bool empty() const { return indices.empty(); }
};

enum class IntervalKind { PP, RR };

// Per-chunk min-max scaling info, kept so translated output can be
// mapped back to signal units.
struct NormInfo {
    double scale = 1.0;    // (max - min) / 2, or 1 for constant chunks
    double offset = 0.0;   // (max + min) / 2
    bool applied = false;
};

struct IntervalSequence {
    Mat segments;                            // T x interval_len
    std::vector<std::int64_t> original_lengths;  // samples per interval
    IntervalKind kind = IntervalKind::PP;
    std::string chunk_id;
    NormInfo norm;

    std::int64_t steps() const { return segments.rows(); }
};

struct NoiseSpec {
    struct Component {
        double amplitude;
        double frequency_hz;
    };
    std::vector<Component> baseline_components;
    double gaussian_std = 0.0;

    void validate() const;
};

}  // namespace adssm

#endif
