#include "adssm/pipeline.hpp"

#include <fstream>

#include "adssm/signals.hpp"
#include "adssm/translate.hpp"

namespace adssm::pipeline {

training::Dataset preprocess_record(const Waveform& ppg_raw, const Waveform& ecg_raw,
                                    const std::string& subject,
                                    const std::string& cohort,
                                    const PreprocessOptions& opts) {
    if (ppg_raw.sample_rate_hz != ecg_raw.sample_rate_hz)
        throw InvalidArgument("PPG and ECG must share a sample rate");

    Waveform ppg = ppg_raw;
    Waveform ecg = ecg_raw;
    if (opts.noise) {
        ppg = signals::add_noise(ppg, *opts.noise, opts.noise_seed);
        if (opts.noise_on_ecg)
            ecg = signals::add_noise(ecg, *opts.noise, opts.noise_seed + 1);
    }
    ppg = signals::bandpass_filter(ppg, opts.ppg_band_low, opts.ppg_band_high);
    ecg = signals::bandpass_filter(ecg, opts.ecg_band_low, opts.ecg_band_high);

    const auto ppg_chunks = signals::chunk(ppg, opts.chunk_seconds);
    const auto ecg_chunks = signals::chunk(ecg, opts.chunk_seconds);
    const std::size_t n = std::min(ppg_chunks.size(), ecg_chunks.size());

    training::Dataset out;
    for (std::size_t i = 0; i < n; ++i) {
        const PeakList pp =
            signals::detect_peaks(ppg_chunks[i], opts.min_bpm, opts.max_bpm);
        const PeakList rp =
            signals::detect_peaks(ecg_chunks[i], opts.min_bpm, opts.max_bpm);
        if (pp.size() < 2 || rp.size() < 2) continue;

        IntervalSequence x = signals::segment_intervals(ppg_chunks[i], pp,
                                                        opts.interval_len);
        IntervalSequence y = signals::segment_intervals(ecg_chunks[i], rp,
                                                        opts.interval_len);
        signals::AlignResult aligned;
        try {
            aligned = signals::align_pairs(x, y, pp, rp);
        } catch (const InvalidArgument&) {
            continue;  // no overlapping intervals in this chunk
        }
        if (aligned.ppg.steps() < 1) continue;

        const IntervalSequence xn = signals::normalize(aligned.ppg);
        const IntervalSequence yn = signals::normalize(aligned.ecg);

        training::LabeledChunk chunk;
        chunk.pair.x = xn.segments;
        chunk.pair.y = yn.segments;
        chunk.pair.chunk_id = subject + "#" + std::to_string(i);
        chunk.subject = subject;
        chunk.cohort = cohort;
        chunk.ppg_norm = xn.norm;
        chunk.ecg_norm = yn.norm;
        chunk.pp_lengths = xn.original_lengths;
        out.push_back(std::move(chunk));
    }
    return out;
}

training::Dataset preprocess_ppg_only(const Waveform& ppg_raw,
                                      const std::string& subject,
                                      const std::string& cohort,
                                      const PreprocessOptions& opts) {
    Waveform ppg = ppg_raw;
    if (opts.noise) ppg = signals::add_noise(ppg, *opts.noise, opts.noise_seed);
    ppg = signals::bandpass_filter(ppg, opts.ppg_band_low, opts.ppg_band_high);

    const auto ppg_chunks = signals::chunk(ppg, opts.chunk_seconds);
    training::Dataset out;
    for (std::size_t i = 0; i < ppg_chunks.size(); ++i) {
        const PeakList pp =
            signals::detect_peaks(ppg_chunks[i], opts.min_bpm, opts.max_bpm);
        if (pp.size() < 2) continue;
        IntervalSequence x = signals::segment_intervals(ppg_chunks[i], pp,
                                                        opts.interval_len);
        const IntervalSequence xn = signals::normalize(x);

        training::LabeledChunk chunk;
        chunk.pair.x = xn.segments;
        chunk.pair.y = Mat(0, 0);
        chunk.pair.chunk_id = subject + "#" + std::to_string(i);
        chunk.subject = subject;
        chunk.cohort = cohort;
        chunk.ppg_norm = xn.norm;
        chunk.pp_lengths = xn.original_lengths;
        out.push_back(std::move(chunk));
    }
    return out;
}

namespace {

constexpr char kDatasetMagic[8] = {'A', 'D', 'S', 'S', 'M', 'D', 'S', '1'};

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("truncated dataset file");
    return v;
}

void put_string(std::ofstream& out, const std::string& s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::ifstream& in) {
    const auto len = get<std::uint32_t>(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw IoError("truncated dataset file");
    return s;
}

void put_mat(std::ofstream& out, const Mat& m) {
    put<std::int64_t>(out, m.rows());
    put<std::int64_t>(out, m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
}

Mat get_mat(std::ifstream& in) {
    const auto rows = get<std::int64_t>(in);
    const auto cols = get<std::int64_t>(in);
    if (rows < 0 || cols < 0 || rows * cols > (1LL << 30))
        throw ParseError("implausible matrix shape in dataset");
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = get<double>(in);
    return m;
}

void put_norm(std::ofstream& out, const NormInfo& n) {
    put<double>(out, n.scale);
    put<double>(out, n.offset);
    put<std::uint8_t>(out, n.applied ? 1 : 0);
}

NormInfo get_norm(std::ifstream& in) {
    NormInfo n;
    n.scale = get<double>(in);
    n.offset = get<double>(in);
    n.applied = get<std::uint8_t>(in) != 0;
    return n;
}

}  // namespace

void save_dataset(const std::string& path, const training::Dataset& ds) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write dataset: " + path);
    out.write(kDatasetMagic, sizeof(kDatasetMagic));
    put<std::uint64_t>(out, ds.size());
    for (const auto& c : ds) {
        put_string(out, c.pair.chunk_id);
        put_string(out, c.subject);
        put_string(out, c.cohort);
        put_mat(out, c.pair.x);
        put_mat(out, c.pair.y);
        put<std::uint64_t>(out, c.pp_lengths.size());
        for (auto v : c.pp_lengths) put<std::int64_t>(out, v);
        put_norm(out, c.ppg_norm);
        put_norm(out, c.ecg_norm);
    }
    if (!out) throw IoError("write failure on dataset: " + path);
}

training::Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read dataset: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::string(magic, 8) != std::string(kDatasetMagic, 8))
        throw ParseError("not an ADSSM dataset file: " + path);
    const auto count = get<std::uint64_t>(in);
    training::Dataset ds;
    ds.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        training::LabeledChunk c;
        c.pair.chunk_id = get_string(in);
        c.subject = get_string(in);
        c.cohort = get_string(in);
        c.pair.x = get_mat(in);
        c.pair.y = get_mat(in);
        const auto len_count = get<std::uint64_t>(in);
        c.pp_lengths.resize(len_count);
        for (auto& v : c.pp_lengths) v = get<std::int64_t>(in);
        c.ppg_norm = get_norm(in);
        c.ecg_norm = get_norm(in);
        ds.push_back(std::move(c));
    }
    return ds;
}

std::vector<metrics::ChunkRecord> evaluate_dataset(
    const training::Dataset& ds, const model::ParameterSet& params,
    bool normalized_units) {
    std::vector<metrics::ChunkRecord> out;
    for (const auto& chunk : ds) {
        IntervalSequence x;
        x.segments = chunk.pair.x;
        x.original_lengths = chunk.pp_lengths;
        x.kind = IntervalKind::PP;
        x.norm = chunk.ppg_norm;
        x.chunk_id = chunk.pair.chunk_id;

        const translate::Translation tr = translate_chunk(
            x, params, translate::Mode::Mean, 0, 0, 125.0, false);

        std::vector<double> pred, ref;
        for (Eigen::Index t = 0; t < chunk.pair.y.rows(); ++t)
            for (Eigen::Index j = 0; j < chunk.pair.y.cols(); ++j) {
                double p = tr.per_interval_mean(t, j);
                double r = chunk.pair.y(t, j);
                if (!normalized_units) {
                    p = signals::denormalize_value(p, chunk.ecg_norm);
                    r = signals::denormalize_value(r, chunk.ecg_norm);
                }
                pred.push_back(p);
                ref.push_back(r);
            }

        metrics::ChunkRecord rec;
        rec.chunk_id = chunk.pair.chunk_id;
        rec.subject = chunk.subject;
        rec.cohort = chunk.cohort;
        rec.pearson = metrics::pearson(ref, pred);
        rec.rmse_mv = metrics::rmse(ref, pred);
        rec.snr_db = metrics::snr_db(ref, pred);
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace adssm::pipeline
