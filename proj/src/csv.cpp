#include "adssm/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace adssm::csv {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

double parse_double(const std::string& s, const std::string& path, int line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": malformed number '" + s + "'");
    }
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path);
    return out;
}

}  // namespace

Waveform read_waveform(const std::string& path, SignalKind label) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || split(line, ',') != std::vector<std::string>{"t_sec", "value"})
        throw ParseError(path + ":1: expected header 't_sec,value'");

    std::vector<double> times, values;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 2)
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected 2 fields, got " +
                             std::to_string(fields.size()));
        times.push_back(parse_double(fields[0], path, line_no));
        values.push_back(parse_double(fields[1], path, line_no));
    }
    if (times.size() < 2)
        throw ParseError(path + ": waveform needs at least 2 rows");

    const double dt = times[1] - times[0];
    if (dt <= 0.0) throw ParseError(path + ": time must be strictly increasing");
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double step = times[i] - times[i - 1];
        if (std::abs(step - dt) > 1e-6)
            throw ParseError(path + ":" + std::to_string(i + 2) +
                             ": non-uniform sample spacing");
    }
    Waveform w;
    w.samples = std::move(values);
    w.sample_rate_hz = 1.0 / dt;
    w.label = label;
    w.validate();
    return w;
}

void write_waveform(const std::string& path, const Waveform& w) {
    w.validate();
    std::ofstream out = open_out(path);
    out << "t_sec,value\n";
    out.precision(12);
    for (std::size_t i = 0; i < w.samples.size(); ++i)
        out << static_cast<double>(i) / w.sample_rate_hz << ',' << w.samples[i]
            << '\n';
    if (!out) throw IoError("write failure: " + path);
}

void write_peaks(const std::string& path, const synth::GroundTruth& truth) {
    std::ofstream out = open_out(path);
    out << "beat_index,r_time_s,systolic_time_s\n";
    out.precision(12);
    for (std::size_t i = 0; i < truth.r_times_s.size(); ++i)
        out << i << ',' << truth.r_times_s[i] << ',' << truth.systolic_times_s[i]
            << '\n';
}

synth::GroundTruth read_peaks(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) ||
        split(line, ',') !=
            std::vector<std::string>{"beat_index", "r_time_s", "systolic_time_s"})
        throw ParseError(path + ":1: expected peaks header");
    synth::GroundTruth truth;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 3)
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected 3 fields");
        truth.r_times_s.push_back(parse_double(fields[1], path, line_no));
        truth.systolic_times_s.push_back(parse_double(fields[2], path, line_no));
    }
    return truth;
}

std::vector<ManifestRow> read_manifest(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) ||
        split(line, ',') != std::vector<std::string>{"subject", "label",
                                                     "ppg_csv", "ecg_csv"})
        throw ParseError(path + ":1: expected header 'subject,label,ppg_csv,ecg_csv'");
    std::vector<ManifestRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 4)
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected 4 fields");
        if (fields[1] != "healthy" && fields[1] != "afib")
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": label must be healthy or afib");
        rows.push_back({fields[0], fields[1], fields[2], fields[3]});
    }
    return rows;
}

void write_manifest(const std::string& path, const std::vector<ManifestRow>& rows) {
    std::ofstream out = open_out(path);
    out << "subject,label,ppg_csv,ecg_csv\n";
    for (const auto& r : rows)
        out << r.subject << ',' << r.label << ',' << r.ppg_csv << ',' << r.ecg_csv
            << '\n';
}

}  // namespace adssm::csv
