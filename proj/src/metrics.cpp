#include "adssm/metrics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "adssm/types.hpp"

namespace adssm::metrics {

double pearson(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size())
        throw InvalidArgument("pearson requires equal lengths");
    if (y.size() < 2) throw InvalidArgument("pearson needs at least 2 samples");
    const double n = static_cast<double>(y.size());
    double my = 0, mh = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        my += y[i];
        mh += yhat[i];
    }
    my /= n;
    mh /= n;
    double cov = 0, vy = 0, vh = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double a = y[i] - my, b = yhat[i] - mh;
        cov += a * b;
        vy += a * a;
        vh += b * b;
    }
    if (vy == 0.0 || vh == 0.0)
        throw InvalidArgument("pearson undefined for constant input");
    return cov / std::sqrt(vy * vh);
}

double rmse(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size())
        throw InvalidArgument("rmse requires equal lengths");
    if (y.empty()) throw InvalidArgument("rmse needs at least 1 sample");
    double ss = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - yhat[i];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(y.size()));
}

double snr_db(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size())
        throw InvalidArgument("snr_db requires equal lengths");
    double sig = 0, res = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sig += y[i] * y[i];
        const double d = y[i] - yhat[i];
        res += d * d;
    }
    if (res == 0.0) return std::numeric_limits<double>::infinity();
    if (sig == 0.0) return -std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(sig / res);
}

namespace {

void accumulate(Summary& s, const std::vector<const ChunkRecord*>& recs) {
    s.count = recs.size();
    const double n = static_cast<double>(recs.size());
    for (const auto* r : recs) {
        s.pearson_mean += r->pearson;
        s.rmse_mean += r->rmse_mv;
        s.snr_mean += r->snr_db;
    }
    s.pearson_mean /= n;
    s.rmse_mean /= n;
    s.snr_mean /= n;
    for (const auto* r : recs) {
        s.pearson_std += (r->pearson - s.pearson_mean) * (r->pearson - s.pearson_mean);
        s.rmse_std += (r->rmse_mv - s.rmse_mean) * (r->rmse_mv - s.rmse_mean);
        s.snr_std += (r->snr_db - s.snr_mean) * (r->snr_db - s.snr_mean);
    }
    s.pearson_std = std::sqrt(s.pearson_std / n);  // population std
    s.rmse_std = std::sqrt(s.rmse_std / n);
    s.snr_std = std::sqrt(s.snr_std / n);
}

}  // namespace

std::map<std::string, Summary> aggregate(const std::vector<ChunkRecord>& records) {
    if (records.empty()) throw InvalidArgument("aggregate needs records");
    std::map<std::string, std::vector<const ChunkRecord*>> groups;
    for (const auto& r : records) {
        groups["all"].push_back(&r);
        groups[r.cohort].push_back(&r);
    }
    std::map<std::string, Summary> out;
    for (auto& [cohort, recs] : groups) accumulate(out[cohort], recs);
    return out;
}

void write_report_csv(const std::string& path,
                      const std::vector<ChunkRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write report: " + path);
    out << "chunk_id,subject,cohort,pearson,rmse_mv,snr_db\n";
    out.precision(10);
    for (const auto& r : records)
        out << r.chunk_id << ',' << r.subject << ',' << r.cohort << ','
            << r.pearson << ',' << r.rmse_mv << ',' << r.snr_db << '\n';
}

std::string format_report(const std::map<std::string, Summary>& summaries) {
    std::ostringstream out;
    out.precision(4);
    out << std::fixed;
    for (const auto& [cohort, s] : summaries) {
        out << cohort << " (n=" << s.count << "): "
            << "pearson " << s.pearson_mean << " +/- " << s.pearson_std
            << ", rmse " << s.rmse_mean << " +/- " << s.rmse_std
            << ", snr " << s.snr_mean << " +/- " << s.snr_std << " dB\n";
    }
    out << "note: SNR uses 20*log10 of the squared-norm ratio, twice the "
           "conventional power-ratio dB scale\n";
    return out.str();
}

}  // namespace adssm::metrics
