#ifndef ADSSM_METRICS_HPP
#define ADSSM_METRICS_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

namespace adssm::metrics {

double pearson(std::span<const double> y, std::span<const double> yhat);
double rmse(std::span<const double> y, std::span<const double> yhat);

// 20 log10(|y|^2 / |y - yhat|^2), the factor-20-with-squared-norms
// convention; +inf on zero residual, -inf on zero signal.
double snr_db(std::span<const double> y, std::span<const double> yhat);

struct ChunkRecord {
    std::string chunk_id;
    std::string subject;
    std::string cohort;
    double pearson;
    double rmse_mv;
    double snr_db;
};

struct Summary {
    std::size_t count = 0;
    double pearson_mean = 0, pearson_std = 0;
    double rmse_mean = 0, rmse_std = 0;
    double snr_mean = 0, snr_std = 0;
};

// Mean and population std per metric, per cohort plus an "all" row.
std::map<std::string, Summary> aggregate(const std::vector<ChunkRecord>& records);

void write_report_csv(const std::string& path,
                      const std::vector<ChunkRecord>& records);
std::string format_report(const std::map<std::string, Summary>& summaries);

}  // namespace adssm::metrics

#endif
