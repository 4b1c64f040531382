#include "adssm/translate.hpp"

#include <algorithm>
#include <cmath>

#include "adssm/signals.hpp"

namespace adssm::translate {

namespace {

// One prior rollout; sampled when eps != nullptr, mean otherwise.
Mat rollout(const IntervalSequence& ppg, const model::ParameterSet& params,
            const Mat* eps, Mat* attention_out) {
    const std::int64_t steps = ppg.steps();
    const int latent = params.dims().latent;
    Mat out(steps, params.dims().n_rr);
    if (attention_out) attention_out->resize(steps, steps);

    Vec z_prev = params.at("z_init");
    for (std::int64_t t = 0; t < steps; ++t) {
        const model::Attention attn = model::attend(z_prev, ppg.segments, params);
        const model::GaussianParams prior =
            model::transition(z_prev, attn.context, params);
        Vec z = prior.mean;
        if (eps)
            z.array() += prior.var.array().sqrt() *
                         eps->row(t).transpose().array().head(latent);
        out.row(t) = model::emit(z, params).transpose();
        if (attention_out) attention_out->row(t) = attn.weights.transpose();
        z_prev = z;
    }
    return out;
}

std::vector<double> reassemble(const Mat& intervals,
                               const std::vector<std::int64_t>& lengths,
                               const NormInfo& norm, bool denorm) {
    std::vector<double> out;
    for (Eigen::Index t = 0; t < intervals.rows(); ++t) {
        std::vector<double> row(intervals.cols());
        for (Eigen::Index j = 0; j < intervals.cols(); ++j)
            row[j] = intervals(t, j);
        std::vector<double> restored =
            signals::resample_linear(row, static_cast<int>(lengths[t]));
        for (double v : restored)
            out.push_back(denorm ? signals::denormalize_value(v, norm) : v);
    }
    return out;
}

}  // namespace

Translation translate_chunk(const IntervalSequence& ppg,
                            const model::ParameterSet& params, Mode mode,
                            int draws, std::uint64_t seed,
                            double sample_rate_hz, bool denormalize) {
    if (ppg.steps() < 1) throw InvalidArgument("translate needs T >= 1");
    if (!params.all_finite())
        throw NumericError("model parameters contain non-finite values");
    if (mode == Mode::Sample && draws < 1)
        throw InvalidArgument("sample mode needs draws >= 1");
    if (ppg.original_lengths.size() != static_cast<std::size_t>(ppg.steps()))
        throw InvalidArgument("interval sequence is missing original lengths");

    Translation out;
    out.pp_lengths_used = ppg.original_lengths;
    out.per_interval_mean = rollout(ppg, params, nullptr, &out.attention);
    out.ecg_mean.sample_rate_hz = sample_rate_hz;
    out.ecg_mean.label = SignalKind::ECG;
    out.ecg_mean.samples = reassemble(out.per_interval_mean, ppg.original_lengths,
                                      ppg.norm, denormalize);

    if (mode == Mode::Sample) {
        out.ecg_samples.reserve(static_cast<std::size_t>(draws));
        for (int d = 0; d < draws; ++d) {
            const Mat eps = model::draw_eps(
                model::derive_seed(seed, static_cast<std::uint64_t>(d)),
                ppg.steps(), params.dims().latent);
            const Mat intervals = rollout(ppg, params, &eps, nullptr);
            out.ecg_samples.push_back(reassemble(intervals, ppg.original_lengths,
                                                 ppg.norm, denormalize));
        }
    }
    return out;
}

Band uncertainty_band(const Translation& t, double sample_rate_hz) {
    if (t.ecg_samples.size() < 20)
        throw InvalidArgument("uncertainty band needs at least 20 draws");
    const std::size_t n = t.ecg_samples.front().size();
    for (const auto& s : t.ecg_samples)
        if (s.size() != n) throw InvalidArgument("draws have inconsistent lengths");

    Band band;
    band.lower.sample_rate_hz = band.upper.sample_rate_hz = sample_rate_hz;
    band.lower.label = band.upper.label = SignalKind::ECG;
    band.lower.samples.resize(n);
    band.upper.samples.resize(n);

    std::vector<double> column(t.ecg_samples.size());
    auto percentile = [&column](double p) {
        const double pos = p * static_cast<double>(column.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        if (lo + 1 >= column.size()) return column[lo];
        return column[lo] * (1.0 - frac) + column[lo + 1] * frac;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < t.ecg_samples.size(); ++d)
            column[d] = t.ecg_samples[d][i];
        std::sort(column.begin(), column.end());
        band.lower.samples[i] = percentile(0.05);
        band.upper.samples[i] = percentile(0.95);
    }
    return band;
}

}  // namespace adssm::translate
