#include "adssm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace adssm::synth {

void SubjectProfile::validate() const {
    if (!(mean_bpm >= 30.0 && mean_bpm <= 220.0))
        throw InvalidArgument("mean_bpm out of [30, 220]");
    if (!(ptt_delay_s >= 0.1 && ptt_delay_s <= 0.4))
        throw InvalidArgument("ptt_delay_s out of [0.1, 0.4]");
    if (hr_variability_s < 0.0)
        throw InvalidArgument("hr_variability must be nonnegative");
}

namespace {

double gauss_bump(double dt, double amp, double sigma) {
    return amp * std::exp(-dt * dt / (2.0 * sigma * sigma));
}

// Fast rise, slow decay: piecewise Gaussian around the systolic peak so
// the sampled maximum stays on the ground-truth peak time.
double ppg_pulse(double dt, double rise_sigma, double decay_sigma) {
    const double s = dt < 0.0 ? rise_sigma : decay_sigma;
    return std::exp(-dt * dt / (2.0 * s * s));
}

struct Morphology {
    double p_amp, p_off, p_sigma;
    double q_amp, q_off, q_sigma;
    double r_amp, r_sigma;
    double s_amp, s_off, s_sigma;
    double t_amp, t_off, t_sigma;
    double ppg_rise, ppg_decay;
    double dicrotic_amp, dicrotic_off, dicrotic_sigma;
};

Morphology make_morphology(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(0.9, 1.1);
    Morphology m;
    m.p_amp = 0.15 * jitter(rng);
    m.p_off = -0.16;
    m.p_sigma = 0.035 * jitter(rng);
    m.q_amp = -0.12 * jitter(rng);
    m.q_off = -0.035;
    m.q_sigma = 0.012;
    m.r_amp = 1.0 * jitter(rng);
    m.r_sigma = 0.014;
    m.s_amp = -0.2 * jitter(rng);
    m.s_off = 0.035;
    m.s_sigma = 0.015;
    m.t_amp = 0.3 * jitter(rng);
    m.t_off = 0.25;
    m.t_sigma = 0.06 * jitter(rng);
    m.ppg_rise = 0.09 * jitter(rng);
    m.ppg_decay = 0.22 * jitter(rng);
    m.dicrotic_amp = 0.15 * jitter(rng);
    m.dicrotic_off = 0.35;
    m.dicrotic_sigma = 0.08;
    return m;
}

}  // namespace

PairedRecord generate_pair(const SubjectProfile& profile, double duration_s,
                           double rate_hz, std::uint64_t seed) {
    profile.validate();
    if (duration_s < 4.0)
        throw InvalidArgument("duration must be at least 4 s");
    if (rate_hz < 50.0)
        throw InvalidArgument("sample rate below 50 Hz cannot resolve the QRS");

    const Morphology morph = make_morphology(profile.morphology_seed);
    std::mt19937_64 rng(seed);

    // Beat schedule.
    const double mean_interval = 60.0 / profile.mean_bpm;
    std::vector<double> r_times;
    double t = 0.3;  // first beat
    if (profile.afib) {
        // Irregularly irregular: i.i.d. wide lognormal around the mean.
        const double sigma = 0.35;
        const double mu = std::log(mean_interval) - sigma * sigma / 2.0;
        std::lognormal_distribution<double> dist(mu, sigma);
        while (t < duration_s) {
            r_times.push_back(t);
            t += std::clamp(dist(rng), 0.3, 2.0);
        }
    } else {
        std::normal_distribution<double> dist(0.0, 1.0);
        while (t < duration_s) {
            r_times.push_back(t);
            double iv = mean_interval + profile.hr_variability_s * dist(rng);
            t += std::clamp(iv, 0.3, 2.0);
        }
    }

    const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
    PairedRecord rec;
    rec.ecg.sample_rate_hz = rate_hz;
    rec.ecg.label = SignalKind::ECG;
    rec.ecg.samples.assign(n, 0.0);
    rec.ppg.sample_rate_hz = rate_hz;
    rec.ppg.label = SignalKind::PPG;
    rec.ppg.samples.assign(n, 0.0);

    for (double r : r_times) {
        rec.truth.r_times_s.push_back(r);
        rec.truth.systolic_times_s.push_back(r + profile.ptt_delay_s);
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double ts = static_cast<double>(i) / rate_hz;
        double ecg = 0.0;
        double ppg = 0.0;
        for (double r : r_times) {
            const double dt = ts - r;
            if (dt < -1.2 || dt > 1.2) continue;
            if (!profile.afib)
                ecg += gauss_bump(dt - morph.p_off, morph.p_amp, morph.p_sigma);
            ecg += gauss_bump(dt - morph.q_off, morph.q_amp, morph.q_sigma);
            ecg += gauss_bump(dt, morph.r_amp, morph.r_sigma);
            ecg += gauss_bump(dt - morph.s_off, morph.s_amp, morph.s_sigma);
            ecg += gauss_bump(dt - morph.t_off, morph.t_amp, morph.t_sigma);

            const double dp = dt - profile.ptt_delay_s;
            ppg += ppg_pulse(dp, morph.ppg_rise, morph.ppg_decay);
            ppg += gauss_bump(dp - morph.dicrotic_off, morph.dicrotic_amp,
                              morph.dicrotic_sigma);
        }
        rec.ecg.samples[i] = ecg;
        rec.ppg.samples[i] = ppg;
    }
    return rec;
}

}  // namespace adssm::synth
