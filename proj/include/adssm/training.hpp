#ifndef ADSSM_TRAINING_HPP
#define ADSSM_TRAINING_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "adssm/model.hpp"

namespace adssm::training {

struct OptimizerState {
    model::ParameterSet m;
    model::ParameterSet v;
    std::int64_t step = 0;
    double lr = 0.0008;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static OptimizerState init(const model::ParameterSet& params) {
        OptimizerState s;
        s.m = params.zeros_like();
        s.v = params.zeros_like();
        return s;
    }
};

struct Schedule {
    std::int64_t total_epochs = 5000;
    std::int64_t batch_size = 128;
    std::int64_t anneal_end_epoch = 1250;
    std::int64_t checkpoint_every = 100;

    void validate() const;
};

struct TrainState {
    model::ParameterSet params;
    OptimizerState opt;
    std::int64_t epoch = 0;
    double beta = 0.0;
    std::uint64_t seed = 0;
};

struct LabeledChunk {
    model::ChunkPair pair;
    std::string subject;
    std::string cohort;  // healthy / afib / noisy
    NormInfo ppg_norm;
    NormInfo ecg_norm;
    std::vector<std::int64_t> pp_lengths;
};

using Dataset = std::vector<LabeledChunk>;

struct EpochRecord {
    std::int64_t epoch;
    double beta;
    double train_loss;
    double val_loss;
    double wall_clock_s;
};

// Bias-corrected Adam; global gradient-norm clip at 10 happens in the
// train loop, not here.
void adam_step(model::ParameterSet& params, const model::ParameterSet& grads,
               OptimizerState& opt);

// Linear ramp min(1, epoch / anneal_end_epoch).
double beta_at(std::int64_t epoch, const Schedule& sched);

struct TrainOptions {
    Schedule sched;
    std::uint64_t seed = 1;
    std::string checkpoint_dir;   // empty: no checkpoints
    std::string metrics_csv;      // empty: no metrics log
    double grad_clip_norm = 10.0;
    bool strict_posterior = false;
    std::function<void(const EpochRecord&)> on_epoch;  // optional
};

// Seeded-shuffled buckets of same-T chunks; one epoch is a pass over all
// buckets. Resuming from `state` with the same seed reproduces the
// uninterrupted loss trace.
std::vector<EpochRecord> train(const Dataset& train_set, const Dataset& val_set,
                               TrainState& state, const TrainOptions& opts);

TrainState init_train_state(const model::Dims& dims, std::uint64_t seed);

void append_metrics_csv(const std::string& path,
                        const std::vector<EpochRecord>& records,
                        bool write_header);

}  // namespace adssm::training

#endif
